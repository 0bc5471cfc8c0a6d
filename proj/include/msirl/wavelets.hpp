// Copyright 2026 The msirl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSIRL_WAVELETS_HPP
#define MSIRL_WAVELETS_HPP

#include <vector>

#include "msirl/common.hpp"

namespace msirl {

/// One level of the diffusion-wavelet hierarchy. With n_j the dimension
/// above this level and n_{j+1} the dimension below:
///   scaling — next-level scaling basis on the current one, n_j x n_{j+1};
///   wavelet — orthogonal complement basis, n_j x (n_j - n_{j+1});
///   op      — the squared diffusion operator compressed onto `scaling`,
///             n_{j+1} x n_{j+1}.
struct WaveletLevel {
  SpMat scaling;
  SpMat wavelet;
  SpMat op;
};

/// Multiscale basis tree over a column-stochastic diffusion operator T.
/// levels[j-1] carries the factors between level j-1 and level j; op at
/// depth j represents T^(2^j) on its own scaling basis.
struct WaveletTree {
  double epsilon = 0.0;
  std::vector<Index> dims;          // dims[0] = n, nonincreasing
  std::vector<WaveletLevel> levels; // size = n_levels()

  int n_levels() const { return static_cast<int>(levels.size()); }
};

/// Builds the tree by repeated rank-revealing orthonormalization of the
/// columns of T_j (precision epsilon) and dyadic squaring
/// T_{j+1} = scaling' * T_j * T_j * scaling. Stored factors drop entries
/// below epsilon / rows. Recursion ends at dimension 1 or max_levels.
WaveletTree build_tree(const SpMat& T, double epsilon, int max_levels = 20);

/// Scaling basis of level j expressed in original coordinates: the product
/// of the stored inter-level factors 1..j. Requires 1 <= j <= n_levels.
Mat unpack(const WaveletTree& tree, int j);

/// All wavelet bases above level l in original coordinates, finest first;
/// n x (n - dims[l]) with 1 <= l <= n_levels. Together with unpack(tree, l)
/// the columns span the original space up to epsilon truncation.
Mat unpack_wavelets(const WaveletTree& tree, int l);

/// Overlap of visitation counts with feature magnitudes:
/// s_k = sum_i b_i |W_ik|. b must be nonnegative.
Vec score_wavelets(const Vec& b, const Mat& W);

} // namespace msirl

#endif // MSIRL_WAVELETS_HPP
