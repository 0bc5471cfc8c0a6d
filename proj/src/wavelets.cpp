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

#include "msirl/wavelets.hpp"

#include <cmath>
#include <string>

namespace msirl {
namespace {

// Column-pivoted modified Gram-Schmidt, stopping once the largest residual
// column norm drops to `epsilon` or below. Ties pick the lowest column
// index; accepted columns get one reorthogonalization pass. `work` is
// consumed. Deterministic for any thread count: column updates are
// independent and the pivot scan is sequential.
Mat rank_revealing_mgs(Mat work, double epsilon) {
  const Index n = work.rows();
  const Index m = work.cols();
  const Index k_max = std::min(n, m);
  const double eps2 = epsilon * epsilon;

  Vec norms(m);
  for (Index c = 0; c < m; ++c) norms[c] = work.col(c).squaredNorm();
  std::vector<char> used(static_cast<std::size_t>(m), 0);

  Mat Q(n, k_max);
  Index k = 0;
  while (k < k_max) {
    Index pivot = -1;
    double best = eps2;
    for (Index c = 0; c < m; ++c) {
      if (!used[c] && norms[c] > best) {
        best = norms[c];
        pivot = c;
      }
    }
    if (pivot < 0) break;

    Vec q = work.col(pivot);
    if (k > 0) q -= Q.leftCols(k) * (Q.leftCols(k).transpose() * q);
    const double nrm = q.norm();
    used[pivot] = 1;
    norms[pivot] = 0.0;
    if (nrm <= epsilon) continue; // rounding drift exposed by the second pass
    q /= nrm;
    Q.col(k) = q;
    ++k;

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t c = lo; c < hi; ++c) {
        const auto cc = static_cast<Index>(c);
        if (used[c]) continue;
        const double coef = q.dot(work.col(cc));
        work.col(cc) -= coef * q;
        norms[cc] = work.col(cc).squaredNorm();
      }
    });
  }
  return Q.leftCols(k);
}

SpMat sparsify(const Mat& A, double threshold) {
  std::vector<Triplet> entries;
  for (Index c = 0; c < A.cols(); ++c) {
    for (Index r = 0; r < A.rows(); ++r) {
      if (std::abs(A(r, c)) >= threshold) entries.emplace_back(r, c, A(r, c));
    }
  }
  SpMat S(A.rows(), A.cols());
  S.setFromTriplets(entries.begin(), entries.end());
  S.makeCompressed();
  return S;
}

} // namespace

WaveletTree build_tree(const SpMat& T, double epsilon, int max_levels) {
  const Index n = T.rows();
  if (n == 0 || T.cols() != n) throw ConfigError("diffusion operator must be square and nonempty");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (max_levels < 1) throw ConfigError("max_levels must be at least 1");

  Vec col_sums = Vec::Zero(n);
  for (Index c = 0; c < T.outerSize(); ++c) {
    for (SpMat::InnerIterator it(T, c); it; ++it) {
      if (it.value() < 0.0) throw ConfigError("diffusion operator has a negative entry");
      col_sums[c] += it.value();
    }
  }
  if ((col_sums.array() - 1.0).abs().maxCoeff() > 1e-12) {
    throw ConfigError("diffusion operator columns must sum to 1 within 1e-12");
  }

  WaveletTree tree;
  tree.epsilon = epsilon;
  tree.dims.push_back(n);

  Mat T_j = Mat(T);
  for (int level = 0; level < max_levels; ++level) {
    const Index n_j = T_j.rows();
    Mat Q = rank_revealing_mgs(T_j, epsilon);
    const Index n_next = Q.cols();
    if (n_next == 0) {
      throw StructureError("scaling basis collapsed to rank zero at level " +
                           std::to_string(level + 1));
    }

    Mat residual = Mat::Identity(n_j, n_j) - Q * Q.transpose();
    Mat W = rank_revealing_mgs(std::move(residual), epsilon);
    if (W.cols() != n_j - n_next) {
      throw NumericError("wavelet count " + std::to_string(W.cols()) + " at level " +
                         std::to_string(level + 1) + " does not match dimension drop " +
                         std::to_string(n_j - n_next));
    }

    Mat T_next = Q.transpose() * (T_j * (T_j * Q));

    WaveletLevel stored;
    stored.scaling = sparsify(Q, epsilon / static_cast<double>(n_j));
    stored.wavelet = sparsify(W, epsilon / static_cast<double>(n_j));
    stored.op = sparsify(T_next, epsilon / static_cast<double>(n_next));
    tree.levels.push_back(std::move(stored));
    tree.dims.push_back(n_next);

    if (n_next == 1) break;
    // Recurse on the sparsified operator so the persisted tree and the
    // in-memory recursion see identical inputs.
    T_j = Mat(tree.levels.back().op);
  }
  return tree;
}

namespace {

void check_level(const WaveletTree& tree, int j, const char* what) {
  if (j < 1 || j > tree.n_levels()) {
    throw ConfigError(std::string(what) + " level " + std::to_string(j) +
                      " is out of range [1, " + std::to_string(tree.n_levels()) + "]");
  }
}

} // namespace

Mat unpack(const WaveletTree& tree, int j) {
  check_level(tree, j, "unpack");
  Mat acc = Mat(tree.levels[0].scaling);
  for (int i = 1; i < j; ++i) acc = acc * Mat(tree.levels[static_cast<std::size_t>(i)].scaling);
  return acc;
}

Mat unpack_wavelets(const WaveletTree& tree, int l) {
  check_level(tree, l, "unpack_wavelets");
  const Index n = tree.dims[0];
  Mat W(n, n - tree.dims[static_cast<std::size_t>(l)]);
  Index offset = 0;
  for (int j = 0; j < l; ++j) {
    Mat W_j = Mat(tree.levels[static_cast<std::size_t>(j)].wavelet);
    if (j > 0) W_j = unpack(tree, j) * W_j;
    W.middleCols(offset, W_j.cols()) = W_j;
    offset += W_j.cols();
  }
  return W;
}

Vec score_wavelets(const Vec& b, const Mat& W) {
  if (b.size() != W.rows()) {
    throw ConfigError("visitation vector length " + std::to_string(b.size()) +
                      " does not match feature rows " + std::to_string(W.rows()));
  }
  if ((b.array() < 0.0).any()) throw ConfigError("visitation counts must be nonnegative");
  return W.cwiseAbs().transpose() * b;
}

} // namespace msirl
