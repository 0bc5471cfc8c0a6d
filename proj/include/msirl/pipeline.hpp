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

#ifndef MSIRL_PIPELINE_HPP
#define MSIRL_PIPELINE_HPP

#include <iosfwd>

#include "msirl/config.hpp"
#include "msirl/io.hpp"

namespace msirl::pipeline {

/// Builds the environment from the config spec or loads it from the
/// configured JSON path.
Environment load_environment(const ExperimentConfig& cfg);

/// Evaluates the configured ground-truth cost on the sampled states.
Vec make_cost(const CostConfig& cost, const Environment& env, const StateSet& states);

/// Each stage reads persisted artifacts from in_dir and writes its outputs
/// to out_dir; run_pipeline composes them over cfg.output_dir.
void stage_discretize(const ExperimentConfig& cfg, const std::string& out_dir);
void stage_forward(const ExperimentConfig& cfg, const std::string& in_dir,
                   const std::string& out_dir);
void stage_wavelets(const ExperimentConfig& cfg, const std::string& in_dir,
                    const std::string& out_dir);
void stage_irl(const ExperimentConfig& cfg, const std::string& in_dir,
               const std::string& out_dir);
void stage_control(const ExperimentConfig& cfg, const std::string& in_dir,
                   const std::string& out_dir);

/// Runs all stages in order. on_stage (when set) is called with each stage
/// name as it starts, so callers can attribute failures.
void run_pipeline(const ExperimentConfig& cfg,
                  const std::function<void(const std::string&)>& on_stage = nullptr);

/// Prints the per-level table and renders v_hat.pgm / q_hat.pgm heatmaps of
/// the finest solution in the artifact directory.
void write_report(const std::string& in_dir, std::ostream& out);

} // namespace msirl::pipeline

#endif // MSIRL_PIPELINE_HPP
