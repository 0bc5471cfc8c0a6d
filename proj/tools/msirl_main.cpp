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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "msirl/pipeline.hpp"

namespace {

msirl::ExperimentConfig config_for(const std::string& config_path) {
  if (config_path.empty()) return msirl::ExperimentConfig{};
  return msirl::load_config(config_path);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale inverse reinforcement learning for linearly-solvable optimal control"};
  app.require_subcommand(1);

  std::string config_path;
  std::string in_dir;
  std::string out_dir;
  std::string current_stage;

  auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  run->add_option("config", config_path, "experiment config JSON")->required();
  run->callback([&] {
    const auto cfg = msirl::load_config(config_path);
    msirl::pipeline::run_pipeline(cfg, [&](const std::string& stage) {
      current_stage = stage;
      std::cout << "[msirl] " << stage << "\n";
    });
    std::cout << "[msirl] artifacts in " << cfg.output_dir << "\n";
  });

  const auto add_stage = [&](const std::string& name, const std::string& help, auto runner,
                             bool needs_in) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "experiment config JSON (defaults when omitted)");
    if (needs_in) cmd->add_option("--in", in_dir, "input artifact directory")->required();
    cmd->add_option("--out", out_dir, "output directory (defaults to --in)");
    cmd->callback([&, runner, name] {
      current_stage = name;
      if (out_dir.empty()) out_dir = in_dir;
      if (out_dir.empty()) throw msirl::ConfigError(name + ": --out is required");
      runner(config_for(config_path));
    });
    return cmd;
  };

  add_stage(
      "discretize", "Sample states and build the Markov chain",
      [&](const msirl::ExperimentConfig& cfg) { msirl::pipeline::stage_discretize(cfg, out_dir); },
      false);
  add_stage(
      "forward", "Solve the linear Bellman equation and emit demonstrations",
      [&](const msirl::ExperimentConfig& cfg) {
        msirl::pipeline::stage_forward(cfg, in_dir, out_dir);
      },
      true);
  add_stage(
      "wavelets", "Build the diffusion-wavelet tree",
      [&](const msirl::ExperimentConfig& cfg) {
        msirl::pipeline::stage_wavelets(cfg, in_dir, out_dir);
      },
      true);
  add_stage(
      "irl", "Run the coarse-to-fine inverse solve",
      [&](const msirl::ExperimentConfig& cfg) { msirl::pipeline::stage_irl(cfg, in_dir, out_dir); },
      true);
  add_stage(
      "control", "Close the loop with the receding-horizon controller",
      [&](const msirl::ExperimentConfig& cfg) {
        msirl::pipeline::stage_control(cfg, in_dir, out_dir);
      },
      true);

  auto* report = app.add_subcommand("report", "Render the level table and value/cost heatmaps");
  report->add_option("--in", in_dir, "artifact directory")->required();
  report->callback([&] {
    current_stage = "report";
    msirl::pipeline::write_report(in_dir, std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  } catch (const msirl::ConfigError& err) {
    std::cerr << "error" << (current_stage.empty() ? "" : " in " + current_stage) << ": "
              << err.what() << "\n";
    return 2;
  } catch (const msirl::IoError& err) {
    std::cerr << "error" << (current_stage.empty() ? "" : " in " + current_stage) << ": "
              << err.what() << "\n";
    return 4;
  } catch (const msirl::Error& err) {
    std::cerr << "error" << (current_stage.empty() ? "" : " in " + current_stage) << ": "
              << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
