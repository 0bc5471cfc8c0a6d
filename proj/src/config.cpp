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

#include "msirl/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "msirl/io.hpp"

namespace msirl {

using nlohmann::json;

namespace {

// Rejects keys the section does not define; typos in configs should fail
// loudly, not silently fall back to defaults.
void check_keys(const json& section, const std::string& name,
                std::initializer_list<const char*> allowed) {
  const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
  for (const auto& item : section.items()) {
    if (allowed_set.count(item.key()) == 0) {
      throw ConfigError("config: unknown key '" + item.key() + "' in section '" + name + "'");
    }
  }
}

const json& section_or_empty(const json& doc, const char* name, const json& empty) {
  const auto it = doc.find(name);
  return it == doc.end() ? empty : *it;
}

template <typename T>
void get_to_if_present(const json& section, const char* key, T& target) {
  const auto it = section.find(key);
  if (it != section.end()) it->get_to(target);
}

} // namespace

void ExperimentConfig::validate() const {
  if (env_path.empty()) env_spec.validate();
  if (dynamics.name.empty()) throw ConfigError("config: dynamics.name must be set");
  if (!(dynamics.h > 0.0)) throw ConfigError("config: dynamics.h must be positive");
  if (!(dynamics.sigma > 0.0)) throw ConfigError("config: dynamics.sigma must be positive");
  if (sampling.per_room < 1) throw ConfigError("config: sampling.per_room must be positive");
  if (!(truncation.trunc_mahalanobis > 0.0)) {
    throw ConfigError("config: truncation.trunc_mahalanobis must be positive");
  }
  if (!(wavelets.epsilon > 0.0) || wavelets.epsilon > 0.1) {
    throw ConfigError("config: wavelets.epsilon must lie in (0, 0.1]");
  }
  if (wavelets.max_levels < 1) throw ConfigError("config: wavelets.max_levels must be positive");
  if (cost.type != "goal_room" && cost.type != "quadratic" && cost.type != "uniform") {
    throw ConfigError("config: cost.type must be goal_room, quadratic or uniform");
  }
  if (cost.room < 0) throw ConfigError("config: cost.room must be nonnegative");
  if (!std::isfinite(cost.low) || !std::isfinite(cost.high) || !std::isfinite(cost.weight)) {
    throw ConfigError("config: cost parameters must be finite");
  }
  if (demos.mode != "exact" && demos.mode != "sampled") {
    throw ConfigError("config: demos.mode must be exact or sampled");
  }
  if (!(demos.scale > 0.0)) throw ConfigError("config: demos.scale must be positive");
  if (demos.n_transitions < 1) throw ConfigError("config: demos.n_transitions must be positive");
  if (irl.start_level < 0) throw ConfigError("config: irl.start_level must be nonnegative");
  if (irl.end_level < 1) throw ConfigError("config: irl.end_level must be at least 1");
  if (irl.start_level != 0 && irl.start_level < irl.end_level) {
    throw ConfigError("config: irl.start_level must be 0 (auto) or >= end_level");
  }
  if (irl.augment_k < -1) throw ConfigError("config: irl.augment_k must be -1 (all) or >= 0");
  if (!(irl.tol > 0.0)) throw ConfigError("config: irl.tol must be positive");
  if (irl.max_iter < 1) throw ConfigError("config: irl.max_iter must be positive");
  if (!(forward.tol > 0.0)) throw ConfigError("config: forward.tol must be positive");
  if (forward.max_iter < 1) throw ConfigError("config: forward.max_iter must be positive");
  if (control.k_rhc < 1) throw ConfigError("config: control.k_rhc must be positive");
  if (!(control.t_end > 0.0)) throw ConfigError("config: control.t_end must be positive");
  if (!(control.dt > 0.0)) throw ConfigError("config: control.dt must be positive");
  if (control.has_x0 && (!std::isfinite(control.x0_x) || !std::isfinite(control.x0_y))) {
    throw ConfigError("config: control.x0 must be finite");
  }
  if (output_dir.empty()) throw ConfigError("config: output_dir must be set");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: invalid JSON (") + err.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError("config: top-level document must be an object");
  check_keys(doc, "top level",
             {"schema", "environment", "dynamics", "sampling", "truncation", "wavelets", "cost",
              "demos", "irl", "forward", "control", "output_dir"});

  ExperimentConfig cfg;
  const json empty = json::object();
  try {
    const json& env = section_or_empty(doc, "environment", empty);
    check_keys(env, "environment", {"path", "groups", "rooms_per_group", "room_size",
                                    "door_width"});
    if (env.contains("path")) {
      env.at("path").get_to(cfg.env_path);
    } else {
      get_to_if_present(env, "groups", cfg.env_spec.groups);
      get_to_if_present(env, "rooms_per_group", cfg.env_spec.rooms_per_group);
      get_to_if_present(env, "room_size", cfg.env_spec.room_size);
      get_to_if_present(env, "door_width", cfg.env_spec.door_width);
    }

    const json& dyn = section_or_empty(doc, "dynamics", empty);
    check_keys(dyn, "dynamics", {"name", "h", "sigma"});
    get_to_if_present(dyn, "name", cfg.dynamics.name);
    get_to_if_present(dyn, "h", cfg.dynamics.h);
    get_to_if_present(dyn, "sigma", cfg.dynamics.sigma);

    const json& sampling = section_or_empty(doc, "sampling", empty);
    check_keys(sampling, "sampling", {"per_room", "seed"});
    get_to_if_present(sampling, "per_room", cfg.sampling.per_room);
    get_to_if_present(sampling, "seed", cfg.sampling.seed);

    const json& truncation = section_or_empty(doc, "truncation", empty);
    check_keys(truncation, "truncation", {"trunc_mahalanobis"});
    get_to_if_present(truncation, "trunc_mahalanobis", cfg.truncation.trunc_mahalanobis);

    const json& wavelets = section_or_empty(doc, "wavelets", empty);
    check_keys(wavelets, "wavelets", {"epsilon", "max_levels"});
    get_to_if_present(wavelets, "epsilon", cfg.wavelets.epsilon);
    get_to_if_present(wavelets, "max_levels", cfg.wavelets.max_levels);

    const json& cost = section_or_empty(doc, "cost", empty);
    check_keys(cost, "cost", {"type", "room", "low", "high", "weight"});
    get_to_if_present(cost, "type", cfg.cost.type);
    get_to_if_present(cost, "room", cfg.cost.room);
    get_to_if_present(cost, "low", cfg.cost.low);
    get_to_if_present(cost, "high", cfg.cost.high);
    get_to_if_present(cost, "weight", cfg.cost.weight);

    const json& demos = section_or_empty(doc, "demos", empty);
    check_keys(demos, "demos", {"mode", "scale", "n_transitions", "seed"});
    get_to_if_present(demos, "mode", cfg.demos.mode);
    get_to_if_present(demos, "scale", cfg.demos.scale);
    get_to_if_present(demos, "n_transitions", cfg.demos.n_transitions);
    get_to_if_present(demos, "seed", cfg.demos.seed);

    const json& irl = section_or_empty(doc, "irl", empty);
    check_keys(irl, "irl", {"start_level", "end_level", "augment_k", "tol", "max_iter"});
    get_to_if_present(irl, "start_level", cfg.irl.start_level);
    get_to_if_present(irl, "end_level", cfg.irl.end_level);
    get_to_if_present(irl, "augment_k", cfg.irl.augment_k);
    get_to_if_present(irl, "tol", cfg.irl.tol);
    get_to_if_present(irl, "max_iter", cfg.irl.max_iter);

    const json& forward = section_or_empty(doc, "forward", empty);
    check_keys(forward, "forward", {"tol", "max_iter"});
    get_to_if_present(forward, "tol", cfg.forward.tol);
    get_to_if_present(forward, "max_iter", cfg.forward.max_iter);

    const json& control = section_or_empty(doc, "control", empty);
    check_keys(control, "control", {"k_rhc", "t_end", "dt", "seed", "x0"});
    get_to_if_present(control, "k_rhc", cfg.control.k_rhc);
    get_to_if_present(control, "t_end", cfg.control.t_end);
    get_to_if_present(control, "dt", cfg.control.dt);
    get_to_if_present(control, "seed", cfg.control.seed);
    if (control.contains("x0")) {
      const auto& x0 = control.at("x0");
      if (!x0.is_array() || x0.size() != 2) {
        throw ConfigError("config: control.x0 must be a two-element array");
      }
      cfg.control.has_x0 = true;
      cfg.control.x0_x = x0.at(0).get<double>();
      cfg.control.x0_y = x0.at(1).get<double>();
    }

    get_to_if_present(doc, "output_dir", cfg.output_dir);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }

  cfg.validate();
  return cfg;
}

std::string dump_config(const ExperimentConfig& cfg) {
  json doc;
  doc["schema"] = "msirl.config.v1";
  if (!cfg.env_path.empty()) {
    doc["environment"] = {{"path", cfg.env_path}};
  } else {
    doc["environment"] = {{"groups", cfg.env_spec.groups},
                          {"rooms_per_group", cfg.env_spec.rooms_per_group},
                          {"room_size", cfg.env_spec.room_size},
                          {"door_width", cfg.env_spec.door_width}};
  }
  doc["dynamics"] = {{"name", cfg.dynamics.name}, {"h", cfg.dynamics.h},
                     {"sigma", cfg.dynamics.sigma}};
  doc["sampling"] = {{"per_room", cfg.sampling.per_room}, {"seed", cfg.sampling.seed}};
  doc["truncation"] = {{"trunc_mahalanobis", cfg.truncation.trunc_mahalanobis}};
  doc["wavelets"] = {{"epsilon", cfg.wavelets.epsilon}, {"max_levels", cfg.wavelets.max_levels}};
  doc["cost"] = {{"type", cfg.cost.type},
                 {"room", cfg.cost.room},
                 {"low", cfg.cost.low},
                 {"high", cfg.cost.high},
                 {"weight", cfg.cost.weight}};
  doc["demos"] = {{"mode", cfg.demos.mode},
                  {"scale", cfg.demos.scale},
                  {"n_transitions", cfg.demos.n_transitions},
                  {"seed", cfg.demos.seed}};
  doc["irl"] = {{"start_level", cfg.irl.start_level},
                {"end_level", cfg.irl.end_level},
                {"augment_k", cfg.irl.augment_k},
                {"tol", cfg.irl.tol},
                {"max_iter", cfg.irl.max_iter}};
  doc["forward"] = {{"tol", cfg.forward.tol}, {"max_iter", cfg.forward.max_iter}};
  json control = {{"k_rhc", cfg.control.k_rhc},
                  {"t_end", cfg.control.t_end},
                  {"dt", cfg.control.dt},
                  {"seed", cfg.control.seed}};
  if (cfg.control.has_x0) control["x0"] = {cfg.control.x0_x, cfg.control.x0_y};
  doc["control"] = std::move(control);
  doc["output_dir"] = cfg.output_dir;
  return doc.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  return parse_config(text);
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  io::write_file(path, dump_config(cfg));
}

} // namespace msirl
