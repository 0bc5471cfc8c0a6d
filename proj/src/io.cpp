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

#include "msirl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace msirl::io {

using nlohmann::json;

namespace {

std::string schema_line(const std::string& name) { return "# schema: msirl." + name + ".v1"; }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

double parse_double(const std::string& field, const std::string& path) {
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
    throw IoError(path + ": cannot parse number '" + field + "'");
  }
  return value;
}

long parse_long(const std::string& field, const std::string& path) {
  long value = 0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
    throw IoError(path + ": cannot parse integer '" + field + "'");
  }
  return value;
}

// Returns the data rows of a CSV after validating the schema comment and
// the column header.
std::vector<std::string> read_csv(const std::string& path, const std::string& name,
                                  const std::string& header) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.size() < 2 || lines[0] != schema_line(name)) {
    throw IoError(path + ": missing or wrong schema line (expected '" + schema_line(name) + "')");
  }
  if (lines[1] != header) {
    throw IoError(path + ": unexpected header '" + lines[1] + "' (expected '" + header + "')");
  }
  return {lines.begin() + 2, lines.end()};
}

json read_json(const std::string& path, const std::string& name) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& err) {
    throw IoError(path + ": " + err.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != "msirl." + name + ".v1") {
    throw IoError(path + ": missing or wrong schema field (expected 'msirl." + name + ".v1')");
  }
  return doc;
}

void write_json(const std::string& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

} // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create directory (" + ec.message() + ")");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path + ": write failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError(path + ": read failed");
  return buffer.str();
}

void write_environment(const std::string& path, const Environment& env) {
  json doc;
  doc["schema"] = "msirl.environment.v1";
  doc["bounds"] = {env.bounds.xmin, env.bounds.ymin, env.bounds.xmax, env.bounds.ymax};
  json walls = json::array();
  for (const Segment& w : env.walls) walls.push_back({w.x1, w.y1, w.x2, w.y2});
  doc["walls"] = std::move(walls);
  json rooms = json::array();
  for (const Room& room : env.rooms) {
    rooms.push_back({{"rect", {room.rect.xmin, room.rect.ymin, room.rect.xmax, room.rect.ymax}},
                     {"group", room.group}});
  }
  doc["rooms"] = std::move(rooms);
  write_json(path, doc);
}

Environment read_environment(const std::string& path) {
  const json doc = read_json(path, "environment");
  Environment env;
  try {
    const auto& b = doc.at("bounds");
    env.bounds = Rect{b.at(0), b.at(1), b.at(2), b.at(3)};
    for (const auto& w : doc.at("walls")) {
      env.walls.push_back(Segment{w.at(0), w.at(1), w.at(2), w.at(3)});
    }
    for (const auto& r : doc.at("rooms")) {
      const auto& rect = r.at("rect");
      env.rooms.push_back(Room{Rect{rect.at(0), rect.at(1), rect.at(2), rect.at(3)},
                               r.at("group").get<int>()});
    }
  } catch (const json::exception& err) {
    throw IoError(path + ": " + err.what());
  }
  return env;
}

void write_states(const std::string& path, const StateSet& states) {
  std::string out = schema_line("states") + "\nindex,x,y,room\n";
  for (Index i = 0; i < states.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(states.points(i, 0)) + ',' +
           format_double(states.points(i, 1)) + ',' +
           std::to_string(states.room[static_cast<std::size_t>(i)]) + '\n';
  }
  write_file(path, out);
}

StateSet read_states(const std::string& path) {
  const auto rows = read_csv(path, "states", "index,x,y,room");
  StateSet states;
  states.points.resize(static_cast<Index>(rows.size()), 2);
  states.room.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto fields = split_fields(rows[i]);
    if (fields.size() != 4 || parse_long(fields[0], path) != static_cast<long>(i)) {
      throw IoError(path + ": malformed row " + std::to_string(i));
    }
    states.points(static_cast<Index>(i), 0) = parse_double(fields[1], path);
    states.points(static_cast<Index>(i), 1) = parse_double(fields[2], path);
    states.room[i] = static_cast<int>(parse_long(fields[3], path));
  }
  return states;
}

void write_sparse(const std::string& path, const std::string& name, const SpMatRow& matrix) {
  std::string out = schema_line(name) + "\nrow,col,value\n";
  for (Index i = 0; i < matrix.outerSize(); ++i) {
    for (SpMatRow::InnerIterator it(matrix, i); it; ++it) {
      out += std::to_string(it.row()) + ',' + std::to_string(it.col()) + ',' +
             format_double(it.value()) + '\n';
    }
  }
  write_file(path, out);
}

SpMatRow read_sparse(const std::string& path, const std::string& name, Index rows, Index cols) {
  const auto data = read_csv(path, name, "row,col,value");
  std::vector<Triplet> entries;
  entries.reserve(data.size());
  for (const std::string& row : data) {
    const auto fields = split_fields(row);
    if (fields.size() != 3) throw IoError(path + ": malformed row '" + row + "'");
    const long r = parse_long(fields[0], path);
    const long c = parse_long(fields[1], path);
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw IoError(path + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                    ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    entries.emplace_back(r, c, parse_double(fields[2], path));
  }
  SpMatRow matrix(rows, cols);
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.makeCompressed();
  return matrix;
}

void write_chain(const std::string& dir, const MarkovChain& chain) {
  write_states(dir + "/states.csv", chain.states);
  write_sparse(dir + "/chain.csv", "chain", chain.P);
  json doc;
  doc["schema"] = "msirl.chain.v1";
  doc["n"] = chain.size();
  doc["h"] = chain.h;
  write_json(dir + "/chain.json", doc);
}

MarkovChain read_chain(const std::string& dir) {
  const json doc = read_json(dir + "/chain.json", "chain");
  MarkovChain chain;
  chain.states = read_states(dir + "/states.csv");
  const auto n = doc.at("n").get<Index>();
  if (n != chain.states.size()) {
    throw IoError(dir + "/chain.json: state count does not match states.csv");
  }
  chain.h = doc.at("h").get<double>();
  chain.P = read_sparse(dir + "/chain.csv", "chain", n, n);
  return chain;
}

void write_cost(const std::string& path, const Vec& q) {
  std::string out = schema_line("cost") + "\nindex,q\n";
  for (Index i = 0; i < q.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(q[i]) + '\n';
  }
  write_file(path, out);
}

Vec read_cost(const std::string& path) {
  const auto rows = read_csv(path, "cost", "index,q");
  Vec q(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto fields = split_fields(rows[i]);
    if (fields.size() != 2 || parse_long(fields[0], path) != static_cast<long>(i)) {
      throw IoError(path + ": malformed row " + std::to_string(i));
    }
    q[static_cast<Index>(i)] = parse_double(fields[1], path);
  }
  return q;
}

void write_forward(const std::string& dir, const ForwardSolution& solution) {
  std::string out = schema_line("forward") + "\nindex,z,v\n";
  for (Index i = 0; i < solution.z.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(solution.z[i]) + ',' +
           format_double(solution.v[i]) + '\n';
  }
  write_file(dir + "/forward.csv", out);
  json doc;
  doc["schema"] = "msirl.forward.v1";
  doc["c"] = solution.c;
  write_json(dir + "/forward.json", doc);
  write_sparse(dir + "/policy.csv", "policy", solution.policy);
}

ForwardSolution read_forward(const std::string& dir, Index n) {
  const auto rows = read_csv(dir + "/forward.csv", "forward", "index,z,v");
  if (static_cast<Index>(rows.size()) != n) {
    throw IoError(dir + "/forward.csv: expected " + std::to_string(n) + " rows");
  }
  ForwardSolution solution;
  solution.z.resize(n);
  solution.v.resize(n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto fields = split_fields(rows[i]);
    if (fields.size() != 3 || parse_long(fields[0], dir) != static_cast<long>(i)) {
      throw IoError(dir + "/forward.csv: malformed row " + std::to_string(i));
    }
    solution.z[static_cast<Index>(i)] = parse_double(fields[1], dir);
    solution.v[static_cast<Index>(i)] = parse_double(fields[2], dir);
  }
  solution.c = read_json(dir + "/forward.json", "forward").at("c").get<double>();
  solution.policy = read_sparse(dir + "/policy.csv", "policy", n, n);
  return solution;
}

void write_demos(const std::string& dir, const Demonstrations& demos) {
  std::string out = schema_line("demos") + "\nsource,dest\n";
  for (const auto& [src, dst] : demos.transitions) {
    out += std::to_string(src) + ',' + std::to_string(dst) + '\n';
  }
  write_file(dir + "/demos.csv", out);
  json doc;
  doc["schema"] = "msirl.demos.v1";
  doc["a"] = std::vector<double>(demos.a.data(), demos.a.data() + demos.a.size());
  doc["b"] = std::vector<double>(demos.b.data(), demos.b.data() + demos.b.size());
  write_json(dir + "/demos.json", doc);
}

Demonstrations read_demos(const std::string& dir, Index n) {
  const json doc = read_json(dir + "/demos.json", "demos");
  Demonstrations demos;
  const auto a = doc.at("a").get<std::vector<double>>();
  const auto b = doc.at("b").get<std::vector<double>>();
  if (static_cast<Index>(a.size()) != n || static_cast<Index>(b.size()) != n) {
    throw IoError(dir + "/demos.json: count vectors do not match the chain size");
  }
  demos.a = Eigen::Map<const Vec>(a.data(), n);
  demos.b = Eigen::Map<const Vec>(b.data(), n);
  for (const std::string& row : read_csv(dir + "/demos.csv", "demos", "source,dest")) {
    const auto fields = split_fields(row);
    if (fields.size() != 2) throw IoError(dir + "/demos.csv: malformed row '" + row + "'");
    demos.transitions.emplace_back(static_cast<int>(parse_long(fields[0], dir)),
                                   static_cast<int>(parse_long(fields[1], dir)));
  }
  return demos;
}

void write_tree(const std::string& dir, const WaveletTree& tree) {
  ensure_dir(dir);
  json doc;
  doc["schema"] = "msirl.tree.v1";
  doc["epsilon"] = tree.epsilon;
  doc["dims"] = tree.dims;
  write_json(dir + "/tree.json", doc);
  for (int j = 1; j <= tree.n_levels(); ++j) {
    const WaveletLevel& level = tree.levels[static_cast<std::size_t>(j - 1)];
    write_sparse(dir + "/scaling_" + std::to_string(j) + ".csv", "scaling",
                 SpMatRow(level.scaling));
    write_sparse(dir + "/wavelet_" + std::to_string(j) + ".csv", "wavelet",
                 SpMatRow(level.wavelet));
    write_sparse(dir + "/op_" + std::to_string(j) + ".csv", "op", SpMatRow(level.op));
  }
}

WaveletTree read_tree(const std::string& dir) {
  const json doc = read_json(dir + "/tree.json", "tree");
  WaveletTree tree;
  tree.epsilon = doc.at("epsilon").get<double>();
  tree.dims = doc.at("dims").get<std::vector<Index>>();
  if (tree.dims.size() < 2) throw IoError(dir + "/tree.json: dims must list at least two levels");
  for (std::size_t j = 1; j < tree.dims.size(); ++j) {
    const Index n_above = tree.dims[j - 1];
    const Index n_below = tree.dims[j];
    WaveletLevel level;
    level.scaling = SpMat(read_sparse(dir + "/scaling_" + std::to_string(j) + ".csv", "scaling",
                                      n_above, n_below));
    level.wavelet = SpMat(read_sparse(dir + "/wavelet_" + std::to_string(j) + ".csv", "wavelet",
                                      n_above, n_above - n_below));
    level.op = SpMat(read_sparse(dir + "/op_" + std::to_string(j) + ".csv", "op", n_below,
                                 n_below));
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

void write_irl_solution(const std::string& dir, const std::string& tag,
                        const IrlSolution& solution, double rms) {
  std::string out = schema_line("irl") + "\nindex,v_hat,q_hat\n";
  for (Index i = 0; i < solution.v_hat.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(solution.v_hat[i]) + ',' +
           format_double(solution.q_hat[i]) + '\n';
  }
  write_file(dir + "/irl_" + tag + ".csv", out);

  json doc;
  doc["schema"] = "msirl.irl.v1";
  doc["nll"] = solution.diagnostics.nll;
  doc["grad_norm"] = solution.diagnostics.grad_norm;
  doc["iterations"] = solution.diagnostics.iterations;
  if (solution.diagnostics.augmented) {
    doc["level"] = "augmented";
  } else {
    doc["level"] = solution.diagnostics.level;
  }
  doc["n_features"] = solution.diagnostics.n_features;
  if (std::isfinite(rms)) {
    doc["rms_error"] = rms;
  } else {
    doc["rms_error"] = nullptr;
  }
  write_json(dir + "/irl_" + tag + ".json", doc);
}

std::pair<Vec, Vec> read_irl_solution_csv(const std::string& path) {
  const auto rows = read_csv(path, "irl", "index,v_hat,q_hat");
  Vec v(static_cast<Index>(rows.size()));
  Vec q(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto fields = split_fields(rows[i]);
    if (fields.size() != 3 || parse_long(fields[0], path) != static_cast<long>(i)) {
      throw IoError(path + ": malformed row " + std::to_string(i));
    }
    v[static_cast<Index>(i)] = parse_double(fields[1], path);
    q[static_cast<Index>(i)] = parse_double(fields[2], path);
  }
  return {std::move(v), std::move(q)};
}

void write_levels_table(const std::string& path, const std::vector<LevelRow>& rows) {
  std::string out = schema_line("levels") + "\nlevel,n_features,iterations,nll,rms_error\n";
  for (const LevelRow& row : rows) {
    out += std::to_string(row.level) + ',' + std::to_string(row.n_features) + ',' +
           std::to_string(row.iterations) + ',' + format_double(row.nll) + ',' +
           format_double(row.rms_error) + '\n';
  }
  write_file(path, out);
}

std::vector<LevelRow> read_levels_table(const std::string& path) {
  const auto data = read_csv(path, "levels", "level,n_features,iterations,nll,rms_error");
  std::vector<LevelRow> rows;
  for (const std::string& line : data) {
    const auto fields = split_fields(line);
    if (fields.size() != 5) throw IoError(path + ": malformed row '" + line + "'");
    LevelRow row;
    row.level = static_cast<int>(parse_long(fields[0], path));
    row.n_features = parse_long(fields[1], path);
    row.iterations = static_cast<int>(parse_long(fields[2], path));
    row.nll = parse_double(fields[3], path);
    row.rms_error = parse_double(fields[4], path);
    rows.push_back(row);
  }
  return rows;
}

void write_grid(const std::string& path, const StateSet& states, const Vec& values) {
  if (values.size() != states.size()) throw ConfigError("grid values do not match state count");
  std::string out = schema_line("grid") + "\nx,y,value\n";
  for (Index i = 0; i < values.size(); ++i) {
    out += format_double(states.points(i, 0)) + ',' + format_double(states.points(i, 1)) + ',' +
           format_double(values[i]) + '\n';
  }
  write_file(path, out);
}

void write_trajectory(const std::string& dir, const ClosedLoopResult& result, std::uint64_t seed,
                      const RhcConfig& cfg) {
  std::string out = schema_line("trajectory") + "\nt,x,y,u1,u2\n";
  for (std::size_t i = 0; i < result.t.size(); ++i) {
    const auto r = static_cast<Index>(i);
    out += format_double(result.t[i]) + ',' + format_double(result.states(r, 0)) + ',' +
           format_double(result.states(r, 1)) + ',' + format_double(result.controls(r, 0)) + ',' +
           format_double(result.controls(r, 1)) + '\n';
  }
  write_file(dir + "/trajectory.csv", out);

  json doc;
  doc["schema"] = "msirl.control.v1";
  doc["seed"] = seed;
  doc["k_rhc"] = cfg.k_rhc;
  doc["tau"] = cfg.tau;
  doc["collisions"] = result.collisions;
  write_json(dir + "/control.json", doc);
}

void write_heatmap_pgm(const std::string& path, const Environment& env, const StateSet& states,
                       const Vec& values, int width) {
  if (states.size() == 0 || values.size() != states.size()) {
    throw ConfigError("heatmap needs one value per sampled state");
  }
  if (width < 2) throw ConfigError("heatmap width must be at least 2");

  const double dx = env.bounds.width();
  const double dy = env.bounds.height();
  const int height = std::max(2, static_cast<int>(std::lround(width * dy / dx)));

  const double v_min = values.minCoeff();
  const double v_max = values.maxCoeff();
  const double range = v_max - v_min;
  const bool flat = range <= 1e-12 * std::max({1.0, std::abs(v_min), std::abs(v_max)});

  std::string out = "P2\n" + schema_line("heatmap") + "\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  for (int py = 0; py < height; ++py) {
    const double y = env.bounds.ymax - (py + 0.5) / height * dy;
    for (int px = 0; px < width; ++px) {
      const double x = env.bounds.xmin + (px + 0.5) / width * dx;
      Index nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < states.size(); ++i) {
        const double d2 = (states.points(i, 0) - x) * (states.points(i, 0) - x) +
                          (states.points(i, 1) - y) * (states.points(i, 1) - y);
        if (d2 < best) {
          best = d2;
          nearest = i;
        }
      }
      const int gray =
          flat ? 0 : static_cast<int>(std::lround(255.0 * (values[nearest] - v_min) / range));
      out += std::to_string(gray);
      out += px + 1 == width ? '\n' : ' ';
    }
  }
  write_file(path, out);
}

} // namespace msirl::io
