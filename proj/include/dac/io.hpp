#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dac/config.hpp"
#include "dac/core.hpp"
#include "dac/solver.hpp"

namespace dac {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Grid grid_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a list of rows");
  std::vector<std::vector<int>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) throw ParseError(where + "[" + std::to_string(r) + "]: expected a row");
    std::vector<int> row;
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      if (!j[r][c].is_number_integer())
        throw ParseError(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: expected an integer");
      row.push_back(j[r][c].get<int>());
    }
    rows.push_back(std::move(row));
  }
  return Grid::from_rows(rows);
}

inline nlohmann::json grid_to_json(const Grid& g) { return g.rows(); }

inline std::vector<Example> grid_pairs(const nlohmann::json& j, const std::string& where) {
  std::vector<Example> out;
  if (!j.is_array()) throw ParseError(where + ": expected a list");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_object() || !j[i].contains("input")) throw ParseError(w + ": missing input");
    Example e;
    e.input = grid_from_json(j[i]["input"], w + ".input");
    e.output = j[i].contains("output") ? Value(grid_from_json(j[i]["output"], w + ".output")) : Value(Grid());
    out.push_back(std::move(e));
  }
  return out;
}

inline std::string stem(const std::string& path) {
  auto s = path.substr(path.find_last_of('/') + 1);
  auto dot = s.rfind('.');
  return dot == std::string::npos ? s : s.substr(0, dot);
}

}  // namespace detail

inline Task parse_arc_task(const nlohmann::json& j, const std::string& id) {
  if (!j.is_object() || !j.contains("train")) throw ParseError(id + ": missing train");
  Task t;
  t.id = id;
  t.domain = Domain::grid;
  t.train = detail::grid_pairs(j["train"], "train");
  if (j.contains("test")) t.test = detail::grid_pairs(j["test"], "test");
  t.validate();
  return t;
}

inline Task load_arc_task(const std::string& path) { return parse_arc_task(detail::read_json(path), detail::stem(path)); }

inline Task parse_string_task(const nlohmann::json& j, const std::string& id, std::size_t train_n) {
  if (!j.is_array()) throw ParseError(id + ": expected a list of pairs");
  if (j.empty()) throw ValidationError(id + ": no examples");
  Task t;
  t.id = id;
  t.domain = Domain::string;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    if (!p.is_object() || !p.contains("input") || !p["input"].is_string() || !p.contains("output") ||
        !p["output"].is_string())
      throw ParseError(id + "[" + std::to_string(i) + "]: expected {\"input\": str, \"output\": str}");
    Example e{p["input"].get<std::string>(), p["output"].get<std::string>()};
    (i < train_n ? t.train : t.test).push_back(std::move(e));
  }
  t.validate();
  return t;
}

inline Task load_string_task(const std::string& path, std::size_t train_n) {
  return parse_string_task(detail::read_json(path), detail::stem(path), train_n);
}

struct RunReport {
  std::string task_id;
  std::string status = "unsolvable";
  bool solved = false;
  std::string solution;
  std::string decomposition;
  std::vector<std::string> ledger;
  std::uint64_t candidates_explored = 0;
  std::uint64_t synthesis_loops = 0;
  std::uint64_t correspondences_total = 0;
  std::uint64_t correspondences_explored = 0;
  std::uint64_t decompositions_tried = 0;
  bool greedy_alignment = false;
  int test_total = 0;
  int test_correct = 0;
  double wall_time = 0.0;
  std::string ablation = "none";
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const RunReport&) const = default;
};

inline nlohmann::json config_to_json(const Config& c) {
  return {{"domain", c.domain == Domain::grid ? "arc" : "strings"},
          {"depth", c.depth},
          {"timeout", c.timeout},
          {"w0", c.w0},
          {"w1", c.w1},
          {"dedup", c.dedup},
          {"j", c.j},
          {"w", c.w},
          {"ablation", to_string(c.ablation)},
          {"seed", c.seed},
          {"exhaustive", c.exhaustive}};
}

inline nlohmann::json to_json(const RunReport& r) {
  return {{"schema", "report_v1"},
          {"task_id", r.task_id},
          {"status", r.status},
          {"solved", r.solved},
          {"solution", r.solution},
          {"decomposition", r.decomposition},
          {"ledger", r.ledger},
          {"candidates_explored", r.candidates_explored},
          {"synthesis_loops", r.synthesis_loops},
          {"correspondences_total", r.correspondences_total},
          {"correspondences_explored", r.correspondences_explored},
          {"decompositions_tried", r.decompositions_tried},
          {"greedy_alignment", r.greedy_alignment},
          {"test_total", r.test_total},
          {"test_correct", r.test_correct},
          {"wall_time", r.wall_time},
          {"ablation", r.ablation},
          {"config", r.config}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "report_v1") throw ParseError("report: unknown schema");
  RunReport r;
  r.task_id = j.at("task_id").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.solved = j.at("solved").get<bool>();
  r.solution = j.at("solution").get<std::string>();
  r.decomposition = j.at("decomposition").get<std::string>();
  r.ledger = j.at("ledger").get<std::vector<std::string>>();
  r.candidates_explored = j.at("candidates_explored").get<std::uint64_t>();
  r.synthesis_loops = j.at("synthesis_loops").get<std::uint64_t>();
  r.correspondences_total = j.at("correspondences_total").get<std::uint64_t>();
  r.correspondences_explored = j.at("correspondences_explored").get<std::uint64_t>();
  r.decompositions_tried = j.at("decompositions_tried").get<std::uint64_t>();
  r.greedy_alignment = j.at("greedy_alignment").get<bool>();
  r.test_total = j.at("test_total").get<int>();
  r.test_correct = j.at("test_correct").get<int>();
  r.wall_time = j.at("wall_time").get<double>();
  r.ablation = j.at("ablation").get<std::string>();
  r.config = j.at("config");
  return r;
}

// serialized report without the wall clock, for reproducibility checks
inline std::string deterministic_dump(const RunReport& r) {
  auto j = to_json(r);
  j.erase("wall_time");
  return j.dump();
}

// solves, then scores every test pair that carries an output
inline RunReport run_task(const Task& task, const Config& cfg, SolveResult* out = nullptr) {
  auto res = solve_task(task, cfg);
  RunReport r;
  r.task_id = task.id;
  r.status = to_string(res.status);
  r.solved = res.status == SolveStatus::solved;
  r.ledger = res.ledger;
  r.candidates_explored = res.stats.candidates;
  r.synthesis_loops = res.stats.synthesis_loops;
  r.correspondences_total = res.stats.correspondences_total;
  r.correspondences_explored = res.stats.correspondences_explored;
  r.decompositions_tried = res.stats.decompositions_tried;
  r.greedy_alignment = res.stats.greedy_alignment;
  r.wall_time = res.wall_time;
  r.ablation = to_string(cfg.ablation);
  r.config = config_to_json(cfg);
  if (res.program) {
    r.solution = res.program->render();
    r.decomposition = res.program->delta.name();
    for (const auto& e : task.test) {
      if (const auto* g = std::get_if<Grid>(&e.output); g && g->empty()) continue;
      ++r.test_total;
      if (value_equals(predict(*res.program, e.input), e.output)) ++r.test_correct;
    }
  }
  if (out) *out = std::move(res);
  return r;
}

}  // namespace dac
