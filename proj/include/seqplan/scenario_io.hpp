#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"

namespace seqplan {

// Malformed input: bad syntax, missing or mistyped fields.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

using nlohmann::json;

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + ": missing field '" + key + "'");
  return *it;
}

inline int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
  return v.get<int>();
}

inline Cell as_cell(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ParseError(path + ": expected a cell [x, y]");
  return {v[0].get<int>(), v[1].get<int>()};
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + ": expected an array");
  return v;
}

inline json cell_json(Cell c) { return json::array({c.x, c.y}); }

}  // namespace io

// Parses and validates a scenario document. Throws ParseError or ValidationError.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  using namespace io;
  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("name: expected a string");
    s.name = doc["name"].get<std::string>();
  }

  const auto& ws = field(doc, "workspace", "workspace");
  std::vector<Cell> obstacles;
  if (ws.contains("obstacles")) {
    const auto& obs = as_array(ws["obstacles"], "workspace.obstacles");
    for (std::size_t i = 0; i < obs.size(); ++i)
      obstacles.push_back(as_cell(obs[i], "workspace.obstacles[" + std::to_string(i) + "]"));
  }
  s.workspace = Workspace(as_int(field(ws, "width", "workspace"), "workspace.width"),
                          as_int(field(ws, "height", "workspace"), "workspace.height"), std::move(obstacles));

  const auto& robots = as_array(field(doc, "robots", "<root>"), "robots");
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::string p = "robots[" + std::to_string(i) + "]";
    const auto& r = robots[i];
    RobotSpec spec;
    spec.id = as_int(field(r, "id", p), p + ".id");
    spec.start = as_cell(field(r, "start", p), p + ".start");
    spec.resting = as_cell(field(r, "resting", p), p + ".resting");
    spec.radius = r.contains("radius") ? as_int(r["radius"], p + ".radius") : 0;
    spec.max_speed = r.contains("max_speed") ? as_int(r["max_speed"], p + ".max_speed") : 1;
    s.robots.push_back(spec);
  }

  const auto& tasks = as_array(field(doc, "tasks", "<root>"), "tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string p = "tasks[" + std::to_string(i) + "]";
    const auto& t = tasks[i];
    TaskSpec spec;
    spec.id = as_int(field(t, "id", p), p + ".id");
    const auto& kind = field(t, "kind", p);
    if (!kind.is_string()) throw ParseError(p + ".kind: expected a string");
    const auto k = kind.get<std::string>();
    if (k == "goto") {
      spec.kind = GoToPose{as_cell(field(t, "goal", p), p + ".goal")};
    } else if (k == "pickplace") {
      spec.kind = PickPlace{as_cell(field(t, "pick", p), p + ".pick"), as_cell(field(t, "place", p), p + ".place")};
    } else {
      throw ParseError(p + ".kind: unknown task kind '" + k + "' (expected goto or pickplace)");
    }
    const auto& capable = as_array(field(t, "capable", p), p + ".capable");
    for (std::size_t c = 0; c < capable.size(); ++c)
      spec.capable_robots.push_back(as_int(capable[c], p + ".capable[" + std::to_string(c) + "]"));
    std::sort(spec.capable_robots.begin(), spec.capable_robots.end());
    spec.capable_robots.erase(std::unique(spec.capable_robots.begin(), spec.capable_robots.end()),
                              spec.capable_robots.end());
    spec.dwell = t.contains("dwell") ? as_int(t["dwell"], p + ".dwell") : 0;
    s.tasks.push_back(std::move(spec));
  }

  std::vector<PrecedenceEdge> edges;
  if (doc.contains("precedence")) {
    const auto& prec = as_array(doc["precedence"], "precedence");
    for (std::size_t i = 0; i < prec.size(); ++i) {
      const std::string p = "precedence[" + std::to_string(i) + "]";
      if (!prec[i].is_array() || prec[i].size() != 2) throw ParseError(p + ": expected [before, after]");
      edges.push_back({as_int(prec[i][0], p + "[0]"), as_int(prec[i][1], p + "[1]")});
    }
  }
  s.precedence = PrecedenceDag(std::move(edges));

  validate_scenario(s);
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using io::cell_json;
  using nlohmann::json;
  json doc;
  if (!s.name.empty()) doc["name"] = s.name;
  json obstacles = json::array();
  for (Cell c : s.workspace.obstacles()) obstacles.push_back(cell_json(c));
  doc["workspace"] = {{"width", s.workspace.width()}, {"height", s.workspace.height()}, {"obstacles", obstacles}};
  json robots = json::array();
  for (const auto& r : s.robots)
    robots.push_back({{"id", r.id},
                      {"start", cell_json(r.start)},
                      {"resting", cell_json(r.resting)},
                      {"radius", r.radius},
                      {"max_speed", r.max_speed}});
  doc["robots"] = robots;
  json tasks = json::array();
  for (const auto& t : s.tasks) {
    json jt = {{"id", t.id}, {"capable", t.capable_robots}, {"dwell", t.dwell}};
    if (const auto* g = std::get_if<GoToPose>(&t.kind)) {
      jt["kind"] = "goto";
      jt["goal"] = cell_json(g->goal);
    } else {
      const auto& pp = std::get<PickPlace>(t.kind);
      jt["kind"] = "pickplace";
      jt["pick"] = cell_json(pp.pick);
      jt["place"] = cell_json(pp.place);
    }
    tasks.push_back(jt);
  }
  doc["tasks"] = tasks;
  json prec = json::array();
  for (const auto& e : s.precedence.edges()) prec.push_back(json::array({e.before, e.after}));
  doc["precedence"] = prec;
  return doc;
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

inline Scenario load_scenario(const std::string& path) {
  try {
    return parse_scenario(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  write_file(path, scenario_to_json(s).dump(2) + "\n");
}

// Sequences are stored as [[task, robot], ...].
inline nlohmann::json sequence_to_json(const SerializedSequence& seq) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : seq) out.push_back(nlohmann::json::array({e.task, e.robot}));
  return out;
}

inline SerializedSequence sequence_from_json(const nlohmann::json& doc) {
  const auto& arr = io::as_array(doc, "sequence");
  std::vector<SequenceEntry> entries;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = "sequence[" + std::to_string(i) + "]";
    if (!arr[i].is_array() || arr[i].size() != 2) throw ParseError(p + ": expected [task, robot]");
    entries.push_back({io::as_int(arr[i][0], p + "[0]"), io::as_int(arr[i][1], p + "[1]")});
  }
  return SerializedSequence(std::move(entries));
}

}  // namespace seqplan
