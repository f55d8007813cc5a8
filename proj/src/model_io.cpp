#include "dphmm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dphmm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("bad JSON in " + path + ": " + e.what());
  }
}

// Non-finite values are not representable as JSON numbers; keep them as
// strings so the line stays parseable.
ordered_json json_double(double x) {
  if (std::isfinite(x)) return x;
  return x > 0.0 ? "inf" : "-inf";
}

GraphSpec parse_policy_object(const json& obj) {
  GraphSpec spec;
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "complete") {
    spec.kind = PolicyKind::kComplete;
  } else if (kind == "categorical") {
    spec.kind = PolicyKind::kCategorical;
    spec.categories = obj.at("categories").get<std::vector<int>>();
  } else if (kind == "utility" || kind == "util") {
    spec.kind = PolicyKind::kUtility;
    spec.radius = obj.at("radius").get<double>();
  } else if (kind == "transition") {
    spec.kind = PolicyKind::kTransition;
  } else {
    throw std::runtime_error("unknown policy kind: " + kind);
  }
  return spec;
}

}  // namespace

ModelFile load_model_file(const std::string& path) {
  const json doc = parse_file(path);
  ModelFile file;
  try {
    const int n = doc.at("n_states").get<int>();
    auto rows = doc.at("transition").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != n) {
      throw std::runtime_error("transition row count differs from n_states");
    }
    file.model = MarkovModel(std::move(rows));
    if (doc.contains("policy")) {
      file.policy = parse_policy_object(doc.at("policy"));
    }
    if (doc.contains("query")) {
      file.query = MeasurementQuery(
          doc.at("query").at("answers").get<std::vector<std::vector<double>>>());
      if (file.query->n_states() != n) {
        throw std::runtime_error("query answer count differs from n_states");
      }
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("bad model file " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("bad model file " + path + ": " + e.what());
  }
  return file;
}

std::vector<std::vector<int>> load_trajectories(const std::string& path,
                                                int n_states) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  auto fail = [&](int line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                             what);
  };

  std::string line;
  if (!std::getline(in, line) || line != "trajectory_id,t,state_index") {
    fail(1, "expected header trajectory_id,t,state_index");
  }

  std::vector<std::vector<int>> out;
  std::vector<long long> seen;
  long long current_id = 0;
  bool have_current = false;
  int expected_t = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    long long id;
    int t, state;
    char extra;
    std::stringstream ss(line);
    char c1, c2;
    if (!(ss >> id >> c1 >> t >> c2 >> state) || c1 != ',' || c2 != ',' ||
        (ss >> extra)) {
      fail(line_no, "expected trajectory_id,t,state_index");
    }
    if (state < 0 || state >= n_states) {
      fail(line_no, "state index " + std::to_string(state) + " out of range");
    }
    if (!have_current || id != current_id) {
      for (long long prev : seen) {
        if (prev == id) {
          fail(line_no, "trajectory " + std::to_string(id) +
                            " rows must be contiguous");
        }
      }
      seen.push_back(id);
      current_id = id;
      have_current = true;
      expected_t = 0;
      out.emplace_back();
    }
    if (t != expected_t) {
      fail(line_no, "expected t=" + std::to_string(expected_t) + ", got " +
                        std::to_string(t));
    }
    ++expected_t;
    out.back().push_back(state);
  }
  return out;
}

void save_trajectories(const std::vector<std::vector<int>>& trajectories,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "trajectory_id,t,state_index\n";
  for (std::size_t traj = 0; traj < trajectories.size(); ++traj) {
    for (std::size_t t = 0; t < trajectories[traj].size(); ++t) {
      out << traj << ',' << t << ',' << trajectories[traj][t] << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

GraphSpec parse_policy_string(const std::string& text) {
  GraphSpec spec;
  if (text == "complete") {
    spec.kind = PolicyKind::kComplete;
  } else if (text == "categorical") {
    spec.kind = PolicyKind::kCategorical;
  } else if (text == "transition") {
    spec.kind = PolicyKind::kTransition;
  } else if (text.rfind("util:", 0) == 0) {
    spec.kind = PolicyKind::kUtility;
    const std::string value = text.substr(5);
    std::size_t consumed = 0;
    try {
      spec.radius = std::stod(value, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad utility radius: " + text);
    }
    if (consumed != value.size() || !(spec.radius > 0.0)) {
      throw std::invalid_argument("bad utility radius: " + text);
    }
  } else {
    throw std::invalid_argument(
        "unknown policy '" + text +
        "' (expected complete|categorical|util:<r>|transition)");
  }
  return spec;
}

std::string ledger_record_json(const LedgerRecord& record) {
  ordered_json obj;
  obj["t"] = record.timestamp;
  ordered_json z = ordered_json::array();
  for (double v : record.z) z.push_back(json_double(v));
  obj["z"] = std::move(z);
  obj["dop_true_state"] = record.dop_true_state;
  obj["error_l2"] = json_double(record.error_l2);
  obj["epsilon_spent"] = json_double(record.epsilon);
  obj["factor"] = json_double(record.factor);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : record.repaired_edges) {
    edges.push_back(ordered_json::array({e.first, e.second}));
  }
  obj["repaired_edges"] = std::move(edges);
  obj["singleton"] = record.singleton;
  return obj.dump();
}

std::string ledger_json(const PrivacyLedger& ledger) {
  std::string out = "[";
  for (std::size_t i = 0; i < ledger.records.size(); ++i) {
    if (i > 0) out += ",";
    out += ledger_record_json(ledger.records[i]);
  }
  out += "]";
  return out;
}

}  // namespace dphmm
