#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/numeric.hpp"
#include "grandpoincare/poincare.hpp"

namespace gp {

/// Formats a double with 17 significant digits (round-trip safe).
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// One experiment outcome: inputs echo, scalar results, per-grid rows, and
/// verdicts. The body (everything except wall time) is deterministic for a
/// fixed config and seed.
struct ReportRecord {
  struct Verdict {
    std::string name;
    bool holds = true;
    bool degenerate = false;
  };

  std::string task;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_hashes;
  nlohmann::ordered_json config_echo;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<ReportRow> rows;
  std::vector<Verdict> verdicts;
  nlohmann::ordered_json extra;  // witness data and other task-specific output
  double wall_time_ms = 0.0;     // excluded from the body

  bool all_hold() const {
    for (const Verdict& v : verdicts)
      if (!v.holds) return false;
    return true;
  }

  nlohmann::ordered_json body_json() const {
    nlohmann::ordered_json body;
    body["task"] = task;
    body["seed"] = seed;
    nlohmann::ordered_json hashes;
    for (const auto& [k, v] : input_hashes) hashes[k] = v;
    body["input_hashes"] = hashes;
    body["config_echo"] = config_echo;
    nlohmann::ordered_json sc;
    for (const auto& [k, v] : scalars) sc[k] = v;
    body["scalars"] = sc;
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const ReportRow& r : rows) {
      nlohmann::ordered_json jr;
      jr["grid_var"] = r.var;
      jr["grid_value"] = r.grid_value;
      jr["lhs"] = r.lhs;
      jr["rhs"] = r.rhs;
      if (r.ratio)
        jr["ratio"] = *r.ratio;
      else
        jr["ratio"] = nullptr;
      jr["holds"] = r.holds;
      jrows.push_back(jr);
    }
    body["rows"] = jrows;
    nlohmann::ordered_json jv = nlohmann::ordered_json::array();
    for (const Verdict& v : verdicts) {
      jv.push_back({{"name", v.name}, {"holds", v.holds}, {"degenerate", v.degenerate}});
    }
    body["verdicts"] = jv;
    if (!extra.is_null()) body["extra"] = extra;
    return body;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["body"] = body_json();
    j["meta"] = {{"wall_time_ms", wall_time_ms}};
    return j;
  }

  std::string to_csv() const {
    std::string out = "# task=" + task + " seed=" + std::to_string(seed);
    for (const auto& [k, v] : input_hashes) out += " " + k + "=" + v;
    out += "\n";
    out += "grid_var,grid_value,lhs,rhs,ratio,holds\n";
    auto row_line = [&](const ReportRow& r) {
      out += r.var + "," + format_g17(r.grid_value) + "," + format_g17(r.lhs) +
             "," + format_g17(r.rhs) + "," +
             (r.ratio ? format_g17(*r.ratio) : std::string("nan")) + "," +
             (r.holds ? "true" : "false") + "\n";
    };
    if (rows.empty()) {
      // scalar-only task: one row per scalar
      for (const auto& [name, value] : scalars) {
        ReportRow r{"scalar", 0.0, value, 1.0, value, all_hold()};
        (void)name;
        row_line(r);
      }
    } else {
      for (const ReportRow& r : rows) row_line(r);
    }
    return out;
  }

  static ReportRecord from_json(const nlohmann::json& j) {
    const nlohmann::json& body = j.contains("body") ? j.at("body") : j;
    ReportRecord rec;
    rec.task = body.at("task").get<std::string>();
    rec.seed = body.at("seed").get<uint64_t>();
    for (const auto& [k, v] : body.at("input_hashes").items())
      rec.input_hashes.emplace_back(k, v.get<std::string>());
    rec.config_echo = body.at("config_echo");
    for (const auto& [k, v] : body.at("scalars").items())
      rec.scalars.emplace_back(k, v.get<double>());
    for (const auto& jr : body.at("rows")) {
      ReportRow r;
      r.var = jr.at("grid_var").get<std::string>();
      r.grid_value = jr.at("grid_value").get<double>();
      r.lhs = jr.at("lhs").get<double>();
      r.rhs = jr.at("rhs").get<double>();
      if (!jr.at("ratio").is_null()) r.ratio = jr.at("ratio").get<double>();
      r.holds = jr.at("holds").get<bool>();
      rec.rows.push_back(r);
    }
    for (const auto& jv : body.at("verdicts")) {
      rec.verdicts.push_back({jv.at("name").get<std::string>(),
                              jv.at("holds").get<bool>(),
                              jv.at("degenerate").get<bool>()});
    }
    if (body.contains("extra")) rec.extra = body.at("extra");
    if (j.contains("meta") && j.at("meta").contains("wall_time_ms"))
      rec.wall_time_ms = j.at("meta").at("wall_time_ms").get<double>();
    return rec;
  }

  bool same_body(const ReportRecord& other) const {
    return body_json().dump() == other.body_json().dump();
  }
};

/// Section hash for the inputs echo: FNV-1a of the canonical (sorted-key) dump.
inline std::string config_section_hash(const nlohmann::json& section) {
  return hex64(fnv1a64(section.is_null() ? "null" : section.dump()));
}

}  // namespace gp
