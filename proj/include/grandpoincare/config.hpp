#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/field.hpp"
#include "grandpoincare/gls.hpp"
#include "grandpoincare/poincare.hpp"
#include "grandpoincare/psi.hpp"
#include "grandpoincare/search.hpp"
#include "grandpoincare/space.hpp"
#include "grandpoincare/transfer.hpp"

namespace gp {

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

struct Grids {
  std::vector<double> p, q, tau, delta;
};

struct OutputSpec {
  std::string path;            // empty = stdout
  std::string format = "json";
};

/// Fully resolved experiment description: spaces loaded, fields generated,
/// estimate-kind transfer constants already computed.
struct ExperimentConfig {
  std::string task;
  uint64_t seed = 0;
  std::optional<MetricMeasureSpace> space;
  std::vector<ScalarField> fields;
  std::optional<PsiSpec> psi;
  std::optional<TransferSpec> transfer;
  Grids grids;
  std::optional<NeighborRule> rule;
  std::vector<double> order_radii;
  std::vector<int> order_centers;
  double exp_p = 0.0, exp_q = 0.0, exp_s = 0.0;
  std::string which;  // sharpness target
  SearchConfig search;
  OutputSpec output;
  nlohmann::json raw;
};

namespace cfgd {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

inline const nlohmann::json& need(const nlohmann::json& j, const char* key,
                                  const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

inline double need_number(const nlohmann::json& j, const char* key,
                          const std::string& path) {
  const auto& v = need(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

inline std::string need_string(const nlohmann::json& j, const char* key,
                               const std::string& path) {
  const auto& v = need(j, key, path);
  if (!v.is_string()) fail(path + "." + key, "must be a string");
  return v.get<std::string>();
}

inline std::vector<double> number_array(const nlohmann::json& j,
                                        const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(path, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline nlohmann::json maybe_file(const nlohmann::json& j) {
  if (j.is_object() && j.contains("file"))
    return read_json_file(j.at("file").get<std::string>());
  return j;
}

}  // namespace cfgd

inline MetricMeasureSpace parse_space(const nlohmann::json& j,
                                      const std::string& path) {
  nlohmann::json desc = cfgd::maybe_file(j);
  try {
    return load_space(desc);
  } catch (const ParseError& e) {
    cfgd::fail(path, e.what());
  }
}

inline ScalarField parse_field(const nlohmann::json& spec_in,
                               const std::string& path,
                               const MetricMeasureSpace& space,
                               uint64_t global_seed) {
  nlohmann::json spec = spec_in;
  if (spec.is_object() && spec.contains("file")) {
    nlohmann::json doc = read_json_file(spec.at("file").get<std::string>());
    if (!doc.is_object() || !doc.contains("values"))
      cfgd::fail(path, "field file needs a values array");
    if (doc.contains("space") && doc.at("space").is_object()) {
      MetricMeasureSpace declared = load_space(doc.at("space"));
      if (declared.size() != space.size())
        throw FieldSpaceMismatch(path + ": field file space has " +
                                 std::to_string(declared.size()) +
                                 " points, run space has " +
                                 std::to_string(space.size()));
    }
    std::vector<double> vals = cfgd::number_array(doc.at("values"), path + ".values");
    return ScalarField(space, std::move(vals));
  }
  if (!spec.is_object() || !spec.contains("kind"))
    cfgd::fail(path, "field generator needs a kind");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "values") {
    return ScalarField(space,
                       cfgd::number_array(cfgd::need(spec, "values", path),
                                          path + ".values"));
  }
  if (kind == "constant") {
    return ScalarField(space, std::vector<double>(
                                  space.size(),
                                  cfgd::need_number(spec, "value", path)));
  }
  if (kind == "indicator") {
    const auto& sub = cfgd::need(spec, "subset", path);
    if (!sub.is_array()) cfgd::fail(path + ".subset", "must be an index array");
    std::vector<int> subset;
    for (const auto& v : sub) subset.push_back(v.get<int>());
    return indicator_field(space, subset);
  }
  if (kind == "coordinate") {
    const int axis = static_cast<int>(spec.value("axis", 0));
    if (!space.has_coordinates())
      cfgd::fail(path, "coordinate fields need a grid-built space");
    if (axis < 0 || axis >= space.coord_dim())
      cfgd::fail(path + ".axis", "axis out of range");
    std::vector<double> vals(space.size());
    for (int i = 0; i < space.size(); ++i) vals[i] = space.coordinate(i, axis);
    return ScalarField(space, std::move(vals));
  }
  if (kind == "random") {
    const uint64_t fseed = spec.value("seed", 0ULL);
    Rng rng(Rng::derive(global_seed, fseed + 7919));
    std::vector<double> vals(space.size());
    for (double& v : vals) v = rng.normal();
    return ScalarField(space, std::move(vals));
  }
  cfgd::fail(path + ".kind", "unknown field kind '" + kind + "'");
}

inline PsiSpec parse_psi(const nlohmann::json& j, const std::string& path,
                         const MetricMeasureSpace* space, uint64_t seed) {
  if (!j.is_object() || !j.contains("kind"))
    cfgd::fail(path, "psi spec needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power_blowup")
    return PsiSpec::power_blowup(cfgd::need_number(j, "b", path),
                                 cfgd::need_number(j, "beta", path));
  if (kind == "polynomial_growth")
    return PsiSpec::polynomial_growth(cfgd::need_number(j, "beta", path));
  if (kind == "spike") return PsiSpec::spike(cfgd::need_number(j, "r", path));
  if (kind == "constant") {
    const double b = j.contains("b") ? j.at("b").get<double>()
                                     : std::numeric_limits<double>::infinity();
    return PsiSpec::constant(cfgd::need_number(j, "value", path), b);
  }
  if (kind == "tabulated")
    return PsiSpec::tabulated(
        cfgd::number_array(cfgd::need(j, "p", path), path + ".p"),
        cfgd::number_array(cfgd::need(j, "values", path), path + ".values"));
  if (kind == "natural") {
    if (!space) cfgd::fail(path, "natural psi needs a space in the config");
    const auto& jf = cfgd::need(j, "fields", path);
    if (!jf.is_array()) cfgd::fail(path + ".fields", "must be an array");
    std::vector<ScalarField> family;
    int idx = 0;
    for (const auto& f : jf)
      family.push_back(
          parse_field(f, path + ".fields[" + std::to_string(idx++) + "]",
                      *space, seed));
    return natural_function(
        *space, family, cfgd::number_array(cfgd::need(j, "p", path), path + ".p"));
  }
  cfgd::fail(path + ".kind", "unknown psi kind '" + kind + "'");
}

inline NeighborRule parse_rule(const nlohmann::json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "edges") return EdgesRule{};
    if (s == "all_pairs") return AllPairsRule{};
    cfgd::fail(path, "unknown rule '" + s + "'");
  }
  if (j.is_object() && j.contains("radius"))
    return RadiusRule{j.at("radius").get<double>()};
  cfgd::fail(path, "rule must be 'edges', 'all_pairs', or {\"radius\": r}");
}

inline SearchConfig parse_search(const nlohmann::json& j, const std::string& path,
                                 uint64_t global_seed, uint64_t stream) {
  SearchConfig cfg;
  cfg.seed = Rng::derive(global_seed, stream);
  if (j.is_null()) return cfg;
  if (!j.is_object()) cfgd::fail(path, "search section must be an object");
  if (j.contains("restarts")) cfg.restarts = j.at("restarts").get<int>();
  if (j.contains("iterations")) cfg.iterations = j.at("iterations").get<int>();
  if (j.contains("seed"))
    cfg.seed = Rng::derive(j.at("seed").get<uint64_t>(), stream);
  if (cfg.restarts < 1 || cfg.iterations < 1)
    cfgd::fail(path, "budget must be positive");
  return cfg;
}

inline TransferSpec parse_transfer(const nlohmann::json& j,
                                   const std::string& path,
                                   const MetricMeasureSpace* space,
                                   uint64_t seed) {
  if (!j.is_object()) cfgd::fail(path, "transfer section must be an object");
  TransferSpec t;

  // Order s first: estimate-kind constants depend on it.
  const auto& js = cfgd::need(j, "s", path);
  if (js.is_number()) {
    t.s = js.get<double>();
  } else if (js.is_object() && js.value("kind", "") == "estimate_order") {
    if (!space) cfgd::fail(path + ".s", "estimate_order needs a space");
    std::vector<double> radii =
        cfgd::number_array(cfgd::need(js, "radii", path + ".s"), path + ".s.radii");
    std::vector<int> centers;
    for (const auto& c : cfgd::need(js, "centers", path + ".s"))
      centers.push_back(c.get<int>());
    OrderEstimate est = estimate_order(*space, radii, centers);
    if (est.flagged)
      throw OutOfDomain(path + ".s: estimated order " + std::to_string(est.s) +
                        " is not > 1; supply s explicitly");
    t.s = est.s;
  } else {
    cfgd::fail(path + ".s", "must be a number or an estimate_order spec");
  }
  if (!(t.s > 1.0)) cfgd::fail(path + ".s", "order s must exceed 1");

  if (j.contains("kp")) {
    const auto& jk = j.at("kp");
    const std::string kind = jk.is_object() ? jk.value("kind", "") : "";
    if (kind == "constant") {
      t.kp = KpFunction::constant(cfgd::need_number(jk, "value", path + ".kp"));
    } else if (kind == "table") {
      std::vector<std::vector<double>> values;
      for (const auto& row : cfgd::need(jk, "values", path + ".kp"))
        values.push_back(cfgd::number_array(row, path + ".kp.values"));
      t.kp = KpFunction::table(
          cfgd::number_array(cfgd::need(jk, "p", path + ".kp"), path + ".kp.p"),
          cfgd::number_array(cfgd::need(jk, "q", path + ".kp"), path + ".kp.q"),
          std::move(values));
    } else if (kind == "estimate") {
      if (!space) cfgd::fail(path + ".kp", "estimate needs a space");
      SearchConfig budget = parse_search(jk, path + ".kp", seed, 101);
      std::vector<double> pn =
          jk.contains("p") ? cfgd::number_array(jk.at("p"), path + ".kp.p")
                           : log_uniform_grid(1.0, std::max(1.5, t.s), 5);
      std::vector<double> qn =
          jk.contains("q") ? cfgd::number_array(jk.at("q"), path + ".kp.q")
                           : log_uniform_grid(1.0, 16.0, 5);
      std::vector<std::vector<double>> values(pn.size(),
                                              std::vector<double>(qn.size()));
      for (std::size_t a = 0; a < pn.size(); ++a)
        for (std::size_t b = 0; b < qn.size(); ++b) {
          SearchConfig node = budget;
          node.seed = Rng::derive(budget.seed, a * qn.size() + b);
          values[a][b] = estimate_kp(*space, pn[a], qn[b], node).estimate;
        }
      t.kp = KpFunction::table(pn, qn, std::move(values));
    } else {
      cfgd::fail(path + ".kp", "kind must be constant, table, or estimate");
    }
  }

  if (j.contains("kl")) {
    const auto& jk = j.at("kl");
    const std::string kind = jk.is_object() ? jk.value("kind", "") : "";
    if (kind == "constant") {
      t.kl = KlFunction::constant(cfgd::need_number(jk, "value", path + ".kl"));
    } else if (kind == "table") {
      t.kl = KlFunction::table(
          cfgd::number_array(cfgd::need(jk, "p", path + ".kl"), path + ".kl.p"),
          cfgd::number_array(cfgd::need(jk, "values", path + ".kl"),
                             path + ".kl.values"));
    } else if (kind == "estimate") {
      if (!space) cfgd::fail(path + ".kl", "estimate needs a space");
      SearchConfig budget = parse_search(jk, path + ".kl", seed, 211);
      std::vector<double> pn =
          jk.contains("p")
              ? cfgd::number_array(jk.at("p"), path + ".kl.p")
              : log_uniform_grid(t.s * 1.25, t.s * 8.0, 4);
      std::vector<double> values(pn.size());
      for (std::size_t a = 0; a < pn.size(); ++a) {
        SearchConfig node = budget;
        node.seed = Rng::derive(budget.seed, a);
        values[a] = estimate_kl(*space, t.s, pn[a], node).estimate;
      }
      t.kl = KlFunction::table(pn, values);
    } else {
      cfgd::fail(path + ".kl", "kind must be constant, table, or estimate");
    }
  }

  if (j.contains("r_factor"))
    t.r_factor = parse_psi(j.at("r_factor"), path + ".r_factor", space, seed);
  if (j.contains("v_factor"))
    t.v_factor = parse_psi(j.at("v_factor"), path + ".v_factor", space, seed);
  if (j.contains("zeta"))
    t.zeta = parse_psi(j.at("zeta"), path + ".zeta", space, seed);
  return t;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: must be a JSON object");
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.task = cfgd::need_string(j, "task", "config");
  static const char* kTasks[] = {"norm",        "fundamental", "transfer",
                                 "verify-pl",   "verify-afe",  "verify-lip",
                                 "estimate-kp", "estimate-kl", "estimate-order",
                                 "asymptotics", "sharpness"};
  bool known = false;
  for (const char* t : kTasks) known = known || cfg.task == t;
  if (!known) cfgd::fail("config.task", "unknown task '" + cfg.task + "'");

  cfg.seed = j.value("seed", 0ULL);

  if (j.contains("space")) cfg.space.emplace(parse_space(j.at("space"), "config.space"));

  if (j.contains("fields")) {
    if (!cfg.space) cfgd::fail("config.fields", "fields need a space");
    const auto& jf = j.at("fields");
    if (!jf.is_array()) cfgd::fail("config.fields", "must be an array");
    int idx = 0;
    for (const auto& f : jf)
      cfg.fields.push_back(parse_field(
          f, "config.fields[" + std::to_string(idx++) + "]", *cfg.space, cfg.seed));
  }

  if (j.contains("psi"))
    cfg.psi = parse_psi(j.at("psi"), "config.psi",
                        cfg.space ? &*cfg.space : nullptr, cfg.seed);

  if (j.contains("transfer"))
    cfg.transfer = parse_transfer(j.at("transfer"), "config.transfer",
                                  cfg.space ? &*cfg.space : nullptr, cfg.seed);

  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    if (!g.is_object()) cfgd::fail("config.grids", "must be an object");
    auto grab = [&](const char* key, std::vector<double>& dst) {
      if (!g.contains(key)) return;
      dst = cfgd::number_array(g.at(key), std::string("config.grids.") + key);
      for (std::size_t k = 1; k < dst.size(); ++k)
        if (!(dst[k] > dst[k - 1]))
          cfgd::fail(std::string("config.grids.") + key,
                     "must be strictly increasing");
    };
    grab("p", cfg.grids.p);
    grab("q", cfg.grids.q);
    grab("tau", cfg.grids.tau);
    grab("delta", cfg.grids.delta);
  }

  if (j.contains("rule")) cfg.rule = parse_rule(j.at("rule"), "config.rule");

  if (j.contains("order")) {
    const auto& o = j.at("order");
    cfg.order_radii = cfgd::number_array(cfgd::need(o, "radii", "config.order"),
                                         "config.order.radii");
    for (const auto& c : cfgd::need(o, "centers", "config.order"))
      cfg.order_centers.push_back(c.get<int>());
  }

  if (j.contains("exponents")) {
    const auto& e = j.at("exponents");
    if (e.contains("p")) cfg.exp_p = e.at("p").get<double>();
    if (e.contains("q")) cfg.exp_q = e.at("q").get<double>();
    if (e.contains("s")) cfg.exp_s = e.at("s").get<double>();
  }

  cfg.which = j.value("which", "");
  cfg.search = parse_search(j.contains("search") ? j.at("search") : nlohmann::json(),
                            "config.search", cfg.seed, 31);

  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.output.path = o.value("path", "");
    cfg.output.format = o.value("format", "json");
    if (cfg.output.format != "json" && cfg.output.format != "csv")
      cfgd::fail("config.output.format", "must be json or csv");
  }
  return cfg;
}

}  // namespace gp
