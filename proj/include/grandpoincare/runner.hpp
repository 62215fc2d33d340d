#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "grandpoincare/config.hpp"
#include "grandpoincare/report.hpp"

namespace gp {
namespace rund {

inline const MetricMeasureSpace& need_space(const ExperimentConfig& cfg) {
  if (!cfg.space) throw ConfigError("config.space: required by task " + cfg.task);
  return *cfg.space;
}

inline const PsiSpec& need_psi(const ExperimentConfig& cfg) {
  if (!cfg.psi) throw ConfigError("config.psi: required by task " + cfg.task);
  return *cfg.psi;
}

inline const TransferSpec& need_transfer(const ExperimentConfig& cfg) {
  if (!cfg.transfer)
    throw ConfigError("config.transfer: required by task " + cfg.task);
  return *cfg.transfer;
}

inline const ScalarField& need_one_field(const ExperimentConfig& cfg) {
  if (cfg.fields.size() != 1)
    throw ConfigError("config.fields: task " + cfg.task +
                      " needs exactly one field");
  return cfg.fields.front();
}

inline std::vector<double> q_grid_of(const ExperimentConfig& cfg) {
  return cfg.grids.q.empty() ? default_q_grid() : cfg.grids.q;
}

inline std::vector<double> tau_grid_of(const ExperimentConfig& cfg,
                                       const MetricMeasureSpace& space) {
  if (!cfg.grids.tau.empty()) return cfg.grids.tau;
  return log_uniform_grid(space.diam() / 100.0, space.diam(), 25);
}

inline void push_report(ReportRecord& rec, const InequalityReport& rep,
                        const std::string& name) {
  rec.scalars.emplace_back("lhs", rep.lhs);
  rec.scalars.emplace_back("rhs", rep.rhs);
  if (rep.ratio) rec.scalars.emplace_back("ratio", *rep.ratio);
  rec.rows = rep.rows;
  rec.verdicts.push_back({name, rep.holds, rep.degenerate});
  nlohmann::ordered_json w;
  if (!std::isnan(rep.witness_q)) w["q"] = rep.witness_q;
  if (!std::isnan(rep.witness_p)) w["p"] = rep.witness_p;
  if (!std::isnan(rep.witness_tau)) w["tau"] = rep.witness_tau;
  w["note"] = rep.note;
  w["tail_flag"] = rep.tail_flag;
  rec.extra["witness"] = w;
}

inline VerifyOptions verify_options(const ExperimentConfig& cfg) {
  VerifyOptions opts;
  opts.rule = cfg.rule;
  return opts;
}

}  // namespace rund

/// Executes one configured task and assembles its report. Deterministic for a
/// fixed config and seed at any thread-cap setting.
inline ReportRecord run(const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  ReportRecord rec;
  rec.task = cfg.task;
  rec.seed = cfg.seed;
  rec.config_echo = cfg.raw;
  // alphabetical so the order survives a sorted-key JSON round trip
  for (const char* key : {"fields", "grids", "psi", "space", "transfer"}) {
    rec.input_hashes.emplace_back(
        key, config_section_hash(cfg.raw.contains(key) ? cfg.raw.at(key)
                                                       : nlohmann::json()));
  }

  if (cfg.task == "norm") {
    const auto& space = rund::need_space(cfg);
    const auto& f = rund::need_one_field(cfg);
    const auto& psi = rund::need_psi(cfg);
    GrandNormResult res = bgls_norm(space, f, psi);
    rec.scalars.emplace_back("value", res.value);
    if (!std::isnan(res.argmax_p))
      rec.scalars.emplace_back("argmax_p", res.argmax_p);
    for (double p : cfg.grids.p) {
      const double lhs = lp_norm(space, f, Exponent(p));
      const double rhs = psi.eval(p);
      rec.rows.push_back({"p", p, lhs, rhs, lhs / rhs, true});
    }
  } else if (cfg.task == "fundamental") {
    const auto& psi = rund::need_psi(cfg);
    if (cfg.grids.delta.empty())
      throw ConfigError("config.grids.delta: required by task fundamental");
    for (double d : cfg.grids.delta) {
      const double v = fundamental_function(psi, d);
      rec.rows.push_back({"delta", d, v, 1.0, v, true});
    }
  } else if (cfg.task == "transfer") {
    const auto& psi = rund::need_psi(cfg);
    const auto& t = rund::need_transfer(cfg);
    for (double q : rund::q_grid_of(cfg)) {
      const double v = transfer_nu(psi, t, q);
      rec.rows.push_back({"q", q, v, 1.0, v, true});
    }
  } else if (cfg.task == "verify-pl") {
    const auto& space = rund::need_space(cfg);
    VerifyOptions opts = rund::verify_options(cfg);
    opts.normalize = cfg.raw.value("normalize", false);
    InequalityReport rep =
        verify_prop21(space, rund::need_one_field(cfg), rund::need_psi(cfg),
                      rund::need_transfer(cfg), rund::q_grid_of(cfg), opts);
    rund::push_report(rec, rep, "prop21");
  } else if (cfg.task == "verify-afe") {
    const auto& space = rund::need_space(cfg);
    InequalityReport rep =
        verify_afe(space, rund::need_one_field(cfg), rund::need_psi(cfg),
                   rund::need_transfer(cfg), rund::q_grid_of(cfg),
                   rund::verify_options(cfg));
    rund::push_report(rec, rep, "afe");
  } else if (cfg.task == "verify-lip") {
    const auto& space = rund::need_space(cfg);
    InequalityReport rep = verify_lip(
        space, rund::need_one_field(cfg), rund::need_psi(cfg),
        rund::need_transfer(cfg), rund::tau_grid_of(cfg, space),
        rund::verify_options(cfg));
    rund::push_report(rec, rep, "lip");
  } else if (cfg.task == "estimate-kp") {
    const auto& space = rund::need_space(cfg);
    if (!(cfg.exp_p >= 1.0) || !(cfg.exp_q >= 1.0))
      throw ConfigError("config.exponents: estimate-kp needs p >= 1 and q >= 1");
    SearchConfig sc = cfg.search;
    sc.rule = cfg.rule;
    KpEstimate est = estimate_kp(space, cfg.exp_p, cfg.exp_q, sc);
    rec.scalars.emplace_back("estimate", est.estimate);
    rec.extra["witness"] = {{"values", est.witness.values()}};
  } else if (cfg.task == "estimate-kl") {
    const auto& space = rund::need_space(cfg);
    if (!(cfg.exp_s > 0.0) || !(cfg.exp_p > 0.0))
      throw ConfigError("config.exponents: estimate-kl needs s and p");
    SearchConfig sc = cfg.search;
    sc.rule = cfg.rule;
    KlEstimate est = estimate_kl(space, cfg.exp_s, cfg.exp_p, sc);
    rec.scalars.emplace_back("estimate", est.estimate);
    rec.extra["witness"] = {{"values", est.witness.values()},
                            {"pair", {est.x, est.y}}};
  } else if (cfg.task == "estimate-order") {
    const auto& space = rund::need_space(cfg);
    if (cfg.order_radii.empty() || cfg.order_centers.empty())
      throw ConfigError("config.order: estimate-order needs radii and centers");
    OrderEstimate est = estimate_order(space, cfg.order_radii, cfg.order_centers);
    rec.scalars.emplace_back("s", est.s);
    rec.scalars.emplace_back("c_lower", est.c_lower);
    rec.scalars.emplace_back("c_upper", est.c_upper);
    rec.scalars.emplace_back("fit_residual", est.fit_residual);
    rec.scalars.emplace_back("flagged", est.flagged ? 1.0 : 0.0);
    for (const BallSample& s : est.samples)
      rec.rows.push_back({"r", s.radius, s.mass, 1.0, s.mass, true});
  } else if (cfg.task == "asymptotics") {
    const auto& psi = rund::need_psi(cfg);
    if (cfg.grids.delta.empty())
      throw ConfigError("config.grids.delta: required by task asymptotics");
    for (double d : cfg.grids.delta) {
      AsymptoticComparison cmp = asymptotic_ratio(psi, d);
      rec.rows.push_back({"delta", d, cmp.computed, cmp.predicted, cmp.ratio, true});
      rec.rows.push_back({"delta_stationary", d, cmp.computed,
                          cmp.predicted_stationary, cmp.ratio_stationary, true});
    }
  } else if (cfg.task == "sharpness") {
    const auto& space = rund::need_space(cfg);
    ProbeTarget target;
    if (cfg.which == "prop21")
      target = ProbeTarget::Prop21;
    else if (cfg.which == "afe")
      target = ProbeTarget::Afe;
    else if (cfg.which == "lip")
      target = ProbeTarget::Lip;
    else
      throw ConfigError("config.which: sharpness needs prop21, afe, or lip");
    const std::vector<double> grid = target == ProbeTarget::Lip
                                         ? rund::tau_grid_of(cfg, space)
                                         : rund::q_grid_of(cfg);
    SearchConfig sc = cfg.search;
    sc.rule = cfg.rule;
    VerifyOptions vopts = rund::verify_options(cfg);
    vopts.normalize = cfg.raw.value("normalize", false);
    ProbeResult probe =
        sharpness_probe(space, rund::need_psi(cfg), rund::need_transfer(cfg),
                        target, grid, sc, vopts);
    rec.scalars.emplace_back("best_ratio", probe.best_ratio);
    rec.extra["witness"] = {{"values", probe.witness.values()}};
    rec.rows = probe.report.rows;
  }

  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  return rec;
}

/// Serializes per the requested format and writes to the path (stdout if empty).
inline std::string render_report(const ReportRecord& rec, const std::string& format) {
  if (format == "csv") return rec.to_csv();
  return rec.to_json().dump(2) + "\n";
}

}  // namespace gp
