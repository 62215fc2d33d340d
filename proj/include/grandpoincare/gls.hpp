#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/extremum.hpp"
#include "grandpoincare/field.hpp"
#include "grandpoincare/psi.hpp"
#include "grandpoincare/space.hpp"

namespace gp {
namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pointwise product of psi parts and an optional extra positive factor
/// (a transfer constant slice), with the combined exponent domain.
struct Weight {
  double lo = 1.0;
  double hi = kInf;                    // min of the parts' supports
  std::optional<double> spike;         // set when a spike factor participates
  std::vector<double> nodes;           // union of tabulated nodes inside [lo, hi]
  std::function<double(double)> eval;  // defined on [lo, hi] (limits at edges)
  double upper_edge = kInf;            // eval limit at hi; +inf = no candidate
  std::optional<double> extra_limit_at_inf;  // extra factor limit when hi = inf
};

inline Weight make_weight(std::vector<const PsiSpec*> parts,
                          std::function<double(double)> extra = {},
                          std::optional<double> extra_limit_at_inf = {}) {
  Weight w;
  for (const PsiSpec* psi : parts) {
    if (psi->is_spike()) {
      if (w.spike && *w.spike != psi->spike_point())
        throw EmptyBracket("two spikes at different exponents");
      w.spike = psi->spike_point();
      continue;
    }
    w.lo = std::max(w.lo, psi->lower());
    w.hi = std::min(w.hi, psi->b());
    if (psi->is_tabulated())
      for (double p : psi->nodes()) w.nodes.push_back(p);
  }
  std::sort(w.nodes.begin(), w.nodes.end());
  w.nodes.erase(std::unique(w.nodes.begin(), w.nodes.end()), w.nodes.end());
  std::erase_if(w.nodes, [&](double p) { return p < w.lo || p > w.hi; });

  w.eval = [parts, extra](double p) {
    double v = extra ? extra(p) : 1.0;
    for (const PsiSpec* psi : parts) v *= psi->eval(p);
    return v;
  };
  double edge = 1.0;
  for (const PsiSpec* psi : parts) {
    if (psi->is_spike()) continue;
    edge *= psi->edge_value(w.hi);
  }
  if (extra) {
    if (std::isinf(w.hi)) {
      edge = extra_limit_at_inf ? edge * (*extra_limit_at_inf) : kInf;
    } else {
      edge *= extra(w.hi);
    }
  }
  w.upper_edge = edge;
  w.extra_limit_at_inf = extra_limit_at_inf;
  return w;
}

/// Weight evaluation for ratio scans: out-of-domain points are skipped (NaN)
/// and an infinite weight yields ratio 0 (the C/inf = 0 convention).
inline double guarded_weight(const Weight& w, double p) {
  try {
    return w.eval(p);
  } catch (const OutOfDomain&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

/// sup over p in [lo, hi] of numer(p) / weight(p).
///  - spike weight: forced to the spike exponent (EmptyBracket if outside);
///  - tabulated weight: candidates are the nodes (norm-style); the fundamental
///    function additionally scans the interpolated interior;
///  - smooth weight: grid + golden refinement with endpoint limit candidates.
/// numer_limit_at_inf feeds the p -> inf candidate when hi is unbounded.
inline ScanResult scan_sup_ratio(const Weight& w, double lo, double hi,
                                 const std::function<double(double)>& numer,
                                 double numer_limit_at_inf,
                                 bool nodes_only_for_tabulated,
                                 const ScanOptions& opt) {
  lo = std::max(lo, w.lo);
  hi = std::min(hi, w.hi);
  if (w.spike) {
    const double r = *w.spike;
    if (r < lo || r > hi)
      throw EmptyBracket("spike exponent lies outside the scan bracket");
    ScanResult res;
    res.p = r;
    res.value = numer(r) / w.eval(r);
    res.site = ExtremumSite::SpikePoint;
    if (opt.collect_samples) res.samples.push_back({r, res.value});
    return res;
  }
  if (!(lo <= hi)) throw EmptyBracket("empty exponent bracket");
  auto ratio = [&](double p) {
    const double wv = guarded_weight(w, p);
    if (std::isnan(wv)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(wv)) return 0.0;
    return numer(p) / wv;
  };
  if (!w.nodes.empty()) {
    std::vector<double> cands;
    for (double p : w.nodes)
      if (p >= lo && p <= hi) cands.push_back(p);
    if (lo > w.nodes.front() && std::find(cands.begin(), cands.end(), lo) == cands.end())
      cands.insert(cands.begin(), lo);
    if (hi < w.nodes.back() && std::find(cands.begin(), cands.end(), hi) == cands.end())
      cands.push_back(hi);
    if (cands.empty()) throw EmptyBracket("no tabulated node inside the bracket");
    ScanResult res = maximize_over_nodes(ratio, cands, opt.collect_samples);
    if (!nodes_only_for_tabulated && cands.size() > 1) {
      ScanResult interior = maximize_exponent_scan(
          ratio, cands.front(), cands.back(), false, false, std::nullopt, opt);
      if (interior.value > res.value) {
        res.value = interior.value;
        res.p = interior.p;
        res.site = interior.site;
      }
      if (opt.collect_samples)
        res.samples.insert(res.samples.end(), interior.samples.begin(),
                           interior.samples.end());
    }
    return res;
  }
  const bool unbounded = std::isinf(hi);
  const double hi_weight = hi < w.hi ? guarded_weight(w, hi) : w.upper_edge;
  const bool eval_hi = !unbounded && std::isfinite(hi_weight);
  std::optional<double> limit;
  if (unbounded && std::isfinite(w.upper_edge) && w.upper_edge > 0.0)
    limit = numer_limit_at_inf / w.upper_edge;
  return maximize_exponent_scan(ratio, lo, hi, true, eval_hi, limit, opt);
}

/// inf over p in [lo, hi] of weight(p) (transfer-function style).
inline ScanResult scan_inf_weight(const Weight& w, double lo, double hi,
                                  const ScanOptions& opt) {
  lo = std::max(lo, w.lo);
  hi = std::min(hi, w.hi);
  if (w.spike) {
    const double r = *w.spike;
    if (r < lo || r > hi)
      throw EmptyBracket("spike exponent lies outside the bracket");
    ScanResult res;
    res.p = r;
    res.value = w.eval(r);
    res.site = ExtremumSite::SpikePoint;
    return res;
  }
  if (!(lo <= hi)) throw EmptyBracket("empty exponent bracket");
  auto safe = [&](double p) {
    const double v = guarded_weight(w, p);
    // +inf passes through: it simply never wins the infimum.
    return v;
  };
  if (!w.nodes.empty()) {
    std::vector<double> cands;
    for (double p : w.nodes)
      if (p >= lo && p <= hi) cands.push_back(p);
    if (lo > w.nodes.front() && std::find(cands.begin(), cands.end(), lo) == cands.end())
      cands.insert(cands.begin(), lo);
    if (hi < w.nodes.back() && std::find(cands.begin(), cands.end(), hi) == cands.end())
      cands.push_back(hi);
    if (cands.empty()) throw EmptyBracket("no tabulated node inside the bracket");
    auto neg = [&](double p) { return -safe(p); };
    ScanResult res = maximize_over_nodes(neg, cands, false);
    res.value = -res.value;
    return res;
  }
  const bool eval_hi = std::isfinite(hi < w.hi ? guarded_weight(w, hi) : w.upper_edge);
  return minimize_exponent_scan(safe, lo, hi, true, eval_hi, std::nullopt, opt);
}

}  // namespace detail

struct GrandNormOptions {
  ScanOptions scan;
  bool collect_profile = false;
  std::optional<double> clamp_lo;  // restrict the exponent scan from below
  std::optional<double> clamp_hi;  // restrict from above (e.g. s' = min(b, s))
};

struct GrandNormResult {
  double value = 0.0;
  double argmax_p = std::numeric_limits<double>::quiet_NaN();
  ExtremumSite site = ExtremumSite::Interior;
  std::vector<ScanSample> profile;
};

/// ||f||G(psi) = sup over p in (1, b) of ||f||_p / psi(p). A spike at r
/// reproduces the L_r norm bit-for-bit; a tabulated psi is scanned at its
/// nodes (where it is actually known).
inline GrandNormResult bgls_norm(const MetricMeasureSpace& space,
                                 const ScalarField& f, const PsiSpec& psi,
                                 const GrandNormOptions& opts = {}) {
  detail::check_match(space, f);
  GrandNormResult out;
  double amax = 0.0;
  for (int i = 0; i < space.size(); ++i) amax = std::max(amax, std::abs(f[i]));
  if (amax == 0.0) return out;

  if (psi.is_spike()) {
    const double r = psi.spike_point();
    if ((opts.clamp_lo && r < *opts.clamp_lo) ||
        (opts.clamp_hi && r > *opts.clamp_hi))
      throw EmptyBracket("spike exponent excluded by the scan clamp");
    out.value = lp_norm(space, f, Exponent(r));
    out.argmax_p = r;
    out.site = ExtremumSite::SpikePoint;
    if (opts.collect_profile) out.profile.push_back({r, out.value});
    return out;
  }

  detail::Weight w = detail::make_weight({&psi});
  ScanOptions scan = opts.scan;
  scan.collect_samples = opts.collect_profile;
  auto numer = [&](double p) { return lp_norm(space, f, Exponent(p)); };
  const double lo = opts.clamp_lo ? std::max(*opts.clamp_lo, w.lo) : w.lo;
  const double hi = opts.clamp_hi ? std::min(*opts.clamp_hi, w.hi) : w.hi;
  ScanResult res = detail::scan_sup_ratio(
      w, lo, hi, numer, lp_norm(space, f, Exponent::infinity()),
      /*nodes_only_for_tabulated=*/true, scan);
  if (std::isinf(res.value) || res.value > scan.value_cap)
    throw NormDiverged("BGLS supremum exceeds the value cap");
  out.value = std::max(res.value, 0.0);
  out.argmax_p = res.p;
  out.site = res.site;
  out.profile = std::move(res.samples);
  return out;
}

struct FundamentalResult {
  double value = 0.0;
  double p = std::numeric_limits<double>::quiet_NaN();
  ExtremumSite site = ExtremumSite::Interior;
};

namespace detail {

/// phi(delta, G w) = sup over p in [lo, hi] of delta^{1/p} / w(p), for an
/// arbitrary product weight. Tabulated factors are scanned at nodes and
/// across the interpolated interior (the numerator has known form).
inline FundamentalResult fundamental_over_weight(const Weight& w, double delta,
                                                 double lo, double hi,
                                                 const ScanOptions& opt) {
  if (!(delta > 0.0)) throw OutOfDomain("fundamental function needs delta > 0");
  const double ln_delta = std::log(delta);
  auto numer = [ln_delta](double p) { return std::exp(ln_delta / p); };
  ScanResult res =
      scan_sup_ratio(w, lo, hi, numer, 1.0, /*nodes_only_for_tabulated=*/false, opt);
  if (std::isinf(res.value) || res.value > opt.value_cap)
    throw NormDiverged("fundamental-function supremum exceeds the value cap");
  return {res.value, res.p, res.site};
}

}  // namespace detail

/// phi(delta, G psi) = sup over p in [1, b) of delta^{1/p} / psi(p)  (Eq-style
/// closed lower endpoint; delta >= 1 flips the maximizer toward small p).
inline FundamentalResult fundamental_function_witness(const PsiSpec& psi,
                                                      double delta,
                                                      const ScanOptions& opt = {}) {
  if (!(delta > 0.0)) throw OutOfDomain("fundamental function needs delta > 0");
  if (psi.is_spike()) {
    const double r = psi.spike_point();
    return {std::pow(delta, 1.0 / r), r, ExtremumSite::SpikePoint};
  }
  detail::Weight w = detail::make_weight({&psi});
  return detail::fundamental_over_weight(w, delta, w.lo, w.hi, opt);
}

inline double fundamental_function(const PsiSpec& psi, double delta,
                                   const ScanOptions& opt = {}) {
  return fundamental_function_witness(psi, delta, opt).value;
}

/// psi_F(p) = sup over the family of ||f||_p, tabulated on p_grid.
inline PsiSpec natural_function(const MetricMeasureSpace& space,
                                const std::vector<ScalarField>& family,
                                const std::vector<double>& p_grid,
                                double cap = 1e300) {
  if (family.empty()) throw EmptyFamily("natural function needs a nonempty family");
  if (p_grid.empty()) throw OutOfDomain("natural function needs a p grid");
  for (std::size_t k = 0; k < p_grid.size(); ++k) {
    if (!(p_grid[k] >= 1.0) || std::isinf(p_grid[k]))
      throw OutOfDomain("p grid entries must be finite and >= 1");
    if (k > 0 && !(p_grid[k] > p_grid[k - 1]))
      throw OutOfDomain("p grid must be strictly increasing");
  }
  std::vector<double> values;
  values.reserve(p_grid.size());
  for (double p : p_grid) {
    double best = 0.0;
    for (const ScalarField& f : family)
      best = std::max(best, lp_norm(space, f, Exponent(p)));
    if (!std::isfinite(best) || best > cap)
      throw UnboundedFamily("family norm exceeds the cap at p = " + std::to_string(p));
    best = std::max(best, 0.0);
    values.push_back(best);
  }
  return PsiSpec::tabulated(p_grid, values);
}

/// Comparison of the computed fundamental function against the closed-form
/// small-delta predictions for the two parametric families. For polynomial
/// growth the stationarity form (beta/e)^beta |ln d|^-beta differs from the
/// published beta^beta |ln d|^-beta by e^-beta; both are reported.
struct AsymptoticComparison {
  double delta = 0.0;
  double computed = 0.0;
  double predicted = 0.0;             // published form
  double ratio = 0.0;                 // computed / predicted
  double predicted_stationary = 0.0;  // exact stationarity form
  double ratio_stationary = 0.0;
};

inline AsymptoticComparison asymptotic_ratio(const PsiSpec& psi, double delta,
                                             const ScanOptions& opt = {}) {
  if (!(delta > 0.0) || delta >= std::exp(-1.0))
    throw OutOfDomain("asymptotic comparison needs delta in (0, 1/e)");
  AsymptoticComparison cmp;
  cmp.delta = delta;
  cmp.computed = fundamental_function(psi, delta, opt);
  const double log_abs = std::abs(std::log(delta));
  if (psi.kind() == PsiSpec::Kind::PowerBlowup) {
    const double b = psi.b();
    const double beta = psi.param_beta();
    cmp.predicted = std::pow(beta * b * b / std::exp(1.0), beta) *
                    std::pow(delta, 1.0 / b) * std::pow(log_abs, -beta);
    cmp.predicted_stationary = cmp.predicted;
  } else if (psi.kind() == PsiSpec::Kind::PolynomialGrowth) {
    const double beta = psi.param_beta();
    cmp.predicted = std::pow(beta, beta) * std::pow(log_abs, -beta);
    cmp.predicted_stationary =
        std::pow(beta / std::exp(1.0), beta) * std::pow(log_abs, -beta);
  } else {
    throw OutOfDomain("asymptotics are defined for power_blowup and polynomial_growth");
  }
  cmp.ratio = cmp.computed / cmp.predicted;
  cmp.ratio_stationary = cmp.computed / cmp.predicted_stationary;
  return cmp;
}

}  // namespace gp
