#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "grandpoincare/errors.hpp"

namespace gp {

struct ScanOptions {
  int grid_points = 512;
  double position_rel_tol = 1e-10;  // golden-section stop, in the scan coordinate
  double p_cap = 1e6;               // exponent clamp for scans over (lo, inf)
  double value_cap = 1e300;
  bool collect_samples = false;
};

enum class ExtremumSite {
  Interior,
  LowerEndpoint,
  UpperEndpoint,
  InfiniteLimit,
  Node,       // tabulated-weight candidate
  SpikePoint  // forced by a spike weight
};

struct ScanSample {
  double p;
  double value;
};

struct ScanResult {
  double p = std::numeric_limits<double>::quiet_NaN();
  double value = -std::numeric_limits<double>::infinity();
  ExtremumSite site = ExtremumSite::Interior;
  std::vector<ScanSample> samples;
};

namespace detail {

// Grid + golden-section maximization of fn(p) over the open interval (lo, hi).
// Scans log-uniformly in p for finite hi and uniformly in t = 1 - 1/p for
// hi = inf. Finite endpoints are probed as explicit limit candidates when the
// caller says the weight stays finite there, so suprema attained in the limit
// are reproduced exactly rather than at lo + eps.
template <class Fn>
ScanResult maximize_exponent_scan(Fn&& fn, double lo, double hi, bool eval_lo,
                                  bool eval_hi,
                                  std::optional<double> limit_at_infinity,
                                  const ScanOptions& opt) {
  ScanResult res;
  const bool unbounded = std::isinf(hi);
  // A degenerate window (lo >= hi_eff) skips the grid; endpoint candidates
  // below still apply.
  const double hi_eff = unbounded ? opt.p_cap : hi;
  const double eps =
      unbounded ? 1e-6 : std::min(1e-6, (hi_eff - lo) / 1000.0);
  auto to_p = [&](double x) {
    return unbounded ? 1.0 / (1.0 - x) : std::exp(x);
  };
  double xa, xb;
  if (unbounded) {
    xa = 1.0 - 1.0 / (lo + eps);
    xb = 1.0 - 1.0 / hi_eff;
  } else {
    xa = std::log(lo + eps);
    xb = std::log(hi_eff - eps);
  }

  auto consider = [&](double p, double v, ExtremumSite site) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) return;
    if (v > res.value) {
      res.value = v;
      res.p = p;
      res.site = site;
    }
  };

  int best_idx = -1;
  if (xa < xb) {
    const int m = std::max(2, opt.grid_points);
    const double step = (xb - xa) / (m - 1);
    for (int i = 0; i < m; ++i) {
      const double x = (i + 1 == m) ? xb : xa + step * i;
      const double p = to_p(x);
      const double v = fn(p);
      if (opt.collect_samples) res.samples.push_back({p, v});
      if (!std::isnan(v) && v > res.value) {
        res.value = v;
        res.p = p;
        res.site = ExtremumSite::Interior;
        best_idx = i;
      }
    }
    if (best_idx >= 0) {
      double a = xa + step * std::max(0, best_idx - 1);
      double b = std::min(xb, xa + step * (best_idx + 1));
      constexpr double gr = 0.6180339887498948482;
      double x1 = b - gr * (b - a);
      double x2 = a + gr * (b - a);
      double f1 = fn(to_p(x1));
      double f2 = fn(to_p(x2));
      consider(to_p(x1), f1, ExtremumSite::Interior);
      consider(to_p(x2), f2, ExtremumSite::Interior);
      const double tol = opt.position_rel_tol;
      for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (std::isnan(f1) || f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = fn(to_p(x2));
          consider(to_p(x2), f2, ExtremumSite::Interior);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = fn(to_p(x1));
          consider(to_p(x1), f1, ExtremumSite::Interior);
        }
      }
    }
  }

  if (eval_lo) consider(lo, fn(lo), ExtremumSite::LowerEndpoint);
  if (eval_hi && !unbounded) consider(hi, fn(hi), ExtremumSite::UpperEndpoint);
  if (limit_at_infinity) {
    consider(std::numeric_limits<double>::infinity(), *limit_at_infinity,
             ExtremumSite::InfiniteLimit);
  }
  return res;
}

template <class Fn>
ScanResult minimize_exponent_scan(Fn&& fn, double lo, double hi, bool eval_lo,
                                  bool eval_hi,
                                  std::optional<double> limit_at_infinity,
                                  const ScanOptions& opt) {
  auto neg = [&fn](double p) { return -fn(p); };
  std::optional<double> neg_limit;
  if (limit_at_infinity) neg_limit = -*limit_at_infinity;
  ScanResult res =
      maximize_exponent_scan(neg, lo, hi, eval_lo, eval_hi, neg_limit, opt);
  res.value = -res.value;
  for (auto& s : res.samples) s.value = -s.value;
  return res;
}

// Maximum of fn over an explicit candidate list (tabulated weights). Ties keep
// the first candidate, so results are order-deterministic.
template <class Fn>
ScanResult maximize_over_nodes(Fn&& fn, const std::vector<double>& nodes,
                               bool collect, ScanResult seed = {}) {
  ScanResult res = std::move(seed);
  for (double p : nodes) {
    const double v = fn(p);
    if (collect) res.samples.push_back({p, v});
    if (!std::isnan(v) && v > res.value) {
      res.value = v;
      res.p = p;
      res.site = ExtremumSite::Node;
    }
  }
  return res;
}

}  // namespace detail
}  // namespace gp
