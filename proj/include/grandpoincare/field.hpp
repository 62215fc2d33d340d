#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/numeric.hpp"
#include "grandpoincare/space.hpp"

namespace gp {

/// Real-valued function on the points of one space. Immutable; remembers the
/// identity of the space it was built on.
class ScalarField {
 public:
  ScalarField(const MetricMeasureSpace& space, std::vector<double> values)
      : values_(std::move(values)), space_id_(space.id()) {
    if (values_.size() != static_cast<std::size_t>(space.size()))
      throw FieldSpaceMismatch("value count does not match point count");
    for (double v : values_)
      if (!std::isfinite(v)) throw OutOfDomain("field values must be finite");
  }

  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }
  uint64_t space_id() const { return space_id_; }

  /// Same values bound to another space of equal size (used after measure
  /// normalization, which mints a fresh space identity).
  ScalarField rebind(const MetricMeasureSpace& space) const {
    return ScalarField(space, values_);
  }

 private:
  std::vector<double> values_;
  uint64_t space_id_;
};

namespace detail {
inline void check_match(const MetricMeasureSpace& space, const ScalarField& f) {
  if (f.space_id() != space.id() ||
      f.size() != space.size())
    throw FieldSpaceMismatch("field does not belong to this space");
}
}  // namespace detail

/// Measure-weighted mean u_X.
inline double average(const MetricMeasureSpace& space, const ScalarField& u) {
  detail::check_match(space, u);
  CompensatedSum s;
  for (int i = 0; i < space.size(); ++i) s.add(space.weight(i) * u[i]);
  return s.value() / space.total_mass();
}

/// Weighted L^p norm; p = inf returns max |f|. Power sums switch to log space
/// for large p or wide magnitude spans so BGLS scans never overflow.
inline double lp_norm(const MetricMeasureSpace& space, const ScalarField& f,
                      Exponent p) {
  detail::check_match(space, f);
  if (!p.is_infinite() && !(p.value() >= 1.0))
    throw InvalidExponent("exponent must be >= 1");
  if (p.is_infinite()) {
    double m = 0.0;
    for (int i = 0; i < space.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
  }
  const double pv = p.value();
  double amax = 0.0;
  double amin_pos = std::numeric_limits<double>::infinity();
  for (int i = 0; i < space.size(); ++i) {
    const double a = std::abs(f[i]);
    amax = std::max(amax, a);
    if (a > 0.0) amin_pos = std::min(amin_pos, a);
  }
  if (amax == 0.0) return 0.0;
  const bool log_space = pv > 64.0 || amax / amin_pos > 1e8;
  if (!log_space) {
    CompensatedSum s;
    for (int i = 0; i < space.size(); ++i)
      s.add(space.weight(i) * std::pow(std::abs(f[i]), pv));
    return std::pow(s.value(), 1.0 / pv);
  }
  // log-sum-exp of ln w_i + p ln|f_i| over nonzero entries.
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(space.size());
  for (int i = 0; i < space.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    const double t = std::log(space.weight(i)) + pv * std::log(a);
    terms.push_back(t);
    m = std::max(m, t);
  }
  CompensatedSum s;
  for (double t : terms) s.add(std::exp(t - m));
  return std::exp((m + std::log(s.value())) / pv);
}

/// Neighbor rule for the discrete upper gradient.
struct EdgesRule {};
struct RadiusRule {
  double r;
};
struct AllPairsRule {};
using NeighborRule = std::variant<EdgesRule, RadiusRule, AllPairsRule>;

/// Picks the natural rule for a space: graph edges when known, all pairs otherwise.
inline NeighborRule default_rule(const MetricMeasureSpace& space) {
  if (space.has_adjacency()) return EdgesRule{};
  return AllPairsRule{};
}

/// Discrete minimal weak upper gradient surrogate:
/// g(x) = max over admissible y != x of |u(x) - u(y)| / d(x, y).
inline ScalarField upper_gradient(const MetricMeasureSpace& space,
                                  const ScalarField& u,
                                  const NeighborRule& rule) {
  detail::check_match(space, u);
  const int n = space.size();
  std::vector<double> g(n, 0.0);
  auto slope_over = [&](int x, auto&& admissible) {
    double best = -1.0;
    for (int y = 0; y < n; ++y) {
      if (y == x || !admissible(y)) continue;
      best = std::max(best, std::abs(u[x] - u[y]) / space.dist(x, y));
    }
    return best;
  };
  for (int x = 0; x < n; ++x) {
    double s = -1.0;
    if (std::holds_alternative<EdgesRule>(rule)) {
      if (!space.has_adjacency())
        throw IsolatedPoint("space has no edge structure for the edges rule");
      double best = -1.0;
      for (int y : space.adjacency()[x])
        best = std::max(best, std::abs(u[x] - u[y]) / space.dist(x, y));
      s = best;
    } else if (const auto* rr = std::get_if<RadiusRule>(&rule)) {
      s = slope_over(x, [&](int y) { return space.dist(x, y) <= rr->r; });
    } else {
      s = slope_over(x, [](int) { return true; });
    }
    if (s < 0.0)
      throw IsolatedPoint("point " + std::to_string(x) +
                          " has no admissible neighbor");
    g[x] = s;
  }
  return ScalarField(space, std::move(g));
}

/// ||u||W_p^1 = ||grad u||_p, by definition.
inline double sobolev_seminorm(const MetricMeasureSpace& space,
                               const ScalarField& u, Exponent p,
                               const NeighborRule& rule) {
  return lp_norm(space, upper_gradient(space, u, rule), p);
}

struct ModulusProfile {
  std::vector<double> taus;
  std::vector<double> omegas;
};

/// omega(u, tau) = sup over pairs with d(x,y) <= tau of |u(x) - u(y)|.
inline ModulusProfile modulus_of_continuity(const MetricMeasureSpace& space,
                                            const ScalarField& u,
                                            const std::vector<double>& taus) {
  detail::check_match(space, u);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (taus[k] < 0.0) throw OutOfDomain("tau must be nonnegative");
    if (k > 0 && taus[k] < taus[k - 1])
      throw OutOfDomain("taus must be sorted ascending");
  }
  ModulusProfile prof;
  prof.taus = taus;
  prof.omegas.assign(taus.size(), 0.0);
  const int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = space.dist(i, j);
      const double gap = std::abs(u[i] - u[j]);
      for (std::size_t k = 0; k < taus.size(); ++k)
        if (d <= taus[k]) prof.omegas[k] = std::max(prof.omegas[k], gap);
    }
  return prof;
}

/// Smallest L with |u(x) - u(y)| <= L d(x, y) over all pairs.
inline double lipschitz_constant(const MetricMeasureSpace& space,
                                 const ScalarField& u) {
  detail::check_match(space, u);
  double best = 0.0;
  const int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::max(best, std::abs(u[i] - u[j]) / space.dist(i, j));
  return best;
}

/// Indicator of a point subset.
inline ScalarField indicator_field(const MetricMeasureSpace& space,
                                   const std::vector<int>& subset) {
  if (subset.empty()) throw EmptySet("indicator subset is empty");
  std::vector<double> v(space.size(), 0.0);
  for (int i : subset) {
    if (i < 0 || i >= space.size())
      throw IndexOutOfRange("indicator index out of range");
    v[i] = 1.0;
  }
  return ScalarField(space, std::move(v));
}

/// u - u_X. Exactly zero for constant fields so degenerate 0/0 reports stay exact.
inline ScalarField centered(const MetricMeasureSpace& space, const ScalarField& u) {
  detail::check_match(space, u);
  const auto [mn, mx] = std::minmax_element(u.values().begin(), u.values().end());
  if (*mn == *mx) return ScalarField(space, std::vector<double>(space.size(), 0.0));
  const double mean = average(space, u);
  std::vector<double> v(u.values());
  for (double& x : v) x -= mean;
  return ScalarField(space, std::move(v));
}

}  // namespace gp
