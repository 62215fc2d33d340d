#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/psi.hpp"

namespace gp {
namespace detail {

// log-log linear location: index of the left node and the interpolation
// fraction; clamps outside the node hull (constant extension).
inline std::pair<std::size_t, double> locate_loglog(const std::vector<double>& xs,
                                                    double x) {
  if (xs.size() == 1 || x <= xs.front()) return {0, 0.0};
  if (x >= xs.back()) return {xs.size() - 2, 1.0};
  std::size_t k = 0;
  while (k + 2 < xs.size() && xs[k + 1] <= x) ++k;
  const double t =
      (std::log(x) - std::log(xs[k])) / (std::log(xs[k + 1]) - std::log(xs[k]));
  return {k, t};
}

}  // namespace detail

/// Poincare constant K_P(p, q): user constant, log-log bilinear table, or
/// arbitrary callback. Tables extend by clamping outside their node hull.
class KpFunction {
 public:
  static KpFunction constant(double v) {
    if (!(v > 0.0)) throw NonPositiveInput("kp constant must be positive");
    KpFunction f;
    f.value_ = v;
    f.kind_ = Kind::Constant;
    return f;
  }

  static KpFunction table(std::vector<double> p, std::vector<double> q,
                          std::vector<std::vector<double>> values) {
    if (p.empty() || q.empty() || values.size() != p.size())
      throw ParseError("kp table needs values with one row per p node");
    for (const auto& row : values)
      if (row.size() != q.size())
        throw ParseError("kp table rows must match the q node count");
    auto check_nodes = [](const std::vector<double>& xs) {
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!(xs[k] >= 1.0)) throw OutOfDomain("kp table nodes must be >= 1");
        if (k > 0 && !(xs[k] > xs[k - 1]))
          throw ParseError("kp table nodes must be strictly increasing");
      }
    };
    check_nodes(p);
    check_nodes(q);
    for (const auto& row : values)
      for (double v : row)
        if (!(v > 0.0)) throw NonPositiveInput("kp table values must be positive");
    KpFunction f;
    f.kind_ = Kind::Table;
    f.p_nodes_ = std::move(p);
    f.q_nodes_ = std::move(q);
    f.values_ = std::move(values);
    return f;
  }

  static KpFunction callback(std::function<double(double, double)> fn) {
    KpFunction f;
    f.kind_ = Kind::Callback;
    f.fn_ = std::move(fn);
    return f;
  }

  double operator()(double p, double q) const {
    switch (kind_) {
      case Kind::Constant:
        return value_;
      case Kind::Callback:
        return fn_(p, q);
      case Kind::Table: {
        auto [i, tp] = detail::locate_loglog(p_nodes_, p);
        auto [j, tq] = detail::locate_loglog(q_nodes_, q);
        auto lv = [&](std::size_t a, std::size_t b) {
          return std::log(values_[a][b]);
        };
        const std::size_t i1 = p_nodes_.size() == 1 ? i : i + 1;
        const std::size_t j1 = q_nodes_.size() == 1 ? j : j + 1;
        const double v = (1 - tp) * ((1 - tq) * lv(i, j) + tq * lv(i, j1)) +
                         tp * ((1 - tq) * lv(i1, j) + tq * lv(i1, j1));
        return std::exp(v);
      }
    }
    return value_;
  }

  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::Constant:
        return {{"kind", "constant"}, {"value", value_}};
      case Kind::Table:
        return {{"kind", "table"}, {"p", p_nodes_}, {"q", q_nodes_}, {"values", values_}};
      case Kind::Callback:
        return {{"kind", "callback"}};
    }
    return {};
  }

 private:
  enum class Kind { Constant, Table, Callback };
  Kind kind_ = Kind::Constant;
  double value_ = 1.0;
  std::vector<double> p_nodes_, q_nodes_;
  std::vector<std::vector<double>> values_;
  std::function<double(double, double)> fn_;
};

/// Lipschitz constant K_L(s, p). Tables are over p for the transfer's fixed s.
class KlFunction {
 public:
  static KlFunction constant(double v) {
    if (!(v > 0.0)) throw NonPositiveInput("kl constant must be positive");
    KlFunction f;
    f.value_ = v;
    f.kind_ = Kind::Constant;
    return f;
  }

  static KlFunction table(std::vector<double> p, std::vector<double> values) {
    if (p.empty() || p.size() != values.size())
      throw ParseError("kl table needs matching p and value lists");
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!(p[k] >= 1.0)) throw OutOfDomain("kl table nodes must be >= 1");
      if (k > 0 && !(p[k] > p[k - 1]))
        throw ParseError("kl table nodes must be strictly increasing");
      if (!(values[k] > 0.0)) throw NonPositiveInput("kl table values must be positive");
    }
    KlFunction f;
    f.kind_ = Kind::Table;
    f.p_nodes_ = std::move(p);
    f.values_ = std::move(values);
    return f;
  }

  static KlFunction callback(std::function<double(double, double)> fn) {
    KlFunction f;
    f.kind_ = Kind::Callback;
    f.fn_ = std::move(fn);
    return f;
  }

  double operator()(double s, double p) const {
    switch (kind_) {
      case Kind::Constant:
        return value_;
      case Kind::Callback:
        return fn_(s, p);
      case Kind::Table: {
        auto [i, t] = detail::locate_loglog(p_nodes_, p);
        if (p_nodes_.size() == 1) return values_[i];
        return std::exp((1 - t) * std::log(values_[i]) +
                        t * std::log(values_[i + 1]));
      }
    }
    return value_;
  }

  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::Constant:
        return {{"kind", "constant"}, {"value", value_}};
      case Kind::Table:
        return {{"kind", "table"}, {"p", p_nodes_}, {"values", values_}};
      case Kind::Callback:
        return {{"kind", "callback"}};
    }
    return {};
  }

 private:
  enum class Kind { Constant, Table, Callback };
  Kind kind_ = Kind::Constant;
  double value_ = 1.0;
  std::vector<double> p_nodes_;
  std::vector<double> values_;
  std::function<double(double, double)> fn_;
};

/// Transfer data for the Poincare verifiers: the constants K_P and K_L, the
/// space order s, and the optional factorization R(p) V(q) plus zeta(q).
struct TransferSpec {
  KpFunction kp = KpFunction::constant(1.0);
  KlFunction kl = KlFunction::constant(1.0);
  std::optional<PsiSpec> r_factor;
  std::optional<PsiSpec> v_factor;
  std::optional<PsiSpec> zeta;
  double s = 2.0;
};

/// Definition-3.1 membership check: kp(p, q) <= R(p) V(q) on the grid.
inline void validate_afe(const TransferSpec& t, const std::vector<double>& p_grid,
                         const std::vector<double>& q_grid, double tol = 1e-9) {
  if (!t.r_factor || !t.v_factor)
    throw ConfigError("factorable estimation needs r_factor and v_factor");
  for (double p : p_grid)
    for (double q : q_grid) {
      const double lhs = t.kp(p, q);
      const double rhs = t.r_factor->eval(p) * t.v_factor->eval(q);
      if (lhs > rhs * (1.0 + tol))
        throw AfeViolated("kp(" + std::to_string(p) + "," + std::to_string(q) +
                          ") = " + std::to_string(lhs) + " exceeds R*V = " +
                          std::to_string(rhs));
    }
}

}  // namespace gp
