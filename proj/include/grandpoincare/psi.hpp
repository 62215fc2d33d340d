#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "grandpoincare/errors.hpp"

namespace gp {

/// Generator function psi in Psi(b): positive weight on the exponent interval
/// [1, b). Families: (b-p)^{-beta} blowup, p^beta growth, the formal spike
/// that recovers L_r, tabulated values (natural functions), and constants.
class PsiSpec {
 public:
  enum class Kind { PowerBlowup, PolynomialGrowth, Spike, Tabulated, Constant };

  static PsiSpec power_blowup(double b, double beta) {
    if (!(b > 1.0) || std::isinf(b)) throw InvalidPsi("power_blowup needs finite b > 1");
    if (!(beta > 0.0)) throw InvalidPsi("power_blowup needs beta > 0");
    PsiSpec s(Kind::PowerBlowup);
    s.b_ = b;
    s.beta_ = beta;
    return s;
  }

  static PsiSpec polynomial_growth(double beta) {
    if (!(beta > 0.0)) throw InvalidPsi("polynomial_growth needs beta > 0");
    PsiSpec s(Kind::PolynomialGrowth);
    s.b_ = std::numeric_limits<double>::infinity();
    s.beta_ = beta;
    return s;
  }

  static PsiSpec spike(double r) {
    if (!(r > 1.0) || std::isinf(r)) throw InvalidPsi("spike needs finite r > 1");
    PsiSpec s(Kind::Spike);
    s.b_ = std::numeric_limits<double>::infinity();
    s.r_ = r;
    return s;
  }

  static PsiSpec tabulated(std::vector<double> p, std::vector<double> values) {
    if (p.empty() || p.size() != values.size())
      throw InvalidPsi("tabulated needs matching nonempty p and value lists");
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!(p[k] >= 1.0) || std::isinf(p[k]))
        throw InvalidPsi("tabulated p grid must be finite and >= 1");
      if (k > 0 && !(p[k] > p[k - 1]))
        throw InvalidPsi("tabulated p grid must be strictly increasing");
      if (!(values[k] > 0.0) || std::isinf(values[k]))
        throw InvalidPsi("tabulated values must be finite and positive");
    }
    PsiSpec s(Kind::Tabulated);
    s.lower_ = p.front();
    s.b_ = p.back();
    s.nodes_ = std::move(p);
    s.node_values_ = std::move(values);
    return s;
  }

  static PsiSpec constant(double value,
                          double b = std::numeric_limits<double>::infinity()) {
    if (!(value > 0.0)) throw InvalidPsi("constant psi must be positive");
    if (!(b > 1.0)) throw InvalidPsi("constant psi needs b > 1");
    PsiSpec s(Kind::Constant);
    s.b_ = b;
    s.value_ = value;
    return s;
  }

  Kind kind() const { return kind_; }
  double b() const { return b_; }
  double lower() const { return lower_; }
  bool is_spike() const { return kind_ == Kind::Spike; }
  double spike_point() const { return r_; }
  bool is_tabulated() const { return kind_ == Kind::Tabulated; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& node_values() const { return node_values_; }
  double param_beta() const { return beta_; }
  double param_value() const { return value_; }

  /// psi(p). Domain is [lower, b); the right endpoint is admitted when the
  /// limit there is finite (tabulated and constant kinds). Spikes evaluate
  /// everywhere: 1 at r, infinity off it (Remark-style C/inf = 0 convention).
  double eval(double p) const {
    switch (kind_) {
      case Kind::PowerBlowup:
        if (p < lower_ || p >= b_) throw OutOfDomain("psi exponent outside [1, b)");
        return std::pow(b_ - p, -beta_);
      case Kind::PolynomialGrowth:
        if (p < lower_ || std::isinf(p)) throw OutOfDomain("psi exponent outside [1, inf)");
        return std::pow(p, beta_);
      case Kind::Spike:
        return p == r_ ? 1.0 : std::numeric_limits<double>::infinity();
      case Kind::Constant:
        if (p < lower_ || p > b_) throw OutOfDomain("psi exponent outside [1, b]");
        return value_;
      case Kind::Tabulated: {
        if (p < nodes_.front() || p > nodes_.back())
          throw OutOfDomain("tabulated psi does not extrapolate");
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), p);
        std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
        if (k < nodes_.size() && nodes_[k] == p) return node_values_[k];
        // log-log linear between neighboring nodes
        const double x0 = std::log(nodes_[k - 1]);
        const double x1 = std::log(nodes_[k]);
        const double t = (std::log(p) - x0) / (x1 - x0);
        return std::exp((1.0 - t) * std::log(node_values_[k - 1]) +
                        t * std::log(node_values_[k]));
      }
    }
    throw OutOfDomain("unreachable psi kind");
  }

  /// psi at p, substituting the one-sided limit where the plain value is not
  /// defined; +inf signals an unbounded edge (no endpoint candidate there).
  double edge_value(double p) const {
    switch (kind_) {
      case Kind::PowerBlowup:
        if (p >= b_) return std::numeric_limits<double>::infinity();
        return eval(p);
      case Kind::PolynomialGrowth:
        if (std::isinf(p)) return std::numeric_limits<double>::infinity();
        return eval(p);
      case Kind::Spike:
        return eval(p);
      case Kind::Constant:
        return value_;
      case Kind::Tabulated:
        return eval(std::clamp(p, nodes_.front(), nodes_.back()));
    }
    return std::numeric_limits<double>::infinity();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    switch (kind_) {
      case Kind::PowerBlowup:
        j["kind"] = "power_blowup";
        j["b"] = b_;
        j["beta"] = beta_;
        break;
      case Kind::PolynomialGrowth:
        j["kind"] = "polynomial_growth";
        j["beta"] = beta_;
        break;
      case Kind::Spike:
        j["kind"] = "spike";
        j["r"] = r_;
        break;
      case Kind::Constant:
        j["kind"] = "constant";
        j["value"] = value_;
        if (!std::isinf(b_)) j["b"] = b_;
        break;
      case Kind::Tabulated:
        j["kind"] = "tabulated";
        j["p"] = nodes_;
        j["values"] = node_values_;
        break;
    }
    return j;
  }

 private:
  explicit PsiSpec(Kind k) : kind_(k) {}

  Kind kind_;
  double lower_ = 1.0;
  double b_ = std::numeric_limits<double>::infinity();
  double beta_ = 0.0;
  double r_ = 0.0;
  double value_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> node_values_;
};

}  // namespace gp
