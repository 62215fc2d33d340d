#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grandpoincare/errors.hpp"
#include "grandpoincare/numeric.hpp"

namespace gp {

/// Finite metric measure space: point set, distance matrix, positive weights.
/// Immutable after construction; all accessors are pure reads.
class MetricMeasureSpace {
 public:
  struct Edge {
    int i;
    int j;
    double length;
  };

  static MetricMeasureSpace from_edges(int n, const std::vector<Edge>& edges,
                                       std::vector<double> weights,
                                       std::vector<std::string> names = {}) {
    if (n < 2) throw NonPositiveInput("space needs at least 2 points");
    check_weights(weights, n);
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const Edge& e : edges) {
      if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
        throw IndexOutOfRange("edge endpoint out of range");
      if (e.i == e.j)
        throw MetricViolation(e.i, e.j, e.i, "self-loop edge is not a metric edge");
      if (!(e.length > 0.0))
        throw NonPositiveInput("edge length must be positive");
      adj[e.i].emplace_back(e.j, e.length);
      adj[e.j].emplace_back(e.i, e.length);
    }
    // All-pairs shortest paths, one Dijkstra per source.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(n) * n, inf);
    for (int src = 0; src < n; ++src) {
      std::vector<double> d(n, inf);
      d[src] = 0.0;
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0.0, src});
      while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (auto [w, len] : adj[v]) {
          const double cand = dv + len;
          if (cand < d[w]) {
            d[w] = cand;
            pq.push({cand, w});
          }
        }
      }
      for (int j = 0; j < n; ++j) dist[static_cast<std::size_t>(src) * n + j] = d[j];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::isinf(dist[static_cast<std::size_t>(i) * n + j]))
          throw DisconnectedGraph("points " + std::to_string(i) + " and " +
                                  std::to_string(j) + " are not connected");
    // Same-path sums can round differently from the two ends; keep the metric
    // exactly symmetric.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const std::size_t a = static_cast<std::size_t>(i) * n + j;
        const std::size_t b = static_cast<std::size_t>(j) * n + i;
        const double m = std::min(dist[a], dist[b]);
        dist[a] = m;
        dist[b] = m;
      }
    MetricMeasureSpace s(n, std::move(dist), std::move(weights), std::move(names));
    s.adjacency_.resize(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> nb;
      nb.reserve(adj[i].size());
      for (auto [j, len] : adj[i]) nb.push_back(j);
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      s.adjacency_[i] = std::move(nb);
    }
    s.has_adjacency_ = true;
    return s;
  }

  static MetricMeasureSpace from_matrix(int n, std::vector<double> dist,
                                        std::vector<double> weights,
                                        std::vector<std::string> names = {}) {
    if (n < 2) throw NonPositiveInput("space needs at least 2 points");
    if (dist.size() != static_cast<std::size_t>(n) * n)
      throw ParseError("distance matrix must be n x n");
    check_weights(weights, n);
    MetricMeasureSpace s(n, std::move(dist), std::move(weights), std::move(names));
    s.validate_metric();
    return s;
  }

  /// Regular lattice in [0,1]^dim with Euclidean distances. Weight per point is
  /// (1/(n-1))^dim, rescaled to total mass 1 when normalize_measure is set.
  static MetricMeasureSpace interval_grid(int n, int dim, bool normalize_measure,
                                          long long point_cap = 100000) {
    if (n < 2) throw NonPositiveInput("grid needs n >= 2 per axis");
    if (dim < 1 || dim > 3) throw OutOfDomain("grid dim must be 1, 2, or 3");
    long long total = 1;
    for (int k = 0; k < dim; ++k) total *= n;
    if (total > point_cap)
      throw SizeOverflow("grid has " + std::to_string(total) +
                         " points, cap is " + std::to_string(point_cap));
    const int m = static_cast<int>(total);
    const double h = 1.0 / (n - 1);
    std::vector<double> coords(static_cast<std::size_t>(m) * dim);
    for (int idx = 0; idx < m; ++idx) {
      int rest = idx;
      for (int k = 0; k < dim; ++k) {
        coords[static_cast<std::size_t>(idx) * dim + k] = (rest % n) * h;
        rest /= n;
      }
    }
    std::vector<double> dist(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double sq = 0.0;
        for (int k = 0; k < dim; ++k) {
          const double d = coords[static_cast<std::size_t>(i) * dim + k] -
                           coords[static_cast<std::size_t>(j) * dim + k];
          sq += d * d;
        }
        const double d = std::sqrt(sq);
        dist[static_cast<std::size_t>(i) * m + j] = d;
        dist[static_cast<std::size_t>(j) * m + i] = d;
      }
    double w = std::pow(h, dim);
    if (normalize_measure) w = 1.0 / m;
    std::vector<double> weights(m, w);
    MetricMeasureSpace s(m, std::move(dist), std::move(weights), {});
    s.coords_ = std::move(coords);
    s.coord_dim_ = dim;
    // Lattice adjacency: +-1 along each axis.
    s.adjacency_.resize(m);
    for (int idx = 0; idx < m; ++idx) {
      int stride = 1;
      int rest = idx;
      for (int k = 0; k < dim; ++k) {
        const int c = rest % n;
        if (c > 0) s.adjacency_[idx].push_back(idx - stride);
        if (c + 1 < n) s.adjacency_[idx].push_back(idx + stride);
        rest /= n;
        stride *= n;
      }
      std::sort(s.adjacency_[idx].begin(), s.adjacency_[idx].end());
    }
    s.has_adjacency_ = true;
    return s;
  }

  int size() const { return n_; }
  double dist(int i, int j) const {
    return dist_[static_cast<std::size_t>(i) * n_ + j];
  }
  double weight(int i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  double diam() const { return diam_; }
  double min_positive_distance() const { return min_pos_dist_; }
  uint64_t id() const { return id_; }
  const std::vector<std::string>& names() const { return names_; }

  bool has_adjacency() const { return has_adjacency_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
  bool has_coordinates() const { return coord_dim_ > 0; }
  int coord_dim() const { return coord_dim_; }
  double coordinate(int point, int axis) const {
    return coords_[static_cast<std::size_t>(point) * coord_dim_ + axis];
  }

  /// Mass of the closed ball B(center, r); the center always counts.
  double ball_measure(int center, double r) const {
    if (center < 0 || center >= n_) throw IndexOutOfRange("ball center out of range");
    CompensatedSum mass;
    for (int j = 0; j < n_; ++j) {
      if (j == center || dist(center, j) <= r) mass.add(weights_[j]);
    }
    return mass.value();
  }

  /// Copy with the measure rescaled to total mass 1 (fresh identity).
  MetricMeasureSpace normalized() const {
    std::vector<double> w = weights_;
    for (double& x : w) x /= total_mass_;
    MetricMeasureSpace s(n_, dist_, std::move(w), names_);
    s.adjacency_ = adjacency_;
    s.has_adjacency_ = has_adjacency_;
    s.coords_ = coords_;
    s.coord_dim_ = coord_dim_;
    return s;
  }

  bool is_probability(double rel_tol = 1e-12) const {
    return std::abs(total_mass_ - 1.0) <= rel_tol;
  }

  /// Full metric-axiom check; throws MetricViolation with the offending triple.
  /// Tolerance is absolute on distances normalized by the diameter.
  void validate_metric(double rel_tol = 1e-12) const {
    const double tol = rel_tol * diam_;
    for (int i = 0; i < n_; ++i) {
      if (dist(i, i) != 0.0)
        throw MetricViolation(i, i, i, "nonzero diagonal entry at point " +
                                           std::to_string(i));
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        if (!(dist(i, j) > 0.0))
          throw MetricViolation(i, j, i,
                                "distance between distinct points " +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    " is not positive");
        if (std::abs(dist(i, j) - dist(j, i)) > tol)
          throw MetricViolation(i, j, i, "distance matrix is not symmetric at (" +
                                             std::to_string(i) + "," +
                                             std::to_string(j) + ")");
      }
    }
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        for (int k = 0; k < n_; ++k) {
          if (k == i || k == j) continue;
          if (dist(i, j) > dist(i, k) + dist(k, j) + tol)
            throw MetricViolation(
                i, j, k, "triangle inequality fails for triple (" +
                             std::to_string(i) + "," + std::to_string(j) + "," +
                             std::to_string(k) + ")");
        }
      }
  }

 private:
  MetricMeasureSpace(int n, std::vector<double> dist, std::vector<double> weights,
                     std::vector<std::string> names)
      : n_(n),
        dist_(std::move(dist)),
        weights_(std::move(weights)),
        names_(std::move(names)),
        id_(next_id()) {
    if (names_.empty()) {
      names_.reserve(n_);
      for (int i = 0; i < n_; ++i) names_.push_back(std::to_string(i));
    } else if (names_.size() != static_cast<std::size_t>(n_)) {
      throw ParseError("points list size does not match weight count");
    }
    CompensatedSum mass;
    for (double w : weights_) mass.add(w);
    total_mass_ = mass.value();
    diam_ = 0.0;
    min_pos_dist_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const double d = dist_[static_cast<std::size_t>(i) * n_ + j];
        diam_ = std::max(diam_, d);
        if (d > 0.0) min_pos_dist_ = std::min(min_pos_dist_, d);
      }
    if (!(diam_ > 0.0))
      throw MetricViolation(0, 1, 0, "space has zero diameter");
  }

  static void check_weights(const std::vector<double>& w, int n) {
    if (w.size() != static_cast<std::size_t>(n))
      throw ParseError("weight count does not match point count");
    for (double x : w)
      if (!(x > 0.0)) throw NonPositiveInput("weights must be strictly positive");
  }

  static uint64_t next_id() {
    static std::atomic<uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  int n_;
  std::vector<double> dist_;
  std::vector<double> weights_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<double> coords_;
  int coord_dim_ = 0;
  bool has_adjacency_ = false;
  double total_mass_ = 0.0;
  double diam_ = 0.0;
  double min_pos_dist_ = 0.0;
  uint64_t id_;
};

/// Order (Ahlfors-type) estimate from pooled log-log regression of ball masses.
struct BallSample {
  int center;
  double radius;
  double mass;
};

struct OrderEstimate {
  double s = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double fit_residual = 0.0;
  bool flagged = false;  // set when the fitted slope is <= 1
  std::vector<BallSample> samples;
};

inline OrderEstimate estimate_order(const MetricMeasureSpace& space,
                                    const std::vector<double>& radii,
                                    const std::vector<int>& centers) {
  if (centers.empty()) throw InsufficientSamples("at least one center required");
  for (int c : centers)
    if (c < 0 || c >= space.size()) throw IndexOutOfRange("center out of range");
  std::vector<double> rs;
  for (double r : radii)
    if (r > 0.0) rs.push_back(r);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  if (rs.size() < 3)
    throw InsufficientSamples("need at least 3 distinct positive radii");

  OrderEstimate est;
  for (int c : centers)
    for (double r : rs) est.samples.push_back({c, r, space.ball_measure(c, r)});

  double mmin = est.samples.front().mass, mmax = mmin;
  for (const auto& s : est.samples) {
    mmin = std::min(mmin, s.mass);
    mmax = std::max(mmax, s.mass);
  }
  if (mmin == mmax)
    throw DegenerateRadii("all ball masses identical; slope undefined");

  // Least squares of log(mass) on log(r), pooled over all samples.
  CompensatedSum sx, sy, sxx, sxy;
  const auto m = static_cast<double>(est.samples.size());
  for (const auto& s : est.samples) {
    const double x = std::log(s.radius);
    const double y = std::log(s.mass);
    sx.add(x);
    sy.add(y);
    sxx.add(x * x);
    sxy.add(x * y);
  }
  const double denom = m * sxx.value() - sx.value() * sx.value();
  if (denom == 0.0) throw DegenerateRadii("radii do not vary; slope undefined");
  const double slope = (m * sxy.value() - sx.value() * sy.value()) / denom;
  const double intercept = (sy.value() - slope * sx.value()) / m;

  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -std::numeric_limits<double>::infinity();
  CompensatedSum rsq;
  for (const auto& s : est.samples) {
    const double e = std::log(s.mass) - (intercept + slope * std::log(s.radius));
    rmin = std::min(rmin, e);
    rmax = std::max(rmax, e);
    rsq.add(e * e);
  }
  est.s = slope;
  est.c_lower = std::exp(intercept + rmin);
  est.c_upper = std::exp(intercept + rmax);
  est.fit_residual = std::sqrt(rsq.value() / m);
  est.flagged = !(slope > 1.0);
  return est;
}

/// Parses the JSON space descriptor: `points` (optional names), exactly one of
/// `dist_matrix` or `edges`, `weights`, optional `normalize_measure`.
inline MetricMeasureSpace load_space(const nlohmann::json& desc) {
  if (!desc.is_object()) throw ParseError("space descriptor must be an object");
  const bool has_matrix = desc.contains("dist_matrix");
  const bool has_edges = desc.contains("edges");
  if (has_matrix == has_edges)
    throw ParseError("descriptor needs exactly one of dist_matrix or edges");
  if (!desc.contains("weights") || !desc["weights"].is_array())
    throw ParseError("descriptor needs a weights array");

  std::vector<double> weights;
  for (const auto& w : desc["weights"]) {
    if (!w.is_number()) throw ParseError("weights must be numbers");
    weights.push_back(w.get<double>());
  }
  const int n = static_cast<int>(weights.size());

  std::vector<std::string> names;
  if (desc.contains("points")) {
    if (!desc["points"].is_array()) throw ParseError("points must be an array");
    for (const auto& p : desc["points"]) names.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    if (static_cast<int>(names.size()) != n)
      throw ParseError("points list size does not match weight count");
  }

  MetricMeasureSpace space = [&]() {
    if (has_matrix) {
      const auto& mat = desc["dist_matrix"];
      if (!mat.is_array() || static_cast<int>(mat.size()) != n)
        throw ParseError("dist_matrix must be an n x n array of arrays");
      std::vector<double> dist;
      dist.reserve(static_cast<std::size_t>(n) * n);
      for (const auto& row : mat) {
        if (!row.is_array() || static_cast<int>(row.size()) != n)
          throw ParseError("dist_matrix must be an n x n array of arrays");
        for (const auto& v : row) {
          if (!v.is_number()) throw ParseError("dist_matrix entries must be numbers");
          dist.push_back(v.get<double>());
        }
      }
      return MetricMeasureSpace::from_matrix(n, std::move(dist), weights, names);
    }
    std::vector<MetricMeasureSpace::Edge> edges;
    for (const auto& e : desc["edges"]) {
      if (!e.is_array() || e.size() != 3)
        throw ParseError("edges must be [i, j, length] triples");
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return MetricMeasureSpace::from_edges(n, edges, weights, names);
  }();

  if (desc.value("normalize_measure", false)) return space.normalized();
  return space;
}

}  // namespace gp
