#include <catch2/catch_amalgamated.hpp>

#include "grandpoincare/grandpoincare.hpp"
#include "testutil.hpp"

using namespace gp;
using Catch::Approx;

TEST_CASE("edge builder on tiny graphs") {
  SECTION("single edge") {
    auto sp = MetricMeasureSpace::from_edges(2, {{0, 1, 1.0}}, {0.5, 0.5});
    CHECK(sp.dist(0, 1) == 1.0);
    CHECK(sp.diam() == 1.0);
    CHECK(sp.total_mass() == 1.0);
  }
  SECTION("unit 3-path") {
    auto sp = tu::unit_path(3);
    CHECK(sp.dist(0, 2) == 2.0);
    CHECK(sp.diam() == 2.0);
    CHECK(sp.total_mass() == 3.0);
  }
  SECTION("shortest path beats a direct long edge") {
    auto sp = MetricMeasureSpace::from_edges(
        3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}}, {1, 1, 1});
    CHECK(sp.dist(0, 2) == 2.0);  // hand-run shortest-path oracle
    CHECK(sp.diam() == 2.0);
  }
}

TEST_CASE("edge builder errors") {
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(3, {{0, 1, 1.0}}, {1, 1, 1}),
                  DisconnectedGraph);
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(2, {{0, 1, 0.0}}, {1, 1}),
                  NonPositiveInput);
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(2, {{0, 1, -2.0}}, {1, 1}),
                  NonPositiveInput);
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(2, {{0, 1, 1.0}}, {1, 0}),
                  NonPositiveInput);
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(1, {}, {1}), NonPositiveInput);
  CHECK_THROWS_AS(MetricMeasureSpace::from_edges(2, {{0, 5, 1.0}}, {1, 1}),
                  IndexOutOfRange);
}

TEST_CASE("trees reproduce hop-count distances") {
  for (uint64_t seed : {11u, 12u, 13u, 14u}) {
    Rng rng(seed);
    const int n = 3 + rng.uniform_int(0, 12);
    std::vector<MetricMeasureSpace::Edge> edges;
    std::vector<std::vector<int>> adj(n);
    for (int v = 1; v < n; ++v) {
      const int parent = rng.uniform_int(0, v - 1);
      edges.push_back({parent, v, 1.0});
      adj[parent].push_back(v);
      adj[v].push_back(parent);
    }
    auto sp = MetricMeasureSpace::from_edges(n, edges, std::vector<double>(n, 1.0));
    // BFS oracle
    for (int src = 0; src < n; ++src) {
      std::vector<int> hop(n, -1);
      std::vector<int> queue = {src};
      hop[src] = 0;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        for (int w : adj[queue[h]])
          if (hop[w] < 0) {
            hop[w] = hop[queue[h]] + 1;
            queue.push_back(w);
          }
      }
      for (int j = 0; j < n; ++j) CHECK(sp.dist(src, j) == double(hop[j]));
    }
  }
}

TEST_CASE("interval grids") {
  SECTION("two points, 1-D") {
    auto sp = MetricMeasureSpace::interval_grid(2, 1, true);
    CHECK(sp.size() == 2);
    CHECK(sp.dist(0, 1) == 1.0);
    CHECK(sp.weight(0) == 0.5);
    CHECK(sp.weight(1) == 0.5);
  }
  SECTION("three points, 1-D, normalized") {
    auto sp = MetricMeasureSpace::interval_grid(3, 1, true);
    CHECK(sp.diam() == 1.0);
    CHECK(sp.total_mass() == Approx(1.0).epsilon(1e-15));
  }
  SECTION("3x3 lattice") {
    auto sp = MetricMeasureSpace::interval_grid(3, 2, true);
    CHECK(sp.size() == 9);
    CHECK(sp.diam() == Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  SECTION("caps and domain") {
    CHECK_THROWS_AS(MetricMeasureSpace::interval_grid(3, 2, true, 8), SizeOverflow);
    CHECK_THROWS_AS(MetricMeasureSpace::interval_grid(3, 4, true), OutOfDomain);
    CHECK_THROWS_AS(MetricMeasureSpace::interval_grid(1, 1, true), NonPositiveInput);
  }
}

TEST_CASE("builder outputs satisfy the metric axioms") {
  for (uint64_t seed = 21; seed < 29; ++seed) {
    auto sp = tu::random_graph(seed, 12);
    CHECK_NOTHROW(sp.validate_metric());
    double maxd = 0.0;
    for (int i = 0; i < sp.size(); ++i)
      for (int j = 0; j < sp.size(); ++j) maxd = std::max(maxd, sp.dist(i, j));
    CHECK(sp.diam() == maxd);
  }
}

TEST_CASE("ball measure") {
  auto sp = tu::two_point();
  CHECK(sp.ball_measure(0, 0.5) == 0.5);
  CHECK(sp.ball_measure(0, 1.0) == 1.0);
  auto path = tu::unit_path(3);
  CHECK(path.ball_measure(1, 1.0) == 3.0);
  CHECK_THROWS_AS(path.ball_measure(7, 1.0), IndexOutOfRange);

  SECTION("nondecreasing in r, reaching the total mass") {
    auto g = tu::random_graph(31, 10);
    for (int c = 0; c < g.size(); ++c) {
      double prev = 0.0;
      for (double r = 0.0; r <= g.diam() + 0.1; r += g.diam() / 17.0) {
        const double m = g.ball_measure(c, r);
        CHECK(m >= prev);
        prev = m;
      }
      CHECK(g.ball_measure(c, g.diam()) == Approx(g.total_mass()).epsilon(1e-12));
    }
  }
}

TEST_CASE("space descriptor loading") {
  SECTION("matrix descriptor") {
    nlohmann::json desc = {{"dist_matrix", {{0.0, 1.0}, {1.0, 0.0}}},
                           {"weights", {1.0, 1.0}}};
    auto sp = load_space(desc);
    CHECK(sp.diam() == 1.0);
    CHECK(sp.total_mass() == 2.0);
  }
  SECTION("triangle violation reports the offending triple") {
    nlohmann::json desc = {
        {"dist_matrix", {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}}},
        {"weights", {1.0, 1.0, 1.0}}};
    try {
      load_space(desc);
      FAIL("expected MetricViolation");
    } catch (const MetricViolation& e) {
      CHECK(e.i() == 0);
      CHECK(e.j() == 2);
      CHECK(e.k() == 1);
    }
  }
  SECTION("rejections") {
    CHECK_THROWS_AS(load_space({{"dist_matrix", {{0.0, 1.0}, {1.0, 0.0}}},
                                {"weights", {1.0, 0.0}}}),
                    NonPositiveInput);
    CHECK_THROWS_AS(load_space({{"weights", {1.0, 1.0}}}), ParseError);
    CHECK_THROWS_AS(load_space({{"dist_matrix", {{0.0, 1.0}, {1.0, 0.0}}},
                                {"edges", {{0, 1, 1.0}}},
                                {"weights", {1.0, 1.0}}}),
                    ParseError);
    CHECK_THROWS_AS(load_space(nlohmann::json::parse("[1,2,3]")), ParseError);
  }
  SECTION("edge descriptor with normalization") {
    nlohmann::json desc = {{"points", {"a", "b", "c"}},
                           {"edges", {{0, 1, 1.0}, {1, 2, 1.0}}},
                           {"weights", {1.0, 1.0, 2.0}},
                           {"normalize_measure", true}};
    auto sp = load_space(desc);
    CHECK(sp.total_mass() == Approx(1.0).epsilon(1e-15));
    CHECK(sp.names()[2] == "c");
  }
  SECTION("weights keep full precision") {
    nlohmann::json desc = {{"dist_matrix", {{0.0, 1.0}, {1.0, 0.0}}},
                           {"weights", {0.12345678901234567, 1.0}}};
    auto sp = load_space(desc);
    CHECK(sp.weight(0) == 0.12345678901234567);
  }
}

TEST_CASE("order estimation") {
  SECTION("1-D path has order about 1") {
    auto sp = tu::unit_path(512);
    std::vector<int> centers = {128, 256, 384};
    std::vector<double> radii = {4, 8, 16, 32, 64};
    OrderEstimate est = estimate_order(sp, radii, centers);
    CHECK(est.s > 0.8);
    CHECK(est.s < 1.2);
    CHECK(est.c_lower <= est.c_upper);
    CHECK_FALSE(est.samples.empty());

    // cross-check against a plain least-squares fit of the same samples
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : est.samples) {
      const double x = std::log(s.radius), y = std::log(s.mass);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = double(est.samples.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(est.s == Approx(slope).epsilon(1e-10));
  }
  SECTION("2-D grid has order about 2") {
    auto sp = MetricMeasureSpace::interval_grid(64, 2, true);
    const int c = 31 * 64 + 31;  // interior lattice point
    std::vector<double> radii = {4.0 / 63, 8.0 / 63, 12.0 / 63, 16.0 / 63};
    OrderEstimate est = estimate_order(sp, radii, {c, c - 64, c + 1});
    CHECK(est.s > 1.7);
    CHECK(est.s < 2.3);
    CHECK_FALSE(est.flagged);
  }
  SECTION("degenerate and insufficient input") {
    auto sp = tu::unit_path(4);
    CHECK_THROWS_AS(estimate_order(sp, {5.0, 6.0, 7.0}, {0}), DegenerateRadii);
    CHECK_THROWS_AS(estimate_order(sp, {1.0, 2.0}, {0}), InsufficientSamples);
    CHECK_THROWS_AS(estimate_order(sp, {1.0, 1.5, 2.0}, {}), InsufficientSamples);
    CHECK_THROWS_AS(estimate_order(sp, {1.0, 1.5, 2.0}, {9}), IndexOutOfRange);
  }
  SECTION("slopes at or below 1 are flagged, not fatal") {
    // all balls grow identically fast at these radii on a 2-point-mass scale
    auto sp = tu::unit_path(64);
    OrderEstimate est = estimate_order(sp, {4, 8, 16}, {32});
    CHECK(est.s < 1.2);
    if (est.s <= 1.0) CHECK(est.flagged);
  }
}

TEST_CASE("normalized copies") {
  auto sp = tu::unit_path(5);
  auto np = sp.normalized();
  CHECK(np.total_mass() == Approx(1.0).epsilon(1e-15));
  CHECK(np.diam() == sp.diam());
  CHECK(np.id() != sp.id());
}
