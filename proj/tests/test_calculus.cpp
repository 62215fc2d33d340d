#include <catch2/catch_amalgamated.hpp>

#include "grandpoincare/grandpoincare.hpp"
#include "testutil.hpp"

using namespace gp;
using Catch::Approx;

TEST_CASE("weighted average") {
  auto sp = tu::two_point();
  CHECK(average(sp, ScalarField(sp, {3.0, 3.0})) == 3.0);
  CHECK(average(sp, ScalarField(sp, {2.0, 4.0})) == 3.0);
  auto sp13 = tu::two_point(1.0, 1.0, 3.0);
  CHECK(average(sp13, ScalarField(sp13, {0.0, 4.0})) == 3.0);

  SECTION("centered fields average to zero") {
    for (uint64_t seed = 40; seed < 48; ++seed) {
      auto g = tu::random_graph(seed, 14);
      auto u = tu::random_field(g, seed * 3 + 1);
      double umax = 0.0;
      for (double v : u.values()) umax = std::max(umax, std::abs(v));
      CHECK(std::abs(average(g, centered(g, u))) <= 1e-12 * umax);
    }
  }
  SECTION("mismatched field") {
    auto other = tu::two_point();
    ScalarField u(other, {1.0, 2.0});
    CHECK_THROWS_AS(average(sp, u), FieldSpaceMismatch);
  }
}

TEST_CASE("lp norms") {
  auto sp = tu::two_point();  // probability space
  SECTION("indicator of mass 1/2 at p = 2") {
    auto f = indicator_field(sp, {0});
    CHECK(lp_norm(sp, f, Exponent(2.0)) == Approx(std::sqrt(0.5)).epsilon(1e-15));
  }
  SECTION("constants and the sup norm") {
    ScalarField c(sp, {-2.5, -2.5});
    for (double p : {1.0, 2.0, 7.0})
      CHECK(lp_norm(sp, c, Exponent(p)) == Approx(2.5).epsilon(1e-14));
    CHECK(lp_norm(sp, c, Exponent::infinity()) == 2.5);
    ScalarField f(sp, {1.0, -4.0});
    CHECK(lp_norm(sp, f, Exponent::infinity()) == 4.0);
  }
  SECTION("invalid exponent") {
    ScalarField f(sp, {1.0, 2.0});
    CHECK_THROWS_AS(lp_norm(sp, f, Exponent(0.5)), InvalidExponent);
  }
  SECTION("zero field") {
    ScalarField z(sp, {0.0, 0.0});
    CHECK(lp_norm(sp, z, Exponent(3.0)) == 0.0);
    CHECK(lp_norm(sp, z, Exponent::infinity()) == 0.0);
  }
  SECTION("log-space path agrees with the plain power sum") {
    // wide magnitude span forces the log-sum-exp branch
    ScalarField f(sp, {1e-6, 1e3});
    const double naive = tu::naive_lp(sp.weights(), f.values(), 2.0);
    CHECK(lp_norm(sp, f, Exponent(2.0)) == Approx(naive).epsilon(1e-13));
    // large p forces it too
    ScalarField g(sp, {0.5, 2.0});
    const double naive70 = tu::naive_lp(sp.weights(), g.values(), 70.0);
    CHECK(lp_norm(sp, g, Exponent(70.0)) == Approx(naive70).epsilon(1e-12));
  }
  SECTION("Lyapunov monotonicity on probability spaces") {
    for (uint64_t seed = 60; seed < 72; ++seed) {
      auto g = tu::random_graph(seed, 10, /*probability=*/true);
      auto f = tu::random_field(g, seed + 5);
      Rng rng(seed);
      double prev = lp_norm(g, f, Exponent(1.0));
      for (double p : {1.3, 2.0, 3.7, 10.0, 64.0}) {
        const double cur = lp_norm(g, f, Exponent(p));
        CHECK(cur >= prev * (1.0 - 1e-12));
        prev = cur;
      }
      CHECK(lp_norm(g, f, Exponent::infinity()) >= prev * (1.0 - 1e-12));
    }
  }
  SECTION("homogeneity") {
    for (uint64_t seed = 80; seed < 86; ++seed) {
      auto g = tu::random_graph(seed, 9);
      auto f = tu::random_field(g, seed + 2);
      std::vector<double> scaled = f.values();
      for (double& v : scaled) v *= -3.25;
      ScalarField f2(g, scaled);
      for (double p : {1.0, 2.0, 5.5}) {
        CHECK(lp_norm(g, f2, Exponent(p)) ==
              Approx(3.25 * lp_norm(g, f, Exponent(p))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("discrete upper gradient") {
  auto path = tu::unit_path(3);
  SECTION("constants have zero gradient") {
    ScalarField c(path, {5.0, 5.0, 5.0});
    auto g = upper_gradient(path, c, EdgesRule{});
    for (double v : g.values()) CHECK(v == 0.0);
  }
  SECTION("uniform slope") {
    ScalarField u(path, {0.0, 1.0, 2.0});
    auto g = upper_gradient(path, u, EdgesRule{});
    CHECK(g.values() == std::vector<double>{1.0, 1.0, 1.0});
  }
  SECTION("max-slope rule on a tent") {
    ScalarField u(path, {0.0, 1.0, 0.0});
    auto g = upper_gradient(path, u, EdgesRule{});
    CHECK(g.values() == std::vector<double>{1.0, 1.0, 1.0});
  }
  SECTION("radius rule") {
    ScalarField u(path, {0.0, 1.0, 2.0});
    auto g = upper_gradient(path, u, RadiusRule{2.0});
    CHECK(g.values() == std::vector<double>{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(upper_gradient(path, u, RadiusRule{0.5}), IsolatedPoint);
  }
  SECTION("edges rule needs edge structure") {
    nlohmann::json desc = {{"dist_matrix", {{0.0, 1.0}, {1.0, 0.0}}},
                           {"weights", {1.0, 1.0}}};
    auto mat = load_space(desc);
    ScalarField u(mat, {0.0, 1.0});
    CHECK_THROWS_AS(upper_gradient(mat, u, EdgesRule{}), IsolatedPoint);
    CHECK_NOTHROW(upper_gradient(mat, u, AllPairsRule{}));
  }
  SECTION("all-pairs gradient is bounded by the Lipschitz constant") {
    for (uint64_t seed = 90; seed < 98; ++seed) {
      auto sp = tu::random_graph(seed, 11);
      auto u = tu::random_field(sp, seed + 1);
      const double lip = lipschitz_constant(sp, u);
      auto g = upper_gradient(sp, u, AllPairsRule{});
      for (double v : g.values()) CHECK(v <= lip * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("Sobolev seminorm") {
  auto path = tu::unit_path(3);
  ScalarField u(path, {0.0, 1.0, 2.0});
  SECTION("definitional composition, bit for bit") {
    for (double p : {1.0, 2.0, 3.5}) {
      const double direct = sobolev_seminorm(path, u, Exponent(p), EdgesRule{});
      const double composed =
          lp_norm(path, upper_gradient(path, u, EdgesRule{}), Exponent(p));
      CHECK(direct == composed);
    }
  }
  SECTION("hand values on the unit path") {
    CHECK(sobolev_seminorm(path, u, Exponent(1.0), EdgesRule{}) == 3.0);
    CHECK(sobolev_seminorm(path, u, Exponent::infinity(), EdgesRule{}) == 1.0);
    ScalarField c(path, {4.0, 4.0, 4.0});
    CHECK(sobolev_seminorm(path, c, Exponent(2.0), EdgesRule{}) == 0.0);
  }
}

TEST_CASE("modulus of continuity") {
  SECTION("two-point space") {
    auto sp = tu::two_point();
    ScalarField u(sp, {0.0, -2.5});
    auto prof = modulus_of_continuity(sp, u, {0.5, 1.0});
    CHECK(prof.omegas == std::vector<double>{0.0, 2.5});
  }
  SECTION("unit 3-path") {
    auto path = tu::unit_path(3);
    ScalarField u(path, {0.0, 1.0, 2.0});
    auto prof = modulus_of_continuity(path, u, {1.0, 2.0});
    CHECK(prof.omegas == std::vector<double>{1.0, 2.0});
  }
  SECTION("constant fields") {
    auto path = tu::unit_path(3);
    ScalarField c(path, {7.0, 7.0, 7.0});
    auto prof = modulus_of_continuity(path, c, {0.0, 1.0, 2.0});
    for (double w : prof.omegas) CHECK(w == 0.0);
  }
  SECTION("monotone, and omega(diam) spans the range") {
    for (uint64_t seed = 100; seed < 108; ++seed) {
      auto sp = tu::random_graph(seed, 10);
      auto u = tu::random_field(sp, seed + 3);
      std::vector<double> taus;
      for (int k = 0; k <= 10; ++k) taus.push_back(sp.diam() * k / 10.0);
      auto prof = modulus_of_continuity(sp, u, taus);
      for (std::size_t k = 1; k < prof.omegas.size(); ++k)
        CHECK(prof.omegas[k] >= prof.omegas[k - 1]);
      const auto [mn, mx] =
          std::minmax_element(u.values().begin(), u.values().end());
      CHECK(prof.omegas.back() == Approx(*mx - *mn).epsilon(1e-14));
      CHECK(prof.omegas.front() == 0.0);
    }
  }
  SECTION("bad tau lists") {
    auto sp = tu::two_point();
    ScalarField u(sp, {0.0, 1.0});
    CHECK_THROWS_AS(modulus_of_continuity(sp, u, {1.0, 0.5}), OutOfDomain);
    CHECK_THROWS_AS(modulus_of_continuity(sp, u, {-1.0}), OutOfDomain);
  }
}

TEST_CASE("Lipschitz constants") {
  auto sp = tu::two_point(2.0);
  CHECK(lipschitz_constant(sp, ScalarField(sp, {0.0, 0.0})) == 0.0);
  CHECK(lipschitz_constant(sp, ScalarField(sp, {0.0, 3.0})) == 1.5);
  auto path = tu::unit_path(3);
  CHECK(lipschitz_constant(path, ScalarField(path, {0.0, 1.0, 2.0})) == 1.0);
}

TEST_CASE("indicator fields") {
  auto sp = tu::two_point();
  SECTION("basic shapes") {
    CHECK(indicator_field(sp, {0, 1}).values() == std::vector<double>{1.0, 1.0});
    CHECK(indicator_field(sp, {0}).values() == std::vector<double>{1.0, 0.0});
  }
  SECTION("errors") {
    CHECK_THROWS_AS(indicator_field(sp, {}), EmptySet);
    CHECK_THROWS_AS(indicator_field(sp, {4}), IndexOutOfRange);
  }
  SECTION("norm of an indicator is delta^(1/p)") {
    auto sp3 = MetricMeasureSpace::from_edges(
        3, {{0, 1, 1.0}, {1, 2, 1.0}}, {0.25, 0.25, 0.5});
    auto f = indicator_field(sp3, {0});
    for (double p : {1.0, 2.0, 4.0})
      CHECK(lp_norm(sp3, f, Exponent(p)) ==
            Approx(std::pow(0.25, 1.0 / p)).epsilon(1e-15));
  }
}

TEST_CASE("field validation") {
  auto sp = tu::two_point();
  CHECK_THROWS_AS(ScalarField(sp, {1.0}), FieldSpaceMismatch);
  CHECK_THROWS_AS(ScalarField(sp, {1.0, std::nan("")}), OutOfDomain);
}
