#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tailbound/bounds.hpp"
#include "tailbound/errors.hpp"
#include "tailbound/legendre.hpp"

using namespace tailbound;

namespace {

CumulantModel model(const char* s) { return make_model(DistributionSpec::parse(s)); }

const auto kGamma = oracle::Dual::gamma_dist(8, 1);

}  // namespace

TEST_CASE("chernoff examples") {
  const auto g = model("gamma:8,1");
  CHECK(chernoff_upper(g, 16.0) == doctest::Approx(0.085879).epsilon(1e-5));
  CHECK(chernoff_upper(g, 8.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chernoff_upper(model("normal:0,1"), 4.0) == doctest::Approx(std::exp(-8.0)).epsilon(1e-12));
  CHECK(chernoff_upper(model("normal:0,1"), -4.0, Tail::left) ==
        doctest::Approx(std::exp(-8.0)).epsilon(1e-12));
  CHECK(chernoff_upper(g, 4.0, Tail::left) == doctest::Approx(std::exp(-kGamma.rate(4.0))).epsilon(1e-10));
  CHECK_THROWS_AS(chernoff_upper(g, 8.0), ArgumentError);
  CHECK_THROWS_AS(chernoff_upper(g, 9.0, Tail::left), ArgumentError);
}

TEST_CASE("objective examples") {
  const auto g = model("gamma:8,1");
  const auto infeasible = objective_L(g, 1.2, 2.0, 16.0);
  CHECK_FALSE(infeasible.feasible());
  CHECK(1.0 - infeasible.A - infeasible.B == doctest::Approx(-0.1697).epsilon(1e-3));
  CHECK(infeasible.L == -std::numeric_limits<double>::infinity());
  const auto s = objective_L(g, 1.2, 2.699, 16.0);
  CHECK(s.feasible());
  CHECK(s.L == doctest::Approx(1.11e-9).epsilon(1e-2));
  CHECK(s.L == doctest::Approx(std::exp(oracle::log_objective(kGamma, 1.2, 2.699, 16.0))).epsilon(1e-9));
  CHECK_FALSE(objective_L(g, 1.2, 1.2 + 1e-9, 16.0).feasible());
  CHECK_THROWS_AS(objective_L(g, 1.0, 2.0, 16.0), ArgumentError);
  CHECK_THROWS_AS(objective_L(g, 1.5, 1.4, 16.0), ArgumentError);
  CHECK_THROWS_AS(objective_L(g, 1.2, 2.0, 7.0), ArgumentError);
}

TEST_CASE("objective state is self-consistent") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* spec : {"gamma:8,1", "normal:0,1", "poisson:4", "exp:1"}) {
    const auto m = model(spec);
    for (int i = 0; i < 100; ++i) {
      const double y = m.mean() == 0.0 ? 0.2 + 4 * u(rng) : m.mean() * (1.1 + 3 * u(rng));
      const double alpha = 1.0 + 0.6 * u(rng);
      const double delta = alpha + 2.0 * u(rng) + 1e-3;
      const auto s = objective_L(m, alpha, delta, y);
      CHECK(s.G == doctest::Approx(s.B * s.xi_delta_y - (1 - s.A) * s.xi_alpha_y).epsilon(1e-12).scale(1e-12));
      CHECK(s.feasible() == (1.0 - s.A - s.B > 0.0));
      if (s.feasible()) CHECK(s.L > 0.0);
    }
  }
}

TEST_CASE("optimal delta") {
  const auto g = model("gamma:8,1");
  CHECK(delta_star(g, 1.2, 16.0) == doctest::Approx(2.699).epsilon(1e-3));
  // A ~ e^{-50}: delta* collapses onto alpha
  CHECK(delta_star(model("normal:0,1"), 2.0, 10.0) == doctest::Approx(2.0).epsilon(1e-15));
  // grows like 2 / (Xi' y^2 (alpha - 1)) as alpha -> 1
  double prev = 0.0;
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double d = delta_star(g, 1.0 + h, 16.0);
    CHECK(d > prev);
    prev = d;
  }
  CHECK(prev == doctest::Approx(2.0 / (8.0 * 1e-6)).epsilon(1e-3));
  CHECK_THROWS_AS(delta_star(g, 1.0, 16.0), DegenerateArgumentError);
  for (double a : {1.01, 1.1, 1.5, 3.0}) CHECK(delta_star(g, a, 16.0) > a);
}

TEST_CASE("G root") {
  const auto g = model("gamma:8,1");
  const double dh = delta_hat(g, 1.2, 16.0);
  CHECK(dh == doctest::Approx(2.397).epsilon(1e-3));
  TailProblem p(g, 16.0);
  CHECK(std::abs(p.g(1.2, dh)) <= 1e-12);
  const auto t = tilted_pair(g, 1.2, 1.2, 16.0);
  CHECK(p.g(1.2, 1.2) == doctest::Approx(t.A * xi(g, 19.2)).epsilon(1e-12));
  const double h = 1e-6 * dh;
  CHECK(p.g(1.2, dh + h) - p.g(1.2, dh - h) < 0.0);

  const auto n = model("normal:0,1");
  for (double a : {1.01, 1.3, 2.0, 5.0}) {
    const double r = delta_hat(n, a, 3.0);
    CHECK(r > a);
    TailProblem q(n, 3.0);
    CHECK(std::abs(q.g(a, r)) <= 1e-10);
  }
}

TEST_CASE("new lower bound at the gamma reference point") {
  const auto g = model("gamma:8,1");
  const auto r = lower_bound_new(g, 16.0);
  REQUIRE(r.ok());
  CHECK(r.value > 1e-9);
  CHECK(r.value < 1e-8);
  CHECK(*r.alpha_opt == doctest::Approx(1.30).epsilon(1e-2));
  CHECK(*r.delta_opt == doctest::Approx(2.34).epsilon(1e-2));
  CHECK(*r.alpha_opt > 1.0);
  CHECK(*r.delta_opt > *r.alpha_opt);
  CHECK(*r.alpha_opt < *r.alpha_hat);
  const auto s = objective_L(g, *r.alpha_opt, *r.delta_opt, 16.0);
  CHECK(s.A + s.B < 1.0);

  // brute-force grid over (1, 1.35] x (alpha, 6]
  const auto grid = oracle::grid_max(kGamma, 16.0, 1.0, 1.35, 6.0);
  const auto fine = oracle::refine(kGamma, 16.0, grid, 0.35 / 400, 5.0 / 400);
  CHECK(r.value >= grid.value() * (1 - 1e-2));
  CHECK(r.value == doctest::Approx(fine.value()).epsilon(1e-2));
  CHECK(r.value <= *exact_tail(g, 16.0));
}

TEST_CASE("new lower bound near the mean and for the exponential") {
  const auto g = model("gamma:8,1");
  const auto near = lower_bound_new(g, 8.01);
  REQUIRE(near.ok());
  CHECK(near.value > 0.0);
  CHECK(near.value <= *exact_tail(g, 8.01));

  const auto e = model("exp:1");
  const auto r = lower_bound_new(e, 5.0);
  REQUIRE(r.ok());
  CHECK(r.value > 0.0);
  CHECK(r.value < std::exp(-5.0));
  const auto d = oracle::Dual::exponential(1);
  const auto grid = oracle::grid_max(d, 5.0, 1.0, 1.6, 16.0);
  REQUIRE(std::isfinite(grid.log_value));
  const auto fine = oracle::refine(d, 5.0, grid, 0.6 / 400, 15.0 / 400);
  CHECK(r.value == doctest::Approx(fine.value()).epsilon(1e-2));
  CHECK(stroock_lower(e, 5.0).status == BoundStatus::inapplicable);
}

TEST_CASE("lower bounds reject y at or below the mean") {
  const auto g = model("gamma:8,1");
  CHECK_THROWS_AS(lower_bound_new(g, 8.0), ArgumentError);
  CHECK_THROWS_AS(stroock_lower(g, 7.0), ArgumentError);
  CHECK_THROWS_AS(bo_lower(g, 7.0), ArgumentError);
  CHECK_THROWS_AS(saddlepoint_tail(g, 8.0), ArgumentError);
}

TEST_CASE("optimal-delta curve has a single interior minimum") {
  for (const char* spec : {"gamma:8,1", "normal:0,1", "exp:1", "poisson:4", "gamma:3,2"}) {
    const auto m = model(spec);
    const double y = m.mean() == 0.0 ? 2.0 : 2.0 * m.mean();
    TailProblem p(m, y);
    std::vector<double> v;
    for (int i = 1; i <= 2000; ++i) v.push_back(p.delta_star(1.0 + 3.0 * i / 2000.0));
    int turns = 0;
    bool descending = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (descending && v[i] > v[i - 1] + 1e-12) {
        descending = false;
        ++turns;
      } else if (!descending && v[i] < v[i - 1] - 1e-12) {
        ++turns;
      }
    }
    CHECK(turns == 1);
  }
}

TEST_CASE("stroock bound") {
  const auto e = model("exp:1");
  for (double y : {1.1, 2.0, 5.0, 20.0}) CHECK(stroock_lower(e, y).status == BoundStatus::inapplicable);

  const auto g = model("gamma:8,1");
  TailProblem p(g, 16.0);
  CHECK(p.stroock_objective(1.54) == -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(p.stroock_objective(1.55)));
  const auto r = stroock_lower(g, 16.0);
  REQUIRE(r.ok());
  const auto scan = oracle::stroock_scan(kGamma, 16.0, 1.55, 2.5);
  CHECK(r.value == doctest::Approx(scan.value()).epsilon(1e-3));
  CHECK(*r.alpha_opt == doctest::Approx(1.6).epsilon(2e-2));
  CHECK(r.value == doctest::Approx(3.8e-8).epsilon(0.1));

  const auto n = model("normal:0,1");
  const auto rn = stroock_lower(n, 4.0);
  REQUIRE(rn.ok());
  const auto sn = oracle::stroock_scan(oracle::Dual::normal_dist(0, 1), 4.0, 1.0, 2.5);
  CHECK(rn.value == doctest::Approx(sn.value()).epsilon(1e-3));
  CHECK(*rn.alpha_opt == doctest::Approx(1.28).epsilon(2e-2));
  CHECK(rn.value > 1e-9);
  CHECK(rn.value < 2e-9);
}

TEST_CASE("bagdasarov-ostrovskii bound") {
  const auto e = model("exp:1");
  for (double y : {1.5, 3.0, 8.0}) {
    for (double a : {2.0, 2.5, 4.0}) CHECK_FALSE(bo_delta(e, a, y).has_value());
    CHECK(bo_delta(e, 1.5, y).has_value());
  }
  const auto g = model("gamma:8,1");
  const auto r = bo_lower(g, 16.0);
  REQUIRE(r.ok());
  CHECK(r.value > 0.0);
  CHECK(r.value <= lower_bound_new(g, 16.0).value);
  const auto scan = oracle::bo_scan(kGamma, 16.0, 1.0, 4.0);
  CHECK(r.value == doctest::Approx(scan.value()).epsilon(1e-3));
  // delta from the inverse dual: Xi(delta y) = 2 Xi(alpha y) - Xi(y)
  const double d = *bo_delta(g, 1.3, 16.0);
  CHECK(xi(g, d * 16.0) == doctest::Approx(2 * xi(g, 1.3 * 16.0) - xi(g, 16.0)).epsilon(1e-12));
}

TEST_CASE("saddlepoint") {
  const auto n = model("normal:0,1");
  CHECK(std::abs(saddlepoint_tail(n, 2.0).value - 0.0227501319481792) <= 1e-8);
  CHECK(saddlepoint_tail(n, 1e-6).value == doctest::Approx(0.5).epsilon(1e-5));

  const auto g = model("gamma:8,1");
  const auto sp = saddlepoint_tail(g, 16.0);
  CHECK_FALSE(sp.accuracy_warning);
  const double exact = *exact_tail(g, 16.0);
  CHECK(sp.value > exact / 2);
  CHECK(sp.value < exact * 2);
  const auto integrand = [](double t) {
    return std::sqrt(kGamma.xi_prime(t)) * std::exp(-kGamma.rate(t)) / std::sqrt(2 * M_PI);
  };
  const double dense = oracle::simpson(integrand, 16.0, 200.0, 100000);
  CHECK(sp.value == doctest::Approx(dense).epsilon(1e-8));
  CHECK(sp.upper_limit > 16.0);
  CHECK(kGamma.rate(sp.upper_limit) >= kGamma.rate(16.0) + 40.0);
}

TEST_CASE("bound statuses on a grid") {
  for (const char* spec : {"gamma:8,1", "gamma:3,2", "exp:1", "normal:0,1", "poisson:4"}) {
    const auto m = model(spec);
    const double base = m.mean() == 0.0 ? 1.0 : m.mean();
    for (int i = 1; i <= 10; ++i) {
      const double y = m.mean() == 0.0 ? 0.5 * i : base * (1.0 + 0.4 * i);
      const auto r = lower_bound_new(m, y);
      REQUIRE(r.ok());
      CHECK(r.value > 0.0);
      CHECK(r.value < chernoff_upper(m, y));
      CHECK(r.alpha_cross.has_value());
      CHECK(*r.alpha_cross == doctest::Approx(*r.alpha_opt).epsilon(1e-4));
      const auto bo = bo_lower(m, y);
      if (bo.ok()) CHECK(bo.value <= r.value + 1e-15);
    }
  }
}
