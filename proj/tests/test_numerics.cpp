#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tailbound/errors.hpp"
#include "tailbound/numerics.hpp"

using namespace tailbound;
using namespace tailbound::numerics;

TEST_CASE("find_root examples") {
  auto f = [](double x) { return x * x - 2.0; };
  CHECK(find_root(f, RootBracket::certify(f, 1.0, 2.0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  auto id = [](double x) { return x; };
  CHECK(std::abs(find_root(id, RootBracket::certify(id, -1.0, 1.0))) <= 1e-12);
  auto slope = [](double s) { return 8.0 / (1.0 - s) - 16.0; };
  CHECK(find_root(slope, RootBracket::certify(slope, 0.0, 0.999)) ==
        doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("bracket certification") {
  auto f = [](double x) { return x * x + 1.0; };
  CHECK_THROWS_AS(RootBracket::certify(f, -1.0, 1.0), BracketError);
  auto g = [](double x) { return x; };
  CHECK_THROWS_AS(RootBracket::certify(g, 1.0, -1.0), BracketError);
  auto h = [](double) { return std::nan(""); };
  CHECK_THROWS_AS(RootBracket::certify(h, 0.0, 1.0), BracketError);
}

TEST_CASE("find_root gives up after max_iter") {
  RootOptions o;
  o.max_iter = 3;
  o.tol_f = 0.0;
  o.tol_x = 0.0;
  auto f = [](double x) { return std::tanh(x - 0.3); };
  CHECK_THROWS_AS(find_root(f, RootBracket::certify(f, -10.0, 10.0, o)), ConvergenceError);
}

TEST_CASE("find_root stays inside the bracket") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double r = u(rng), a = u(rng) * 3.0, c = std::abs(u(rng)) + 0.1;
    auto f = [&](double x) { return std::atan(c * (x - r)) + 0.0 * a; };
    const double lo = r - std::abs(a) - 0.5, hi = r + c + 0.2;
    const double x = find_root(f, RootBracket::certify(f, lo, hi));
    CHECK(x >= lo);
    CHECK(x <= hi);
    CHECK(x == doctest::Approx(r).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("maximize_unimodal examples") {
  auto q = [](double x) { return -(x - 3.0) * (x - 3.0); };
  const auto r1 = maximize_unimodal(q, {0.0, 10.0});
  CHECK(r1.x == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(std::abs(r1.fx) <= 1e-15);
  auto s = [](double x) { return std::sin(x); };
  const auto r2 = maximize_unimodal(s, {0.0, std::numbers::pi});
  CHECK(r2.x == doctest::Approx(std::numbers::pi / 2).epsilon(1e-7));
  CHECK(r2.fx == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("maximize_unimodal never evaluates outside its bracket") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double lo = u(rng), hi = lo + 0.01 + std::abs(u(rng)), peak = u(rng);
    bool outside = false;
    auto f = [&](double x) {
      if (x < lo || x > hi) outside = true;
      return -std::abs(x - peak);
    };
    const auto r = maximize_unimodal(f, {lo, hi});
    CHECK_FALSE(outside);
    CHECK(r.x >= lo);
    CHECK(r.x <= hi);
  }
}

TEST_CASE("maximize_unimodal tolerates -inf regions and iteration cap") {
  auto f = [](double x) {
    return x > 0.7 ? -std::numeric_limits<double>::infinity() : -(x - 0.6) * (x - 0.6);
  };
  CHECK(maximize_unimodal(f, {0.0, 1.0}).x == doctest::Approx(0.6).epsilon(1e-8));
  CHECK_THROWS_AS(maximize_unimodal(f, {0.0, 1.0, 1e-12, 5}), ConvergenceError);
}

TEST_CASE("integrate_adaptive examples") {
  CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0).value ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate_adaptive([](double) { return 0.0; }, 0.0, 1.0).value == 0.0);
  const auto r = integrate_adaptive([](double t) { return 1.0 - 8.0 / t; }, 8.0, 16.0);
  CHECK(r.value == doctest::Approx(8.0 - 8.0 * std::log(2.0)).epsilon(1e-10));
  CHECK_FALSE(r.accuracy_warning);
}

TEST_CASE("integrate_adaptive is linear") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  auto f = [](double x) { return std::exp(-x * x) * std::cos(3 * x); };
  const double base = integrate_adaptive(f, -2.0, 3.0).value;
  for (int i = 0; i < 50; ++i) {
    const double c = u(rng);
    const double scaled = integrate_adaptive([&](double x) { return c * f(x); }, -2.0, 3.0).value;
    CHECK(scaled == doctest::Approx(c * base).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("integrate_adaptive warns at the depth cap") {
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
  const auto r = integrate_adaptive(f, 0.0, 1.0, 1e-12, 6);
  CHECK(r.accuracy_warning);
  CHECK_THROWS_AS(integrate_adaptive(f, 1.0, 0.0), ArgumentError);
}
