#include <catch2/catch_amalgamated.hpp>

#include "uqg/rmt.hpp"
#include "uqg/stats.hpp"

using namespace uqg;

TEST_CASE("sample_cue_phases", "[rmt]") {
  Rng rng(61);
  SECTION("N = 1 is a single uniform phase") {
    auto p = sample_cue_phases(1, rng);
    REQUIRE(p.size() == 1);
    REQUIRE(p(0) > -pi);
    REQUIRE(p(0) <= pi + 1e-12);
  }
  SECTION("mean spacing 2 pi / N and level repulsion vs Poisson") {
    const int n = 20, inst = 2000;
    double var_cue = 0.0, var_poi = 0.0, cnt = 0;
    for (int t = 0; t < inst; ++t) {
      Rng sub = rng.child(t);
      auto p = sample_cue_phases(n, sub);
      std::vector<double> unif(n);
      for (int i = 0; i < n; ++i) unif[i] = sub.uniform(-pi, pi);
      std::sort(unif.begin(), unif.end());
      for (int i = 0; i + 1 < n; ++i) {
        const double s = (p(i + 1) - p(i)) * n / two_pi;
        const double su = (unif[i + 1] - unif[i]) * n / two_pi;
        var_cue += (s - 1.0) * (s - 1.0);
        var_poi += (su - 1.0) * (su - 1.0);
        cnt += 1;
      }
    }
    var_cue /= cnt;
    var_poi /= cnt;
    REQUIRE(var_cue < 0.5 * var_poi);  // strong repulsion
  }
}

TEST_CASE("sample_overlaps", "[rmt]") {
  Rng rng(62);
  auto w1 = sample_overlaps(1, rng);
  REQUIRE(w1(0) == 1.0);
  auto w = sample_overlaps(100, rng);
  REQUIRE(std::abs(w.sum() - 1.0) < 1e-14);
  for (int i = 0; i < 100; ++i) REQUIRE(w(i) > 0.0);
  // raw exponential mean 1/N within 3 standard errors
  const int n = 100, draws = 100000;
  double mean = 0;
  for (int i = 0; i < draws; ++i) mean += rng.exponential(1.0 / n);
  mean /= draws;
  const double se = (1.0 / n) / std::sqrt(static_cast<double>(draws));
  REQUIRE(std::abs(mean - 0.01) < 3 * se);
}

TEST_CASE("solve_secular_cot: single level closed form", "[rmt]") {
  RmtInstance inst;
  inst.eps.resize(1);
  inst.eps << 0.3;
  inst.weights.resize(1);
  inst.weights << 1.0;
  inst.nu = std::tan(0.4);
  auto lam = solve_secular_cot(inst, 0.4);
  REQUIRE(lam.size() == 1);
  // cot(alpha) = cot((lam - eps)/2)  =>  lam = eps + 2 alpha
  REQUIRE(std::abs(lam[0] - (0.3 + 0.8)) < 1e-10);
  REQUIRE_THROWS_AS(solve_secular_cot(inst, 0.0), std::invalid_argument);
}

TEST_CASE("solve_secular_rational: single level and grid-scan oracle", "[rmt]") {
  SECTION("N = 1: lambda = eps + 2 nu") {
    RmtInstance inst;
    inst.eps.resize(1);
    inst.eps << -0.2;
    inst.weights.resize(1);
    inst.weights << 1.0;
    inst.nu = 0.7;
    auto lam = solve_secular_rational(inst);
    REQUIRE(std::abs(lam[0] - (-0.2 + 1.4)) < 1e-10);
  }
  SECTION("N = 2 symmetric pair vs dense grid scan") {
    RmtInstance inst;
    inst.eps.resize(2);
    inst.eps << -0.5, 0.5;
    inst.weights.resize(2);
    inst.weights << 0.5, 0.5;
    inst.nu = 0.9;
    auto lam = solve_secular_rational(inst);
    REQUIRE(lam.size() == 2);
    // grid-scan oracle for the interior root
    auto f = [&](double x) {
      return 0.5 / (x + 0.5) + 0.5 / (x - 0.5) - 1.0 / (2.0 * 0.9);
    };
    double best = 0, prev = f(-0.5 + 1e-6);
    for (double x = -0.5 + 1e-6; x < 0.5; x += 1e-6) {
      const double cur = f(x);
      if (prev > 0 && cur <= 0) {
        best = x;
        break;
      }
      prev = cur;
    }
    REQUIRE(std::abs(lam[0] - best) < 1e-5);
    REQUIRE(std::abs(lam[0] - best) > -1.0);  // interior root found
    // bracketing: each root strictly inside its pole interval
    REQUIRE(lam[0] > -0.5);
    REQUIRE(lam[0] < 0.5);
    REQUIRE(lam[1] > 0.5);
  }
  SECTION("nu = 0 rejected") {
    RmtInstance inst;
    inst.eps.resize(1);
    inst.eps << 0.0;
    inst.weights.resize(1);
    inst.weights << 1.0;
    inst.nu = 0.0;
    REQUIRE_THROWS_AS(solve_secular_rational(inst), std::invalid_argument);
  }
}

TEST_CASE("cot and rational solvers agree on central levels at large N", "[rmt]") {
  Rng rng(63);
  RmtInstance inst = sample_rmt_instance(201, std::tan(0.45), rng);
  auto lam_rat = solve_secular_rational(inst);
  auto lam_cot = solve_secular_cot(inst, 0.45);
  // middle third: relative location inside the arc differs by O(1/B)
  int worst_i = -1;
  double worst = 0.0;
  for (int i = 67; i < 134; ++i) {
    const double arc = inst.eps(i + 1) - inst.eps(i);
    const double d = std::abs(lam_rat[i] - lam_cot[i]) / arc;
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  INFO("worst relative difference at arc " << worst_i);
  REQUIRE(worst < 2e-2);
}

TEST_CASE("interlacing for both solvers, both signs", "[rmt]") {
  Rng rng(64);
  for (double nu : {0.3, 2.0, -0.8}) {
    for (int t = 0; t < 20; ++t) {
      Rng sub = rng.child(t + (nu > 0 ? 0 : 1000) + (std::abs(nu) > 1 ? 500 : 0));
      RmtInstance inst = sample_rmt_instance(32, nu, sub);
      auto lam = solve_secular_rational(inst);
      const int off = nu > 0 ? 0 : 1;
      for (int i = 0; i + 1 < 32; ++i) {
        REQUIRE(lam[i + off] >= inst.eps(i) - 1e-12);
        REQUIRE(lam[i + off] <= inst.eps(i + 1) + 1e-12);
      }
      auto lamc = solve_secular_cot(inst, std::atan(nu));
      for (int i = 0; i < 32; ++i) {
        const double a = inst.eps(i);
        const double b = i + 1 < 32 ? inst.eps(i + 1) : inst.eps(0) + two_pi;
        REQUIRE(lamc[i] >= a - 1e-12);
        REQUIRE(lamc[i] <= b + 1e-12);
      }
    }
  }
}

TEST_CASE("sample_splittings: positivity, telescoping, nu-swap, monotonicity", "[rmt]") {
  Rng rng(65);
  SECTION("all samples nonnegative and means telescope to 1") {
    auto s = sample_splittings(101, 1.0, 1000, rng);
    double min_v = 1e9, mi = 0, me = 0;
    for (double v : s.internal) {
      min_v = std::min(min_v, v);
      mi += v;
    }
    for (double v : s.external) {
      min_v = std::min(min_v, v);
      me += v;
    }
    REQUIRE(min_v >= 0.0);
    mi /= s.internal.size();
    me /= s.external.size();
    REQUIRE(std::abs(mi + me - 1.0) < 0.01);
    // model identity: <s_in> = arctan(nu)/pi
    REQUIRE(std::abs(mi - std::atan(1.0) / pi) < 0.01);
  }
  SECTION("nu -> -nu exchanges the two distributions (two-sample KS)") {
    Rng r1(81), r2(82);
    auto sp = sample_splittings(64, 0.8, 400, r1);
    auto sn = sample_splittings(64, -0.8, 400, r2);
    auto ks = ks_two_sample(sp.internal, sn.external);
    REQUIRE(ks.p_value > 0.01);
    auto ks2 = ks_two_sample(sp.external, sn.internal);
    REQUIRE(ks2.p_value > 0.01);
  }
  SECTION("mean internal splitting increases with nu") {
    double prev = -1.0;
    for (double nu : {0.1, 0.5, 1.0, 2.0}) {
      Rng r(90);
      auto s = sample_splittings(64, nu, 300, r);
      double m = 0;
      for (double v : s.internal) m += v;
      m /= s.internal.size();
      REQUIRE(m > prev);
      prev = m;
    }
  }
}
