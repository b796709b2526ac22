#include <cmath>
#include <limits>

#include "doctest.h"
#include "latnet/special.hpp"
#include "latnet/wce.hpp"
#include "oracles.hpp"

using namespace latnet;

namespace {

double cos_series(int alpha, double x, int terms = 100000) {
  double acc = 0;
  for (int h = 1; h <= terms; ++h) acc += 2 * std::cos(2 * oracle::pi * h * x) / std::pow(2 * oracle::pi * h, alpha);
  return acc;
}

// sum_{u != empty} gamma_u (1/N) sum_k prod_{j in u} omega({k z_j / N})
double subset_criterion(const GeneratingVector& gv, const WeightScheme& w, const SpaceSetting& st) {
  const auto n = gv.modulus();
  double total = 0;
  for_each_subset(gv.dimension(), [&](std::span<const std::size_t> u) {
    if (u.empty()) return;
    double avg = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      double prod = 1;
      for (auto j : u) prod *= kernel_omega(st, double((k * gv[j]) % n) / double(n));
      avg += prod;
    }
    total += double(w.gamma(u)) * avg / double(n);
  });
  return total;
}

const DecaySequence kDecay = DecaySequence::algebraic(0.5, 2.5, 1.0 - 0.5 * 1.3414872573128, 0.4);

}  // namespace

TEST_CASE("kernels") {
  const auto a = SpaceSetting::sobolev_shifted();
  const auto b1 = SpaceSetting::korobov_hilbert(1);
  CHECK(kernel_omega(a, 0.0) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(kernel_omega(b1, 0.5) == doctest::Approx(-1.0 / 24).epsilon(1e-15));
  double integral = 0;
  const int m = 4096;
  for (int i = 0; i < m; ++i) integral += kernel_omega(b1, (i + 0.5) / m) / m;
  CHECK(std::abs(integral) < 1e-8);

  for (double x : {0.0, 0.13, 0.5, 0.77}) {
    CAPTURE(x);
    // setting b: sum_{h != 0} e^{2 pi i h x} / (2 pi |h|)^{2 alpha}
    CHECK(std::abs(kernel_omega(SpaceSetting::korobov_hilbert(2), x) - cos_series(4, x)) < 1e-12);
    CHECK(std::abs(kernel_omega(b1, x) - cos_series(2, x)) < 1e-6);
    // setting c, both parities of alpha
    CHECK(std::abs(kernel_omega(SpaceSetting::korobov_non_hilbert(2), x) - cos_series(2, x)) < 1e-6);
    CHECK(std::abs(kernel_omega(SpaceSetting::korobov_non_hilbert(3), x) - cos_series(3, x)) < 1e-10);
    CHECK(std::abs(kernel_omega(SpaceSetting::korobov_non_hilbert(4), x) - cos_series(4, x)) < 1e-12);
  }
  auto table = kernel_table(SpaceSetting::korobov_non_hilbert(3), 16);
  REQUIRE(table.size() == 16);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(table[k] == doctest::Approx(kernel_omega(SpaceSetting::korobov_non_hilbert(3), k / 16.0)).epsilon(1e-13));
  }
}

TEST_CASE("criterion values") {
  const auto a = SpaceSetting::sobolev_shifted();
  const auto b1 = SpaceSetting::korobov_hilbert(1);
  CHECK(wce_criterion(GeneratingVector(2, {1}), WeightScheme::product({1.0}), a) ==
        doctest::Approx(1.0 / 24).epsilon(1e-15));
  CHECK(wce_criterion(GeneratingVector(8, {1, 3}), WeightScheme::product({0.0, 0.0}), b1) == 0.0);

  SUBCASE("dual lattice sums") {
    // s = 2, N = 8, unit product weights: coefficient (2 pi |h|)^-2
    GeneratingVector gv(8, {1, 3});
    const double dual = oracle::dual_lattice_sum_extrapolated(8, {1, 3}, {1, 1}, 200, [](int h) {
      return std::pow(2 * oracle::pi * h, -2.0);
    });
    CHECK(std::abs(wce_criterion(gv, WeightScheme::product({1, 1}), b1) - dual) < 1e-6);
    // setting c with alpha = 2 on a three-dimensional lattice
    GeneratingVector g3(13, {1, 5, 8});
    const double dual3 = oracle::dual_lattice_sum_extrapolated(13, {1, 5, 8}, {0.8, 0.5, 0.3}, 52, [](int h) {
      return std::pow(2 * oracle::pi * h, -2.0);
    });
    CHECK(std::abs(wce_criterion(g3, WeightScheme::product({0.8, 0.5, 0.3}), SpaceSetting::korobov_non_hilbert(2)) -
                   dual3) < 1e-6);
  }
  SUBCASE("product weights against the product formula") {
    GeneratingVector gv(31, {1, 12, 7, 20});
    std::vector<double> g{0.9, 0.81, 0.729, 0.6561};
    for (auto st : {SpaceSetting::sobolev_shifted(), SpaceSetting::korobov_hilbert(2),
                    SpaceSetting::korobov_non_hilbert(3)}) {
      const double want = oracle::product_criterion(31, gv.components(), g,
                                                    [&](double x) { return kernel_omega(st, x); });
      CHECK(wce_criterion(gv, WeightScheme::product(g), st) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("SPOD weights against subset enumeration") {
    auto plan = select_rate_plan(0.4, SpaceKind::KorobovHilbert);
    auto w = build_weights(plan.setting, kDecay, plan, 5);
    GeneratingVector gv(64, {1, 27, 13, 45, 19});
    const double want = subset_criterion(gv, w, plan.setting);
    CHECK(wce_criterion(gv, w, plan.setting) == doctest::Approx(want).epsilon(1e-11));
    CHECK(worst_case_error(gv, w, plan.setting) == doctest::Approx(std::sqrt(want)).epsilon(1e-11));
    auto pc = select_rate_plan(0.4, SpaceKind::KorobovNonHilbert);
    auto wc = build_weights(pc.setting, kDecay, pc, 5);
    const double wantc = subset_criterion(gv, wc, pc.setting);
    CHECK(worst_case_error(gv, wc, pc.setting) == doctest::Approx(wantc).epsilon(1e-11));
  }
}

TEST_CASE("theoretical bound") {
  auto one = WeightScheme::product({1.0});
  CHECK(theoretical_bound(64, one, 1.0, SpaceSetting::korobov_hilbert(1)) ==
        doctest::Approx(std::sqrt(2.0 / 64 / 12)).epsilon(1e-12));
  CHECK(theoretical_bound(64, one, 1.0, SpaceSetting::korobov_hilbert(1)) == doctest::Approx(0.051031).epsilon(1e-5));
  CHECK(theoretical_bound(64, one, 1.0, SpaceSetting::sobolev_shifted()) == doctest::Approx(0.072169).epsilon(1e-5));
  CHECK(theoretical_bound(64, WeightScheme::product({0.0}), 1.0, SpaceSetting::sobolev_shifted()) == 0.0);
  CHECK_THROWS_AS(theoretical_bound(64, one, 0.5, SpaceSetting::korobov_hilbert(1)), std::domain_error);
  CHECK_THROWS_AS(theoretical_bound(64, one, 1.1, SpaceSetting::korobov_hilbert(1)), std::domain_error);
  // setting c: exponent 1/lambda and varrho at lambda/2
  const double lam = 0.8;
  const double want = 2.0 / 64 * std::pow(0.5, lam) * 2 * oracle::zeta(2 * lam) / std::pow(2 * oracle::pi, 2 * lam);
  CHECK(theoretical_bound(64, WeightScheme::product({0.5}), lam, SpaceSetting::korobov_non_hilbert(2)) ==
        doctest::Approx(std::pow(want, 1 / lam)).epsilon(1e-9));

  auto grid = lambda_grid(SpaceSetting::korobov_hilbert(3));
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(1.0 / 6 + 1e-3));
  CHECK(grid.back() == 1.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("CBC against exhaustive search") {
  const auto b1 = SpaceSetting::korobov_hilbert(1);
  auto w = WeightScheme::product({0.9, 0.81, 0.729});
  auto res = cbc_construct(16, 3, w, b1);
  REQUIRE(res.trace.size() == 3);
  CHECK(res.gv[0] == 1);
  std::vector<std::uint64_t> prefix;
  for (std::size_t j = 0; j < 3; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 1; z < 16; z += 2) {
      auto cand = prefix;
      cand.push_back(z);
      std::vector<double> g{0.9, 0.81, 0.729};
      g.resize(j + 1);
      best = std::min(best, oracle::product_criterion(16, cand, g, [](double x) { return (x * x - x + 1.0 / 6) / 2; }));
    }
    CHECK(std::abs(res.trace[j] - best) < 1e-12);
    prefix.push_back(res.gv[j]);
  }
  CHECK(res.trace.back() == doctest::Approx(wce_criterion(res.gv, w, b1)).epsilon(1e-13));

  SUBCASE("SPOD weights") {
    auto plan = select_rate_plan(0.4, SpaceKind::KorobovHilbert);
    auto ws = build_weights(plan.setting, kDecay, plan, 3);
    auto r = cbc_construct(32, 3, ws, plan.setting);
    std::vector<std::uint64_t> pre{r.gv[0]};
    for (std::size_t j = 1; j < 3; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint64_t z = 1; z < 32; z += 2) {
        auto cand = pre;
        cand.push_back(z);
        best = std::min(best, subset_criterion(GeneratingVector(32, cand), ws.prefix(j + 1), plan.setting));
      }
      CHECK(r.trace[j] == doctest::Approx(best).epsilon(1e-12));
      pre.push_back(r.gv[j]);
    }
  }
}

TEST_CASE("CBC details") {
  const auto st = SpaceSetting::sobolev_shifted();
  auto w = WeightScheme::product({1.0, 0.5, 0.25, 0.125});
  for (std::uint64_t n : {7, 12, 64}) CHECK(cbc_construct(n, 1, w.prefix(1), st).gv[0] == 1);
  auto cands = cbc_candidates(GeneratingVector(12, {1}), w, st);
  REQUIRE(cands.size() == 12);
  CHECK(std::isnan(cands[0]));
  for (std::uint64_t z = 1; z < 12; ++z) CHECK(std::isnan(cands[z]) == (oracle::gcd(z, 12) != 1));
  CHECK(cands[5] == doctest::Approx(wce_criterion(GeneratingVector(12, {1, 5}), w, st)).epsilon(1e-13));
  auto serial = cbc_construct(101, 4, w, st);
  auto parallel = cbc_construct(101, 4, w, st, CbcOptions{4});
  CHECK(serial.gv == parallel.gv);
  CHECK(serial.trace == parallel.trace);
  CHECK_THROWS(cbc_construct(16, 5, w, st));
}

TEST_CASE("bound domination at moderate size") {
  for (auto kind : {SpaceKind::SobolevShifted, SpaceKind::KorobovHilbert, SpaceKind::KorobovNonHilbert}) {
    auto plan = select_rate_plan(0.4, kind);
    auto w = build_weights(plan.setting, kDecay, plan, 12);
    auto res = cbc_construct(128, 12, w, plan.setting);
    auto rep = bound_report(res.gv, w, plan.setting);
    CAPTURE(plan.setting.name());
    CHECK(rep.dominated);
    CHECK(rep.bounds.size() == 20);
    for (double bnd : rep.bounds) CHECK(rep.error <= bnd);
  }
}
