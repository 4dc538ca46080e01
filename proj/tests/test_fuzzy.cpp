#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracsim/fracnum.hpp"
#include "fracsim/fuzzy.hpp"

using namespace fracsim;

namespace {

const std::vector<double> kFiveCenters{-2.0, -1.0, 0.0, 1.0, 2.0};

std::vector<std::vector<double>> grid_samples_1d(double lo, double hi, std::size_t count) {
  std::vector<std::vector<double>> s;
  for (std::size_t i = 0; i < count; ++i) {
    s.push_back({lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)});
  }
  return s;
}

}  // namespace

TEST_CASE("basis peaks at the matching center") {
  const MembershipGrid grid(kFiveCenters, 1.0, 1);
  for (std::size_t k = 0; k < kFiveCenters.size(); ++k) {
    const auto phi = basis(grid, std::vector<double>{kFiveCenters[k]});
    REQUIRE(phi.size() == 5);
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (j != k) CHECK(phi[k] > phi[j]);
    }
  }
}

TEST_CASE("basis is a partition of unity, bounded, and alive far from the grid") {
  const MembershipGrid grid(kFiveCenters, 1.0, 2);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> x{dist(rng), dist(rng)};
    const auto phi = basis(grid, x);
    double sum = 0.0, norm2 = 0.0;
    for (double p : phi) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      sum += p;
      norm2 += p * p;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    CHECK(norm2 <= 1.0 + 1e-12);
  }
  // log-space normalization survives far outside the grid
  const auto far = basis(grid, std::vector<double>{40.0, -35.0});
  double sum = 0.0;
  for (double p : far) sum += p;
  CHECK(std::fabs(sum - 1.0) <= 1e-12);
}

TEST_CASE("two-input basis matches the brute-force product formula") {
  const std::vector<GridAxis> axes{{{-1.0, 0.5, 2.0}, 0.7}, {{-2.0, 1.0}, 1.3}};
  const MembershipGrid grid(axes);
  REQUIRE(grid.rules() == 6);
  const std::vector<double> x{0.3, -0.4};

  std::vector<double> brute(6);
  double total = 0.0;
  std::size_t k = 0;
  for (double c0 : axes[0].centers) {
    for (double c1 : axes[1].centers) {  // last dimension fastest
      const double m0 = std::exp(-0.5 * std::pow((x[0] - c0) / 0.7, 2));
      const double m1 = std::exp(-0.5 * std::pow((x[1] - c1) / 1.3, 2));
      brute[k++] = m0 * m1;
      total += m0 * m1;
    }
  }
  for (double& b : brute) b /= total;

  const auto phi = basis(grid, x);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(phi[i] == doctest::Approx(brute[i]).epsilon(1e-12));
  }
}

TEST_CASE("fls_eval: dot product, one-hot, linearity in theta") {
  const MembershipGrid grid(kFiveCenters, 1.0, 1);
  const auto phi = basis(grid, std::vector<double>{0.37});

  CHECK(fls_eval({std::vector<double>(5, 0.0)}, phi) == 0.0);

  std::vector<double> onehot(5, 0.0);
  onehot[2] = 4.5;
  std::vector<double> unit(5, 0.0);
  unit[2] = 1.0;
  CHECK(fls_eval({onehot}, unit) == 4.5);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> t1(5), t2(5), mix(5);
  for (std::size_t i = 0; i < 5; ++i) {
    t1[i] = dist(rng);
    t2[i] = dist(rng);
    mix[i] = 1.5 * t1[i] - 0.25 * t2[i];
  }
  double direct = 0.0;
  for (std::size_t i = 0; i < 5; ++i) direct += t1[i] * phi[i];
  CHECK(fls_eval({t1}, phi) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(fls_eval({mix}, phi) ==
        doctest::Approx(1.5 * fls_eval({t1}, phi) - 0.25 * fls_eval({t2}, phi)).epsilon(1e-13));
}

TEST_CASE("offline fit: constants are exact, sin baseline, nested grids improve") {
  const auto samples = grid_samples_1d(-3.0, 3.0, 601);
  auto sup_err = [&](const FlsParams& p, const MembershipGrid& g,
                     const std::function<double(double)>& target) {
    double worst = 0.0;
    for (const auto& x : samples) {
      worst = std::max(worst, std::fabs(target(x[0]) - fls_eval(p, basis(g, x))));
    }
    return worst;
  };

  const MembershipGrid grid5(kFiveCenters, 1.0, 1);
  SUBCASE("constant target is reproduced exactly via partition of unity") {
    const auto p = fit_offline([](std::span<const double>) { return 2.75; }, grid5, samples);
    CHECK(sup_err(p, grid5, [](double) { return 2.75; }) <= 1e-9);
    for (double th : p.theta) CHECK(th == doctest::Approx(2.75).epsilon(1e-9));
  }

  SUBCASE("sin fit: regression baseline and nested-model improvement") {
    // Fit and evaluate on the domain the grid is designed for (its center
    // span); outside it the normalized basis extrapolates flat.
    const auto inner = grid_samples_1d(-2.0, 2.0, 401);
    auto sup_err_on = [&](const FlsParams& p, const MembershipGrid& g) {
      double worst = 0.0;
      for (const auto& x : inner) {
        worst = std::max(worst, std::fabs(std::sin(x[0]) - fls_eval(p, basis(g, x))));
      }
      return worst;
    };
    const auto target_fn = [](std::span<const double> x) { return std::sin(x[0]); };
    const auto p5 = fit_offline(target_fn, grid5, inner);
    const double e5 = sup_err_on(p5, grid5);
    // measured 4.954e-2 on the first verified run; pinned with margin
    CHECK(e5 <= 0.06);

    std::vector<double> nine;
    for (int i = 0; i <= 8; ++i) nine.push_back(-2.0 + 0.5 * i);
    const MembershipGrid grid9(nine, 0.5, 1);
    const auto p9 = fit_offline(target_fn, grid9, inner);
    const double e9 = sup_err_on(p9, grid9);
    // measured 1.121e-2: the refined rule base is genuinely better
    CHECK(e9 <= 0.015);
    CHECK(e9 < 0.5 * e5);
  }
}

TEST_CASE("offline fit failure modes") {
  const MembershipGrid grid(kFiveCenters, 1.0, 1);
  // fewer samples than rules -> precondition violation
  CHECK_THROWS_AS(
      fit_offline([](std::span<const double>) { return 0.0; }, grid, grid_samples_1d(0, 1, 3)),
      std::invalid_argument);
  // many samples, but all at one point -> rank-deficient design
  std::vector<std::vector<double>> degenerate(40, std::vector<double>{0.0});
  CHECK_THROWS_AS(fit_offline([](std::span<const double>) { return 1.0; }, grid, degenerate),
                  NumericError);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(MembershipGrid({1.0}, 1.0, 1), std::invalid_argument);       // one center
  CHECK_THROWS_AS(MembershipGrid(kFiveCenters, 0.0, 1), std::invalid_argument);  // zero width
  CHECK_THROWS_AS(MembershipGrid(kFiveCenters, 1.0, 0), std::invalid_argument);  // no inputs
  const MembershipGrid g(kFiveCenters, 1.0, 3);
  CHECK(g.rules() == 125);
  CHECK(g.input_dim() == 3);
  CHECK_THROWS(basis(g, std::vector<double>{1.0}));  // dimension mismatch
}
