#include <doctest.h>

#include <cmath>
#include <vector>

#include "fwdrel/market.hpp"
#include "fwdrel/verify.hpp"
#include "fwdrel/wealth.hpp"

using namespace fwdrel;

namespace {

MarketPath make_market(double rho, std::size_t steps = 200, std::uint64_t path = 0,
                       CoefficientModel model = CoefficientModel::from_sharpe(0.3, 0.3, 0.2, 0.2)) {
  const TimeGrid g = TimeGrid::uniform(1.0, steps);
  return realize_market(model, sample_brownian_path(g, CorrelationSpec{rho}, RngSeed{9}, path), g,
                        rho);
}

}  // namespace

TEST_CASE("modified Sharpe ratios, hand-computed values") {
  const MarketPath m = make_market(0.3, 4);
  const Allocation a = modified_sharpe_spec_at(m, 0, 0.8, 0.5, Manager::One);
  CHECK(a[0] == doctest::Approx(0.276));
  CHECK(a[1] == doctest::Approx(0.18));
  const Allocation b = modified_sharpe_spec_at(m, 0, 0.8, 0.5, Manager::Two);
  CHECK(b[0] == doctest::Approx(0.18));
  CHECK(b[1] == doctest::Approx(0.276));
  // 0.3 - 0.5 (0.2*0.5 + 0.3*0.2*0.3), 0.3 - 0.5 (0.3*0.2*0.5 + 0.2*0.3)
  const Allocation d = modified_sharpe_div_at(m, 0, {0.5, 0.3}, 0.5);
  CHECK(d[0] == doctest::Approx(0.241));
  CHECK(d[1] == doctest::Approx(0.255));
  CHECK(competition_quadratic(0.2, 0.2, 0.3, {0.5, 0.3}) ==
        doctest::Approx(0.01 + 2 * 0.3 * 0.1 * 0.06 + 0.0036));
}

TEST_CASE("zero strategies keep wealth constant") {
  const MarketPath m = make_market(0.5);
  const auto zero = StrategyPath::constant_scalar(m.nodes(), 0.0);
  const auto w = evolve_wealth_spec(m, zero, 2.5, 1);
  for (double v : w.values) CHECK(v == 2.5);
  const auto rel = evolve_relative_spec(m, zero, zero, {0.5, 0.5}, 1.7, Manager::Two);
  for (double v : rel.values) CHECK(v == 1.7);
  const auto zv = StrategyPath::constant_vector(m.nodes(), {0.0, 0.0});
  for (double v : evolve_wealth_div(m, zv, 3.0).values) CHECK(v == 3.0);
}

TEST_CASE("relative wealth equals X1 / X2^theta") {
  const double theta = 0.5;
  for (double rho : {-0.4, 0.0, 0.7}) {
    const MarketPath m = make_market(rho, 300, 3);
    std::vector<double> a(m.nodes()), b(m.nodes());
    for (std::size_t k = 0; k < m.nodes(); ++k) {
      a[k] = 0.6 + 0.4 * std::sin(3.0 * m.grid[k]);
      b[k] = 0.8 - 0.3 * m.grid[k];
    }
    const auto alpha = StrategyPath::scalar(a), beta = StrategyPath::scalar(b);
    const auto x1 = evolve_wealth_spec(m, alpha, 1.3, 1);
    const auto x2 = evolve_wealth_spec(m, beta, 0.9, 2);
    const auto r1 = evolve_relative_spec(m, alpha, beta, {theta, theta}, 1.3 / std::pow(0.9, theta),
                                         Manager::One);
    const auto r2 = evolve_relative_spec(m, alpha, beta, {theta, theta}, 0.9 / std::pow(1.3, theta),
                                         Manager::Two);
    for (std::size_t k = 0; k < m.nodes(); ++k) {
      CHECK(r1.values[k] == doctest::Approx(x1.values[k] / std::pow(x2.values[k], theta)).epsilon(1e-11));
      CHECK(r2.values[k] == doctest::Approx(x2.values[k] / std::pow(x1.values[k], theta)).epsilon(1e-11));
    }

    const auto pa = StrategyPath::constant_vector(m.nodes(), {0.7, -0.2});
    const auto pb = StrategyPath::constant_vector(m.nodes(), {0.5, 0.3});
    const auto y1 = evolve_wealth_div(m, pa, 1.0);
    const auto y2 = evolve_wealth_div(m, pb, 1.0);
    const auto d1 = evolve_relative_div(m, pa, pb, {theta, 0.25}, 1.0, Manager::One);
    const auto d2 = evolve_relative_div(m, pa, pb, {theta, 0.25}, 1.0, Manager::Two);
    for (std::size_t k = 0; k < m.nodes(); ++k) {
      CHECK(d1.values[k] == doctest::Approx(y1.values[k] / std::pow(y2.values[k], theta)).epsilon(1e-11));
      CHECK(d2.values[k] == doctest::Approx(y2.values[k] / std::pow(y1.values[k], 0.25)).epsilon(1e-11));
    }
  }
}

TEST_CASE("endowment representation rebuilds relative wealth") {
  const MarketPath m = make_market(0.3, 100, 1);
  const double theta = 0.4;
  SUBCASE("specialization") {
    const auto alpha = StrategyPath::constant_scalar(m.nodes(), 0.9);
    const auto beta = StrategyPath::constant_scalar(m.nodes(), 0.6);
    for (Manager who : {Manager::One, Manager::Two}) {
      const auto& own = who == Manager::One ? alpha : beta;
      const auto& comp = who == Manager::One ? beta : alpha;
      const auto direct = evolve_relative_spec(m, alpha, beta, {theta, theta}, 1.0, who);
      const auto rebuilt = evolve_relative_from_endowment(
          m, own, modified_sharpe_spec(m, comp, theta, who),
          endowment_increment(m, comp, theta, who, Setting::Specialization), 1.0, theta);
      for (std::size_t k = 0; k < m.nodes(); ++k) {
        CHECK(rebuilt.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("diversification") {
    const auto alpha = StrategyPath::constant_vector(m.nodes(), {0.4, 0.5});
    const auto beta = StrategyPath::constant_vector(m.nodes(), {-0.3, 0.9});
    const auto direct = evolve_relative_div(m, alpha, beta, {theta, theta}, 1.0, Manager::One);
    const auto rebuilt = evolve_relative_from_endowment(
        m, alpha, modified_sharpe_div(m, beta, theta, Manager::One),
        endowment_increment(m, beta, theta, Manager::One, Setting::Diversification), 1.0, theta);
    for (std::size_t k = 0; k < m.nodes(); ++k) {
      CHECK(rebuilt.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("pseudo stocks reduce to the traded stocks without competition") {
  const MarketPath m = make_market(0.2, 50);
  const auto zero = StrategyPath::constant_scalar(m.nodes(), 0.0);
  const auto one = StrategyPath::constant_scalar(m.nodes(), 1.0);
  const auto s = pseudo_stock_paths(m, zero, 0.5, Manager::One, Setting::Specialization);
  const auto s1 = evolve_wealth_spec(m, one, 1.0, 1);
  const auto s2 = evolve_wealth_spec(m, one, 1.0, 2);
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    CHECK(s[0][k] == doctest::Approx(s1.values[k]).epsilon(1e-13));
    CHECK(s[1][k] == doctest::Approx(s2.values[k]).epsilon(1e-13));
  }
}

TEST_CASE("Euler scheme: positivity guard and strong order one half") {
  CHECK_THROWS_AS(step_wealth(1.0, {0.0, 1.0, 0.0}, 0.0, 0.01, -2.0, 0.0, Scheme::Euler),
                  InvalidInput);
  CHECK(step_wealth(1.0, {0.0, 1.0, 0.0}, 0.0, 0.01, -2.0, 0.0, Scheme::LogEuler) > 0.0);

  // log-Euler is exact for constant coefficients, so it serves as the reference
  const auto model = CoefficientModel::from_sharpe(0.4, 0.3, 0.5, 0.4);
  const TimeGrid fine = TimeGrid::uniform(1.0, 256);
  const std::size_t n = 400;
  std::vector<double> steps, errors;
  for (std::size_t factor : {16, 8, 4, 2}) {
    const TimeGrid g = fine.coarsen(factor);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = coarsen(sample_brownian_path(fine, CorrelationSpec{0.3}, RngSeed{5}, i), factor);
      const MarketPath m = realize_market(model, w, g, 0.3);
      const auto p = StrategyPath::constant_vector(m.nodes(), {0.8, 0.6});
      const double exact = evolve_wealth_div(m, p, 1.0).values.back();
      err += std::abs(evolve_wealth_div(m, p, 1.0, Scheme::Euler).values.back() - exact);
    }
    steps.push_back(g.dt(0));
    errors.push_back(err / n);
  }
  const double order = fitted_order(steps, errors);
  CHECK(order > 0.35);
  CHECK(order < 0.65);
}

TEST_CASE("strategy validation") {
  const MarketPath m = make_market(0.0, 10);
  CHECK_THROWS_AS(evolve_wealth_spec(m, StrategyPath::constant_scalar(5, 1.0), 1.0, 1), InvalidInput);
  CHECK_THROWS_AS(evolve_wealth_div(m, StrategyPath::constant_scalar(m.nodes(), 1.0), 1.0),
                  InvalidInput);
  CHECK_THROWS_AS(evolve_wealth_spec(m, StrategyPath::constant_scalar(m.nodes(), NAN), 1.0, 1),
                  InvalidInput);
  CHECK_THROWS_AS(evolve_wealth_spec(m, StrategyPath::constant_scalar(m.nodes(), 1.0), 0.0, 1),
                  InvalidInput);
  CHECK_THROWS_AS(evolve_wealth_spec(m, StrategyPath::constant_scalar(m.nodes(), 1.0), 1.0, 3),
                  InvalidInput);
  CHECK_THROWS_AS((CompetitionParams{0.0, 0.5}.validate()), InvalidInput);
  CHECK_THROWS_AS(require_theta(1.5), InvalidInput);
}
