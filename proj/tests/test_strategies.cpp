#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fwdrel/strategies.hpp"

using namespace fwdrel;

namespace {

MarketPath constant_market(double l1, double l2, double s1, double s2, double rho,
                           std::size_t steps = 10) {
  const TimeGrid g = TimeGrid::uniform(1.0, steps);
  return realize_market(CoefficientModel::from_sharpe(l1, l2, s1, s2),
                        sample_brownian_path(g, CorrelationSpec{rho}, RngSeed{1}, 0), g, rho);
}

// f(a) = drift - gamma / 2 * qv of the relative return; V's drift vanishes
// exactly at the maximizer, and eta = 2 gamma max f.
struct Quadratic {
  double c0, c1, c2;
  double argmax() const { return -c1 / (2 * c2); }
  double max() const { return c0 - c1 * c1 / (4 * c2); }
};

Quadratic spec_objective(const MarketPath& m, double comp, double theta, double gamma,
                         Manager who) {
  auto f = [&](double a) {
    const ReturnCoefficients c = relative_coefficients_spec(m, 0, a, comp, theta, who);
    const double qv = c.load1 * c.load1 + 2 * m.rho * c.load1 * c.load2 + c.load2 * c.load2;
    return c.drift - 0.5 * gamma * qv;
  };
  const double f0 = f(0.0), fp = f(1.0), fm = f(-1.0);
  return {f0, 0.5 * (fp - fm), 0.5 * (fp + fm) - f0};
}

}  // namespace

TEST_CASE("gamma and preference validation") {
  CHECK_THROWS_AS(CrraParams::power(1.0), InvalidInput);
  CHECK_THROWS_AS(CrraParams::power(-2.0), InvalidInput);
  CHECK(CrraParams::log_utility().tolerance() == 1.0);
  CHECK(CrraParams::power(4.0).tolerance() == 0.25);
  CHECK(crra_measure(2.0).atoms().front().y == 0.5);
}

TEST_CASE("best response of the example scenario") {
  const MarketPath m = constant_market(0.3, 0.3, 0.2, 0.2, 0.3);
  const auto beta = StrategyPath::constant_scalar(m.nodes(), 0.8);
  const auto a = best_response_spec(m, beta, 0.5, CrraParams::power(2.0), Manager::One);
  // 0.5 * 0.276 / 0.2 + 0.3 * 0.5 * 0.8
  CHECK(a.scalar_at(0) == doctest::Approx(0.81));
  const auto eta = eta_spec(m, beta, 0.5, 2.0, Manager::One);
  CHECK(eta.values[0] == doctest::Approx(0.021776));
}

TEST_CASE("best response and eta maximize the relative drift") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.05, 0.6), sig(0.1, 0.5), cor(-0.8, 0.8),
      th(0.05, 1.0), gam(0.3, 6.0), comp(-1.5, 1.5);
  for (int i = 0; i < 30; ++i) {
    const MarketPath m = constant_market(lam(rng), lam(rng), sig(rng), sig(rng), cor(rng), 2);
    double gamma = gam(rng);
    if (std::abs(gamma - 1.0) < 1e-3) gamma = 2.0;
    const double theta = th(rng), c = comp(rng);
    for (Manager who : {Manager::One, Manager::Two}) {
      const Quadratic q = spec_objective(m, c, theta, gamma, who);
      const auto cs = StrategyPath::constant_scalar(m.nodes(), c);
      const double a = best_response_spec(m, cs, theta, CrraParams::power(gamma), who).scalar_at(0);
      const double ao = best_response_spec(m, cs, theta, CrraParams::power(gamma), who,
                                           ResponseForm::Original)
                            .scalar_at(0);
      CHECK(a == doctest::Approx(q.argmax()).epsilon(1e-9));
      CHECK(ao == doctest::Approx(a).epsilon(1e-12));
      const double eta = eta_spec_at(m, 0, c, theta, gamma, who);
      const double scale = std::max(1.0, std::abs(eta));
      CHECK(std::abs(eta - 2 * gamma * q.max()) < 1e-10 * scale);
      CHECK(std::abs(eta_spec_at(m, 0, c, theta, gamma, who, EtaForm::Rewritten) - eta) <
            1e-10 * scale);
    }
  }
}

TEST_CASE("eta without competition is the squared Sharpe ratio") {
  const MarketPath m = constant_market(0.4, 0.25, 0.3, 0.2, 0.5);
  CHECK(eta_spec_at(m, 0, 0.7, 0.0, 3.0, Manager::One) == doctest::Approx(0.16));
  CHECK(eta_spec_at(m, 0, 0.7, 0.0, 3.0, Manager::One, EtaForm::Rewritten) ==
        doctest::Approx(0.16));
  CHECK(eta_spec_at(m, 0, 0.0, 0.5, 3.0, Manager::Two) == doctest::Approx(0.0625));
}

TEST_CASE("CRRA value process") {
  const MarketPath m = constant_market(0.3, 0.3, 0.2, 0.2, 0.3, 4);
  const auto beta = StrategyPath::constant_scalar(m.nodes(), 0.8);
  const auto eta = eta_spec(m, beta, 0.5, 2.0, Manager::One);
  const auto v = crra_value_spec(2.0, m.grid, eta, 2.0);
  CHECK(v.values[0] == doctest::Approx(-0.5));
  CHECK(v.values.back() == doctest::Approx(-0.5 * std::exp(0.25 * 0.021776)));
  std::vector<double> x(m.nodes(), 2.0);
  CHECK(crra_value_along(x, m.grid, eta, 2.0).values == v.values);
  CHECK_THROWS_AS(crra_value_spec(0.0, m.grid, eta, 2.0), InvalidInput);
  CHECK_THROWS_AS(crra_value_spec(1.0, m.grid, eta, 1.0), InvalidInput);
}

TEST_CASE("log criterion drift is minus the maximal log growth") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int i = 0; i < 10; ++i) {
    const MarketPath m = constant_market(0.3, 0.2, 0.25, 0.15, u(rng), 2);
    const double c = u(rng), theta = 0.5 + 0.5 * std::abs(u(rng));
    const auto cs = StrategyPath::constant_scalar(m.nodes(), c);
    for (Manager who : {Manager::One, Manager::Two}) {
      const LogCriterion lc = log_value_spec(1.0, m, cs, theta, who);
      const Quadratic q = spec_objective(m, c, theta, 1.0, who);
      CHECK(lc.drift[0] == doctest::Approx(-q.max()).epsilon(1e-10));
      CHECK(lc.strategy.scalar_at(0) == doctest::Approx(q.argmax()).epsilon(1e-10));
    }
  }
  const MarketPath m = constant_market(0.3, 0.2, 0.25, 0.15, 0.4, 2);
  const auto zero = StrategyPath::constant_scalar(m.nodes(), 0.0);
  CHECK(log_value_spec(1.0, m, zero, 0.5).drift[0] == doctest::Approx(-0.045));
  CHECK(log_value_spec(std::exp(2.0), m, zero, 0.5).value.values[0] == doctest::Approx(2.0));
}

TEST_CASE("Nash equilibrium solves the pair of best responses") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lam(0.05, 0.6), sig(0.1, 0.5), cor(-0.9, 0.9),
      th(0.1, 1.0), gam(0.5, 5.0);
  int tested = 0;
  while (tested < 20) {
    const double g1 = gam(rng), g2 = gam(rng), t1 = th(rng), t2 = th(rng);
    const MarketPath m = constant_market(lam(rng), lam(rng), sig(rng), sig(rng), cor(rng), 2);
    if (std::abs(nash_determinant_spec(g1, g2, t1, t2, m.rho)) < 0.1) continue;
    ++tested;
    // best responses are affine in the competitor; solve the 2x2 system directly
    auto br = [&](double c, Manager who) {
      const auto cs = StrategyPath::constant_scalar(m.nodes(), c);
      const double g = who == Manager::One ? g1 : g2;
      const double t = who == Manager::One ? t1 : t2;
      return best_response_spec(m, cs, t, CrraParams::power(g), who).scalar_at(0);
    };
    const double a0 = br(0, Manager::One), a1 = br(1, Manager::One) - a0;
    const double b0 = br(0, Manager::Two), b1 = br(1, Manager::Two) - b0;
    const double alpha = (a0 + a1 * b0) / (1 - a1 * b1);
    const double beta = b0 + b1 * alpha;
    const NashOutcome n = nash_spec(m, g1, g2, {t1, t2});
    CHECK(n.alpha.scalar_at(0) == doctest::Approx(alpha).epsilon(1e-9));
    CHECK(n.beta.scalar_at(1) == doctest::Approx(beta).epsilon(1e-9));
    CHECK(n.value1.values.size() == m.nodes());
  }
}

TEST_CASE("uncorrelated Nash is the Merton pair, bit for bit") {
  const MarketPath m = constant_market(0.3, 0.25, 0.2, 0.1, 0.0);
  const NashOutcome n = nash_spec(m, 2.0, 3.0, {0.7, 0.4});
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    CHECK(n.alpha.scalar_at(k) == 0.3 / (2.0 * 0.2));
    CHECK(n.beta.scalar_at(k) == 0.25 / (3.0 * 0.1));
  }
}

TEST_CASE("singular Nash systems raise NoEquilibrium") {
  // rho^2 theta^2 ((1 - g) / g)^2 = 1 at g = 1/3, rho = 0.5, theta = 1
  const MarketPath m = constant_market(0.3, 0.3, 0.2, 0.2, 0.5);
  try {
    nash_spec(m, 1.0 / 3.0, 1.0 / 3.0, {1.0, 1.0});
    FAIL("expected NoEquilibrium");
  } catch (const NoEquilibrium& e) {
    CHECK(std::abs(e.determinant()) <= kDeterminantFloor);
    CHECK(std::string(e.what()).find("determinant") != std::string::npos);
  }
  // g1 g2 = theta1 theta2 (1 - g1)(1 - g2) at g = 1/2, theta = 1
  CHECK_THROWS_AS(nash_div(m, 0.5, 0.5, {1.0, 1.0}), NoEquilibrium);
  CHECK_THROWS_AS(nash_spec(m, 1.0, 2.0, {0.5, 0.5}), InvalidInput);
}

TEST_CASE("diversification best response is the stationary point of the relative drift") {
  const MarketPath m = constant_market(0.3, 0.2, 0.25, 0.15, -0.4);
  const double theta = 0.6, gamma = 2.5;
  const Allocation c{0.4, -0.7};
  const auto cs = StrategyPath::constant_vector(m.nodes(), c);
  const std::vector<double> H(m.nodes(), 1.0 / gamma);
  const auto p = best_response_div(m, cs, theta, H, Manager::One);
  const auto po = best_response_div(m, cs, theta, H, Manager::One, ResponseForm::Original);
  CHECK(po.at(3)[0] == doctest::Approx(p.at(3)[0]).epsilon(1e-12));
  CHECK(po.at(3)[1] == doctest::Approx(p.at(3)[1]).epsilon(1e-12));
  auto f = [&](Allocation a) {
    const ReturnCoefficients r = relative_coefficients_div(m, 0, a, c, theta, Manager::One);
    return r.drift - 0.5 * gamma * (r.load1 * r.load1 + 2 * m.rho * r.load1 * r.load2 + r.load2 * r.load2);
  };
  const Allocation s = p.at(0);
  const double e = 1e-3;
  CHECK(std::abs(f({s[0] + e, s[1]}) - f({s[0] - e, s[1]})) < 1e-12);
  CHECK(std::abs(f({s[0], s[1] + e}) - f({s[0], s[1] - e})) < 1e-12);
  CHECK(f({s[0] + 0.1, s[1] - 0.1}) < f(s));

  const HeatFunction h(crra_measure(gamma));
  const Allocation fb = feedback_allocation_div(m, 0, c, theta, h, 1.3, 0.2, 1.1);
  CHECK(fb[0] == doctest::Approx(s[0]).epsilon(1e-12));
  CHECK(fb[1] == doctest::Approx(s[1]).epsilon(1e-12));
}

TEST_CASE("diversification Nash is a fixed point with the stated constants") {
  const MarketPath m = constant_market(0.3, 0.2, 0.25, 0.15, 0.35);
  const double g1 = 2.0, g2 = 4.0, t1 = 0.5, t2 = 0.3;
  const NashOutcome n = nash_div(m, g1, g2, {t1, t2});
  const double d = g1 * g2 - t1 * t2 * (1 - g1) * (1 - g2);
  CHECK(n.determinant == doctest::Approx(d));
  CHECK(n.c_alpha == doctest::Approx((g2 + t1 * (g1 - 1)) / d));
  CHECK(n.c_beta == doctest::Approx((g1 + t2 * (g2 - 1)) / d));
  const auto a = best_response_div(m, n.beta, t1, std::vector<double>(m.nodes(), 1 / g1), Manager::One);
  const auto b = best_response_div(m, n.alpha, t2, std::vector<double>(m.nodes(), 1 / g2), Manager::Two);
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    for (int j = 0; j < 2; ++j) {
      CHECK(a.at(k)[j] == doctest::Approx(n.alpha.at(k)[j]).epsilon(1e-12));
      CHECK(b.at(k)[j] == doctest::Approx(n.beta.at(k)[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("worthless competitor cancels the modified Sharpe ratios") {
  const MarketPath m = constant_market(0.3, 0.2, 0.25, 0.15, 0.35);
  const auto w = worthless_competitor(m, 0.4);
  const auto lt = modified_sharpe_div(m, w, 0.4, Manager::One);
  for (const auto& v : lt.values) {
    CHECK(std::abs(v[0]) < 1e-15);
    CHECK(std::abs(v[1]) < 1e-15);
  }
  const auto clock = diversification_clock(m, w, 0.4, Manager::One);
  CHECK(clock.A.values.back() < 1e-28);
  CHECK(clock.B.values.back() > 1.0);
  CHECK_THROWS_AS(worthless_competitor(m, 0.0), InvalidInput);
}
