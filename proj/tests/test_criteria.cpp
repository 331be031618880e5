#include <doctest.h>

#include <cmath>
#include <vector>

#include "fwdrel/criteria.hpp"
#include "fwdrel/strategies.hpp"

using namespace fwdrel;

namespace {

HeatFunction two_atoms() { return HeatFunction(AtomicMeasure({{0.5, 1.0}, {2.0, 0.5}})); }

}  // namespace

TEST_CASE("atomic measure") {
  const AtomicMeasure mu({{2.0, 0.5}, {0.5, 1.0}});
  CHECK(mu.size() == 2);
  CHECK(mu.mass() == doctest::Approx(1.5));
  CHECK(mu.min_location() == 0.5);
  CHECK(mu.max_location() == 2.0);
  CHECK(AtomicMeasure::dirac(0.5).is_dirac());
  CHECK_THROWS_AS(AtomicMeasure({}), InvalidInput);
  CHECK_THROWS_AS(AtomicMeasure({{-1.0, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(AtomicMeasure({{1.0, 0.0}}), InvalidInput);
}

TEST_CASE("Dirac heat function matches its closed form") {
  const double y = 0.4, w = 1.5;
  const HeatFunction h(AtomicMeasure::dirac(y, w));
  for (double z : {-3.0, 0.0, 1.2}) {
    for (double t : {0.0, 0.7}) {
      const double v = w * std::exp(y * z - 0.5 * y * y * t);
      const HeatDerivatives d = h.eval(z, t);
      CHECK(d.value == doctest::Approx(v).epsilon(1e-13));
      CHECK(d.dz == doctest::Approx(y * v).epsilon(1e-13));
      CHECK(d.dzz == doctest::Approx(y * y * v).epsilon(1e-13));
      CHECK(d.dt == doctest::Approx(-0.5 * y * y * v).epsilon(1e-13));
      CHECK(h.ratio(z, t) == doctest::Approx(y));
      CHECK(h.log_value(z, t) == doctest::Approx(std::log(v)));
      CHECK(h.inverse(v, t) == doctest::Approx(z).epsilon(1e-12));
    }
  }
}

TEST_CASE("heat equation and inverse for two atoms") {
  const HeatFunction h = two_atoms();
  for (double z : {-5.0, -0.3, 0.0, 2.0, 8.0}) {
    for (double t : {0.0, 0.5, 3.0}) {
      const HeatDerivatives d = h.eval(z, t);
      CHECK(std::abs(d.dt + 0.5 * d.dzz) <= 1e-13 * (std::abs(d.dt) + 0.5 * std::abs(d.dzz)));
      const auto [r1, r2] = h.ratios(z, t);
      CHECK(r1 == doctest::Approx(d.dz / d.value).epsilon(1e-13));
      CHECK(r2 == doctest::Approx(d.dzz / d.value).epsilon(1e-13));
      CHECK(h.inverse(d.value, t) == doctest::Approx(z).epsilon(1e-10));
      CHECK(h_inverse(h, d.value, t) == doctest::Approx(z).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(h.inverse(0.0, 0.0), InvalidInput);
}

TEST_CASE("ratios stay finite where h itself overflows") {
  const HeatFunction h = two_atoms();
  CHECK(h.ratio(1000.0, 0.0) == doctest::Approx(2.0));
  CHECK(h.ratio(-1000.0, 0.0) == doctest::Approx(0.5));
  CHECK(std::isfinite(h.log_value(1000.0, 0.0)));
  CHECK(std::isfinite(h.log_dz(-1000.0, 1.0)));
  CHECK(std::isfinite(h.inverse(1e300, 0.0)));
  CHECK(std::isfinite(h.inverse(1e-300, 2.0)));
}

TEST_CASE("risk tolerance of two atoms lies between the atoms and increases in x") {
  const HeatFunction h = two_atoms();
  double prev = 0.0;
  for (double x : {1e-6, 0.01, 0.5, 1.0, 3.0, 100.0, 1e6}) {
    const double r = risk_tolerance(h, x, 0.5);
    CHECK(r > 0.5 - 1e-12);
    CHECK(r < 2.0 + 1e-12);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(risk_tolerance(HeatFunction(crra_measure(4.0)), 7.0, 1.0) == doctest::Approx(0.25));
}

TEST_CASE("forward utility: power and log anchors") {
  const ForwardUtility power(HeatFunction(crra_measure(2.0)));
  for (double x : {0.5, 1.0, 4.0}) {
    CHECK(power.value(x, 0.0) == doctest::Approx(-1.0 / x).epsilon(1e-12));
    CHECK(u_derivative(power.heat(), x, 0.0) == doctest::Approx(std::pow(x, -2.0)).epsilon(1e-12));
  }
  const ForwardUtility logu(HeatFunction(AtomicMeasure::dirac(1.0)));
  CHECK(logu.value(std::exp(1.3), 0.0) == doctest::Approx(1.3).epsilon(1e-12));
  const ForwardUtility mix(two_atoms());
  CHECK(mix.anchor() == doctest::Approx(0.0).epsilon(1e-14));
  const ForwardUtility shifted(two_atoms(), 2.5);
  CHECK(shifted.anchor() == doctest::Approx(2.5));
  CHECK(u_eval(shifted, 3.0, 0.4) - u_eval(mix, 3.0, 0.4) == doctest::Approx(2.5));
}

TEST_CASE("forward utility derivatives: slope, concavity and the time identity") {
  const ForwardUtility u(two_atoms());
  for (double x : {0.2, 1.0, 5.0}) {
    for (double t : {0.0, 0.6}) {
      const UtilityDerivatives d = u.derivatives(x, t);
      CHECK(d.u_z > 0.0);
      CHECK(d.u_zz < 0.0);
      CHECK(d.u_t == doctest::Approx(d.u_z * d.u_z / (2.0 * d.u_zz)).epsilon(1e-12));
      const double e = 1e-5 * x;
      const double fd = (u.value(x + e, t) - u.value(x - e, t)) / (2 * e);
      CHECK(fd == doctest::Approx(d.u_z).epsilon(1e-7));
      const double ft = (u.value(x, t + 1e-6) - u.value(x, t)) / 1e-6;
      CHECK(ft == doctest::Approx(d.u_t).epsilon(1e-4));
      CHECK(-d.u_z / (x * d.u_zz) == doctest::Approx(risk_tolerance(u.heat(), x, t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("time change and shift: d<M> = dA under the dual loading") {
  const double rho = 0.6;
  const TimeGrid g = TimeGrid::uniform(1.0, 20000);
  const auto w = sample_brownian_path(g, CorrelationSpec{rho}, RngSeed{4}, 0);
  ModifiedSharpePath lt{Setting::Diversification, Manager::One,
                        std::vector<Allocation>(g.nodes(), Allocation{0.3, -0.2})};
  const auto [A, M] = compute_A_M(lt, rho, g, w);
  const double delta = (0.09 + 2 * rho * 0.06 + 0.04) / (1 - rho * rho);
  CHECK(A.values[0] == 0.0);
  CHECK(A.values.back() == doctest::Approx(delta).epsilon(1e-12));
  double qv = 0.0;
  for (std::size_t k = 0; k + 1 < g.nodes(); ++k) {
    const double d = M.values[k + 1] - M.values[k];
    qv += d * d;
  }
  // relative SE of a realized QV over n steps is sqrt(2 / n) = 0.01
  CHECK(qv == doctest::Approx(delta).epsilon(0.04));

  const auto [A2, M2] = compute_A_M(lt, rho, g, w, ShiftLoading::Direct);
  double qv2 = 0.0;
  for (std::size_t k = 0; k + 1 < g.nodes(); ++k) {
    const double d = M2.values[k + 1] - M2.values[k];
    qv2 += d * d;
  }
  const double direct = 0.09 - 2 * rho * 0.06 + 0.04;
  CHECK(qv2 == doctest::Approx(direct).epsilon(0.04));
  CHECK(std::abs(qv2 - delta) > 0.5 * delta);
  CHECK_THROWS_AS(compute_A_M(lt, 1.0, g, w), InvalidInput);
}

TEST_CASE("discount process") {
  const TimeGrid g = TimeGrid::uniform(2.0, 40);
  const std::vector<double> c(g.nodes(), 0.3);
  const DiscountPath B = compute_B(0.4, c, g);
  CHECK(B.values[0] == 1.0);
  CHECK(B.values.back() == doctest::Approx(std::exp(0.5 * 0.4 * 0.6 * 0.3 * 2.0)));
  for (double b : compute_B(1.0, c, g).values) CHECK(b == 1.0);
  CHECK_THROWS_AS(compute_B(0.5, std::vector<double>(3, 0.1), g), InvalidInput);
}

TEST_CASE("tilted first moment equals H") {
  const HeatFunction h = two_atoms();
  const std::vector<double> A{0.0, 0.1, 0.3, 0.45};
  const std::vector<double> M{0.0, -0.2, 0.5, 0.1};
  const auto H = H_process(h, 1.7, A, M);
  REQUIRE(H.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(H[k] == doctest::Approx(H_tilted(h, 1.7, A[k], M[k])).epsilon(1e-12));
  }
  const TiltedMeasure tm = tilt_measure(h.measure(), 0.3, 0.5);
  CHECK(tm.log_weights[0] == doctest::Approx(std::log(1.0) + 0.5 * 0.75 * 0.3 + 0.5 * 0.5));
  CHECK(tm.weights()[1] == doctest::Approx(0.5 * std::exp(0.0 * 0.3 + 2.0 * 0.5)));
}

TEST_CASE("optimal relative wealth and value for a Dirac measure") {
  const double gamma = 2.0, y = 1.0 / gamma, x0 = 1.4;
  const HeatFunction h(crra_measure(gamma));
  const std::vector<double> A{0.0, 0.2}, M{0.0, 0.3}, B{1.0, 1.1};
  const auto X = optimal_relative_wealth_div(h, x0, A, M, B);
  CHECK(X.values[0] == doctest::Approx(x0));
  // h(c + A + M, A) = x0 exp(y (A + M) - y^2 A / 2)
  CHECK(X.values[1] == doctest::Approx(1.1 * x0 * std::exp(y * 0.5 - 0.5 * y * y * 0.2)));
  const ForwardUtility u(h);
  CHECK(forward_value_div(u, 2.2, 0.2, 1.1) == doctest::Approx(u.value(2.0, 0.2)));
}
