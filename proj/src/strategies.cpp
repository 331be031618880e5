#include "fwdrel/strategies.hpp"

#include <cmath>
#include <sstream>

namespace fwdrel {

CrraParams CrraParams::power(double gamma) {
  CrraParams p{gamma, false};
  p.validate();
  return p;
}

CrraParams CrraParams::log_utility() { return CrraParams{1.0, true}; }

void CrraParams::validate() const {
  if (log) return;
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be positive");
  if (gamma == 1.0) throw InvalidInput("gamma = 1 is the log case; use the log variant");
}

namespace {

std::string determinant_message(double d) {
  std::ostringstream os;
  os << "no Nash equilibrium: determinant " << d << " is below " << kDeterminantFloor;
  return os.str();
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be positive");
}

void require_power_gamma(double gamma) {
  require_gamma(gamma);
  if (gamma == 1.0) throw InvalidInput("gamma = 1 has no power criterion");
}

// L(l~) = Sigma^{-1} l~ scaled by the volatilities
Allocation dual_loading(const MarketPath& m, std::size_t k, const Allocation& lt) {
  const double q = 1.0 - m.rho * m.rho;
  return {(lt[0] - m.rho * lt[1]) / (q * m.sigma1[k]), (lt[1] - m.rho * lt[0]) / (q * m.sigma2[k])};
}

}  // namespace

NoEquilibrium::NoEquilibrium(double determinant)
    : std::runtime_error(determinant_message(determinant)), determinant_(determinant) {}

double eta_spec_at(const MarketPath& m, std::size_t k, double competitor, double theta,
                   double gamma, Manager manager, EtaForm form) {
  const bool one = manager == Manager::One;
  // b: competitor's volatility exposure, seen from the own asset
  const double b = (one ? m.sigma2[k] : m.sigma1[k]) * competitor;
  const double rho = m.rho;
  if (form == EtaForm::Direct) {
    const Allocation lt = modified_sharpe_spec_at(m, k, competitor, theta, manager);
    const double own = one ? lt[0] : lt[1];
    const double cross = one ? lt[1] : lt[0];
    return own * own + 2.0 * (rho * own - cross) * theta * b * gamma -
           (1.0 - rho * rho) * theta * theta * b * b * gamma * gamma;
  }
  const double li = one ? m.lambda1[k] : m.lambda2[k];
  const double lj = one ? m.lambda2[k] : m.lambda1[k];
  const double delta = gamma * lj / li + rho * (1.0 - gamma);
  const double lead = li - delta * theta * b;
  // gamma (1 - gamma + 1/theta) theta^2 split so that theta = 0 stays finite
  const double q = rho * rho * (1.0 - gamma) * (1.0 - gamma) + gamma * (1.0 - gamma) - delta * delta;
  return lead * lead + q * theta * theta * b * b + gamma * theta * b * b;
}

EtaPath eta_spec(const MarketPath& market, const StrategyPath& competitor, double theta,
                 double gamma, Manager manager, EtaForm form) {
  competitor.validate(Setting::Specialization, market.nodes());
  require_theta(theta);
  require_gamma(gamma);
  EtaPath out{std::vector<double>(market.nodes()), manager, form};
  for (std::size_t k = 0; k < market.nodes(); ++k) {
    out.values[k] = eta_spec_at(market, k, competitor.scalar_at(k), theta, gamma, manager, form);
  }
  return out;
}

namespace {

// log of exp(-int (1-gamma)/(2 gamma) eta ds)
std::vector<double> log_discount(const TimeGrid& grid, const EtaPath& eta, double gamma) {
  if (eta.values.size() != grid.nodes()) throw InvalidInput("eta length does not match the grid");
  const double c = (1.0 - gamma) / (2.0 * gamma);
  std::vector<double> out(grid.nodes(), 0.0);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    out[k + 1] = out[k] - c * eta.values[k] * grid.dt(k);
  }
  return out;
}

}  // namespace

ValuePath crra_value_spec(double x, const TimeGrid& grid, const EtaPath& eta, double gamma) {
  require_power_gamma(gamma);
  if (!(x > 0.0)) throw InvalidInput("relative wealth must be positive");
  const auto ld = log_discount(grid, eta, gamma);
  const double base = std::pow(x, 1.0 - gamma) / (1.0 - gamma);
  ValuePath out{std::vector<double>(grid.nodes())};
  for (std::size_t k = 0; k < grid.nodes(); ++k) out.values[k] = base * std::exp(ld[k]);
  return out;
}

ValuePath crra_value_along(std::span<const double> x, const TimeGrid& grid, const EtaPath& eta,
                           double gamma) {
  require_power_gamma(gamma);
  if (x.size() != grid.nodes()) throw InvalidInput("wealth length does not match the grid");
  const auto ld = log_discount(grid, eta, gamma);
  ValuePath out{std::vector<double>(grid.nodes())};
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    if (!(x[k] > 0.0)) throw InvalidInput("relative wealth must be positive");
    out.values[k] = std::pow(x[k], 1.0 - gamma) / (1.0 - gamma) * std::exp(ld[k]);
  }
  return out;
}

StrategyPath best_response_spec(const MarketPath& m, const StrategyPath& competitor, double theta,
                                const CrraParams& prefs, Manager manager, ResponseForm form) {
  competitor.validate(Setting::Specialization, m.nodes());
  require_theta(theta);
  prefs.validate();
  const double tol = prefs.tolerance();
  const bool one = manager == Manager::One;
  std::vector<double> out(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const double c = competitor.scalar_at(k);
    const double s_own = one ? m.sigma1[k] : m.sigma2[k];
    const double s_other = one ? m.sigma2[k] : m.sigma1[k];
    const double hedge = m.rho * theta * (s_other / s_own) * c;
    if (form == ResponseForm::Modified) {
      const Allocation lt = modified_sharpe_spec_at(m, k, c, theta, manager);
      out[k] = tol * (one ? lt[0] : lt[1]) / s_own + hedge;
    } else {
      const double l = one ? m.lambda1[k] : m.lambda2[k];
      out[k] = tol * l / s_own + (1.0 - tol) * hedge;
    }
  }
  return StrategyPath::scalar(std::move(out));
}

LogCriterion log_value_spec(double x, const MarketPath& m, const StrategyPath& competitor,
                            double theta, Manager manager) {
  if (!(x > 0.0)) throw InvalidInput("relative wealth must be positive");
  competitor.validate(Setting::Specialization, m.nodes());
  require_theta(theta);
  const bool one = manager == Manager::One;
  LogCriterion out;
  out.strategy = best_response_spec(m, competitor, theta, CrraParams::log_utility(), manager);
  out.drift.resize(m.nodes());
  out.value.values.resize(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const double c = competitor.scalar_at(k);
    const Allocation lt = modified_sharpe_spec_at(m, k, c, theta, manager);
    const double own = one ? lt[0] : lt[1];
    const double cross = one ? lt[1] : lt[0];
    const double b = (one ? m.sigma2[k] : m.sigma1[k]) * c;
    out.drift[k] = -0.5 * own * own - (m.rho * own - cross) * theta * b +
                   0.5 * (1.0 - m.rho * m.rho) * theta * theta * b * b;
  }
  double K = 0.0;
  const double lx = std::log(x);
  out.value.values[0] = lx;
  for (std::size_t k = 0; k < m.grid.steps(); ++k) {
    K += out.drift[k] * m.grid.dt(k);
    out.value.values[k + 1] = lx + K;
  }
  return out;
}

double nash_determinant_spec(double g1, double g2, double t1, double t2, double rho) {
  return g1 * g2 - rho * rho * t1 * t2 * (1.0 - g1) * (1.0 - g2);
}

double nash_determinant_div(double g1, double g2, double t1, double t2) {
  return g1 * g2 - t1 * t2 * (1.0 - g1) * (1.0 - g2);
}

NashOutcome nash_spec(const MarketPath& m, double g1, double g2, const CompetitionParams& params,
                      double x1, double x2) {
  require_power_gamma(g1);
  require_power_gamma(g2);
  require_theta(params.theta1);
  require_theta(params.theta2);
  const double t1 = params.theta1, t2 = params.theta2, rho = m.rho;
  const double d = nash_determinant_spec(g1, g2, t1, t2, rho);
  if (!(std::abs(d) > kDeterminantFloor)) throw NoEquilibrium(d);

  // d = g1 g2 q; dividing through keeps the rho = 0 case free of rounding
  const double q = 1.0 - rho * rho * t1 * t2 * (1.0 - g1) * (1.0 - g2) / (g1 * g2);
  std::vector<double> a(m.nodes()), b(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const double l1 = m.lambda1[k], l2 = m.lambda2[k];
    a[k] = (l1 - rho * t1 * (1.0 - g1) * l2 / g2) / (g1 * m.sigma1[k] * q);
    b[k] = (l2 - rho * t2 * (1.0 - g2) * l1 / g1) / (g2 * m.sigma2[k] * q);
  }
  NashOutcome out;
  out.setting = Setting::Specialization;
  out.alpha = StrategyPath::scalar(std::move(a));
  out.beta = StrategyPath::scalar(std::move(b));
  out.determinant = d;
  out.gamma1 = g1;
  out.gamma2 = g2;
  out.params = params;
  out.eta1 = eta_spec(m, out.beta, t1, g1, Manager::One);
  out.eta2 = eta_spec(m, out.alpha, t2, g2, Manager::Two);
  out.value1 = crra_value_spec(x1, m.grid, out.eta1, g1);
  out.value2 = crra_value_spec(x2, m.grid, out.eta2, g2);
  return out;
}

StrategyPath best_response_div(const MarketPath& m, const StrategyPath& competitor, double theta,
                               std::span<const double> H, Manager manager, ResponseForm form) {
  competitor.validate(Setting::Diversification, m.nodes());
  require_theta(theta);
  CorrelationSpec::require_non_degenerate(m.rho);
  if (H.size() != m.nodes()) throw InvalidInput("tolerance process length does not match the grid");
  (void)manager;  // the diversification response is symmetric in the manager
  std::vector<Allocation> out(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const Allocation& c = competitor.at(k);
    if (form == ResponseForm::Modified) {
      const Allocation L = dual_loading(m, k, modified_sharpe_div_at(m, k, c, theta));
      out[k] = {L[0] * H[k] + theta * c[0], L[1] * H[k] + theta * c[1]};
    } else {
      const Allocation L = dual_loading(m, k, {m.lambda1[k], m.lambda2[k]});
      out[k] = {L[0] * H[k] + (1.0 - H[k]) * theta * c[0],
                L[1] * H[k] + (1.0 - H[k]) * theta * c[1]};
    }
  }
  return StrategyPath::vector(std::move(out));
}

Allocation feedback_allocation_div(const MarketPath& m, std::size_t k, const Allocation& c,
                                   double theta, const HeatFunction& h, double z, double A_k,
                                   double B_k) {
  if (!(z > 0.0)) throw InvalidInput("relative wealth must be positive");
  const double R = risk_tolerance(h, z / B_k, A_k);
  const Allocation L = dual_loading(m, k, modified_sharpe_div_at(m, k, c, theta));
  return {L[0] * R + theta * c[0], L[1] * R + theta * c[1]};
}

StrategyPath worthless_competitor(const MarketPath& m, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidInput("theta must lie in (0, 1]");
  CorrelationSpec::require_non_degenerate(m.rho);
  std::vector<Allocation> out(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const Allocation L = dual_loading(m, k, {m.lambda1[k], m.lambda2[k]});
    out[k] = {L[0] / theta, L[1] / theta};
  }
  return StrategyPath::vector(std::move(out));
}

AtomicMeasure crra_measure(double gamma) {
  require_gamma(gamma);
  return AtomicMeasure::dirac(1.0 / gamma);
}

DiversificationClock diversification_clock(const MarketPath& m, const StrategyPath& competitor,
                                           double theta, Manager manager, ShiftLoading loading) {
  DiversificationClock out;
  out.sharpe = modified_sharpe_div(m, competitor, theta, manager);
  auto [A, M] = compute_A_M(out.sharpe, m.rho, m.grid, m.brownian, loading);
  out.A = std::move(A);
  out.M = std::move(M);
  const auto C = competition_quadratic(m.sigma1, m.sigma2, m.rho, competitor);
  out.B = compute_B(theta, C, m.grid);
  return out;
}

NashOutcome nash_div(const MarketPath& m, double g1, double g2, const CompetitionParams& params,
                     double x1, double x2) {
  require_power_gamma(g1);
  require_power_gamma(g2);
  require_theta(params.theta1);
  require_theta(params.theta2);
  CorrelationSpec::require_non_degenerate(m.rho);
  const double t1 = params.theta1, t2 = params.theta2;
  const double d = nash_determinant_div(g1, g2, t1, t2);
  if (!(std::abs(d) > kDeterminantFloor)) throw NoEquilibrium(d);

  NashOutcome out;
  out.setting = Setting::Diversification;
  out.determinant = d;
  out.gamma1 = g1;
  out.gamma2 = g2;
  out.params = params;
  out.c_alpha = (g2 + t1 * (g1 - 1.0)) / d;
  out.c_beta = (g1 + t2 * (g2 - 1.0)) / d;

  std::vector<Allocation> a(m.nodes()), b(m.nodes());
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const Allocation L = dual_loading(m, k, {m.lambda1[k], m.lambda2[k]});
    a[k] = {out.c_alpha * L[0], out.c_alpha * L[1]};
    b[k] = {out.c_beta * L[0], out.c_beta * L[1]};
  }
  out.alpha = StrategyPath::vector(std::move(a));
  out.beta = StrategyPath::vector(std::move(b));

  auto values = [&](const StrategyPath& comp, double theta, double gamma, double x, Manager who) {
    const auto clock = diversification_clock(m, comp, theta, who);
    const ForwardUtility u(HeatFunction(crra_measure(gamma)));
    ValuePath v{std::vector<double>(m.nodes())};
    for (std::size_t k = 0; k < m.nodes(); ++k) {
      v.values[k] = forward_value_div(u, x, clock.A.values[k], clock.B.values[k]);
    }
    return v;
  };
  out.value1 = values(out.beta, t1, g1, x1, Manager::One);
  out.value2 = values(out.alpha, t2, g2, x2, Manager::Two);
  return out;
}

}  // namespace fwdrel
