#include "fwdrel/wealth.hpp"

#include <cmath>
#include <sstream>

namespace fwdrel {

StrategyPath StrategyPath::scalar(std::vector<double> values) {
  StrategyPath s;
  s.setting = Setting::Specialization;
  s.values.reserve(values.size());
  for (double v : values) s.values.push_back({v, 0.0});
  return s;
}

StrategyPath StrategyPath::vector(std::vector<Allocation> values) {
  StrategyPath s;
  s.setting = Setting::Diversification;
  s.values = std::move(values);
  return s;
}

StrategyPath StrategyPath::constant_scalar(std::size_t nodes, double value) {
  return scalar(std::vector<double>(nodes, value));
}

StrategyPath StrategyPath::constant_vector(std::size_t nodes, Allocation value) {
  return vector(std::vector<Allocation>(nodes, value));
}

void StrategyPath::validate(Setting expected, std::size_t n) const {
  if (setting != expected) {
    throw InvalidInput(expected == Setting::Specialization
                           ? "specialization requires a scalar strategy"
                           : "diversification requires a 2-vector strategy");
  }
  if (values.size() != n) throw InvalidInput("strategy length does not match the grid");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(values[k][0]) || !std::isfinite(values[k][1])) {
      std::ostringstream os;
      os << "non-finite strategy value at node " << k;
      throw InvalidInput(os.str());
    }
  }
}

void CompetitionParams::validate() const {
  for (double t : {theta1, theta2}) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("competition parameters must lie in (0, 1]");
  }
}

void require_theta(double theta) {
  // theta = 0 is accepted as the no-competition diagnostic limit
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidInput("theta must lie in [0, 1]");
}

double step_wealth(double x, const ReturnCoefficients& c, double rho, double dt, double dw1,
                   double dw2, Scheme scheme) {
  const double noise = c.load1 * dw1 + c.load2 * dw2;
  if (scheme == Scheme::LogEuler) {
    const double qv = c.load1 * c.load1 + 2.0 * rho * c.load1 * c.load2 + c.load2 * c.load2;
    return x * std::exp((c.drift - 0.5 * qv) * dt + noise);
  }
  const double next = x * (1.0 + c.drift * dt + noise);
  if (!(next > 0.0)) throw InvalidInput("Euler step left the positive half-line");
  return next;
}

namespace {

void require_positive(double x0) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw InvalidInput("initial wealth must be positive");
}

template <typename CoefFn>
std::vector<double> evolve(const MarketPath& m, double x0, Scheme scheme, CoefFn&& coef) {
  require_positive(x0);
  std::vector<double> x(m.nodes());
  x[0] = x0;
  for (std::size_t k = 0; k < m.grid.steps(); ++k) {
    x[k + 1] = step_wealth(x[k], coef(k), m.rho, m.grid.dt(k), m.brownian.dw1(k),
                           m.brownian.dw2(k), scheme);
  }
  return x;
}

}  // namespace

Allocation modified_sharpe_spec_at(const MarketPath& m, std::size_t k, double competitor,
                                   double theta, Manager manager) {
  if (manager == Manager::One) {
    return {m.lambda1[k] - m.rho * m.sigma2[k] * theta * competitor,
            m.lambda2[k] - 0.5 * m.sigma2[k] * (1.0 + theta) * competitor};
  }
  return {m.lambda1[k] - 0.5 * m.sigma1[k] * (1.0 + theta) * competitor,
          m.lambda2[k] - m.rho * m.sigma1[k] * theta * competitor};
}

Allocation modified_sharpe_div_at(const MarketPath& m, std::size_t k, const Allocation& c,
                                  double theta) {
  const double s1 = m.sigma1[k], s2 = m.sigma2[k];
  return {m.lambda1[k] - theta * (s1 * c[0] + m.rho * s2 * c[1]),
          m.lambda2[k] - theta * (m.rho * s1 * c[0] + s2 * c[1])};
}

namespace {

ReturnCoefficients endowment_spec(const MarketPath& m, std::size_t k, double competitor,
                                  double theta, Manager manager) {
  const Allocation lt = modified_sharpe_spec_at(m, k, competitor, theta, manager);
  if (manager == Manager::One) {
    const double load = -m.sigma2[k] * theta * competitor;
    return {load * lt[1], 0.0, load};
  }
  const double load = -m.sigma1[k] * theta * competitor;
  return {load * lt[0], load, 0.0};
}

ReturnCoefficients endowment_div(const MarketPath& m, std::size_t k, const Allocation& c,
                                 double theta) {
  const double s1 = m.sigma1[k], s2 = m.sigma2[k];
  const double load1 = -theta * s1 * c[0];
  const double load2 = -theta * s2 * c[1];
  const double cq = competition_quadratic(s1, s2, m.rho, c);
  return {load1 * m.lambda1[k] + load2 * m.lambda2[k] + 0.5 * theta * (1.0 + theta) * cq, load1,
          load2};
}

}  // namespace

WealthPath evolve_wealth_spec(const MarketPath& market, const StrategyPath& strategy, double x0,
                              int asset_index, Scheme scheme) {
  strategy.validate(Setting::Specialization, market.nodes());
  if (asset_index != 1 && asset_index != 2) throw InvalidInput("asset index must be 1 or 2");
  return {evolve(market, x0, scheme, [&](std::size_t k) {
    const double p = strategy.scalar_at(k);
    if (asset_index == 1) {
      const double s = market.sigma1[k] * p;
      return ReturnCoefficients{s * market.lambda1[k], s, 0.0};
    }
    const double s = market.sigma2[k] * p;
    return ReturnCoefficients{s * market.lambda2[k], 0.0, s};
  })};
}

WealthPath evolve_wealth_div(const MarketPath& market, const StrategyPath& strategy, double x0,
                             Scheme scheme) {
  strategy.validate(Setting::Diversification, market.nodes());
  return {evolve(market, x0, scheme, [&](std::size_t k) {
    const Allocation& p = strategy.at(k);
    const double a = market.sigma1[k] * p[0], b = market.sigma2[k] * p[1];
    return ReturnCoefficients{a * market.lambda1[k] + b * market.lambda2[k], a, b};
  })};
}

double competition_quadratic(double sigma1, double sigma2, double rho, const Allocation& p) {
  const double a = sigma1 * p[0], b = sigma2 * p[1];
  return a * a + 2.0 * rho * a * b + b * b;
}

std::vector<double> competition_quadratic(std::span<const double> sigma1,
                                          std::span<const double> sigma2, double rho,
                                          const StrategyPath& strategy) {
  strategy.validate(Setting::Diversification, sigma1.size());
  if (sigma2.size() != sigma1.size()) throw InvalidInput("volatility paths differ in length");
  std::vector<double> out(sigma1.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = competition_quadratic(sigma1[k], sigma2[k], rho, strategy.at(k));
  }
  return out;
}

ModifiedSharpePath modified_sharpe_spec(const MarketPath& market, const StrategyPath& competitor,
                                        double theta, Manager manager) {
  competitor.validate(Setting::Specialization, market.nodes());
  require_theta(theta);
  ModifiedSharpePath out{Setting::Specialization, manager, {}};
  out.values.resize(market.nodes());
  for (std::size_t k = 0; k < market.nodes(); ++k) {
    out.values[k] = modified_sharpe_spec_at(market, k, competitor.scalar_at(k), theta, manager);
  }
  return out;
}

ModifiedSharpePath modified_sharpe_div(const MarketPath& market, const StrategyPath& competitor,
                                       double theta, Manager manager) {
  competitor.validate(Setting::Diversification, market.nodes());
  require_theta(theta);
  ModifiedSharpePath out{Setting::Diversification, manager, {}};
  out.values.resize(market.nodes());
  for (std::size_t k = 0; k < market.nodes(); ++k) {
    out.values[k] = modified_sharpe_div_at(market, k, competitor.at(k), theta);
  }
  return out;
}

ReturnCoefficients relative_coefficients_spec(const MarketPath& m, std::size_t k, double own,
                                              double competitor, double theta, Manager manager) {
  const Allocation lt = modified_sharpe_spec_at(m, k, competitor, theta, manager);
  if (manager == Manager::One) {
    const double a = m.sigma1[k] * own, b = -m.sigma2[k] * theta * competitor;
    return {a * lt[0] + b * lt[1], a, b};
  }
  const double a = -m.sigma1[k] * theta * competitor, b = m.sigma2[k] * own;
  return {a * lt[0] + b * lt[1], a, b};
}

ReturnCoefficients relative_coefficients_div(const MarketPath& m, std::size_t k,
                                             const Allocation& own, const Allocation& competitor,
                                             double theta, Manager) {
  const Allocation lt = modified_sharpe_div_at(m, k, competitor, theta);
  const double a = m.sigma1[k] * own[0], b = m.sigma2[k] * own[1];
  const ReturnCoefficients y = endowment_div(m, k, competitor, theta);
  return {a * lt[0] + b * lt[1] + y.drift, a + y.load1, b + y.load2};
}

RelativeWealthPath evolve_relative_spec(const MarketPath& market, const StrategyPath& alpha,
                                        const StrategyPath& beta, const CompetitionParams& params,
                                        double x0, Manager manager, Scheme scheme) {
  alpha.validate(Setting::Specialization, market.nodes());
  beta.validate(Setting::Specialization, market.nodes());
  const double theta = params.theta(manager);
  require_theta(theta);
  const StrategyPath& own = manager == Manager::One ? alpha : beta;
  const StrategyPath& comp = manager == Manager::One ? beta : alpha;
  return {evolve(market, x0, scheme,
                 [&](std::size_t k) {
                   return relative_coefficients_spec(market, k, own.scalar_at(k),
                                                     comp.scalar_at(k), theta, manager);
                 }),
          manager, theta};
}

RelativeWealthPath evolve_relative_div(const MarketPath& market, const StrategyPath& alpha,
                                       const StrategyPath& beta, const CompetitionParams& params,
                                       double x0, Manager manager, Scheme scheme) {
  alpha.validate(Setting::Diversification, market.nodes());
  beta.validate(Setting::Diversification, market.nodes());
  const double theta = params.theta(manager);
  require_theta(theta);
  const StrategyPath& own = manager == Manager::One ? alpha : beta;
  const StrategyPath& comp = manager == Manager::One ? beta : alpha;
  return {evolve(market, x0, scheme,
                 [&](std::size_t k) {
                   return relative_coefficients_div(market, k, own.at(k), comp.at(k), theta,
                                                    manager);
                 }),
          manager, theta};
}

RelativeWealthPath evolve_relative_div_feedback(const MarketPath& market,
                                                const StrategyPath& competitor, double theta,
                                                double x0, Manager manager,
                                                const FeedbackPolicy& policy, Scheme scheme,
                                                std::vector<Allocation>* applied) {
  competitor.validate(Setting::Diversification, market.nodes());
  require_theta(theta);
  require_positive(x0);
  if (applied) applied->assign(market.nodes(), Allocation{0.0, 0.0});
  std::vector<double> x(market.nodes());
  x[0] = x0;
  for (std::size_t k = 0; k < market.grid.steps(); ++k) {
    const Allocation own = policy(k, x[k]);
    if (!std::isfinite(own[0]) || !std::isfinite(own[1])) {
      throw InvalidInput("feedback policy returned a non-finite allocation");
    }
    if (applied) (*applied)[k] = own;
    const auto c = relative_coefficients_div(market, k, own, competitor.at(k), theta, manager);
    x[k + 1] = step_wealth(x[k], c, market.rho, market.grid.dt(k), market.brownian.dw1(k),
                           market.brownian.dw2(k), scheme);
  }
  if (applied && market.nodes() > 1) (*applied).back() = policy(market.nodes() - 1, x.back());
  return {std::move(x), manager, theta};
}

EndowmentPath endowment_increment(const MarketPath& market, const StrategyPath& competitor,
                                  double theta, Manager manager, Setting setting) {
  competitor.validate(setting, market.nodes());
  require_theta(theta);
  EndowmentPath out{setting, manager, {}, {}};
  out.increments.resize(market.grid.steps());
  out.coefficients.resize(market.grid.steps());
  for (std::size_t k = 0; k < market.grid.steps(); ++k) {
    const ReturnCoefficients c =
        setting == Setting::Specialization
            ? endowment_spec(market, k, competitor.scalar_at(k), theta, manager)
            : endowment_div(market, k, competitor.at(k), theta);
    out.coefficients[k] = c;
    out.increments[k] =
        c.drift * market.grid.dt(k) + c.load1 * market.brownian.dw1(k) + c.load2 * market.brownian.dw2(k);
  }
  return out;
}

RelativeWealthPath evolve_relative_from_endowment(const MarketPath& market, const StrategyPath& own,
                                                  const ModifiedSharpePath& sharpe,
                                                  const EndowmentPath& endowment, double x0,
                                                  double theta) {
  const Setting setting = endowment.setting;
  own.validate(setting, market.nodes());
  if (sharpe.values.size() != market.nodes() || endowment.increments.size() != market.grid.steps()) {
    throw InvalidInput("sharpe/endowment paths do not match the grid");
  }
  require_positive(x0);
  std::vector<double> x(market.nodes());
  x[0] = x0;
  for (std::size_t k = 0; k < market.grid.steps(); ++k) {
    // own position in the pseudo stocks
    double a = 0.0, b = 0.0;
    if (setting == Setting::Specialization) {
      if (endowment.manager == Manager::One) {
        a = market.sigma1[k] * own.scalar_at(k);
      } else {
        b = market.sigma2[k] * own.scalar_at(k);
      }
    } else {
      a = market.sigma1[k] * own.at(k)[0];
      b = market.sigma2[k] * own.at(k)[1];
    }
    const Allocation& lt = sharpe.values[k];
    const ReturnCoefficients& y = endowment.coefficients[k];
    const double dt = market.grid.dt(k);
    const double own_return = (a * lt[0] + b * lt[1]) * dt + a * market.brownian.dw1(k) + b * market.brownian.dw2(k);
    const double l1 = a + y.load1, l2 = b + y.load2;
    const double qv = l1 * l1 + 2.0 * market.rho * l1 * l2 + l2 * l2;
    x[k + 1] = x[k] * std::exp(own_return + endowment.increments[k] - 0.5 * qv * dt);
  }
  return {std::move(x), endowment.manager, theta};
}

std::array<std::vector<double>, 2> pseudo_stock_paths(const MarketPath& market,
                                                      const StrategyPath& competitor,
                                                      double theta, Manager manager,
                                                      Setting setting) {
  const ModifiedSharpePath lt = setting == Setting::Specialization
                                    ? modified_sharpe_spec(market, competitor, theta, manager)
                                    : modified_sharpe_div(market, competitor, theta, manager);
  std::array<std::vector<double>, 2> out;
  for (int j = 0; j < 2; ++j) {
    out[j] = evolve(market, 1.0, Scheme::LogEuler, [&](std::size_t k) {
      const double s = j == 0 ? market.sigma1[k] : market.sigma2[k];
      return j == 0 ? ReturnCoefficients{s * lt.values[k][0], s, 0.0}
                    : ReturnCoefficients{s * lt.values[k][1], 0.0, s};
    });
  }
  return out;
}

}  // namespace fwdrel
