#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "fwdrel/market.hpp"

namespace fwdrel {

enum class Setting { Specialization, Diversification };
enum class Manager { One = 1, Two = 2 };

/// Fractions of wealth in (S1, S2). Specialization strategies use slot 0 only.
using Allocation = std::array<double, 2>;

struct StrategyPath {
  Setting setting = Setting::Specialization;
  std::vector<Allocation> values;

  static StrategyPath scalar(std::vector<double> values);
  static StrategyPath vector(std::vector<Allocation> values);
  static StrategyPath constant_scalar(std::size_t nodes, double value);
  static StrategyPath constant_vector(std::size_t nodes, Allocation value);

  std::size_t nodes() const noexcept { return values.size(); }
  double scalar_at(std::size_t k) const { return values[k][0]; }
  const Allocation& at(std::size_t k) const { return values[k]; }

  /// Discrete admissibility proxy: right setting, right length, finite values.
  void validate(Setting expected, std::size_t nodes) const;
};

struct CompetitionParams {
  double theta1 = 1.0;
  double theta2 = 1.0;

  double theta(Manager m) const noexcept { return m == Manager::One ? theta1 : theta2; }
  void validate() const;
  bool operator==(const CompetitionParams&) const = default;
};

struct WealthPath {
  std::vector<double> values;
};

struct RelativeWealthPath {
  std::vector<double> values;
  Manager owner = Manager::One;
  double theta = 1.0;
};

/// Pairs (lambda~_{i,1}, lambda~_{i,2}) per node for manager i.
struct ModifiedSharpePath {
  Setting setting = Setting::Specialization;
  Manager manager = Manager::One;
  std::vector<Allocation> values;
};

enum class Scheme {
  /// exponential of the drift-corrected increment; positivity is exact
  LogEuler,
  /// plain Euler-Maruyama on dX/X, kept for convergence studies
  Euler,
};

/// dX/X = drift dt + load1 dW1 + load2 dW2 over one step.
struct ReturnCoefficients {
  double drift = 0.0;
  double load1 = 0.0;
  double load2 = 0.0;
};

/// Advance x over one step. Throws if the Euler scheme leaves (0, inf).
double step_wealth(double x, const ReturnCoefficients& c, double rho, double dt, double dw1,
                   double dw2, Scheme scheme);

WealthPath evolve_wealth_spec(const MarketPath& market, const StrategyPath& strategy, double x0,
                              int asset_index, Scheme scheme = Scheme::LogEuler);
WealthPath evolve_wealth_div(const MarketPath& market, const StrategyPath& strategy, double x0,
                             Scheme scheme = Scheme::LogEuler);

/// sigma1^2 p1^2 + 2 rho sigma1 sigma2 p1 p2 + sigma2^2 p2^2
double competition_quadratic(double sigma1, double sigma2, double rho, const Allocation& p);
std::vector<double> competition_quadratic(std::span<const double> sigma1,
                                          std::span<const double> sigma2, double rho,
                                          const StrategyPath& strategy);

/// (lambda~_{i,1}, lambda~_{i,2}) at node k.
Allocation modified_sharpe_spec_at(const MarketPath& market, std::size_t k, double competitor,
                                   double theta, Manager manager);
Allocation modified_sharpe_div_at(const MarketPath& market, std::size_t k,
                                  const Allocation& competitor, double theta);

ModifiedSharpePath modified_sharpe_spec(const MarketPath& market, const StrategyPath& competitor,
                                        double theta, Manager manager);
ModifiedSharpePath modified_sharpe_div(const MarketPath& market, const StrategyPath& competitor,
                                       double theta, Manager manager);

/// Relative-return coefficients at node k for `manager` holding `own`
/// against a competitor holding `competitor`.
ReturnCoefficients relative_coefficients_spec(const MarketPath& market, std::size_t k, double own,
                                              double competitor, double theta, Manager manager);
ReturnCoefficients relative_coefficients_div(const MarketPath& market, std::size_t k,
                                             const Allocation& own, const Allocation& competitor,
                                             double theta, Manager manager);

/// alpha is manager 1's strategy and beta manager 2's in both settings.
RelativeWealthPath evolve_relative_spec(const MarketPath& market, const StrategyPath& alpha,
                                        const StrategyPath& beta, const CompetitionParams& params,
                                        double x0, Manager manager,
                                        Scheme scheme = Scheme::LogEuler);
RelativeWealthPath evolve_relative_div(const MarketPath& market, const StrategyPath& alpha,
                                       const StrategyPath& beta, const CompetitionParams& params,
                                       double x0, Manager manager,
                                       Scheme scheme = Scheme::LogEuler);

/// Feedback policy: own allocation at node k given current relative wealth.
using FeedbackPolicy = std::function<Allocation(std::size_t k, double relative_wealth)>;

/// Diversification relative wealth of `manager` under a state-feedback policy.
/// `applied` receives the allocation used at each step when non-null.
RelativeWealthPath evolve_relative_div_feedback(const MarketPath& market,
                                                const StrategyPath& competitor, double theta,
                                                double x0, Manager manager,
                                                const FeedbackPolicy& policy,
                                                Scheme scheme = Scheme::LogEuler,
                                                std::vector<Allocation>* applied = nullptr);

/// Random-endowment returns dY per step together with their coefficients.
struct EndowmentPath {
  Setting setting = Setting::Specialization;
  Manager manager = Manager::One;
  std::vector<double> increments;              // dY over [t_k, t_k+1]
  std::vector<ReturnCoefficients> coefficients;  // drift and loadings of dY
};

EndowmentPath endowment_increment(const MarketPath& market, const StrategyPath& competitor,
                                  double theta, Manager manager, Setting setting);

/// Rebuild relative wealth from the own position in the pseudo stocks plus
/// the endowment returns.
RelativeWealthPath evolve_relative_from_endowment(const MarketPath& market, const StrategyPath& own,
                                                  const ModifiedSharpePath& sharpe,
                                                  const EndowmentPath& endowment, double x0,
                                                  double theta);

/// Pseudo-stock prices (starting at 1) of the personalized market of `manager`.
std::array<std::vector<double>, 2> pseudo_stock_paths(const MarketPath& market,
                                                      const StrategyPath& competitor,
                                                      double theta, Manager manager,
                                                      Setting setting);

void require_theta(double theta);

}  // namespace fwdrel
