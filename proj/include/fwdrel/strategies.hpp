#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fwdrel/criteria.hpp"
#include "fwdrel/market.hpp"
#include "fwdrel/wealth.hpp"

namespace fwdrel {

/// Power (gamma > 0, gamma != 1) or logarithmic preferences.
struct CrraParams {
  double gamma = 2.0;
  bool log = false;

  static CrraParams power(double gamma);
  static CrraParams log_utility();

  /// Relative risk tolerance 1/gamma; 1 for the log variant.
  double tolerance() const noexcept { return log ? 1.0 : 1.0 / gamma; }
  void validate() const;
};

/// Thrown when a Nash system is (numerically) singular.
class NoEquilibrium : public std::runtime_error {
 public:
  explicit NoEquilibrium(double determinant);
  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

inline constexpr double kDeterminantFloor = 1e-9;

enum class EtaForm {
  /// squared modified Sharpe plus competition cross terms
  Direct,
  /// (lambda_i - delta_i theta sigma pi)^2 + (...) theta^2 sigma^2 pi^2
  Rewritten,
};

struct EtaPath {
  std::vector<double> values;
  Manager manager = Manager::One;
  EtaForm form = EtaForm::Direct;
};

struct ValuePath {
  std::vector<double> values;
};

/// eta_i for manager i facing the scalar `competitor` strategy.
EtaPath eta_spec(const MarketPath& market, const StrategyPath& competitor, double theta,
                 double gamma, Manager manager, EtaForm form = EtaForm::Direct);

/// Nodewise eta at a single node, exposed for root finding.
double eta_spec_at(const MarketPath& market, std::size_t k, double competitor, double theta,
                   double gamma, Manager manager, EtaForm form = EtaForm::Direct);

/// x^{1-gamma}/(1-gamma) * exp(-int (1-gamma)/(2 gamma) eta ds), left-endpoint quadrature.
ValuePath crra_value_spec(double x, const TimeGrid& grid, const EtaPath& eta, double gamma);

/// The same criterion evaluated along a relative wealth path.
ValuePath crra_value_along(std::span<const double> relative_wealth, const TimeGrid& grid,
                           const EtaPath& eta, double gamma);

enum class ResponseForm {
  /// written with the modified Sharpe ratios
  Modified,
  /// written with the original market Sharpe ratios
  Original,
};

/// Optimal specialization strategy of `manager` against a scalar competitor.
StrategyPath best_response_spec(const MarketPath& market, const StrategyPath& competitor,
                                double theta, const CrraParams& prefs, Manager manager,
                                ResponseForm form = ResponseForm::Modified);

struct LogCriterion {
  ValuePath value;
  StrategyPath strategy;
  std::vector<double> drift;  // dK/dt at nodes
};

/// ln x + K_t with K' = -(1/2) l11^2 - (rho l11 - l12) theta s2 b + (1/2)(1 - rho^2) theta^2 s2^2 b^2.
LogCriterion log_value_spec(double x, const MarketPath& market, const StrategyPath& competitor,
                            double theta, Manager manager = Manager::One);

struct NashOutcome {
  Setting setting = Setting::Specialization;
  StrategyPath alpha;
  StrategyPath beta;
  double determinant = 0.0;
  double gamma1 = 2.0, gamma2 = 2.0;
  CompetitionParams params;
  // Specialization: eta of each manager at equilibrium. Diversification: empty.
  EtaPath eta1, eta2;
  // Diversification constants c_alpha, c_beta (unused for specialization).
  double c_alpha = 0.0, c_beta = 0.0;
  // Criteria of both managers at the initial relative wealths, along the market path.
  ValuePath value1, value2;
};

double nash_determinant_spec(double gamma1, double gamma2, double theta1, double theta2, double rho);
double nash_determinant_div(double gamma1, double gamma2, double theta1, double theta2);

NashOutcome nash_spec(const MarketPath& market, double gamma1, double gamma2,
                      const CompetitionParams& params, double x1 = 1.0, double x2 = 1.0);

/// Diversification best response for a given tolerance process H.
StrategyPath best_response_div(const MarketPath& market, const StrategyPath& competitor,
                               double theta, std::span<const double> H, Manager manager,
                               ResponseForm form = ResponseForm::Modified);

/// Feedback version: own allocation from the current relative wealth z,
/// L(lambda~) R(z / B, A) + theta * competitor.
Allocation feedback_allocation_div(const MarketPath& market, std::size_t k,
                                   const Allocation& competitor, double theta,
                                   const HeatFunction& h, double z, double A_k, double B_k);

/// Competitor strategy making the personalized market of the opponent worthless.
StrategyPath worthless_competitor(const MarketPath& market, double theta);

NashOutcome nash_div(const MarketPath& market, double gamma1, double gamma2,
                     const CompetitionParams& params, double x1 = 1.0, double x2 = 1.0);

/// Dirac measure at 1/gamma: the heat function generating power utility.
AtomicMeasure crra_measure(double gamma);

/// Time change and discount of `manager` in the diversification setting.
struct DiversificationClock {
  ModifiedSharpePath sharpe;
  TimeChangePath A;
  MartingalePartPath M;
  DiscountPath B;
};

DiversificationClock diversification_clock(const MarketPath& market, const StrategyPath& competitor,
                                           double theta, Manager manager,
                                           ShiftLoading loading = ShiftLoading::DualSharpe);

}  // namespace fwdrel
