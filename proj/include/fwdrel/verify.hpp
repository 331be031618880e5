#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwdrel/criteria.hpp"
#include "fwdrel/market.hpp"
#include "fwdrel/strategies.hpp"
#include "fwdrel/wealth.hpp"

namespace fwdrel {

/// Per-path reduction used by the martingale test.
struct PathSummary {
  double v0 = 0.0;
  double vT = 0.0;
  double slope = 0.0;  // least-squares slope of V against t
};

PathSummary summarize(const ValuePath& path, const TimeGrid& grid);

struct MartingaleReport {
  double v0 = 0.0;
  double mean_terminal = 0.0;
  double se = 0.0;
  double drift_slope = 0.0;
  double slope_se = 0.0;
  double k = 3.0;
  std::size_t samples = 0;  // independent samples (pairs when antithetic)
  bool martingale = false;
  bool supermartingale = false;
  std::string verdict;
};

inline constexpr std::size_t kMinEnsemble = 1000;

/// |mean V_T - V_0| <= k SE -> martingale-consistent; mean V_T <= V_0 + k SE ->
/// supermartingale-consistent. With `antithetic_pairs`, entries 2j and 2j+1
/// are averaged first and the SE is taken over pairs.
MartingaleReport martingale_test(std::span<const PathSummary> paths, double k = 3.0,
                                 bool antithetic_pairs = false);
MartingaleReport martingale_test(std::span<const ValuePath> paths, const TimeGrid& grid,
                                 double k = 3.0, bool antithetic_pairs = false);

struct EnsembleOptions {
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool antithetic = false;
};

struct EnsembleResult {
  std::vector<PathSummary> summaries;
  std::vector<double> mean_path;  // ensemble mean of V at every node
};

using ValueFn = std::function<ValuePath(const MarketPath&)>;

/// Sample paths, realize the market and evaluate `fn` on each. Means are
/// reduced over fixed blocks in index order, so results do not depend on
/// the thread count.
EnsembleResult run_ensemble(const CoefficientModel& model, const TimeGrid& grid,
                            const CorrelationSpec& corr, const EnsembleOptions& options,
                            const ValueFn& fn);

struct ResidualReport {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::string normalization;
  std::size_t rows = 0, cols = 0;  // lattice shape
  bool finite = true;
  std::vector<double> column_max;  // max over rows per column, when the lattice has time columns
};

/// Substitute the CRRA closed form into the random PDE of manager 1 on
/// z_grid x (nodes but the last). Each residual is divided by the sum of the
/// absolute values of its four terms. `spatial_gamma` replaces gamma in the
/// spatial factor only (negative control); nullopt uses gamma.
ResidualReport pde_residual_spec(double gamma, double theta, const MarketPath& market,
                                 const StrategyPath& beta, std::span<const double> z_grid,
                                 std::optional<double> spatial_gamma = std::nullopt);

struct HeatResiduals {
  ResidualReport heat;        // |h_t + h_zz / 2| / |h|, termwise sums
  ResidualReport inverse;     // |h(h^{-1}(x)) - x| / x
  ResidualReport u_identity;  // |u_t u_zz - u_z^2 / 2| / u_z^2, analytic
  ResidualReport u_slope;     // |FD u_x - u_z| / u_z from the explicit primitive
};

struct SamplePoint {
  double z = 0.0;
  double x = 1.0;
  double t = 0.0;
};

HeatResiduals heat_and_u_residuals(const HeatFunction& h, std::span<const SamplePoint> points);

struct ConvergenceReport {
  std::vector<double> steps;   // dt per level
  std::vector<double> errors;  // error per level
  double order = 0.0;          // least-squares slope of log error on log dt
  // optional: mean error per level at the nodes of the coarsest level
  std::vector<double> times;
  std::vector<std::vector<double>> error_paths;
};

/// Central finite differences of the explicit u at spacing d, d/2, d/4, ...;
/// error is the mean relative residual of u_t u_xx - u_x^2 / 2.
ConvergenceReport u_finite_difference_study(const ForwardUtility& u,
                                            std::span<const SamplePoint> points,
                                            double spacing, std::size_t levels = 4);

double fitted_order(std::span<const double> steps, std::span<const double> errors);

/// Sup-norm gap between each equilibrium strategy and the best response to the
/// other. `theta_override` replaces theta of manager 1 in the recomputed
/// response (negative control).
double nash_fixed_point_check(const NashOutcome& outcome, const MarketPath& market,
                              std::optional<double> theta_override = std::nullopt);

struct MonotonicityReport {
  bool strictly_decreasing = true;
  double max_increment = 0.0;  // largest V(t_{j+1}) - V(t_j) seen
  std::size_t rows = 0, cols = 0;
};

/// V(x, t) = u(x / B_t, A_t) on x_grid x t_nodes against the competitor beta.
MonotonicityReport monotonicity_check_div(const HeatFunction& h, const MarketPath& market,
                                          const StrategyPath& beta, double theta,
                                          std::span<const double> x_grid,
                                          std::span<const std::size_t> t_nodes,
                                          Manager manager = Manager::One);

/// V(x, t) along the optimal path X = B x: constant for the worthless competitor.
std::vector<double> value_along_worthless(const HeatFunction& h, const MarketPath& market,
                                          double theta, double x0);

/// First node k >= 1 where eta_1 changes sign along beta, or nullopt.
/// sign(dV/dt) = -sign(eta_1) for the CRRA criterion.
std::optional<std::size_t> nonmonotonicity_witness_spec(double gamma, double theta,
                                                        const MarketPath& market,
                                                        const StrategyPath& beta);

/// Roots of eta_1 as a quadratic in sigma2 * beta at node k (ascending).
std::vector<double> eta_roots_spec(double gamma, double theta, const MarketPath& market,
                                   std::size_t k);

/// Diversification analogue: first lattice point where dV/dt >= 0, or nullopt.
std::optional<std::size_t> nonmonotonicity_witness_div(const HeatFunction& h,
                                                       const MarketPath& market,
                                                       const StrategyPath& beta, double theta,
                                                       std::span<const double> x_grid);

struct SdeComparisonOptions {
  std::vector<std::size_t> coarsening{4, 2, 1};  // factors applied to the fine grid
  std::size_t paths = 2000;
  std::uint64_t seed = 7;
  unsigned threads = 1;
  Scheme scheme = Scheme::LogEuler;
};

/// Evolve manager 1's relative wealth under the feedback optimum and compare
/// terminal values with the closed form driven by the same increments. Error
/// per level: mean of |X_sde(T) - X_cf(T)| / X_cf(T).
ConvergenceReport closed_form_vs_sde(const HeatFunction& h, const CoefficientModel& model,
                                     const CorrelationSpec& corr, double theta,
                                     const Allocation& beta, double x0, const TimeGrid& fine,
                                     const SdeComparisonOptions& options);

/// Martingale test of manager 2's CRRA value along its best response with
/// eta_2 in the symmetric form and in the alternative form whose cross term uses
/// rho lambda~_{1,1} (lambda~_{1,1} computed with the manager's own strategy).
struct Eta2Adjudication {
  MartingaleReport symmetric;
  MartingaleReport alternative;
};

Eta2Adjudication adjudicate_eta2(const CoefficientModel& model, const TimeGrid& grid,
                                 const CorrelationSpec& corr, double alpha, double theta2,
                                 double gamma2, const EnsembleOptions& options);

}  // namespace fwdrel
