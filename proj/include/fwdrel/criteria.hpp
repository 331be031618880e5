#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fwdrel/market.hpp"
#include "fwdrel/wealth.hpp"

namespace fwdrel {

struct Atom {
  double y = 1.0;  // location, y > 0
  double w = 1.0;  // weight, w > 0
  bool operator==(const Atom&) const = default;
};

/// Finite positive measure with finitely many atoms on (0, inf).
class AtomicMeasure {
 public:
  explicit AtomicMeasure(std::vector<Atom> atoms);
  static AtomicMeasure dirac(double y, double w = 1.0);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool is_dirac() const noexcept { return atoms_.size() == 1; }
  double mass() const noexcept;
  double min_location() const noexcept;
  double max_location() const noexcept;

  bool operator==(const AtomicMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
};

/// h and its analytic derivatives at one point.
struct HeatDerivatives {
  double value = 0.0;
  double dz = 0.0;
  double dzz = 0.0;
  double dt = 0.0;
};

/// h(z, t) = sum_k w_k exp(y_k z - y_k^2 t / 2); solves h_t + h_zz / 2 = 0.
///
/// Every sum is evaluated as exp(m) * sum_k exp(e_k - m) with m the largest
/// exponent, so ratios such as h_z / h never overflow.
class HeatFunction {
 public:
  explicit HeatFunction(AtomicMeasure measure);

  const AtomicMeasure& measure() const noexcept { return measure_; }

  HeatDerivatives eval(double z, double t) const;
  double log_value(double z, double t) const;
  /// log h_z
  double log_dz(double z, double t) const;
  /// h_z / h
  double ratio(double z, double t) const;
  /// (h_z / h, h_zz / h)
  std::pair<double, double> ratios(double z, double t) const;

  /// Spatial inverse: the z with h(z, t) = x.
  double inverse(double x, double t) const;

 private:
  AtomicMeasure measure_;
  std::vector<double> log_w_;
};

HeatDerivatives h_eval(const HeatFunction& h, double z, double t);
double h_inverse(const HeatFunction& h, double x, double t);

/// Derivatives of u at (x, t).
struct UtilityDerivatives {
  double u_z = 0.0;
  double u_zz = 0.0;
  double u_t = 0.0;
};

/// Locally riskless forward utility generated by a heat function:
/// u_z(x, t) = exp(-h^{-1}(x, t) + t / 2), u_t = u_z^2 / (2 u_zz).
///
/// For atomic measures the primitive in x is explicit. Writing z = h^{-1}(x, t)
/// and s_k = z - (1 + y_k) t / 2,
///   u(x, t) = sum_k w_k y_k expm1((y_k - 1) s_k) / (y_k - 1) + offset,
/// with the y_k = 1 term read as w_k s_k. The offset fixes u(1, 0) to the
/// anchor; it never affects derivatives or strategies.
class ForwardUtility {
 public:
  /// Default anchor: the power/log form for a Dirac measure, u(1, 0) = 0 otherwise.
  explicit ForwardUtility(HeatFunction h, std::optional<double> anchor = std::nullopt);

  const HeatFunction& heat() const noexcept { return h_; }

  double value(double x, double t) const;
  UtilityDerivatives derivatives(double x, double t) const;
  double anchor() const noexcept { return value(1.0, 0.0); }

 private:
  double primitive(double z, double t) const;

  HeatFunction h_;
  double offset_ = 0.0;
};

double u_derivative(const HeatFunction& h, double x, double t);
double u_eval(const ForwardUtility& u, double x, double t);

/// R(x, t) = h_z / h evaluated at h^{-1}(x, t); equals -u_z / (x u_zz).
double risk_tolerance(const HeatFunction& h, double x, double t);

struct TimeChangePath {
  std::vector<double> values;     // A at nodes, A_0 = 0
  std::vector<double> integrand;  // Delta at nodes
};

struct MartingalePartPath {
  std::vector<double> values;  // M at nodes, M_0 = 0
};

/// How the stochastic shift M loads on (W1, W2).
enum class ShiftLoading {
  /// dM = v . dW with v = Sigma^{-1} lambda~, Sigma the correlation matrix; then d<M> = dA
  DualSharpe,
  /// dM = lambda~_1 dW1 + lambda~_2 dW2; coincides with DualSharpe only when rho = 0
  Direct,
};

std::pair<TimeChangePath, MartingalePartPath> compute_A_M(
    const ModifiedSharpePath& sharpe, double rho, const TimeGrid& grid,
    const BrownianPath& brownian, ShiftLoading loading = ShiftLoading::DualSharpe);

struct DiscountPath {
  std::vector<double> values;  // B at nodes, B_0 = 1
  double theta = 1.0;
};

/// B = exp(theta (1 - theta) / 2 * int C ds) with left-endpoint quadrature.
DiscountPath compute_B(double theta, std::span<const double> competition, const TimeGrid& grid);

struct TiltedMeasure {
  AtomicMeasure base;
  double A = 0.0;
  double M = 0.0;
  std::vector<double> log_weights;  // log(w_k) + y_k (1 - y_k / 2) A + y_k M

  std::vector<double> weights() const;
};

TiltedMeasure tilt_measure(const AtomicMeasure& base, double A, double M);

/// H_t = h_z / h at (h^{-1}(x0, 0) + A_t + M_t, A_t).
std::vector<double> H_process(const HeatFunction& h, double x0, std::span<const double> A,
                              std::span<const double> M);

/// The same quantity as a tilted first moment:
/// sum y e^{y c} dnu~ / sum e^{y c} dnu~ with c = h^{-1}(x0, 0).
double H_tilted(const HeatFunction& h, double x0, double A, double M);

/// V = u(x / B_t, A_t)
double forward_value_div(const ForwardUtility& u, double x, double A_t, double B_t);

/// X~* = B h(h^{-1}(x0, 0) + A + M, A)
RelativeWealthPath optimal_relative_wealth_div(const HeatFunction& h, double x0,
                                               std::span<const double> A,
                                               std::span<const double> M,
                                               std::span<const double> B,
                                               Manager owner = Manager::One, double theta = 1.0);

}  // namespace fwdrel
