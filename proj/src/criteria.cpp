#include "fwdrel/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fwdrel {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidInput("measure needs at least one atom");
  for (const Atom& a : atoms_) {
    if (!(a.y > 0.0) || !std::isfinite(a.y)) throw InvalidInput("atom locations must be positive and finite");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw InvalidInput("atom weights must be positive and finite");
  }
}

AtomicMeasure AtomicMeasure::dirac(double y, double w) { return AtomicMeasure({Atom{y, w}}); }

double AtomicMeasure::mass() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.w;
  return s;
}

double AtomicMeasure::min_location() const noexcept {
  double m = atoms_.front().y;
  for (const Atom& a : atoms_) m = std::min(m, a.y);
  return m;
}

double AtomicMeasure::max_location() const noexcept {
  double m = atoms_.front().y;
  for (const Atom& a : atoms_) m = std::max(m, a.y);
  return m;
}

HeatFunction::HeatFunction(AtomicMeasure measure) : measure_(std::move(measure)) {
  log_w_.reserve(measure_.size());
  for (const Atom& a : measure_.atoms()) log_w_.push_back(std::log(a.w));
}

namespace {

struct Moments {
  double log_scale;  // m
  double s0, s1, s2;  // sum y^j exp(e_k - m)
};

template <typename ExponentFn>
Moments moments(const AtomicMeasure& mu, ExponentFn&& exponent) {
  const auto& atoms = mu.atoms();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < atoms.size(); ++k) m = std::max(m, exponent(k));
  Moments out{m, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double e = std::exp(exponent(k) - m);
    const double y = atoms[k].y;
    out.s0 += e;
    out.s1 += y * e;
    out.s2 += y * y * e;
  }
  return out;
}

double checked_exp(double x) {
  const double v = std::exp(x);
  if (!std::isfinite(v)) throw std::overflow_error("heat function value overflows double precision");
  return v;
}

}  // namespace

HeatDerivatives HeatFunction::eval(double z, double t) const {
  if (!(t >= 0.0)) throw InvalidInput("heat function requires t >= 0");
  const auto& atoms = measure_.atoms();
  const Moments mo = moments(measure_, [&](std::size_t k) {
    return log_w_[k] + atoms[k].y * z - 0.5 * atoms[k].y * atoms[k].y * t;
  });
  const double scale = checked_exp(mo.log_scale);
  return {scale * mo.s0, scale * mo.s1, scale * mo.s2, -0.5 * scale * mo.s2};
}

double HeatFunction::log_value(double z, double t) const {
  const auto& atoms = measure_.atoms();
  const Moments mo = moments(measure_, [&](std::size_t k) {
    return log_w_[k] + atoms[k].y * z - 0.5 * atoms[k].y * atoms[k].y * t;
  });
  return mo.log_scale + std::log(mo.s0);
}

double HeatFunction::log_dz(double z, double t) const {
  const auto& atoms = measure_.atoms();
  const Moments mo = moments(measure_, [&](std::size_t k) {
    return log_w_[k] + atoms[k].y * z - 0.5 * atoms[k].y * atoms[k].y * t;
  });
  return mo.log_scale + std::log(mo.s1);
}

double HeatFunction::ratio(double z, double t) const { return ratios(z, t).first; }

std::pair<double, double> HeatFunction::ratios(double z, double t) const {
  const auto& atoms = measure_.atoms();
  const Moments mo = moments(measure_, [&](std::size_t k) {
    return log_w_[k] + atoms[k].y * z - 0.5 * atoms[k].y * atoms[k].y * t;
  });
  return {mo.s1 / mo.s0, mo.s2 / mo.s0};
}

double HeatFunction::inverse(double x, double t) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput("h_inverse requires x > 0");
  if (!(t >= 0.0)) throw InvalidInput("h_inverse requires t >= 0");
  const double target = std::log(x);
  auto g = [&](double z) { return log_value(z, t) - target; };

  // log h is increasing and convex with slope in [y_min, y_max], which
  // brackets the root from a single evaluation at 0.
  const double ymin = measure_.min_location(), ymax = measure_.max_location();
  const double g0 = g(0.0);
  if (g0 == 0.0) return 0.0;
  double lo = g0 > 0.0 ? -g0 / ymin : -g0 / ymax;
  double hi = g0 > 0.0 ? -g0 / ymax : -g0 / ymin;

  // Newton from the right end stays right of the root for convex increasing g.
  double z = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double gz = g(z);
    if (gz == 0.0) return z;
    if (gz > 0.0) hi = std::min(hi, z);
    else lo = std::max(lo, z);
    double next = z - gz / ratio(z, t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z))) {
      return next;
    }
    z = next;
  }
  return z;
}

HeatDerivatives h_eval(const HeatFunction& h, double z, double t) { return h.eval(z, t); }
double h_inverse(const HeatFunction& h, double x, double t) { return h.inverse(x, t); }

ForwardUtility::ForwardUtility(HeatFunction h, std::optional<double> anchor) : h_(std::move(h)) {
  if (anchor) {
    offset_ = *anchor - primitive(h_.inverse(1.0, 0.0), 0.0);
    return;
  }
  const auto& mu = h_.measure();
  if (mu.is_dirac()) {
    const Atom& a = mu.atoms().front();
    // the dropped constant of the expm1 form restores w y / (y - 1) e^{(y-1) s}
    offset_ = a.y == 1.0 ? 0.0 : a.w * a.y / (a.y - 1.0);
  } else {
    offset_ = -primitive(h_.inverse(1.0, 0.0), 0.0);
  }
}

double ForwardUtility::primitive(double z, double t) const {
  double sum = 0.0;
  for (const Atom& a : h_.measure().atoms()) {
    const double s = z - 0.5 * (1.0 + a.y) * t;
    const double d = a.y - 1.0;
    sum += d == 0.0 ? a.w * s : a.w * a.y * std::expm1(d * s) / d;
  }
  return sum;
}

double ForwardUtility::value(double x, double t) const {
  return primitive(h_.inverse(x, t), t) + offset_;
}

UtilityDerivatives ForwardUtility::derivatives(double x, double t) const {
  const double z = h_.inverse(x, t);
  const double log_hz = h_.log_dz(z, t);
  const double base = -z + 0.5 * t;
  return {std::exp(base), -std::exp(base - log_hz), -0.5 * std::exp(base + log_hz)};
}

double u_derivative(const HeatFunction& h, double x, double t) {
  return std::exp(-h.inverse(x, t) + 0.5 * t);
}

double u_eval(const ForwardUtility& u, double x, double t) { return u.value(x, t); }

double risk_tolerance(const HeatFunction& h, double x, double t) {
  return h.ratio(h.inverse(x, t), t);
}

std::pair<TimeChangePath, MartingalePartPath> compute_A_M(const ModifiedSharpePath& sharpe,
                                                          double rho, const TimeGrid& grid,
                                                          const BrownianPath& brownian,
                                                          ShiftLoading loading) {
  CorrelationSpec::require_non_degenerate(rho);
  const std::size_t n = grid.nodes();
  if (sharpe.values.size() != n || brownian.w1.size() != n) {
    throw InvalidInput("A/M inputs do not match the grid");
  }
  const double det = 1.0 - rho * rho;
  TimeChangePath A{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  MartingalePartPath M{std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const double l1 = sharpe.values[k][0], l2 = sharpe.values[k][1];
    A.integrand[k] = (l1 * l1 - 2.0 * rho * l1 * l2 + l2 * l2) / det;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double l1 = sharpe.values[k][0], l2 = sharpe.values[k][1];
    double v1 = l1, v2 = l2;
    if (loading == ShiftLoading::DualSharpe) {
      v1 = (l1 - rho * l2) / det;
      v2 = (l2 - rho * l1) / det;
    }
    A.values[k + 1] = A.values[k] + A.integrand[k] * grid.dt(k);
    M.values[k + 1] = M.values[k] + v1 * brownian.dw1(k) + v2 * brownian.dw2(k);
  }
  return {std::move(A), std::move(M)};
}

DiscountPath compute_B(double theta, std::span<const double> competition, const TimeGrid& grid) {
  require_theta(theta);
  if (competition.size() != grid.nodes()) throw InvalidInput("competition path does not match the grid");
  DiscountPath B{std::vector<double>(grid.nodes(), 1.0), theta};
  const double c = 0.5 * theta * (1.0 - theta);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < grid.nodes(); ++k) {
    integral += competition[k] * grid.dt(k);
    B.values[k + 1] = std::exp(c * integral);
  }
  return B;
}

std::vector<double> TiltedMeasure::weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = checked_exp(log_weights[k]);
  return w;
}

TiltedMeasure tilt_measure(const AtomicMeasure& base, double A, double M) {
  if (!(A >= 0.0)) throw InvalidInput("tilt requires A >= 0");
  TiltedMeasure out{base, A, M, {}};
  for (const Atom& a : base.atoms()) {
    out.log_weights.push_back(std::log(a.w) + a.y * (1.0 - 0.5 * a.y) * A + a.y * M);
  }
  return out;
}

std::vector<double> H_process(const HeatFunction& h, double x0, std::span<const double> A,
                              std::span<const double> M) {
  if (!(x0 > 0.0)) throw InvalidInput("H process requires x0 > 0");
  if (A.size() != M.size()) throw InvalidInput("A and M differ in length");
  const double c = h.inverse(x0, 0.0);
  std::vector<double> H(A.size());
  for (std::size_t k = 0; k < A.size(); ++k) H[k] = h.ratio(c + A[k] + M[k], A[k]);
  return H;
}

double H_tilted(const HeatFunction& h, double x0, double A, double M) {
  const double c = h.inverse(x0, 0.0);
  const TiltedMeasure tilted = tilt_measure(h.measure(), A, M);
  const auto& atoms = h.measure().atoms();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < atoms.size(); ++k) m = std::max(m, atoms[k].y * c + tilted.log_weights[k]);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double e = std::exp(atoms[k].y * c + tilted.log_weights[k] - m);
    num += atoms[k].y * e;
    den += e;
  }
  return num / den;
}

double forward_value_div(const ForwardUtility& u, double x, double A_t, double B_t) {
  if (!(x > 0.0)) throw InvalidInput("forward value requires x > 0");
  return u.value(x / B_t, A_t);
}

RelativeWealthPath optimal_relative_wealth_div(const HeatFunction& h, double x0,
                                               std::span<const double> A,
                                               std::span<const double> M,
                                               std::span<const double> B, Manager owner,
                                               double theta) {
  if (!(x0 > 0.0)) throw InvalidInput("optimal wealth requires x0 > 0");
  if (A.size() != M.size() || A.size() != B.size()) throw InvalidInput("A, M, B differ in length");
  const double c = h.inverse(x0, 0.0);
  RelativeWealthPath out{std::vector<double>(A.size()), owner, theta};
  for (std::size_t k = 0; k < A.size(); ++k) {
    out.values[k] = B[k] * std::exp(h.log_value(c + A[k] + M[k], A[k]));
  }
  return out;
}

}  // namespace fwdrel
