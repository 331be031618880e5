#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwdrel {

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a realized market path breaks the standing admissibility
/// assumptions (positive volatility, Sharpe ratios inside [c, C]).
class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Ordered time nodes starting at zero.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// Uniform grid on [0, horizon] with `steps` intervals.
  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t nodes() const noexcept { return times_.size(); }
  std::size_t steps() const noexcept { return times_.size() - 1; }
  double operator[](std::size_t k) const { return times_[k]; }
  double dt(std::size_t k) const { return times_[k + 1] - times_[k]; }
  double horizon() const noexcept { return times_.back(); }
  bool is_uniform() const noexcept { return uniform_; }
  std::span<const double> times() const noexcept { return times_; }

  /// Coarsen by keeping every `factor`-th node. Requires steps() % factor == 0.
  TimeGrid coarsen(std::size_t factor) const;

 private:
  std::vector<double> times_;
  bool uniform_ = false;
};

struct CorrelationSpec {
  double rho = 0.0;
  double eps = 1e-6;

  void validate() const;
  /// Specialization-only operations need |rho| < 1 strictly; validate() is
  /// already stricter, this exists for call sites that take a raw rho.
  static void require_non_degenerate(double rho);
};

/// Per-path random stream: stream(seed, i) depends only on (seed, i).
struct RngSeed {
  std::uint64_t seed = 0;

  std::mt19937_64 stream(std::uint64_t path_index) const;
};

/// Brownian pair sampled on a grid; values at nodes, w[0] == 0.
struct BrownianPath {
  std::vector<double> w1;
  std::vector<double> w2;

  double dw1(std::size_t k) const { return w1[k + 1] - w1[k]; }
  double dw2(std::size_t k) const { return w2[k + 1] - w2[k]; }
};

/// Sampling options shared by every ensemble routine.
struct SamplingOptions {
  /// Paths 2j and 2j+1 share stream j with opposite signs.
  bool antithetic = false;
};

BrownianPath sample_brownian_path(const TimeGrid& grid, const CorrelationSpec& corr,
                                  const RngSeed& seed, std::uint64_t path_index,
                                  const SamplingOptions& options = {});

std::vector<BrownianPath> sample_brownian(const TimeGrid& grid, const CorrelationSpec& corr,
                                          const RngSeed& seed, std::size_t n_paths,
                                          unsigned threads = 1,
                                          const SamplingOptions& options = {});

/// Sum consecutive increments so a fine path lives on grid.coarsen(factor).
BrownianPath coarsen(const BrownianPath& path, std::size_t factor);

/// A scalar adapted coefficient, Markovian in (t, W1, W2).
class Coefficient {
 public:
  enum class Kind { Constant, Linear, TanhFactor };

  static Coefficient constant(double value);
  /// a + b t
  static Coefficient linear(double a, double b);
  /// base + amplitude * tanh(scale * W_driver(t)), driver in {1, 2}
  static Coefficient tanh_factor(double base, double amplitude, double scale, int driver);

  double operator()(double t, double w1, double w2) const;

  Kind kind() const noexcept { return kind_; }
  const std::array<double, 3>& params() const noexcept { return params_; }
  int driver() const noexcept { return driver_; }
  bool is_constant() const noexcept { return kind_ == Kind::Constant; }

  bool operator==(const Coefficient&) const = default;

 private:
  Kind kind_ = Kind::Constant;
  std::array<double, 3> params_{};
  int driver_ = 1;
};

struct SharpeBounds {
  double lower = 1e-8;
  double upper = 1e8;
  bool operator==(const SharpeBounds&) const = default;
};

struct CoefficientModel {
  Coefficient mu1 = Coefficient::constant(0.0);
  Coefficient mu2 = Coefficient::constant(0.0);
  Coefficient sigma1 = Coefficient::constant(0.2);
  Coefficient sigma2 = Coefficient::constant(0.2);
  Coefficient r = Coefficient::constant(0.0);
  SharpeBounds bounds{};

  /// Constant coefficients with prescribed Sharpe ratios; mu_i = r + sigma_i * lambda_i.
  static CoefficientModel from_sharpe(double lambda1, double lambda2, double sigma1,
                                      double sigma2, double r = 0.0);

  void validate() const;
  bool operator==(const CoefficientModel&) const = default;
};

/// A realized market: Brownian drivers plus coefficient and Sharpe paths.
struct MarketPath {
  TimeGrid grid;
  double rho = 0.0;
  BrownianPath brownian;
  std::vector<double> mu1, mu2, sigma1, sigma2, r;
  std::vector<double> lambda1, lambda2;

  std::size_t nodes() const noexcept { return grid.nodes(); }
};

MarketPath realize_market(const CoefficientModel& model, const BrownianPath& brownian,
                          const TimeGrid& grid, double rho);

/// Runs fn(i) for i in [0, n) over `threads` workers; fn must only write
/// to slot i of its own outputs.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace fwdrel
