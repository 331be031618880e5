#include "fwdrel/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace fwdrel {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw InvalidInput("time grid needs at least 2 points");
  if (times_.front() != 0.0) throw InvalidInput("time grid must start at 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) throw InvalidInput("time grid must be strictly increasing");
  }
  const double h0 = times_[1] - times_[0];
  uniform_ = true;
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (std::abs((times_[k] - times_[k - 1]) - h0) > 1e-12 * std::max(1.0, h0)) uniform_ = false;
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw InvalidInput("uniform grid needs horizon > 0 and steps >= 1");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::coarsen(std::size_t factor) const {
  if (factor == 0 || steps() % factor != 0) throw InvalidInput("coarsening factor must divide the step count");
  std::vector<double> t;
  t.reserve(steps() / factor + 1);
  for (std::size_t k = 0; k < nodes(); k += factor) t.push_back(times_[k]);
  return TimeGrid(std::move(t));
}

void CorrelationSpec::validate() const {
  if (!(eps > 0.0) || eps >= 1.0) throw InvalidInput("correlation guard eps must lie in (0, 1)");
  if (!std::isfinite(rho) || std::abs(rho) > 1.0 - eps) {
    std::ostringstream os;
    os << "correlation |rho| = " << std::abs(rho) << " exceeds 1 - eps = " << 1.0 - eps;
    throw InvalidInput(os.str());
  }
}

void CorrelationSpec::require_non_degenerate(double rho) {
  if (!std::isfinite(rho) || !(std::abs(rho) < 1.0)) throw InvalidInput("operation requires |rho| < 1");
}

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 RngSeed::stream(std::uint64_t path_index) const {
  const std::uint64_t a = mix(seed);
  const std::uint64_t b = mix(a ^ mix(path_index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

BrownianPath sample_brownian_path(const TimeGrid& grid, const CorrelationSpec& corr,
                                  const RngSeed& seed, std::uint64_t path_index,
                                  const SamplingOptions& options) {
  corr.validate();
  const std::uint64_t stream_index = options.antithetic ? path_index / 2 : path_index;
  const double sign = (options.antithetic && (path_index % 2 == 1)) ? -1.0 : 1.0;
  auto engine = seed.stream(stream_index);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double rho = corr.rho;
  const double rho_perp = std::sqrt(1.0 - rho * rho);
  BrownianPath path;
  path.w1.resize(grid.nodes());
  path.w2.resize(grid.nodes());
  path.w1[0] = path.w2[0] = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double sq = std::sqrt(grid.dt(k));
    const double z1 = sign * normal(engine);
    const double z2 = sign * normal(engine);
    const double d1 = sq * z1;
    path.w1[k + 1] = path.w1[k] + d1;
    path.w2[k + 1] = path.w2[k] + rho * d1 + rho_perp * sq * z2;
  }
  return path;
}

std::vector<BrownianPath> sample_brownian(const TimeGrid& grid, const CorrelationSpec& corr,
                                          const RngSeed& seed, std::size_t n_paths,
                                          unsigned threads, const SamplingOptions& options) {
  if (n_paths == 0) throw InvalidInput("n_paths must be >= 1");
  corr.validate();
  std::vector<BrownianPath> out(n_paths);
  parallel_for(n_paths, threads,
               [&](std::size_t i) { out[i] = sample_brownian_path(grid, corr, seed, i, options); });
  return out;
}

BrownianPath coarsen(const BrownianPath& path, std::size_t factor) {
  const std::size_t steps = path.w1.size() - 1;
  if (factor == 0 || steps % factor != 0) throw InvalidInput("coarsening factor must divide the step count");
  BrownianPath out;
  for (std::size_t k = 0; k < path.w1.size(); k += factor) {
    out.w1.push_back(path.w1[k]);
    out.w2.push_back(path.w2[k]);
  }
  return out;
}

Coefficient Coefficient::constant(double value) {
  Coefficient c;
  c.kind_ = Kind::Constant;
  c.params_ = {value, 0.0, 0.0};
  return c;
}

Coefficient Coefficient::linear(double a, double b) {
  Coefficient c;
  c.kind_ = Kind::Linear;
  c.params_ = {a, b, 0.0};
  return c;
}

Coefficient Coefficient::tanh_factor(double base, double amplitude, double scale, int driver) {
  if (driver != 1 && driver != 2) throw InvalidInput("tanh_factor driver must be 1 or 2");
  Coefficient c;
  c.kind_ = Kind::TanhFactor;
  c.params_ = {base, amplitude, scale};
  c.driver_ = driver;
  return c;
}

double Coefficient::operator()(double t, double w1, double w2) const {
  switch (kind_) {
    case Kind::Constant:
      return params_[0];
    case Kind::Linear:
      return params_[0] + params_[1] * t;
    case Kind::TanhFactor:
      return params_[0] + params_[1] * std::tanh(params_[2] * (driver_ == 1 ? w1 : w2));
  }
  return params_[0];
}

CoefficientModel CoefficientModel::from_sharpe(double lambda1, double lambda2, double sigma1,
                                               double sigma2, double r) {
  CoefficientModel m;
  m.mu1 = Coefficient::constant(r + sigma1 * lambda1);
  m.mu2 = Coefficient::constant(r + sigma2 * lambda2);
  m.sigma1 = Coefficient::constant(sigma1);
  m.sigma2 = Coefficient::constant(sigma2);
  m.r = Coefficient::constant(r);
  m.bounds.lower = std::min(lambda1, lambda2) * 0.5;
  m.bounds.upper = std::max(lambda1, lambda2) * 2.0;
  return m;
}

void CoefficientModel::validate() const {
  if (!(bounds.lower > 0.0) || !(bounds.upper >= bounds.lower) || !std::isfinite(bounds.upper)) {
    throw InvalidInput("Sharpe bounds must satisfy 0 < c <= C < inf");
  }
}

MarketPath realize_market(const CoefficientModel& model, const BrownianPath& brownian,
                          const TimeGrid& grid, double rho) {
  model.validate();
  const std::size_t n = grid.nodes();
  if (brownian.w1.size() != n || brownian.w2.size() != n) {
    throw InvalidInput("Brownian path does not match the grid");
  }
  MarketPath m{grid, rho, brownian, {}, {}, {}, {}, {}, {}, {}};
  for (auto* v : {&m.mu1, &m.mu2, &m.sigma1, &m.sigma2, &m.r, &m.lambda1, &m.lambda2}) v->resize(n);

  auto fail = [](const char* msg, std::size_t k, double value) {
    std::ostringstream os;
    os << msg << " at node " << k << " (value " << value << ")";
    throw AdmissibilityError(os.str(), k);
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid[k], a = brownian.w1[k], b = brownian.w2[k];
    m.mu1[k] = model.mu1(t, a, b);
    m.mu2[k] = model.mu2(t, a, b);
    m.sigma1[k] = model.sigma1(t, a, b);
    m.sigma2[k] = model.sigma2(t, a, b);
    m.r[k] = model.r(t, a, b);
    if (!(m.sigma1[k] > 0.0)) fail("sigma1 must be positive", k, m.sigma1[k]);
    if (!(m.sigma2[k] > 0.0)) fail("sigma2 must be positive", k, m.sigma2[k]);
    if (!(m.r[k] >= 0.0)) fail("interest rate must be nonnegative", k, m.r[k]);
    m.lambda1[k] = (m.mu1[k] - m.r[k]) / m.sigma1[k];
    m.lambda2[k] = (m.mu2[k] - m.r[k]) / m.sigma2[k];
    for (double lam : {m.lambda1[k], m.lambda2[k]}) {
      if (!(lam >= model.bounds.lower && lam <= model.bounds.upper)) {
        fail("Sharpe ratio outside admissible bounds [c, C]", k, lam);
      }
    }
  }
  return m;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fwdrel
