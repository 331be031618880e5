#include "fwdrel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fwdrel {

PathSummary summarize(const ValuePath& path, const TimeGrid& grid) {
  const auto& v = path.values;
  if (v.size() != grid.nodes()) throw InvalidInput("value path length does not match the grid");
  const std::size_t n = v.size();
  double tm = 0.0, vm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    tm += grid[k];
    vm += v[k];
  }
  tm /= static_cast<double>(n);
  vm /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = grid[k] - tm;
    sxy += dt * (v[k] - vm);
    sxx += dt * dt;
  }
  return {v.front(), v.back(), sxx > 0.0 ? sxy / sxx : 0.0};
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

MartingaleReport martingale_test(std::span<const PathSummary> paths, double k,
                                 bool antithetic_pairs) {
  if (paths.size() < kMinEnsemble) throw InvalidInput("martingale test needs at least 1000 paths");
  if (antithetic_pairs && paths.size() % 2 != 0) {
    throw InvalidInput("antithetic ensembles need an even number of paths");
  }
  if (!(k > 0.0)) throw InvalidInput("k must be positive");
  const std::size_t stride = antithetic_pairs ? 2 : 1;
  const std::size_t n = paths.size() / stride;
  std::vector<double> v0(n), vT(n), slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < stride; ++j) {
      const PathSummary& p = paths[i * stride + j];
      if (!std::isfinite(p.v0) || !std::isfinite(p.vT) || !std::isfinite(p.slope)) {
        throw InvalidInput("degenerate ensemble: non-finite value");
      }
      v0[i] += p.v0 / static_cast<double>(stride);
      vT[i] += p.vT / static_cast<double>(stride);
      slope[i] += p.slope / static_cast<double>(stride);
    }
  }
  MartingaleReport r;
  r.k = k;
  r.samples = n;
  r.v0 = mean_se(v0).mean;
  const MeanSe term = mean_se(vT), sl = mean_se(slope);
  r.mean_terminal = term.mean;
  r.se = term.se;
  r.drift_slope = sl.mean;
  r.slope_se = sl.se;
  r.martingale = std::abs(r.mean_terminal - r.v0) <= k * r.se;
  r.supermartingale = r.mean_terminal <= r.v0 + k * r.se;
  r.verdict = r.martingale        ? "martingale-consistent"
              : r.supermartingale ? "supermartingale-consistent"
                                  : "inconsistent";
  return r;
}

MartingaleReport martingale_test(std::span<const ValuePath> paths, const TimeGrid& grid, double k,
                                 bool antithetic_pairs) {
  std::vector<PathSummary> s;
  s.reserve(paths.size());
  for (const ValuePath& p : paths) s.push_back(summarize(p, grid));
  return martingale_test(s, k, antithetic_pairs);
}

EnsembleResult run_ensemble(const CoefficientModel& model, const TimeGrid& grid,
                            const CorrelationSpec& corr, const EnsembleOptions& options,
                            const ValueFn& fn) {
  if (options.paths == 0) throw InvalidInput("ensemble needs at least one path");
  if (options.antithetic && options.paths % 2 != 0) {
    throw InvalidInput("antithetic ensembles need an even number of paths");
  }
  constexpr std::size_t kBlock = 64;
  const std::size_t n = options.paths, nodes = grid.nodes();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  EnsembleResult out;
  out.summaries.resize(n);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(nodes, 0.0));
  const RngSeed seed{options.seed};
  const SamplingOptions sampling{options.antithetic};

  parallel_for(blocks, options.threads, [&](std::size_t b) {
    auto& acc = partial[b];
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      const BrownianPath bm = sample_brownian_path(grid, corr, seed, i, sampling);
      const MarketPath market = realize_market(model, bm, grid, corr.rho);
      const ValuePath v = fn(market);
      out.summaries[i] = summarize(v, grid);
      for (std::size_t k = 0; k < nodes; ++k) acc[k] += v.values[k];
    }
  });

  out.mean_path.assign(nodes, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t k = 0; k < nodes; ++k) out.mean_path[k] += acc[k];
  }
  for (double& v : out.mean_path) v /= static_cast<double>(n);
  return out;
}

namespace {

void accumulate(ResidualReport& r, double value) {
  if (!std::isfinite(value)) r.finite = false;
  r.max_abs = std::max(r.max_abs, std::abs(value));
  r.mean_abs += std::abs(value);
}

void finish(ResidualReport& r, std::size_t count) {
  if (count > 0) r.mean_abs /= static_cast<double>(count);
  if (!r.finite) r.max_abs = std::numeric_limits<double>::infinity();
}

}  // namespace

ResidualReport pde_residual_spec(double gamma, double theta, const MarketPath& market,
                                 const StrategyPath& beta, std::span<const double> z_grid,
                                 std::optional<double> spatial_gamma) {
  CorrelationSpec::require_non_degenerate(market.rho);
  beta.validate(Setting::Specialization, market.nodes());
  const double gs = spatial_gamma.value_or(gamma);
  if (!(gs > 0.0) || gs == 1.0) throw InvalidInput("spatial gamma must be positive and not 1");
  const EtaPath eta = eta_spec(market, beta, theta, gamma, Manager::One, EtaForm::Rewritten);
  const double c = (1.0 - gamma) / (2.0 * gamma);
  const TimeGrid& grid = market.grid;
  const double rho = market.rho;

  ResidualReport r;
  r.normalization = "sum of absolute PDE terms";
  r.rows = z_grid.size();
  r.cols = grid.steps();
  double logK = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double next = logK - c * eta.values[k] * grid.dt(k);
    const double rate = (next - logK) / grid.dt(k);
    const double K = std::exp(logK);
    const Allocation lt = modified_sharpe_spec_at(market, k, beta.scalar_at(k), theta, Manager::One);
    const double b = market.sigma2[k] * beta.scalar_at(k);
    double col = 0.0;
    for (double z : z_grid) {
      if (!(z > 0.0)) throw InvalidInput("z grid must be positive");
      const double v = std::pow(z, 1.0 - gs) / (1.0 - gs) * K;
      const double vz = std::pow(z, -gs) * K;
      const double vzz = -gs * std::pow(z, -gs - 1.0) * K;
      const double t1 = rate * v;
      const double t2 = -0.5 * lt[0] * lt[0] * vz * vz / vzz;
      const double t3 = 0.5 * (1.0 - rho * rho) * theta * theta * b * b * z * z * vzz;
      const double t4 = (rho * lt[0] - lt[1]) * theta * b * z * vz;
      const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
      const double res = (t1 + t2 + t3 + t4) / scale;
      accumulate(r, res);
      col = std::max(col, std::abs(res));
    }
    r.column_max.push_back(col);
    logK = next;
  }
  finish(r, r.rows * r.cols);
  return r;
}

HeatResiduals heat_and_u_residuals(const HeatFunction& h, std::span<const SamplePoint> points) {
  const ForwardUtility u(h);
  HeatResiduals out;
  out.heat.normalization = "|h|";
  out.inverse.normalization = "x";
  out.u_identity.normalization = "u_z^2";
  out.u_slope.normalization = "u_z";
  for (const SamplePoint& p : points) {
    double value = 0.0, ht = 0.0, hzz = 0.0;
    for (const Atom& a : h.measure().atoms()) {
      const double e = a.w * std::exp(a.y * p.z - 0.5 * a.y * a.y * p.t);
      value += e;
      ht += -0.5 * a.y * a.y * e;
      hzz += a.y * a.y * e;
    }
    accumulate(out.heat, (ht + 0.5 * hzz) / value);

    const double z = h.inverse(p.x, p.t);
    const double back = h.eval(z, p.t).value;
    const double z_back = h.inverse(value, p.t);
    accumulate(out.inverse,
               std::max(std::abs(back - p.x) / p.x, std::abs(z_back - p.z) / (1.0 + std::abs(p.z))));

    const UtilityDerivatives d = u.derivatives(p.x, p.t);
    accumulate(out.u_identity, (d.u_t * d.u_zz - 0.5 * d.u_z * d.u_z) / (d.u_z * d.u_z));

    const double dx = 1e-5 * p.x;
    const double fd = (u.value(p.x + dx, p.t) - u.value(p.x - dx, p.t)) / (2.0 * dx);
    accumulate(out.u_slope, (fd - d.u_z) / d.u_z);
  }
  for (ResidualReport* r : {&out.heat, &out.inverse, &out.u_identity, &out.u_slope}) {
    r->rows = points.size();
    r->cols = 1;
    finish(*r, points.size());
  }
  return out;
}

double fitted_order(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size() || steps.size() < 3) {
    throw InvalidInput("order fit needs at least three levels");
  }
  const double n = static_cast<double>(steps.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || !(errors[i] > 0.0)) throw InvalidInput("order fit needs positive data");
    mx += std::log(steps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double dx = std::log(steps[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport u_finite_difference_study(const ForwardUtility& u,
                                            std::span<const SamplePoint> points, double spacing,
                                            std::size_t levels) {
  if (levels < 3) throw InvalidInput("convergence study needs at least three levels");
  ConvergenceReport r;
  double d = spacing;
  for (std::size_t l = 0; l < levels; ++l, d *= 0.5) {
    double err = 0.0;
    for (const SamplePoint& p : points) {
      if (!(p.t > d)) throw InvalidInput("sample time must exceed the finite-difference spacing");
      const double dx = d * p.x;
      const double um = u.value(p.x - dx, p.t), u0 = u.value(p.x, p.t), up = u.value(p.x + dx, p.t);
      const double ux = (up - um) / (2.0 * dx);
      const double uxx = (up - 2.0 * u0 + um) / (dx * dx);
      const double ut = (u.value(p.x, p.t + d) - u.value(p.x, p.t - d)) / (2.0 * d);
      err += std::abs(ut * uxx - 0.5 * ux * ux) / (ux * ux);
    }
    r.steps.push_back(d);
    r.errors.push_back(err / static_cast<double>(points.size()));
  }
  r.order = fitted_order(r.steps, r.errors);
  return r;
}

double nash_fixed_point_check(const NashOutcome& o, const MarketPath& market,
                              std::optional<double> theta_override) {
  const double t1 = theta_override.value_or(o.params.theta1);
  const double t2 = o.params.theta2;
  double dev = 0.0;
  auto track = [&](const StrategyPath& a, const StrategyPath& b) {
    for (std::size_t k = 0; k < a.nodes(); ++k) {
      dev = std::max({dev, std::abs(a.at(k)[0] - b.at(k)[0]), std::abs(a.at(k)[1] - b.at(k)[1])});
    }
  };
  if (o.setting == Setting::Specialization) {
    track(best_response_spec(market, o.beta, t1, CrraParams::power(o.gamma1), Manager::One),
          o.alpha);
    track(best_response_spec(market, o.alpha, t2, CrraParams::power(o.gamma2), Manager::Two),
          o.beta);
  } else {
    const std::vector<double> H1(market.nodes(), 1.0 / o.gamma1);
    const std::vector<double> H2(market.nodes(), 1.0 / o.gamma2);
    track(best_response_div(market, o.beta, t1, H1, Manager::One), o.alpha);
    track(best_response_div(market, o.alpha, t2, H2, Manager::Two), o.beta);
  }
  return dev;
}

MonotonicityReport monotonicity_check_div(const HeatFunction& h, const MarketPath& market,
                                          const StrategyPath& beta, double theta,
                                          std::span<const double> x_grid,
                                          std::span<const std::size_t> t_nodes, Manager manager) {
  if (t_nodes.size() < 2) throw InvalidInput("monotonicity check needs at least two times");
  const DiversificationClock clock = diversification_clock(market, beta, theta, manager);
  const ForwardUtility u(h);
  MonotonicityReport r;
  r.rows = x_grid.size();
  r.cols = t_nodes.size();
  r.max_increment = -std::numeric_limits<double>::infinity();
  for (double x : x_grid) {
    double prev = 0.0;
    for (std::size_t j = 0; j < t_nodes.size(); ++j) {
      const std::size_t k = t_nodes[j];
      if (k >= market.nodes()) throw InvalidInput("time node outside the grid");
      const double v = forward_value_div(u, x, clock.A.values[k], clock.B.values[k]);
      if (j > 0) {
        r.max_increment = std::max(r.max_increment, v - prev);
        if (!(v < prev)) r.strictly_decreasing = false;
      }
      prev = v;
    }
  }
  return r;
}

std::vector<double> value_along_worthless(const HeatFunction& h, const MarketPath& market,
                                          double theta, double x0) {
  const StrategyPath beta0 = worthless_competitor(market, theta);
  const DiversificationClock clock = diversification_clock(market, beta0, theta, Manager::One);
  const RelativeWealthPath x = optimal_relative_wealth_div(
      h, x0, clock.A.values, clock.M.values, clock.B.values, Manager::One, theta);
  const ForwardUtility u(h);
  std::vector<double> v(market.nodes());
  for (std::size_t k = 0; k < market.nodes(); ++k) {
    v[k] = forward_value_div(u, x.values[k], clock.A.values[k], clock.B.values[k]);
  }
  return v;
}

std::optional<std::size_t> nonmonotonicity_witness_spec(double gamma, double theta,
                                                        const MarketPath& market,
                                                        const StrategyPath& beta) {
  const EtaPath eta = eta_spec(market, beta, theta, gamma, Manager::One);
  for (std::size_t k = 1; k < eta.values.size(); ++k) {
    if ((eta.values[k - 1] > 0.0) != (eta.values[k] > 0.0)) return k;
  }
  return std::nullopt;
}

std::vector<double> eta_roots_spec(double gamma, double theta, const MarketPath& market,
                                   std::size_t k) {
  const double l1 = market.lambda1[k], l2 = market.lambda2[k], rho = market.rho;
  const double delta = gamma * l2 / l1 + rho * (1.0 - gamma);
  const double a2 =
      (rho * rho * (1.0 - gamma) * (1.0 - gamma) + gamma * (1.0 - gamma)) * theta * theta +
      gamma * theta;
  const double a1 = -2.0 * delta * theta * l1;
  const double a0 = l1 * l1;
  if (a2 == 0.0) {
    if (a1 == 0.0) return {};
    return {-a0 / a1};
  }
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return {};
  const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  std::vector<double> roots{q / a2, a0 / q};
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::optional<std::size_t> nonmonotonicity_witness_div(const HeatFunction& h,
                                                       const MarketPath& market,
                                                       const StrategyPath& beta, double theta,
                                                       std::span<const double> x_grid) {
  const DiversificationClock clock = diversification_clock(market, beta, theta, Manager::One);
  const ForwardUtility u(h);
  for (std::size_t k = 0; k < market.grid.steps(); ++k) {
    const double C = competition_quadratic(market.sigma1[k], market.sigma2[k], market.rho,
                                           beta.at(k));
    const double A = clock.A.values[k], B = clock.B.values[k];
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double z = x_grid[i] / B;
      const UtilityDerivatives d = u.derivatives(z, A);
      const double rate =
          -0.5 * theta * (1.0 - theta) * C * z * d.u_z + clock.A.integrand[k] * d.u_t;
      if (!(rate < 0.0)) return k * x_grid.size() + i;
    }
  }
  return std::nullopt;
}

ConvergenceReport closed_form_vs_sde(const HeatFunction& h, const CoefficientModel& model,
                                     const CorrelationSpec& corr, double theta,
                                     const Allocation& beta, double x0, const TimeGrid& fine,
                                     const SdeComparisonOptions& options) {
  if (options.coarsening.size() < 3) throw InvalidInput("convergence study needs three levels");
  if (options.paths == 0) throw InvalidInput("convergence study needs paths");
  const std::size_t levels = options.coarsening.size();
  std::vector<TimeGrid> grids;
  for (std::size_t f : options.coarsening) grids.push_back(fine.coarsen(f));
  std::vector<std::vector<double>> err(options.paths, std::vector<double>(levels));
  // time-resolved errors on the nodes of the first (coarsest) level
  const std::size_t shared = grids.front().nodes();
  for (const TimeGrid& g : grids) {
    if (g.steps() % grids.front().steps() != 0) {
      throw InvalidInput("the first level must be the coarsest");
    }
  }
  std::vector<std::vector<double>> along(options.paths, std::vector<double>(levels * shared));
  const RngSeed seed{options.seed};

  parallel_for(options.paths, options.threads, [&](std::size_t p) {
    const BrownianPath bm = sample_brownian_path(fine, corr, seed, p);
    for (std::size_t l = 0; l < levels; ++l) {
      const MarketPath m = realize_market(model, coarsen(bm, options.coarsening[l]), grids[l], corr.rho);
      const StrategyPath comp = StrategyPath::constant_vector(m.nodes(), beta);
      const DiversificationClock clock = diversification_clock(m, comp, theta, Manager::One);
      const RelativeWealthPath closed = optimal_relative_wealth_div(
          h, x0, clock.A.values, clock.M.values, clock.B.values, Manager::One, theta);
      const FeedbackPolicy policy = [&](std::size_t k, double z) {
        return feedback_allocation_div(m, k, beta, theta, h, z, clock.A.values[k],
                                       clock.B.values[k]);
      };
      const RelativeWealthPath sde =
          evolve_relative_div_feedback(m, comp, theta, x0, Manager::One, policy, options.scheme);
      err[p][l] = std::abs(sde.values.back() - closed.values.back()) / closed.values.back();
      const std::size_t stride = grids[l].steps() / grids.front().steps();
      for (std::size_t j = 0; j < shared; ++j) {
        const std::size_t k = j * stride;
        along[p][l * shared + j] = std::abs(sde.values[k] - closed.values[k]) / closed.values[k];
      }
    }
  });

  ConvergenceReport r;
  for (std::size_t l = 0; l < levels; ++l) {
    double s = 0.0;
    for (std::size_t p = 0; p < options.paths; ++p) s += err[p][l];
    r.steps.push_back(grids[l].horizon() / static_cast<double>(grids[l].steps()));
    r.errors.push_back(s / static_cast<double>(options.paths));
  }
  r.order = fitted_order(r.steps, r.errors);
  r.times.assign(grids.front().times().begin(), grids.front().times().end());
  r.error_paths.assign(levels, std::vector<double>(shared, 0.0));
  for (std::size_t p = 0; p < options.paths; ++p) {
    for (std::size_t l = 0; l < levels; ++l) {
      for (std::size_t j = 0; j < shared; ++j) r.error_paths[l][j] += along[p][l * shared + j];
    }
  }
  for (auto& e : r.error_paths) {
    for (double& v : e) v /= static_cast<double>(options.paths);
  }
  return r;
}

namespace {

EtaPath eta2_alternative(const MarketPath& m, const StrategyPath& alpha, const StrategyPath& beta,
                     double theta, double gamma) {
  EtaPath out{std::vector<double>(m.nodes()), Manager::Two, EtaForm::Direct};
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const double a = m.sigma1[k] * alpha.scalar_at(k);
    const Allocation lt = modified_sharpe_spec_at(m, k, alpha.scalar_at(k), theta, Manager::Two);
    const double l11 = modified_sharpe_spec_at(m, k, beta.scalar_at(k), theta, Manager::One)[0];
    out.values[k] = lt[1] * lt[1] + 2.0 * (m.rho * l11 - lt[0]) * theta * a * gamma -
                    (1.0 - m.rho * m.rho) * theta * theta * a * a * gamma * gamma;
  }
  return out;
}

}  // namespace

Eta2Adjudication adjudicate_eta2(const CoefficientModel& model, const TimeGrid& grid,
                                 const CorrelationSpec& corr, double alpha, double theta2,
                                 double gamma2, const EnsembleOptions& options) {
  const CompetitionParams params{theta2, theta2};
  auto run = [&](bool alternative) {
    const EnsembleResult e = run_ensemble(model, grid, corr, options, [&](const MarketPath& m) {
      const StrategyPath a = StrategyPath::constant_scalar(m.nodes(), alpha);
      const StrategyPath b =
          best_response_spec(m, a, theta2, CrraParams::power(gamma2), Manager::Two);
      const RelativeWealthPath x = evolve_relative_spec(m, a, b, params, 1.0, Manager::Two);
      const EtaPath eta =
          alternative ? eta2_alternative(m, a, b, theta2, gamma2) : eta_spec(m, a, theta2, gamma2, Manager::Two);
      return crra_value_along(x.values, m.grid, eta, gamma2);
    });
    return martingale_test(e.summaries, 3.0, options.antithetic);
  };
  return {run(false), run(true)};
}

}  // namespace fwdrel
