#include "fwdrel/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fwdrel/strategies.hpp"
#include "fwdrel/verify.hpp"

namespace fwdrel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Manager other(Manager m) { return m == Manager::One ? Manager::Two : Manager::One; }

const PreferenceSpec& pref(const RunConfig& c, Manager m) {
  return m == Manager::One ? c.pref1 : c.pref2;
}

const StrategySpec& spec_of(const RunConfig& c, Manager m) {
  return m == Manager::One ? c.strategy1 : c.strategy2;
}

double initial_relative(const RunConfig& c, Manager m) {
  return m == Manager::One ? c.x1 / std::pow(c.x2, c.competition.theta1)
                           : c.x2 / std::pow(c.x1, c.competition.theta2);
}

CrraParams crra(const PreferenceSpec& p) {
  return p.kind == PreferenceSpec::Kind::Log ? CrraParams::log_utility() : CrraParams::power(p.gamma);
}

/// Named per-node series of one simulated path.
struct PathSeries {
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;

  void add(std::string name, std::vector<double> values) {
    names.push_back(std::move(name));
    data.push_back(std::move(values));
  }
  const std::vector<double>& at(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    return data[static_cast<std::size_t>(it - names.begin())];
  }
};

std::vector<double> component(const StrategyPath& s, int j) {
  std::vector<double> out(s.nodes());
  for (std::size_t k = 0; k < s.nodes(); ++k) out[k] = s.at(k)[j];
  return out;
}

std::vector<double> relative(const WealthPath& own, const WealthPath& rival, double theta) {
  std::vector<double> out(own.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = own.values[k] / std::pow(rival.values[k], theta);
  }
  return out;
}

// Criterion of `who` along its realized relative wealth against `rival`.
std::vector<double> value_along(const RunConfig& c, const MarketPath& m, Manager who,
                                const StrategyPath& rival, const std::vector<double>& x) {
  const PreferenceSpec& p = pref(c, who);
  const double theta = c.competition.theta(who);
  if (c.setting == Setting::Specialization) {
    if (p.kind == PreferenceSpec::Kind::Log) {
      const LogCriterion K = log_value_spec(1.0, m, rival, theta, who);
      std::vector<double> v(x.size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::log(x[k]) + K.value.values[k];
      return v;
    }
    return crra_value_along(x, m.grid, eta_spec(m, rival, theta, p.gamma, who), p.gamma).values;
  }
  const DiversificationClock clock = diversification_clock(m, rival, theta, who);
  const ForwardUtility u(HeatFunction(p.measure()));
  std::vector<double> v(x.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = forward_value_div(u, x[k], clock.A.values[k], clock.B.values[k]);
  }
  return v;
}

StrategyPath constant_strategy(const RunConfig& c, const MarketPath& m, Manager who) {
  const Allocation v = spec_of(c, who).value;
  return c.setting == Setting::Specialization ? StrategyPath::constant_scalar(m.nodes(), v[0])
                                              : StrategyPath::constant_vector(m.nodes(), v);
}

StrategyPath respond(const RunConfig& c, const MarketPath& m, Manager who, const StrategyPath& rival) {
  const double theta = c.competition.theta(who);
  if (c.setting == Setting::Specialization) {
    return best_response_spec(m, rival, theta, crra(pref(c, who)), who);
  }
  const HeatFunction h(pref(c, who).measure());
  const DiversificationClock clock = diversification_clock(m, rival, theta, who);
  const FeedbackPolicy policy = [&](std::size_t k, double z) {
    return feedback_allocation_div(m, k, rival.at(k), theta, h, z, clock.A.values[k],
                                   clock.B.values[k]);
  };
  std::vector<Allocation> applied;
  evolve_relative_div_feedback(m, rival, theta, initial_relative(c, who), who, policy,
                               Scheme::LogEuler, &applied);
  return StrategyPath::vector(std::move(applied));
}

PathSeries simulate_path(const RunConfig& c, const MarketPath& m) {
  using SK = StrategySpec::Kind;
  StrategyPath alpha, beta;
  if (c.strategy1.kind == SK::Nash) {
    const NashOutcome eq = c.setting == Setting::Specialization
                               ? nash_spec(m, c.pref1.gamma, c.pref2.gamma, c.competition)
                               : nash_div(m, c.pref1.gamma, c.pref2.gamma, c.competition);
    alpha = eq.alpha;
    beta = eq.beta;
  } else if (c.strategy1.kind == SK::BestResponse) {
    beta = constant_strategy(c, m, Manager::Two);
    alpha = respond(c, m, Manager::One, beta);
  } else if (c.strategy2.kind == SK::BestResponse) {
    alpha = constant_strategy(c, m, Manager::One);
    beta = respond(c, m, Manager::Two, alpha);
  } else {
    alpha = constant_strategy(c, m, Manager::One);
    beta = constant_strategy(c, m, Manager::Two);
  }

  const bool spec = c.setting == Setting::Specialization;
  const WealthPath X1 = spec ? evolve_wealth_spec(m, alpha, c.x1, 1) : evolve_wealth_div(m, alpha, c.x1);
  const WealthPath X2 = spec ? evolve_wealth_spec(m, beta, c.x2, 2) : evolve_wealth_div(m, beta, c.x2);
  const auto R1 = relative(X1, X2, c.competition.theta1);
  const auto R2 = relative(X2, X1, c.competition.theta2);

  PathSeries s;
  s.add("wealth1", X1.values);
  s.add("wealth2", X2.values);
  s.add("relative_wealth1", R1);
  s.add("relative_wealth2", R2);
  if (spec) {
    s.add("alpha", component(alpha, 0));
    s.add("beta", component(beta, 0));
  } else {
    s.add("alpha1", component(alpha, 0));
    s.add("alpha2", component(alpha, 1));
    s.add("beta1", component(beta, 0));
    s.add("beta2", component(beta, 1));
  }
  s.add("value1", value_along(c, m, Manager::One, beta, R1));
  s.add("value2", value_along(c, m, Manager::Two, alpha, R2));
  return s;
}

struct EnsembleSeries {
  std::vector<std::string> names;
  std::vector<std::vector<double>> mean;  // per series, per node
  PathSeries first;                       // path 0
  std::vector<PathSummary> value1, value2;
};

EnsembleSeries simulate_ensemble(const RunConfig& c) {
  const TimeGrid grid = c.grid();
  const CorrelationSpec corr{c.rho};
  const RngSeed seed{c.seed};
  const SamplingOptions sampling{c.antithetic};
  constexpr std::size_t kBlock = 64;
  const std::size_t n = c.n_paths, blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<std::vector<double>>> partial(blocks);
  EnsembleSeries out;
  out.value1.resize(n);
  out.value2.resize(n);

  parallel_for(blocks, c.threads, [&](std::size_t b) {
    auto& acc = partial[b];
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      const MarketPath m =
          realize_market(c.model, sample_brownian_path(grid, corr, seed, i, sampling), grid, c.rho);
      PathSeries s = simulate_path(c, m);
      if (acc.empty()) acc.assign(s.data.size(), std::vector<double>(grid.nodes(), 0.0));
      for (std::size_t j = 0; j < s.data.size(); ++j) {
        for (std::size_t k = 0; k < grid.nodes(); ++k) acc[j][k] += s.data[j][k];
      }
      out.value1[i] = summarize({s.at("value1")}, grid);
      out.value2[i] = summarize({s.at("value2")}, grid);
      if (i == 0) out.first = std::move(s);
    }
  });

  out.names = out.first.names;
  out.mean.assign(out.names.size(), std::vector<double>(grid.nodes(), 0.0));
  for (const auto& acc : partial) {
    for (std::size_t j = 0; j < acc.size(); ++j) {
      for (std::size_t k = 0; k < grid.nodes(); ++k) out.mean[j][k] += acc[j][k];
    }
  }
  for (auto& col : out.mean) {
    for (double& v : col) v /= static_cast<double>(n);
  }
  return out;
}

Table to_table(const TimeGrid& grid, const std::vector<std::string>& names,
               const std::vector<std::vector<double>>& data, const std::string& prefix = {}) {
  Table t;
  t.columns.push_back("t");
  for (const auto& n : names) t.columns.push_back(prefix + n);
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    std::vector<double> row{grid[k]};
    for (const auto& col : data) row.push_back(col[k]);
    t.add_row(std::move(row));
  }
  return t;
}

Verdict martingale_verdict(int id, const std::string& who, const std::vector<PathSummary>& s,
                           bool antithetic) {
  const MartingaleReport r = martingale_test(s, 3.0, antithetic);
  return {id, "martingale property of the " + who + " criterion along its optimum", r.martingale,
          fmt("V0=%.8g mean V_T=%.8g SE=%.3e |diff|/SE=%.2f slope=%.3e+-%.1e %s", r.v0,
              r.mean_terminal, r.se, r.se > 0 ? std::abs(r.mean_terminal - r.v0) / r.se : 0.0,
              r.drift_slope, r.slope_se, r.verdict.c_str())};
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

RunOutput cmd_simulate(const RunConfig& c) {
  c.validate();
  const TimeGrid grid = c.grid();
  const EnsembleSeries e = simulate_ensemble(c);
  RunOutput out;
  out.tables.emplace_back("simulate_mean", to_table(grid, e.names, e.mean, "mean_"));
  out.tables.emplace_back("simulate_path0", to_table(grid, e.first.names, e.first.data));
  return out;
}

RunOutput cmd_best_response(const RunConfig& config) {
  RunConfig c = config;
  const Manager who = c.manager == 1 ? Manager::One : Manager::Two;
  if (spec_of(c, other(who)).kind != StrategySpec::Kind::Constant) {
    throw InvalidInput("best-response needs a constant strategy for the opponent");
  }
  (who == Manager::One ? c.strategy1 : c.strategy2).kind = StrategySpec::Kind::BestResponse;
  c.validate();
  const TimeGrid grid = c.grid();
  const EnsembleSeries e = simulate_ensemble(c);
  RunOutput out;
  out.tables.emplace_back("best_response_mean", to_table(grid, e.names, e.mean, "mean_"));
  out.tables.emplace_back("best_response_path0", to_table(grid, e.first.names, e.first.data));
  const auto& s = who == Manager::One ? e.value1 : e.value2;
  if (s.size() >= kMinEnsemble) {
    out.verdicts.push_back(martingale_verdict(1, fmt("manager %d", c.manager), s, c.antithetic));
  } else {
    out.notes.push_back("martingale test skipped: fewer than 1000 paths");
  }
  return out;
}

RunOutput cmd_nash(const RunConfig& config) {
  RunConfig c = config;
  c.strategy1.kind = c.strategy2.kind = StrategySpec::Kind::Nash;
  c.validate();
  const TimeGrid grid = c.grid();
  RunOutput out;

  // closed form and fixed-point check on the first path
  const MarketPath m = realize_market(
      c.model, sample_brownian_path(grid, {c.rho}, RngSeed{c.seed}, 0, {c.antithetic}), grid, c.rho);
  const NashOutcome eq =
      c.setting == Setting::Specialization
          ? nash_spec(m, c.pref1.gamma, c.pref2.gamma, c.competition,
                      initial_relative(c, Manager::One), initial_relative(c, Manager::Two))
          : nash_div(m, c.pref1.gamma, c.pref2.gamma, c.competition,
                     initial_relative(c, Manager::One), initial_relative(c, Manager::Two));
  const double dev = nash_fixed_point_check(eq, m);
  out.verdicts.push_back({1, "Nash fixed point", dev < 1e-12,
                          fmt("determinant %.6g; sup-norm best-response deviation %.3e",
                              eq.determinant, dev)});
  if (c.setting == Setting::Diversification) {
    out.notes.push_back(fmt("c_alpha=%.10g c_beta=%.10g", eq.c_alpha, eq.c_beta));
  }

  const EnsembleSeries e = simulate_ensemble(c);
  out.tables.emplace_back("nash_mean", to_table(grid, e.names, e.mean, "mean_"));
  out.tables.emplace_back("nash_path0", to_table(grid, e.first.names, e.first.data));
  if (c.n_paths >= kMinEnsemble) {
    out.verdicts.push_back(martingale_verdict(2, "manager 1", e.value1, c.antithetic));
    out.verdicts.push_back(martingale_verdict(3, "manager 2", e.value2, c.antithetic));
  } else {
    out.notes.push_back("martingale tests skipped: fewer than 1000 paths");
  }
  return out;
}

RunOutput cmd_verify(const RunConfig& c) {
  c.validate();
  AcceptanceOptions o;
  o.seed = c.seed;
  o.paths = c.verify_paths;
  o.sde_paths = c.verify_sde_paths;
  o.dt = c.dt;
  o.threads = c.threads;
  o.only = c.verify_criteria;
  AcceptanceResult r = run_acceptance(o);
  return {std::move(r.verdicts), std::move(r.notes), std::move(r.tables)};
}

void write_run(const RunConfig& c, const std::string& command, const RunOutput& output,
               double seconds) {
  const fs::path dir(c.output);
  fs::create_directories(dir);
  json files = json::array();
  for (const auto& [stem, table] : output.tables) {
    write_atomic(dir / (stem + ".csv"), table.to_csv());
    files.push_back(stem + ".csv");
  }
  json verdicts = json::array();
  for (const Verdict& v : output.verdicts) {
    verdicts.push_back({{"id", v.id}, {"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  }
  const json manifest{{"command", command},
                      {"config", to_json(c)},
                      {"seed", c.seed},
                      {"version", kVersion},
                      {"wall_clock_seconds", seconds},
                      {"verdicts", verdicts},
                      {"notes", output.notes},
                      {"files", files}};
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string cmd_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw MissingArtifact("missing artifact: " + mpath.string());
  json m;
  try {
    std::ifstream in(mpath);
    in >> m;
  } catch (const json::exception& e) {
    throw MissingArtifact("unreadable manifest " + mpath.string() + ": " + e.what());
  }
  std::ostringstream os;
  os << "run: " << m.value("command", "?") << "  version " << m.value("version", "?") << "  seed "
     << m.value("seed", 0ULL) << "\n";
  if (m.contains("config")) {
    const json& c = m["config"];
    os << "setting: " << c.value("setting", "?") << "  paths " << c.value("n_paths", 0)
       << "  dt " << c["grid"].value("dt", 0.0) << "\n";
  }
  os << "wall clock: " << m.value("wall_clock_seconds", 0.0) << " s\n";
  std::size_t passed = 0, total = 0;
  for (const auto& v : m.value("verdicts", json::array())) {
    ++total;
    if (v.value("passed", false)) ++passed;
    os << (v.value("passed", false) ? "  PASS " : "  FAIL ") << v.value("id", 0) << " "
       << v.value("name", "") << ": " << v.value("detail", "") << "\n";
  }
  os << "verdicts: " << passed << "/" << total << " passed\n";
  for (const auto& n : m.value("notes", json::array())) os << "  note: " << n.get<std::string>() << "\n";
  for (const auto& f : m.value("files", json::array())) {
    const fs::path p = dir / f.get<std::string>();
    if (!fs::exists(p)) throw MissingArtifact("missing artifact: " + p.string());
    std::ifstream in(p);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    os << "  file " << f.get<std::string>() << ": " << (lines ? lines - 1 : 0) << " rows\n";
  }
  return os.str();
}

int run_command(const std::string& command, const RunConfig& config, std::ostream& out,
                std::ostream& err, const std::string& target) {
  try {
    if (command == "report") {
      out << cmd_report(target.empty() ? config.output : target);
      return kOk;
    }
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput r;
    if (command == "simulate") r = cmd_simulate(config);
    else if (command == "best-response") r = cmd_best_response(config);
    else if (command == "nash") r = cmd_nash(config);
    else if (command == "verify") r = cmd_verify(config);
    else throw InvalidInput("unknown command: " + command);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run(config, command, r, secs);

    bool ok = true;
    for (const Verdict& v : r.verdicts) {
      out << (v.passed ? "[PASS] " : "[FAIL] ") << v.id << " " << v.name << ": " << v.detail << "\n";
      ok = ok && v.passed;
    }
    for (const auto& n : r.notes) out << "note: " << n << "\n";
    out << "wrote " << r.tables.size() << " CSV files and manifest.json to " << config.output << "\n";
    return ok ? kOk : kVerdictFailed;
  } catch (const NoEquilibrium& e) {
    err << "error: " << e.what() << "\n";
    return kNoEquilibrium;
  } catch (const MissingArtifact& e) {
    err << "error: " << e.what() << "\n";
    return kMissingArtifact;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << " (node " << e.node() << ")\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace fwdrel
