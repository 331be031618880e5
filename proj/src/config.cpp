#include "fwdrel/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace fwdrel {

using nlohmann::json;

AtomicMeasure PreferenceSpec::measure() const {
  switch (kind) {
    case Kind::Crra:
      return AtomicMeasure::dirac(1.0 / gamma);
    case Kind::Log:
      return AtomicMeasure::dirac(1.0);
    case Kind::Measure:
      break;
  }
  return AtomicMeasure(atoms);
}

void PreferenceSpec::validate() const {
  if (kind == Kind::Crra && (!(gamma > 0.0) || gamma == 1.0)) {
    throw InvalidInput("CRRA preferences need gamma > 0 and gamma != 1 (use type \"log\")");
  }
  if (kind == Kind::Measure) AtomicMeasure{atoms};
}

TimeGrid RunConfig::grid() const {
  return TimeGrid::uniform(horizon, static_cast<std::size_t>(std::llround(horizon / dt)));
}

void RunConfig::validate() const {
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon) {
    throw InvalidInput("grid needs 0 < dt <= horizon");
  }
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw InvalidInput("horizon must be a whole number of steps");
  }
  model.validate();
  CorrelationSpec{rho}.validate();
  competition.validate();
  pref1.validate();
  pref2.validate();
  if (!(x1 > 0.0) || !(x2 > 0.0)) throw InvalidInput("initial wealths must be positive");
  if (manager != 1 && manager != 2) throw InvalidInput("manager must be 1 or 2");
  if (n_paths == 0) throw InvalidInput("n_paths must be positive");
  if (antithetic && n_paths % 2 != 0) throw InvalidInput("antithetic sampling needs even n_paths");
  if (threads == 0) throw InvalidInput("threads must be positive");

  using SK = StrategySpec::Kind;
  const bool nash1 = strategy1.kind == SK::Nash, nash2 = strategy2.kind == SK::Nash;
  if (nash1 != nash2) throw InvalidInput("a Nash strategy must be declared for both managers");
  if (nash1) {
    for (const PreferenceSpec* p : {&pref1, &pref2}) {
      if (p->kind != PreferenceSpec::Kind::Crra) {
        throw InvalidInput("Nash equilibria are available for CRRA preferences only");
      }
    }
  }
  if (strategy1.kind == SK::BestResponse && strategy2.kind == SK::BestResponse) {
    throw InvalidInput("both managers cannot respond to each other; declare \"nash\" instead");
  }
  if (setting == Setting::Specialization) {
    for (const PreferenceSpec* p : {&pref1, &pref2}) {
      if (p->kind == PreferenceSpec::Kind::Measure) {
        throw InvalidInput("measure preferences apply to the diversification setting only");
      }
    }
  }
  for (int c : verify_criteria) {
    if (c < 1 || c > 9) throw InvalidInput("verify criteria are numbered 1 to 9");
  }
}

json coefficient_to_json(const Coefficient& c) {
  const auto& p = c.params();
  switch (c.kind()) {
    case Coefficient::Kind::Constant:
      return p[0];
    case Coefficient::Kind::Linear:
      return {{"type", "linear"}, {"a", p[0]}, {"b", p[1]}};
    case Coefficient::Kind::TanhFactor:
      break;
  }
  return {{"type", "tanh_factor"},
          {"base", p[0]},
          {"amplitude", p[1]},
          {"scale", p[2]},
          {"driver", c.driver()}};
}

Coefficient coefficient_from_json(const json& j) {
  if (j.is_number()) return Coefficient::constant(j.get<double>());
  if (!j.is_object()) throw InvalidInput("coefficient must be a number or an object");
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return Coefficient::constant(j.at("value").get<double>());
  if (type == "linear") return Coefficient::linear(j.at("a").get<double>(), j.at("b").get<double>());
  if (type == "tanh_factor") {
    return Coefficient::tanh_factor(j.at("base").get<double>(), j.at("amplitude").get<double>(),
                                    j.at("scale").get<double>(), j.value("driver", 1));
  }
  throw InvalidInput("unknown coefficient type: " + type);
}

namespace {

json pref_to_json(const PreferenceSpec& p) {
  switch (p.kind) {
    case PreferenceSpec::Kind::Crra:
      return {{"type", "crra"}, {"gamma", p.gamma}};
    case PreferenceSpec::Kind::Log:
      return {{"type", "log"}};
    case PreferenceSpec::Kind::Measure:
      break;
  }
  json atoms = json::array();
  for (const Atom& a : p.atoms) atoms.push_back({a.y, a.w});
  return {{"type", "measure"}, {"atoms", atoms}};
}

PreferenceSpec pref_from_json(const json& j) {
  PreferenceSpec p;
  const std::string type = j.at("type").get<std::string>();
  if (type == "crra") {
    p.kind = PreferenceSpec::Kind::Crra;
    p.gamma = j.at("gamma").get<double>();
  } else if (type == "log") {
    p.kind = PreferenceSpec::Kind::Log;
    p.gamma = 1.0;
  } else if (type == "measure") {
    p.kind = PreferenceSpec::Kind::Measure;
    for (const auto& a : j.at("atoms")) p.atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  } else {
    throw InvalidInput("unknown preference type: " + type);
  }
  return p;
}

json strategy_to_json(const StrategySpec& s, Setting setting) {
  switch (s.kind) {
    case StrategySpec::Kind::BestResponse:
      return {{"type", "best_response"}};
    case StrategySpec::Kind::Nash:
      return {{"type", "nash"}};
    case StrategySpec::Kind::Constant:
      break;
  }
  if (setting == Setting::Specialization) return {{"type", "constant"}, {"value", s.value[0]}};
  return {{"type", "constant"}, {"value", {s.value[0], s.value[1]}}};
}

StrategySpec strategy_from_json(const json& j, Setting setting) {
  StrategySpec s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "best_response") {
    s.kind = StrategySpec::Kind::BestResponse;
  } else if (type == "nash") {
    s.kind = StrategySpec::Kind::Nash;
  } else if (type == "zero") {
    s.kind = StrategySpec::Kind::Constant;
  } else if (type == "constant") {
    s.kind = StrategySpec::Kind::Constant;
    const json& v = j.at("value");
    if (setting == Setting::Specialization) {
      if (!v.is_number()) throw InvalidInput("specialization strategies are scalars");
      s.value = {v.get<double>(), 0.0};
    } else {
      if (!v.is_array() || v.size() != 2) throw InvalidInput("diversification strategies are 2-vectors");
      s.value = {v.at(0).get<double>(), v.at(1).get<double>()};
    }
  } else {
    throw InvalidInput("unknown strategy type: " + type);
  }
  return s;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw InvalidInput(std::string("unknown key in ") + where + ": " + k);
  }
}

}  // namespace

json to_json(const RunConfig& c) {
  return {
      {"setting", c.setting == Setting::Specialization ? "specialization" : "diversification"},
      {"grid", {{"horizon", c.horizon}, {"dt", c.dt}}},
      {"market",
       {{"mu1", coefficient_to_json(c.model.mu1)},
        {"mu2", coefficient_to_json(c.model.mu2)},
        {"sigma1", coefficient_to_json(c.model.sigma1)},
        {"sigma2", coefficient_to_json(c.model.sigma2)},
        {"r", coefficient_to_json(c.model.r)},
        {"sharpe_bounds", {c.model.bounds.lower, c.model.bounds.upper}}}},
      {"rho", c.rho},
      {"competition", {{"theta1", c.competition.theta1}, {"theta2", c.competition.theta2}}},
      {"preferences", {{"manager1", pref_to_json(c.pref1)}, {"manager2", pref_to_json(c.pref2)}}},
      {"strategies",
       {{"manager1", strategy_to_json(c.strategy1, c.setting)},
        {"manager2", strategy_to_json(c.strategy2, c.setting)}}},
      {"initial_wealth", {c.x1, c.x2}},
      {"manager", c.manager},
      {"seed", c.seed},
      {"n_paths", c.n_paths},
      {"threads", c.threads},
      {"antithetic", c.antithetic},
      {"output", c.output},
      {"verify",
       {{"paths", c.verify_paths},
        {"sde_paths", c.verify_sde_paths},
        {"criteria", c.verify_criteria}}},
  };
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  reject_unknown(j,
                 {"setting", "grid", "market", "rho", "competition", "preferences", "strategies",
                  "initial_wealth", "manager", "seed", "n_paths", "threads", "antithetic", "output",
                  "verify"},
                 "config");
  RunConfig c;
  try {
    if (j.contains("setting")) {
      const std::string s = j.at("setting").get<std::string>();
      if (s == "specialization") c.setting = Setting::Specialization;
      else if (s == "diversification") c.setting = Setting::Diversification;
      else throw InvalidInput("setting must be specialization or diversification");
    }
    if (c.setting == Setting::Diversification) {
      c.strategy2.value = {0.5, 0.3};
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      reject_unknown(g, {"horizon", "dt"}, "grid");
      c.horizon = g.value("horizon", c.horizon);
      c.dt = g.value("dt", c.dt);
    }
    if (j.contains("market")) {
      const json& m = j.at("market");
      reject_unknown(m, {"mu1", "mu2", "sigma1", "sigma2", "r", "sharpe_bounds"}, "market");
      if (m.contains("mu1")) c.model.mu1 = coefficient_from_json(m.at("mu1"));
      if (m.contains("mu2")) c.model.mu2 = coefficient_from_json(m.at("mu2"));
      if (m.contains("sigma1")) c.model.sigma1 = coefficient_from_json(m.at("sigma1"));
      if (m.contains("sigma2")) c.model.sigma2 = coefficient_from_json(m.at("sigma2"));
      if (m.contains("r")) c.model.r = coefficient_from_json(m.at("r"));
      if (m.contains("sharpe_bounds")) {
        c.model.bounds = {m.at("sharpe_bounds").at(0).get<double>(),
                          m.at("sharpe_bounds").at(1).get<double>()};
      }
    }
    c.rho = j.value("rho", c.rho);
    if (j.contains("competition")) {
      const json& t = j.at("competition");
      reject_unknown(t, {"theta1", "theta2"}, "competition");
      c.competition.theta1 = t.value("theta1", c.competition.theta1);
      c.competition.theta2 = t.value("theta2", c.competition.theta2);
    }
    if (j.contains("preferences")) {
      const json& p = j.at("preferences");
      reject_unknown(p, {"manager1", "manager2"}, "preferences");
      if (p.contains("manager1")) c.pref1 = pref_from_json(p.at("manager1"));
      if (p.contains("manager2")) c.pref2 = pref_from_json(p.at("manager2"));
    }
    if (j.contains("strategies")) {
      const json& s = j.at("strategies");
      reject_unknown(s, {"manager1", "manager2"}, "strategies");
      if (s.contains("manager1")) c.strategy1 = strategy_from_json(s.at("manager1"), c.setting);
      if (s.contains("manager2")) c.strategy2 = strategy_from_json(s.at("manager2"), c.setting);
    }
    if (j.contains("initial_wealth")) {
      c.x1 = j.at("initial_wealth").at(0).get<double>();
      c.x2 = j.at("initial_wealth").at(1).get<double>();
    }
    c.manager = j.value("manager", c.manager);
    c.seed = j.value("seed", c.seed);
    c.n_paths = j.value("n_paths", c.n_paths);
    c.threads = j.value("threads", c.threads);
    c.antithetic = j.value("antithetic", c.antithetic);
    c.output = j.value("output", c.output);
    if (j.contains("verify")) {
      const json& v = j.at("verify");
      reject_unknown(v, {"paths", "sde_paths", "criteria"}, "verify");
      c.verify_paths = v.value("paths", c.verify_paths);
      c.verify_sde_paths = v.value("sde_paths", c.verify_sde_paths);
      if (v.contains("criteria")) c.verify_criteria = v.at("criteria").get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace fwdrel
