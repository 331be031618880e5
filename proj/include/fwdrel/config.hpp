#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwdrel/criteria.hpp"
#include "fwdrel/market.hpp"
#include "fwdrel/wealth.hpp"

namespace fwdrel {

struct PreferenceSpec {
  enum class Kind { Crra, Log, Measure };
  Kind kind = Kind::Crra;
  double gamma = 2.0;
  std::vector<Atom> atoms;  // Measure only

  /// Heat-function measure: the atoms, or a Dirac at 1/gamma for CRRA.
  AtomicMeasure measure() const;
  void validate() const;
  bool operator==(const PreferenceSpec&) const = default;
};

struct StrategySpec {
  enum class Kind { Constant, BestResponse, Nash };
  Kind kind = Kind::Constant;
  Allocation value{0.0, 0.0};  // Constant; specialization uses value[0]
  bool operator==(const StrategySpec&) const = default;
};

struct RunConfig {
  Setting setting = Setting::Specialization;
  double horizon = 1.0;
  double dt = 1e-3;
  CoefficientModel model = CoefficientModel::from_sharpe(0.3, 0.3, 0.2, 0.2);
  double rho = 0.3;
  CompetitionParams competition{0.5, 0.5};
  PreferenceSpec pref1, pref2;
  StrategySpec strategy1{StrategySpec::Kind::BestResponse, {0.0, 0.0}};
  StrategySpec strategy2{StrategySpec::Kind::Constant, {0.8, 0.0}};
  double x1 = 1.0, x2 = 1.0;  // initial wealths
  int manager = 1;            // whose best response `best-response` computes
  std::uint64_t seed = 20240611;
  std::size_t n_paths = 10000;
  unsigned threads = 1;
  bool antithetic = true;
  std::string output = "out";
  // verify
  std::size_t verify_paths = 100000;
  std::size_t verify_sde_paths = 1000;
  std::vector<int> verify_criteria;  // empty: all

  TimeGrid grid() const;
  /// Cross-field checks run before any simulation.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json coefficient_to_json(const Coefficient& c);
Coefficient coefficient_from_json(const nlohmann::json& j);

}  // namespace fwdrel
