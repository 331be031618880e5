#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fwdrel/table.hpp"

namespace fwdrel {

struct Verdict {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::size_t paths = 100000;    // martingale ensembles
  std::size_t sde_paths = 1000;  // closed-form vs SDE study
  double dt = 1e-3;              // horizon is 1
  unsigned threads = 1;
  std::vector<int> only;         // empty: every criterion
  bool adjudicate_eta2 = true;
};

struct AcceptanceResult {
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, Table>> tables;  // file stem, data
  std::vector<std::string> notes;

  bool all_passed() const;
};

/// The property-based acceptance suite, criteria 1 to 9.
AcceptanceResult run_acceptance(const AcceptanceOptions& options);

}  // namespace fwdrel
