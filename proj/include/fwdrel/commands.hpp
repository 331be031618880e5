#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fwdrel/acceptance.hpp"
#include "fwdrel/config.hpp"
#include "fwdrel/table.hpp"

namespace fwdrel {

inline constexpr const char* kVersion = "0.1.0";

/// A run directory lacks the manifest or a file it lists.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutput {
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, Table>> tables;  // file stem, data
};

RunOutput cmd_simulate(const RunConfig& config);
RunOutput cmd_best_response(const RunConfig& config);
RunOutput cmd_nash(const RunConfig& config);
RunOutput cmd_verify(const RunConfig& config);
/// Human-readable summary of a finished run directory.
std::string cmd_report(const std::string& run_dir);

/// Write every table as <stem>.csv and manifest.json into config.output.
/// Each file is written to a temporary name and renamed into place.
void write_run(const RunConfig& config, const std::string& command, const RunOutput& output,
               double wall_clock_seconds);

/// Exit codes of run_command.
enum ExitCode : int {
  kOk = 0,
  kVerdictFailed = 1,
  kInvalidInput = 2,
  kNoEquilibrium = 3,
  kMissingArtifact = 4,
  kIoError = 5,
};

/// Run one subcommand end to end; `target` is the run directory for `report`.
int run_command(const std::string& command, const RunConfig& config, std::ostream& out,
                std::ostream& err, const std::string& target = {});

}  // namespace fwdrel
