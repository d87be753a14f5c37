#pragma once

#include "vprobe/config.hpp"
#include "vprobe/sweep.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vprobe {

struct RunConfig {
  std::string command;  // levels | lambshift | spectroscopy | validate
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::optional<int> workers;
  bool quiet = false;
};

// Data commands. Outputs left empty by the config get the command's own set.
SweepResult cmd_levels(SweepSpec spec);
SweepResult cmd_lambshift(SweepSpec spec);
SweepResult cmd_spectroscopy(SweepSpec spec);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  // The check demonstrates a known failure mode; passing means it showed up.
  bool expected_failure = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

ValidationReport cmd_validate(const SweepSpec& spec);

// Resolves the configuration, runs the command, writes
// <out>/<command>_<name>.csv and .json, and returns the exit status.
int run_command(const RunConfig& run, std::ostream& out, std::ostream& err);

}  // namespace vprobe
