#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "attn/model.hpp"
#include "attn/variants.hpp"

namespace attn {

// Flat run configuration: model parameters plus variant and command knobs.
// Assembled by parse_cli from an optional config file (flat key=value or
// JSON object) overridden by command-line flags.
struct RunConfig {
  ModelParams model;
  std::string variant = "baseline";  // baseline|nonexclusive|asymmetric|gamma|multiaction
  double alpha_max = 1.0;            // nonexclusive: feasible attention [1-amax, amax]
  double lambda_R = 1.0;             // asymmetric peak rates
  double lambda_L = 1.0;
  std::string frontier = "builtin";  // gamma: builtin | linear
  std::vector<MiddleAction> middles; // multiaction

  int grid_n = 2001;      // beliefs, evenly spaced on [0,1]
  int n_actions = 201;    // discrete experiment/multiplier grid
  std::uint64_t seed = 1;
  std::uint64_t n_paths = 10000;
  double p0 = 0.5;
  double dt = -1.0;       // <0: per-command default (oracle 1e-3, twoperiod/population 1)
  double t_end = 10.0;    // population horizon
  int n_periods = 2;      // twoperiod
  std::string sweep_key;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 21;
  std::string state = "L";       // population true state
  std::string init = "uniform";  // population initial cross-section: uniform | normal
  double init_mean = 0.5, init_sd = 0.2;
  std::string out;      // also write the primary artifact to this file
  std::string records;  // simulate: per-path CSV file
  std::string format = "csv";  // csv | json
};

struct CliInvocation {
  std::string command;  // solve|oracle|simulate|population|sweep|diagnose|twoperiod
  RunConfig config;
  bool help = false;
  std::string help_text;
};

// Parses argv-style arguments (program name excluded). Config-file values are
// applied first, then flags override. Unknown keys (file or flags) and
// missing required keys raise ParseError; invalid values raise
// ValidationError listing every breach.
CliInvocation parse_cli(const std::vector<std::string>& args);

// Runs one command, writing the primary artifact to `out` (and to the
// config's output files when set). Throws on failure.
void execute_command(const CliInvocation& inv, std::ostream& out);

// Parse + execute + error mapping: exit 0 on success, 2 on validation or
// parse failure, 3 on internal numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace attn
