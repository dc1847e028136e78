#pragma once

// Run configuration. The file format is a small TOML subset:
//
//   [ensemble]            # n_molecules, mean_vib_freq, disorder_sigma,
//   n_molecules = [16, 256]   detuning (or cavity_freq), collective_coupling
//   [reaction]            # e_reactant ... omega_cut
//   [run]                 # realizations, seed, threads, ...
//
// n_molecules, detuning, collective_coupling, kappa and temperature accept a
// list and become sweep axes. Unknown sections or keys are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vsc/analysis.hpp"
#include "vsc/params.hpp"

namespace vsc {

struct RunPlan {
  // Base values; sweep axes below override the swept fields.
  EnsembleParams ensemble;
  ReactionParams reaction;

  std::vector<int> n_molecules{256};
  std::vector<double> detuning{0.0};
  std::vector<double> collective_coupling{80.0};
  std::vector<double> kappa{1.0};
  std::vector<double> temperature{298.0};

  int realizations = 500;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir = "out";

  double time_step_ns = 0.2;
  int n_time_steps = 100;
  double bin_width_sigma = 0.1;

  bool kinetics = true;          // false: eigenmode statistics only
  bool bare_reference = true;
  double fast_decay_factor = 0;  // > 0 adds a bare reference with gamma scaled by this factor
  bool dump_trajectories = false;
  bool dump_states = false;
  bool dump_rate_tables = false;

  /// All sweep points, ordered by (N, detuning, coupling, kappa, T).
  std::vector<SweepPoint> points() const;
  ModelParams model_at(const SweepPoint& point) const;
  std::vector<double> time_grid_ps() const;
  /// Throws ConfigError naming the section and field of the first violation.
  void validate() const;
};

/// Plan with the literature defaults at N = 256.
RunPlan default_run_plan();

RunPlan parse_run_plan(const std::string& text, const std::string& source = "<config>");
/// Reads a config file, or the "config" object of a run manifest (JSON).
RunPlan load_run_plan(const std::filesystem::path& path);

/// Canonical config text; parse_run_plan(to_config_text(p)) reproduces p.
std::string to_config_text(const RunPlan& plan);

}  // namespace vsc
