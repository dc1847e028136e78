#pragma once

// End-to-end execution of a RunPlan: every (sweep point, realization) pair is
// an independent task; results are reduced in realization order so the output
// does not depend on the worker count.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vsc/analysis.hpp"
#include "vsc/config.hpp"
#include "vsc/master_equation.hpp"
#include "vsc/spectrum.hpp"

namespace vsc {

/// Worst-case invariant violations; merged by taking maxima.
struct InvariantReport {
  double orthonormality = 0.0;   // max |C C^T - I|
  double completeness = 0.0;     // max_i |sum_q c_qi^2 - 1|
  double column_sum = 0.0;       // max |sum_j A_ji|
  double symmetry_defect = 0.0;  // relative asymmetry of the symmetrized generator
  double conservation = 0.0;     // max_t |sum p(t) - 1|
  double equilibrium = 0.0;      // max |p(t_long) - f|
  std::size_t realizations = 0;

  void merge(const InvariantReport& other);
};

struct RealizationOptions {
  bool kinetics = true;
  bool keep_rate_matrix = false;
  bool keep_trajectory = false;
  double equilibrium_time_ps = 1e6;
};

/// Everything computed for one disorder realization at one parameter set.
struct RealizationOutcome {
  Eigensystem<double> eig;
  double reactive_freq = 0.0;
  double delocalization = 0.0;
  std::optional<double> dark_pr;
  // Kinetics (empty when RealizationOptions::kinetics is false).
  std::optional<RateFit> fit;
  double k_vsc_analytical = 0.0;
  double k_bare_analytical = 0.0;
  InvariantReport invariants;
  std::optional<RateMatrix> rate_matrix;
  std::optional<Trajectory> trajectory;
};

RealizationOutcome simulate_realization(const ModelParams& model, const DisorderRealization& real,
                                        std::span<const double> times,
                                        const RealizationOptions& options = {});

/// Parameters of the uncoupled reference: zero coupling, resonant (unused) cavity.
ModelParams bare_reference_model(const ModelParams& model);

/// Seed of the disorder stream for ensembles of `n_molecules`; shared by every
/// sweep point with that N so sweeps compare identical realizations.
std::uint64_t disorder_seed(std::uint64_t master_seed, int n_molecules);

struct PointSummary {
  EnsembleResult result;
  std::size_t n_failed = 0;
  double fit_r2_min = 1.0;
  std::size_t fit_warnings = 0;
  std::size_t analytical_violations = 0;  // realizations with k_vsc^an <= k_bare^an
};

struct SpectrumSummary {
  int n_molecules = 0;
  double detuning = 0.0;
  double collective_coupling = 0.0;
  SpectrumHistogram all_modes{1.0};
  SpectrumHistogram dark_modes{1.0};
  RunningStats lower_polariton, upper_polariton;
  double max_polariton_offset = 0.0;  // vs. the zero-disorder polariton frequencies
};

struct EyringRow {
  std::string label;
  EyringFit fit;
};

struct TaskFailure {
  std::string task;
  std::size_t realization = 0;
  std::string message;
};

struct TrajectoryDump {
  SweepPoint point;
  std::vector<StateLabel> labels;
  Trajectory trajectory;
};

struct RateTableDump {
  SweepPoint point;
  RateMatrix rates;
};

struct RunResult {
  std::vector<PointSummary> points;
  std::vector<SpectrumSummary> spectra;
  std::vector<EyringRow> eyring;
  std::vector<TaskFailure> failures;
  InvariantReport invariants;
  std::vector<TrajectoryDump> trajectories;
  std::vector<RateTableDump> rate_tables;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Number of independent tasks the plan expands to.
std::size_t count_tasks(const RunPlan& plan);

RunResult execute_plan(const RunPlan& plan, int threads = 0, const ProgressFn& progress = {});

void write_rates_csv(std::ostream& out, const RunResult& result);
void write_spectrum_csv(std::ostream& out, const RunResult& result, ModeSelection selection);
void write_eyring_csv(std::ostream& out, const RunResult& result);
void write_trajectory_csv(std::ostream& out, const TrajectoryDump& dump, bool per_state);
void write_rate_table_csv(std::ostream& out, const RateMatrix& rates);

struct RunInfo {
  std::string started_at;
  double elapsed_s = 0.0;
  int threads = 1;
};

/// Writes rates.csv, eigen_stats.csv, dark_stats.csv, eyring.csv (when fits
/// exist), optional dumps, and run_manifest.json. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const RunPlan& plan, const RunResult& result,
                                                 const std::filesystem::path& dir,
                                                 const RunInfo& info);

const char* version_string();

}  // namespace vsc
