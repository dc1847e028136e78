// vsc_main: run / validate / defaults.
//
//   vsc_main run --config plan.toml [--out-dir DIR] [--realizations N] [--seed S]
//                [--threads T] [--dump-states] [--no-bare-reference]
//   vsc_main validate --config plan.toml
//   vsc_main defaults

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>

#include "vsc/config.hpp"
#include "vsc/errors.hpp"
#include "vsc/pipeline.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunFlags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> realizations;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool dump_states = false;
  bool no_bare_reference = false;
};

vsc::RunPlan resolve(const RunFlags& f) {
  vsc::RunPlan plan = vsc::load_run_plan(f.config);
  if (f.out_dir) plan.out_dir = *f.out_dir;
  if (f.realizations) plan.realizations = *f.realizations;
  if (f.seed) plan.seed = *f.seed;
  if (f.threads) plan.threads = *f.threads;
  if (f.dump_states) {
    plan.dump_states = true;
    plan.dump_trajectories = true;
  }
  if (f.no_bare_reference) plan.bare_reference = false;
  plan.validate();
  return plan;
}

int cmd_run(const RunFlags& flags) {
  const vsc::RunPlan plan = resolve(flags);
  const int threads = plan.threads > 0
                          ? plan.threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();

  // Carriage-return updates on a terminal, one line per 10% otherwise.
  const bool tty = isatty(fileno(stderr)) != 0;
  const std::size_t step = tty ? 1 : 10;
  std::size_t last_percent = 101;
  auto progress = [&](std::size_t done, std::size_t total) {
    const std::size_t percent = total ? 100 * done / total : 100;
    if (percent / step == last_percent / step && done != total) return;
    if (percent == last_percent) return;
    last_percent = percent;
    std::fprintf(stderr, tty ? "\r[vsc] %zu/%zu tasks (%zu%%)" : "[vsc] %zu/%zu tasks (%zu%%)\n",
                 done, total, percent);
    if (tty && done == total) std::fputc('\n', stderr);
  };
  const vsc::RunResult result = vsc::execute_plan(plan, threads, progress);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto written = vsc::write_outputs(plan, result, plan.out_dir, {started, elapsed, threads});
  for (const auto& f : result.failures)
    std::cerr << "[vsc] failure: " << f.task << " realization " << f.realization << ": "
              << f.message << '\n';
  std::cerr << "[vsc] wrote " << written.size() << " files to " << plan.out_dir << " in "
            << elapsed << " s";
  if (!result.failures.empty()) std::cerr << " (" << result.failures.size() << " failures)";
  std::cerr << '\n';
  return 0;
}

int cmd_validate(const RunFlags& flags) {
  const vsc::RunPlan plan = resolve(flags);
  std::cout << to_config_text(plan) << '\n';
  const auto points = plan.points();
  const std::size_t tasks = vsc::count_tasks(plan);
  std::cout << "# sweep points: " << points.size() << '\n'
            << "# tasks (point x realization, including bare references): " << tasks << '\n';
  // Work in units of one default-size kinetics realization (dense eigensolves scale as n^3).
  auto units_for = [](int n_molecules, bool kinetics) {
    const double states = kinetics ? 2.0 * n_molecules + 4.0 : n_molecules + 1.0;
    return std::pow(states / 516.0, 3);
  };
  double work = 0.0;
  for (const auto& p : points) work += units_for(p.n_molecules, plan.kinetics);
  const std::size_t bare_keys = tasks / static_cast<std::size_t>(plan.realizations) - points.size();
  if (bare_keys > 0) {
    const std::size_t per_n = bare_keys / plan.n_molecules.size();
    for (int n : plan.n_molecules) work += static_cast<double>(per_n) * units_for(n, true);
  }
  std::cout << "# estimated work units (N=256 kinetics realizations): "
            << std::llround(work * plan.realizations) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibrational strong coupling: dark-mode semilocalization and electron-transfer kinetics"};
  app.set_version_flag("--version", std::string(vsc::version_string()));
  app.require_subcommand(1);

  RunFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Config file (TOML subset) or run_manifest.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", flags.out_dir, "Output directory");
    sub->add_option("--realizations", flags.realizations, "Disorder realizations per sweep point");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--threads", flags.threads, "Worker threads (0: all cores)");
    sub->add_flag("--dump-states", flags.dump_states,
                  "Write per-state trajectories of realization 0");
    sub->add_flag("--no-bare-reference", flags.no_bare_reference,
                  "Skip the uncoupled reference ensemble");
  };

  CLI::App* run = app.add_subcommand("run", "Execute a run plan and write CSV/JSON outputs");
  add_common(run);
  CLI::App* validate = app.add_subcommand("validate", "Check a config and print the resolved plan");
  add_common(validate);
  CLI::App* defaults = app.add_subcommand("defaults", "Print the default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(flags);
    if (*validate) return cmd_validate(flags);
    if (*defaults) {
      std::cout << to_config_text(vsc::default_run_plan());
      return 0;
    }
  } catch (const vsc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const vsc::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
