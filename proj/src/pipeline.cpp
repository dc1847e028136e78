#include "vsc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "vsc/config_json.hpp"
#include "vsc/disorder.hpp"
#include "vsc/errors.hpp"
#include "vsc/units.hpp"

#ifndef VSC_VERSION
#define VSC_VERSION "0.1.0"
#endif

namespace vsc {

const char* version_string() { return "vsc-kinetics " VSC_VERSION; }

void InvariantReport::merge(const InvariantReport& o) {
  orthonormality = std::max(orthonormality, o.orthonormality);
  completeness = std::max(completeness, o.completeness);
  column_sum = std::max(column_sum, o.column_sum);
  symmetry_defect = std::max(symmetry_defect, o.symmetry_defect);
  conservation = std::max(conservation, o.conservation);
  equilibrium = std::max(equilibrium, o.equilibrium);
  realizations += o.realizations;
}

ModelParams bare_reference_model(const ModelParams& model) {
  ModelParams bare = model;
  bare.ensemble.collective_coupling = 0.0;
  bare.ensemble.detuning = 0.0;
  return bare;
}

std::uint64_t disorder_seed(std::uint64_t master_seed, int n_molecules) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(n_molecules)});
}

RealizationOutcome simulate_realization(const ModelParams& model, const DisorderRealization& real,
                                        std::span<const double> times,
                                        const RealizationOptions& options) {
  RealizationOutcome out;
  const Eigen::MatrixXd h = build_hamiltonian<double>(model.ensemble, real);
  out.eig = diagonalize(h, real.index);
  const Eigensystem<double>& eig = out.eig;
  out.reactive_freq = h(kReactiveColumn, kReactiveColumn);
  out.delocalization = reactive_mode_delocalization(eig);
  // Without coupling the cavity mode carries no molecular weight and there are no dark modes.
  if (model.ensemble.collective_coupling > 0.0) out.dark_pr = mean_dark_mode_pr(eig);

  InvariantReport& inv = out.invariants;
  inv.realizations = 1;
  const Eigen::Index n = eig.size();
  inv.orthonormality =
      (eig.coefficients * eig.coefficients.transpose() - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  inv.completeness =
      (eig.coefficients.array().square().colwise().sum() - 1.0).abs().maxCoeff();

  if (!options.kinetics) return out;

  const ReactionParams& reaction = model.reaction;
  const double beta = reaction.beta();
  const VibronicDressing dressing = make_dressing(eig, out.reactive_freq, reaction);
  RateMatrix rates = assemble_rate_matrix(eig, dressing, reaction);
  const SpectralPropagator propagator(rates, beta);
  const Eigen::VectorXd p0 = thermal_initial_population(rates, beta);
  Trajectory traj = propagator.propagate(p0, times);
  out.fit = fit_rate(traj);

  inv.column_sum = rates.generator.colwise().sum().cwiseAbs().maxCoeff();
  inv.symmetry_defect = propagator.symmetry_defect();
  inv.conservation = (traj.populations.colwise().sum().array() - 1.0).abs().maxCoeff();
  inv.equilibrium = (propagator.evaluate(p0, options.equilibrium_time_ps) - propagator.equilibrium())
                        .cwiseAbs()
                        .maxCoeff();

  const BareChannelRates bare = bare_channel_rates(reaction, out.reactive_freq);
  out.k_vsc_analytical = analytical_vsc_rate(eig, bare.k_f, bare.k_b, reaction.gamma);
  out.k_bare_analytical = analytical_bare_rate(bare.k_f, bare.k_b, reaction.gamma);

  if (options.keep_rate_matrix) out.rate_matrix = std::move(rates);
  if (options.keep_trajectory) out.trajectory = std::move(traj);
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct BareKey {
  int n_molecules;
  double temperature;
  double gamma_scale;
};

struct VscSummary {
  bool ok = false;
  std::string error;
  double k = kNaN;
  double r2 = kNaN;
  bool fit_warning = false;
  double delocalization = kNaN;
  double dark_pr = kNaN;
  double k_vsc_an = kNaN;
  double k_bare_an = kNaN;
  InvariantReport invariants;
  std::optional<SpectrumHistogram> all_modes, dark_modes;
  double lower_polariton = kNaN, upper_polariton = kNaN;
  std::optional<RateMatrix> rate_matrix;
  std::optional<Trajectory> trajectory;
};

struct BareSummary {
  bool ok = false;
  std::string error;
  double k = kNaN;
};

struct Layout {
  std::vector<SweepPoint> points;
  std::vector<bool> spectral;  // point carries the eigenmode statistics of its (N, detuning, coupling)
  std::vector<BareKey> bare;
  std::size_t realizations = 0;
};

std::size_t distinct_count(const std::vector<double>& xs) {
  return std::set<double>(xs.begin(), xs.end()).size();
}

Layout make_layout(const RunPlan& plan) {
  Layout l;
  l.points = plan.points();
  l.realizations = static_cast<std::size_t>(plan.realizations);
  const std::size_t n_t = plan.temperature.size(), n_k = plan.kappa.size();
  for (std::size_t p = 0; p < l.points.size(); ++p)
    l.spectral.push_back(p % n_t == 0 && (p / n_t) % n_k == 0);
  if (plan.kinetics && plan.bare_reference) {
    const bool eyring = distinct_count(plan.temperature) >= 3 && plan.fast_decay_factor > 0.0;
    for (int n : plan.n_molecules) {
      for (double t : plan.temperature) l.bare.push_back({n, t, 1.0});
      if (eyring)
        for (double t : plan.temperature) l.bare.push_back({n, t, plan.fast_decay_factor});
    }
  }
  return l;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

std::string point_label(const SweepPoint& p) {
  return "N=" + std::to_string(p.n_molecules) + " detuning=" + fmt(p.detuning) +
         " coupling=" + fmt(p.collective_coupling) + " kappa=" + fmt(p.kappa) +
         " T=" + fmt(p.temperature);
}

std::string point_slug(const SweepPoint& p) {
  std::string s = "N" + std::to_string(p.n_molecules) + "_d" + fmt(p.detuning) + "_g" +
                  fmt(p.collective_coupling) + "_k" + fmt(p.kappa) + "_T" + fmt(p.temperature);
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

std::size_t find_bare(const Layout& l, int n, double t, double scale) {
  for (std::size_t i = 0; i < l.bare.size(); ++i)
    if (l.bare[i].n_molecules == n && l.bare[i].temperature == t && l.bare[i].gamma_scale == scale)
      return i;
  return l.bare.size();
}

template <typename Fn>
void run_parallel(std::size_t n_tasks, int threads, const ProgressFn& progress, Fn&& work) {
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) {
      work(i);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, n_tasks);
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n_tasks, 1))));
  if (n_workers == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
}

}  // namespace

std::size_t count_tasks(const RunPlan& plan) {
  const Layout l = make_layout(plan);
  return (l.points.size() + l.bare.size()) * l.realizations;
}

RunResult execute_plan(const RunPlan& plan, int threads, const ProgressFn& progress) {
  plan.validate();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const Layout layout = make_layout(plan);
  const std::size_t n_real = layout.realizations;
  const std::vector<double> times = plan.time_grid_ps();

  std::vector<VscSummary> vsc(layout.points.size() * n_real);
  std::vector<BareSummary> bare(layout.bare.size() * n_real);

  auto run_vsc = [&](std::size_t task) {
    const std::size_t p = task / n_real, r = task % n_real;
    const SweepPoint& point = layout.points[p];
    const ModelParams model = plan.model_at(point);
    VscSummary& s = vsc[task];
    try {
      const DisorderRealization real =
          sample_disorder(model.ensemble, disorder_seed(plan.seed, point.n_molecules), r);
      RealizationOptions opt;
      opt.kinetics = plan.kinetics;
      opt.keep_rate_matrix = plan.kinetics && plan.dump_rate_tables && r == 0;
      opt.keep_trajectory = plan.kinetics && plan.dump_trajectories && r == 0;
      RealizationOutcome o = simulate_realization(model, real, times, opt);
      s.delocalization = o.delocalization;
      s.dark_pr = o.dark_pr.value_or(kNaN);
      s.invariants = o.invariants;
      if (o.fit) {
        s.k = o.fit->rate;
        s.r2 = o.fit->r2_adjusted;
        s.fit_warning = o.fit->warning.has_value();
        s.k_vsc_an = o.k_vsc_analytical;
        s.k_bare_an = o.k_bare_analytical;
      }
      if (layout.spectral[p]) {
        const double width = plan.bin_width_sigma * model.ensemble.disorder_sigma;
        s.all_modes.emplace(width);
        s.all_modes->add(o.eig, ModeSelection::all);
        s.dark_modes.emplace(width);
        s.dark_modes->add(o.eig, ModeSelection::dark);
        s.lower_polariton = o.eig.frequencies[0];
        s.upper_polariton = o.eig.frequencies[o.eig.size() - 1];
      }
      s.rate_matrix = std::move(o.rate_matrix);
      s.trajectory = std::move(o.trajectory);
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  };

  auto run_bare = [&](std::size_t task) {
    const std::size_t b = task / n_real, r = task % n_real;
    const BareKey& key = layout.bare[b];
    SweepPoint point{key.n_molecules, 0.0, 0.0, plan.kappa.front(), key.temperature};
    ModelParams model = bare_reference_model(plan.model_at(point));
    model.reaction.gamma *= key.gamma_scale;
    BareSummary& s = bare[task];
    try {
      const DisorderRealization real =
          sample_disorder(model.ensemble, disorder_seed(plan.seed, key.n_molecules), r);
      RealizationOptions opt;
      const RealizationOutcome o = simulate_realization(model, real, times, opt);
      s.k = o.fit->rate;
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  };

  run_parallel(vsc.size() + bare.size(), threads, progress, [&](std::size_t i) {
    if (i < vsc.size())
      run_vsc(i);
    else
      run_bare(i - vsc.size());
  });

  RunResult result;

  std::vector<RunningStats> bare_stats(layout.bare.size());
  for (std::size_t b = 0; b < layout.bare.size(); ++b) {
    const BareKey& key = layout.bare[b];
    for (std::size_t r = 0; r < n_real; ++r) {
      const BareSummary& s = bare[b * n_real + r];
      if (s.ok) {
        bare_stats[b].add(s.k);
      } else {
        result.failures.push_back({"bare N=" + std::to_string(key.n_molecules) + " T=" +
                                       fmt(key.temperature) + " gamma_scale=" + fmt(key.gamma_scale),
                                   r, s.error});
      }
    }
  }

  std::map<std::tuple<int, double, double>, std::size_t> spectrum_index;
  for (std::size_t p = 0; p < layout.points.size(); ++p) {
    const SweepPoint& point = layout.points[p];
    const std::size_t b = find_bare(layout, point.n_molecules, point.temperature, 1.0);
    PointSummary ps;
    EnsembleAccumulator acc;
    SpectrumSummary* spec = nullptr;
    if (layout.spectral[p]) {
      const double width = plan.bin_width_sigma * plan.ensemble.disorder_sigma;
      SpectrumSummary ss;
      ss.n_molecules = point.n_molecules;
      ss.detuning = point.detuning;
      ss.collective_coupling = point.collective_coupling;
      ss.all_modes = SpectrumHistogram(width);
      ss.dark_modes = SpectrumHistogram(width);
      spectrum_index[{point.n_molecules, point.detuning, point.collective_coupling}] =
          result.spectra.size();
      result.spectra.push_back(std::move(ss));
      spec = &result.spectra.back();
    }
    const auto ideal = ideal_polariton_frequencies(plan.model_at(point).ensemble);

    for (std::size_t r = 0; r < n_real; ++r) {
      VscSummary& s = vsc[p * n_real + r];
      if (!s.ok) {
        ++ps.n_failed;
        result.failures.push_back({point_label(point), r, s.error});
        continue;
      }
      RealizationRecord rec;
      rec.index = r;
      rec.k_vsc = s.k;
      rec.k_bare = (b < layout.bare.size() && bare[b * n_real + r].ok) ? bare[b * n_real + r].k : kNaN;
      rec.delocalization = s.delocalization;
      rec.dark_pr = s.dark_pr;
      rec.k_vsc_analytical = s.k_vsc_an;
      rec.k_bare_analytical = s.k_bare_an;
      acc.add(rec);
      if (plan.kinetics) {
        ps.fit_r2_min = std::min(ps.fit_r2_min, s.r2);
        if (s.fit_warning) ++ps.fit_warnings;
        if (!(s.k_vsc_an > s.k_bare_an)) ++ps.analytical_violations;
      }
      result.invariants.merge(s.invariants);
      if (spec && s.all_modes) {
        spec->all_modes.merge(*s.all_modes);
        spec->dark_modes.merge(*s.dark_modes);
        spec->lower_polariton.add(s.lower_polariton);
        spec->upper_polariton.add(s.upper_polariton);
        spec->max_polariton_offset =
            std::max({spec->max_polariton_offset, std::abs(s.lower_polariton - ideal.first),
                      std::abs(s.upper_polariton - ideal.second)});
      }
      if (s.trajectory && s.rate_matrix)
        result.trajectories.push_back({point, s.rate_matrix->labels, std::move(*s.trajectory)});
      else if (s.trajectory)
        result.trajectories.push_back({point, {}, std::move(*s.trajectory)});
      if (s.rate_matrix && plan.dump_rate_tables)
        result.rate_tables.push_back({point, std::move(*s.rate_matrix)});
      s = VscSummary{};
    }
    ps.result = acc.result(point);
    if (!plan.kinetics) ps.fit_r2_min = kNaN;
    result.points.push_back(std::move(ps));
  }

  // Eyring fits over the temperature axis.
  if (plan.kinetics && distinct_count(plan.temperature) >= 3) {
    auto fit_or_fail = [&](const std::string& label, const std::vector<double>& ts,
                           const std::vector<double>& ks) {
      try {
        result.eyring.push_back({label, eyring_fit(ts, ks)});
      } catch (const std::exception& e) {
        result.failures.push_back({"eyring " + label, 0, e.what()});
      }
    };
    const std::size_t n_t = plan.temperature.size();
    for (std::size_t p0 = 0; p0 < result.points.size(); p0 += n_t) {
      std::vector<double> ts, ks;
      for (std::size_t i = 0; i < n_t; ++i) {
        ts.push_back(result.points[p0 + i].result.point.temperature);
        ks.push_back(result.points[p0 + i].result.k_vsc.mean);
      }
      const SweepPoint& pt = result.points[p0].result.point;
      fit_or_fail("vsc N=" + std::to_string(pt.n_molecules) + " detuning=" + fmt(pt.detuning) +
                      " coupling=" + fmt(pt.collective_coupling) + " kappa=" + fmt(pt.kappa),
                  ts, ks);
    }
    std::vector<double> scales{1.0};
    if (plan.fast_decay_factor > 0.0) scales.push_back(plan.fast_decay_factor);
    for (int n : plan.n_molecules) {
      for (double scale : scales) {
        std::vector<double> ts, ks;
        for (double t : plan.temperature) {
          const std::size_t b = find_bare(layout, n, t, scale);
          if (b == layout.bare.size() || bare_stats[b].count() == 0) continue;
          ts.push_back(t);
          ks.push_back(bare_stats[b].mean());
        }
        if (ts.empty()) continue;
        fit_or_fail(std::string(scale == 1.0 ? "bare" : "bare_fast_decay") +
                        " N=" + std::to_string(n),
                    ts, ks);
      }
    }
  }
  return result;
}

void write_rates_csv(std::ostream& out, const RunResult& result) {
  out << "N,detuning_cm1,g_sqrtN_cm1,kappa_ps1,T_K,k_vsc_ps1,k_vsc_se,k_bare_ps1,ratio,"
         "deloc_mean,n_realizations,k_bare_se,ratio_se,deloc_se,dark_pr_mean,dark_pr_se,"
         "k_vsc_analytical_ps1,k_bare_analytical_ps1,ratio_analytical,ratio_analytical_se,"
         "fit_r2_min,fit_warnings,analytical_violations,n_failed\n";
  for (const PointSummary& ps : result.points) {
    const EnsembleResult& r = ps.result;
    const SweepPoint& p = r.point;
    out << p.n_molecules << ',' << fmt(p.detuning) << ',' << fmt(p.collective_coupling) << ','
        << fmt(p.kappa) << ',' << fmt(p.temperature) << ',' << fmt(r.k_vsc.mean) << ','
        << fmt(r.k_vsc.standard_error) << ',' << fmt(r.k_bare.mean) << ',' << fmt(r.ratio.mean)
        << ',' << fmt(r.delocalization.mean) << ',' << r.n_realizations << ','
        << fmt(r.k_bare.standard_error) << ',' << fmt(r.ratio.standard_error) << ','
        << fmt(r.delocalization.standard_error) << ',' << fmt(r.dark_pr.mean) << ','
        << fmt(r.dark_pr.standard_error) << ',' << fmt(r.k_vsc_analytical.mean) << ','
        << fmt(r.k_bare_analytical.mean) << ',' << fmt(r.ratio_analytical.mean) << ','
        << fmt(r.ratio_analytical.standard_error) << ',' << fmt(ps.fit_r2_min) << ','
        << ps.fit_warnings << ',' << ps.analytical_violations << ',' << ps.n_failed << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const RunResult& result, ModeSelection selection) {
  out << "N,detuning_cm1,g_sqrtN_cm1,bin_center_cm1,probability,mean_photon_fraction,"
         "mean_molecular_pr,n_modes\n";
  for (const SpectrumSummary& s : result.spectra) {
    const SpectrumHistogram& h = selection == ModeSelection::all ? s.all_modes : s.dark_modes;
    if (h.empty()) continue;
    for (const SpectrumRow& row : h.rows())
      out << s.n_molecules << ',' << fmt(s.detuning) << ',' << fmt(s.collective_coupling) << ','
          << fmt(row.bin_center) << ',' << fmt(row.probability) << ','
          << fmt(row.mean_photon_fraction) << ',' << fmt(row.mean_molecular_pr) << ','
          << row.n_modes << '\n';
  }
}

void write_eyring_csv(std::ostream& out, const RunResult& result) {
  out << "case_label,dH_kJ_mol,dS_J_molK,r2_adjusted\n";
  for (const EyringRow& row : result.eyring)
    out << '"' << row.label << "\"," << fmt(row.fit.enthalpy) << ',' << fmt(row.fit.entropy) << ','
        << fmt(row.fit.r2_adjusted) << '\n';
}

void write_trajectory_csv(std::ostream& out, const TrajectoryDump& dump, bool per_state) {
  const Trajectory& t = dump.trajectory;
  const bool states = per_state && !dump.labels.empty();
  out << "time_ns,p_R";
  if (states)
    for (const StateLabel& l : dump.labels) out << ",\"p(" << l.to_string() << ")\"";
  out << '\n';
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    out << fmt(t.times[k] / units::kPsPerNs) << ',' << fmt(t.reactant_population[col]);
    if (states)
      for (Eigen::Index i = 0; i < t.populations.rows(); ++i) out << ',' << fmt(t.populations(i, col));
    out << '\n';
  }
}

void write_rate_table_csv(std::ostream& out, const RateMatrix& rates) {
  out << "from_state,to_state,rate_ps1,class\n";
  for (Eigen::Index i = 0; i < rates.size(); ++i)
    for (Eigen::Index j = 0; j < rates.size(); ++j) {
      if (i == j || rates.generator(j, i) == 0.0) continue;
      out << '"' << rates.labels[i].to_string() << "\",\"" << rates.labels[j].to_string() << "\","
          << fmt(rates.generator(j, i)) << ','
          << to_string(classify_transition(rates.labels[i], rates.labels[j])) << '\n';
    }
}

std::vector<std::filesystem::path> write_outputs(const RunPlan& plan, const RunResult& result,
                                                 const std::filesystem::path& dir,
                                                 const RunInfo& info) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto open = [&](const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
    return f;
  };
  {
    auto f = open(dir / "eigen_stats.csv");
    write_spectrum_csv(f, result, ModeSelection::all);
  }
  {
    auto f = open(dir / "dark_stats.csv");
    write_spectrum_csv(f, result, ModeSelection::dark);
  }
  if (plan.kinetics) {
    auto f = open(dir / "rates.csv");
    write_rates_csv(f, result);
  }
  if (!result.eyring.empty()) {
    auto f = open(dir / "eyring.csv");
    write_eyring_csv(f, result);
  }
  for (const TrajectoryDump& d : result.trajectories) {
    auto f = open(dir / "trajectories" / ("trajectory_" + point_slug(d.point) + ".csv"));
    write_trajectory_csv(f, d, plan.dump_states);
  }
  for (const RateTableDump& d : result.rate_tables) {
    auto f = open(dir / "rate_tables" / ("rates_" + point_slug(d.point) + ".csv"));
    write_rate_table_csv(f, d.rates);
  }

  nlohmann::json manifest;
  manifest["config"] = plan_to_json(plan);
  manifest["config_text"] = to_config_text(plan);
  manifest["seed"] = plan.seed;
  manifest["version"] = version_string();
  manifest["started_at"] = info.started_at;
  manifest["elapsed_s"] = info.elapsed_s;
  manifest["threads"] = info.threads;
  manifest["failures"] = nlohmann::json::array();
  for (const TaskFailure& f : result.failures)
    manifest["failures"].push_back(
        {{"task", f.task}, {"realization", f.realization}, {"message", f.message}});
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : written) outputs.push_back(fs::relative(p, dir).string());
  manifest["outputs"] = outputs;
  const fs::path manifest_path = dir / "run_manifest.json";
  {
    std::ofstream f(manifest_path);
    f << manifest.dump(2) << '\n';
  }
  written.push_back(manifest_path);
  return written;
}

}  // namespace vsc
