// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctap/adiabaticity.hpp"
#include "ctap/csv.hpp"
#include "ctap/errors.hpp"
#include "ctap/evolution.hpp"
#include "ctap/model.hpp"
#include "ctap/spectrum.hpp"
#include "ctap/sweeps.hpp"
#include "ctap/version.hpp"

// Command-line driver: every operation as a subcommand emitting CSV, results
// to --output (default stdout), diagnostics to stderr.
// Exit codes: 0 success, 2 bad arguments, 3 convergence/fit failure.

namespace ctap::cli {

namespace detail {

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = nullptr;

  explicit Output(const std::string& path) {
    if (path == "-") {
      stream = &std::cout;
    } else {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw std::invalid_argument("cannot open output file: " + path);
      stream = file.get();
    }
  }
};

inline const char* site_names[ring_sites] = {"1", "2", "3u", "3d", "4", "5"};

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"ctapint: six-site CTAP interferometer simulator"};
  app.set_version_flag("--version", std::string("ctapint ") + version);
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Read options from a key=value file ([subcommand] sections); "
                 "flags given on the command line take precedence");

  // shared parameters
  double omega_max = 1.0;
  double t_max = 1000.0;
  int steps = 0;  // 0 = auto
  int workers = 0;
  std::string output = "-";

  auto add_common = [&](CLI::App* sub, bool with_workers) {
    sub->add_option("--omega-max", omega_max, "Pulse amplitude (energy scale)")
        ->capture_default_str();
    sub->add_option("--t-max", t_max, "Protocol duration (1/omega_max units)")
        ->capture_default_str();
    sub->add_option("--steps", steps, "Integration substeps (0 = auto)")
        ->capture_default_str();
    sub->add_option("-o,--output", output, "Output path ('-' = stdout)")
        ->capture_default_str();
    if (with_workers)
      sub->add_option("--workers", workers, "Worker threads (0 = hardware)")
          ->capture_default_str();
    sub->configurable();
  };

  // ---- spectrum ----
  auto* sp = app.add_subcommand("spectrum", "Eigenvalues (and optional eigenvectors) vs t");
  double sp_du = 0.0, sp_dd = 0.0, sp_delta = 0.0;
  int sp_samples = 201;
  bool sp_vectors = false;
  std::string sp_system = "ring";
  add_common(sp, false);
  sp->add_option("--delta-u", sp_du, "Detuning of |3u> (ring)")->capture_default_str();
  sp->add_option("--delta-d", sp_dd, "Detuning of |3d> (ring)")->capture_default_str();
  sp->add_option("--delta", sp_delta, "Middle-site detuning (chain)")->capture_default_str();
  sp->add_option("--samples", sp_samples, "Time samples")->capture_default_str();
  sp->add_option("--system", sp_system, "ring or chain")
      ->check(CLI::IsMember({"ring", "chain"}))
      ->capture_default_str();
  sp->add_flag("--vectors", sp_vectors, "Emit eigenvector components");
  sp->callback([&] {
    if (sp_samples < 2) throw std::invalid_argument("--samples must be >= 2");
    const PulseSchedule schedule(omega_max, t_max);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "spectrum");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("system", sp_system);
    csv.meta("samples", sp_samples);
    const bool ring = sp_system == "ring";
    const int dim = ring ? ring_sites : chain_sites;
    if (ring) {
      csv.meta("delta_u", sp_du);
      csv.meta("delta_d", sp_dd);
      csv.meta("labels", "E1..E6 ascending = D2-,D-,D0-,D0+,D+,D2+");
    } else {
      csv.meta("delta", sp_delta);
      csv.meta("labels", "E1..E5 ascending = D2-,D-,D0,D+,D2+");
    }
    std::vector<std::string> cols = {"t"};
    for (int k = 1; k <= dim; ++k) cols.push_back("E" + std::to_string(k));
    if (sp_vectors)
      for (int k = 1; k <= dim; ++k)
        for (int s = 0; s < dim; ++s)
          cols.push_back("v" + std::to_string(k) + "_" + detail::site_names[s]);
    csv.header(cols);
    for (int i = 0; i < sp_samples; ++i) {
      const double t = t_max * i / (sp_samples - 1);
      EigenDecomposition d;
      if (ring)
        d = eigendecompose(build_ring(t, schedule, DetuningConfig{sp_du, sp_dd}));
      else
        d = eigendecompose(build_chain(t, schedule, sp_delta));
      std::vector<double> vals = {t};
      for (int k = 0; k < dim; ++k) vals.push_back(d.eigenvalues[k]);
      if (sp_vectors)
        for (int k = 0; k < dim; ++k)
          for (int s = 0; s < dim; ++s) vals.push_back(d.eigenvectors(s, k));
      csv.row(vals);
    }
  });

  // ---- evolve ----
  auto* ev = app.add_subcommand("evolve", "Site populations vs t for one protocol run");
  double ev_du = 0.0, ev_dd = 0.0, ev_tol = 1e-7;
  int ev_samples = 501;
  bool ev_no_check = false;
  add_common(ev, false);
  ev->add_option("--delta-u", ev_du, "Detuning of |3u>")->capture_default_str();
  ev->add_option("--delta-d", ev_dd, "Detuning of |3d>")->capture_default_str();
  ev->add_option("--samples", ev_samples, "Output samples")->capture_default_str();
  ev->add_option("--convergence-tol", ev_tol, "Step-doubling tolerance on rho55")
      ->capture_default_str();
  ev->add_flag("--no-convergence-check", ev_no_check, "Skip the step-doubling check");
  ev->callback([&] {
    const PulseSchedule schedule(omega_max, t_max);
    const DetuningConfig det{ev_du, ev_dd};
    const int n = steps > 0 ? steps : default_step_count(schedule);
    const auto traj = propagate(schedule, det, n, initial_site_state(site::s1), ev_samples);
    if (!ev_no_check) {
      const auto rep = check_convergence(schedule, det, n);
      if (rep.diff > ev_tol)
        throw convergence_error("step-doubling check failed: |drho55| = " +
                                format_g12(rep.diff) + " > " + format_g12(ev_tol));
    }
    detail::Output out(output);
    CsvWriter csv(*out.stream, "evolve");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("delta_u", ev_du);
    csv.meta("delta_d", ev_dd);
    csv.meta("steps", n);
    csv.meta("samples", static_cast<int>(traj.times.size()));
    csv.header({"t", "rho11", "rho22", "rho3u3u", "rho3d3d", "rho44", "rho55", "norm"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const auto& p = traj.populations;
      csv.row({traj.times[i], p(i, 0), p(i, 1), p(i, 2), p(i, 3), p(i, 4), p(i, 5),
               traj.states[i].norm()});
    }
  });

  // ---- map ----
  auto* mp = app.add_subcommand("map", "rho55 over the (delta_u, delta_d) grid");
  double mp_du_min = -1.0, mp_du_max = 1.0, mp_dd_min = -1.0, mp_dd_max = 1.0;
  double mp_tol = 1e-7;
  int mp_res = 201;
  bool mp_no_audit = false;
  add_common(mp, true);
  mp->add_option("--du-min", mp_du_min, "")->capture_default_str();
  mp->add_option("--du-max", mp_du_max, "")->capture_default_str();
  mp->add_option("--dd-min", mp_dd_min, "")->capture_default_str();
  mp->add_option("--dd-max", mp_dd_max, "")->capture_default_str();
  mp->add_option("--resolution", mp_res, "Points per axis")->capture_default_str();
  mp->add_option("--convergence-tol", mp_tol, "Audit tolerance")->capture_default_str();
  mp->add_flag("--no-audit", mp_no_audit, "Skip the step-doubling audit");
  mp->callback([&] {
    const PulseSchedule schedule(omega_max, t_max);
    SweepOptions opts;
    opts.workers = workers;
    opts.steps = steps;
    opts.audit = !mp_no_audit;
    opts.convergence_tol = mp_tol;
    const auto map = population_map(schedule, Range{mp_du_min, mp_du_max, mp_res},
                                    Range{mp_dd_min, mp_dd_max, mp_res}, opts);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "map");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("du_min", mp_du_min);
    csv.meta("du_max", mp_du_max);
    csv.meta("dd_min", mp_dd_min);
    csv.meta("dd_max", mp_dd_max);
    csv.meta("resolution", mp_res);
    csv.meta("steps", steps > 0 ? steps : default_step_count(schedule));
    csv.header({"delta_u", "delta_d", "rho55"});
    for (int i = 0; i < map.axis1.size(); ++i)
      for (int j = 0; j < map.axis2.size(); ++j)
        csv.row({map.axis1[i], map.axis2[j], map.grid(i, j)});
  });

  // ---- timesweep ----
  auto* ts = app.add_subcommand(
      "timesweep", "rho55 over (t_max, delta) with delta_u = -delta_d = delta");
  double ts_tmin = 250.0, ts_tmax = 2000.0, ts_dmin = 0.0, ts_dmax = 0.1;
  int ts_tres = 8, ts_dres = 201;
  add_common(ts, true);
  ts->add_option("--tmax-min", ts_tmin, "")->capture_default_str();
  ts->add_option("--tmax-max", ts_tmax, "")->capture_default_str();
  ts->add_option("--tmax-res", ts_tres, "")->capture_default_str();
  ts->add_option("--delta-min", ts_dmin, "")->capture_default_str();
  ts->add_option("--delta-max", ts_dmax, "")->capture_default_str();
  ts->add_option("--delta-res", ts_dres, "")->capture_default_str();
  ts->callback([&] {
    SweepOptions opts;
    opts.workers = workers;
    opts.steps = steps;
    const auto map = time_detuning_sweep(omega_max, Range{ts_tmin, ts_tmax, ts_tres},
                                         Range{ts_dmin, ts_dmax, ts_dres}, opts);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "timesweep");
    csv.meta("omega_max", omega_max);
    csv.meta("tmax_min", ts_tmin);
    csv.meta("tmax_max", ts_tmax);
    csv.meta("tmax_res", ts_tres);
    csv.meta("delta_min", ts_dmin);
    csv.meta("delta_max", ts_dmax);
    csv.meta("delta_res", ts_dres);
    csv.header({"t_max", "delta", "rho55"});
    for (int i = 0; i < map.axis1.size(); ++i)
      for (int j = 0; j < map.axis2.size(); ++j)
        csv.row({map.axis1[i], map.axis2[j], map.grid(i, j)});
  });

  // ---- sensitivity ----
  auto* se = app.add_subcommand("sensitivity",
                                "d(rho55)/d(delta_u) over the (delta_u, delta_d) grid");
  double se_du_min = -0.1, se_du_max = 0.1, se_dd_min = -0.1, se_dd_max = 0.1;
  double se_step = 0.0;
  int se_res = 81;
  add_common(se, true);
  se->add_option("--du-min", se_du_min, "")->capture_default_str();
  se->add_option("--du-max", se_du_max, "")->capture_default_str();
  se->add_option("--dd-min", se_dd_min, "")->capture_default_str();
  se->add_option("--dd-max", se_dd_max, "")->capture_default_str();
  se->add_option("--resolution", se_res, "Points per axis")->capture_default_str();
  se->add_option("--delta-step", se_step, "Central-difference step (0 = auto)")
      ->capture_default_str();
  se->callback([&] {
    const PulseSchedule schedule(omega_max, t_max);
    SweepOptions opts;
    opts.workers = workers;
    opts.steps = steps;
    const double h = se_step > 0.0 ? se_step : default_sensitivity_step(schedule);
    const auto map = sensitivity_map(schedule, Range{se_du_min, se_du_max, se_res},
                                     Range{se_dd_min, se_dd_max, se_res}, h, opts);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "sensitivity");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("du_min", se_du_min);
    csv.meta("du_max", se_du_max);
    csv.meta("dd_min", se_dd_min);
    csv.meta("dd_max", se_dd_max);
    csv.meta("resolution", se_res);
    csv.meta("delta_step", h);
    csv.meta("steps", steps > 0 ? steps : default_step_count(schedule));
    csv.header({"delta_u", "delta_d", "drho55_ddelta_u"});
    for (int i = 0; i < map.delta_u.size(); ++i)
      for (int j = 0; j < map.delta_d.size(); ++j)
        csv.row({map.delta_u[i], map.delta_d[j], map.derivative(i, j)});
  });

  // ---- fringes ----
  auto* fr = app.add_subcommand("fringes",
                                "Transfer maxima along delta_u = -delta_d and the fitted f");
  double fr_dmax = 0.0;
  int fr_res = 0;
  add_common(fr, true);
  fr->add_option("--delta-max", fr_dmax, "Scan range (0 = auto from f ~ 20)")
      ->capture_default_str();
  fr->add_option("--resolution", fr_res, "Scan points (0 = auto, 16 per period)")
      ->capture_default_str();
  fr->callback([&] {
    const PulseSchedule schedule(omega_max, t_max);
    const double period = fringe_factor_estimate / t_max;
    const double dmax = fr_dmax > 0.0 ? fr_dmax : 4.8 * period;
    const int res = fr_res > 0 ? fr_res : static_cast<int>(std::ceil(dmax / (period / 16.0))) + 1;
    SweepOptions opts;
    opts.workers = workers;
    opts.steps = steps;
    const auto trace = antidiagonal_trace(schedule, Range{0.0, dmax, res}, opts);
    const auto fit = fit_fringes(trace, t_max);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "fringes");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("delta_max", dmax);
    csv.meta("resolution", res);
    csv.meta("steps", steps > 0 ? steps : default_step_count(schedule));
    csv.meta("fitted_f", fit.f);
    csv.meta("residual_rms", fit.residual_rms);
    csv.meta("mean_spacing", fit.mean_spacing);
    csv.header({"n", "delta_n"});
    for (std::size_t k = 0; k < fit.positions.size(); ++k)
      csv.row_int_first(fit.indices[k], {fit.positions[k]});
  });

  // ---- adiabaticity ----
  auto* ad = app.add_subcommand(
      "adiabaticity", "Five-site max adiabaticity vs detuning: numeric and series");
  double ad_dmin = 0.0, ad_dmax = 0.2;
  int ad_res = 81;
  add_common(ad, false);
  ad->add_option("--delta-min", ad_dmin, "")->capture_default_str();
  ad->add_option("--delta-max", ad_dmax, "")->capture_default_str();
  ad->add_option("--resolution", ad_res, "")->capture_default_str();
  ad->callback([&] {
    if (ad_res < 2) throw std::invalid_argument("--resolution must be >= 2");
    const PulseSchedule schedule(omega_max, t_max);
    detail::Output out(output);
    CsvWriter csv(*out.stream, "adiabaticity");
    csv.meta("omega_max", omega_max);
    csv.meta("t_max", t_max);
    csv.meta("delta_min", ad_dmin);
    csv.meta("delta_max", ad_dmax);
    csv.meta("resolution", ad_res);
    csv.header({"delta", "a_max_numeric", "a_series"});
    for (int i = 0; i < ad_res; ++i) {
      const double d = ad_dmin + (ad_dmax - ad_dmin) * i / (ad_res - 1);
      csv.row({d, max_adiabaticity(schedule, d), adiabaticity_series(schedule, d)});
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fringe_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const singular_gap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"ctapint"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ctap::cli
