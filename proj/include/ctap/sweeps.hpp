// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "ctap/errors.hpp"
#include "ctap/evolution.hpp"
#include "ctap/model.hpp"

// Parameter-sweep engine: final-state population maps over the detunings,
// antidiagonal traces, fringe extraction (Delta_n = f * n / t_max), and
// sensitivity maps/scaling. Grid points are independent propagations pulled
// from a shared counter and written to preassigned slots, so results are
// bit-identical for any worker count.

namespace ctap {

struct Range {
  double lo;
  double hi;
  int n;

  Eigen::VectorXd values() const {
    if (n < 2) throw std::invalid_argument("Range: resolution must be >= 2");
    return Eigen::VectorXd::LinSpaced(n, lo, hi);
  }
};

struct SweepOptions {
  int workers = 0;               // <= 0: hardware concurrency
  int steps = 0;                 // <= 0: default_step_count(schedule)
  bool audit = true;             // step-doubling audit at sentinel grid points
  double convergence_tol = 1e-7;
};

struct PopulationMap {
  Eigen::VectorXd axis1;  // delta_u values (or t_max values for time sweeps)
  Eigen::VectorXd axis2;  // delta_d or antisymmetric-delta values
  Eigen::MatrixXd grid;   // grid(i, j) = rho55 at (axis1[i], axis2[j])
};

struct DetuningTrace {
  Eigen::VectorXd delta;
  Eigen::VectorXd rho55;
};

struct FringeFit {
  std::vector<int> indices;       // n = 0, 1, ...
  std::vector<double> positions;  // Delta_n, strictly increasing
  std::vector<double> residuals;  // Delta_n - f * n / t_max
  double f = 0.0;
  double residual_rms = 0.0;
  double mean_spacing = 0.0;
};

struct SensitivityMap {
  Eigen::VectorXd delta_u;
  Eigen::VectorXd delta_d;
  Eigen::MatrixXd derivative;  // d(rho55)/d(delta_u), central difference
  double step = 0.0;
};

struct SensitivityScaling {
  Eigen::VectorXd t_max;
  Eigen::VectorXd peak_derivative;
  Eigen::VectorXd fringe_position;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Empirical fringe factor used only to size scan windows and probe steps.
inline constexpr double fringe_factor_estimate = 20.0;

namespace detail {

template <class F>
inline void parallel_for(int n, int workers, F&& f) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto body = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!err) err = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline int resolve_steps(const PulseSchedule& s, const SweepOptions& opts) {
  return opts.steps > 0 ? opts.steps : default_step_count(s);
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline void audit_point(const PulseSchedule& s, double du, double dd, int steps,
                        double tol) {
  const auto rep = check_convergence(s, DetuningConfig{du, dd}, steps);
  if (rep.diff > tol) {
    std::ostringstream msg;
    msg << "convergence audit failed at (delta_u=" << du << ", delta_d=" << dd
        << "): |drho55| = " << rep.diff << " > " << tol << " with " << steps
        << " steps";
    throw convergence_error(msg.str());
  }
}

}  // namespace detail

// rho55(t_max) over the (delta_u, delta_d) grid, one propagation per point
// starting from |1>.
inline PopulationMap population_map(const PulseSchedule& schedule, const Range& du,
                                    const Range& dd, const SweepOptions& opts = {}) {
  PopulationMap map;
  map.axis1 = du.values();
  map.axis2 = dd.values();
  map.grid.resize(du.n, dd.n);
  const int steps = detail::resolve_steps(schedule, opts);
  const detail::StepPlan plan(schedule, steps);
  detail::parallel_for(du.n * dd.n, opts.workers, [&](int idx) {
    const int i = idx / dd.n, j = idx % dd.n;
    map.grid(i, j) = detail::clamp01(
        detail::final_rho55(plan, map.axis1[i], map.axis2[j]));
  });
  if (opts.audit) {
    for (auto [i, j] : {std::pair{0, 0}, std::pair{0, dd.n - 1},
                        std::pair{du.n - 1, 0}, std::pair{du.n - 1, dd.n - 1},
                        std::pair{du.n / 2, dd.n / 2}})
      detail::audit_point(schedule, map.axis1[i], map.axis2[j], steps,
                          opts.convergence_tol);
  }
  return map;
}

// 1D sweep along the antisymmetric line delta_u = -delta_d = delta.
inline DetuningTrace antidiagonal_trace(const PulseSchedule& schedule,
                                        const Range& delta,
                                        const SweepOptions& opts = {}) {
  DetuningTrace tr;
  tr.delta = delta.values();
  tr.rho55.resize(delta.n);
  const int steps = detail::resolve_steps(schedule, opts);
  const detail::StepPlan plan(schedule, steps);
  detail::parallel_for(delta.n, opts.workers, [&](int i) {
    tr.rho55[i] = detail::clamp01(
        detail::final_rho55(plan, tr.delta[i], -tr.delta[i]));
  });
  if (opts.audit) {
    for (int i : {0, delta.n / 2, delta.n - 1})
      detail::audit_point(schedule, tr.delta[i], -tr.delta[i], steps,
                          opts.convergence_tol);
  }
  return tr;
}

// Grid over (t_max, delta) along the antisymmetric line.
inline PopulationMap time_detuning_sweep(double omega_max, const Range& t_max,
                                         const Range& delta,
                                         const SweepOptions& opts = {}) {
  PopulationMap map;
  map.axis1 = t_max.values();
  map.axis2 = delta.values();
  map.grid.resize(t_max.n, delta.n);
  for (int i = 0; i < t_max.n; ++i) {
    const PulseSchedule s(omega_max, map.axis1[i]);
    const int steps = detail::resolve_steps(s, opts);
    const detail::StepPlan plan(s, steps);
    detail::parallel_for(delta.n, opts.workers, [&](int j) {
      map.grid(i, j) = detail::clamp01(
          detail::final_rho55(plan, map.axis2[j], -map.axis2[j]));
    });
  }
  if (opts.audit) {
    const PulseSchedule s(omega_max, map.axis1[t_max.n - 1]);
    detail::audit_point(s, map.axis2[delta.n - 1], -map.axis2[delta.n - 1],
                        detail::resolve_steps(s, opts), opts.convergence_tol);
  }
  return map;
}

// Locates transfer maxima in an antidiagonal trace and fits
// Delta_n = f * n / t_max through the origin (least squares over n >= 1).
// Maxima are found by discrete comparison and sharpened with a three-point
// quadratic fit; a falling left edge at the first sample counts as the
// central n = 0 maximum.
inline FringeFit fit_fringes(const DetuningTrace& trace, double t_max) {
  const auto& d = trace.delta;
  const auto& r = trace.rho55;
  const int n = static_cast<int>(d.size());
  if (n < 3) throw fringe_error("fit_fringes: trace too short");
  for (int i = 1; i < n; ++i)
    if (!(d[i] > d[i - 1]))
      throw fringe_error("fit_fringes: trace not ascending in delta");

  FringeFit fit;
  const double step0 = d[1] - d[0];
  if (r[0] > r[1] && d[0] >= -0.25 * step0) fit.positions.push_back(d[0]);
  for (int i = 1; i + 1 < n; ++i) {
    if (!(r[i] > r[i - 1] && r[i] > r[i + 1])) continue;
    const double denom = r[i - 1] - 2.0 * r[i] + r[i + 1];
    const double off = denom != 0.0 ? 0.5 * (r[i - 1] - r[i + 1]) / denom : 0.0;
    const double pos = d[i] + off * (d[i + 1] - d[i]);
    if (pos >= -0.25 * step0) fit.positions.push_back(pos);
  }
  if (fit.positions.size() < 2)
    throw fringe_error("fit_fringes: fewer than 2 maxima found; widen the delta range");

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < fit.positions.size(); ++k) {
    fit.indices.push_back(static_cast<int>(k));
    const double x = static_cast<double>(k) / t_max;
    sxx += x * x;
    sxy += x * fit.positions[k];
  }
  fit.f = sxy / sxx;

  double ss = 0.0;
  for (std::size_t k = 0; k < fit.positions.size(); ++k) {
    const double res = fit.positions[k] - fit.f * static_cast<double>(k) / t_max;
    fit.residuals.push_back(res);
    ss += res * res;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(fit.positions.size()));
  fit.mean_spacing = (fit.positions.back() - fit.positions.front()) /
                     static_cast<double>(fit.positions.size() - 1);
  return fit;
}

// d(rho55)/d(delta_u) over the grid by central difference with step
// delta_step (two propagations per grid point).
inline SensitivityMap sensitivity_map(const PulseSchedule& schedule, const Range& du,
                                      const Range& dd, double delta_step,
                                      const SweepOptions& opts = {}) {
  if (!(delta_step > 0.0))
    throw std::invalid_argument("sensitivity_map: delta_step must be > 0");
  SensitivityMap map;
  map.delta_u = du.values();
  map.delta_d = dd.values();
  map.derivative.resize(du.n, dd.n);
  map.step = delta_step;
  const int steps = detail::resolve_steps(schedule, opts);
  const detail::StepPlan plan(schedule, steps);
  detail::parallel_for(du.n * dd.n, opts.workers, [&](int idx) {
    const int i = idx / dd.n, j = idx % dd.n;
    const double hi = detail::final_rho55(plan, map.delta_u[i] + delta_step, map.delta_d[j]);
    const double lo = detail::final_rho55(plan, map.delta_u[i] - delta_step, map.delta_d[j]);
    map.derivative(i, j) = (hi - lo) / (2.0 * delta_step);
  });
  return map;
}

// Default finite-difference step: 1e-3 of the estimated fringe spacing,
// clamped away from cancellation.
inline double default_sensitivity_step(const PulseSchedule& schedule) {
  return std::max(1e-3 * fringe_factor_estimate / schedule.t_max,
                  1e-6 * schedule.omega_max);
}

// Tracks the first-fringe steepest point along the antidiagonal for each
// t_max and records the peak |d(rho55)/d(delta_u)| there, plus a linear fit
// of peak vs t_max.
inline SensitivityScaling sensitivity_vs_time(double omega_max,
                                              const std::vector<double>& t_values,
                                              const SweepOptions& opts = {}) {
  if (t_values.size() < 2)
    throw std::invalid_argument("sensitivity_vs_time: need at least 2 t_max values");
  SensitivityScaling out;
  out.t_max.resize(t_values.size());
  out.peak_derivative.resize(t_values.size());
  out.fringe_position.resize(t_values.size());

  for (std::size_t k = 0; k < t_values.size(); ++k) {
    const PulseSchedule s(omega_max, t_values[k]);
    const int steps = detail::resolve_steps(s, opts);
    const detail::StepPlan plan(s, steps);
    const double period = fringe_factor_estimate / s.t_max;

    // coarse scan of the descent into the first minimum
    constexpr int scan_n = 33;
    Eigen::VectorXd dvals(scan_n), rho(scan_n);
    for (int i = 0; i < scan_n; ++i) dvals[i] = 0.75 * period * i / (scan_n - 1);
    detail::parallel_for(scan_n, opts.workers, [&](int i) {
      rho[i] = detail::final_rho55(plan, dvals[i], -dvals[i]);
    });
    int seg = 0;
    double best = -1.0;
    for (int i = 0; i + 1 < scan_n; ++i) {
      const double slope = std::abs(rho[i + 1] - rho[i]) / (dvals[i + 1] - dvals[i]);
      if (slope > best) {
        best = slope;
        seg = i;
      }
    }
    if (seg == 0 || seg >= scan_n - 2)
      throw fringe_error("sensitivity_vs_time: first fringe not resolved at t_max = " +
                         std::to_string(s.t_max));

    // refine: maximize |d(rho55)/d(delta_u)| with dedicated +-h probes
    const double h = std::max(1e-3 * period, 1e-6 * omega_max);
    auto deriv = [&](double delta) {
      const double hi = detail::final_rho55(plan, delta + h, -delta);
      const double lo = detail::final_rho55(plan, delta - h, -delta);
      return std::abs(hi - lo) / (2.0 * h);
    };
    double a = dvals[seg - 1], b = dvals[std::min(seg + 2, scan_n - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = deriv(c), fe = deriv(e);
    while (b - a > 1e-3 * period) {
      if (fc > fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - gr * (b - a);
        fc = deriv(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + gr * (b - a);
        fe = deriv(e);
      }
    }
    out.t_max[k] = s.t_max;
    out.peak_derivative[k] = std::max(fc, fe);
    out.fringe_position[k] = 0.5 * (a + b);
  }

  // least-squares line peak = slope * t_max + intercept
  const auto& x = out.t_max;
  const auto& y = out.peak_derivative;
  const double n = static_cast<double>(x.size());
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  const double ss_res = (y.array() - (out.slope * x.array() + out.intercept)).square().sum();
  const double ss_tot = (y.array() - my).square().sum();
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  (void)n;
  return out;
}

}  // namespace ctap
