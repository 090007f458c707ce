// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ctap/adiabaticity.hpp"
#include "ctap/evolution.hpp"
#include "ctap/model.hpp"
#include "ctap/spectrum.hpp"
#include "ctap/sweeps.hpp"

using namespace ctap;

namespace {

int failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void report(int num, bool pass, const std::string& what, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", num,
              what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  for (int i = 0; i < n; ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

RingHamiltonian ring_at(double o1, double o2, double du, double dd) {
  RingHamiltonian h;
  h.matrix.setZero();
  h.matrix(0, 1) = h.matrix(1, 0) = o1;
  h.matrix(2, 4) = h.matrix(4, 2) = o1;
  h.matrix(3, 4) = h.matrix(4, 3) = o1;
  h.matrix(1, 2) = h.matrix(2, 1) = o2;
  h.matrix(1, 3) = h.matrix(3, 1) = o2;
  h.matrix(4, 5) = h.matrix(5, 4) = o2;
  h.matrix(2, 2) = du;
  h.matrix(3, 3) = dd;
  return h;
}

// 1. numeric 6x6 eigenvalues vs the zero-detuning closed form, 1e4 draws,
//    1e-10 relative, under 5 s
void criterion1() {
  const double t0 = now_seconds();
  std::mt19937 rng(20240901);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double o1 = dist(rng), o2 = dist(rng);
    const auto d = eigendecompose(ring_at(o1, o2, 0.0, 0.0));
    const auto ana = analytic_ring_eigenvalues(o1, o2);
    const double scale = std::max(ana[5], 1e-300);
    for (int k = 0; k < 6; ++k)
      worst = std::max(worst, std::abs(d.eigenvalues[k] - ana[k]) / scale);
  }
  const double dt = now_seconds() - t0;
  report(1, worst < 1e-10 && dt < 5.0,
         "analytic eigenvalue oracle, 1e4 random couplings: worst rel err = " +
             fmt(worst) + " (< 1e-10), runtime " + fmt(dt) + " s (< 5)",
         dt);
}

// 2. max adiabaticity at zero detuning equals 4 pi/(sqrt(3) W T) to 1e-6
void criterion2() {
  const double t0 = now_seconds();
  bool pass = true;
  std::string detail = "max adiabaticity vs closed form:";
  for (double wt : {50.0, 100.0, 1000.0}) {
    const PulseSchedule s(1.0, wt);
    const double num = max_adiabaticity(s, 0.0);
    const double ref = adiabaticity_closed_form(s);
    const double rel = std::abs(num - ref) / ref;
    detail += " [W*T=" + fmt(wt) + ": " + fmt(rel) + "]";
    pass = pass && rel < 1e-6;
  }
  report(2, pass, detail + " all < 1e-6", now_seconds() - t0);
}

// 3. series tracks the numeric maximum within 1% on [0, 0.05] and the
//    residual decays with log-log slope 3 +- 0.3, under 30 s
void criterion3() {
  const double t0 = now_seconds();
  const PulseSchedule s(1.0, 100.0);
  double worst_rel = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double delta = 0.05 * i / 10.0;
    const double num = max_adiabaticity(s, delta);
    const double ser = adiabaticity_series(s, delta);
    worst_rel = std::max(worst_rel, std::abs(num - ser) / num);
  }
  std::vector<double> xs, ys;
  for (int i = 0; i < 9; ++i) {
    const double delta = std::pow(10.0, -3.0 + (std::log10(0.05) + 3.0) * i / 8.0);
    xs.push_back(delta);
    ys.push_back(std::abs(max_adiabaticity(s, delta) - adiabaticity_series(s, delta)));
  }
  const double slope = loglog_slope(xs, ys);
  const double dt = now_seconds() - t0;
  report(3,
         worst_rel < 0.01 && slope > 2.7 && slope < 3.3 && dt < 30.0,
         "series vs numeric max adiabaticity: worst rel = " + fmt(worst_rel) +
             " (< 0.01), residual slope = " + fmt(slope) + " (3 +- 0.3), runtime " +
             fmt(dt) + " s (< 30)",
         dt);
}

// 4. zero detuning at W*T = 200: final rho55 >= 0.999 with norm drift < 1e-9
void criterion4() {
  const double t0 = now_seconds();
  const PulseSchedule s(1.0, 200.0);
  const auto traj = propagate(s, DetuningConfig{}, default_step_count(s),
                              initial_site_state(site::s1), 501);
  double drift = 0.0;
  for (const auto& st : traj.states) drift = std::max(drift, std::abs(st.norm() - 1.0));
  const double rho55 = final_population(traj, site::s5);
  report(4, rho55 >= 0.999 && drift < 1e-9,
         "high-fidelity transfer: rho55 = " + fmt(rho55) +
             " (>= 0.999), norm drift = " + fmt(drift) + " (< 1e-9)",
         now_seconds() - t0);
}

// 5. antisymmetric midpoint gap equals 2 delta/sqrt(5) with error <= O(delta^2).
//    The residual's quadratic term vanishes by the arm-swap/sign-flip symmetry,
//    so its measured decay is cubic; we assert the O(delta^2) bound plus
//    super-quadratic decay and report the measured slope.
void criterion5() {
  const double t0 = now_seconds();
  std::vector<double> xs, ys;
  bool bound_ok = true;
  std::string ratios = "residual/delta^2 =";
  for (double delta : {0.01, 0.02, 0.05}) {
    const auto d = eigendecompose(ring_at(0.5, 0.5, delta, -delta));
    const double gap = d.eigenvalues[3] - d.eigenvalues[2];
    const double resid = std::abs(gap - 2.0 * delta / std::sqrt(5.0));
    xs.push_back(delta);
    ys.push_back(resid);
    ratios += " " + fmt(resid / (delta * delta));
    bound_ok = bound_ok && resid <= delta * delta;
  }
  const double slope = loglog_slope(xs, ys);
  report(5, bound_ok && slope >= 1.8,
         "midpoint degeneracy lifting: gap = 2 delta/sqrt(5), " + ratios +
             " (all <= 1), residual slope = " + fmt(slope) +
             " (>= 1.8; measured decay is cubic because the quadratic term "
             "vanishes by symmetry)",
         now_seconds() - t0);
}

// 6. fringe law Delta_n = f n / t_max with f in [15, 25], residuals < 10% of
//    the mean spacing, f mutually consistent within 15%, sweep under 5 min
void criterion6() {
  const double t0 = now_seconds();
  SweepOptions opts;
  opts.audit = false;  // sentinel audits are exercised elsewhere; keep timing honest
  std::vector<double> fs;
  bool pass = true;
  std::string detail = "fringe fits:";
  for (double wt : {400.0, 1000.0, 2000.0}) {
    const PulseSchedule s(1.0, wt);
    const double period = fringe_factor_estimate / wt;
    const double dmax = 4.8 * period;
    const int res = static_cast<int>(std::ceil(dmax / (period / 16.0))) + 1;
    const auto trace = antidiagonal_trace(s, Range{0.0, dmax, res}, opts);
    const auto fit = fit_fringes(trace, wt);
    double worst_resid = 0.0;
    for (double r : fit.residuals) worst_resid = std::max(worst_resid, std::abs(r));
    const bool ok = fit.f > 15.0 && fit.f < 25.0 &&
                    worst_resid < 0.1 * fit.mean_spacing;
    detail += " [W*T=" + fmt(wt) + ": f=" + fmt(fit.f) +
              ", resid/spacing=" + fmt(worst_resid / fit.mean_spacing) + "]";
    pass = pass && ok;
    fs.push_back(fit.f);
  }
  const double spread = *std::max_element(fs.begin(), fs.end()) /
                        *std::min_element(fs.begin(), fs.end());
  pass = pass && (spread <= 1.15);
  const double dt = now_seconds() - t0;
  pass = pass && dt < 300.0;
  report(6, pass,
         detail + " consistency max/min = " + fmt(spread) + " (<= 1.15), runtime " +
             fmt(dt) + " s (< 300)",
         dt);
}

// 7. the default 201x201 map: (a) transpose symmetry to 1e-9, (b) a
//    high-fidelity cross along both axes out to |delta| = 0.2, (c) at least 3
//    deep minima along the antidiagonal.
//
//    (b) fails as stated, and that is physics, not a bug: a small detuning on
//    one arm splits the transport doublet by ~0.6 delta, and at protocol
//    times long enough to resolve fringes that splitting is partially
//    resolved on the axes too, carving a dip ring around the origin
//    (rho55 = 0.663 at |delta| = 0.01 for W*T = 1000, converged under step
//    doubling and reproduced by the eigendecomposition route; the axis
//    recovers to >= 0.9999 for 0.05 <= |delta| <= 1). The dip is deeper still
//    at W*T = 200 (0.66 at delta = 0.05), so no protocol time in the sweep
//    range satisfies the stated bound. Reported honestly as a failure.
void criterion7() {
  const double t0 = now_seconds();
  const PulseSchedule s(1.0, 1000.0);
  SweepOptions opts;  // default audit and tolerance
  const auto map = population_map(s, Range{-1.0, 1.0, 201}, Range{-1.0, 1.0, 201}, opts);

  bool finite_ok = true;
  for (int i = 0; i < 201 && finite_ok; ++i)
    for (int j = 0; j < 201; ++j) {
      const double v = map.grid(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        finite_ok = false;
        break;
      }
    }
  const double asym = (map.grid - map.grid.transpose()).cwiseAbs().maxCoeff();
  const bool a_ok = finite_ok && asym < 1e-9;

  // (b) cross: both axes within |delta| <= 0.2, i.e. indices 80..120
  double cross_min = 1.0, cross_min_outer = 1.0;
  int argmin_k = 100;
  for (int k = 80; k <= 120; ++k) {
    const double v = std::min(map.grid(k, 100), map.grid(100, k));
    if (v < cross_min) {
      cross_min = v;
      argmin_k = k;
    }
    if (std::abs(-1.0 + 0.01 * k) >= 0.05 - 1e-12)
      cross_min_outer = std::min(cross_min_outer, v);
  }
  const bool b_ok = cross_min >= 0.99;

  // (c) sampled local minima along delta_u = -delta_d
  int deep_minima = 0;
  auto anti = [&](int i) { return map.grid(i, 200 - i); };
  for (int i = 1; i < 200; ++i)
    if (anti(i) < anti(i - 1) && anti(i) < anti(i + 1) && anti(i) <= 0.5)
      ++deep_minima;
  const bool c_ok = deep_minima >= 3;

  report(7, a_ok && b_ok && c_ok,
         std::string("structural map: (a) transpose asymmetry = ") + fmt(asym) +
             (a_ok ? " PASS" : " FAIL") + "; (b) axis min rho55 = " +
             fmt(cross_min) + " at |delta| = " + fmt(std::abs(-1.0 + 0.01 * argmin_k)) +
             " vs stated >= 0.99" + (b_ok ? " PASS" : " FAIL (physical crossover dip; axis min for |delta| in [0.05, 0.2] = ") +
             (b_ok ? "" : fmt(cross_min_outer) + ", see note above)") +
             "; (c) antidiagonal minima <= 0.5: " + std::to_string(deep_minima) +
             (c_ok ? " PASS" : " FAIL"),
         now_seconds() - t0);
}

// 8. peak first-fringe |d rho55/d delta_u| vs t_max over one decade fits a
//    line with R^2 >= 0.99
void criterion8() {
  const double t0 = now_seconds();
  SweepOptions opts;
  opts.audit = false;
  const std::vector<double> ts = {200, 280, 400, 560, 800, 1130, 1600, 2000};
  const auto scaling = sensitivity_vs_time(1.0, ts, opts);
  report(8, scaling.r_squared >= 0.99,
         "sensitivity scaling over a decade of t_max: R^2 = " +
             fmt(scaling.r_squared) + " (>= 0.99), slope = " + fmt(scaling.slope) +
             " per unit time",
         now_seconds() - t0);
}

// 9. symmetric detunings keep the antisymmetric middle amplitude below 1e-9
void criterion9() {
  const double t0 = now_seconds();
  const PulseSchedule s(1.0, 200.0);
  const auto traj = propagate(s, DetuningConfig{0.3, 0.3}, default_step_count(s),
                              initial_site_state(site::s1), 2001);
  double worst = 0.0;
  for (const auto& st : traj.states)
    worst = std::max(worst,
                     std::abs(st[site::s3u] - st[site::s3d]) / std::sqrt(2.0));
  report(9, worst < 1e-9,
         "symmetric-detuning decoupling: max antisymmetric amplitude = " +
             fmt(worst) + " (< 1e-9)",
         now_seconds() - t0);
}

}  // namespace

int main() {
  std::printf("acceptance suite (single process, %u hardware threads)\n",
              std::thread::hardware_concurrency());
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf(
      "[NOTE] criterion 10: pixel-level figure reproduction is out of reach "
      "(axis ranges and colour scales unpublished); criteria 3, 6, 7, 8 are the "
      "structural substitutes.\n");
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED",
              failures);
  return failures;
}
