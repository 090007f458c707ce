// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ctap/errors.hpp"
#include "ctap/model.hpp"
#include "ctap/spectrum.hpp"

// Adiabaticity of the five-site chain limit:
//   A(t) = |<D+| dH/dt |D0>| / (E+ - E0)^2,
// with D0/D+ the rank-3/rank-4 eigenstates. A << 1 signals adiabatic
// following of the transport state.

namespace ctap {

struct AdiabaticityTrace {
  std::vector<double> times;
  std::vector<double> values;
  double a_max = 0.0;
};

inline double adiabaticity_at(double t, const PulseSchedule& s, double delta) {
  const auto h = build_chain(t, s, delta);
  const auto d = eigendecompose(h);
  const double gap = d.eigenvalues[3] - d.eigenvalues[2];
  if (std::abs(gap) < 1e-12 * s.omega_max)
    throw singular_gap_error("adiabaticity_at: E+ - E0 gap below 1e-12 * omega_max");

  // dH/dt has the bond pattern of the chain with the pulse slopes as weights
  const auto [do1, do2] = pulse_derivatives(t, s);
  const auto& v0 = d.eigenvectors.col(2);
  const auto& vp = d.eigenvectors.col(3);
  const double elem = do1 * (vp[0] * v0[1] + vp[1] * v0[0] + vp[2] * v0[3] + vp[3] * v0[2]) +
                      do2 * (vp[1] * v0[2] + vp[2] * v0[1] + vp[3] * v0[4] + vp[4] * v0[3]);
  return std::abs(elem) / (gap * gap);
}

// Closed form of the protocol maximum at zero detuning: 4*pi/(sqrt(3)*W*T).
inline double adiabaticity_closed_form(const PulseSchedule& s) {
  return 4.0 * M_PI / (std::sqrt(3.0) * s.omega_max * s.t_max);
}

// Three-term series of the maximum in the detuning.
inline double adiabaticity_series(const PulseSchedule& s, double delta) {
  const double s3 = std::sqrt(3.0);
  const double w = s.omega_max, t = s.t_max;
  return 4.0 * M_PI / (s3 * w * t) + 20.0 * M_PI * delta / (3.0 * s3 * w * w * t) +
         56.0 * M_PI * delta * delta / (9.0 * s3 * w * w * w * t);
}

// Maximum of A over the protocol: 1001-point grid, then golden-section
// refinement around the grid argmax down to 1e-10 * t_max. A is smooth and
// single-peaked near the midpoint for the detunings of interest.
inline double max_adiabaticity(const PulseSchedule& s, double delta,
                               int grid_points = 1001) {
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = s.t_max * i / (grid_points - 1);
    const double a = adiabaticity_at(t, s, delta);
    if (a > best) {
      best = a;
      best_i = i;
    }
  }
  double lo = s.t_max * std::max(best_i - 1, 0) / (grid_points - 1);
  double hi = s.t_max * std::min(best_i + 1, grid_points - 1) / (grid_points - 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = adiabaticity_at(c, s, delta), fd = adiabaticity_at(d, s, delta);
  while (hi - lo > 1e-10 * s.t_max) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = adiabaticity_at(c, s, delta);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = adiabaticity_at(d, s, delta);
    }
  }
  return std::max({best, fc, fd});
}

inline AdiabaticityTrace adiabaticity_trace(const PulseSchedule& s, double delta,
                                            int samples = 501) {
  AdiabaticityTrace tr;
  tr.times.reserve(samples);
  tr.values.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = s.t_max * i / (samples - 1);
    const double a = adiabaticity_at(t, s, delta);
    tr.times.push_back(t);
    tr.values.push_back(a);
    tr.a_max = std::max(tr.a_max, a);
  }
  return tr;
}

}  // namespace ctap
