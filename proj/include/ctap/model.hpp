// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

// Six-site CTAP interferometer model (hbar = 1).
//
// Fixed basis order used by every module:
//   ring:  |1>, |2>, |3u>, |3d>, |4>, |5>
//   chain: |1>, |2>, |3>,  |4>,  |5>
// Energies are quoted in units of omega_max, times in units of 1/omega_max.

namespace ctap {

inline constexpr int ring_sites = 6;
inline constexpr int chain_sites = 5;

namespace site {
inline constexpr int s1 = 0;
inline constexpr int s2 = 1;
inline constexpr int s3u = 2;
inline constexpr int s3d = 3;
inline constexpr int s4 = 4;
inline constexpr int s5 = 5;
}  // namespace site

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

// Squared-sinusoid pulse pair: Omega1 rises from 0 to omega_max, Omega2 falls
// from omega_max to 0, and Omega1(t) + Omega2(t) = omega_max at every t
// (counter-intuitive ordering: the coupling far from the occupied site leads).
struct PulseSchedule {
  double omega_max;
  double t_max;

  PulseSchedule(double omega_max_, double t_max_)
      : omega_max(omega_max_), t_max(t_max_) {
    if (!(omega_max > 0.0) || !std::isfinite(omega_max))
      throw std::invalid_argument("PulseSchedule: omega_max must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
      throw std::invalid_argument("PulseSchedule: t_max must be positive");
  }
};

struct PulsePair {
  double omega1;
  double omega2;
};

// Site energies of |3u> and |3d>. Either sign is allowed.
struct DetuningConfig {
  double delta_u = 0.0;
  double delta_d = 0.0;
};

struct RingHamiltonian {
  Matrix6d matrix;
};

struct ChainHamiltonian {
  Matrix5d matrix;
};

namespace detail {
inline void check_time(double t, const PulseSchedule& s) {
  if (!(t >= 0.0) || !(t <= s.t_max))
    throw std::domain_error("time outside [0, t_max]");
}
}  // namespace detail

inline PulsePair pulse_amplitudes(double t, const PulseSchedule& s) {
  detail::check_time(t, s);
  const double phase = 0.5 * M_PI * t / s.t_max;
  const double sn = std::sin(phase);
  const double cn = std::cos(phase);
  return {s.omega_max * sn * sn, s.omega_max * cn * cn};
}

// d(Omega1)/dt and d(Omega2)/dt; the two always sum to zero.
inline PulsePair pulse_derivatives(double t, const PulseSchedule& s) {
  detail::check_time(t, s);
  const double d = s.omega_max * (0.5 * M_PI / s.t_max) * std::sin(M_PI * t / s.t_max);
  return {d, -d};
}

// Ring couplings: Omega1 on (1,2), (3u,4), (3d,4); Omega2 on (2,3u), (2,3d),
// (4,5). All couplings real, so the matrix is stored real symmetric; the
// evolving state is still complex.
inline RingHamiltonian build_ring(double t, const PulseSchedule& s,
                                  const DetuningConfig& det) {
  const auto [o1, o2] = pulse_amplitudes(t, s);
  RingHamiltonian h;
  h.matrix.setZero();
  auto& m = h.matrix;
  m(site::s1, site::s2) = o1;
  m(site::s3u, site::s4) = o1;
  m(site::s3d, site::s4) = o1;
  m(site::s2, site::s3u) = o2;
  m(site::s2, site::s3d) = o2;
  m(site::s4, site::s5) = o2;
  m = m.selfadjointView<Eigen::Upper>();
  m(site::s3u, site::s3u) = det.delta_u;
  m(site::s3d, site::s3d) = det.delta_d;
  return h;
}

// Five-site limit of the ring (one arm detuned away): alternating couplings
// Omega1 on (1,2),(3,4) and Omega2 on (2,3),(4,5), detuning on the middle site.
inline ChainHamiltonian build_chain(double t, const PulseSchedule& s, double delta) {
  const auto [o1, o2] = pulse_amplitudes(t, s);
  ChainHamiltonian h;
  h.matrix.setZero();
  auto& m = h.matrix;
  m(0, 1) = o1;
  m(2, 3) = o1;
  m(1, 2) = o2;
  m(3, 4) = o2;
  m = m.selfadjointView<Eigen::Upper>();
  m(2, 2) = delta;
  return h;
}

}  // namespace ctap
