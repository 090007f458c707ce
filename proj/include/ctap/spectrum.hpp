// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctap/model.hpp"

// Instantaneous eigensystems of the ring and chain Hamiltonians, plus the
// closed-form spectra and small-detuning eigenstate series used as oracles.

namespace ctap {

enum class StateLabel { d2_minus, d_minus, d0_minus, d0_plus, d0, d_plus, d2_plus };

inline const char* to_string(StateLabel l) {
  switch (l) {
    case StateLabel::d2_minus: return "D2-";
    case StateLabel::d_minus: return "D-";
    case StateLabel::d0_minus: return "D0-";
    case StateLabel::d0_plus: return "D0+";
    case StateLabel::d0: return "D0";
    case StateLabel::d_plus: return "D+";
    case StateLabel::d2_plus: return "D2+";
  }
  return "?";
}

// Eigenvalues ascending; eigenvectors as matching columns, orthonormal, with
// the global sign fixed so each column's largest-magnitude component is
// positive. Labels follow ascending energy rank.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::vector<StateLabel> labels;
};

namespace detail {

inline void fix_phase(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

inline void check_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument("eigendecompose: matrix is not symmetric");
}

// Within a degenerate pair, pick the basis diagonalizing
// P = |3u><3u| - |3d><3d| and order by <P> so the D0- / D0+ labels join the
// detuned branches continuously.
inline void resolve_ring_doublet(Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
  const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i + 1 < 6; ++i) {
    if (std::abs(vals[i + 1] - vals[i]) > 1e-12 * scale) continue;
    Eigen::Vector2d a(vecs(site::s3u, i), vecs(site::s3u, i + 1));
    Eigen::Vector2d b(vecs(site::s3d, i), vecs(site::s3d, i + 1));
    Eigen::Matrix2d p = a * a.transpose() - b * b.transpose();
    const double off = 0.5 * (p(0, 1) + p(1, 0));
    const double theta = 0.5 * std::atan2(2.0 * off, p(0, 0) - p(1, 1));
    const double c = std::cos(theta), s = std::sin(theta);
    const Eigen::VectorXd v0 = c * vecs.col(i) + s * vecs.col(i + 1);
    const Eigen::VectorXd v1 = -s * vecs.col(i) + c * vecs.col(i + 1);
    const double p0 = v0[site::s3u] * v0[site::s3u] - v0[site::s3d] * v0[site::s3d];
    const double p1 = v1[site::s3u] * v1[site::s3u] - v1[site::s3d] * v1[site::s3d];
    if (p0 <= p1) {
      vecs.col(i) = v0;
      vecs.col(i + 1) = v1;
    } else {
      vecs.col(i) = v1;
      vecs.col(i + 1) = v0;
    }
  }
}

}  // namespace detail

inline EigenDecomposition eigendecompose(const RingHamiltonian& h) {
  detail::check_symmetric(h.matrix);
  Eigen::SelfAdjointEigenSolver<Matrix6d> solver(h.matrix);
  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  detail::resolve_ring_doublet(d.eigenvalues, d.eigenvectors);
  detail::fix_phase(d.eigenvectors);
  d.labels = {StateLabel::d2_minus, StateLabel::d_minus, StateLabel::d0_minus,
              StateLabel::d0_plus, StateLabel::d_plus, StateLabel::d2_plus};
  return d;
}

inline EigenDecomposition eigendecompose(const ChainHamiltonian& h) {
  detail::check_symmetric(h.matrix);
  Eigen::SelfAdjointEigenSolver<Matrix5d> solver(h.matrix);
  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  detail::fix_phase(d.eigenvectors);
  d.labels = {StateLabel::d2_minus, StateLabel::d_minus, StateLabel::d0,
              StateLabel::d_plus, StateLabel::d2_plus};
  return d;
}

// Zero-detuning ring spectrum in closed form, ascending:
// {-E2, -E1, 0, 0, E1, E2} with
// E1,E2 = sqrt((3*(O1^2+O2^2) -/+ sqrt(O1^4 + 14 O1^2 O2^2 + O2^4)) / 2).
inline std::array<double, 6> analytic_ring_eigenvalues(double omega1, double omega2) {
  const double q1 = omega1 * omega1, q2 = omega2 * omega2;
  const double inner = std::sqrt(q1 * q1 + 14.0 * q1 * q2 + q2 * q2);
  const double e1 = std::sqrt(std::max(0.0, (3.0 * (q1 + q2) - inner) / 2.0));
  const double e2 = std::sqrt((3.0 * (q1 + q2) + inner) / 2.0);
  return {-e2, -e1, 0.0, 0.0, e1, e2};
}

// First-order splitting of the ring's midpoint doublet under antisymmetric
// detuning delta_u = -delta_d = delta, with the matching superposition states
// (series-truncated, then normalized).
struct MidpointSplit {
  double e_plus;
  double e_minus;
  Eigen::Matrix<double, 6, 1> d0_plus;
  Eigen::Matrix<double, 6, 1> d0_minus;
};

inline MidpointSplit ring_midpoint_split(double delta, double omega_max) {
  const double s5 = std::sqrt(5.0);
  MidpointSplit out;
  out.e_plus = delta / s5;
  out.e_minus = -delta / s5;
  const double c = 2.0 * delta / (s5 * omega_max);
  out.d0_plus << 1.0, c, -(1.0 + s5) / 2.0, (-1.0 + s5) / 2.0, c, 1.0;
  out.d0_minus << 1.0, -c, (-1.0 + s5) / 2.0, -(1.0 + s5) / 2.0, -c, 1.0;
  out.d0_plus.normalize();
  out.d0_minus.normalize();
  return out;
}

enum class ChainEndpoint { start, end };

// Analytic eigenpairs of the chain, valid for |delta| small against the
// active coupling; energies truncated at O(delta^2), vectors at O(delta)
// and normalized numerically.
struct AnalyticEigenpairs {
  Eigen::VectorXd energies;
  Eigen::MatrixXd states;  // columns, same order as energies
  std::vector<StateLabel> labels;
};

// Boundary of the protocol: one coupling is off, so the chain splits into an
// isolated site plus two dimers. `omega` is the active coupling (Omega2 at
// the start, Omega1 at the end).
inline AnalyticEigenpairs chain_boundary_states(ChainEndpoint ep, double omega,
                                                double delta) {
  AnalyticEigenpairs out;
  out.energies.resize(5);
  out.states.setZero(5, 5);
  out.labels = {StateLabel::d2_minus, StateLabel::d_minus, StateLabel::d0,
                StateLabel::d_plus, StateLabel::d2_plus};
  const double shift = 0.5 * delta;
  out.energies << -omega + shift, -omega, 0.0, omega, omega + shift;

  auto set_dimer = [&](int col, int a, int b, double wa, double wb) {
    out.states(a, col) = wa;
    out.states(b, col) = wb;
    out.states.col(col).normalize();
  };
  if (ep == ChainEndpoint::start) {
    // blocks {1}, {2,3 with delta on 3}, {4,5}
    out.states(0, 2) = 1.0;                                    // D0 = |1>
    set_dimer(1, 3, 4, 1.0, -1.0);                             // D-
    set_dimer(3, 3, 4, 1.0, 1.0);                              // D+
    set_dimer(0, 1, 2, -1.0 - delta / (2.0 * omega), 1.0);     // D2-
    set_dimer(4, 1, 2, 1.0 - delta / (2.0 * omega), 1.0);      // D2+
  } else {
    // blocks {1,2}, {3 with delta, 4}, {5}
    out.states(4, 2) = 1.0;                                    // D0 = |5>
    set_dimer(1, 0, 1, 1.0, -1.0);                             // D-
    set_dimer(3, 0, 1, 1.0, 1.0);                              // D+
    set_dimer(0, 2, 3, -1.0 + delta / (2.0 * omega), 1.0);     // D2-
    set_dimer(4, 2, 3, 1.0 + delta / (2.0 * omega), 1.0);      // D2+
  }
  return out;
}

// Midpoint of the protocol (Omega1 = Omega2 = omega_max / 2). D+- carry no
// |3> weight and are exact at every delta; D0 and D2+- are first-order series.
inline AnalyticEigenpairs chain_midpoint_states(double omega_max, double delta) {
  AnalyticEigenpairs out;
  out.energies.resize(5);
  out.states.setZero(5, 5);
  out.labels = {StateLabel::d2_minus, StateLabel::d_minus, StateLabel::d0,
                StateLabel::d_plus, StateLabel::d2_plus};
  const double s3 = std::sqrt(3.0);
  const double half = 0.5 * omega_max;
  out.energies << -s3 * half + delta / 3.0, -half, delta / 3.0, half,
      s3 * half + delta / 3.0;

  const double c0 = 2.0 * delta / (3.0 * omega_max);
  out.states.col(2) << 1.0, c0, -1.0, c0, 1.0;  // D0

  out.states.col(1) << 1.0, -1.0, 0.0, 1.0, -1.0;  // D-
  out.states.col(3) << 1.0, 1.0, 0.0, -1.0, -1.0;  // D+

  const double c24p = s3 + c0, c24m = -s3 + c0;
  const double c3p = 2.0 + 4.0 * delta / (s3 * omega_max);
  const double c3m = 2.0 - 4.0 * delta / (s3 * omega_max);
  out.states.col(4) << 1.0, c24p, c3p, c24p, 1.0;  // D2+
  out.states.col(0) << 1.0, c24m, c3m, c24m, 1.0;  // D2-

  for (int c = 0; c < 5; ++c) out.states.col(c).normalize();
  return out;
}

}  // namespace ctap
