// phase_space.hpp — conversion between phase-space parametrizations
// (covariance matrices, symplectic matrices, (X, Y, d) channels) and Abc
// triples. Phase-space data is real, in xxpp or xpxp ordering; the internal
// canonical form is xxpp.

#pragma once

#include <Eigen/Dense>

#include "bargmann/triple.hpp"

namespace bargmann {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class QuadOrder { XXPP, XPXP };

// Permutation matrix taking an xxpp-ordered vector to the given ordering.
RealMatrix quad_order_permutation(QuadOrder order, Index n_modes);

// Symplectic form in xxpp ordering: [[0, 1], [-1, 0]] in mode blocks.
RealMatrix symplectic_form(Index n_modes, QuadOrder order = QuadOrder::XXPP);

struct PhaseSpaceState {
  RealMatrix sigma;   // 2n x 2n symmetric covariance
  RealVector mu;      // 2n mean vector
  double hbar = 2.0;
  QuadOrder ordering = QuadOrder::XXPP;

  PhaseSpaceState() = default;
  PhaseSpaceState(RealMatrix sigma, RealVector mu, double hbar,
                  QuadOrder ordering = QuadOrder::XXPP);

  Index n_modes() const { return sigma.rows() / 2; }
  PhaseSpaceState reordered(QuadOrder target) const;

  // Smallest eigenvalue of (2/hbar) Sigma - i Omega; physical iff >= 0.
  double physicality_margin() const;

  static PhaseSpaceState vacuum(Index n_modes, double hbar = 2.0);
};

struct SymplecticUnitary {
  RealMatrix S;  // 2n x 2n, S^T Omega S = Omega (validated to 1e-10)
  RealVector d;  // phase-space displacement
  QuadOrder ordering = QuadOrder::XXPP;

  SymplecticUnitary() = default;
  SymplecticUnitary(RealMatrix S, RealVector d, QuadOrder ordering = QuadOrder::XXPP);

  Index n_modes() const { return S.rows() / 2; }
  SymplecticUnitary reordered(QuadOrder target) const;
};

struct ChannelXY {
  RealMatrix X;
  RealMatrix Y;  // symmetric
  RealVector d;
  QuadOrder ordering = QuadOrder::XXPP;

  ChannelXY() = default;
  ChannelXY(RealMatrix X, RealMatrix Y, RealVector d, QuadOrder ordering = QuadOrder::XXPP);

  Index n_modes() const { return X.rows() / 2; }
  ChannelXY reordered(QuadOrder target) const;

  // Smallest eigenvalue of (2/hbar) Y + i X Omega X^T - i Omega; CPTP iff >= 0.
  double cptp_margin(double hbar) const;
};

// --- state <-> Abc ---------------------------------------------------------

// Density-matrix triple (type-wise layout) from covariance and mean.
AbcTriple state_to_abc(const PhaseSpaceState& ps);
PhaseSpaceState abc_to_state(const AbcTriple& dm, double hbar,
                             QuadOrder ordering = QuadOrder::XXPP);

// --- unitary <-> Abc --------------------------------------------------------

// Unitary triple (output-input layout) from symplectic data; the phase of c
// is fixed to zero (it is not determined by the phase-space description).
AbcTriple unitary_to_abc(const SymplecticUnitary& su, double hbar);
SymplecticUnitary abc_to_unitary(const AbcTriple& u, double hbar,
                                 QuadOrder ordering = QuadOrder::XXPP);

// --- channel <-> Abc --------------------------------------------------------

AbcTriple channel_to_abc(const ChannelXY& ch, double hbar);
ChannelXY abc_to_channel(const AbcTriple& channel, double hbar,
                         QuadOrder ordering = QuadOrder::XXPP);

// --- displacement conjugation ----------------------------------------------

struct ConjugatedDisplacement {
  RealVector v;       // transformed displacement
  double damping;     // exp(-v^T Y v / (2 hbar^2))
};

// Phase-space action of pulling D_v through a channel:
// tr(Phi(rho) D_v) = damping * tr(rho D_{v'}).
ConjugatedDisplacement conjugate_displacement(const ChannelXY& ch, const RealVector& v,
                                              double hbar);

}  // namespace bargmann
