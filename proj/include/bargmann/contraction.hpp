// contraction.hpp — Gaussian inner products, traces and vacuum projections.
//
// Contracting two Gaussian objects integrates pairs of their variables
// against the Gaussian measure; the result is again an Abc triple, with the
// measure entering through -1 blocks of the integrated quadratic form.

#pragma once

#include <vector>

#include "bargmann/triple.hpp"

namespace bargmann {

// Pairs of wire indices (left object, right object) to integrate over.
// `conjugate_left` records which side plays the conjugated variable of the
// sesquilinear pairing. It is bookkeeping: the contraction value and the
// convergence margin do not depend on it (renaming z <-> z* inside the
// integral), so it is validated but never consulted by the engine.
struct ContractionPlan {
  struct Pair {
    Index left = 0;
    Index right = 0;
    bool conjugate_left = true;
  };

  std::vector<Pair> pairs;

  // Builds a plan from (mode,kind) wire names; the conjugated side is the
  // braish wire of each pair.
  static ContractionPlan by_wires(const AbcTriple& left, const AbcTriple& right,
                                  const std::vector<std::pair<Wire, Wire>>& wire_pairs);

  // Pairs every braish wire of `left` whose (mode, dual kind) ketish partner
  // exists in `right`, and vice versa. Used for full operator composition.
  static ContractionPlan matching(const AbcTriple& left, const AbcTriple& right);
};

struct ConvergenceReport {
  bool ok = false;
  double margin = 0.0;  // operator-norm scale; the integral converges iff margin < 2
};

// Convergence criterion for the contraction integral: with the paired blocks
// A_N^(1), A_N^(2) the integral is well-defined iff ||A_N^(1) + A_N^(2)*|| < 2.
// Implemented through the real quadratic form of the integrated variables, so
// it also covers plans that pair wires across mixed blocks.
ConvergenceReport check_contraction(const AbcTriple& left, const AbcTriple& right,
                                    const ContractionPlan& plan);

struct ContractOptions {
  bool enforce_convergence = true;
  // Relative pivot threshold below which the measure block M counts as singular.
  double singular_tolerance = 1e-13;
};

// Gaussian contraction of `left` and `right` over the planned pairs.
// Leftover wires keep their labels; result layout is left-leftovers followed
// by right-leftovers.
AbcTriple contract(const AbcTriple& left, const AbcTriple& right, const ContractionPlan& plan,
                   const ContractOptions& options = {});

// Partial trace over the listed modes; each traced mode must carry a
// (bra, ket) wire pair.
AbcTriple partial_trace(const AbcTriple& obj, const std::vector<int>& modes);

// Full trace of an operator-like object.
Complex trace(const AbcTriple& obj);

// Deletes the named wires (evaluates the Bargmann function at zero there).
// For ket wires this is projection onto vacuum; c is unchanged.
AbcTriple project_vacuum(const AbcTriple& obj, const std::vector<Wire>& wires);

// --- composition helpers -------------------------------------------------

// U |psi>: pairs U's bra wires on `modes` with the ket's wires there.
AbcTriple apply_unitary(const AbcTriple& u, const AbcTriple& ket, const std::vector<int>& modes);

// U rho U^dagger on the given modes of a density matrix.
AbcTriple apply_unitary_dm(const AbcTriple& u, const AbcTriple& dm, const std::vector<int>& modes);

// Channel application Phi(rho) on the given modes; out wires are relabeled to
// plain ket/bra so the result is again a state.
AbcTriple apply_channel(const AbcTriple& channel, const AbcTriple& dm,
                        const std::vector<int>& modes);

// Operator composition left ∘ right (left's bra wires against right's ket
// wires on `modes`).
AbcTriple compose_operators(const AbcTriple& left, const AbcTriple& right,
                            const std::vector<int>& modes);

// Channel composition left ∘ right: left's in wires against right's out wires.
AbcTriple compose_channels(const AbcTriple& left, const AbcTriple& right,
                           const std::vector<int>& modes);

// The conjugation map rho -> U rho U^dag of a unitary, as a channel triple
// (U on the ket legs tensored with U* on the bra legs).
AbcTriple unitary_as_channel(const AbcTriple& u);

// Overlap <bra_of(a) | b> of two kets on identical mode sets.
Complex overlap(const AbcTriple& ket_a, const AbcTriple& ket_b);

// Squared norm of a ket.
double norm_squared(const AbcTriple& ket);

}  // namespace bargmann
