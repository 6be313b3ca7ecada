// stellar.hpp — stellar decompositions of Gaussian objects: a Gaussian core
// part with vanishing blocks on the unmeasured subsystem, composed with a
// Gaussian transform acting there. Pure states always decompose with a
// unitary; mixed states need the rank criterion; the formal variant drops
// physicality and always exists.

#pragma once

#include <optional>

#include "bargmann/triple.hpp"

namespace bargmann::stellar {

struct CoreCheck {
  bool is_core = false;
  double a_block_max = 0.0;  // max |A| over the M block
  double b_block_max = 0.0;  // max |b| over the M wires
};

// True iff the M-block of A and the M-part of b vanish below `tol`, with the
// partition given by the first `m` modes (ascending mode order).
CoreCheck is_core(const AbcTriple& obj, int m, double tol = 1e-10);

struct PureDecomposition {
  AbcTriple core;     // (m+n)-mode ket, zero A-block and b on the first m modes
  AbcTriple unitary;  // m-mode unitary with contract(unitary, core) == input
};

// Stellar decomposition of a normalizable pure ket over (first m modes | rest).
PureDecomposition pure_decompose(const AbcTriple& ket, int m);

struct FormalDecomposition {
  AbcTriple core_vector;  // zeroed M blocks
  AbcTriple t_operator;   // A_T = [[A_m, 1], [1, 0]]; contracts back exactly
};

// Formal decomposition of any Gaussian vector over its first m wires.
FormalDecomposition formal_decompose(const AbcTriple& vec, int m);

struct MixedDecomposition {
  AbcTriple core;      // density matrix (or pure-core dm) when feasible
  AbcTriple channel;   // m-mode CPTP channel when feasible
  bool feasible = false;
  int rank_witness = 0;
  bool core_is_pure = false;
  // Formal fallback on the vectorized state when infeasible.
  std::optional<FormalDecomposition> fallback;
};

struct MixedOptions {
  double rank_tolerance = 1e-8;  // relative singular-value threshold
};

// Stellar decomposition of a density matrix over (first m modes | rest)
// following the Gram-equation construction; infeasible when
// rank(r r^dag + sigma sigma^dag) > m, in which case the formal fallback is
// attached.
MixedDecomposition mixed_decompose(const AbcTriple& dm, int m, const MixedOptions& = {});

// Pure-core variant for m >= n: the channel absorbs all impurity and the core
// is a pure ket (returned as `core` ket plus its role flag).
MixedDecomposition pure_core_decompose(const AbcTriple& dm, int m, const MixedOptions& = {});

struct DisplacementAbsorption {
  AbcTriple core;
  Vector gamma;  // displacement pulled out of the first m modes
};

// Zeroes the M-part of b of a core candidate by absorbing D(gamma) on the
// first m modes (applied as a conjugation for operators, plainly for kets).
DisplacementAbsorption absorb_displacement(const AbcTriple& core_candidate, int m);

}  // namespace bargmann::stellar
