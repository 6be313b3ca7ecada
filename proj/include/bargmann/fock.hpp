// fock.hpp — Fock amplitudes of Gaussian objects via the Abc recurrences,
// exact PNR heralding through the core decomposition, and displacement-
// operator matrix elements.

#pragma once

#include <vector>

#include "bargmann/triple.hpp"

namespace bargmann {

// Dense multidimensional array of Fock amplitudes, one axis per wire,
// row-major strides (last axis fastest).
class FockArray {
 public:
  FockArray() = default;
  explicit FockArray(std::vector<Index> shape);

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index size() const { return static_cast<Index>(data_.size()); }

  Complex& at(const std::vector<Index>& idx) { return data_[flat(idx)]; }
  Complex at(const std::vector<Index>& idx) const { return data_[flat(idx)]; }
  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  std::size_t flat(const std::vector<Index>& idx) const;

  double norm_squared() const;

 private:
  std::vector<Index> shape_;
  std::vector<Index> strides_;
  std::vector<Complex> data_;
};

struct FockOptions {
  // Reject ket-like objects with ||A|| >= 1 (non-normalizable). Callers that
  // expand formal blocks meant to be contracted later can switch it off.
  bool guard_divergence = true;
  Index max_elements = 100'000'000;
};

// Rescaled Taylor coefficients G_k of the Bargmann function, G_0 = c, via the
// single-predecessor recurrence.
FockArray fock_amplitudes(const AbcTriple& obj, const std::vector<Index>& cutoffs,
                          const FockOptions& options = {});

// Same values through the predecessor-averaging form; slower, numerically
// flatter error growth.
FockArray fock_amplitudes_stable(const AbcTriple& obj, const std::vector<Index>& cutoffs,
                                 const FockOptions& options = {});

struct HeraldSpec {
  std::vector<int> measured_modes;
  std::vector<int> pattern;  // photon counts, aligned with measured_modes
};

struct HeraldResult {
  FockArray amplitudes;      // leftover-mode amplitudes of (1 (x) <k|) |psi>
  AbcTriple unitary;         // to apply after the core amplitudes (identity if not core path)
  std::vector<int> kept_modes;
  bool exact = false;        // true on the core-decomposition path
  double tail_norm = 0.0;    // truncation witness on the direct path
};

struct HeraldOptions {
  bool use_core_decomposition = true;
  // Cutoff per kept mode on the direct (truncated) path.
  Index direct_cutoff = 20;
  Index max_elements = 100'000'000;
};

// Projects the measured modes of a pure ket onto the photon pattern. On the
// core path the amplitudes are exact with cutoff ||k||_1 + 1 per kept mode
// and come with the m-mode unitary still to be applied.
HeraldResult herald(const AbcTriple& ket, const HeraldSpec& spec,
                    const HeraldOptions& options = {});

// <m| D(alpha) |n> for m, n < cutoff, by the associated-Laguerre recurrence.
Matrix displacement_matrix_elements(Complex alpha, Index cutoff);

// Effective squeezing sigma^2 = (2/pi) log 1/|tr(rho D_{sqrt(2 pi hbar) v})|
// of the normalized state U |state>, with U a single-mode Gaussian unitary
// conjugated through in phase space; exact for finite Fock vectors.
double effective_squeezing_exact(const FockArray& state, const AbcTriple& unitary,
                                 const Eigen::Vector2d& direction, double hbar);

}  // namespace bargmann
