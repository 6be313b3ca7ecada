// triple.hpp — the Abc parametrization of Gaussian objects:
//   F(z) = c * exp(z^T A z / 2 + z^T b),   z in C^k,
// together with the wire labels that give each variable its meaning.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "bargmann/wire.hpp"

namespace bargmann {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Universal Gaussian object. A is complex symmetric (symmetrized on
// construction, asymmetry above `kAsymmetryTolerance` is rejected), b and the
// layout have matching length.
class AbcTriple {
 public:
  static constexpr double kAsymmetryTolerance = 1e-8;

  AbcTriple(Matrix A, Vector b, Complex c, WireLayout layout);

  // Scalar object (no wires); default is the unit scalar.
  explicit AbcTriple(Complex c);
  AbcTriple() : AbcTriple(Complex{1.0, 0.0}) {}

  Index dim() const { return A_.rows(); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  Complex c() const { return c_; }
  const WireLayout& layout() const { return layout_; }

  // Entrywise complex conjugate of the parameters; wire labels unchanged.
  AbcTriple conjugated() const;

  // Hermitian adjoint: conjugate parameters and flip each wire kind
  // (ket <-> bra and so on). Wire order is preserved.
  AbcTriple adjoint() const;

  // Tensor product: wires of `this` followed by wires of `other`.
  // (mode, kind) collisions raise LayoutError.
  AbcTriple tensor(const AbcTriple& other) const;

  AbcTriple with_c(Complex c) const { return AbcTriple(A_, b_, c, layout_); }

  // Applies `f` to every wire label, keeping positions.
  AbcTriple relabeled(const std::function<Wire(const Wire&)>& f) const;

  // Convenience relabels.
  AbcTriple with_modes_shifted(int offset) const;

  bool same_object(const AbcTriple& other, double tol = 1e-12) const;

 private:
  Matrix A_;
  Vector b_;
  Complex c_;
  WireLayout layout_;
};

// Permutes variables to the target layout (which must hold the same wires).
// The Bargmann function is invariant; c is unchanged.
AbcTriple reorder(const AbcTriple& obj, const WireLayout& target);

// Reorders to the canonical wire sequence of an ordering convention.
AbcTriple reorder(const AbcTriple& obj, OrderingTag tag);

// Relabels every wire to ket kind, in type-wise order, with fresh mode
// indices 0..k-1 given by the type-wise position. A, b, c are unchanged;
// vec(G) of an operator G has the same triple as G.
AbcTriple vectorize(const AbcTriple& obj);

// |psi> -> |psi><psi| with type-wise layout (bras first).
AbcTriple to_density_matrix(const AbcTriple& ket);

}  // namespace bargmann
