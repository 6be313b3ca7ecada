#include "bargmann/triple.hpp"

#include <algorithm>

#include "bargmann/errors.hpp"

namespace bargmann {

AbcTriple::AbcTriple(Matrix A, Vector b, Complex c, WireLayout layout)
    : A_(std::move(A)), b_(std::move(b)), c_(c), layout_(std::move(layout)) {
  const Index k = static_cast<Index>(layout_.size());
  if (A_.rows() != k || A_.cols() != k) {
    throw LayoutError("A is " + std::to_string(A_.rows()) + "x" + std::to_string(A_.cols()) +
                      " but layout has " + std::to_string(k) + " wires");
  }
  if (b_.size() != k) {
    throw LayoutError("b has length " + std::to_string(b_.size()) + " but layout has " +
                      std::to_string(k) + " wires");
  }
  if (k > 0) {
    const double asym = (A_ - A_.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
    if (asym > kAsymmetryTolerance * scale) {
      throw DomainError("A matrix asymmetry " + std::to_string(asym) + " exceeds tolerance");
    }
    A_ = ((A_ + A_.transpose()) / 2.0).eval();
  }
}

AbcTriple::AbcTriple(Complex c) : A_(0, 0), b_(0), c_(c), layout_() {}

AbcTriple AbcTriple::conjugated() const {
  return AbcTriple(A_.conjugate(), b_.conjugate(), std::conj(c_), layout_);
}

AbcTriple AbcTriple::adjoint() const {
  std::vector<Wire> wires;
  wires.reserve(layout_.size());
  for (const Wire& w : layout_.wires()) wires.push_back({w.mode, conjugate_kind(w.kind)});
  return AbcTriple(A_.conjugate(), b_.conjugate(), std::conj(c_), WireLayout(std::move(wires)));
}

AbcTriple AbcTriple::tensor(const AbcTriple& other) const {
  const Index ka = dim();
  const Index kb = other.dim();
  Matrix A = Matrix::Zero(ka + kb, ka + kb);
  A.topLeftCorner(ka, ka) = A_;
  A.bottomRightCorner(kb, kb) = other.A_;
  Vector b(ka + kb);
  b.head(ka) = b_;
  b.tail(kb) = other.b_;
  std::vector<Wire> wires = layout_.wires();
  wires.insert(wires.end(), other.layout_.wires().begin(), other.layout_.wires().end());
  return AbcTriple(std::move(A), std::move(b), c_ * other.c_, WireLayout(std::move(wires)));
}

AbcTriple AbcTriple::relabeled(const std::function<Wire(const Wire&)>& f) const {
  std::vector<Wire> wires;
  wires.reserve(layout_.size());
  for (const Wire& w : layout_.wires()) wires.push_back(f(w));
  return AbcTriple(A_, b_, c_, WireLayout(std::move(wires)));
}

AbcTriple AbcTriple::with_modes_shifted(int offset) const {
  return relabeled([offset](const Wire& w) { return Wire{w.mode + offset, w.kind}; });
}

bool AbcTriple::same_object(const AbcTriple& other, double tol) const {
  if (layout_ != other.layout_) return false;
  if (dim() > 0 && (A_ - other.A_).cwiseAbs().maxCoeff() > tol) return false;
  if (dim() > 0 && (b_ - other.b_).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(c_ - other.c_) <= tol;
}

AbcTriple reorder(const AbcTriple& obj, const WireLayout& target) {
  if (!target.is_permutation_of(obj.layout())) {
    throw LayoutError("target layout is not a permutation of the object's wires");
  }
  const Index k = obj.dim();
  std::vector<Index> perm(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    perm[static_cast<std::size_t>(i)] =
        static_cast<Index>(obj.layout().index_of(target[static_cast<std::size_t>(i)]));
  }
  Matrix A(k, k);
  Vector b(k);
  for (Index i = 0; i < k; ++i) {
    b(i) = obj.b()(perm[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < k; ++j) {
      A(i, j) = obj.A()(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  return AbcTriple(std::move(A), std::move(b), obj.c(), target);
}

AbcTriple reorder(const AbcTriple& obj, OrderingTag tag) {
  auto [target, perm] = obj.layout().sorted(tag);
  (void)perm;
  return reorder(obj, target);
}

AbcTriple vectorize(const AbcTriple& obj) {
  AbcTriple sorted = reorder(obj, OrderingTag::TypeWise);
  std::vector<Wire> wires;
  wires.reserve(sorted.layout().size());
  for (std::size_t i = 0; i < sorted.layout().size(); ++i) {
    wires.push_back({static_cast<int>(i), WireKind::Ket});
  }
  return AbcTriple(sorted.A(), sorted.b(), sorted.c(), WireLayout(std::move(wires)));
}

AbcTriple to_density_matrix(const AbcTriple& ket) {
  for (const Wire& w : ket.layout().wires()) {
    if (w.kind != WireKind::Ket) {
      throw LayoutError("to_density_matrix expects a pure ket, found wire " + to_string(w));
    }
  }
  AbcTriple bra = ket.adjoint();  // Bra wires, conjugated parameters
  AbcTriple dm = bra.tensor(ket);
  return reorder(dm, OrderingTag::TypeWise);
}

}  // namespace bargmann
