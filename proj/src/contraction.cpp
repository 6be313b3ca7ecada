#include "bargmann/contraction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "bargmann/errors.hpp"

namespace bargmann {

namespace {

constexpr Complex kI{0.0, 1.0};

void validate_plan(const AbcTriple& left, const AbcTriple& right, const ContractionPlan& plan) {
  std::vector<bool> used_left(static_cast<std::size_t>(left.dim()), false);
  std::vector<bool> used_right(static_cast<std::size_t>(right.dim()), false);
  for (const auto& p : plan.pairs) {
    if (p.left < 0 || p.left >= left.dim() || p.right < 0 || p.right >= right.dim()) {
      throw LayoutError("contraction pair indices out of range");
    }
    if (used_left[static_cast<std::size_t>(p.left)] ||
        used_right[static_cast<std::size_t>(p.right)]) {
      throw LayoutError("wire appears in more than one contraction pair");
    }
    used_left[static_cast<std::size_t>(p.left)] = true;
    used_right[static_cast<std::size_t>(p.right)] = true;
    const Wire& wl = left.layout()[static_cast<std::size_t>(p.left)];
    const Wire& wr = right.layout()[static_cast<std::size_t>(p.right)];
    if (side_of(wl.kind) == side_of(wr.kind)) {
      throw LayoutError("contraction pairs " + to_string(wl) + " with " + to_string(wr) +
                        "; wires of equal duality cannot be integrated against each other");
    }
  }
}

struct Partition {
  std::vector<Index> kept_left, kept_right;   // kept wire indices per object
  std::vector<Index> int_left, int_right;     // integrated wires, pair order
};

Partition split(const AbcTriple& left, const AbcTriple& right, const ContractionPlan& plan) {
  Partition part;
  std::vector<bool> used_left(static_cast<std::size_t>(left.dim()), false);
  std::vector<bool> used_right(static_cast<std::size_t>(right.dim()), false);
  for (const auto& p : plan.pairs) {
    part.int_left.push_back(p.left);
    part.int_right.push_back(p.right);
    used_left[static_cast<std::size_t>(p.left)] = true;
    used_right[static_cast<std::size_t>(p.right)] = true;
  }
  for (Index i = 0; i < left.dim(); ++i) {
    if (!used_left[static_cast<std::size_t>(i)]) part.kept_left.push_back(i);
  }
  for (Index i = 0; i < right.dim(); ++i) {
    if (!used_right[static_cast<std::size_t>(i)]) part.kept_right.push_back(i);
  }
  return part;
}

Matrix submatrix(const Matrix& A, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = A(rows[i], cols[j]);
    }
  }
  return out;
}

Vector subvector(const Vector& b, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = b(idx[i]);
  return out;
}

// Measure block of the integral: integrated variables ordered as
// (left pair members..., right pair members...), with -1 couplings between
// the two members of every pair.
Matrix measure_block(const AbcTriple& left, const AbcTriple& right, const Partition& part) {
  const Index k = static_cast<Index>(part.int_left.size());
  Matrix M(2 * k, 2 * k);
  M.topLeftCorner(k, k) = submatrix(left.A(), part.int_left, part.int_left);
  M.bottomRightCorner(k, k) = submatrix(right.A(), part.int_right, part.int_right);
  M.topRightCorner(k, k) = -Matrix::Identity(k, k);
  M.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
  return M;
}

}  // namespace

ContractionPlan ContractionPlan::by_wires(const AbcTriple& left, const AbcTriple& right,
                                          const std::vector<std::pair<Wire, Wire>>& wire_pairs) {
  ContractionPlan plan;
  for (const auto& [wl, wr] : wire_pairs) {
    ContractionPlan::Pair p;
    p.left = static_cast<Index>(left.layout().index_of(wl));
    p.right = static_cast<Index>(right.layout().index_of(wr));
    p.conjugate_left = side_of(wl.kind) == WireSide::Braish;
    plan.pairs.push_back(p);
  }
  return plan;
}

ContractionPlan ContractionPlan::matching(const AbcTriple& left, const AbcTriple& right) {
  ContractionPlan plan;
  for (std::size_t i = 0; i < left.layout().size(); ++i) {
    const Wire& wl = left.layout()[i];
    const Wire partner{wl.mode, conjugate_kind(wl.kind)};
    if (auto j = right.layout().find(partner)) {
      ContractionPlan::Pair p;
      p.left = static_cast<Index>(i);
      p.right = static_cast<Index>(*j);
      p.conjugate_left = side_of(wl.kind) == WireSide::Braish;
      plan.pairs.push_back(p);
    }
  }
  return plan;
}

ConvergenceReport check_contraction(const AbcTriple& left, const AbcTriple& right,
                                    const ContractionPlan& plan) {
  validate_plan(left, right, plan);
  const Index k = static_cast<Index>(plan.pairs.size());
  if (k == 0) return {true, 0.0};
  Partition part = split(left, right, plan);

  // Realify the integrated quadratic form. Pair j carries variables
  // z_j = (x_j + i y_j)/sqrt(2) on its ketish member and z_j* on the braish
  // member; the choice of side only renames z <-> z*, so fix left = starred.
  Matrix J = Matrix::Zero(2 * k, 2 * k);  // complex vars (leftints, rightints) x real (x, y)
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < k; ++j) {
    J(j, j) = inv_sqrt2;            // left member: z* = (x - i y)/sqrt(2)
    J(j, k + j) = -kI * inv_sqrt2;
    J(k + j, j) = inv_sqrt2;        // right member: z = (x + i y)/sqrt(2)
    J(k + j, k + j) = kI * inv_sqrt2;
  }
  Matrix Ablock = Matrix::Zero(2 * k, 2 * k);
  Ablock.topLeftCorner(k, k) = submatrix(left.A(), part.int_left, part.int_left);
  Ablock.bottomRightCorner(k, k) = submatrix(right.A(), part.int_right, part.int_right);
  Matrix quad = J.transpose() * Ablock * J;
  Eigen::MatrixXd K = quad.real();
  K = ((K + K.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  const double margin = 2.0 * es.eigenvalues().maxCoeff();
  return {margin < 2.0, margin};
}

AbcTriple contract(const AbcTriple& left, const AbcTriple& right, const ContractionPlan& plan,
                   const ContractOptions& options) {
  validate_plan(left, right, plan);
  if (plan.pairs.empty()) return left.tensor(right);
  if (options.enforce_convergence) {
    ConvergenceReport rep = check_contraction(left, right, plan);
    if (!rep.ok || rep.margin >= 2.0 - 1e-9) {
      throw DivergentIntegralError("contraction integral diverges (margin " +
                                   std::to_string(rep.margin) + " >= 2)");
    }
  }

  Partition part = split(left, right, plan);
  const Index k = static_cast<Index>(plan.pairs.size());
  const Index nl = static_cast<Index>(part.kept_left.size());
  const Index nr = static_cast<Index>(part.kept_right.size());

  Matrix M = measure_block(left, right, part);
  Eigen::PartialPivLU<Matrix> lu(M);
  {
    const Eigen::MatrixXcd& luM = lu.matrixLU();
    double max_pivot = 0.0, min_pivot = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < luM.rows(); ++i) {
      const double p = std::abs(luM(i, i));
      max_pivot = std::max(max_pivot, p);
      min_pivot = std::min(min_pivot, p);
    }
    if (!(min_pivot > options.singular_tolerance * std::max(1.0, max_pivot))) {
      throw SingularContractionError("measure block of the contraction is singular");
    }
  }

  // Coupling of integrated to kept variables, stacked as (left, right).
  Matrix G(2 * k, nl + nr);
  G.topLeftCorner(k, nl) = submatrix(left.A(), part.int_left, part.kept_left);
  G.topRightCorner(k, nr) = Matrix::Zero(k, nr);
  G.bottomLeftCorner(k, nl) = Matrix::Zero(k, nl);
  G.bottomRightCorner(k, nr) = submatrix(right.A(), part.int_right, part.kept_right);

  Vector b_int(2 * k);
  b_int.head(k) = subvector(left.b(), part.int_left);
  b_int.tail(k) = subvector(right.b(), part.int_right);

  Matrix MinvG = lu.solve(G);
  Vector Minvb = lu.solve(b_int);

  Matrix A_keep = Matrix::Zero(nl + nr, nl + nr);
  A_keep.topLeftCorner(nl, nl) = submatrix(left.A(), part.kept_left, part.kept_left);
  A_keep.bottomRightCorner(nr, nr) = submatrix(right.A(), part.kept_right, part.kept_right);

  Matrix A_new = A_keep - G.transpose() * MinvG;
  Vector b_keep(nl + nr);
  b_keep.head(nl) = subvector(left.b(), part.kept_left);
  b_keep.tail(nr) = subvector(right.b(), part.kept_right);
  Vector b_new = b_keep - G.transpose() * Minvb;

  // c = c_L c_R exp(-b_int^T M^{-1} b_int / 2) / sqrt(det(iM)), principal branch.
  const Complex quad_term = b_int.transpose() * Minvb;
  const Complex det_iM = (kI * M).partialPivLu().determinant();
  const Complex c_new = left.c() * right.c() * std::exp(-quad_term / 2.0) / std::sqrt(det_iM);

  std::vector<Wire> wires;
  for (Index i : part.kept_left) wires.push_back(left.layout()[static_cast<std::size_t>(i)]);
  for (Index i : part.kept_right) wires.push_back(right.layout()[static_cast<std::size_t>(i)]);
  return AbcTriple(std::move(A_new), std::move(b_new), c_new, WireLayout(std::move(wires)));
}

AbcTriple partial_trace(const AbcTriple& obj, const std::vector<int>& modes) {
  std::vector<Index> traced;
  std::vector<std::pair<Index, Index>> bk_pairs;
  for (int m : modes) {
    const Wire bra{m, WireKind::Bra};
    const Wire ket{m, WireKind::Ket};
    auto ib = obj.layout().find(bra);
    auto ik = obj.layout().find(ket);
    if (!ib || !ik) {
      throw LayoutError("partial_trace: mode " + std::to_string(m) +
                        " lacks a (bra, ket) wire pair");
    }
    bk_pairs.push_back({static_cast<Index>(*ib), static_cast<Index>(*ik)});
  }
  for (auto [ib, ik] : bk_pairs) {
    traced.push_back(ib);
    traced.push_back(ik);
  }
  std::sort(traced.begin(), traced.end());
  std::vector<Index> kept;
  for (Index i = 0; i < obj.dim(); ++i) {
    if (!std::binary_search(traced.begin(), traced.end(), i)) kept.push_back(i);
  }
  const Index t = static_cast<Index>(traced.size());

  // M = A_0 - X with X coupling each traced bra to its ket.
  Matrix M(t, t);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < t; ++j) M(i, j) = obj.A()(traced[static_cast<std::size_t>(i)],
                                                    traced[static_cast<std::size_t>(j)]);
  }
  auto pos_in_traced = [&](Index wire_idx) {
    return static_cast<Index>(std::lower_bound(traced.begin(), traced.end(), wire_idx) -
                              traced.begin());
  };
  for (auto [ib, ik] : bk_pairs) {
    M(pos_in_traced(ib), pos_in_traced(ik)) -= 1.0;
    M(pos_in_traced(ik), pos_in_traced(ib)) -= 1.0;
  }

  Eigen::PartialPivLU<Matrix> lu(M);
  {
    const Eigen::MatrixXcd& luM = lu.matrixLU();
    double max_pivot = 0.0, min_pivot = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < luM.rows(); ++i) {
      const double p = std::abs(luM(i, i));
      max_pivot = std::max(max_pivot, p);
      min_pivot = std::min(min_pivot, p);
    }
    if (!(min_pivot > 1e-13 * std::max(1.0, max_pivot))) {
      throw SingularContractionError("partial trace block (A_0 - X) is singular");
    }
  }

  Matrix R = submatrix(obj.A(), traced, kept);
  Vector b0 = subvector(obj.b(), traced);
  Matrix MinvR = lu.solve(R);
  Vector Minvb = lu.solve(b0);

  Matrix A_new = submatrix(obj.A(), kept, kept) - R.transpose() * MinvR;
  Vector b_new = subvector(obj.b(), kept) - R.transpose() * Minvb;
  const Complex quad_term = b0.transpose() * Minvb;
  const Complex det_iM = (kI * M).partialPivLu().determinant();
  const Complex c_new = obj.c() * std::exp(-quad_term / 2.0) / std::sqrt(det_iM);

  std::vector<Wire> wires;
  for (Index i : kept) wires.push_back(obj.layout()[static_cast<std::size_t>(i)]);
  return AbcTriple(std::move(A_new), std::move(b_new), c_new, WireLayout(std::move(wires)));
}

Complex trace(const AbcTriple& obj) {
  AbcTriple scalar = partial_trace(obj, obj.layout().modes());
  return scalar.c();
}

AbcTriple project_vacuum(const AbcTriple& obj, const std::vector<Wire>& wires) {
  std::vector<Index> remove;
  for (const Wire& w : wires) remove.push_back(static_cast<Index>(obj.layout().index_of(w)));
  std::sort(remove.begin(), remove.end());
  std::vector<Index> kept;
  for (Index i = 0; i < obj.dim(); ++i) {
    if (!std::binary_search(remove.begin(), remove.end(), i)) kept.push_back(i);
  }
  Matrix A(static_cast<Index>(kept.size()), static_cast<Index>(kept.size()));
  Vector b(static_cast<Index>(kept.size()));
  std::vector<Wire> new_wires;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    b(static_cast<Index>(i)) = obj.b()(kept[i]);
    new_wires.push_back(obj.layout()[static_cast<std::size_t>(kept[i])]);
    for (std::size_t j = 0; j < kept.size(); ++j) {
      A(static_cast<Index>(i), static_cast<Index>(j)) = obj.A()(kept[i], kept[j]);
    }
  }
  return AbcTriple(std::move(A), std::move(b), obj.c(), WireLayout(std::move(new_wires)));
}

AbcTriple apply_unitary(const AbcTriple& u, const AbcTriple& ket, const std::vector<int>& modes) {
  std::vector<std::pair<Wire, Wire>> pairs;
  for (int m : modes) pairs.push_back({{m, WireKind::Bra}, {m, WireKind::Ket}});
  return contract(u, ket, ContractionPlan::by_wires(u, ket, pairs));
}

AbcTriple apply_unitary_dm(const AbcTriple& u, const AbcTriple& dm, const std::vector<int>& modes) {
  std::vector<std::pair<Wire, Wire>> pairs;
  for (int m : modes) pairs.push_back({{m, WireKind::Bra}, {m, WireKind::Ket}});
  AbcTriple half = contract(u, dm, ContractionPlan::by_wires(u, dm, pairs));
  AbcTriple udag = u.adjoint();
  std::vector<std::pair<Wire, Wire>> pairs2;
  for (int m : modes) pairs2.push_back({{m, WireKind::Bra}, {m, WireKind::Ket}});
  // rho U^dagger: pair rho's bra wires with U^dagger's ket wires.
  AbcTriple full = contract(half, udag, ContractionPlan::by_wires(half, udag, pairs2));
  return reorder(full, OrderingTag::TypeWise);
}

AbcTriple apply_channel(const AbcTriple& channel, const AbcTriple& dm,
                        const std::vector<int>& modes) {
  std::vector<std::pair<Wire, Wire>> pairs;
  for (int m : modes) {
    pairs.push_back({{m, WireKind::InKet}, {m, WireKind::Ket}});
    pairs.push_back({{m, WireKind::InBra}, {m, WireKind::Bra}});
  }
  AbcTriple out = contract(channel, dm, ContractionPlan::by_wires(channel, dm, pairs));
  AbcTriple relabeled = out.relabeled([](const Wire& w) {
    if (w.kind == WireKind::OutKet) return Wire{w.mode, WireKind::Ket};
    if (w.kind == WireKind::OutBra) return Wire{w.mode, WireKind::Bra};
    return w;
  });
  return reorder(relabeled, OrderingTag::TypeWise);
}

AbcTriple compose_operators(const AbcTriple& left, const AbcTriple& right,
                            const std::vector<int>& modes) {
  std::vector<std::pair<Wire, Wire>> pairs;
  for (int m : modes) pairs.push_back({{m, WireKind::Bra}, {m, WireKind::Ket}});
  return contract(left, right, ContractionPlan::by_wires(left, right, pairs));
}

AbcTriple compose_channels(const AbcTriple& left, const AbcTriple& right,
                           const std::vector<int>& modes) {
  std::vector<std::pair<Wire, Wire>> pairs;
  for (int m : modes) {
    pairs.push_back({{m, WireKind::InKet}, {m, WireKind::OutKet}});
    pairs.push_back({{m, WireKind::InBra}, {m, WireKind::OutBra}});
  }
  AbcTriple out = contract(left, right, ContractionPlan::by_wires(left, right, pairs));
  return reorder(out, OrderingTag::OutputInput);
}

AbcTriple unitary_as_channel(const AbcTriple& u) {
  AbcTriple ket_part = u.relabeled([](const Wire& w) {
    if (w.kind == WireKind::Ket) return Wire{w.mode, WireKind::OutKet};
    if (w.kind == WireKind::Bra) return Wire{w.mode, WireKind::InKet};
    return w;
  });
  AbcTriple bra_part = u.conjugated().relabeled([](const Wire& w) {
    if (w.kind == WireKind::Ket) return Wire{w.mode, WireKind::OutBra};
    if (w.kind == WireKind::Bra) return Wire{w.mode, WireKind::InBra};
    return w;
  });
  return reorder(bra_part.tensor(ket_part), OrderingTag::OutputInput);
}

Complex overlap(const AbcTriple& ket_a, const AbcTriple& ket_b) {
  AbcTriple bra = ket_a.adjoint();
  ContractionPlan plan = ContractionPlan::matching(bra, ket_b);
  if (plan.pairs.size() != bra.layout().size() || plan.pairs.size() != ket_b.layout().size()) {
    throw LayoutError("overlap requires kets over identical mode sets");
  }
  return contract(bra, ket_b, plan).c();
}

double norm_squared(const AbcTriple& ket) { return std::real(overlap(ket, ket)); }

}  // namespace bargmann
