#include "bargmann/physicality.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "bargmann/errors.hpp"

namespace bargmann {

namespace {

Matrix pauli_x(Index n) {
  Matrix x = Matrix::Zero(2 * n, 2 * n);
  x.topRightCorner(n, n) = Matrix::Identity(n, n);
  x.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return x;
}

// Eigenvalue margins use Hermitian solvers after explicit Hermitization so
// 1e-13 asymmetry cannot flip a boolean.
double min_eig(const Matrix& m) {
  Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eig(const Matrix& m) {
  Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// |log a - log b| with the argument difference wrapped to (-pi, pi].
double log_distance(Complex a, Complex b) {
  if (a == Complex{0.0, 0.0} || b == Complex{0.0, 0.0}) {
    return std::abs(a - b) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const double dmag = std::log(std::abs(a)) - std::log(std::abs(b));
  double darg = std::arg(a) - std::arg(b);
  while (darg > std::numbers::pi) darg -= 2.0 * std::numbers::pi;
  while (darg <= -std::numbers::pi) darg += 2.0 * std::numbers::pi;
  return std::hypot(dmag, darg);
}

// Type-wise reorder for operators (bra/ket) or maps (out/in bra/ket); checks
// the bra/ket pairing exists per mode.
AbcTriple to_type_wise_paired(const AbcTriple& obj) {
  for (const Wire& w : obj.layout().wires()) {
    if (!obj.layout().contains({w.mode, conjugate_kind(w.kind)})) {
      throw LayoutError("wire " + to_string(w) + " lacks its bra/ket partner");
    }
  }
  if (obj.dim() % 2 != 0) throw LayoutError("odd wire count");
  return reorder(obj, OrderingTag::TypeWise);
}

}  // namespace

double PhysicalityReport::margin(const std::string& name) const {
  auto it = margins.find(name);
  if (it == margins.end()) throw DomainError("no margin named '" + name + "'");
  return it->second;
}

HermitianBlocks hermitian_blocks(const AbcTriple& obj_in) {
  AbcTriple obj = to_type_wise_paired(obj_in);
  const Index n = obj.dim() / 2;
  HermitianBlocks blocks;
  blocks.lambda = obj.A().bottomRightCorner(n, n);
  blocks.gamma = obj.A().topRightCorner(n, n);
  blocks.beta = obj.b().tail(n);
  return blocks;
}

PhysicalityReport check_hermitian(const AbcTriple& obj_in, const PhysicalityTolerances& tol) {
  AbcTriple obj = to_type_wise_paired(obj_in);
  const Index n = obj.dim() / 2;
  Matrix x = pauli_x(n);
  const double a_err = (x * obj.A() * x - obj.A().conjugate()).cwiseAbs().maxCoeff();
  const double b_err =
      obj.dim() > 0 ? (x * obj.b() - obj.b().conjugate()).cwiseAbs().maxCoeff() : 0.0;
  const double c_err = std::abs(std::imag(obj.c()));
  PhysicalityReport report;
  report.ordering_used = obj.layout();
  report.margins["hermitian_A_residual"] = a_err;
  report.margins["hermitian_b_residual"] = b_err;
  report.margins["hermitian_c_imag"] = c_err;
  const double scale = std::max(1.0, obj.A().cwiseAbs().maxCoeff());
  report.hermitian = a_err <= tol.hermitian * scale && b_err <= tol.hermitian * scale &&
                     c_err <= tol.hermitian * std::max(1.0, std::abs(obj.c()));
  return report;
}

PhysicalityReport check_positive(const AbcTriple& obj, const PhysicalityTolerances& tol) {
  PhysicalityReport report = check_hermitian(obj, tol);
  HermitianBlocks blocks = hermitian_blocks(obj);
  const double gamma_min = blocks.gamma.rows() > 0 ? min_eig(blocks.gamma) : 0.0;
  const double c_real = std::real(obj.c());
  report.margins["gamma_min_eig"] = gamma_min;
  report.margins["c_real"] = c_real;
  report.positive = report.hermitian && gamma_min >= -tol.eigen && c_real >= -1e-12;
  return report;
}

PhysicalityReport check_density_matrix(const AbcTriple& obj, const PhysicalityTolerances& tol) {
  PhysicalityReport report = check_positive(obj, tol);
  HermitianBlocks blocks = hermitian_blocks(obj);
  const Index n = blocks.gamma.rows();
  Matrix one = Matrix::Identity(n, n);

  const double gamma_max = n > 0 ? max_eig(blocks.gamma) : 0.0;
  report.margins["gamma_below_one"] = 1.0 - gamma_max;

  double schur_min = 1.0;
  if (n > 0 && gamma_max < 1.0) {
    Matrix one_minus_gt = one - blocks.gamma.transpose();
    Matrix schur = one - blocks.gamma -
                   blocks.lambda.adjoint() * one_minus_gt.partialPivLu().solve(blocks.lambda);
    schur_min = min_eig(schur);
  } else if (gamma_max >= 1.0) {
    schur_min = -1.0;
  }
  report.margins["trace_class_schur_min"] = schur_min;

  // c equality: c = sqrt(det(1 - XA)) exp(-b^T (1 - XA)^{-1} b* / 2).
  AbcTriple tw = to_type_wise_paired(obj);
  Matrix x = pauli_x(n);
  Matrix one_minus_xa = Matrix::Identity(2 * n, 2 * n) - x * tw.A();
  Eigen::PartialPivLU<Matrix> lu(one_minus_xa);
  double c_dist = std::numeric_limits<double>::infinity();
  if (std::abs(lu.determinant()) > 1e-14) {
    const Complex quad = tw.b().transpose() * lu.solve(tw.b().conjugate());
    const Complex rhs = std::sqrt(lu.determinant()) * std::exp(-0.5 * quad);
    c_dist = log_distance(tw.c(), rhs);
  }
  report.margins["c_equality_log_distance"] = c_dist;

  report.trace_class = report.margins["gamma_below_one"] > tol.strict && schur_min > tol.strict;
  const bool c_ok = c_dist <= tol.c_equality;
  report.margins["dm_ok"] = (report.positive && report.trace_class && c_ok) ? 1.0 : 0.0;
  return report;
}

PhysicalityReport check_cp(const AbcTriple& map, const PhysicalityTolerances& tol) {
  for (const Wire& w : map.layout().wires()) {
    if (!is_map_kind(w.kind)) {
      throw LayoutError("check_cp expects a map with out/in bra/ket wires");
    }
  }
  PhysicalityReport report = check_positive(map, tol);
  report.cp = report.positive;
  report.margins["cp_gamma_min_eig"] = report.margins["gamma_min_eig"];
  return report;
}

PhysicalityReport check_tp(const AbcTriple& map_in, const PhysicalityTolerances& tol) {
  AbcTriple map = reorder(map_in, OrderingTag::OutputInput);
  const Index k = map.dim();
  if (k % 4 != 0) throw LayoutError("check_tp expects 4 wires per mode");
  const Index n2 = k / 2;
  const Index m = n2 / 2;
  Matrix a_out = map.A().topLeftCorner(n2, n2);
  Matrix r = map.A().bottomLeftCorner(n2, n2);
  Matrix a_in = map.A().bottomRightCorner(n2, n2);
  Matrix x = pauli_x(m);
  Matrix one = Matrix::Identity(n2, n2);

  PhysicalityReport report;
  report.ordering_used = map.layout();
  const double out_margin = min_eig(one - x * a_out);
  report.margins["tp_out_trace_class"] = out_margin;

  Eigen::PartialPivLU<Matrix> lu(a_out - x);
  if (std::abs(lu.determinant()) < 1e-14) {
    throw SingularContractionError("check_tp: (A_out - X) is singular");
  }
  const double in_residual = (a_in - r * lu.solve(r.transpose()) - x).cwiseAbs().maxCoeff();
  report.margins["tp_in_residual"] = in_residual;

  // c equality: c = sqrt(det(1 - X A_out)) exp(-b_out^T (1 - X A_out)^{-1} b_out* / 2).
  Eigen::PartialPivLU<Matrix> lu2(one - x * a_out);
  double c_dist = std::numeric_limits<double>::infinity();
  if (std::abs(lu2.determinant()) > 1e-14) {
    Vector b_out = map.b().head(n2);
    const Complex quad = b_out.transpose() * lu2.solve(b_out.conjugate());
    const Complex rhs = std::sqrt(lu2.determinant()) * std::exp(-0.5 * quad);
    c_dist = log_distance(map.c(), rhs);
  }
  report.margins["tp_c_log_distance"] = c_dist;

  report.tp = out_margin > tol.strict && in_residual <= tol.hermitian &&
              c_dist <= tol.c_equality;
  return report;
}

PhysicalityReport check_cptp(const AbcTriple& map, const PhysicalityTolerances& tol) {
  PhysicalityReport cp = check_cp(map, tol);
  PhysicalityReport tp = check_tp(map, tol);
  PhysicalityReport out = cp;
  out.tp = tp.tp;
  for (const auto& [k, v] : tp.margins) out.margins[k] = v;
  return out;
}

}  // namespace bargmann
