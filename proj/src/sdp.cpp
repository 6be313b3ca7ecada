#include "bargmann/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>

#include "bargmann/errors.hpp"

namespace bargmann::sdp {

namespace {

constexpr double kSqrt2Inv = 0.7071067811865475244;

bool cholesky(const RealMatrix& S, Eigen::LLT<RealMatrix>& llt) {
  llt.compute(S);
  return llt.info() == Eigen::Success;
}

RealMatrix evaluate(const LmiBlock& block, const RealVector& x) {
  RealMatrix S = block.F0;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) S += x(i) * block.coeffs[static_cast<std::size_t>(i)];
  }
  return S;
}

double min_eigenvalue(const RealMatrix& S) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Removes directions annihilated by the whole pencil {F0, F_i}. Uses the
// stacked SVD rather than a Gram matrix so near-machine kernels survive the
// conditioning.
LmiBlock facially_reduce(const LmiBlock& block) {
  const Eigen::Index d = block.F0.rows();
  if (d == 0) return block;
  RealMatrix stacked(d * static_cast<Eigen::Index>(1 + block.coeffs.size()), d);
  stacked.topRows(d) = block.F0;
  for (std::size_t i = 0; i < block.coeffs.size(); ++i) {
    stacked.middleRows(d * static_cast<Eigen::Index>(i + 1), d) = block.coeffs[i];
  }
  Eigen::JacobiSVD<RealMatrix> svd(stacked, Eigen::ComputeThinV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index live = 0;
  for (; live < svd.singularValues().size(); ++live) {
    if (svd.singularValues()(live) <= 1e-11 * std::max(1.0, smax)) break;
  }
  if (live == d) return block;
  RealMatrix v = svd.matrixV().leftCols(live);
  LmiBlock out;
  out.F0 = v.transpose() * block.F0 * v;
  out.F0 = ((out.F0 + out.F0.transpose()) / 2.0).eval();
  for (const RealMatrix& f : block.coeffs) {
    RealMatrix g = v.transpose() * f * v;
    out.coeffs.push_back(((g + g.transpose()) / 2.0).eval());
  }
  return out;
}

struct BarrierState {
  RealVector y;
  int newton_iterations = 0;
  double decrement = 0.0;
};

// Minimizes -t * q^T y - sum_j log det S_j(y) for fixed t by damped Newton.
// `stop_early` ends the descent as soon as the iterate satisfies it.
BarrierState newton_center(const std::vector<LmiBlock>& blocks, const RealVector& q, double t,
                           RealVector y, const SdpOptions& options, int& iter_budget,
                           const std::function<bool(const RealVector&)>& stop_early = {},
                           double centering_tolerance = 0.0, int max_steps = 60) {
  const int p = static_cast<int>(y.size());
  BarrierState state;
  Eigen::LLT<RealMatrix> llt;

  auto barrier_value = [&](const RealVector& yy, bool& feasible) -> double {
    double val = -t * q.dot(yy);
    feasible = true;
    for (const LmiBlock& block : blocks) {
      RealMatrix S = evaluate(block, yy);
      if (S.rows() == 0) continue;
      if (!cholesky(S, llt)) {
        feasible = false;
        return std::numeric_limits<double>::infinity();
      }
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < S.rows(); ++i) {
        const double d = llt.matrixL()(i, i);
        if (!(d > 0.0)) {
          feasible = false;
          return std::numeric_limits<double>::infinity();
        }
        logdet += std::log(d);
      }
      val -= 2.0 * logdet;
    }
    return val;
  };

  bool feasible = false;
  double f0 = barrier_value(y, feasible);
  if (!feasible) return state;  // empty y signals failure
  if (stop_early && stop_early(y)) {
    state.y = y;
    return state;
  }

  while (iter_budget-- > 0 && state.newton_iterations < max_steps) {
    RealVector grad = -t * q;
    RealMatrix hess = RealMatrix::Zero(p, p);
    bool ok = true;
    for (const LmiBlock& block : blocks) {
      if (block.F0.rows() == 0) continue;
      RealMatrix S = evaluate(block, y);
      if (!cholesky(S, llt)) {
        ok = false;
        break;
      }
      RealMatrix L = llt.matrixL();
      std::vector<RealMatrix> w(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) {
        RealMatrix tmp =
            L.triangularView<Eigen::Lower>().solve(block.coeffs[static_cast<std::size_t>(i)]);
        RealMatrix wi = L.triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();
        w[static_cast<std::size_t>(i)] = (wi + wi.transpose()) / 2.0;
        grad(i) -= w[static_cast<std::size_t>(i)].trace();
      }
      for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
          const double v =
              (w[static_cast<std::size_t>(i)].array() * w[static_cast<std::size_t>(j)].array())
                  .sum();
          hess(i, j) += v;
          if (i != j) hess(j, i) += v;
        }
      }
    }
    if (!ok) break;
    RealMatrix reg = hess;
    reg.diagonal().array() += 1e-13 * std::max(1.0, hess.diagonal().maxCoeff());
    Eigen::LDLT<RealMatrix> ldlt(reg);
    RealVector dy = ldlt.solve(-grad);
    const double decrement = -grad.dot(dy);
    state.decrement = decrement;
    if (!(decrement > 0.0)) break;
    if (decrement / 2.0 < std::max(options.newton_tolerance, centering_tolerance)) break;
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    while (step > 1e-16) {
      bool fs = false;
      f_new = barrier_value(y + step * dy, fs);
      if (fs && f_new <= f0 - 1e-4 * step * decrement) break;
      step *= 0.5;
    }
    if (step <= 1e-16) break;
    y += step * dy;
    f0 = f_new;
    ++state.newton_iterations;
    if (stop_early && stop_early(y)) break;
  }
  state.y = y;
  return state;
}

struct Phase1Result {
  RealVector x;          // max-margin point (original-variable coordinates of this round)
  double margin_lb = 0.0;
  double margin_ub = 0.0;
  int newton_iterations = 0;
  bool solver_ok = false;
};

Phase1Result phase1(const std::vector<LmiBlock>& blocks, int p, double scale,
                    const SdpOptions& options) {
  Phase1Result out;
  const double s_cap = 2.0 * scale + 1.0;
  std::vector<LmiBlock> aux;
  int m_total = 0;
  for (const LmiBlock& block : blocks) {
    LmiBlock b = block;
    b.coeffs.push_back(-RealMatrix::Identity(block.F0.rows(), block.F0.cols()));
    m_total += static_cast<int>(block.F0.rows());
    aux.push_back(std::move(b));
  }
  {
    LmiBlock cap;
    cap.F0 = RealMatrix::Constant(1, 1, s_cap);
    cap.coeffs.assign(static_cast<std::size_t>(p), RealMatrix::Zero(1, 1));
    cap.coeffs.push_back(-RealMatrix::Identity(1, 1));
    aux.push_back(std::move(cap));
  }
  RealVector q = RealVector::Zero(p + 1);
  q(p) = 1.0;
  RealVector y = RealVector::Zero(p + 1);
  double smin = s_cap;
  for (const LmiBlock& block : blocks) {
    if (block.F0.rows() > 0) smin = std::min(smin, min_eigenvalue(block.F0));
  }
  y(p) = smin - 1.0 - 0.1 * scale;

  const bool debug = std::getenv("BARGMANN_SDP_DEBUG") != nullptr;
  int budget = options.max_newton_iterations;
  double t = options.t_initial;
  const double margin_target = 1e-6 * scale;
  const auto feasible_enough = [&](const RealVector& yy) { return yy(p) > margin_target; };
  while (true) {
    BarrierState st = newton_center(aux, q, t, y, options, budget, feasible_enough);
    if (st.y.size() == 0) return out;
    y = st.y;
    out.newton_iterations += st.newton_iterations;
    if (debug) {
      std::fprintf(stderr, "[sdp phase1] t=%.3e margin=%.6e newton=%d budget=%d\n", t, y(p),
                   st.newton_iterations, budget);
    }
    if (y(p) > margin_target) break;
    if (budget <= 0) break;
    if (static_cast<double>(m_total + 1) / t < 1e-14 * std::max(1.0, scale)) break;
    t *= options.t_growth;
  }
  out.solver_ok = true;
  out.x = y.head(p);
  out.margin_lb = y(p);
  out.margin_ub = y(p) + static_cast<double>(m_total + 1) / t;
  return out;
}

// Affine reparametrization x = x0 + N x' restricted to keep the listed
// null directions annihilated across all blocks.
struct FaceRestriction {
  bool found = false;
  RealVector x0;
  RealMatrix basis;  // columns span the restricted parameter space
};

FaceRestriction restrict_to_face(const std::vector<LmiBlock>& blocks, const RealVector& x_star,
                                 double scale, double slack) {
  const int p = static_cast<int>(x_star.size());
  std::vector<RealVector> rows;
  std::vector<double> rhs;
  bool any = false;
  for (const LmiBlock& block : blocks) {
    if (block.F0.rows() == 0) continue;
    RealMatrix S = evaluate(block, x_star);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(S);
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      if (es.eigenvalues()(i) > slack) continue;
      any = true;
      RealVector v = es.eigenvectors().col(i);
      // impose S(x) v = 0 row by row
      for (Eigen::Index r = 0; r < S.rows(); ++r) {
        RealVector row(p);
        for (int k = 0; k < p; ++k) {
          row(k) = block.coeffs[static_cast<std::size_t>(k)].row(r).dot(v);
        }
        rows.push_back(row);
        rhs.push_back(-block.F0.row(r).dot(v));
      }
    }
  }
  FaceRestriction out;
  if (!any) return out;
  RealMatrix a(static_cast<Eigen::Index>(rows.size()), p);
  RealVector b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = rows[i];
    b(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (; rank < svd.singularValues().size(); ++rank) {
    if (svd.singularValues()(rank) <= 1e-10 * std::max(1.0, smax)) break;
  }
  RealVector x0 = svd.solve(b);
  const double residual = (a * x0 - b).cwiseAbs().maxCoeff();
  if (residual > 1e-7 * std::max(1.0, scale)) return out;  // system inconsistent
  out.found = true;
  out.x0 = x0;
  out.basis = svd.matrixV().rightCols(p - rank);
  return out;
}

std::vector<LmiBlock> reparametrize(const std::vector<LmiBlock>& blocks, const RealVector& x0,
                                    const RealMatrix& basis) {
  std::vector<LmiBlock> out;
  for (const LmiBlock& block : blocks) {
    LmiBlock nb;
    nb.F0 = evaluate(block, x0);
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      RealMatrix f = RealMatrix::Zero(block.F0.rows(), block.F0.cols());
      for (int k = 0; k < basis.rows(); ++k) {
        if (basis(k, j) != 0.0) f += basis(k, j) * block.coeffs[static_cast<std::size_t>(k)];
      }
      nb.coeffs.push_back(std::move(f));
    }
    out.push_back(facially_reduce(nb));
  }
  return out;
}

}  // namespace

RealMatrix real_embedding(const Matrix& hermitian) {
  const Index d = hermitian.rows();
  RealMatrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = hermitian.real();
  out.bottomRightCorner(d, d) = hermitian.real();
  out.topRightCorner(d, d) = -hermitian.imag();
  out.bottomLeftCorner(d, d) = hermitian.imag();
  return ((out + out.transpose()) / 2.0).eval();
}

std::vector<Matrix> hermitian_basis(Index d) {
  std::vector<Matrix> basis;
  for (Index i = 0; i < d; ++i) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    basis.push_back(m);
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      Matrix m = Matrix::Zero(d, d);
      m(i, j) = kSqrt2Inv;
      m(j, i) = kSqrt2Inv;
      basis.push_back(m);
    }
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      Matrix m = Matrix::Zero(d, d);
      m(i, j) = Complex(0.0, kSqrt2Inv);
      m(j, i) = Complex(0.0, -kSqrt2Inv);
      basis.push_back(m);
    }
  }
  return basis;
}

Matrix hermitian_from_parameters(const RealVector& x, Index d) {
  const std::vector<Matrix> basis = hermitian_basis(d);
  if (static_cast<Index>(basis.size()) != x.size()) {
    throw DomainError("hermitian_from_parameters: parameter count mismatch");
  }
  Matrix z = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < basis.size(); ++i) z += x(static_cast<Index>(i)) * basis[i];
  return z;
}

RealVector parameters_from_hermitian(const Matrix& z) {
  const Index d = z.rows();
  const std::vector<Matrix> basis = hermitian_basis(d);
  RealVector x(static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    x(static_cast<Index>(i)) = std::real((basis[i].adjoint() * z).trace());
  }
  return x;
}

void SdpProblem::add_hermitian_block(const Matrix& constant,
                                     const std::vector<Matrix>& variable_action) {
  LmiBlock block;
  const double herm_err = (constant - constant.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-12 * std::max(1.0, constant.cwiseAbs().maxCoeff())) {
    throw DomainError("LMI constant block is not Hermitian");
  }
  block.F0 = real_embedding(((constant + constant.adjoint()) / 2.0).eval());
  for (const Matrix& f : variable_action) block.coeffs.push_back(real_embedding(f));
  blocks.push_back(std::move(block));
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  SdpSolution sol;
  const int p_original = problem.variable_count();
  for (const LmiBlock& block : problem.blocks) {
    if (static_cast<int>(block.coeffs.size()) != p_original) {
      throw DomainError("LMI block has wrong number of coefficient matrices");
    }
  }

  std::vector<LmiBlock> blocks;
  for (const LmiBlock& block : problem.blocks) blocks.push_back(facially_reduce(block));

  double scale = 1.0;
  for (const LmiBlock& block : blocks) {
    if (block.F0.rows() > 0) scale = std::max(scale, block.F0.cwiseAbs().maxCoeff());
  }

  // Running affine map x_original = x_base + basis * x_current.
  RealVector x_base = RealVector::Zero(p_original);
  RealMatrix basis = RealMatrix::Identity(p_original, p_original);
  RealVector objective = problem.objective;

  Phase1Result p1;
  const int max_face_rounds = 4;
  for (int round = 0; round <= max_face_rounds; ++round) {
    const int p = static_cast<int>(basis.cols());
    if (p == 0) break;  // fully pinned; the only candidate is x_base
    p1 = phase1(blocks, p, scale, options);
    sol.newton_iterations += p1.newton_iterations;
    if (!p1.solver_ok) {
      sol.status = SdpStatus::MaxIterations;
      sol.x = x_base;
      return sol;
    }
    sol.feasibility_margin = p1.margin_lb;
    if (p1.margin_lb > 0.0) break;
    if (p1.margin_ub < -1e-9 * scale) {
      sol.status = SdpStatus::Infeasible;
      sol.x = RealVector::Zero(p_original);
      return sol;
    }
    if (round == max_face_rounds) {
      sol.status = SdpStatus::MaxIterations;
      sol.x = x_base + basis * p1.x;
      sol.value = problem.objective.dot(sol.x);
      return sol;
    }
    // On a face: pin the directions that the max-margin center leaves at zero.
    const double slack = std::max(10.0 * std::abs(p1.margin_ub), 1e-11 * scale);
    FaceRestriction face = restrict_to_face(blocks, p1.x, scale, slack);
    if (!face.found) {
      sol.status = SdpStatus::MaxIterations;
      sol.x = x_base + basis * p1.x;
      sol.value = problem.objective.dot(sol.x);
      return sol;
    }
    blocks = reparametrize(blocks, face.x0, face.basis);
    x_base += basis * face.x0;
    basis = (basis * face.basis).eval();
    objective = basis.transpose() * problem.objective;
  }

  const int p = static_cast<int>(basis.cols());
  int m_total = 0;
  for (const LmiBlock& block : blocks) m_total += static_cast<int>(block.F0.rows());

  RealVector x = p > 0 ? p1.x : RealVector(0);
  bool hit_budget = false;
  if (p > 0 && m_total > 0) {
    double t = options.t_initial;
    int budget = options.max_newton_iterations;
    while (true) {
      const bool final_rounds = static_cast<double>(m_total) / t < 1e2 * options.gap_tolerance;
      BarrierState st = newton_center(blocks, objective, t, x, options, budget, {},
                                      final_rounds ? 0.0 : 1e-3);
      if (st.y.size() == 0) break;
      if (std::getenv("BARGMANN_SDP_DEBUG")) {
        std::fprintf(stderr, "[sdp phase2] t=%.3e newton=%d obj=%.10f decrement=%.3e budget=%d\n",
                     t, st.newton_iterations, objective.dot(st.y), st.decrement, budget);
      }
      x = st.y;
      sol.newton_iterations += st.newton_iterations;
      const double obj = objective.dot(x);
      if (std::abs(obj) > 1e14 * std::max(1.0, scale)) {
        sol.status = SdpStatus::Unbounded;
        sol.x = x_base + basis * x;
        sol.value = problem.objective.dot(sol.x);
        return sol;
      }
      sol.gap_estimate = static_cast<double>(m_total) / t;
      if (sol.gap_estimate < options.gap_tolerance) break;
      if (budget <= 0) {
        hit_budget = true;
        break;
      }
      t *= options.t_growth;
    }
  }

  sol.x = p > 0 ? (x_base + basis * x).eval() : x_base;
  sol.value = problem.objective.dot(sol.x);
  double min_res = std::numeric_limits<double>::infinity();
  for (const LmiBlock& block : problem.blocks) {
    if (block.F0.rows() > 0) min_res = std::min(min_res, min_eigenvalue(evaluate(block, sol.x)));
  }
  sol.min_residual = std::isfinite(min_res) ? min_res : 0.0;
  sol.status = hit_budget ? SdpStatus::MaxIterations : SdpStatus::Optimal;
  return sol;
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::MaxIterations: return "max-iter";
  }
  return "?";
}

}  // namespace bargmann::sdp
