#include "bargmann/gkp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/stellar.hpp"

namespace bargmann::gkp {

namespace {

constexpr Complex kI{0.0, 1.0};

double db_of_sigma2(double sigma2) { return -10.0 * std::log10(sigma2); }

// The stabilizer expectation of D_v damps through w = Omega v (the
// characteristic-function quadratic form), so the direction figures use
// (Omega v)(Omega v)^T; the symmetric figure sums both axes to 1/hbar.
Eigen::MatrixXd figure_matrix(FigureOfMerit figure, double hbar, Index m2) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(m2, m2);
  RealMatrix omega = symplectic_form(m2 / 2, QuadOrder::XPXP);
  switch (figure) {
    case FigureOfMerit::DirectionQ: {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m2);
      v(0) = std::sqrt(2.0 * std::numbers::pi * hbar);
      Eigen::VectorXd w = omega * v;
      m = w * w.transpose() / (std::numbers::pi * hbar * hbar);
      break;
    }
    case FigureOfMerit::DirectionP: {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m2);
      v(1) = std::sqrt(2.0 * std::numbers::pi * hbar);
      Eigen::VectorXd w = omega * v;
      m = w * w.transpose() / (std::numbers::pi * hbar * hbar);
      break;
    }
    case FigureOfMerit::Symmetric:
      m = Eigen::MatrixXd::Identity(m2, m2) / hbar;
      break;
  }
  return m;
}

}  // namespace

EffectiveSqueezing effective_squeezing(const PhaseSpaceState& state_in) {
  PhaseSpaceState state = state_in.reordered(QuadOrder::XPXP);
  const double hbar = state.hbar;
  RealMatrix omega = symplectic_form(state.n_modes(), QuadOrder::XPXP);
  auto sigma2_for = [&](const Eigen::VectorXd& direction) {
    Eigen::VectorXd v = std::sqrt(2.0 * std::numbers::pi * hbar) * direction;
    Eigen::VectorXd w = omega * v;
    const double quad = w.dot(state.sigma * w) / (2.0 * hbar * hbar);
    // |tr(rho D_v)| = exp(-quad); sigma^2 = (2/pi) log 1/|tr|
    return (2.0 / std::numbers::pi) * quad;
  };
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2 * state.n_modes());
  Eigen::VectorXd e2 = e1;
  e1(0) = 1.0;
  e2(1) = 1.0;
  EffectiveSqueezing out;
  out.sigma_q2 = sigma2_for(e1);
  out.sigma_p2 = sigma2_for(e2);
  out.sigma_sym2 = (out.sigma_q2 + out.sigma_p2) / 2.0;
  out.db_sym = db_of_sigma2(out.sigma_sym2);
  return out;
}

EffectiveSqueezing effective_squeezing(const FockArray& state, double hbar) {
  AbcTriple identity = catalog::identity_gate(1);
  EffectiveSqueezing out;
  out.sigma_q2 = effective_squeezing_exact(state, identity, Eigen::Vector2d(1.0, 0.0), hbar);
  out.sigma_p2 = effective_squeezing_exact(state, identity, Eigen::Vector2d(0.0, 1.0), hbar);
  out.sigma_sym2 = (out.sigma_q2 + out.sigma_p2) / 2.0;
  out.db_sym = db_of_sigma2(out.sigma_sym2);
  return out;
}

double channel_factor_bound(const Eigen::Matrix2d& y, const Eigen::Vector2d& v, double hbar) {
  Eigen::Matrix2d omega;
  omega << 0.0, 1.0, -1.0, 0.0;
  Eigen::Vector2d w = omega * v;
  return std::exp(-w.dot(y * w) / (2.0 * hbar * hbar));
}

double sigma_sym2_bound_from_y(const Eigen::MatrixXd& y, double hbar) {
  return y.trace() / hbar;
}

BoundResult sdp_bound(const PhaseSpaceState& sigma_in, int m, const BoundOptions& options) {
  PhaseSpaceState ps = sigma_in.reordered(QuadOrder::XPXP);
  const Index total = ps.n_modes();
  if (m < 1 || m > static_cast<int>(total)) throw DomainError("sdp_bound: bad mode split");
  const Index mi = m;
  const Index ni = total - mi;
  const double hbar = ps.hbar;
  const Index m2 = 2 * mi;
  const Index k = 2 * total;

  Eigen::MatrixXd fom = options.custom_m ? *options.custom_m
                                         : figure_matrix(options.figure, hbar, m2);
  if (fom.rows() != m2 || fom.cols() != m2) throw DomainError("figure-of-merit size mismatch");

  Matrix omega_full = symplectic_form(total, QuadOrder::XPXP).cast<Complex>();
  Matrix omega_m = symplectic_form(mi, QuadOrder::XPXP).cast<Complex>();

  // G = Sigma - i (hbar/2) Omega_{m+n}; constraint 2 with Z = i(hbar/2)Om + P
  // reads G >= diag(P, 0) with P >= 0.
  Matrix g = ps.sigma.cast<Complex>() - kI * (hbar / 2.0) * omega_full;
  g = ((g + g.adjoint()) / 2.0).eval();

  // Facial restriction: P must annihilate the m-parts of ker(G).
  Eigen::SelfAdjointEigenSolver<Matrix> eg(g);
  const double gscale = std::max(1.0, eg.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Vector> kernel_m_parts;
  for (Index i = 0; i < k; ++i) {
    if (eg.eigenvalues()(i) < 1e-10 * gscale) {
      Vector um = eg.eigenvectors().col(i).head(m2);
      if (um.norm() > 1e-12) kernel_m_parts.push_back(um.normalized());
    }
  }
  Matrix w_face;  // orthonormal basis of the allowed subspace for P
  {
    // Orthocomplement of span(kernel m-parts) by eigendecomposition.
    Matrix kspan = Matrix::Zero(m2, m2);
    for (const Vector& um : kernel_m_parts) kspan += um * um.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> ek(kspan);
    Index null_dim = 0;
    for (Index i = 0; i < m2; ++i) {
      if (ek.eigenvalues()(i) < 1e-8) ++null_dim;
    }
    w_face = ek.eigenvectors().leftCols(null_dim);
  }
  const Index face_dim = w_face.cols();

  BoundResult out;
  if (face_dim == 0) {
    // Only P = 0 is feasible; Z = i(hbar/2)Omega_m.
    out.z = kI * (hbar / 2.0) * omega_m;
    out.objective = std::real((fom.cast<Complex>() * out.z).trace());
    out.bound_on_abs_trace = std::exp(-std::numbers::pi / 2.0 * out.objective);
    out.effective_squeezing_bound_db = db_of_sigma2(out.objective);
    out.status = sdp::SdpStatus::Optimal;
    return out;
  }

  // Primal over P' (Hermitian, face_dim x face_dim): maximize tr(M (i(h/2)Om + W P' W^dag))
  const std::vector<Matrix> basis = sdp::hermitian_basis(face_dim);
  const int p = static_cast<int>(basis.size());
  sdp::SdpProblem primal;
  primal.objective = Eigen::VectorXd(p);
  const double const0 =
      std::real((fom.cast<Complex>() * (kI * (hbar / 2.0) * omega_m)).trace());
  for (int i = 0; i < p; ++i) {
    Matrix lifted = w_face * basis[static_cast<std::size_t>(i)] * w_face.adjoint();
    primal.objective(i) = std::real((fom.cast<Complex>() * lifted).trace());
  }
  // Block 1: P' >= 0.
  {
    std::vector<Matrix> act(basis.begin(), basis.end());
    primal.add_hermitian_block(Matrix::Zero(face_dim, face_dim), act);
  }
  // Block 2: G - diag(W P' W^dag, 0) >= 0.
  {
    std::vector<Matrix> act;
    for (int i = 0; i < p; ++i) {
      Matrix f = Matrix::Zero(k, k);
      f.topLeftCorner(m2, m2) =
          -(w_face * basis[static_cast<std::size_t>(i)] * w_face.adjoint());
      act.push_back(f);
    }
    primal.add_hermitian_block(g, act);
  }
  sdp::SdpSolution primal_sol = sdp::solve(primal, options.solver);

  Matrix p_opt = Matrix::Zero(m2, m2);
  if (primal_sol.status == sdp::SdpStatus::Optimal ||
      primal_sol.status == sdp::SdpStatus::MaxIterations) {
    p_opt = w_face * sdp::hermitian_from_parameters(primal_sol.x, face_dim) * w_face.adjoint();
  }
  out.z = kI * (hbar / 2.0) * omega_m + p_opt;
  out.objective = const0 + primal_sol.value;
  out.status = primal_sol.status;
  out.primal_min_residual = primal_sol.min_residual;
  out.bound_on_abs_trace = std::exp(-std::numbers::pi / 2.0 * out.objective);
  out.effective_squeezing_bound_db = db_of_sigma2(out.objective);

  if (options.solve_dual && primal_sol.status == sdp::SdpStatus::Optimal) {
    // Dual: minimize tr(Q (Sigma - i(h/2)Omega)) s.t. Q >= 0, Q_tl >= M.
    // Directions of Q along ker(G) are objective-free, so the feasible set is
    // unbounded; a wide norm cap R*1 - Q >= 0 keeps the barrier proper and is
    // verified not to bind at the optimum (else R is enlarged).
    const std::vector<Matrix> qbasis = sdp::hermitian_basis(k);
    const int pq = static_cast<int>(qbasis.size());
    double cap = 50.0 * (1.0 + fom.cwiseAbs().maxCoeff());
    sdp::SdpProblem dual;
    dual.objective = Eigen::VectorXd(pq);
    for (int i = 0; i < pq; ++i) {
      dual.objective(i) = -std::real((g * qbasis[static_cast<std::size_t>(i)]).trace());
    }
    {
      std::vector<Matrix> act(qbasis.begin(), qbasis.end());
      dual.add_hermitian_block(Matrix::Zero(k, k), act);  // Q >= 0
    }
    {
      std::vector<Matrix> act;
      for (int i = 0; i < pq; ++i) {
        act.push_back(qbasis[static_cast<std::size_t>(i)].topLeftCorner(m2, m2));
      }
      dual.add_hermitian_block(-fom.cast<Complex>(), act);  // Q_tl - M >= 0
    }
    {
      std::vector<Matrix> act;
      for (int i = 0; i < pq; ++i) act.push_back(-qbasis[static_cast<std::size_t>(i)]);
      dual.add_hermitian_block(cap * Matrix::Identity(k, k), act);  // Q <= cap
    }
    sdp::SdpSolution dual_sol = sdp::solve(dual, options.solver);
    if (dual_sol.status == sdp::SdpStatus::Optimal) {
      out.dual_value = -dual_sol.value + const0;
      out.gap = std::abs(out.dual_value - out.objective);
      out.dual_min_residual = dual_sol.min_residual;
    }
  }
  return out;
}

StaircaseState build_staircase(const StaircaseSpec& spec, double hbar) {
  const int m_total = static_cast<int>(spec.squeezings_db.size());
  if (m_total < 2) throw DomainError("staircase needs at least two modes");
  if (static_cast<int>(spec.thetas.size()) != m_total - 1) {
    throw DomainError("staircase needs M-1 beamsplitter angles");
  }
  if (spec.loss_eta < 0.0 || spec.loss_eta > 1.0) {
    throw DomainError("loss fraction must lie in [0, 1]");
  }
  const double eta_t = 1.0 - spec.loss_eta;  // catalog loss takes a transmissivity

  // Abc path: squeezed kets, beamsplitters, then loss channels on 1..M-1.
  AbcTriple ket = catalog::squeezed_vacuum(spec.squeezings_db[0] * std::numbers::ln10 / 20.0);
  for (int i = 1; i < m_total; ++i) {
    const double r = spec.squeezings_db[static_cast<std::size_t>(i)] * std::numbers::ln10 / 20.0;
    const double phi = (i % 2 == 0) ? 0.0 : std::numbers::pi;  // alternating S(r), S(-r)
    AbcTriple sq = catalog::squeezed_vacuum(r, phi).relabeled([i](const Wire& w) {
      return Wire{i, w.kind};
    });
    ket = ket.tensor(sq);
  }
  for (int i = 0; i + 1 < m_total; ++i) {
    AbcTriple bs = catalog::beamsplitter(spec.thetas[static_cast<std::size_t>(i)])
                       .relabeled([i](const Wire& w) { return Wire{w.mode + i, w.kind}; });
    ket = apply_unitary(bs, ket, {i, i + 1});
  }
  AbcTriple dm = to_density_matrix(ket);
  for (int i = 1; i < m_total; ++i) {
    AbcTriple loss = catalog::loss_channel(eta_t).relabeled([i](const Wire& w) {
      return Wire{i, w.kind};
    });
    dm = apply_channel(loss, dm, {i});
  }

  // Covariance path in parallel through phase space.
  Index k = 2 * m_total;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < m_total; ++i) {
    const double r = spec.squeezings_db[static_cast<std::size_t>(i)] * std::numbers::ln10 / 20.0;
    const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
    sigma(i, i) = (hbar / 2.0) * std::exp(-2.0 * sgn * r);             // x block
    sigma(m_total + i, m_total + i) = (hbar / 2.0) * std::exp(2.0 * sgn * r);  // p block
  }
  for (int i = 0; i + 1 < m_total; ++i) {
    SymplecticUnitary bs = abc_to_unitary(
        catalog::beamsplitter(spec.thetas[static_cast<std::size_t>(i)]), hbar);
    Eigen::MatrixXd s_full = Eigen::MatrixXd::Identity(k, k);
    // embed the 2-mode symplectic (xxpp over modes i, i+1)
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        s_full(i + a, i + b) = bs.S(a, b);
        s_full(i + a, m_total + i + b) = bs.S(a, 2 + b);
        s_full(m_total + i + a, i + b) = bs.S(2 + a, b);
        s_full(m_total + i + a, m_total + i + b) = bs.S(2 + a, 2 + b);
      }
    }
    sigma = (s_full * sigma * s_full.transpose()).eval();
  }
  for (int i = 1; i < m_total; ++i) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(k, k);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(k, k);
    x(i, i) = x(m_total + i, m_total + i) = std::sqrt(eta_t);
    y(i, i) = y(m_total + i, m_total + i) = (hbar / 2.0) * (1.0 - eta_t);
    sigma = (x * sigma * x.transpose() + y).eval();
  }

  StaircaseState out{dm, PhaseSpaceState(sigma, Eigen::VectorXd::Zero(k), hbar)};
  return out;
}

double stellar_bound_sigma_sym2(const AbcTriple& dm, double hbar) {
  const int total = static_cast<int>(dm.layout().modes().size());
  stellar::MixedDecomposition dec = stellar::pure_core_decompose(dm, total - 1);
  ChannelXY ch = abc_to_channel(dec.channel, hbar);
  return sigma_sym2_bound_from_y(ch.Y, hbar);
}

InvarianceReport staircase_invariance_check(const StaircaseSpec& base,
                                            const std::vector<std::vector<double>>& extra_thetas,
                                            double hbar) {
  if (base.squeezings_db.size() != 2 || base.thetas.size() != 1) {
    throw DomainError("invariance check starts from a 2-mode base spec");
  }
  InvarianceReport report;
  std::vector<double> objectives;
  {
    StaircaseState st = build_staircase(base, hbar);
    BoundResult b = sdp_bound(st.cov, 1);
    report.widths.push_back(2);
    objectives.push_back(b.objective);
    report.all_optimal = report.all_optimal && b.status == sdp::SdpStatus::Optimal;
  }
  for (const std::vector<double>& extras : extra_thetas) {
    StaircaseSpec spec = base;
    for (double th : extras) {
      spec.thetas.push_back(th);
      spec.squeezings_db.push_back(base.squeezings_db[1]);
    }
    StaircaseState st = build_staircase(spec, hbar);
    BoundResult b = sdp_bound(st.cov, 1);
    report.widths.push_back(static_cast<int>(spec.squeezings_db.size()));
    objectives.push_back(b.objective);
    report.all_optimal = report.all_optimal && b.status == sdp::SdpStatus::Optimal;
  }
  report.objectives = objectives;
  for (double obj : objectives) {
    report.max_relative_difference =
        std::max(report.max_relative_difference,
                 std::abs(obj - objectives[0]) / std::max(1e-300, std::abs(objectives[0])));
  }
  return report;
}

std::vector<SweepRow> loss_sweep(const StaircaseSpec& base, double eta_min, double eta_max,
                                 int points, double hbar) {
  if (points < 2) throw DomainError("sweep needs at least two points");
  std::vector<SweepRow> rows;
  for (int i = 0; i < points; ++i) {
    StaircaseSpec spec = base;
    spec.loss_eta = eta_min + (eta_max - eta_min) * i / (points - 1);
    StaircaseState st = build_staircase(spec, hbar);
    BoundResult b = sdp_bound(st.cov, 1);
    SweepRow row;
    row.eta = spec.loss_eta;
    row.bound_db_sdp = b.effective_squeezing_bound_db;
    row.gap = b.gap;
    row.bound_db_stellar = db_of_sigma2(stellar_bound_sigma_sym2(st.dm, hbar));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bargmann::gkp
