#include "bargmann/stellar.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/phase_space.hpp"

namespace bargmann::stellar {

namespace {

Matrix pauli_x(Index n) {
  Matrix x = Matrix::Zero(2 * n, 2 * n);
  x.topRightCorner(n, n) = Matrix::Identity(n, n);
  x.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return x;
}

// Hermitian square root with eigenvalue clamping at zero below 1e-12 of the
// largest magnitude; Gamma_U^2 can dip negative by roundoff at purity
// boundaries.
Matrix hermitian_sqrt(const Matrix& m, double* min_eig = nullptr) {
  Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (min_eig) *min_eig = es.eigenvalues().minCoeff();
  Vector vals(es.eigenvalues().size());
  for (Index i = 0; i < vals.size(); ++i) {
    double v = es.eigenvalues()(i);
    if (v < 1e-12 * scale) v = 0.0;
    vals(i) = std::sqrt(v);
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? rel_tol * sv(0) : 0.0;
  Vector inv(sv.size());
  for (Index i = 0; i < sv.size(); ++i) inv(i) = sv(i) > cut ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

int numeric_rank(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

std::vector<int> sorted_modes(const AbcTriple& obj) { return obj.layout().modes(); }

bool is_pure_ket(const AbcTriple& obj) {
  for (const Wire& w : obj.layout().wires()) {
    if (w.kind != WireKind::Ket) return false;
  }
  return true;
}

bool is_density_matrix_shaped(const AbcTriple& obj) {
  for (const Wire& w : obj.layout().wires()) {
    if (w.kind != WireKind::Ket && w.kind != WireKind::Bra) return false;
    if (!obj.layout().contains({w.mode, conjugate_kind(w.kind)})) return false;
  }
  return true;
}

// Subsystem-major layout (bra_M, ket_M, bra_N, ket_N) for density matrices.
WireLayout dm_subsystem_layout(const std::vector<int>& m_modes,
                               const std::vector<int>& n_modes) {
  std::vector<Wire> wires;
  for (int q : m_modes) wires.push_back({q, WireKind::Bra});
  for (int q : m_modes) wires.push_back({q, WireKind::Ket});
  for (int q : n_modes) wires.push_back({q, WireKind::Bra});
  for (int q : n_modes) wires.push_back({q, WireKind::Ket});
  return WireLayout(std::move(wires));
}

// One displacement gate per listed mode, alpha from the phase-space mean.
AbcTriple displacement_product(const std::vector<int>& modes, const Vector& alphas) {
  AbcTriple out = catalog::displacement(alphas(0))
                      .relabeled([&](const Wire& w) { return Wire{modes[0], w.kind}; });
  for (std::size_t i = 1; i < modes.size(); ++i) {
    AbcTriple d = catalog::displacement(alphas(static_cast<Index>(i)))
                      .relabeled([&](const Wire& w) { return Wire{modes[i], w.kind}; });
    out = out.tensor(d);
  }
  return out;
}

struct MeanStrip {
  AbcTriple stripped;        // zero-mean object
  Vector alphas;             // per-mode displacement amplitudes removed
  std::vector<int> modes;
  bool displaced = false;
};

// rho = D(mu) rho0 D(mu)^dag  (or |psi> = D |psi0>); returns rho0 and D data.
MeanStrip strip_mean(const AbcTriple& obj, bool dm) {
  const double hbar = 2.0;
  MeanStrip out{obj, Vector(), sorted_modes(obj), false};
  AbcTriple as_dm = dm ? obj : to_density_matrix(obj);
  PhaseSpaceState ps = abc_to_state(as_dm, hbar);
  if (ps.mu.cwiseAbs().maxCoeff() < 1e-14) return out;
  const Index n = ps.n_modes();
  Vector alphas(n);
  for (Index i = 0; i < n; ++i) {
    alphas(i) = Complex(ps.mu(i), ps.mu(n + i)) / std::sqrt(2.0 * hbar);
  }
  Vector neg = -alphas;
  AbcTriple d_inv = displacement_product(out.modes, neg);
  out.stripped = dm ? apply_unitary_dm(d_inv, obj, out.modes)
                    : apply_unitary(d_inv, obj, out.modes);
  if (dm) out.stripped = reorder(out.stripped, obj.layout());
  out.alphas = alphas;
  out.displaced = true;
  return out;
}

double operator_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

CoreCheck is_core(const AbcTriple& obj, int m, double tol) {
  std::vector<int> modes = sorted_modes(obj);
  if (m < 0 || m > static_cast<int>(modes.size())) {
    throw DomainError("is_core: partition size out of range");
  }
  std::vector<int> m_modes(modes.begin(), modes.begin() + m);
  CoreCheck out;
  for (std::size_t i = 0; i < obj.layout().size(); ++i) {
    const Wire& wi = obj.layout()[i];
    const bool i_in_m =
        std::find(m_modes.begin(), m_modes.end(), wi.mode) != m_modes.end();
    if (!i_in_m) continue;
    out.b_block_max = std::max(out.b_block_max, std::abs(obj.b()(static_cast<Index>(i))));
    for (std::size_t j = 0; j < obj.layout().size(); ++j) {
      const Wire& wj = obj.layout()[j];
      const bool j_in_m =
          std::find(m_modes.begin(), m_modes.end(), wj.mode) != m_modes.end();
      if (!j_in_m) continue;
      out.a_block_max = std::max(
          out.a_block_max, std::abs(obj.A()(static_cast<Index>(i), static_cast<Index>(j))));
    }
  }
  out.is_core = out.a_block_max <= tol && out.b_block_max <= tol;
  return out;
}

PureDecomposition pure_decompose(const AbcTriple& ket, int m) {
  if (!is_pure_ket(ket)) throw LayoutError("pure_decompose expects a ket");
  std::vector<int> modes = sorted_modes(ket);
  const int total = static_cast<int>(modes.size());
  if (m < 1 || m > total) throw DomainError("pure_decompose: bad partition size");
  const Index mi = m;
  const Index ni = total - m;

  std::vector<Wire> order;
  for (int q : modes) order.push_back({q, WireKind::Ket});
  AbcTriple psi = reorder(ket, WireLayout(order));
  if (operator_norm(psi.A()) >= 1.0) {
    throw DomainError("pure_decompose: ||A|| >= 1, state is not normalizable");
  }

  Matrix am = psi.A().topLeftCorner(mi, mi);
  Matrix r = psi.A().bottomLeftCorner(ni, mi);
  Matrix an = psi.A().bottomRightCorner(ni, ni);
  Vector bm = psi.b().head(mi);
  Vector bn = psi.b().tail(ni);

  double gamma_min = 0.0;
  Matrix gamma_u = hermitian_sqrt(Matrix::Identity(mi, mi) - am.adjoint() * am, &gamma_min);
  if (gamma_min < 1e-12) {
    throw DegenerateMarginalError(
        "pure_decompose: ||A^(m)|| = 1, the m-mode marginal is degenerate");
  }
  Eigen::PartialPivLU<Matrix> gamma_lu(gamma_u);
  Matrix gamma_inv = gamma_lu.inverse();

  Matrix a_u(2 * mi, 2 * mi);
  a_u.topLeftCorner(mi, mi) = am;
  a_u.topRightCorner(mi, mi) = gamma_u.transpose();
  a_u.bottomLeftCorner(mi, mi) = gamma_u;
  a_u.bottomRightCorner(mi, mi) = -am.conjugate();
  Vector b_u(2 * mi);
  b_u.head(mi) = bm;
  b_u.tail(mi) = -am.conjugate() * (gamma_inv * bm) - gamma_inv.transpose() * bm.conjugate();

  std::vector<Wire> u_wires;
  for (int i = 0; i < m; ++i) u_wires.push_back({modes[static_cast<std::size_t>(i)], WireKind::Ket});
  for (int i = 0; i < m; ++i) u_wires.push_back({modes[static_cast<std::size_t>(i)], WireKind::Bra});
  AbcTriple u_raw(a_u, b_u, 1.0, WireLayout(std::move(u_wires)));

  // |c_U| from unitarity: U^dag U must be the identity gate triple whose c is
  // 1, so c_U = 1/sqrt(c of U^dag U computed with unit placeholders).
  std::vector<int> m_modes(modes.begin(), modes.begin() + m);
  AbcTriple udag_u = compose_operators(u_raw.adjoint(), u_raw, m_modes);
  const Complex c0 = udag_u.c();
  if (!(std::abs(c0) > 0.0)) throw DegenerateMarginalError("pure_decompose: unitarity failed");
  const double c_u = 1.0 / std::sqrt(std::abs(c0));
  AbcTriple unitary = u_raw.with_c(c_u);

  Matrix r_c = r * gamma_inv;
  Matrix a_core_n = an + r_c * am.conjugate() * r_c.transpose();
  Vector b_core_n = bn - r_c * b_u.tail(mi);

  Matrix a_core = Matrix::Zero(total, total);
  a_core.bottomLeftCorner(ni, mi) = r_c;
  a_core.topRightCorner(mi, ni) = r_c.transpose();
  a_core.bottomRightCorner(ni, ni) = ((a_core_n + a_core_n.transpose()) / 2.0).eval();
  Vector b_core = Vector::Zero(total);
  b_core.tail(ni) = b_core_n;
  const Complex c_core = psi.c() / c_u;
  AbcTriple core(a_core, b_core, c_core, psi.layout());

  return {core, unitary};
}

FormalDecomposition formal_decompose(const AbcTriple& vec, int m) {
  if (!is_pure_ket(vec)) {
    throw LayoutError("formal_decompose operates on Gaussian vectors (ket wires only)");
  }
  const Index k = vec.dim();
  if (m < 0 || m > static_cast<int>(k)) throw DomainError("formal_decompose: bad partition");
  const Index mi = m;
  const Index ni = k - mi;

  Matrix a_m = vec.A().topLeftCorner(mi, mi);
  Matrix r = vec.A().bottomLeftCorner(ni, mi);
  Matrix a_n = vec.A().bottomRightCorner(ni, ni);

  Matrix a_core = Matrix::Zero(k, k);
  a_core.bottomLeftCorner(ni, mi) = r;
  a_core.topRightCorner(mi, ni) = r.transpose();
  a_core.bottomRightCorner(ni, ni) = a_n;
  Vector b_core = Vector::Zero(k);
  b_core.tail(ni) = vec.b().tail(ni);
  AbcTriple core(a_core, b_core, vec.c(), vec.layout());

  Matrix a_t(2 * mi, 2 * mi);
  a_t.topLeftCorner(mi, mi) = a_m;
  a_t.topRightCorner(mi, mi) = Matrix::Identity(mi, mi);
  a_t.bottomLeftCorner(mi, mi) = Matrix::Identity(mi, mi);
  a_t.bottomRightCorner(mi, mi) = Matrix::Zero(mi, mi);
  Vector b_t = Vector::Zero(2 * mi);
  b_t.head(mi) = vec.b().head(mi);
  std::vector<Wire> t_wires;
  for (Index i = 0; i < mi; ++i) {
    t_wires.push_back(vec.layout()[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < mi; ++i) {
    const Wire& w = vec.layout()[static_cast<std::size_t>(i)];
    t_wires.push_back({w.mode, conjugate_kind(w.kind)});
  }
  AbcTriple t_op(a_t, b_t, 1.0, WireLayout(std::move(t_wires)));
  return {core, t_op};
}

namespace {

struct DmBlocks {
  Matrix a_m, r, a_n;       // 2m x 2m, 2n x 2m, 2n x 2n
  Matrix r_small, sigma;    // n x m ket-ket and ket-bra couplings
  Index mi = 0, ni = 0;
};

DmBlocks dm_blocks(const AbcTriple& rho, Index mi, Index ni) {
  DmBlocks b;
  b.mi = mi;
  b.ni = ni;
  b.a_m = rho.A().topLeftCorner(2 * mi, 2 * mi);
  b.r = rho.A().bottomLeftCorner(2 * ni, 2 * mi);
  b.a_n = rho.A().bottomRightCorner(2 * ni, 2 * ni);
  b.r_small = b.r.block(ni, mi, ni, mi);  // ket_n rows, ket_m cols
  b.sigma = b.r.block(ni, 0, ni, mi);     // ket_n rows, bra_m cols
  return b;
}

// Channel triple in output-input order from its mode-wise blocks; c from the
// trace-preservation identity.
AbcTriple assemble_channel(const Matrix& a_out, const Matrix& gamma, const Vector& b_phi,
                           const std::vector<int>& m_modes) {
  const Index m2 = a_out.rows();
  const Index mi = m2 / 2;
  Matrix x = pauli_x(mi);
  Matrix a_in =
      gamma * (a_out - x).partialPivLu().solve(gamma.transpose()) + x;
  Matrix a(2 * m2, 2 * m2);
  a.topLeftCorner(m2, m2) = a_out;
  a.topRightCorner(m2, m2) = gamma.transpose();
  a.bottomLeftCorner(m2, m2) = gamma;
  a.bottomRightCorner(m2, m2) = ((a_in + a_in.transpose()) / 2.0).eval();
  const Complex det = (Matrix::Identity(m2, m2) - x * a_out).partialPivLu().determinant();
  Vector b_out = b_phi.head(m2);
  Complex c = std::sqrt(det);
  if (b_out.cwiseAbs().maxCoeff() > 0.0) {
    const Complex quad =
        b_out.transpose() *
        (Matrix::Identity(m2, m2) - x * a_out).partialPivLu().solve(b_out.conjugate());
    c *= std::exp(-0.5 * quad);
  }
  std::vector<Wire> wires;
  for (int q : m_modes) wires.push_back({q, WireKind::OutBra});
  for (int q : m_modes) wires.push_back({q, WireKind::OutKet});
  for (int q : m_modes) wires.push_back({q, WireKind::InBra});
  for (int q : m_modes) wires.push_back({q, WireKind::InKet});
  Vector b_full = Vector::Zero(2 * m2);
  b_full.head(m2) = b_phi.head(m2);
  return AbcTriple(a, b_full, c, WireLayout(std::move(wires)));
}

// D(alpha) circuit composed in front of a channel: Phi'(rho) = D Phi(rho) D^dag.
AbcTriple precompose_displacement(const AbcTriple& channel, const std::vector<int>& m_modes,
                                  const Vector& alphas) {
  AbcTriple d = displacement_product(m_modes, alphas);
  AbcTriple d_chan = unitary_as_channel(d);
  return compose_channels(d_chan, channel, m_modes);
}

}  // namespace

MixedDecomposition mixed_decompose(const AbcTriple& dm, int m, const MixedOptions& options) {
  if (!is_density_matrix_shaped(dm)) {
    throw LayoutError("mixed_decompose expects a density matrix (bra/ket pairs)");
  }
  std::vector<int> modes = sorted_modes(dm);
  const int total = static_cast<int>(modes.size());
  if (m < 1 || m >= total) throw DomainError("mixed_decompose: bad partition size");
  const Index mi = m;
  const Index ni = total - m;
  if (mi >= ni) return pure_core_decompose(dm, m, options);

  std::vector<int> m_modes(modes.begin(), modes.begin() + m);
  std::vector<int> n_modes(modes.begin() + m, modes.end());
  AbcTriple rho = reorder(dm, dm_subsystem_layout(m_modes, n_modes));

  MeanStrip strip = strip_mean(rho, /*dm=*/true);
  AbcTriple rho0 = strip.stripped;
  DmBlocks blk = dm_blocks(rho0, mi, ni);

  Matrix gram_w = blk.r_small * blk.r_small.adjoint() + blk.sigma * blk.sigma.adjoint();
  MixedDecomposition out;
  out.rank_witness = numeric_rank(gram_w, options.rank_tolerance);

  if (out.rank_witness > m) {
    out.feasible = false;
    // vectorize in subsystem-major order so the M wires come first
    std::vector<Wire> kets;
    for (std::size_t i = 0; i < rho.layout().size(); ++i) {
      kets.push_back({static_cast<int>(i), WireKind::Ket});
    }
    AbcTriple vec_ok(rho.A(), rho.b(), rho.c(), WireLayout(std::move(kets)));
    out.fallback = formal_decompose(vec_ok, 2 * m);
    out.core = out.fallback->core_vector;
    out.channel = out.fallback->t_operator;
    return out;
  }

  Matrix x_m = pauli_x(mi);
  Matrix t_block = blk.r * (x_m - blk.a_m).partialPivLu().solve(blk.r.transpose());
  Matrix alpha_m = blk.a_m.block(mi, 0, mi, mi);  // ket-bra block of A^(m)
  Matrix alpha_m_pinv = pseudo_inverse(alpha_m);

  Matrix gram = t_block.block(ni, 0, ni, ni) + blk.sigma * alpha_m_pinv * blk.sigma.adjoint();
  gram = ((gram + gram.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double gscale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Matrix r_c = Matrix::Zero(ni, mi);
  {
    // top-m eigendirections carry the whole Gram matrix when feasible
    std::vector<std::pair<double, Index>> order;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      order.push_back({es.eigenvalues()(i), i});
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (Index j = 0; j < std::min<Index>(mi, ni); ++j) {
      double v = order[static_cast<std::size_t>(j)].first;
      if (v < 0.0 && v > -1e-10 * gscale) v = 0.0;
      if (v < 0.0) throw DegenerateMarginalError("mixed_decompose: Gram matrix not PSD");
      r_c.col(j) = es.eigenvectors().col(order[static_cast<std::size_t>(j)].second) *
                   std::sqrt(v);
    }
  }

  Matrix alpha_n = blk.a_n.block(ni, 0, ni, ni);
  Matrix a_n_kk = blk.a_n.block(ni, ni, ni, ni);
  Matrix alpha_c = alpha_n - blk.sigma * alpha_m_pinv * blk.sigma.adjoint();
  alpha_c = ((alpha_c + alpha_c.adjoint()) / 2.0).eval();
  Matrix a_c = a_n_kk + t_block.block(ni, ni, ni, ni);
  a_c = ((a_c + a_c.transpose()) / 2.0).eval();

  Matrix r_c_full = Matrix::Zero(2 * ni, 2 * mi);
  r_c_full.topLeftCorner(ni, mi) = r_c.conjugate();
  r_c_full.bottomRightCorner(ni, mi) = r_c;

  const Index k = 2 * (mi + ni);
  Matrix a_core = Matrix::Zero(k, k);
  a_core.bottomLeftCorner(2 * ni, 2 * mi) = r_c_full;
  a_core.topRightCorner(2 * mi, 2 * ni) = r_c_full.transpose();
  Matrix a_core_n(2 * ni, 2 * ni);
  a_core_n.topLeftCorner(ni, ni) = a_c.conjugate();
  a_core_n.topRightCorner(ni, ni) = alpha_c.transpose();
  a_core_n.bottomLeftCorner(ni, ni) = alpha_c;
  a_core_n.bottomRightCorner(ni, ni) = a_c;
  a_core.bottomRightCorner(2 * ni, 2 * ni) = a_core_n;

  Matrix x_full = Matrix::Zero(k, k);
  x_full.topLeftCorner(2 * mi, 2 * mi) = pauli_x(mi);
  x_full.bottomRightCorner(2 * ni, 2 * ni) = pauli_x(ni);
  const Complex c_core =
      std::sqrt((Matrix::Identity(k, k) - x_full * a_core).partialPivLu().determinant());
  AbcTriple core(a_core, Vector::Zero(k), c_core, rho.layout());

  Matrix gamma_phi = pseudo_inverse(r_c_full) * blk.r;
  AbcTriple channel = assemble_channel(blk.a_m, gamma_phi, Vector::Zero(4 * mi), m_modes);

  if (strip.displaced) {
    Vector n_alphas(ni);
    for (Index i = 0; i < ni; ++i) n_alphas(i) = strip.alphas(mi + i);
    AbcTriple d_n = displacement_product(n_modes, n_alphas);
    core = reorder(apply_unitary_dm(d_n, core, n_modes), rho.layout());
    Vector m_alphas = strip.alphas.head(mi);
    channel = precompose_displacement(channel, m_modes, m_alphas);
  }

  out.core = core;
  out.channel = channel;
  out.feasible = true;
  out.core_is_pure = false;
  return out;
}

MixedDecomposition pure_core_decompose(const AbcTriple& dm, int m, const MixedOptions& options) {
  if (!is_density_matrix_shaped(dm)) {
    throw LayoutError("pure_core_decompose expects a density matrix");
  }
  std::vector<int> modes = sorted_modes(dm);
  const int total = static_cast<int>(modes.size());
  if (m < 1 || m >= total) throw DomainError("pure_core_decompose: bad partition size");
  const int n = total - m;
  if (m < n) {
    throw DomainError(
        "pure_core_decompose needs m >= n; pad the M side with ancilla vacuum modes");
  }

  std::vector<int> m_modes(modes.begin(), modes.begin() + m);
  std::vector<int> n_modes(modes.begin() + m, modes.end());

  AbcTriple rho = dm;
  std::vector<int> pad_modes;
  if (m > n) {
    // pad N with vacua on fresh mode labels so the two sides match
    int fresh = modes.back() + 1;
    for (int i = 0; i < m - n; ++i) pad_modes.push_back(fresh + i);
    AbcTriple pad = to_density_matrix(catalog::vacuum(m - n)).relabeled([&](const Wire& w) {
      return Wire{pad_modes[static_cast<std::size_t>(w.mode)], w.kind};
    });
    rho = dm.tensor(pad);
    n_modes.insert(n_modes.end(), pad_modes.begin(), pad_modes.end());
  }
  const Index mi = m;
  const Index ni = static_cast<Index>(n_modes.size());

  rho = reorder(rho, dm_subsystem_layout(m_modes, n_modes));
  MeanStrip strip = strip_mean(rho, /*dm=*/true);
  AbcTriple rho0 = strip.stripped;
  DmBlocks blk = dm_blocks(rho0, mi, ni);

  MixedDecomposition out;
  Matrix gram_w = blk.r_small * blk.r_small.adjoint() + blk.sigma * blk.sigma.adjoint();
  out.rank_witness = numeric_rank(gram_w, options.rank_tolerance);

  Matrix x_m = pauli_x(mi);
  Matrix marg = blk.a_n - blk.r * (blk.a_m - x_m).partialPivLu().solve(blk.r.transpose());
  marg = ((marg + marg.transpose()) / 2.0).eval();
  Matrix alpha_marg = marg.block(ni, 0, ni, ni);  // ket-bra block, Hermitian PSD
  const double herm_err = (alpha_marg - alpha_marg.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-8 * std::max(1.0, alpha_marg.cwiseAbs().maxCoeff())) {
    throw DegenerateMarginalError("pure_core_decompose: marginal equation inconsistent");
  }
  double alpha_min = 0.0;
  Matrix r_small = hermitian_sqrt(alpha_marg, &alpha_min);
  if (alpha_min < -1e-8 * std::max(1.0, alpha_marg.cwiseAbs().maxCoeff())) {
    throw DegenerateMarginalError("pure_core_decompose: marginal noise block not PSD");
  }
  Matrix a_small = marg.block(ni, ni, ni, ni);  // ket-ket block

  // pure core ket over (m + n') modes
  const Index kk = mi + ni;
  Matrix a_core = Matrix::Zero(kk, kk);
  a_core.bottomLeftCorner(ni, mi) = r_small;
  a_core.topRightCorner(mi, ni) = r_small.transpose();
  a_core.bottomRightCorner(ni, ni) = ((a_small + a_small.transpose()) / 2.0).eval();
  std::vector<Wire> core_wires;
  for (int q : m_modes) core_wires.push_back({q, WireKind::Ket});
  for (int q : n_modes) core_wires.push_back({q, WireKind::Ket});
  AbcTriple core_ket(a_core, Vector::Zero(kk), 1.0, WireLayout(std::move(core_wires)));
  const double nrm2 = norm_squared(core_ket);
  if (!(nrm2 > 0.0)) throw DegenerateMarginalError("pure_core_decompose: zero-norm core");
  core_ket = core_ket.with_c(1.0 / std::sqrt(nrm2));

  Matrix r_c_full = Matrix::Zero(2 * ni, 2 * mi);
  r_c_full.topLeftCorner(ni, mi) = r_small.conjugate();
  r_c_full.bottomRightCorner(ni, mi) = r_small;
  Matrix gamma_phi = pseudo_inverse(r_c_full) * blk.r;
  AbcTriple channel = assemble_channel(blk.a_m, gamma_phi, Vector::Zero(4 * mi), m_modes);

  if (strip.displaced) {
    Vector n_alphas(ni);
    for (Index i = 0; i < ni; ++i) n_alphas(i) = strip.alphas(mi + i);
    if (n_alphas.cwiseAbs().maxCoeff() > 0.0) {
      AbcTriple d_n = displacement_product(n_modes, n_alphas);
      core_ket = apply_unitary(d_n, core_ket, n_modes);
    }
    Vector m_alphas = strip.alphas.head(mi);
    if (m_alphas.cwiseAbs().maxCoeff() > 0.0) {
      channel = precompose_displacement(channel, m_modes, m_alphas);
    }
  }

  // strip ancilla vacuum modes of the core again
  if (!pad_modes.empty()) {
    std::vector<Wire> drop;
    for (int q : pad_modes) drop.push_back({q, WireKind::Ket});
    core_ket = project_vacuum(core_ket, drop);
  }

  out.core = core_ket;
  out.channel = channel;
  out.feasible = true;
  out.core_is_pure = true;
  return out;
}

DisplacementAbsorption absorb_displacement(const AbcTriple& core_candidate, int m) {
  std::vector<int> modes = sorted_modes(core_candidate);
  if (m < 0 || m > static_cast<int>(modes.size())) {
    throw DomainError("absorb_displacement: bad partition size");
  }
  std::vector<int> m_modes(modes.begin(), modes.begin() + m);
  const bool dm = !is_pure_ket(core_candidate);
  Vector gamma(m);
  for (int i = 0; i < m; ++i) {
    const Wire ket{m_modes[static_cast<std::size_t>(i)], WireKind::Ket};
    gamma(i) = -core_candidate.b()(static_cast<Index>(core_candidate.layout().index_of(ket)));
  }
  DisplacementAbsorption out;
  out.gamma = gamma;
  if (m == 0 || gamma.cwiseAbs().maxCoeff() == 0.0) {
    out.core = core_candidate;
    return out;
  }
  AbcTriple d = displacement_product(m_modes, gamma);
  out.core = dm ? reorder(apply_unitary_dm(d, core_candidate, m_modes), core_candidate.layout())
                : apply_unitary(d, core_candidate, m_modes);
  return out;
}

}  // namespace bargmann::stellar
