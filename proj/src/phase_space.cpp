#include "bargmann/phase_space.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"

namespace bargmann {

namespace {

constexpr Complex kI{0.0, 1.0};

// W rotates the q/p basis into the amplitude basis: (1/sqrt2) [[1, i1], [1, -i1]].
Matrix w_matrix(Index n) {
  Matrix w(2 * n, 2 * n);
  const double f = 1.0 / std::sqrt(2.0);
  w.topLeftCorner(n, n) = f * Matrix::Identity(n, n);
  w.topRightCorner(n, n) = kI * f * Matrix::Identity(n, n);
  w.bottomLeftCorner(n, n) = f * Matrix::Identity(n, n);
  w.bottomRightCorner(n, n) = -kI * f * Matrix::Identity(n, n);
  return w;
}

Matrix pauli_x(Index n) {
  Matrix x = Matrix::Zero(2 * n, 2 * n);
  x.topRightCorner(n, n) = Matrix::Identity(n, n);
  x.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return x;
}

void check_real(const Matrix& m, const std::string& what, double tol = 1e-9) {
  const double imax = m.imag().cwiseAbs().maxCoeff();
  if (imax > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw DomainError(what + " has imaginary residue " + std::to_string(imax));
  }
}

void check_real(const Vector& v, const std::string& what, double tol = 1e-9) {
  const double imax = v.imag().cwiseAbs().maxCoeff();
  if (imax > tol * std::max(1.0, v.cwiseAbs().maxCoeff())) {
    throw DomainError(what + " has imaginary residue " + std::to_string(imax));
  }
}

}  // namespace

RealMatrix quad_order_permutation(QuadOrder order, Index n) {
  RealMatrix t = RealMatrix::Zero(2 * n, 2 * n);
  if (order == QuadOrder::XXPP) {
    t.setIdentity();
  } else {
    for (Index i = 0; i < n; ++i) {
      t(2 * i, i) = 1.0;          // x_i
      t(2 * i + 1, n + i) = 1.0;  // p_i
    }
  }
  return t;
}

RealMatrix symplectic_form(Index n, QuadOrder order) {
  RealMatrix omega = RealMatrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = RealMatrix::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -RealMatrix::Identity(n, n);
  if (order == QuadOrder::XPXP) {
    RealMatrix t = quad_order_permutation(QuadOrder::XPXP, n);
    omega = (t * omega * t.transpose()).eval();
  }
  return omega;
}

PhaseSpaceState::PhaseSpaceState(RealMatrix sigma_in, RealVector mu_in, double hbar_in,
                                 QuadOrder ordering_in)
    : sigma(std::move(sigma_in)), mu(std::move(mu_in)), hbar(hbar_in), ordering(ordering_in) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0) {
    throw DomainError("covariance matrix must be square with even dimension");
  }
  if (mu.size() != sigma.rows()) throw DomainError("mean vector size mismatch");
  if (hbar <= 0.0) throw DomainError("hbar must be positive");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    throw DomainError("covariance matrix is not symmetric");
  }
  sigma = ((sigma + sigma.transpose()) / 2.0).eval();
}

PhaseSpaceState PhaseSpaceState::reordered(QuadOrder target) const {
  if (target == ordering) return *this;
  const Index n = n_modes();
  RealMatrix to_target = quad_order_permutation(target, n);
  RealMatrix from_this = quad_order_permutation(ordering, n);
  RealMatrix t = to_target * from_this.transpose();
  return PhaseSpaceState(t * sigma * t.transpose(), t * mu, hbar, target);
}

double PhaseSpaceState::physicality_margin() const {
  Matrix m = (2.0 / hbar) * sigma.cast<Complex>() -
             kI * symplectic_form(n_modes(), ordering).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(((m + m.adjoint()) / 2.0).eval(),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PhaseSpaceState PhaseSpaceState::vacuum(Index n_modes, double hbar) {
  return PhaseSpaceState((hbar / 2.0) * RealMatrix::Identity(2 * n_modes, 2 * n_modes),
                         RealVector::Zero(2 * n_modes), hbar);
}

SymplecticUnitary::SymplecticUnitary(RealMatrix S_in, RealVector d_in, QuadOrder ordering_in)
    : S(std::move(S_in)), d(std::move(d_in)), ordering(ordering_in) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0) throw DomainError("S must be 2n x 2n");
  if (d.size() != S.rows()) throw DomainError("displacement size mismatch");
  RealMatrix omega = symplectic_form(n_modes(), ordering);
  const double err = (S.transpose() * omega * S - omega).cwiseAbs().maxCoeff();
  if (err > 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff())) {
    throw DomainError("matrix is not symplectic (residual " + std::to_string(err) + ")");
  }
}

SymplecticUnitary SymplecticUnitary::reordered(QuadOrder target) const {
  if (target == ordering) return *this;
  const Index n = n_modes();
  RealMatrix t = quad_order_permutation(target, n) * quad_order_permutation(ordering, n).transpose();
  return SymplecticUnitary(t * S * t.transpose(), t * d, target);
}

ChannelXY::ChannelXY(RealMatrix X_in, RealMatrix Y_in, RealVector d_in, QuadOrder ordering_in)
    : X(std::move(X_in)), Y(std::move(Y_in)), d(std::move(d_in)), ordering(ordering_in) {
  if (X.rows() != X.cols() || X.rows() % 2 != 0) throw DomainError("X must be 2m x 2m");
  if (Y.rows() != X.rows() || Y.cols() != X.cols()) throw DomainError("Y size mismatch");
  if (d.size() != X.rows()) throw DomainError("d size mismatch");
  const double asym = (Y - Y.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, Y.cwiseAbs().maxCoeff())) {
    throw DomainError("Y must be symmetric");
  }
  Y = ((Y + Y.transpose()) / 2.0).eval();
}

ChannelXY ChannelXY::reordered(QuadOrder target) const {
  if (target == ordering) return *this;
  const Index n = n_modes();
  RealMatrix t = quad_order_permutation(target, n) * quad_order_permutation(ordering, n).transpose();
  return ChannelXY(t * X * t.transpose(), t * Y * t.transpose(), t * d, target);
}

double ChannelXY::cptp_margin(double hbar) const {
  Matrix omega = symplectic_form(n_modes(), ordering).cast<Complex>();
  Matrix m = (2.0 / hbar) * Y.cast<Complex>() + kI * X.cast<Complex>() * omega * X.transpose().cast<Complex>() -
             kI * omega;
  Eigen::SelfAdjointEigenSolver<Matrix> es(((m + m.adjoint()) / 2.0).eval(),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

AbcTriple state_to_abc(const PhaseSpaceState& ps_in) {
  PhaseSpaceState ps = ps_in.reordered(QuadOrder::XXPP);
  const Index n = ps.n_modes();
  Matrix w = w_matrix(n);
  Matrix husimi = ps.sigma.cast<Complex>() / ps.hbar + 0.5 * Matrix::Identity(2 * n, 2 * n);
  Matrix q = w * husimi * w.adjoint();
  Eigen::PartialPivLU<Matrix> lu(q);
  if (std::abs(lu.determinant()) < 1e-14) throw DomainError("Husimi covariance Q is singular");
  Matrix qinv = lu.inverse();
  Matrix x = pauli_x(n);
  Matrix a = x * (Matrix::Identity(2 * n, 2 * n) - qinv);
  Vector beta = (1.0 / std::sqrt(ps.hbar)) * (w * ps.mu.cast<Complex>());
  Vector b = x * (qinv * beta);
  const Complex quad = (beta.adjoint() * (qinv * beta))(0);
  const Complex c = std::exp(-0.5 * quad) / std::sqrt(lu.determinant());
  return AbcTriple(std::move(a), std::move(b), c,
                   WireLayout::density_matrix(static_cast<int>(n)));
}

PhaseSpaceState abc_to_state(const AbcTriple& dm_in, double hbar, QuadOrder ordering) {
  AbcTriple dm = reorder(dm_in, OrderingTag::TypeWise);
  const Index n = dm.dim() / 2;
  for (Index i = 0; i < n; ++i) {
    if (dm.layout()[static_cast<std::size_t>(i)].kind != WireKind::Bra ||
        dm.layout()[static_cast<std::size_t>(n + i)].kind != WireKind::Ket) {
      throw LayoutError("abc_to_state expects a density-matrix layout (bra/ket pairs)");
    }
  }
  Matrix x = pauli_x(n);
  Matrix one = Matrix::Identity(2 * n, 2 * n);
  Eigen::PartialPivLU<Matrix> lu(one - x * dm.A());
  if (std::abs(lu.determinant()) < 1e-14) throw DomainError("1 - XA is singular");
  Matrix q = lu.inverse();
  Matrix w = w_matrix(n);
  Matrix sigma_c = hbar * (w.adjoint() * q * w - 0.5 * one);
  check_real(sigma_c, "covariance");
  Vector beta = q * (x * dm.b());
  Vector mu_c = std::sqrt(hbar) * (w.adjoint() * beta);
  check_real(mu_c, "mean vector");
  PhaseSpaceState out(sigma_c.real(), mu_c.real(), hbar, QuadOrder::XXPP);
  return out.reordered(ordering);
}

AbcTriple unitary_to_abc(const SymplecticUnitary& su_in, double hbar) {
  SymplecticUnitary su = su_in.reordered(QuadOrder::XXPP);
  const Index n = su.n_modes();
  Matrix w = w_matrix(n);
  Matrix sw = w * su.S.cast<Complex>() * w.adjoint();
  Matrix s1 = sw.topLeftCorner(n, n);
  Matrix s2 = sw.topRightCorner(n, n);
  Eigen::PartialPivLU<Matrix> lu(s1.conjugate());
  if (std::abs(lu.determinant()) < 1e-14) {
    throw DomainError("S1 block is singular; Abc form of this unitary is degenerate");
  }
  Matrix s1c_inv = lu.inverse();
  Matrix a(2 * n, 2 * n);
  a.topLeftCorner(n, n) = s2 * s1c_inv;
  a.bottomLeftCorner(n, n) = s1c_inv;
  a.topRightCorner(n, n) = s1c_inv.transpose();
  a.bottomRightCorner(n, n) = -s1c_inv * s2.conjugate();
  Vector gamma = (w * su.d.cast<Complex>()).head(n) / std::sqrt(hbar);
  Vector b(2 * n);
  b.head(n) = gamma - s2 * (s1c_inv * gamma.conjugate());
  b.tail(n) = -s1c_inv * gamma.conjugate();
  RealMatrix sst = su.S * su.S.transpose();
  RealMatrix mid = 0.5 * (sst + RealMatrix::Identity(2 * n, 2 * n));
  const double quad = su.d.dot((sst + RealMatrix::Identity(2 * n, 2 * n)).lu().solve(su.d));
  const double cmag = std::exp(-quad / (2.0 * hbar)) / std::pow(mid.determinant(), 0.25);
  return AbcTriple(std::move(a), std::move(b), cmag, WireLayout::unitary(static_cast<int>(n)));
}

SymplecticUnitary abc_to_unitary(const AbcTriple& u_in, double hbar, QuadOrder ordering) {
  AbcTriple u = reorder(u_in, OrderingTag::OutputInput);
  const Index n = u.dim() / 2;
  Matrix au = u.A();
  const double unit_err =
      (au.adjoint() * au - Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (unit_err > 1e-8) {
    throw DomainError("A matrix is not unitary; object is not a Gaussian unitary");
  }
  Matrix a2 = au.bottomLeftCorner(n, n);  // S1^{*-1}
  Eigen::PartialPivLU<Matrix> lu(a2);
  if (std::abs(lu.determinant()) < 1e-14) throw DomainError("Gamma_U block is singular");
  Matrix s1 = lu.inverse().conjugate();
  Matrix s2 = au.topLeftCorner(n, n) * lu.inverse();
  Matrix sw(2 * n, 2 * n);
  sw.topLeftCorner(n, n) = s1;
  sw.topRightCorner(n, n) = s2;
  sw.bottomLeftCorner(n, n) = s2.conjugate();
  sw.bottomRightCorner(n, n) = s1.conjugate();
  Matrix w = w_matrix(n);
  Matrix s_c = w.adjoint() * sw * w;
  check_real(s_c, "symplectic matrix");
  Vector gamma = -(s1 * u.b().tail(n).conjugate());
  Vector gg(2 * n);
  gg.head(n) = gamma;
  gg.tail(n) = gamma.conjugate();
  Vector d_c = std::sqrt(hbar) * (w.adjoint() * gg);
  check_real(d_c, "displacement");
  SymplecticUnitary out(s_c.real(), d_c.real(), QuadOrder::XXPP);
  return out.reordered(ordering);
}

AbcTriple channel_to_abc(const ChannelXY& ch_in, double hbar) {
  ChannelXY ch = ch_in.reordered(QuadOrder::XXPP);
  const Index m = ch.n_modes();
  const Index n2 = 2 * m;
  Matrix xphi = ch.X.cast<Complex>();
  Matrix xi = 0.5 * (Matrix::Identity(n2, n2) + xphi * xphi.transpose() +
                     (2.0 / hbar) * ch.Y.cast<Complex>());
  Eigen::PartialPivLU<Matrix> lu(xi);
  if (std::abs(lu.determinant()) < 1e-14) throw DomainError("xi block is singular");
  Matrix xi_inv = lu.inverse();

  Matrix mid(2 * n2, 2 * n2);
  mid.topLeftCorner(n2, n2) = Matrix::Identity(n2, n2) - xi_inv;
  mid.topRightCorner(n2, n2) = xi_inv * xphi;
  mid.bottomLeftCorner(n2, n2) = xphi.transpose() * xi_inv;
  mid.bottomRightCorner(n2, n2) = Matrix::Identity(n2, n2) - xphi.transpose() * xi_inv * xphi;

  // L rows produce the type-wise channel variables (out-bra, in-bra, out-ket,
  // in-ket) after the final X swap; columns act on (x_out, p_out, x_in, p_in).
  Matrix l = Matrix::Zero(2 * n2, 2 * n2);
  const double f = 1.0 / std::sqrt(2.0);
  Matrix eye = Matrix::Identity(m, m);
  l.block(0, 0, m, m) = f * eye;
  l.block(0, m, m, m) = kI * f * eye;
  l.block(m, n2, m, m) = f * eye;
  l.block(m, n2 + m, m, m) = -kI * f * eye;
  l.block(n2, 0, m, m) = f * eye;
  l.block(n2, m, m, m) = -kI * f * eye;
  l.block(n2 + m, n2, m, m) = f * eye;
  l.block(n2 + m, n2 + m, m, m) = kI * f * eye;

  Matrix x4 = pauli_x(n2);
  Matrix a = x4 * l * mid * l.adjoint();

  Vector dvec = ch.d.cast<Complex>();
  Vector stacked(2 * n2);
  stacked.head(n2) = xi_inv * dvec;
  stacked.tail(n2) = -xphi.transpose() * (xi_inv * dvec);
  Vector b = (1.0 / std::sqrt(hbar)) * (l.conjugate() * stacked);

  const Complex quad = dvec.transpose() * (xi_inv * dvec);
  const Complex c = std::exp(-quad / (2.0 * hbar)) / std::sqrt(lu.determinant());
  return AbcTriple(std::move(a), std::move(b), c,
                   WireLayout::channel(static_cast<int>(m), OrderingTag::TypeWise));
}

ChannelXY abc_to_channel(const AbcTriple& channel_in, double hbar, QuadOrder ordering) {
  AbcTriple ch = reorder(channel_in, OrderingTag::OutputInput);
  const Index m4 = ch.dim();
  if (m4 % 4 != 0) throw LayoutError("channel triple must have 4 wires per mode");
  const Index n2 = m4 / 2;
  const Index m = n2 / 2;
  Matrix a_out = ch.A().topLeftCorner(n2, n2);
  Matrix gamma_t = ch.A().topRightCorner(n2, n2);  // Gamma^T
  Matrix x = pauli_x(m);
  Matrix one = Matrix::Identity(n2, n2);
  Eigen::PartialPivLU<Matrix> lu(one - x * a_out);
  if (std::abs(lu.determinant()) < 1e-14) throw DomainError("1 - X A_out is singular");
  Matrix inv = lu.inverse();
  Matrix w = w_matrix(m);
  Matrix xphi_c = w.adjoint() * inv * x * gamma_t * x * w;
  check_real(xphi_c, "channel X");
  RealMatrix xphi = xphi_c.real();
  Matrix y_c = w.adjoint() * inv * w - 0.5 * one -
               0.5 * xphi_c * xphi_c.transpose();
  check_real(y_c, "channel Y");
  RealMatrix y = hbar * y_c.real();
  y = ((y + y.transpose()) / 2.0).eval();

  // Displacement from the mean of the channel applied to vacuum.
  AbcTriple vac_dm = to_density_matrix(catalog::vacuum(static_cast<int>(m)));
  std::vector<int> modes;
  for (int i = 0; i < static_cast<int>(m); ++i) modes.push_back(i);
  AbcTriple out_state = apply_channel(channel_in, vac_dm, modes);
  PhaseSpaceState ps = abc_to_state(out_state, hbar);
  ChannelXY out(xphi, y, ps.mu, QuadOrder::XXPP);
  return out.reordered(ordering);
}

ConjugatedDisplacement conjugate_displacement(const ChannelXY& ch_in, const RealVector& v,
                                              double hbar) {
  ChannelXY ch = ch_in.reordered(QuadOrder::XXPP);
  RealMatrix omega = symplectic_form(ch.n_modes(), QuadOrder::XXPP);
  ConjugatedDisplacement out;
  out.v = -omega * ch.X.transpose() * omega * v;
  out.damping = std::exp(-v.dot(ch.Y * v) / (2.0 * hbar * hbar));
  return out;
}

}  // namespace bargmann
