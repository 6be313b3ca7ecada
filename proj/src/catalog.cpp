#include "bargmann/catalog.hpp"

#include <cmath>
#include <numbers>

#include "bargmann/errors.hpp"

namespace bargmann::catalog {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix pauli_x(Index n) {
  Matrix x = Matrix::Zero(2 * n, 2 * n);
  x.topRightCorner(n, n) = Matrix::Identity(n, n);
  x.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return x;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

}  // namespace

AbcTriple vacuum(int n_modes) {
  require(n_modes >= 1, "vacuum: n_modes must be positive");
  return AbcTriple(Matrix::Zero(n_modes, n_modes), Vector::Zero(n_modes), 1.0,
                   WireLayout::ket(n_modes));
}

AbcTriple coherent(Complex alpha) {
  Vector b(1);
  b << alpha;
  return AbcTriple(Matrix::Zero(1, 1), b, std::exp(-0.5 * std::norm(alpha)),
                   WireLayout::ket(1));
}

AbcTriple bargmann_eigenstate(Complex alpha) {
  Vector b(1);
  b << alpha;
  return AbcTriple(Matrix::Zero(1, 1), b, 1.0, WireLayout::ket(1));
}

AbcTriple squeezed_vacuum(double r, double phi) {
  require(r >= 0.0, "squeezed_vacuum: r must be nonnegative");
  Matrix A(1, 1);
  A << -std::exp(kI * phi) * std::tanh(r);
  return AbcTriple(A, Vector::Zero(1), std::sqrt(1.0 / std::cosh(r)), WireLayout::ket(1));
}

AbcTriple displaced_squeezed(Complex alpha, double r, double phi) {
  require(r >= 0.0, "displaced_squeezed: r must be nonnegative");
  const Complex eit = std::exp(kI * phi) * std::tanh(r);
  Matrix A(1, 1);
  A << -eit;
  Vector b(1);
  b << alpha + std::conj(alpha) * eit;
  const Complex c =
      std::exp(-0.5 * std::norm(alpha) - 0.5 * std::conj(alpha) * std::conj(alpha) * eit) /
      std::sqrt(std::cosh(r));
  return AbcTriple(A, b, c, WireLayout::ket(1));
}

AbcTriple two_mode_squeezed_vacuum(double r, double phi) {
  require(r >= 0.0, "two_mode_squeezed_vacuum: r must be nonnegative");
  Matrix A = std::exp(kI * phi) * std::tanh(r) * pauli_x(1);
  return AbcTriple(A, Vector::Zero(2), 1.0 / std::cosh(r), WireLayout::ket(2));
}

AbcTriple quadrature_eigenstate(double x, double phi, double hbar) {
  require(hbar > 0.0, "quadrature_eigenstate: hbar must be positive");
  Matrix A(1, 1);
  A << -std::exp(2.0 * kI * phi);
  Vector b(1);
  b << std::sqrt(2.0 / hbar) * x * std::exp(kI * phi);
  const Complex c = std::exp(-x * x / (2.0 * hbar)) /
                    std::pow(std::numbers::pi * hbar, 0.25);
  return AbcTriple(A, b, c, WireLayout::ket(1));
}

AbcTriple thermal(double nbar) {
  require(nbar >= 0.0, "thermal: nbar must be nonnegative");
  Matrix A = (nbar / (nbar + 1.0)) * pauli_x(1);
  return AbcTriple(A, Vector::Zero(2), 1.0 / (nbar + 1.0),
                   WireLayout::density_matrix(1));
}

AbcTriple identity_gate(int n_modes) {
  require(n_modes >= 1, "identity_gate: n_modes must be positive");
  return AbcTriple(pauli_x(n_modes), Vector::Zero(2 * n_modes), 1.0,
                   WireLayout::unitary(n_modes));
}

AbcTriple rotation(double theta) {
  Matrix A = std::exp(kI * theta) * pauli_x(1);
  return AbcTriple(A, Vector::Zero(2), 1.0, WireLayout::unitary(1));
}

AbcTriple displacement(Complex alpha) {
  Vector b(2);
  b << alpha, -std::conj(alpha);
  return AbcTriple(pauli_x(1), b, std::exp(-0.5 * std::norm(alpha)), WireLayout::unitary(1));
}

AbcTriple squeezer(double r, double phi) {
  require(r >= 0.0, "squeezer: r must be nonnegative");
  const Complex eit = std::exp(kI * phi) * std::tanh(r);
  const double sech = 1.0 / std::cosh(r);
  Matrix A(2, 2);
  A << -eit, sech, sech, std::conj(eit);
  return AbcTriple(A, Vector::Zero(2), 1.0 / std::sqrt(std::cosh(r)), WireLayout::unitary(1));
}

AbcTriple beamsplitter(double theta, double phi) {
  Matrix u(2, 2);
  const Complex emip = std::exp(-kI * phi);
  const Complex eip = std::exp(kI * phi);
  u << std::cos(theta), -emip * std::sin(theta), eip * std::sin(theta), std::cos(theta);
  return interferometer(u);
}

AbcTriple interferometer(const Matrix& u) {
  const Index n = u.rows();
  require(u.cols() == n, "interferometer: U must be square");
  const double unitarity = (u.adjoint() * u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  require(unitarity <= 1e-8, "interferometer: U is not unitary");
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n) = u;
  A.bottomLeftCorner(n, n) = u.transpose();
  return AbcTriple(A, Vector::Zero(2 * n), 1.0, WireLayout::unitary(static_cast<int>(n)));
}

AbcTriple real_interferometer(const Eigen::MatrixXd& v) {
  return interferometer(v.cast<Complex>());
}

AbcTriple two_mode_squeezer(double r, double phi) {
  require(r >= 0.0, "two_mode_squeezer: r must be nonnegative");
  const Complex eit = std::exp(kI * phi) * std::tanh(r);
  const double sech = 1.0 / std::cosh(r);
  // The input block is -(A_out)^*; the unitarity of A pins the sign.
  Matrix A = Matrix::Zero(4, 4);
  A(0, 1) = eit;
  A(1, 0) = eit;
  A(2, 3) = -std::conj(eit);
  A(3, 2) = -std::conj(eit);
  A(0, 2) = sech;
  A(2, 0) = sech;
  A(1, 3) = sech;
  A(3, 1) = sech;
  return AbcTriple(A, Vector::Zero(4), 1.0 / std::cosh(r), WireLayout::unitary(2));
}

AbcTriple loss_channel(double eta) {
  require(eta >= 0.0 && eta <= 1.0, "loss_channel: eta must lie in [0, 1]");
  const double rt = std::sqrt(eta);
  // output-input order (out-bra, out-ket, in-bra, in-ket)
  Matrix A = Matrix::Zero(4, 4);
  A(0, 2) = rt;
  A(2, 0) = rt;
  A(1, 3) = rt;
  A(3, 1) = rt;
  A(2, 3) = 1.0 - eta;
  A(3, 2) = 1.0 - eta;
  return AbcTriple(A, Vector::Zero(4), 1.0, WireLayout::channel(1));
}

AbcTriple amplifier_channel(double gain) {
  require(gain >= 1.0, "amplifier_channel: gain must be >= 1");
  const double invrt = 1.0 / std::sqrt(gain);
  Matrix A = Matrix::Zero(4, 4);
  A(0, 1) = 1.0 - 1.0 / gain;
  A(1, 0) = 1.0 - 1.0 / gain;
  A(0, 2) = invrt;
  A(2, 0) = invrt;
  A(1, 3) = invrt;
  A(3, 1) = invrt;
  return AbcTriple(A, Vector::Zero(4), 1.0 / gain, WireLayout::channel(1));
}

AbcTriple identity_channel(int n_modes) {
  require(n_modes >= 1, "identity_channel: n_modes must be positive");
  const Index n = n_modes;
  // out-bra couples in-bra, out-ket couples in-ket.
  Matrix A = Matrix::Zero(4 * n, 4 * n);
  // output-input order: [out-bra (n), out-ket (n), in-bra (n), in-ket (n)]
  A.block(0, 2 * n, n, n) = Matrix::Identity(n, n);
  A.block(2 * n, 0, n, n) = Matrix::Identity(n, n);
  A.block(n, 3 * n, n, n) = Matrix::Identity(n, n);
  A.block(3 * n, n, n, n) = Matrix::Identity(n, n);
  return AbcTriple(A, Vector::Zero(4 * n), 1.0, WireLayout::channel(n_modes));
}

AbcTriple fock_damping(double beta) {
  require(beta >= 0.0, "fock_damping: beta must be nonnegative");
  Matrix A = std::exp(-beta) * pauli_x(1);
  return AbcTriple(A, Vector::Zero(2), 1.0, WireLayout::unitary(1));
}

AbcTriple loss_kraus(double eta, int kraus_mode) {
  require(eta >= 0.0 && eta <= 1.0, "loss_kraus: eta must lie in [0, 1]");
  require(kraus_mode != 0, "loss_kraus: the Kraus index needs a mode label other than 0");
  // Beamsplitter with phi = 0, theta = arcsin(sqrt(1-eta)), first-mode input
  // removed; variable order (kraus index z, out w, in v).
  Matrix A = Matrix::Zero(3, 3);
  A(0, 2) = -std::sqrt(1.0 - eta);
  A(2, 0) = -std::sqrt(1.0 - eta);
  A(1, 2) = std::sqrt(eta);
  A(2, 1) = std::sqrt(eta);
  std::vector<Wire> wires{{kraus_mode, WireKind::Ket}, {0, WireKind::Ket}, {0, WireKind::Bra}};
  return AbcTriple(A, Vector::Zero(3), 1.0, WireLayout(std::move(wires)));
}

AbcTriple quadrature_kernel(double phi, double hbar, int n_modes) {
  require(hbar > 0.0, "quadrature_kernel: hbar must be positive");
  const Index n = n_modes;
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  A.topLeftCorner(n, n) = -(1.0 / hbar) * Matrix::Identity(n, n);
  A.topRightCorner(n, n) = std::exp(-kI * phi) * std::sqrt(2.0 / hbar) * Matrix::Identity(n, n);
  A.bottomLeftCorner(n, n) = A.topRightCorner(n, n);
  A.bottomRightCorner(n, n) = -std::exp(-2.0 * kI * phi) * Matrix::Identity(n, n);
  const Complex c = std::pow(std::numbers::pi * hbar, -0.25 * n);
  std::vector<Wire> wires;
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutKet});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InKet});
  return AbcTriple(A, Vector::Zero(2 * n), c, WireLayout(std::move(wires)));
}

AbcTriple stratonovich_weyl_kernel(double s, int n_modes) {
  require(s != 1.0, "stratonovich_weyl_kernel: s = 1 is singular");
  const Index n = n_modes;
  Matrix A = Matrix::Zero(4 * n, 4 * n);
  const double f = 2.0 / (s - 1.0);
  A.topLeftCorner(2 * n, 2 * n) = f * pauli_x(n);
  A.topRightCorner(2 * n, 2 * n) = -f * Matrix::Identity(2 * n, 2 * n);
  A.bottomLeftCorner(2 * n, 2 * n) = -f * Matrix::Identity(2 * n, 2 * n);
  A.bottomRightCorner(2 * n, 2 * n) = f * 0.5 * (s + 1.0) * pauli_x(n);
  const Complex c = 2.0 / (std::pow(std::numbers::pi, n_modes) *
                           std::pow(std::abs(s - 1.0), n_modes));
  std::vector<Wire> wires;
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutKet});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutBra});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InBra});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InKet});
  return AbcTriple(A, Vector::Zero(4 * n), c, WireLayout(std::move(wires)));
}

AbcTriple characteristic_kernel(double s, int n_modes) {
  const Index n = n_modes;
  Matrix A = Matrix::Zero(4 * n, 4 * n);
  Matrix omega = Matrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Matrix::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  A.topLeftCorner(2 * n, 2 * n) = 0.5 * (s - 1.0) * pauli_x(n);
  A.topRightCorner(2 * n, 2 * n) = omega.transpose();
  A.bottomLeftCorner(2 * n, 2 * n) = omega;
  A.bottomRightCorner(2 * n, 2 * n) = pauli_x(n);
  std::vector<Wire> wires;
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutKet});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutBra});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InBra});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InKet});
  return AbcTriple(A, Vector::Zero(4 * n), 1.0, WireLayout(std::move(wires)));
}

namespace {

double get(const std::map<std::string, double>& params, const std::string& key,
           std::optional<double> fallback = std::nullopt) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw DomainError("missing parameter '" + key + "'");
}

}  // namespace

AbcTriple build(const std::string& name, const std::map<std::string, double>& params,
                double hbar) {
  if (name == "vacuum") return vacuum(static_cast<int>(get(params, "n", 1.0)));
  if (name == "coherent") {
    return coherent({get(params, "re", 0.0), get(params, "im", 0.0)});
  }
  if (name == "squeezed_vacuum") {
    return squeezed_vacuum(get(params, "r"), get(params, "phi", 0.0));
  }
  if (name == "displaced_squeezed") {
    return displaced_squeezed({get(params, "re", 0.0), get(params, "im", 0.0)},
                              get(params, "r"), get(params, "phi", 0.0));
  }
  if (name == "tmsv") {
    return two_mode_squeezed_vacuum(get(params, "r"), get(params, "phi", 0.0));
  }
  if (name == "quadrature_eigenstate") {
    return quadrature_eigenstate(get(params, "x"), get(params, "phi", 0.0), hbar);
  }
  if (name == "thermal") return thermal(get(params, "nbar"));
  if (name == "identity") return identity_gate(static_cast<int>(get(params, "n", 1.0)));
  if (name == "rotation") return rotation(get(params, "theta"));
  if (name == "displacement") {
    return displacement({get(params, "re", 0.0), get(params, "im", 0.0)});
  }
  if (name == "squeezer") return squeezer(get(params, "r"), get(params, "phi", 0.0));
  if (name == "beamsplitter") {
    return beamsplitter(get(params, "theta"), get(params, "phi", 0.0));
  }
  if (name == "two_mode_squeezer") {
    return two_mode_squeezer(get(params, "r"), get(params, "phi", 0.0));
  }
  if (name == "loss") return loss_channel(get(params, "eta"));
  if (name == "amplifier") return amplifier_channel(get(params, "g"));
  if (name == "identity_channel") {
    return identity_channel(static_cast<int>(get(params, "n", 1.0)));
  }
  if (name == "fock_damping") return fock_damping(get(params, "beta"));
  if (name == "loss_kraus") return loss_kraus(get(params, "eta"));
  if (name == "quadrature_kernel") {
    return quadrature_kernel(get(params, "phi", 0.0), hbar,
                             static_cast<int>(get(params, "n", 1.0)));
  }
  if (name == "stratonovich_weyl") {
    return stratonovich_weyl_kernel(get(params, "s"), static_cast<int>(get(params, "n", 1.0)));
  }
  if (name == "characteristic_kernel") {
    return characteristic_kernel(get(params, "s"), static_cast<int>(get(params, "n", 1.0)));
  }
  throw DomainError("unknown catalog name '" + name + "'");
}

std::vector<std::string> names() {
  return {"vacuum",        "coherent",         "squeezed_vacuum", "displaced_squeezed",
          "tmsv",          "quadrature_eigenstate", "thermal",    "identity",
          "rotation",      "displacement",     "squeezer",        "beamsplitter",
          "two_mode_squeezer", "loss",         "amplifier",       "identity_channel",
          "fock_damping",  "loss_kraus",       "quadrature_kernel", "stratonovich_weyl",
          "characteristic_kernel"};
}

}  // namespace bargmann::catalog
