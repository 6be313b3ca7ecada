// catalog.hpp — Abc triples of standard Gaussian states, unitaries, channels
// and representation kernels.

#pragma once

#include <map>
#include <string>

#include "bargmann/triple.hpp"

namespace bargmann::catalog {

// --- states ---------------------------------------------------------------

AbcTriple vacuum(int n_modes = 1);
AbcTriple coherent(Complex alpha);
AbcTriple bargmann_eigenstate(Complex alpha);  // e^{|alpha|^2/2} |alpha>
AbcTriple squeezed_vacuum(double r, double phi = 0.0);
AbcTriple displaced_squeezed(Complex alpha, double r, double phi = 0.0);
AbcTriple two_mode_squeezed_vacuum(double r, double phi = 0.0);  // modes 0,1
AbcTriple quadrature_eigenstate(double x, double phi = 0.0, double hbar = 2.0);
AbcTriple thermal(double nbar);  // density matrix

// --- unitaries (output-input order: kets then bras) ------------------------

AbcTriple identity_gate(int n_modes = 1);
AbcTriple rotation(double theta);
AbcTriple displacement(Complex alpha);
AbcTriple squeezer(double r, double phi = 0.0);
AbcTriple beamsplitter(double theta, double phi = 0.0);  // modes 0,1
AbcTriple interferometer(const Matrix& u);               // U in U(N)
AbcTriple real_interferometer(const Eigen::MatrixXd& v); // V in O(N)
AbcTriple two_mode_squeezer(double r, double phi = 0.0); // modes 0,1

// --- channels (output-input order) -----------------------------------------

AbcTriple loss_channel(double eta);        // transmissivity eta in [0,1]
AbcTriple amplifier_channel(double gain);  // gain g >= 1
AbcTriple identity_channel(int n_modes = 1);
AbcTriple fock_damping(double beta);       // operator e^{-beta N}
// Continuous Kraus operator of the loss channel; wires: Ket(aux mode
// `kraus_mode`) for the Kraus index, then (Ket, Bra) on mode 0.
AbcTriple loss_kraus(double eta, int kraus_mode = 1);

// --- representation kernels -------------------------------------------------

// Bargmann -> quadrature kernel at angle phi. Wires: OutKet(i) for the real
// quadrature slots, InBra(i) for the Bargmann slots to contract with a ket.
AbcTriple quadrature_kernel(double phi, double hbar = 2.0, int n_modes = 1);
// Stratonovich-Weyl kernel Delta_s; s = 1 is singular.
AbcTriple stratonovich_weyl_kernel(double s, int n_modes = 1);
// Characteristic-function kernel T_s.
AbcTriple characteristic_kernel(double s, int n_modes = 1);

// --- name-based access (CLI) ------------------------------------------------

// Builds a catalog object by name with named parameters. Unknown names or
// out-of-domain parameters raise DomainError.
AbcTriple build(const std::string& name, const std::map<std::string, double>& params,
                double hbar = 2.0);

std::vector<std::string> names();

}  // namespace bargmann::catalog
