// sdp.hpp — small dense semidefinite-program solver for Hermitian matrix
// variables under affine LMI constraints, sized for low-dimensional bound
// problems (variable dimension up to a few tens of real parameters).

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bargmann/triple.hpp"

namespace bargmann::sdp {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// One affine constraint block S(x) = F0 + sum_i x_i F_i  >= 0 over real
// parameters x. Complex Hermitian data enters through the real embedding
// H -> [[Re H, -Im H], [Im H, Re H]].
struct LmiBlock {
  RealMatrix F0;
  std::vector<RealMatrix> coeffs;  // one per variable, all symmetric
};

RealMatrix real_embedding(const Matrix& hermitian);

// Canonical real parametrization of d x d Hermitian matrices: d diagonal
// units, then (i<j) real-symmetric pairs, then (i<j) imaginary pairs.
std::vector<Matrix> hermitian_basis(Index d);
Matrix hermitian_from_parameters(const RealVector& x, Index d);
RealVector parameters_from_hermitian(const Matrix& z);

// maximize c^T x subject to every LMI block.
struct SdpProblem {
  RealVector objective;
  std::vector<LmiBlock> blocks;

  int variable_count() const { return static_cast<int>(objective.size()); }

  // Adds S(x) = constant + sum_i x_i basis_coeff_i >= 0 given complex
  // Hermitian data; `variable_action` maps each Hermitian basis element of
  // the matrix variable to its coefficient inside this block.
  void add_hermitian_block(const Matrix& constant, const std::vector<Matrix>& variable_action);
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIterations };

std::string to_string(SdpStatus status);

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIterations;
  double value = 0.0;              // c^T x at the last iterate
  RealVector x;                    // optimal parameters
  double gap_estimate = 0.0;       // barrier duality-gap estimate at exit
  double min_residual = 0.0;       // smallest LMI eigenvalue at exit
  int newton_iterations = 0;
  double feasibility_margin = 0.0; // phase-1 margin (diagnostic)
};

struct SdpOptions {
  double gap_tolerance = 1e-8;
  double newton_tolerance = 1e-11;
  int max_newton_iterations = 4000;
  double t_initial = 1.0;
  double t_growth = 4.0;  // centering parameter 0.25
};

// Deterministic logarithmic-barrier path-following solve. Facial reduction is
// applied to every block first (directions annihilated by the whole pencil
// are projected out), then a phase-1 max-margin search produces the strictly
// feasible start.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace bargmann::sdp
