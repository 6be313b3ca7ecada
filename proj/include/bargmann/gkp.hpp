// gkp.hpp — effective-squeezing figures of merit, channel-factoring and SDP
// upper bounds for heralded GKP state quality, and staircase circuits.

#pragma once

#include <optional>
#include <vector>

#include "bargmann/fock.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/sdp.hpp"
#include "bargmann/triple.hpp"

namespace bargmann::gkp {

struct EffectiveSqueezing {
  double sigma_q2 = 0.0;
  double sigma_p2 = 0.0;
  double sigma_sym2 = 0.0;  // (sigma_q2 + sigma_p2) / 2
  double db_sym = 0.0;      // -10 log10(sigma_sym2); vacuum is 0 dB
};

// Sensor-state stabilizer expectations of a Gaussian state (closed form).
EffectiveSqueezing effective_squeezing(const PhaseSpaceState& state);

// Same figure for a single-mode finite Fock vector (exact path).
EffectiveSqueezing effective_squeezing(const FockArray& state, double hbar);

// |tr(rho D_v)| <= exp(-v^T Y v / (2 hbar^2)) for a factored channel.
double channel_factor_bound(const Eigen::Matrix2d& y, const Eigen::Vector2d& v, double hbar);

// Lower bound on sigma_sym^2 from a factored channel's Y matrix.
double sigma_sym2_bound_from_y(const Eigen::MatrixXd& y, double hbar);

enum class FigureOfMerit { DirectionQ, DirectionP, Symmetric };

struct BoundResult {
  double objective = 0.0;           // bound on sigma^2 for the chosen figure
  Matrix z;                         // optimal Hermitian variable (2m x 2m)
  double bound_on_abs_trace = 0.0;  // exp(-pi/2 * objective)
  double effective_squeezing_bound_db = 0.0;  // -10 log10(objective)
  double dual_value = 0.0;
  double gap = 0.0;
  double primal_min_residual = 0.0;
  double dual_min_residual = 0.0;
  sdp::SdpStatus status = sdp::SdpStatus::MaxIterations;
};

struct BoundOptions {
  FigureOfMerit figure = FigureOfMerit::Symmetric;
  std::optional<Eigen::MatrixXd> custom_m;  // overrides `figure` when set
  sdp::SdpOptions solver;
  bool solve_dual = true;
};

// Upper bound on the effective squeezing achievable by post-selecting the
// last n modes of a state with covariance `sigma` (first m modes kept).
BoundResult sdp_bound(const PhaseSpaceState& sigma, int m, const BoundOptions& options = {});

struct StaircaseSpec {
  std::vector<double> squeezings_db;  // length M >= 2
  std::vector<double> thetas;         // length M - 1
  double loss_eta = 0.0;              // loss fraction in [0, 1] on heralded modes
};

struct StaircaseState {
  AbcTriple dm;          // exact Abc density matrix, modes 0..M-1
  PhaseSpaceState cov;   // covariance (xxpp)
};

// Squeezed inputs with alternating signs chained by beamsplitters in the
// staircase pattern; loss on every heralded mode just before measurement.
StaircaseState build_staircase(const StaircaseSpec& spec, double hbar = 2.0);

// Stellar-route bound for the 2-mode staircase: factor a channel off the
// candidate mode via the pure-core decomposition and apply the Y bound.
double stellar_bound_sigma_sym2(const AbcTriple& dm, double hbar = 2.0);

struct InvarianceReport {
  std::vector<int> widths;
  std::vector<double> objectives;
  double max_relative_difference = 0.0;
  bool all_optimal = true;
};

// Prop-8 check: bounds for staircases of width M sharing (xi1, xi2, theta1,
// eta) are equal.
InvarianceReport staircase_invariance_check(const StaircaseSpec& base,
                                            const std::vector<std::vector<double>>& extra_thetas,
                                            double hbar = 2.0);

struct SweepRow {
  double eta = 0.0;
  double bound_db_sdp = 0.0;
  double bound_db_stellar = 0.0;
  double gap = 0.0;
};

// Loss sweep of the 2-mode staircase comparing SDP and stellar bounds.
std::vector<SweepRow> loss_sweep(const StaircaseSpec& base, double eta_min, double eta_max,
                                 int points, double hbar = 2.0);

}  // namespace bargmann::gkp
