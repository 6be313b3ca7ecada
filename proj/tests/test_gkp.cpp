#include <doctest.h>

#include <numbers>
#include <random>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/gkp.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/physicality.hpp"
#include "bargmann/stellar.hpp"
#include "oracles.hpp"

using namespace bargmann;

TEST_SUITE("gkp") {
  TEST_CASE("effective squeezing of the vacuum is 1 (0 dB)") {
    gkp::EffectiveSqueezing eff = gkp::effective_squeezing(PhaseSpaceState::vacuum(1));
    CHECK(eff.sigma_q2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eff.sigma_p2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eff.db_sym == doctest::Approx(0.0));
  }

  TEST_CASE("squeezed vacuum: sigma_p^2 = e^{-2r}, sigma_q^2 = e^{2r}") {
    const double hbar = 2.0, r = 0.6;
    Eigen::MatrixXd sigma(2, 2);
    sigma << (hbar / 2.0) * std::exp(-2 * r), 0, 0, (hbar / 2.0) * std::exp(2 * r);
    gkp::EffectiveSqueezing eff =
        gkp::effective_squeezing(PhaseSpaceState(sigma, Eigen::VectorXd::Zero(2), hbar));
    CHECK(eff.sigma_p2 == doctest::Approx(std::exp(-2 * r)).epsilon(1e-12));
    CHECK(eff.sigma_q2 == doctest::Approx(std::exp(2 * r)).epsilon(1e-12));
  }

  TEST_CASE("a pi/2 rotation swaps the two directions") {
    const double hbar = 2.0, r = 0.4;
    Eigen::MatrixXd sigma(2, 2);
    sigma << (hbar / 2.0) * std::exp(-2 * r), 0, 0, (hbar / 2.0) * std::exp(2 * r);
    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    gkp::EffectiveSqueezing a =
        gkp::effective_squeezing(PhaseSpaceState(sigma, Eigen::VectorXd::Zero(2), hbar));
    gkp::EffectiveSqueezing b = gkp::effective_squeezing(
        PhaseSpaceState(rot * sigma * rot.transpose(), Eigen::VectorXd::Zero(2), hbar));
    CHECK(a.sigma_q2 == doctest::Approx(b.sigma_p2));
    CHECK(a.sigma_p2 == doctest::Approx(b.sigma_q2));
  }

  TEST_CASE("finite-Fock effective squeezing matches the Gaussian closed form") {
    const double hbar = 2.0;
    FockArray vac(std::vector<Index>{1});
    vac.data()[0] = 1.0;
    gkp::EffectiveSqueezing eff = gkp::effective_squeezing(vac, hbar);
    CHECK(eff.sigma_sym2 == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("channel factor bound golden values") {
    const double hbar = 2.0;
    Eigen::Vector2d v(0.0, std::sqrt(2.0 * std::numbers::pi * hbar));
    CHECK(gkp::channel_factor_bound(Eigen::Matrix2d::Zero(), v, hbar) == doctest::Approx(1.0));
    const double eta = 0.8;
    Eigen::Matrix2d y = (hbar / 2.0) * (1 - eta) * Eigen::Matrix2d::Identity();
    CHECK(gkp::channel_factor_bound(y, v, hbar) ==
          doctest::Approx(std::exp(-std::numbers::pi * (1 - eta) / 2.0)).epsilon(1e-12));
  }

  TEST_CASE("sdp_bound on a decoupled product state reaches the analytic optimum") {
    const double hbar = 2.0;
    // vacuum (x) squeezed: the heralded block is pure -> facial reduction path
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(4, 4);
    sigma.topLeftCorner(2, 2) = (hbar / 2.0) * Eigen::MatrixXd::Identity(2, 2);
    sigma(2, 2) = (hbar / 2.0) * std::exp(-1.2);
    sigma(3, 3) = (hbar / 2.0) * std::exp(1.2);
    PhaseSpaceState ps(sigma, Eigen::VectorXd::Zero(4), hbar, QuadOrder::XPXP);
    gkp::BoundOptions opts;
    opts.figure = gkp::FigureOfMerit::DirectionP;
    gkp::BoundResult res = gkp::sdp_bound(ps, 1, opts);
    CHECK(res.status == sdp::SdpStatus::Optimal);
    // objective is sigma_p^2 bound = 2 Z_22 / hbar at Z = (hbar/2) 1 -> 1.0
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.gap < 1e-7);
    CHECK(res.bound_on_abs_trace ==
          doctest::Approx(std::exp(-std::numbers::pi / 2.0)).epsilon(1e-7));
    // symmetric figure on the vacuum corner gives 0 dB
    gkp::BoundOptions sym;
    sym.figure = gkp::FigureOfMerit::Symmetric;
    gkp::BoundResult res2 = gkp::sdp_bound(ps, 1, sym);
    CHECK(res2.objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(res2.effective_squeezing_bound_db) < 1e-6);
  }

  TEST_CASE("staircase state: Abc and covariance paths agree") {
    gkp::StaircaseSpec spec{{15.0, 15.0}, {0.4}, 0.03};
    gkp::StaircaseState st = gkp::build_staircase(spec);
    PhaseSpaceState from_abc = abc_to_state(st.dm, 2.0);
    CHECK((from_abc.sigma - st.cov.sigma).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(from_abc.mu.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(trace(st.dm) - 1.0) < 1e-9);
    PhysicalityReport rep = check_density_matrix(st.dm);
    CHECK(rep.positive);
  }

  TEST_CASE("lossless staircase is pure up to the physicality boundary") {
    gkp::StaircaseSpec spec{{10.0, 10.0}, {0.5}, 0.0};
    gkp::StaircaseState st = gkp::build_staircase(spec);
    CHECK(st.cov.physicality_margin() > -1e-9);
    // purity: det(2 Sigma / hbar) = 1
    CHECK((2.0 / 2.0 * st.cov.sigma / 1.0).determinant() ==
          doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("headline staircase point: 15 dB, theta 0.4, 3% loss") {
    gkp::StaircaseSpec spec{{15.0, 15.0}, {0.4}, 0.03};
    gkp::StaircaseState st = gkp::build_staircase(spec);
    gkp::BoundResult res = gkp::sdp_bound(st.cov, 1);
    CHECK(res.status == sdp::SdpStatus::Optimal);
    // closed-form face optimum for this instance (rank-one face)
    CHECK(res.effective_squeezing_bound_db == doctest::Approx(10.8859).epsilon(1e-3));
    CHECK(res.gap < 1e-7);
    CHECK(res.primal_min_residual > -1e-8);
    // stellar route coincides
    const double stellar_sigma2 = gkp::stellar_bound_sigma_sym2(st.dm);
    CHECK(stellar_sigma2 == doctest::Approx(res.objective).epsilon(1e-5));
  }

  TEST_CASE("staircase invariance for M = 2, 3") {
    gkp::StaircaseSpec base{{15.0, 15.0}, {0.4}, 0.05};
    gkp::InvarianceReport rep = gkp::staircase_invariance_check(base, {{0.7}, {0.7, 0.3}});
    CHECK(rep.all_optimal);
    CHECK(rep.max_relative_difference < 1e-6);
  }

  TEST_CASE("bound decreases monotonically with loss") {
    gkp::StaircaseSpec base{{15.0, 15.0}, {0.4}, 0.0};
    std::vector<gkp::SweepRow> rows = gkp::loss_sweep(base, 0.01, 0.15, 8);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].bound_db_sdp <= rows[i - 1].bound_db_sdp + 1e-9);
      CHECK(std::abs(rows[i].bound_db_sdp - rows[i].bound_db_stellar) <
            1e-4 * std::abs(rows[i].bound_db_sdp));
    }
  }

  TEST_CASE("loss sweeps are deterministic across runs") {
    gkp::StaircaseSpec base{{15.0, 15.0}, {0.4}, 0.0};
    std::vector<gkp::SweepRow> a = gkp::loss_sweep(base, 0.02, 0.1, 4);
    std::vector<gkp::SweepRow> b = gkp::loss_sweep(base, 0.02, 0.1, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].bound_db_sdp == b[i].bound_db_sdp);
      CHECK(a[i].bound_db_stellar == b[i].bound_db_stellar);
      CHECK(a[i].gap == b[i].gap);
    }
  }

  TEST_CASE("heralding onto random Gaussian kets never beats the SDP bound") {
    std::mt19937 rng(2718);
    const double hbar = 2.0;
    Eigen::VectorXd v(2);
    v << 0.0, std::sqrt(2.0 * std::numbers::pi * hbar);
    RealMatrix omega = symplectic_form(1);
    gkp::BoundOptions opts;
    opts.figure = gkp::FigureOfMerit::DirectionP;
    for (int trial = 0; trial < 20; ++trial) {
      // random mixed 1+1-mode state
      AbcTriple rho = oracles::random_mixed_dm(2, rng, 1, 0.7);
      gkp::BoundResult bound = gkp::sdp_bound(abc_to_state(rho, hbar), 1, opts);
      if (bound.status != sdp::SdpStatus::Optimal) continue;
      // random Gaussian heralding projection on mode 1
      AbcTriple phi = oracles::random_pure_ket(1, rng, 0.6).relabeled(
          [](const Wire& w) { return Wire{1, w.kind}; });
      AbcTriple bra = phi.adjoint();
      ContractionPlan plan = ContractionPlan::by_wires(
          bra, rho, {{{1, WireKind::Bra}, {1, WireKind::Ket}}});
      AbcTriple half = contract(bra, rho, plan);
      ContractionPlan plan2 = ContractionPlan::by_wires(
          half, phi, {{{1, WireKind::Bra}, {1, WireKind::Ket}}});
      AbcTriple heralded = contract(half, phi, plan2);
      const Complex tr = trace(heralded);
      if (std::abs(tr) < 1e-12) continue;
      PhaseSpaceState out = abc_to_state(heralded.with_c(heralded.c() / tr), hbar);
      Eigen::VectorXd w = omega * v;
      const double abs_trace = std::exp(-w.dot(out.sigma * w) / (2.0 * hbar * hbar));
      CHECK(abs_trace <= bound.bound_on_abs_trace + 1e-7);
    }
  }
}
