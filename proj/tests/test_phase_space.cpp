#include <doctest.h>

#include <numbers>
#include <random>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/physicality.hpp"
#include "oracles.hpp"

using namespace bargmann;

namespace {

double triple_distance(const AbcTriple& a, const AbcTriple& b) {
  AbcTriple bb = reorder(b, a.layout());
  double d = std::abs(a.c() - bb.c());
  if (a.dim() > 0) {
    d = std::max(d, (a.A() - bb.A()).cwiseAbs().maxCoeff());
    d = std::max(d, (a.b() - bb.b()).cwiseAbs().maxCoeff());
  }
  return d;
}

PhaseSpaceState random_physical_state(int n, std::mt19937& rng) {
  AbcTriple dm = oracles::random_mixed_dm(n, rng, 1, 0.8);
  return abc_to_state(dm, 2.0);
}

}  // namespace

TEST_SUITE("phase_space") {
  TEST_CASE("vacuum covariance gives the vacuum triple") {
    PhaseSpaceState vac = PhaseSpaceState::vacuum(1);
    AbcTriple t = state_to_abc(vac);
    CHECK(t.A().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(t.b().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(t.c() - 1.0) < 1e-14);
  }

  TEST_CASE("thermal covariance matches the catalog thermal triple") {
    const double hbar = 2.0;
    const double nbar = 1.7;
    Eigen::MatrixXd sigma = hbar * (nbar + 0.5) * Eigen::MatrixXd::Identity(2, 2);
    PhaseSpaceState ps(sigma, Eigen::VectorXd::Zero(2), hbar);
    AbcTriple t = state_to_abc(ps);
    CHECK(triple_distance(t, catalog::thermal(nbar)) < 1e-12);
    // and back
    PhaseSpaceState back = abc_to_state(catalog::thermal(nbar), hbar);
    CHECK((back.sigma - sigma).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("squeezed vacuum covariance matches the squeezed dm triple") {
    const double hbar = 2.0, r = 0.9;
    Eigen::MatrixXd sigma(2, 2);
    sigma << hbar / 2.0 * std::exp(-2 * r), 0.0, 0.0, hbar / 2.0 * std::exp(2 * r);
    AbcTriple t = state_to_abc(PhaseSpaceState(sigma, Eigen::VectorXd::Zero(2), hbar));
    AbcTriple expect = to_density_matrix(catalog::squeezed_vacuum(r));
    CHECK(triple_distance(t, expect) < 1e-12);
  }

  TEST_CASE("coherent state mean round trip") {
    const double hbar = 2.0;
    Complex alpha{0.45, -0.7};
    AbcTriple dm = to_density_matrix(catalog::coherent(alpha));
    PhaseSpaceState ps = abc_to_state(dm, hbar);
    CHECK(ps.mu(0) == doctest::Approx(std::sqrt(2.0 * hbar) * alpha.real()));
    CHECK(ps.mu(1) == doctest::Approx(std::sqrt(2.0 * hbar) * alpha.imag()));
    CHECK(triple_distance(state_to_abc(ps), dm) < 1e-11);
  }

  TEST_CASE("unitary golden values") {
    const double hbar = 2.0;
    // identity
    SymplecticUnitary eye(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
    CHECK(triple_distance(unitary_to_abc(eye, hbar), catalog::identity_gate(1)) < 1e-12);
    // squeezer diag(e^-r, e^r)
    const double r = 0.75;
    Eigen::MatrixXd s(2, 2);
    s << std::exp(-r), 0.0, 0.0, std::exp(r);
    AbcTriple sq = unitary_to_abc(SymplecticUnitary(s, Eigen::VectorXd::Zero(2)), hbar);
    CHECK(triple_distance(sq, catalog::squeezer(r, 0.0)) < 1e-12);
    // rotation
    const double th = 0.6;
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    AbcTriple rott = unitary_to_abc(SymplecticUnitary(rot, Eigen::VectorXd::Zero(2)), hbar);
    CHECK(triple_distance(rott, catalog::rotation(th)) < 1e-12);
  }

  TEST_CASE("displacement gate round trips through the symplectic form") {
    const double hbar = 2.0;
    Complex alpha{0.3, -0.55};
    AbcTriple d = catalog::displacement(alpha);
    SymplecticUnitary su = abc_to_unitary(d, hbar);
    CHECK((su.S - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(su.d(0) == doctest::Approx(std::sqrt(2.0 * hbar) * alpha.real()));
    CHECK(su.d(1) == doctest::Approx(std::sqrt(2.0 * hbar) * alpha.imag()));
    AbcTriple back = unitary_to_abc(su, hbar);
    CHECK(triple_distance(back, d) < 1e-11);
  }

  TEST_CASE("non-symplectic and non-unitary inputs are rejected") {
    Eigen::MatrixXd bad = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(SymplecticUnitary(bad, Eigen::VectorXd::Zero(2)), DomainError);
    CHECK_THROWS_AS(abc_to_unitary(catalog::thermal(0.5), 2.0), DomainError);
  }

  TEST_CASE("channel golden values: loss and amplifier") {
    const double hbar = 2.0;
    for (double eta : {0.1, 0.5, 0.9}) {
      ChannelXY loss(std::sqrt(eta) * Eigen::MatrixXd::Identity(2, 2),
                     (hbar / 2.0) * (1 - eta) * Eigen::MatrixXd::Identity(2, 2),
                     Eigen::VectorXd::Zero(2));
      AbcTriple t = channel_to_abc(loss, hbar);
      CHECK(triple_distance(t, catalog::loss_channel(eta)) < 1e-12);
      ChannelXY back = abc_to_channel(catalog::loss_channel(eta), hbar);
      CHECK((back.X - loss.X).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((back.Y - loss.Y).cwiseAbs().maxCoeff() < 1e-10);
    }
    const double g = 2.3;
    ChannelXY amp(std::sqrt(g) * Eigen::MatrixXd::Identity(2, 2),
                  (hbar / 2.0) * (g - 1) * Eigen::MatrixXd::Identity(2, 2),
                  Eigen::VectorXd::Zero(2));
    CHECK(triple_distance(channel_to_abc(amp, hbar), catalog::amplifier_channel(g)) < 1e-12);
    // identity channel
    ChannelXY idc(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2),
                  Eigen::VectorXd::Zero(2));
    CHECK(triple_distance(channel_to_abc(idc, hbar), catalog::identity_channel(1)) < 1e-12);
  }

  TEST_CASE("random conversion round trips") {
    std::mt19937 rng(2024);
    const double hbar = 2.0;
    for (int trial = 0; trial < 50; ++trial) {
      PhaseSpaceState ps = random_physical_state(1 + trial % 2, rng);
      AbcTriple t = state_to_abc(ps);
      PhaseSpaceState back = abc_to_state(t, hbar);
      CHECK((back.sigma - ps.sigma).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.mu - ps.mu).cwiseAbs().maxCoeff() < 1e-9);
    }
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      // random symplectic: interferometer * squeezers * interferometer + displacement
      AbcTriple u = catalog::interferometer(oracles::random_unitary(2, rng));
      AbcTriple sq = catalog::squeezer(0.4 + 0.3 * uni(rng), uni(rng)).tensor(
          catalog::squeezer(0.2, 0.0).relabeled([](const Wire& w) { return Wire{1, w.kind}; }));
      AbcTriple gate = compose_operators(u, sq, {0, 1});
      for (int i = 0; i < 2; ++i) {
        AbcTriple d = catalog::displacement({0.4 * uni(rng), 0.4 * uni(rng)})
                          .relabeled([i](const Wire& w) { return Wire{i, w.kind}; });
        gate = compose_operators(d, gate, {i});
      }
      SymplecticUnitary su = abc_to_unitary(gate, hbar);
      AbcTriple back = unitary_to_abc(su, hbar);
      // phases are gauge; compare A, b and |c|
      AbcTriple sorted = reorder(gate, back.layout());
      CHECK((back.A() - sorted.A()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.b() - sorted.b()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(std::abs(back.c()) - std::abs(sorted.c())) < 1e-9);
    }
    for (int trial = 0; trial < 50; ++trial) {
      // random CPTP channel: unitary dilation with a traced ancilla
      const double eta = 0.05 + 0.9 * std::abs(uni(rng));
      const double g = 1.0 + std::abs(uni(rng));
      ChannelXY base = trial % 2 == 0
                           ? ChannelXY(std::sqrt(eta) * Eigen::MatrixXd::Identity(2, 2),
                                       (hbar / 2.0) * (1 - eta) * Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::VectorXd::Zero(2))
                           : ChannelXY(std::sqrt(g) * Eigen::MatrixXd::Identity(2, 2),
                                       (hbar / 2.0) * (g - 1) * Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::VectorXd::Zero(2));
      // dress with random symplectics and a displacement
      SymplecticUnitary s1 = abc_to_unitary(catalog::squeezer(0.3 * std::abs(uni(rng)), uni(rng)), hbar);
      SymplecticUnitary s2 = abc_to_unitary(catalog::rotation(uni(rng)), hbar);
      Eigen::VectorXd d(2);
      d << 0.5 * uni(rng), 0.5 * uni(rng);
      ChannelXY dressed(s1.S * base.X * s2.S, s1.S * base.Y * s1.S.transpose(), d);
      AbcTriple t = channel_to_abc(dressed, hbar);
      ChannelXY back = abc_to_channel(t, hbar);
      CHECK((back.X - dressed.X).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.Y - dressed.Y).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.d - dressed.d).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("channel action consistency: contraction equals phase-space map") {
    std::mt19937 rng(99);
    const double hbar = 2.0;
    for (int trial = 0; trial < 10; ++trial) {
      PhaseSpaceState ps = random_physical_state(1, rng);
      const double eta = 0.3 + 0.05 * trial;
      AbcTriple rho = state_to_abc(ps);
      AbcTriple out = apply_channel(catalog::loss_channel(eta), rho, {0});
      Eigen::MatrixXd x = std::sqrt(eta) * Eigen::MatrixXd::Identity(2, 2);
      Eigen::MatrixXd y = (hbar / 2.0) * (1 - eta) * Eigen::MatrixXd::Identity(2, 2);
      PhaseSpaceState mapped(x * ps.sigma * x.transpose() + y, x * ps.mu,
                             hbar);
      CHECK(triple_distance(out, state_to_abc(mapped)) < 1e-9);
    }
  }

  TEST_CASE("CPTP margins agree between XY form and Abc checks") {
    const double hbar = 2.0;
    ChannelXY loss(std::sqrt(0.6) * Eigen::MatrixXd::Identity(2, 2),
                   (hbar / 2.0) * 0.4 * Eigen::MatrixXd::Identity(2, 2),
                   Eigen::VectorXd::Zero(2));
    CHECK(loss.cptp_margin(hbar) >= -1e-12);
    PhysicalityReport rep = check_cptp(channel_to_abc(loss, hbar));
    CHECK(rep.cp);
    CHECK(rep.tp);
    // a transposition-flavored map: X with negative determinant scaling
    Eigen::MatrixXd xt(2, 2);
    xt << 1.0, 0.0, 0.0, -1.0;
    ChannelXY bad(xt, 0.1 * Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
    CHECK(bad.cptp_margin(hbar) < -1e-6);
    PhysicalityReport rep2 = check_cp(channel_to_abc(bad, hbar));
    CHECK_FALSE(rep2.cp);
  }

  TEST_CASE("hbar covariance: rescaled inputs give identical triples") {
    std::mt19937 rng(5);
    PhaseSpaceState ps2 = random_physical_state(1, rng);  // hbar = 2
    PhaseSpaceState ps1(ps2.sigma / 2.0, ps2.mu / std::sqrt(2.0), 1.0);
    CHECK(triple_distance(state_to_abc(ps1), state_to_abc(ps2)) < 1e-12);
  }

  TEST_CASE("xpxp ordering round trips") {
    std::mt19937 rng(8);
    PhaseSpaceState ps = random_physical_state(2, rng);
    PhaseSpaceState xp = ps.reordered(QuadOrder::XPXP);
    PhaseSpaceState back = xp.reordered(QuadOrder::XXPP);
    CHECK((back.sigma - ps.sigma).cwiseAbs().maxCoeff() == 0.0);
    CHECK(triple_distance(state_to_abc(xp), state_to_abc(ps)) < 1e-12);
  }

  TEST_CASE("conjugate_displacement") {
    const double hbar = 2.0;
    ChannelXY idc(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2),
                  Eigen::VectorXd::Zero(2));
    Eigen::VectorXd v(2);
    v << 0.3, -1.2;
    ConjugatedDisplacement cd = conjugate_displacement(idc, v, hbar);
    CHECK((cd.v - v).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(cd.damping == doctest::Approx(1.0));

    const double eta = 0.7;
    ChannelXY loss(std::sqrt(eta) * Eigen::MatrixXd::Identity(2, 2),
                   (hbar / 2.0) * (1 - eta) * Eigen::MatrixXd::Identity(2, 2),
                   Eigen::VectorXd::Zero(2));
    Eigen::VectorXd vp(2);
    vp << 0.0, std::sqrt(2.0 * std::numbers::pi * hbar);
    ConjugatedDisplacement cd2 = conjugate_displacement(loss, vp, hbar);
    CHECK(cd2.damping ==
          doctest::Approx(std::exp(-std::numbers::pi * (1 - eta) / 2.0)).epsilon(1e-12));

    // pure symplectic: v' = -Omega S^T Omega v
    SymplecticUnitary s = abc_to_unitary(catalog::squeezer(0.5, 0.0), hbar);
    ChannelXY us(s.S, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
    ConjugatedDisplacement cd3 = conjugate_displacement(us, v, hbar);
    Eigen::MatrixXd om = symplectic_form(1);
    CHECK((cd3.v + om * s.S.transpose() * om * v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cd3.damping == doctest::Approx(1.0));
  }
}
