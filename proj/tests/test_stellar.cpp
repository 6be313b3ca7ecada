#include <doctest.h>

#include <random>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/fock.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/physicality.hpp"
#include "bargmann/stellar.hpp"
#include "oracles.hpp"

using namespace bargmann;

namespace {

// entrywise A/b distance and |c| relative difference
void check_recomposed(const AbcTriple& rebuilt, const AbcTriple& original, double tol = 1e-9) {
  AbcTriple r = reorder(rebuilt, original.layout());
  CHECK((r.A() - original.A()).cwiseAbs().maxCoeff() < tol);
  CHECK((r.b() - original.b()).cwiseAbs().maxCoeff() < tol);
  CHECK(std::abs(std::abs(r.c()) - std::abs(original.c())) /
            std::max(1e-300, std::abs(original.c())) <
        tol);
}

AbcTriple recompose_pure(const stellar::PureDecomposition& dec, const std::vector<int>& m_modes) {
  return apply_unitary(dec.unitary, dec.core, m_modes);
}

AbcTriple recompose_mixed(const stellar::MixedDecomposition& dec,
                          const std::vector<int>& m_modes) {
  AbcTriple core_dm = dec.core_is_pure ? to_density_matrix(dec.core) : dec.core;
  return apply_channel(dec.channel, core_dm, m_modes);
}

}  // namespace

TEST_SUITE("stellar") {
  TEST_CASE("is_core recognizes the TMSV and rejects products") {
    AbcTriple tmsv = catalog::two_mode_squeezed_vacuum(0.8);
    CHECK(stellar::is_core(tmsv, 1).is_core);

    AbcTriple prod = catalog::squeezed_vacuum(0.6).tensor(
        catalog::vacuum(1).relabeled([](const Wire& w) { return Wire{1, w.kind}; }));
    stellar::CoreCheck check = stellar::is_core(prod, 1);
    CHECK_FALSE(check.is_core);
    CHECK(check.a_block_max == doctest::Approx(std::tanh(0.6)));
  }

  TEST_CASE("pure decomposition of an already-core state is trivial") {
    AbcTriple tmsv = catalog::two_mode_squeezed_vacuum(0.9);
    stellar::PureDecomposition dec = stellar::pure_decompose(tmsv, 1);
    AbcTriple eye = catalog::identity_gate(1);
    CHECK((reorder(dec.unitary, eye.layout()).A() - eye.A()).cwiseAbs().maxCoeff() < 1e-12);
    check_recomposed(dec.core, tmsv, 1e-12);
  }

  TEST_CASE("squeezer on a TMSV is pulled out as the unitary") {
    AbcTriple base = catalog::two_mode_squeezed_vacuum(0.8);
    AbcTriple sq = catalog::squeezer(0.5, 0.0);
    AbcTriple psi = apply_unitary(sq, base, {0});
    stellar::PureDecomposition dec = stellar::pure_decompose(psi, 1);
    CHECK(stellar::is_core(dec.core, 1).is_core);
    check_recomposed(recompose_pure(dec, {0}), psi, 1e-10);

    // U|0> equals the normalized vacuum herald of psi
    AbcTriple u_vac = apply_unitary(dec.unitary, catalog::vacuum(1), {0});
    AbcTriple heralded = project_vacuum(psi, {{1, WireKind::Ket}});
    const double norm = std::sqrt(norm_squared(heralded));
    CHECK((u_vac.A() - heralded.A()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::abs(u_vac.c()) - std::abs(heralded.c()) / norm) < 1e-10);
  }

  TEST_CASE("displaced input: the core keeps zero b on the kept modes") {
    std::mt19937 rng(17);
    AbcTriple base = oracles::random_pure_ket(2, rng, 0.7, /*displace=*/false);
    AbcTriple d = catalog::displacement({0.4, -0.3});
    AbcTriple psi = apply_unitary(d, base, {0});
    stellar::PureDecomposition dec = stellar::pure_decompose(psi, 1);
    stellar::CoreCheck check = stellar::is_core(dec.core, 1);
    CHECK(check.is_core);
    CHECK(check.b_block_max < 1e-12);
    check_recomposed(recompose_pure(dec, {0}), psi, 1e-9);
  }

  TEST_CASE("pure decomposition rejects a degenerate marginal") {
    // quadrature-eigenstate-like A with ||A^(m)|| = 1
    Matrix a(2, 2);
    a << -1.0, 0.0, 0.0, 0.0;
    AbcTriple bad(a, Vector::Zero(2), 1.0, WireLayout::ket(2));
    CHECK_THROWS_AS(stellar::pure_decompose(bad, 1), DomainError);
  }

  TEST_CASE("recomposition suite across random pure inputs") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 2;
      AbcTriple psi = oracles::random_pure_ket(n, rng, 0.75);
      const int m = 1 + trial % (n - 0);
      if (m >= n) continue;
      stellar::PureDecomposition dec = stellar::pure_decompose(psi, m);
      CHECK(stellar::is_core(dec.core, m).is_core);
      std::vector<int> m_modes;
      for (int i = 0; i < m; ++i) m_modes.push_back(i);
      check_recomposed(recompose_pure(dec, m_modes), psi, 1e-9);
    }
  }

  TEST_CASE("gauge freedom: an interferometer slid between U and core cancels") {
    std::mt19937 rng(9);
    AbcTriple psi = oracles::random_pure_ket(3, rng, 0.7);
    stellar::PureDecomposition dec = stellar::pure_decompose(psi, 2);
    AbcTriple w = catalog::interferometer(oracles::random_unitary(2, rng));
    AbcTriple core_w = apply_unitary(w, dec.core, {0, 1});
    AbcTriple u_w = compose_operators(dec.unitary, w.adjoint(), {0, 1});
    AbcTriple rebuilt = apply_unitary(u_w, core_w, {0, 1});
    check_recomposed(rebuilt, psi, 1e-9);
  }

  TEST_CASE("formal decomposition reproduces any Gaussian vector exactly") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      AbcTriple vec = vectorize(oracles::random_mixed_dm(2, rng));
      stellar::FormalDecomposition dec = stellar::formal_decompose(vec, 2);
      // contract T's bra wires with the core's first two ket wires
      ContractionPlan plan = ContractionPlan::matching(dec.t_operator, dec.core_vector);
      AbcTriple rebuilt = contract(dec.t_operator, dec.core_vector, plan);
      check_recomposed(rebuilt, vec, 1e-12);
      // already-core input gives A_m = 0 in the T block
      stellar::FormalDecomposition dec2 = stellar::formal_decompose(dec.core_vector, 2);
      CHECK(dec2.t_operator.A().topLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("absorb_displacement recovers an injected displacement") {
    AbcTriple tmsv = catalog::two_mode_squeezed_vacuum(0.7);
    Complex alpha{0.35, -0.2};
    AbcTriple d = catalog::displacement(alpha);
    AbcTriple displaced = apply_unitary(d, tmsv, {0});
    // displaced TMSV has a nonzero b on mode 0; absorbing recovers gamma = alpha:
    // b_m of D(a)|tmsv> is a itself (A_mm = 0), so gamma = -a
    stellar::DisplacementAbsorption abs = stellar::absorb_displacement(displaced, 1);
    CHECK(std::abs(abs.gamma(0) + alpha) < 1e-12);
    CHECK(stellar::is_core(abs.core, 1).is_core);

    // no-op on a clean core
    stellar::DisplacementAbsorption noop = stellar::absorb_displacement(tmsv, 1);
    CHECK(noop.gamma.cwiseAbs().maxCoeff() == 0.0);

    // mixed candidate: hermiticity preserved after absorption
    AbcTriple dm = to_density_matrix(displaced);
    stellar::DisplacementAbsorption absdm = stellar::absorb_displacement(dm, 1);
    CHECK(check_hermitian(absdm.core).hermitian);
    CHECK(stellar::is_core(absdm.core, 1).is_core);
  }

  TEST_CASE("pure-core decomposition of a 1+1 lossy TMSV") {
    AbcTriple tmsv_dm = to_density_matrix(catalog::two_mode_squeezed_vacuum(0.9));
    AbcTriple lossy = apply_channel(
        catalog::loss_channel(0.9).relabeled([](const Wire& w) { return Wire{1, w.kind}; }),
        tmsv_dm, {1});
    stellar::MixedDecomposition dec = stellar::pure_core_decompose(lossy, 1);
    CHECK(dec.feasible);
    CHECK(dec.core_is_pure);
    CHECK(stellar::is_core(to_density_matrix(dec.core), 1).is_core);
    CHECK(check_cp(dec.channel).cp);
    CHECK(check_tp(dec.channel).tp);
    check_recomposed(recompose_mixed(dec, {0}), lossy, 1e-9);
  }

  TEST_CASE("mixed decomposition with m >= n routes to a pure core") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      AbcTriple dm = oracles::random_mixed_dm(2, rng, 1, 0.7);
      stellar::MixedDecomposition dec = stellar::mixed_decompose(dm, 1);
      CHECK(dec.feasible);
      CHECK(dec.core_is_pure);
      check_recomposed(recompose_mixed(dec, {0}), dm, 1e-8);
    }
  }

  TEST_CASE("thermal x thermal splits into a channel and a pure TMSV-like core") {
    AbcTriple rho = catalog::thermal(0.8).tensor(
        catalog::thermal(0.5).relabeled([](const Wire& w) { return Wire{1, w.kind}; }));
    stellar::MixedDecomposition dec = stellar::pure_core_decompose(rho, 1);
    CHECK(dec.feasible);
    CHECK(dec.core_is_pure);
    // the n-marginal of the core matches the n-marginal of the input
    AbcTriple marg_core = partial_trace(to_density_matrix(dec.core), {0});
    AbcTriple marg_in = partial_trace(rho, {0});
    AbcTriple sorted = reorder(marg_core, marg_in.layout());
    CHECK((sorted.A() - marg_in.A()).cwiseAbs().maxCoeff() < 1e-10);
    check_recomposed(recompose_mixed(dec, {0}), rho, 1e-9);
  }

  TEST_CASE("lossless pure input gives a unitary-like channel") {
    AbcTriple dm = to_density_matrix(catalog::two_mode_squeezed_vacuum(0.6));
    stellar::MixedDecomposition dec = stellar::pure_core_decompose(dm, 1);
    CHECK(dec.feasible);
    ChannelXY ch = abc_to_channel(dec.channel, 2.0);
    // unitary channel: Y vanishes up to the pseudo-inverse tolerance scale
    CHECK(ch.Y.cwiseAbs().maxCoeff() < 1e-7);
    check_recomposed(recompose_mixed(dec, {0}), dm, 1e-8);
  }

  TEST_CASE("1+2-mode counterexample: rank witness two exceeds m = 1") {
    std::mt19937 rng(31);
    // 3-mode pure state with independent loss on both heralding modes
    AbcTriple psi = oracles::random_pure_ket(3, rng, 0.7);
    AbcTriple dm = to_density_matrix(psi);
    for (int i : {1, 2}) {
      dm = apply_channel(
          catalog::loss_channel(0.7).relabeled([i](const Wire& w) { return Wire{i, w.kind}; }),
          dm, {i});
    }
    stellar::MixedDecomposition dec = stellar::mixed_decompose(dm, 1);
    CHECK(dec.rank_witness == 2);
    CHECK_FALSE(dec.feasible);
    CHECK(dec.fallback.has_value());
    // the fallback is still an exact formal decomposition
    ContractionPlan plan =
        ContractionPlan::matching(dec.fallback->t_operator, dec.fallback->core_vector);
    AbcTriple rebuilt = contract(dec.fallback->t_operator, dec.fallback->core_vector, plan);
    CHECK(rebuilt.dim() == 6);
  }

  TEST_CASE("mixed feasibility is invariant under unitaries on the N side") {
    std::mt19937 rng(41);
    AbcTriple psi = oracles::random_pure_ket(3, rng, 0.7);
    AbcTriple dm = to_density_matrix(psi);
    for (int i : {1, 2}) {
      dm = apply_channel(
          catalog::loss_channel(0.8).relabeled([i](const Wire& w) { return Wire{i, w.kind}; }),
          dm, {i});
    }
    stellar::MixedDecomposition before = stellar::mixed_decompose(dm, 1);
    AbcTriple w = catalog::interferometer(oracles::random_unitary(2, rng))
                      .relabeled([](const Wire& wr) { return Wire{wr.mode + 1, wr.kind}; });
    AbcTriple rotated = apply_unitary_dm(w, dm, {1, 2});
    stellar::MixedDecomposition after = stellar::mixed_decompose(rotated, 1);
    CHECK(before.feasible == after.feasible);
    CHECK(before.rank_witness == after.rank_witness);
  }

  TEST_CASE("diagonal and off-diagonal heralds of a decomposed core have matching support") {
    std::mt19937 rng(21);
    AbcTriple psi = oracles::random_pure_ket(2, rng, 0.7);
    stellar::PureDecomposition dec = stellar::pure_decompose(psi, 1);
    AbcTriple core_dm = to_density_matrix(dec.core);
    // <k1| rho_core |k2> on the heralded mode leaves finite support for all
    // patterns; check on a cutoff-8 truncated tensor
    AbcTriple tw = reorder(core_dm, OrderingTag::TypeWise);
    FockArray g = fock_amplitudes(tw, {8, 8, 8, 8}, {.guard_divergence = false});
    // wire order: bra0 bra1 ket0 ket1 -> herald on mode 1 with (k1, k2)
    for (Index k1 : {0, 1, 2}) {
      for (Index k2 : {0, 1, 2}) {
        for (Index j1 = 0; j1 < 8; ++j1) {
          for (Index j2 = 0; j2 < 8; ++j2) {
            if (j1 + j2 >= static_cast<Index>(k1 + k2) + 1) {
              CHECK(std::abs(g.at({j1, k1, j2, k2})) == 0.0);
            }
          }
        }
      }
    }
  }
}
