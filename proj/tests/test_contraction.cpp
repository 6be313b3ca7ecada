#include <doctest.h>

#include <random>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/fock.hpp"
#include "oracles.hpp"

using namespace bargmann;

namespace {

double triple_distance(const AbcTriple& a, const AbcTriple& b) {
  REQUIRE(a.layout().is_permutation_of(b.layout()));
  AbcTriple bb = reorder(b, a.layout());
  double d = 0.0;
  if (a.dim() > 0) {
    d = std::max(d, (a.A() - bb.A()).cwiseAbs().maxCoeff());
    d = std::max(d, (a.b() - bb.b()).cwiseAbs().maxCoeff());
  }
  return std::max(d, std::abs(a.c() - bb.c()));
}

}  // namespace

TEST_SUITE("contraction") {
  TEST_CASE("identity gate leaves any single-mode ket unchanged") {
    for (double r : {0.0, 0.4, 1.2}) {
      AbcTriple ket = catalog::displaced_squeezed({0.3, -0.2}, r, 0.7);
      AbcTriple out = apply_unitary(catalog::identity_gate(1), ket, {0});
      CHECK(triple_distance(out, ket) < 1e-12);
    }
  }

  TEST_CASE("TMSV second wire against the vacuum bra leaves sech r scalar triple") {
    const double r = 0.8;
    AbcTriple tmsv = catalog::two_mode_squeezed_vacuum(r);
    AbcTriple projected = project_vacuum(tmsv, {{1, WireKind::Ket}});
    CHECK(projected.dim() == 1);
    CHECK(std::abs(projected.A()(0, 0)) == 0.0);
    CHECK(std::abs(projected.b()(0)) == 0.0);
    CHECK(std::abs(projected.c() - 1.0 / std::cosh(r)) < 1e-14);
  }

  TEST_CASE("U dagger U of the squeezer is the identity triple") {
    AbcTriple u = catalog::squeezer(0.9, 0.4);
    AbcTriple prod = compose_operators(u.adjoint(), u, {0});
    AbcTriple eye = catalog::identity_gate(1);
    AbcTriple sorted = reorder(prod, eye.layout());
    CHECK((sorted.A() - eye.A()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sorted.b().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::abs(sorted.c()) - 1.0) < 1e-10);
  }

  TEST_CASE("partial trace of TMSV is the thermal state with nbar = sinh^2 r") {
    const double r = 0.65;
    AbcTriple dm = to_density_matrix(catalog::two_mode_squeezed_vacuum(r));
    AbcTriple reduced = partial_trace(dm, {0});
    const double nbar = std::sinh(r) * std::sinh(r);
    AbcTriple thermal = catalog::thermal(nbar).relabeled([](const Wire& w) {
      return Wire{1, w.kind};
    });
    CHECK(triple_distance(reduced, thermal) < 1e-12);

    // cross-check against the trace of the truncated Fock density matrix
    Matrix rho = oracles::dm_fock_matrix(reorder(reduced, OrderingTag::TypeWise)
                                             .relabeled([](const Wire& w) {
                                               return Wire{0, w.kind};
                                             }),
                                         25);
    for (Index n = 0; n < 10; ++n) {
      const double geometric = std::pow(nbar / (nbar + 1.0), static_cast<double>(n)) / (nbar + 1.0);
      CHECK(std::abs(rho(n, n) - geometric) < 1e-10);
    }
  }

  TEST_CASE("tracing a product vacuum leaves the other factor untouched") {
    AbcTriple vac = to_density_matrix(catalog::vacuum(1));
    AbcTriple rho = catalog::thermal(0.7).relabeled([](const Wire& w) { return Wire{1, w.kind}; });
    AbcTriple prod = vac.tensor(rho);
    AbcTriple reduced = partial_trace(prod, {0});
    CHECK(triple_distance(reduced, rho) < 1e-13);
  }

  TEST_CASE("full trace of catalog density matrices is 1") {
    CHECK(std::abs(trace(catalog::thermal(1.3)) - 1.0) < 1e-10);
    AbcTriple dm = to_density_matrix(catalog::displaced_squeezed({0.4, 0.2}, 0.8, 0.1));
    CHECK(std::abs(trace(dm) - 1.0) < 1e-10);
    AbcTriple tmsv = to_density_matrix(catalog::two_mode_squeezed_vacuum(0.9));
    CHECK(std::abs(trace(tmsv) - 1.0) < 1e-10);
  }

  TEST_CASE("vacuum projection of a ket gives its vacuum amplitude") {
    AbcTriple ket = catalog::displaced_squeezed({0.5, 0.1}, 0.6);
    AbcTriple scalar = project_vacuum(ket, {{0, WireKind::Ket}});
    CHECK(scalar.dim() == 0);
    CHECK(scalar.c() == ket.c());
  }

  TEST_CASE("beamsplitter with vacuum input and projected output is Fock damping") {
    const double eta = 0.64;  // cos theta = sqrt(eta)
    const double theta = std::acos(std::sqrt(eta));
    AbcTriple bs = catalog::beamsplitter(theta);
    AbcTriple damped = project_vacuum(bs, {{1, WireKind::Ket}, {1, WireKind::Bra}});
    AbcTriple fd = catalog::fock_damping(-std::log(std::sqrt(eta)));
    CHECK(triple_distance(damped, fd) < 1e-12);
  }

  TEST_CASE("project zero wires is the identity") {
    AbcTriple t = catalog::two_mode_squeezed_vacuum(0.4);
    CHECK(triple_distance(project_vacuum(t, {}), t) == 0.0);
  }

  TEST_CASE("convergence margins") {
    const double r = std::atanh(0.999);
    AbcTriple tmsv = catalog::two_mode_squeezed_vacuum(r);
    AbcTriple bra = tmsv.adjoint();
    // ket-to-bra on one wire
    ContractionPlan plan = ContractionPlan::by_wires(
        bra, tmsv, {{{0, WireKind::Bra}, {0, WireKind::Ket}}});
    ConvergenceReport rep = check_contraction(bra, tmsv, plan);
    CHECK(rep.ok);
    CHECK(rep.margin < 2.0);
    // the paired single-wire blocks of a TMSV are zero, so the margin is 0
    CHECK(rep.margin == doctest::Approx(0.0));

    // normalizable ket against its own conjugate: margin = 2 ||A||
    AbcTriple sq = catalog::squeezed_vacuum(0.5);
    ContractionPlan full = ContractionPlan::matching(sq.adjoint(), sq);
    ConvergenceReport rep2 = check_contraction(sq.adjoint(), sq, full);
    CHECK(rep2.ok);
    CHECK(rep2.margin == doctest::Approx(2.0 * std::tanh(0.5)).epsilon(1e-10));

    // formal T-operator block (paired blocks zero) has margin 0
    Matrix a_t(2, 2);
    a_t << 0.7, 1.0, 1.0, 0.0;
    AbcTriple t_op(a_t, Vector::Zero(2), 1.0, WireLayout::unitary(1));
    AbcTriple core = catalog::squeezed_vacuum(0.5);
    Matrix a_core(1, 1);
    a_core << 0.0;
    AbcTriple core0(a_core, Vector::Zero(1), 1.0, WireLayout::ket(1));
    ContractionPlan tplan = ContractionPlan::by_wires(
        t_op, core0, {{{0, WireKind::Bra}, {0, WireKind::Ket}}});
    ConvergenceReport rep3 = check_contraction(t_op, core0, tplan);
    CHECK(rep3.ok);
    CHECK(rep3.margin == doctest::Approx(0.0));
  }

  TEST_CASE("divergent contraction raises") {
    // two EPR-like vectors with A = X contracted bra-ket: margin = 2
    AbcTriple eye1 = vectorize(catalog::identity_gate(1));
    AbcTriple eye2 = eye1.adjoint();
    ContractionPlan plan = ContractionPlan::by_wires(
        eye2, eye1, {{{0, WireKind::Bra}, {0, WireKind::Ket}}, {{1, WireKind::Bra}, {1, WireKind::Ket}}});
    CHECK_THROWS_AS(contract(eye2, eye1, plan), DivergentIntegralError);
  }

  TEST_CASE("plan validation") {
    AbcTriple ketA = catalog::vacuum(1);
    AbcTriple ketB = catalog::vacuum(1);
    ContractionPlan plan;
    plan.pairs.push_back({0, 0, true});
    CHECK_THROWS_AS(contract(ketA, ketB, plan), LayoutError);  // ket-ket pairing
  }

  TEST_CASE("loss Kraus contracted with its conjugate over the index is the loss channel") {
    const double eta = 0.42;
    AbcTriple k = catalog::loss_kraus(eta);
    AbcTriple k_ket = k.relabeled([](const Wire& w) {
      if (w.mode == 1) return w;  // Kraus index wire
      if (w.kind == WireKind::Ket) return Wire{w.mode, WireKind::OutKet};
      return Wire{w.mode, WireKind::InKet};
    });
    AbcTriple k_bra = k.conjugated().relabeled([](const Wire& w) {
      if (w.mode == 1) return Wire{w.mode, WireKind::Bra};
      if (w.kind == WireKind::Ket) return Wire{w.mode, WireKind::OutBra};
      return Wire{w.mode, WireKind::InBra};
    });
    ContractionPlan plan = ContractionPlan::by_wires(
        k_bra, k_ket, {{{1, WireKind::Bra}, {1, WireKind::Ket}}});
    AbcTriple channel = contract(k_bra, k_ket, plan);
    AbcTriple loss = catalog::loss_channel(eta);
    CHECK(triple_distance(reorder(channel, loss.layout()), loss) < 1e-10);
  }

  TEST_CASE("contraction associativity on chains") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 5; ++trial) {
      AbcTriple ket = oracles::random_pure_ket(1, rng, 0.7);
      AbcTriple g2 = catalog::squeezer(0.5, 1.1);
      AbcTriple g3 = catalog::rotation(0.8);
      // (g3 g2) ket vs g3 (g2 ket)
      AbcTriple left = apply_unitary(compose_operators(g3, g2, {0}), ket, {0});
      AbcTriple right = apply_unitary(g3, apply_unitary(g2, ket, {0}), {0});
      CHECK(triple_distance(left, right) < 1e-10);
    }
  }

  TEST_CASE("reorder commutes with contract") {
    AbcTriple bs = catalog::beamsplitter(0.6, 0.2);
    AbcTriple ket = catalog::two_mode_squeezed_vacuum(0.5);
    AbcTriple direct = apply_unitary(bs, ket, {0, 1});

    AbcTriple bs_perm = reorder(bs, OrderingTag::ModeWise);
    AbcTriple ket_perm = reorder(ket, WireLayout({{1, WireKind::Ket}, {0, WireKind::Ket}}));
    AbcTriple permuted = apply_unitary(bs_perm, ket_perm, {0, 1});
    CHECK(triple_distance(reorder(permuted, direct.layout()), direct) < 1e-12);
  }

  TEST_CASE("oracle equivalence: Abc contraction matches truncated tensor contraction") {
    // beamsplitter applied to squeezed x squeezed, checked at cutoff 12
    const Index cutoff = 12;
    AbcTriple sq0 = catalog::squeezed_vacuum(0.55);
    AbcTriple sq1 = catalog::squeezed_vacuum(0.35, 1.3).with_modes_shifted(1);
    AbcTriple input = sq0.tensor(sq1);
    AbcTriple bs = catalog::beamsplitter(0.7, 0.4);
    AbcTriple output = apply_unitary(bs, input, {0, 1});

    FockArray out_direct = fock_amplitudes(output, {cutoff, cutoff});
    // tensor route: BS tensor (out0 out1 in0 in1) contracted with input (m0 m1)
    FockArray bs_tensor = fock_amplitudes(reorder(bs, OrderingTag::OutputInput),
                                          {cutoff, cutoff, cutoff, cutoff},
                                          {.guard_divergence = false});
    FockArray in_tensor = fock_amplitudes(input, {cutoff, cutoff});
    FockArray out_tensor = oracles::tensor_contract(bs_tensor, {2, 3}, in_tensor, {0, 1});
    double max_err = 0.0;
    for (Index i = 0; i < cutoff; ++i) {
      for (Index j = 0; j < cutoff; ++j) {
        // the beamsplitter conserves total photon number, so entries with
        // i + j <= cutoff - 2 suffer no truncation in the internal sum
        if (i + j > cutoff - 2) continue;
        max_err = std::max(max_err,
                           std::abs(out_direct.at({i, j}) - out_tensor.at({i, j})));
      }
    }
    CHECK(max_err < 1e-8);
  }

  TEST_CASE("c of a normalized ket is its vacuum amplitude") {
    std::mt19937 rng(77);
    AbcTriple ket = oracles::random_pure_ket(1, rng, 0.8);
    const double n2 = norm_squared(ket);
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-9));
    FockArray amps = fock_amplitudes(ket, {40});
    double sum_rest = 0.0;
    for (Index n = 1; n < 40; ++n) sum_rest += std::norm(amps.data()[static_cast<std::size_t>(n)]);
    CHECK(std::norm(ket.c()) == doctest::Approx(1.0 - sum_rest).epsilon(1e-8));
  }
}
