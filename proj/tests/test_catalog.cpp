#include <doctest.h>

#include <numbers>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/fock.hpp"
#include "bargmann/physicality.hpp"
#include "oracles.hpp"

using namespace bargmann;

TEST_SUITE("catalog") {
  TEST_CASE("state golden values") {
    Complex alpha{0.5, -0.3};
    AbcTriple coh = catalog::coherent(alpha);
    CHECK(std::abs(coh.A()(0, 0)) == 0.0);
    CHECK(coh.b()(0) == alpha);
    CHECK(std::abs(coh.c() - std::exp(-0.5 * std::norm(alpha))) < 1e-15);

    AbcTriple sq = catalog::squeezed_vacuum(0.8, 0.4);
    CHECK(std::abs(sq.A()(0, 0) + std::exp(Complex(0, 0.4)) * std::tanh(0.8)) < 1e-15);
    CHECK(std::abs(sq.c() - std::sqrt(1.0 / std::cosh(0.8))) < 1e-15);

    AbcTriple vac = catalog::vacuum(1);
    CHECK(std::abs(vac.A()(0, 0)) == 0.0);
    CHECK(std::abs(vac.b()(0)) == 0.0);
    CHECK(vac.c() == Complex{1.0, 0.0});

    Complex a2{0.4, 0.7};
    const double r2 = 0.6, phi2 = 0.9;
    AbcTriple ds = catalog::displaced_squeezed(a2, r2, phi2);
    const Complex eit = std::exp(Complex(0, phi2)) * std::tanh(r2);
    CHECK(std::abs(ds.A()(0, 0) + eit) < 1e-15);
    CHECK(std::abs(ds.b()(0) - (a2 + std::conj(a2) * eit)) < 1e-15);
    const Complex c_expect =
        std::exp(-0.5 * std::norm(a2) - 0.5 * std::conj(a2) * std::conj(a2) * eit) /
        std::sqrt(std::cosh(r2));
    CHECK(std::abs(ds.c() - c_expect) < 1e-15);

    AbcTriple th = catalog::thermal(2.0);
    CHECK(std::abs(th.A()(0, 1) - 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(th.c() - 1.0 / 3.0) < 1e-15);
  }

  TEST_CASE("unitary golden values") {
    AbcTriple rot = catalog::rotation(0.7);
    CHECK(std::abs(rot.A()(0, 1) - std::exp(Complex(0, 0.7))) < 1e-15);
    CHECK(std::abs(rot.A()(0, 0)) == 0.0);

    AbcTriple bs0 = catalog::beamsplitter(0.0, 1.3);
    AbcTriple eye2 = catalog::identity_gate(2);
    CHECK((reorder(bs0, eye2.layout()).A() - eye2.A()).cwiseAbs().maxCoeff() < 1e-15);

    AbcTriple bs = catalog::beamsplitter(0.5, 0.2);
    // block structure with cos/sin entries
    CHECK(std::abs(bs.A()(0, 2) - std::cos(0.5)) < 1e-15);
    CHECK(std::abs(bs.A()(0, 3) + std::exp(Complex(0, -0.2)) * std::sin(0.5)) < 1e-15);
    CHECK(std::abs(bs.A()(1, 2) - std::exp(Complex(0, 0.2)) * std::sin(0.5)) < 1e-15);
  }

  TEST_CASE("every catalog unitary is A-unitary and U dag U contracts to identity") {
    std::mt19937 rng(5);
    std::vector<AbcTriple> unitaries{
        catalog::identity_gate(1), catalog::rotation(0.9), catalog::displacement({0.4, 0.3}),
        catalog::squeezer(0.8, 0.5), catalog::beamsplitter(0.7, 1.1),
        catalog::two_mode_squeezer(0.6, 0.9),
        catalog::interferometer(oracles::random_unitary(3, rng))};
    for (const AbcTriple& u : unitaries) {
      const Index k = u.dim();
      CHECK((u.A().adjoint() * u.A() - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
      std::vector<int> modes = u.layout().modes();
      AbcTriple prod = compose_operators(u.adjoint(), u, modes);
      AbcTriple eye = catalog::identity_gate(static_cast<int>(modes.size()));
      AbcTriple sorted = reorder(prod, eye.layout());
      CHECK((sorted.A() - eye.A()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(sorted.b().cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(std::abs(sorted.c()) - 1.0) < 1e-10);
    }
  }

  TEST_CASE("catalog states pass physicality") {
    for (double r : {0.0, 0.5, 1.2}) {
      AbcTriple ket = catalog::squeezed_vacuum(r, 0.3);
      Eigen::JacobiSVD<Matrix> svd(ket.A());
      CHECK(svd.singularValues()(0) < 1.0);
    }
    for (double nbar : {0.0, 0.5, 3.0}) {
      PhysicalityReport rep = check_density_matrix(catalog::thermal(nbar));
      CHECK(rep.hermitian);
      CHECK(rep.positive);
      if (nbar > 0.0) CHECK(rep.trace_class);
    }
  }

  TEST_CASE("loss channel is CPTP across eta") {
    for (double eta : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      PhysicalityReport rep = check_cptp(catalog::loss_channel(eta));
      CHECK(rep.cp);
      CHECK(rep.tp);
    }
  }

  TEST_CASE("loss(1) is the identity channel") {
    AbcTriple loss1 = catalog::loss_channel(1.0);
    AbcTriple eye = catalog::identity_channel(1);
    CHECK((reorder(loss1, eye.layout()).A() - eye.A()).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("fock damping golden value") {
    AbcTriple fd = catalog::fock_damping(0.9);
    CHECK(std::abs(fd.A()(0, 1) - std::exp(-0.9)) < 1e-15);
    CHECK(fd.c() == Complex{1.0, 0.0});
  }

  TEST_CASE("parameter domains are enforced") {
    CHECK_THROWS_AS(catalog::loss_channel(1.5), DomainError);
    CHECK_THROWS_AS(catalog::amplifier_channel(0.5), DomainError);
    CHECK_THROWS_AS(catalog::squeezed_vacuum(-0.1), DomainError);
    CHECK_THROWS_AS(catalog::thermal(-1.0), DomainError);
    CHECK_THROWS_AS(catalog::stratonovich_weyl_kernel(1.0), DomainError);
    CHECK_THROWS_AS(catalog::build("no_such_state", {}), DomainError);
    Matrix bad(2, 2);
    bad << 1.0, 0.2, 0.0, 1.0;
    CHECK_THROWS_AS(catalog::interferometer(bad), DomainError);
  }

  TEST_CASE("Stratonovich-Weyl kernel matches its tabulated form") {
    const double s = -1.0;
    AbcTriple delta = catalog::stratonovich_weyl_kernel(s, 1);
    const double f = 2.0 / (s - 1.0);
    CHECK(std::abs(delta.A()(0, 1) - f) < 1e-15);       // X block on (z, z*)
    CHECK(std::abs(delta.A()(0, 2) + f) < 1e-15);       // -1 coupling
    CHECK(std::abs(delta.A()(2, 3) - f * 0.5 * (s + 1.0)) < 1e-15);
    CHECK(std::abs(delta.c() - 2.0 / (std::numbers::pi * 2.0)) < 1e-15);
  }

  TEST_CASE("characteristic kernel at s=-1: chi(0) of the vacuum dm is tr rho = 1") {
    AbcTriple ts = catalog::characteristic_kernel(-1.0, 1);
    // evaluate at z = 0: delete the out wires; conjugate for the sesquilinear pairing
    AbcTriple at_zero = project_vacuum(ts.conjugated(),
                                       {{0, WireKind::OutKet}, {0, WireKind::OutBra}});
    AbcTriple vac_dm = to_density_matrix(catalog::vacuum(1));
    ContractionPlan plan = ContractionPlan::by_wires(
        at_zero, vac_dm,
        {{{0, WireKind::InBra}, {0, WireKind::Bra}}, {{0, WireKind::InKet}, {0, WireKind::Ket}}});
    AbcTriple chi0 = contract(at_zero, vac_dm, plan);
    CHECK(chi0.dim() == 0);
    CHECK(std::abs(chi0.c() - 1.0) < 1e-12);
  }

  TEST_CASE("quadrature kernel applied to the vacuum gives a normalized wavefunction") {
    const double hbar = 2.0;
    AbcTriple k0 = catalog::quadrature_kernel(0.0, hbar, 1);
    AbcTriple vac = catalog::vacuum(1);
    ContractionPlan plan = ContractionPlan::by_wires(
        k0, vac, {{{0, WireKind::InKet}, {0, WireKind::Ket}}});
    AbcTriple wave = contract(k0, vac, plan);
    // psi(x) = c exp(a x^2 / 2); integrate |psi|^2 numerically
    const Complex a = wave.A()(0, 0);
    const Complex c = wave.c();
    auto density = [&](double x) {
      return std::norm(c * std::exp(0.5 * a * x * x));
    };
    const double total = oracles::simpson(density, -12.0, 12.0, 4000);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("build() reaches every catalog name") {
    for (const std::string& name : catalog::names()) {
      std::map<std::string, double> params{{"r", 0.3},   {"phi", 0.1}, {"theta", 0.2},
                                           {"eta", 0.5}, {"g", 2.0},   {"beta", 0.3},
                                           {"nbar", 1.0}, {"x", 0.5},  {"s", -1.0},
                                           {"re", 0.1},  {"im", 0.2},  {"n", 1.0}};
      CHECK_NOTHROW(catalog::build(name, params));
    }
  }
}
