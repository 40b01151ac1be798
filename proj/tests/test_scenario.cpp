#include "doctest.h"

#include <cmath>

#include "steer/scenario.hpp"

using namespace steer;

TEST_CASE("states") {
  auto phi = max_entangled(2);
  phi.validate();
  CHECK(phi.rho(0, 0).real() == doctest::Approx(0.5));
  CHECK(phi.rho(0, 3).real() == doctest::Approx(0.5));
  CHECK(std::abs((phi.rho * phi.rho).trace().real() - 1.0) <= 1e-12);

  auto iso = isotropic(2, 0.5);
  iso.validate();
  // eigenvalues w + (1-w)/d^2 and (1-w)/d^2
  auto ev = eig_herm(iso.rho).values;
  CHECK(ev(0) == doctest::Approx(0.625));
  CHECK(ev(1) == doctest::Approx(0.125));
  CHECK(ev(3) == doctest::Approx(0.125));
  CHECK_THROWS(isotropic(2, 1.5));

  auto ghz = ghz_state();
  ghz.validate();
  CHECK(ghz.rho(0, 7).real() == doctest::Approx(0.5));
  auto w = w_state();
  w.validate();
  CHECK(w.rho(1, 2).real() == doctest::Approx(1.0 / 3.0));
  CHECK(w.rho(4, 4).real() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("pauli measurement sets") {
  auto p3 = pauli_measurements();
  p3.validate();
  CHECK(p3.m == 3);
  // observable reconstruction: M(1,x) - M(2,x)
  CHECK((p3.at(1, 1) - p3.at(2, 1) - pauli_x()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((p3.at(1, 2) - p3.at(2, 2) - pauli_y()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((p3.at(1, 3) - p3.at(2, 3) - pauli_z()).cwiseAbs().maxCoeff() <= 1e-12);

  auto zx = pauli_zx_measurements();
  zx.validate();
  CHECK((zx.at(1, 1) - zx.at(2, 1) - pauli_z()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((zx.at(1, 2) - zx.at(2, 2) - pauli_x()).cwiseAbs().maxCoeff() <= 1e-12);

  auto round_trip = measurements_from_projectors(zx.projectors());
  CHECK((round_trip.at(2, 2) - zx.at(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemblage_from_state") {
  // Bell state: tr_A[(M^T (x) 1)|phi+><phi+|] = M/2
  auto zx = pauli_zx_measurements();
  auto a = assemblage_from_state(max_entangled(2), zx.transposed());
  a.validate();
  for (int x = 1; x <= 2; ++x)
    for (int o = 1; o <= 2; ++o)
      CHECK((a.at(o, x) - 0.5 * zx.at(o, x)).cwiseAbs().maxCoeff() <= 1e-12);

  // isotropic: w M/2 + (1-w) 1/4
  const double w = 0.7;
  auto ai = assemblage_from_state(isotropic(2, w), zx.transposed());
  ai.validate();
  CHECK((ai.at(1, 1) - (w * 0.5 * zx.at(1, 1) + (1.0 - w) * 0.25 * identity(2)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  CHECK_THROWS(assemblage_from_state(ghz_state(), zx));
}

TEST_CASE("apply_loss and post_select round trip") {
  auto zx = pauli_zx_measurements();
  auto ideal = assemblage_from_state(max_entangled(2), zx.transposed());
  EfficiencyProfile eta{Eigen::Vector2d(0.6, 0.9)};

  auto lossy = apply_loss(ideal, eta);
  lossy.validate();
  CHECK(lossy.at(0, 1).trace().real() == doctest::Approx(0.4));
  CHECK(lossy.at(0, 2).trace().real() == doctest::Approx(0.1));
  CHECK((lossy.at(1, 1) - 0.6 * ideal.at(1, 1)).cwiseAbs().maxCoeff() <= 1e-12);
  // no-click member is (1-eta) rho_B = (1-eta) 1/2
  CHECK((lossy.at(0, 1) - 0.4 * 0.5 * identity(2)).cwiseAbs().maxCoeff() <= 1e-12);

  auto [recovered, eta_rec] = post_select(lossy);
  CHECK((eta_rec.etas - eta.etas).cwiseAbs().maxCoeff() <= 1e-12);
  for (int x = 1; x <= 2; ++x)
    for (int o = 1; o <= 2; ++o)
      CHECK((recovered.at(o, x) - ideal.at(o, x)).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS(apply_loss(lossy, eta));
  CHECK_THROWS(post_select(ideal));
  CHECK_THROWS(apply_loss(ideal, EfficiencyProfile{Eigen::Vector2d(1.2, 0.5)}));
}

TEST_CASE("steered projectors: maximally entangled state preserves overlaps") {
  // the support basis of the maximally mixed marginal is an arbitrary
  // eigenvector choice, so compare basis-independent quantities only
  auto zx = pauli_zx_measurements();
  auto sp = steered_projectors_for_pure_state(max_entangled(2), zx.projectors());
  CHECK(sp.support_dim == 2);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      CHECK(sp.probabilities[x][a] == doctest::Approx(0.5));
      CHECK((sp.projectors[x][a] * sp.projectors[x][a] - sp.projectors[x][a])
                .cwiseAbs()
                .maxCoeff() <= 1e-9);
    }
  CHECK(cos_theta(sp.projectors) ==
        doctest::Approx(cos_theta(zx.projectors())).epsilon(1e-9));
}

TEST_CASE("steered projectors: partially entangled state") {
  // |psi> = cos t |00> + sin t |11>
  const double t = 0.6;
  CVector v = CVector::Zero(4);
  v(0) = std::cos(t);
  v(3) = std::sin(t);
  QuantumState psi{{2, 2}, v * v.adjoint()};

  auto zx = pauli_zx_measurements();
  auto sp = steered_projectors_for_pure_state(psi, zx.projectors());
  CHECK(sp.support_dim == 2);
  for (int x = 0; x < 2; ++x) {
    double ptot = 0.0;
    for (int a = 0; a < 2; ++a) {
      const CMatrix& pi = sp.projectors[x][a];
      CHECK(is_hermitian(pi, 1e-10));
      CHECK((pi * pi - pi).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(std::abs(pi.trace().real() - 1.0) <= 1e-9);
      ptot += sp.probabilities[x][a];
    }
    CHECK(ptot == doctest::Approx(1.0));
  }
  // Z basis steers to the Z basis with weights cos^2 t, sin^2 t
  CHECK(sp.probabilities[0][0] == doctest::Approx(std::cos(t) * std::cos(t)));
  CHECK((sp.projectors[0][0] - ketbra(0, 0, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  // steered X projectors are tilted toward the larger Schmidt weight
  CHECK(sp.projectors[1][0](0, 0).real() > 0.5);

  CHECK_THROWS(steered_projectors_for_pure_state(isotropic(2, 0.5), zx.projectors()));
}

TEST_CASE("steered projectors: product state rejected for zero-weight outcomes") {
  // |0><0| (x) |0><0|: rho_B has rank 1, X outcomes each carry weight 1/2
  // on the support so the construction still works; the Z measurement on A
  // gives a deterministic outcome and the -1 branch has weight 0.
  CVector v = CVector::Zero(4);
  v(0) = 1.0;
  QuantumState prod{{2, 2}, v * v.adjoint()};
  auto zx = pauli_zx_measurements();
  CHECK_THROWS(steered_projectors_for_pure_state(prod, zx.projectors()));
}
