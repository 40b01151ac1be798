#include "doctest.h"

#include <cmath>
#include <random>

#include "steer/extension.hpp"

using namespace steer;

namespace {

double max_entry_diff(const Assemblage& a, const Assemblage& b) {
  double worst = 0.0;
  for (int x = 1; x <= a.m; ++x)
    for (int o = a.includes_no_click ? 0 : 1; o <= a.outcomes; ++o)
      worst = std::max(worst, (a.at(o, x) - b.at(o, x)).cwiseAbs().maxCoeff());
  return worst;
}

QuantumState random_two_qubit_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix h(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = h * h.adjoint();
  rho /= rho.trace().real();
  return {{2, 2}, rho};
}

}  // namespace

TEST_CASE("model reproduces the lossy Bell assemblage at eta = (0.5, 0.5)") {
  auto zx = pauli_zx_measurements();
  EfficiencyProfile eta = EfficiencyProfile::uniform(2, 0.5);
  auto model = build_extension_model(max_entangled(2), zx.transposed(), eta);
  model.validate();
  auto lossy = apply_loss(assemblage_from_state(max_entangled(2), zx.transposed()), eta);
  CHECK(max_entry_diff(induced_assemblage(model), lossy) <= 1e-12);

  // all-flag tuple carries zero weight at sum eta = 1
  for (std::size_t l = 0; l < model.strategies.size(); ++l)
    if (model.strategies[l].no_click_count() == 2)
      CHECK(model.probabilities(static_cast<Eigen::Index>(l)) <= 1e-14);
}

TEST_CASE("asymmetric weights eta = (0.6, 0.4)") {
  auto zx = pauli_zx_measurements();
  EfficiencyProfile eta{Eigen::Vector2d(0.6, 0.4)};
  auto model = build_extension_model(max_entangled(2), zx.transposed(), eta);
  model.validate();
  auto lossy = apply_loss(assemblage_from_state(max_entangled(2), zx.transposed()), eta);
  CHECK(max_entry_diff(induced_assemblage(model), lossy) <= 1e-12);
}

TEST_CASE("all-flag mixing below threshold, eta = (0.3, 0.3)") {
  auto zx = pauli_zx_measurements();
  EfficiencyProfile eta = EfficiencyProfile::uniform(2, 0.3);
  auto model = build_extension_model(max_entangled(2), zx.transposed(), eta);
  model.validate();
  double flag_weight = 0.0;
  for (std::size_t l = 0; l < model.strategies.size(); ++l)
    if (model.strategies[l].no_click_count() == 2)
      flag_weight += model.probabilities(static_cast<Eigen::Index>(l));
  CHECK(flag_weight == doctest::Approx(0.4).epsilon(1e-12));
  auto lossy = apply_loss(assemblage_from_state(max_entangled(2), zx.transposed()), eta);
  CHECK(max_entry_diff(induced_assemblage(model), lossy) <= 1e-12);
}

TEST_CASE("model rejected above threshold") {
  auto zx = pauli_zx_measurements();
  CHECK_THROWS(build_extension_model(max_entangled(2), zx.transposed(),
                                     EfficiencyProfile::uniform(2, 0.51)));
}

TEST_CASE("randomized reproduction at mean eta <= 1/m") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto rho = random_two_qubit_state(rng);
    auto meas = (rep % 2 == 0) ? pauli_zx_measurements() : pauli_measurements();
    const int m = meas.m;
    Eigen::VectorXd e(m);
    for (int x = 0; x < m; ++x) e(x) = u(rng);
    e *= u(rng) / e.sum();  // total in (0, 1]
    EfficiencyProfile eta{e};
    auto model = build_extension_model(rho, meas, eta);
    model.validate();
    auto lossy = apply_loss(assemblage_from_state(rho, meas), eta);
    CHECK(max_entry_diff(induced_assemblage(model), lossy) <= 1e-12);
  }
}

TEST_CASE("model saturates the SDP bound at the threshold") {
  // F = eta_x Pi with mean eta = 1/m: the classical model reaches the value
  // m<eta> = 1, so the post-selected bound cannot separate it from quantum.
  auto zx = pauli_zx_measurements();
  EfficiencyProfile eta = EfficiencyProfile::uniform(2, 0.5);
  auto f = projective_functional(zx.projectors(), eta);
  auto model = build_extension_model(max_entangled(2), zx.transposed(), eta);
  auto [ps, eta_rec] = post_select(induced_assemblage(model));
  double model_value = evaluate(f, ps);
  double sdp = ps_lhs_bound(f, eta).value;
  CHECK(model_value == doctest::Approx(sdp).epsilon(1e-6));
  CHECK(model_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("per-setting efficiencies recovered exactly") {
  auto p3 = pauli_measurements();
  EfficiencyProfile eta{Eigen::Vector3d(0.2, 0.35, 0.3)};
  auto model = build_extension_model(max_entangled(2), p3.transposed(), eta);
  auto induced = induced_assemblage(model);
  for (int x = 1; x <= 3; ++x)
    CHECK(induced.at(0, x).trace().real() ==
          doctest::Approx(1.0 - eta.etas(x - 1)).epsilon(1e-12));
}

TEST_CASE("ideal_reduction_check") {
  auto zx = pauli_zx_measurements();
  auto f = projective_functional(zx.projectors(), EfficiencyProfile::uniform(2, 1.0));
  auto rep = ideal_reduction_check(f);
  CHECK(rep.ok());
  CHECK(rep.ideal_value == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-6));

  auto f3 = projective_functional(pauli_measurements().projectors(),
                                  EfficiencyProfile::uniform(3, 1.0));
  auto rep3 = ideal_reduction_check(f3);
  CHECK(rep3.ok());

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  SteeringFunctional fr = SteeringFunctional::zeros(2, 2, 2);
  for (int x = 1; x <= 2; ++x)
    for (int a = 1; a <= 2; ++a) {
      CMatrix h(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) h(i, j) = Complex(g(rng), g(rng));
      fr.at(a, x) = 0.5 * (h + CMatrix(h.adjoint()));
    }
  CHECK(ideal_reduction_check(fr).ok());
}
