#include "steer/extension.hpp"

#include <cmath>
#include <stdexcept>

namespace steer {

void ExtensionModel::validate() const {
  if (probabilities.size() != static_cast<Eigen::Index>(strategies.size()) ||
      states.size() != strategies.size())
    throw std::invalid_argument("ExtensionModel: inconsistent sizes");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities(i);
    if (p < -1e-12) throw std::invalid_argument("ExtensionModel: negative weight");
    total += p;
    if (p > 1e-12) {
      if (!is_psd(states[i], 1e-9) ||
          std::abs(states[i].trace().real() - 1.0) > 1e-9)
        throw std::invalid_argument("ExtensionModel: state not normalized PSD");
    }
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("ExtensionModel: weights do not sum to 1");
}

ExtensionModel build_extension_model(const QuantumState& rho,
                                     const MeasurementSet& meas,
                                     const EfficiencyProfile& eta) {
  if (eta.etas.size() != meas.m)
    throw std::invalid_argument("build_extension_model: eta size mismatch");
  const double total_eta = eta.etas.sum();
  if (total_eta > 1.0 + 1e-9)
    throw std::invalid_argument(
        "build_extension_model: mean efficiency above 1/m, no model exists");

  Assemblage ideal = assemblage_from_state(rho, meas);
  CMatrix rho_b = CMatrix::Zero(ideal.d, ideal.d);
  for (int a = 1; a <= ideal.outcomes; ++a) rho_b += ideal.at(a, 1);

  ExtensionModel model;
  model.d = ideal.d;
  model.m = ideal.m;
  model.outcomes = ideal.outcomes;
  model.strategies = enumerate_strategies(ideal.m, ideal.outcomes, true);
  const int n = static_cast<int>(model.strategies.size());
  model.probabilities = Eigen::VectorXd::Zero(n);
  model.states.assign(n, CMatrix::Zero(ideal.d, ideal.d));

  // Branch decomposition: one branch per setting holding the real state
  // (consistent only with tuples that click on that setting alone) plus the
  // all-flag branch carrying the remaining weight on rho_b.
  for (int l = 0; l < n; ++l) {
    const auto& s = model.strategies[l];
    CMatrix sigma = CMatrix::Zero(ideal.d, ideal.d);
    if (s.no_click_count() == ideal.m) {
      sigma = (1.0 - total_eta) * rho_b;
    } else if (s.no_click_count() == ideal.m - 1) {
      for (int x = 1; x <= ideal.m; ++x)
        if (s.respond(x) != 0) sigma = eta.etas(x - 1) * ideal.at(s.respond(x), x);
    }
    const double p = sigma.trace().real();
    model.probabilities(l) = p;
    if (p > 1e-14) model.states[l] = sigma / p;
  }
  return model;
}

Assemblage induced_assemblage(const ExtensionModel& model) {
  Assemblage out = Assemblage::zeros(model.d, model.m, model.outcomes, true);
  for (std::size_t l = 0; l < model.strategies.size(); ++l) {
    const double p = model.probabilities(static_cast<Eigen::Index>(l));
    if (p <= 0.0) continue;
    for (int x = 1; x <= model.m; ++x)
      out.at(model.strategies[l].respond(x), x) += p * model.states[l];
  }
  return out;
}

IdealReductionReport ideal_reduction_check(const SteeringFunctional& f) {
  IdealReductionReport rep;
  rep.ideal_value = lhs_bound(f).value;
  auto ps = ps_lhs_bound(f, EfficiencyProfile::uniform(f.m, 1.0));
  rep.ps_value = ps.value;
  rep.difference = std::abs(rep.ideal_value - rep.ps_value);
  for (std::size_t l = 0; l < ps.strategies.size(); ++l)
    if (ps.strategies[l].no_click_count() > 0)
      rep.max_spurious_weight =
          std::max(rep.max_spurious_weight, ps.hidden_states[l].trace().real());
  return rep;
}

}  // namespace steer
