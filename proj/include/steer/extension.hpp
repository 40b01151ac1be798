#ifndef STEER_EXTENSION_HPP
#define STEER_EXTENSION_HPP

#include <vector>

#include "steer/scenario.hpp"
#include "steer/steering.hpp"
#include "steer/strategies.hpp"

namespace steer {

// Classical model indexed by outcome tuples (one a-priori strategy per
// tuple): on input x the model outputs the tuple's entry for x and hands
// over the state attached to the tuple.
struct ExtensionModel {
  int d = 0;
  int m = 0;
  int outcomes = 0;
  std::vector<DeterministicStrategy> strategies;  // all (outcomes+1)^m tuples
  Eigen::VectorXd probabilities;                  // aligned, sums to 1
  std::vector<CMatrix> states;                    // trace 1 where p > 0

  void validate() const;
};

// Explicit model reproducing the lossy assemblage of (rho, meas) at
// per-setting efficiencies eta. Exists only for sum_x eta_x <= 1.
ExtensionModel build_extension_model(const QuantumState& rho,
                                     const MeasurementSet& meas,
                                     const EfficiencyProfile& eta);

// sigma0_{a|x} = sum over tuples responding a to x of p * state.
Assemblage induced_assemblage(const ExtensionModel& model);

struct IdealReductionReport {
  double ideal_value = 0.0;
  double ps_value = 0.0;
  double difference = 0.0;           // |ideal - ps at eta = 1|
  double max_spurious_weight = 0.0;  // largest trace on a no-click strategy
  bool ok(double tol = 1e-6) const {
    return difference <= tol && max_spurious_weight <= 1e-7;
  }
};

// Certifies that the a-priori program at eta = 1 collapses to the ideal one.
IdealReductionReport ideal_reduction_check(const SteeringFunctional& f);

}  // namespace steer

#endif
