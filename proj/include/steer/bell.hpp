#ifndef STEER_BELL_HPP
#define STEER_BELL_HPP

#include <functional>
#include <vector>

#include "steer/conic.hpp"
#include "steer/multipartite.hpp"
#include "steer/scenario.hpp"

namespace steer {

// Joint outcome table P(ab|xy); slot 0 is the no-click outcome when the
// a-priori flag is set.
struct Behaviour {
  int m = 0;
  int d = 0;
  bool includes_no_click = false;
  std::vector<double> p;

  static Behaviour zeros(int m, int d, bool includes_no_click);
  double at(int a, int b, int x, int y) const;
  double& at(int a, int b, int x, int y);
  void validate() const;  // nonnegative, normalized per setting pair
};

struct BellFunctional {
  int m = 0;
  int d = 0;
  double offset = 0.0;
  std::vector<double> coeffs;  // conclusive outcomes only

  static BellFunctional zeros(int m, int d);
  double at(int a, int b, int x, int y) const;
  double& at(int a, int b, int x, int y);
};

double evaluate(const BellFunctional& f, const Behaviour& b);

// Exact LHV bound by enumeration of local deterministic product strategies.
double lhv_bound(const BellFunctional& f);

// Maximum over all behaviours (signalling included): sum of per-setting-pair
// maxima. When the post-selected LHV bound reaches this value, no test is
// possible at any level of the theory.
double algebraic_max(const BellFunctional& f);

// Same bound through the conic solver (LP over strategy weights).
double lhv_bound_lp(const BellFunctional& f, const SolveOptions& opts = {});

struct PsLhvResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  double value = 0.0;
  ConicSolution solution;
};

// Post-selected LHV bound under a loss triple; scalar LP over the
// (d+1)^(2m) a-priori product strategies. Infeasible status means the
// triple admits no classical model.
PsLhvResult ps_lhv_bound(const BellFunctional& f, const EfficiencyProfile2& eta,
                         const SolveOptions& opts = {});

// I_alpha = alpha<A1B1 + A2B1> + <A1B2 - A2B2>; alpha = 1 is CHSH.
BellFunctional tilted_chsh(double alpha);

Behaviour behaviour_from_state(const QuantumState& rho, const MeasurementSet& meas_a,
                               const MeasurementSet& meas_b);

// Qubit measurements of cos(t) Z + sin(t) X, one setting per angle; outcome
// 1 is the +1 eigenvalue.
MeasurementSet xz_plane_measurements(const std::vector<double>& angles);

struct QuantumMaxResult {
  double value = 0.0;
  double theta = 0.0;              // state cos(theta)|00> + sin(theta)|11>
  Eigen::Vector4d angles;          // a1, a2, b1, b2 in the X-Z plane
};

// Deterministic compass search over the Schmidt angle and four X-Z plane
// measurement angles. product_only pins theta = 0 (separable sanity mode).
QuantumMaxResult quantum_max_tilted(double alpha, bool product_only = false);

// Loss presets for the two-party Bell scenario.
EfficiencyProfile2 one_sided_profile(int m, double eta);             // Alice ideal
EfficiencyProfile2 perfectly_correlated_profile(int m, double eta);  // eta_ab = eta

// Smallest eta (tol 1e-4) where the post-selected bound drops below the
// quantum value; returns 1.0+ sentinel handling via the bool flag.
struct CriticalEtaResult {
  bool found = false;
  double eta = 1.0;
};
CriticalEtaResult critical_eta(const BellFunctional& f, double quantum_value,
                               const std::function<EfficiencyProfile2(double)>& profile,
                               double tol = 1e-4);

}  // namespace steer

#endif
