#ifndef STEER_STEERING_HPP
#define STEER_STEERING_HPP

#include <optional>
#include <utility>
#include <vector>

#include "steer/conic.hpp"
#include "steer/matrix.hpp"
#include "steer/strategies.hpp"

namespace steer {

// Family of subnormalized conditional states sigma_{a|x} on Bob's side.
// Conclusive outcomes are 1..outcomes; slot 0 holds the no-click member
// when includes_no_click is set.
struct Assemblage {
  int d = 0;         // Bob's Hilbert dimension
  int m = 0;         // number of settings
  int outcomes = 0;  // conclusive outcome count
  bool includes_no_click = false;
  std::vector<CMatrix> members;  // layout [x-1][a], a = 0..outcomes

  static Assemblage zeros(int d, int m, int outcomes, bool includes_no_click);
  const CMatrix& at(int a, int x) const;
  CMatrix& at(int a, int x);
  // PSD members and per-setting normalization (tol 1e-9 / 1e-8).
  void validate() const;
};

// Linear steering functional: offset + tr sum_{a,x} F_{a|x} sigma_{a|x}.
struct SteeringFunctional {
  int d = 0;
  int m = 0;
  int outcomes = 0;
  double offset = 0.0;
  std::vector<CMatrix> ops;  // layout [x-1][a-1], conclusive outcomes only

  static SteeringFunctional zeros(int d, int m, int outcomes);
  const CMatrix& at(int a, int x) const;
  CMatrix& at(int a, int x);
};

struct EfficiencyProfile {
  Eigen::VectorXd etas;  // per setting, entries in [0,1]

  static EfficiencyProfile uniform(int m, double eta);
  double mean() const { return etas.mean(); }
};

// Rank-1 projectors per setting: projectors[x-1][a-1].
using ProjectorSet = std::vector<std::vector<CMatrix>>;

struct DualCertificate {
  double mu = 0.0;
  Eigen::VectorXd nus;
  double value = 0.0;
};

struct LhsBoundResult {
  double value = 0.0;
  std::vector<DeterministicStrategy> strategies;
  std::vector<CMatrix> hidden_states;  // aligned with strategies
  ConicSolution solution;
};

double evaluate(const SteeringFunctional& f, const Assemblage& a);

// Ideal LHS bound: max over LHS assemblages, one PSD block per ideal strategy.
LhsBoundResult lhs_bound(const SteeringFunctional& f);

// Post-selected LHS bound at efficiencies eta (all eta_x in (0,1]).
LhsBoundResult ps_lhs_bound(const SteeringFunctional& f, const EfficiencyProfile& eta,
                            const SolveOptions& opts = {});

// Explicit dual program: min mu + sum_x nu_x (1-eta_x) over the PSD constraints.
std::pair<double, DualCertificate> ps_lhs_bound_dual(const SteeringFunctional& f,
                                                     const EfficiencyProfile& eta,
                                                     const SolveOptions& opts = {});

// F_{a|x} = eta_x Pi_{a|x} with rank-1 projector checks.
SteeringFunctional projective_functional(const ProjectorSet& projectors,
                                         const EfficiencyProfile& eta);

// Maximal cross-measurement overlap sqrt(tr[Pi Pi']).
double cos_theta(const ProjectorSet& projectors);

// (1 - cos theta) + m <eta> cos theta
double analytic_upper_bound(int m, double cos_th, double mean_eta);

// Isotropic-noise threshold on <eta>; nullopt when no efficiency suffices.
std::optional<double> critical_mean_eta(int m, double cos_th, double w, int d);

// Recover the complex matrix from its real embedding.
CMatrix unembed_hermitian(const Eigen::MatrixXd& e);

}  // namespace steer

#endif
