#ifndef STEER_SCENARIO_HPP
#define STEER_SCENARIO_HPP

#include <utility>
#include <vector>

#include "steer/matrix.hpp"
#include "steer/steering.hpp"

namespace steer {

struct QuantumState {
  std::vector<int> dims;
  CMatrix rho;

  void validate() const;  // PSD, trace 1
  int total_dim() const;
};

// m settings of d-outcome POVMs; elements indexed (a,x), a = 1..d.
struct MeasurementSet {
  int m = 0;
  int d = 0;
  std::vector<CMatrix> elements;  // layout [x-1][a-1]

  const CMatrix& at(int a, int x) const;
  CMatrix& at(int a, int x);
  void validate() const;  // PSD elements, completeness per setting
  MeasurementSet transposed() const;
  ProjectorSet projectors() const;
};

MeasurementSet measurements_from_projectors(const ProjectorSet& p);

QuantumState max_entangled(int d);
QuantumState isotropic(int d, double w);
QuantumState ghz_state();
QuantumState w_state();

// Eigenbasis measurements of X, Y, Z in that order; outcome 1 is the +1
// eigenvalue, outcome 2 the -1 eigenvalue.
MeasurementSet pauli_measurements();
// Z and X bases only (the qubit MUB pair used throughout the examples).
MeasurementSet pauli_zx_measurements();

// sigma_{a|x} = tr_A[(M_{a|x} (x) 1) rho] for a bipartite state.
Assemblage assemblage_from_state(const QuantumState& rho, const MeasurementSet& meas);

// A-priori assemblage with the no-click outcome: conclusive members scaled
// by eta_x, sigma0_{0|x} = (1-eta_x) rho_B.
Assemblage apply_loss(const Assemblage& ideal, const EfficiencyProfile& eta);

// Renormalized conclusive part plus the recovered per-setting efficiencies.
std::pair<Assemblage, EfficiencyProfile> post_select(const Assemblage& apriori);

struct SteeredProjectors {
  ProjectorSet projectors;                     // on the support of rho_B
  std::vector<std::vector<double>> probabilities;  // [x-1][a-1]
  int support_dim = 0;
};

// Pi' = sqrt(rho_B) Pi sqrt(rho_B) / tr[rho_B Pi] for a pure bipartite state;
// restricts to the support of rho_B when the marginal is rank-deficient.
SteeredProjectors steered_projectors_for_pure_state(const QuantumState& psi,
                                                    const ProjectorSet& projectors);

}  // namespace steer

#endif
