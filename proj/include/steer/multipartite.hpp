#ifndef STEER_MULTIPARTITE_HPP
#define STEER_MULTIPARTITE_HPP

#include <optional>
#include <vector>

#include "steer/conic.hpp"
#include "steer/scenario.hpp"
#include "steer/steering.hpp"
#include "steer/strategies.hpp"

namespace steer {

// Two untrusted parties steering one characterised party. Members are
// indexed (a, b, x, y); slot 0 in a or b is the no-click outcome when the
// a-priori flag is set.
struct TriAssemblage {
  int d = 0;
  int m = 0;         // settings per untrusted party
  int outcomes = 0;  // conclusive outcomes per untrusted party
  bool includes_no_click = false;
  std::vector<CMatrix> members;

  static TriAssemblage zeros(int d, int m, int outcomes, bool includes_no_click);
  const CMatrix& at(int a, int b, int x, int y) const;
  CMatrix& at(int a, int b, int x, int y);
  void validate() const;
};

struct TriSteeringFunctional {
  int d = 0;
  int m = 0;
  int outcomes = 0;
  double offset = 0.0;
  std::vector<CMatrix> ops;  // conclusive outcomes only

  static TriSteeringFunctional zeros(int d, int m, int outcomes);
  const CMatrix& at(int a, int b, int x, int y) const;
  CMatrix& at(int a, int b, int x, int y);
};

// Loss specification for two parties: joint per-setting-pair efficiencies
// plus the locally observed marginals.
struct EfficiencyProfile2 {
  Eigen::MatrixXd eta_ab;  // (x, y), coincidence efficiencies
  Eigen::VectorXd eta_a;
  Eigen::VectorXd eta_b;

  static EfficiencyProfile2 uncorrelated_isotropic(int m, double eta);
  static EfficiencyProfile2 ones(int m);
  // eta_ab within [max(eta_a+eta_b-1, 0), min(eta_a, eta_b)] entrywise
  bool frechet_consistent(double tol = 1e-9) const;
};

// One expectation-value term of a correlator inequality: +-1-valued
// observables for present settings, a fixed operator on the trusted side.
// Settings are 1-based; absent settings are distributed uniformly.
struct CorrelatorTerm {
  double coeff = 0.0;
  std::optional<int> alice_setting;
  std::optional<int> bob_setting;
  CMatrix charlie_op;  // identity for correlator-only terms
};

// F_{ab|xy} = sum coeff * sA(a) * sB(b) * O_C with signs (-1)^(outcome-1);
// terms lacking a party's setting are spread evenly over that party's
// settings; settings-free identity terms fold into the offset.
TriSteeringFunctional compile_correlators(const std::vector<CorrelatorTerm>& terms,
                                          int m, int d = 2);

// sigma_{ab|xy} = tr_{AB}[(M_{a|x} (x) M_{b|y} (x) 1) rho]
TriAssemblage tri_assemblage(const QuantumState& rho, const MeasurementSet& meas_a,
                             const MeasurementSet& meas_b);

double evaluate(const TriSteeringFunctional& f, const TriAssemblage& a);

struct TriBoundResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  double value = 0.0;
  ConicSolution solution;
};

// Ideal tripartite LHS bound over product deterministic strategies.
TriBoundResult tri_lhs_bound(const TriSteeringFunctional& f,
                             const SolveOptions& opts = {});

// Post-selected bound under the loss triple. Infeasible status means the
// triple admits no classical a-priori model at all.
TriBoundResult tri_ps_lhs_bound(const TriSteeringFunctional& f,
                                const EfficiencyProfile2& eta,
                                const SolveOptions& opts = {});

// Coefficient presets for the two bundled three-setting Pauli inequalities
// (settings 1, 2, 3 measure X, Y, Z). The W coefficient list is reproduced
// verbatim from its source and is suspected to carry a misprint: its ideal
// LHS bound is far from 0 and no single-term correction restores the
// published value. Use check_case_study_value to surface the discrepancy.
std::vector<CorrelatorTerm> ghz_inequality_terms();
std::vector<CorrelatorTerm> w_inequality_terms();

struct CaseStudyCheck {
  double expected = 0.0;
  double actual = 0.0;
  bool consistent = false;  // |actual - expected| <= tol
};

CaseStudyCheck check_case_study_value(const std::vector<CorrelatorTerm>& terms,
                                      const QuantumState& state, double expected,
                                      double tol = 0.01);

}  // namespace steer

#endif
