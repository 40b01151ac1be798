#ifndef STEER_SCENARIO_IO_HPP
#define STEER_SCENARIO_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steer/bell.hpp"
#include "steer/multipartite.hpp"
#include "steer/scenario.hpp"
#include "steer/steering.hpp"

namespace steer {

// JSON scenario schema (see README for the full grammar):
//   { "kind": "steering" | "tripartite" | "bell",
//     "state": {"name": ..., ...},
//     "measurements": {"name": "pauli" | "pauli_zx"},
//     "functional": {"name": ..., ...},
//     "efficiency": {"etas": [...]} or {"preset": ..., "eta": e},
//     "sweep": {"parameter": "eta", "from": a, "to": b, "steps": n} }

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Steering, Tripartite, Bell };

struct SweepSpec {
  double from = 0.0;
  double to = 1.0;
  int steps = 2;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::Steering;
  std::string canonical;  // sorted-key compact serialization, hashed in outputs

  QuantumState state;          // steering and tripartite
  MeasurementSet measurements; // Alice's side (both untrusted sides for tripartite)
  Eigen::VectorXd etas;        // steering per-setting efficiencies

  std::vector<CorrelatorTerm> terms;  // tripartite functional
  BellFunctional bell;

  // loss-triple presets for tripartite/bell
  std::string preset = "uncorrelated-isotropic";
  double eta_scalar = 1.0;

  double alpha = 1.0;
  bool has_alpha = false;  // tilted-CHSH family, quantum value computable

  std::optional<SweepSpec> sweep;

  EfficiencyProfile2 profile(double eta) const;  // preset applied at eta
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Correlator terms without a trusted-side operator; the coefficient layout
// matches compile_correlators (absent settings spread uniformly).
BellFunctional compile_bell_terms(const std::vector<CorrelatorTerm>& terms, int m,
                                  int d = 2);

struct BoundRecord {
  SolveStatus status = SolveStatus::NumericalFailure;
  bool failed = false;  // solver threw or returned a non-result status
  double bound = 0.0;
  double gap = 0.0;
  std::optional<double> analytic;  // steering only
  std::optional<double> quantum;
  bool violated = false;  // quantum > bound + 1e-7
};

// eta < 0 means "use the efficiencies stored in the scenario".
BoundRecord compute_bound(const Scenario& s, double eta = -1.0,
                          const SolveOptions& opts = {});

std::string format_sig(double v, int significant = 12);
std::string scenario_hash_hex(const Scenario& s);

std::string bound_json(const Scenario& s, const BoundRecord& r);
std::string sweep_csv(const Scenario& s, const SolveOptions& opts = {});

struct VerifyReport {
  int checks = 0;
  int failures = 0;
  std::string text;  // one line per check
};

VerifyReport verify_scenario(const Scenario& s, const SolveOptions& opts = {},
                             unsigned seed = 1);

}  // namespace steer

#endif
