#include "steer/scenario_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steer/extension.hpp"

namespace steer {

using nlohmann::json;

namespace {

CMatrix named_qubit_op(const std::string& name) {
  CMatrix op(2, 2);
  const std::complex<double> i(0.0, 1.0);
  if (name == "I") op << 1, 0, 0, 1;
  else if (name == "X") op << 0, 1, 1, 0;
  else if (name == "Y") op << 0, -i, i, 0;
  else if (name == "Z") op << 1, 0, 0, -1;
  else throw ScenarioParseError("unknown operator name: " + name);
  return op;
}

QuantumState parse_state(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "max_entangled") return max_entangled(j.value("d", 2));
  if (name == "isotropic") return isotropic(j.value("d", 2), j.at("w").get<double>());
  if (name == "ghz") return ghz_state();
  if (name == "w") return w_state();
  throw ScenarioParseError("unknown state name: " + name);
}

MeasurementSet parse_measurements(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "pauli") return pauli_measurements();
  if (name == "pauli_zx") return pauli_zx_measurements();
  throw ScenarioParseError("unknown measurement set: " + name);
}

std::vector<CorrelatorTerm> parse_terms(const json& arr, bool with_charlie) {
  if (!arr.is_array()) throw ScenarioParseError("terms must be an array");
  std::vector<CorrelatorTerm> out;
  for (const auto& t : arr) {
    CorrelatorTerm term;
    term.coeff = t.at("coeff").get<double>();
    if (t.contains("alice_setting")) term.alice_setting = t.at("alice_setting").get<int>();
    if (t.contains("bob_setting")) term.bob_setting = t.at("bob_setting").get<int>();
    if (with_charlie)
      term.charlie_op = named_qubit_op(t.value("charlie_op", std::string("I")));
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

EfficiencyProfile2 Scenario::profile(double eta) const {
  const int m = (kind == ScenarioKind::Bell) ? bell.m : 3;
  if (preset == "uncorrelated-isotropic")
    return EfficiencyProfile2::uncorrelated_isotropic(m, eta);
  if (preset == "one-sided") return one_sided_profile(m, eta);
  if (preset == "perfectly-correlated") return perfectly_correlated_profile(m, eta);
  throw ScenarioParseError("unknown efficiency preset: " + preset);
}

BellFunctional compile_bell_terms(const std::vector<CorrelatorTerm>& terms, int m,
                                  int d) {
  if (d != 2)
    throw std::invalid_argument("compile_bell_terms: only binary outcomes supported");
  BellFunctional f = BellFunctional::zeros(m, d);
  for (const auto& t : terms) {
    auto check = [m](const std::optional<int>& s) {
      if (s && (*s < 1 || *s > m))
        throw std::invalid_argument("compile_bell_terms: setting out of range");
    };
    check(t.alice_setting);
    check(t.bob_setting);
    if (!t.alice_setting && !t.bob_setting) {
      f.offset += t.coeff;
      continue;
    }
    const double w =
        t.coeff / ((t.alice_setting ? 1.0 : m) * (t.bob_setting ? 1.0 : m));
    for (int x = 1; x <= m; ++x) {
      if (t.alice_setting && *t.alice_setting != x) continue;
      for (int y = 1; y <= m; ++y) {
        if (t.bob_setting && *t.bob_setting != y) continue;
        for (int a = 1; a <= d; ++a)
          for (int b = 1; b <= d; ++b) {
            // a party without a setting contributes its normalization: the
            // sum over its outcomes reproduces the other party's marginal
            const double sa = t.alice_setting ? ((a == 1) ? 1.0 : -1.0) : 1.0;
            const double sb = t.bob_setting ? ((b == 1) ? 1.0 : -1.0) : 1.0;
            f.at(a, b, x, y) += w * sa * sb;
          }
      }
    }
  }
  return f;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(e.what());
  }
  try {
    Scenario s;
    s.canonical = j.dump();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "steering") {
      s.kind = ScenarioKind::Steering;
      s.state = parse_state(j.at("state"));
      s.measurements = parse_measurements(j.at("measurements"));
      const auto& eff = j.at("efficiency");
      if (eff.contains("etas")) {
        const auto v = eff.at("etas").get<std::vector<double>>();
        if (static_cast<int>(v.size()) != s.measurements.m)
          throw ScenarioParseError("efficiency vector length != settings");
        s.etas = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
      } else {
        s.etas = Eigen::VectorXd::Constant(s.measurements.m,
                                           eff.value("eta", 1.0));
      }
    } else if (kind == "tripartite") {
      s.kind = ScenarioKind::Tripartite;
      s.state = parse_state(j.at("state"));
      s.measurements = pauli_measurements();
      const auto& fn = j.at("functional");
      const std::string fname = fn.at("name").get<std::string>();
      if (fname == "ghz") s.terms = ghz_inequality_terms();
      else if (fname == "w") s.terms = w_inequality_terms();
      else if (fname == "terms") s.terms = parse_terms(fn.at("terms"), true);
      else throw ScenarioParseError("unknown tripartite functional: " + fname);
      if (j.contains("efficiency")) {
        s.preset = j.at("efficiency").value("preset",
                                            std::string("uncorrelated-isotropic"));
        s.eta_scalar = j.at("efficiency").value("eta", 1.0);
      }
    } else if (kind == "bell") {
      s.kind = ScenarioKind::Bell;
      const auto& fn = j.at("functional");
      const std::string fname = fn.at("name").get<std::string>();
      if (fname == "tilted_chsh") {
        s.alpha = fn.value("alpha", 1.0);
        s.has_alpha = true;
        s.bell = tilted_chsh(s.alpha);
      } else if (fname == "terms") {
        s.bell = compile_bell_terms(parse_terms(fn.at("terms"), false),
                                    fn.value("m", 2));
      } else {
        throw ScenarioParseError("unknown bell functional: " + fname);
      }
      if (j.contains("efficiency")) {
        s.preset = j.at("efficiency").value("preset",
                                            std::string("uncorrelated-isotropic"));
        s.eta_scalar = j.at("efficiency").value("eta", 1.0);
      }
    } else {
      throw ScenarioParseError("unknown kind: " + kind);
    }
    if (j.contains("sweep")) {
      const auto& sw = j.at("sweep");
      if (sw.value("parameter", std::string("eta")) != "eta")
        throw ScenarioParseError("only eta sweeps are supported");
      SweepSpec spec;
      spec.from = sw.at("from").get<double>();
      spec.to = sw.at("to").get<double>();
      spec.steps = sw.at("steps").get<int>();
      if (spec.steps < 2 || spec.from <= 0.0 || spec.to > 1.0 + 1e-12 ||
          spec.from > spec.to)
        throw ScenarioParseError("invalid sweep range");
      s.sweep = spec;
    }
    // reject malformed inputs eagerly so solver stages see valid data only
    if (s.kind == ScenarioKind::Steering)
      for (int x = 0; x < s.etas.size(); ++x)
        if (!(s.etas(x) > 0.0) || s.etas(x) > 1.0)
          throw ScenarioParseError("efficiencies must lie in (0,1]");
    return s;
  } catch (const json::exception& e) {
    throw ScenarioParseError(e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

BoundRecord compute_bound(const Scenario& s, double eta, const SolveOptions& opts) {
  BoundRecord r;
  try {
    if (s.kind == ScenarioKind::Steering) {
      Eigen::VectorXd etas =
          eta < 0.0 ? s.etas : Eigen::VectorXd::Constant(s.measurements.m, eta);
      EfficiencyProfile prof{etas};
      auto projectors = s.measurements.projectors();
      auto f = projective_functional(projectors, prof);
      auto res = ps_lhs_bound(f, prof, opts);
      r.status = res.solution.status;
      r.bound = res.value;
      r.gap = res.solution.gap;
      r.analytic = analytic_upper_bound(s.measurements.m, cos_theta(projectors),
                                        prof.mean());
      auto lossy = apply_loss(assemblage_from_state(s.state, s.measurements.transposed()),
                              prof);
      r.quantum = evaluate(f, post_select(lossy).first);
    } else if (s.kind == ScenarioKind::Tripartite) {
      auto f = compile_correlators(s.terms, 3);
      auto res = tri_ps_lhs_bound(f, s.profile(eta < 0.0 ? s.eta_scalar : eta), opts);
      r.status = res.status;
      r.bound = res.value;
      r.gap = res.solution.gap;
      r.quantum = evaluate(f, tri_assemblage(s.state, s.measurements, s.measurements));
    } else {
      auto res = ps_lhv_bound(s.bell, s.profile(eta < 0.0 ? s.eta_scalar : eta), opts);
      r.status = res.status;
      r.bound = res.value;
      r.gap = res.solution.gap;
      if (s.has_alpha) r.quantum = quantum_max_tilted(s.alpha).value;
    }
  } catch (const std::exception&) {
    r.failed = true;
    r.status = SolveStatus::NumericalFailure;
    return r;
  }
  if (r.status != SolveStatus::Optimal && r.status != SolveStatus::Infeasible)
    r.failed = true;
  r.violated = !r.failed && r.status == SolveStatus::Optimal && r.quantum &&
               *r.quantum > r.bound + 1e-7;
  return r;
}

std::string format_sig(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

std::string scenario_hash_hex(const Scenario& s) {
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s.canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Steering: return "steering";
    case ScenarioKind::Tripartite: return "tripartite";
    default: return "bell";
  }
}

}  // namespace

std::string bound_json(const Scenario& s, const BoundRecord& r) {
  json j;
  j["kind"] = kind_name(s.kind);
  j["scenario_hash"] = scenario_hash_hex(s);
  j["status"] = r.failed ? "failed" : to_string(r.status);
  if (!r.failed) {
    j["bound"] = json::parse(format_sig(r.bound));
    j["gap"] = json::parse(format_sig(r.gap));
    if (r.analytic) j["analytic_upper_bound"] = json::parse(format_sig(*r.analytic));
    if (r.quantum) j["quantum_value"] = json::parse(format_sig(*r.quantum));
    j["violated"] = r.violated;
  }
  return j.dump(2) + "\n";
}

std::string sweep_csv(const Scenario& s, const SolveOptions& opts) {
  if (!s.sweep) throw std::invalid_argument("scenario has no sweep block");
  std::ostringstream out;
  out << "# scenario-hash: " << scenario_hash_hex(s) << "\n";
  out << "# kind: " << kind_name(s.kind) << "\n";
  out << "# conventions: outcome 1 -> +1, outcome 2 -> -1; floats at 12 "
         "significant digits\n";
  out << "eta,bound,quantum_value,violated\n";
  const auto& sw = *s.sweep;
  for (int i = 0; i < sw.steps; ++i) {
    const double e = sw.from + (sw.to - sw.from) * i / (sw.steps - 1);
    auto r = compute_bound(s, e, opts);
    out << format_sig(e) << ",";
    if (r.failed) out << "failed";
    else if (r.status == SolveStatus::Infeasible) out << "infeasible";
    else out << format_sig(r.bound);
    out << "," << (r.quantum ? format_sig(*r.quantum) : "") << ","
        << (r.violated ? "true" : "false") << "\n";
  }
  return out.str();
}

namespace {

void report(VerifyReport& rep, const std::string& name, bool ok,
            const std::string& detail = "") {
  ++rep.checks;
  if (!ok) ++rep.failures;
  rep.text += std::string(ok ? "PASS" : "FAIL") + "  " + name;
  if (!detail.empty()) rep.text += "  (" + detail + ")";
  rep.text += "\n";
}

}  // namespace

VerifyReport verify_scenario(const Scenario& s, const SolveOptions& opts,
                             unsigned seed) {
  VerifyReport rep;
  if (s.kind == ScenarioKind::Steering) {
    auto projectors = s.measurements.projectors();
    EfficiencyProfile prof{s.etas};
    auto f = projective_functional(projectors, prof);

    auto red = ideal_reduction_check(f);
    report(rep, "ideal-case reduction", red.ok(),
           "diff " + format_sig(red.difference, 3));

    // one randomized functional through the same reduction
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    SteeringFunctional rf = SteeringFunctional::zeros(f.d, f.m, f.outcomes);
    for (int x = 1; x <= f.m; ++x)
      for (int a = 1; a <= f.outcomes; ++a) {
        CMatrix g(f.d, f.d);
        for (int i = 0; i < f.d; ++i)
          for (int k = 0; k < f.d; ++k) g(i, k) = {gauss(rng), gauss(rng)};
        rf.at(a, x) = 0.5 * (g + g.adjoint());
      }
    auto rred = ideal_reduction_check(rf);
    report(rep, "randomized reduction", rred.ok(),
           "diff " + format_sig(rred.difference, 3));

    auto res = ps_lhs_bound(f, prof, opts);
    const bool sound = res.solution.status == SolveStatus::Optimal &&
                       res.solution.gap <= 1e-7 &&
                       res.solution.primal_residual <= 1e-8 &&
                       res.solution.dual_residual <= 1e-8;
    report(rep, "solver certificate", sound, "gap " + format_sig(res.solution.gap, 3));

    if (s.etas.sum() <= 1.0 + 1e-9) {
      auto model = build_extension_model(s.state, s.measurements.transposed(), prof);
      auto induced = induced_assemblage(model);
      auto lossy = apply_loss(assemblage_from_state(s.state, s.measurements.transposed()),
                              prof);
      double dev = 0.0;
      for (int x = 1; x <= f.m; ++x)
        for (int a = 0; a <= f.outcomes; ++a)
          dev = std::max(dev,
                         (induced.at(a, x) - lossy.at(a, x)).cwiseAbs().maxCoeff());
      report(rep, "classical model reproduces lossy assemblage", dev <= 1e-10,
             "max dev " + format_sig(dev, 3));

      if (std::abs(prof.mean() - 1.0 / f.m) <= 1e-9) {
        const double achieved = evaluate(f, post_select(induced).first);
        report(rep, "oracle saturation at the threshold",
               std::abs(achieved - res.value) <= 1e-6,
               "model " + format_sig(achieved, 9) + " vs bound " +
                   format_sig(res.value, 9));
      }
    }
  } else if (s.kind == ScenarioKind::Tripartite) {
    auto f = compile_correlators(s.terms, 3);
    auto ideal = tri_lhs_bound(f, opts);
    auto ps1 = tri_ps_lhs_bound(f, EfficiencyProfile2::ones(3), opts);
    report(rep, "ideal-case reduction",
           ps1.status == SolveStatus::Optimal &&
               std::abs(ps1.value - ideal.value) <= 1e-6,
           "diff " + format_sig(std::abs(ps1.value - ideal.value), 3));

    auto res = tri_ps_lhs_bound(f, s.profile(s.eta_scalar), opts);
    const bool sound = (res.status == SolveStatus::Optimal ||
                        res.status == SolveStatus::Infeasible) &&
                       res.solution.gap <= 1e-7;
    report(rep, "solver certificate", sound, to_string(res.status));
  } else {
    const double lhv = lhv_bound(s.bell);
    report(rep, "LP enumeration agreement",
           std::abs(lhv_bound_lp(s.bell, opts) - lhv) <= 1e-7);
    auto ps1 = ps_lhv_bound(s.bell, EfficiencyProfile2::ones(s.bell.m), opts);
    report(rep, "ideal-case reduction",
           ps1.status == SolveStatus::Optimal && std::abs(ps1.value - lhv) <= 1e-8,
           "diff " + format_sig(std::abs(ps1.value - lhv), 3));
    auto res = ps_lhv_bound(s.bell, s.profile(s.eta_scalar), opts);
    report(rep, "post-selected bound dominates ideal",
           res.status == SolveStatus::Infeasible || res.value >= lhv - 1e-8);
    if (s.preset == "perfectly-correlated") {
      double worst = 0.0;
      for (int i = 1; i <= 10; ++i) {
        auto r = ps_lhv_bound(s.bell, s.profile(0.1 * i), opts);
        worst = std::max(worst, std::abs(r.value - lhv));
      }
      report(rep, "correlated loss keeps the ideal bound", worst <= 1e-7,
             "max dev " + format_sig(worst, 3));
    }
  }
  return rep;
}

}  // namespace steer
