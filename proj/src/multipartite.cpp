#include "steer/multipartite.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace steer {

namespace {

std::size_t tri_index(int a, int b, int x, int y, int m, int stride) {
  return ((static_cast<std::size_t>(x - 1) * m + (y - 1)) * stride + a) * stride + b;
}

void check_tri_index(int a, int b, int x, int y, int m, int outcomes, bool with_zero) {
  const int lo = with_zero ? 0 : 1;
  if (x < 1 || x > m || y < 1 || y > m || a < lo || a > outcomes || b < lo ||
      b > outcomes)
    throw std::out_of_range("tripartite index out of range");
}

}  // namespace

TriAssemblage TriAssemblage::zeros(int d, int m, int outcomes, bool includes_no_click) {
  TriAssemblage t;
  t.d = d; t.m = m; t.outcomes = outcomes; t.includes_no_click = includes_no_click;
  const std::size_t stride = outcomes + 1;
  t.members.assign(static_cast<std::size_t>(m) * m * stride * stride,
                   CMatrix::Zero(d, d));
  return t;
}

const CMatrix& TriAssemblage::at(int a, int b, int x, int y) const {
  check_tri_index(a, b, x, y, m, outcomes, includes_no_click);
  return members[tri_index(a, b, x, y, m, outcomes + 1)];
}

CMatrix& TriAssemblage::at(int a, int b, int x, int y) {
  check_tri_index(a, b, x, y, m, outcomes, includes_no_click);
  return members[tri_index(a, b, x, y, m, outcomes + 1)];
}

void TriAssemblage::validate() const {
  const int lo = includes_no_click ? 0 : 1;
  for (int x = 1; x <= m; ++x)
    for (int y = 1; y <= m; ++y) {
      double total = 0.0;
      for (int a = lo; a <= outcomes; ++a)
        for (int b = lo; b <= outcomes; ++b) {
          const CMatrix& s = at(a, b, x, y);
          if (!is_hermitian(s, 1e-9) || !is_psd(s, 1e-9))
            throw std::invalid_argument("TriAssemblage: member not Hermitian PSD");
          total += s.trace().real();
        }
      if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("TriAssemblage: not normalized per setting pair");
    }
}

TriSteeringFunctional TriSteeringFunctional::zeros(int d, int m, int outcomes) {
  TriSteeringFunctional f;
  f.d = d; f.m = m; f.outcomes = outcomes;
  f.ops.assign(static_cast<std::size_t>(m) * m * outcomes * outcomes,
               CMatrix::Zero(d, d));
  return f;
}

const CMatrix& TriSteeringFunctional::at(int a, int b, int x, int y) const {
  check_tri_index(a, b, x, y, m, outcomes, false);
  return ops[tri_index(a - 1, b - 1, x, y, m, outcomes)];
}

CMatrix& TriSteeringFunctional::at(int a, int b, int x, int y) {
  check_tri_index(a, b, x, y, m, outcomes, false);
  return ops[tri_index(a - 1, b - 1, x, y, m, outcomes)];
}

EfficiencyProfile2 EfficiencyProfile2::uncorrelated_isotropic(int m, double eta) {
  EfficiencyProfile2 p;
  p.eta_ab = Eigen::MatrixXd::Constant(m, m, eta * eta);
  p.eta_a = Eigen::VectorXd::Constant(m, eta);
  p.eta_b = Eigen::VectorXd::Constant(m, eta);
  return p;
}

EfficiencyProfile2 EfficiencyProfile2::ones(int m) {
  EfficiencyProfile2 p;
  p.eta_ab = Eigen::MatrixXd::Ones(m, m);
  p.eta_a = Eigen::VectorXd::Ones(m);
  p.eta_b = Eigen::VectorXd::Ones(m);
  return p;
}

bool EfficiencyProfile2::frechet_consistent(double tol) const {
  for (int x = 0; x < eta_ab.rows(); ++x)
    for (int y = 0; y < eta_ab.cols(); ++y) {
      const double lo = std::max(eta_a(x) + eta_b(y) - 1.0, 0.0);
      const double hi = std::min(eta_a(x), eta_b(y));
      if (eta_ab(x, y) < lo - tol || eta_ab(x, y) > hi + tol) return false;
    }
  return true;
}

TriSteeringFunctional compile_correlators(const std::vector<CorrelatorTerm>& terms,
                                          int m, int d) {
  if (d != 2)
    throw std::invalid_argument("compile_correlators: only binary observables");
  TriSteeringFunctional f = TriSteeringFunctional::zeros(2, m, 2);
  for (const auto& t : terms) {
    if (t.alice_setting && (*t.alice_setting < 1 || *t.alice_setting > m))
      throw std::out_of_range("compile_correlators: Alice setting out of range");
    if (t.bob_setting && (*t.bob_setting < 1 || *t.bob_setting > m))
      throw std::out_of_range("compile_correlators: Bob setting out of range");

    // settings-free identity terms are pure constants
    if (!t.alice_setting && !t.bob_setting &&
        (t.charlie_op - identity(2)).cwiseAbs().maxCoeff() <= 1e-12) {
      f.offset += t.coeff;
      continue;
    }
    const double weight =
        t.coeff / ((t.alice_setting ? 1.0 : m) * (t.bob_setting ? 1.0 : m));
    for (int x = 1; x <= m; ++x) {
      if (t.alice_setting && *t.alice_setting != x) continue;
      for (int y = 1; y <= m; ++y) {
        if (t.bob_setting && *t.bob_setting != y) continue;
        for (int a = 1; a <= 2; ++a)
          for (int b = 1; b <= 2; ++b) {
            const double sa = t.alice_setting ? (a == 1 ? 1.0 : -1.0) : 1.0;
            const double sb = t.bob_setting ? (b == 1 ? 1.0 : -1.0) : 1.0;
            f.at(a, b, x, y) += weight * sa * sb * t.charlie_op;
          }
      }
    }
  }
  return f;
}

TriAssemblage tri_assemblage(const QuantumState& rho, const MeasurementSet& meas_a,
                             const MeasurementSet& meas_b) {
  if (rho.dims.size() != 3)
    throw std::invalid_argument("tri_assemblage: need a tripartite state");
  if (meas_a.m != meas_b.m || meas_a.d != meas_b.d)
    throw std::invalid_argument("tri_assemblage: measurement sets must match in shape");
  const int dA = rho.dims[0], dB = rho.dims[1], dC = rho.dims[2];
  if (meas_a.at(1, 1).rows() != dA || meas_b.at(1, 1).rows() != dB)
    throw std::invalid_argument("tri_assemblage: measurement dimension mismatch");

  TriAssemblage out = TriAssemblage::zeros(dC, meas_a.m, meas_a.d, false);
  for (int x = 1; x <= meas_a.m; ++x)
    for (int y = 1; y <= meas_b.m; ++y)
      for (int a = 1; a <= meas_a.d; ++a)
        for (int b = 1; b <= meas_b.d; ++b)
          out.at(a, b, x, y) = partial_trace(
              kron(kron(meas_a.at(a, x), meas_b.at(b, y)), identity(dC)) * rho.rho,
              {dA, dB, dC}, {2});
  return out;
}

double evaluate(const TriSteeringFunctional& f, const TriAssemblage& a) {
  if (f.m != a.m || f.outcomes != a.outcomes || f.d != a.d)
    throw std::invalid_argument("evaluate: functional/assemblage mismatch");
  double v = f.offset;
  for (int x = 1; x <= f.m; ++x)
    for (int y = 1; y <= f.m; ++y)
      for (int oa = 1; oa <= f.outcomes; ++oa)
        for (int ob = 1; ob <= f.outcomes; ++ob)
          v += (f.at(oa, ob, x, y) * a.at(oa, ob, x, y)).trace().real();
  return v;
}

namespace {

TriBoundResult solve_tri(const TriSteeringFunctional& f,
                         const EfficiencyProfile2* eta, const SolveOptions& opts) {
  const int d = f.d, m = f.m;
  const bool apriori = eta != nullptr;
  auto strategies = enumerate_product_strategies(m, f.outcomes, apriori);
  const int n_lambda = static_cast<int>(strategies.size());

  ConicProgram p;
  p.sense = Sense::Maximize;
  const Eigen::MatrixXd half_id = 0.5 * Eigen::MatrixXd::Identity(2 * d, 2 * d);

  std::vector<int> block_of(n_lambda);
  for (int l = 0; l < n_lambda; ++l) block_of[l] = p.add_psd_block(2 * d);

  // objective scaled to unit magnitude: 1/eta_xy can be huge at small eta
  std::vector<CMatrix> coeffs(n_lambda);
  double cmax = 0.0;
  for (int l = 0; l < n_lambda; ++l) {
    CMatrix coeff = CMatrix::Zero(d, d);
    for (int x = 1; x <= m; ++x) {
      const int a = strategies[l].alice.respond(x);
      if (a == 0) continue;
      for (int y = 1; y <= m; ++y) {
        const int b = strategies[l].bob.respond(y);
        if (b == 0) continue;
        coeff += f.at(a, b, x, y) / (apriori ? eta->eta_ab(x - 1, y - 1) : 1.0);
      }
    }
    cmax = std::max(cmax, coeff.cwiseAbs().maxCoeff());
    coeffs[l] = std::move(coeff);
  }
  if (cmax == 0.0) cmax = 1.0;
  for (int l = 0; l < n_lambda; ++l)
    if (coeffs[l].cwiseAbs().maxCoeff() > 0)
      p.add_objective(block_of[l], 0.5 * embed_hermitian(coeffs[l] / cmax));

  int norm_eq = p.add_equality(1.0);
  for (int l = 0; l < n_lambda; ++l) p.add_equality_term(norm_eq, block_of[l], half_id);

  if (apriori) {
    for (int x = 1; x <= m; ++x)
      for (int y = 1; y <= m; ++y) {
        int eq = p.add_equality(eta->eta_ab(x - 1, y - 1));
        for (int l = 0; l < n_lambda; ++l)
          if (strategies[l].alice.respond(x) != 0 &&
              strategies[l].bob.respond(y) != 0)
            p.add_equality_term(eq, block_of[l], half_id);
      }
    for (int x = 1; x <= m; ++x) {
      int eq = p.add_equality(eta->eta_a(x - 1));
      for (int l = 0; l < n_lambda; ++l)
        if (strategies[l].alice.respond(x) != 0)
          p.add_equality_term(eq, block_of[l], half_id);
    }
    for (int y = 1; y <= m; ++y) {
      int eq = p.add_equality(eta->eta_b(y - 1));
      for (int l = 0; l < n_lambda; ++l)
        if (strategies[l].bob.respond(y) != 0)
          p.add_equality_term(eq, block_of[l], half_id);
    }
  }

  TriBoundResult res;
  res.solution = solve(p, opts);
  res.status = res.solution.status;
  if (res.status == SolveStatus::Optimal)
    res.value = cmax * res.solution.value + f.offset;
  if (res.status != SolveStatus::Optimal && res.status != SolveStatus::Infeasible)
    throw std::runtime_error("tripartite bound: solver returned " +
                             to_string(res.status));
  return res;
}

}  // namespace

TriBoundResult tri_lhs_bound(const TriSteeringFunctional& f, const SolveOptions& opts) {
  return solve_tri(f, nullptr, opts);
}

TriBoundResult tri_ps_lhs_bound(const TriSteeringFunctional& f,
                                const EfficiencyProfile2& eta,
                                const SolveOptions& opts) {
  if (eta.eta_ab.rows() != f.m || eta.eta_ab.cols() != f.m ||
      eta.eta_a.size() != f.m || eta.eta_b.size() != f.m)
    throw std::invalid_argument("tri_ps_lhs_bound: profile size mismatch");
  for (int x = 0; x < f.m; ++x)
    for (int y = 0; y < f.m; ++y)
      if (!(eta.eta_ab(x, y) > 0.0))
        throw std::invalid_argument("tri_ps_lhs_bound: eta_xy must be positive");
  if (!eta.frechet_consistent())
    std::cerr << "warning: loss profile violates the Frechet bounds; the solver "
                 "will decide feasibility\n";
  return solve_tri(f, &eta, opts);
}

namespace {

CorrelatorTerm term(double c, std::optional<int> xa, std::optional<int> xb,
                    const CMatrix& op) {
  return {c, xa, xb, op};
}

}  // namespace

std::vector<CorrelatorTerm> ghz_inequality_terms() {
  // settings 1, 2, 3 measure X, Y, Z
  const CMatrix I2 = identity(2), X = pauli_x(), Y = pauli_y(), Z = pauli_z();
  return {
      term(-3.0730, {}, {}, I2),
      term(0.6219, 3, {}, Z),  term(0.6219, {}, 3, Z),
      term(0.2919, 3, 3, I2),
      term(1.2437, 1, 1, X),   term(-1.2437, 1, 2, Y),
      term(-1.2437, 2, 1, Y),  term(-1.2437, 2, 2, X),
  };
}

std::vector<CorrelatorTerm> w_inequality_terms() {
  const CMatrix I2 = identity(2), X = pauli_x(), Y = pauli_y(), Z = pauli_z();
  return {
      term(-2.9797, {}, {}, I2),
      term(0.0454, 3, {}, I2),  term(0.0454, {}, 3, I2),
      term(0.8105, {}, {}, Z),
      term(-0.1324, 1, 1, I2),  term(-0.1324, 2, 2, I2),
      term(0.4703, 1, {}, X),   term(0.4703, 2, {}, Y),
      term(0.4703, {}, 1, X),   term(0.4703, {}, 2, Y),
      term(-1.1772, 3, {}, Z),  term(-1.1772, {}, 3, Z),
      term(-0.5046, 3, 3, I2),
      term(0.5401, 1, 1, Z),    term(0.5401, 2, 2, Z),
      term(0.7771, 1, 3, X),    term(0.7771, 2, 3, Y),
      term(0.7771, 3, 3, Y),    term(0.7771, 3, 2, Y),
      term(-2.0185, 3, 3, Z),
  };
}

CaseStudyCheck check_case_study_value(const std::vector<CorrelatorTerm>& terms,
                                      const QuantumState& state, double expected,
                                      double tol) {
  auto p3 = pauli_measurements();
  auto f = compile_correlators(terms, p3.m);
  CaseStudyCheck c;
  c.expected = expected;
  c.actual = evaluate(f, tri_assemblage(state, p3, p3));
  c.consistent = std::abs(c.actual - expected) <= tol;
  return c;
}

}  // namespace steer
