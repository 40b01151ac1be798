#include "steer/steering.hpp"

#include <cmath>
#include <stdexcept>

namespace steer {

namespace {

void check_index(int a, int x, int m, int outcomes, bool allow_no_click) {
  if (x < 1 || x > m) throw std::out_of_range("setting index out of range");
  const int lo = allow_no_click ? 0 : 1;
  if (a < lo || a > outcomes) throw std::out_of_range("outcome index out of range");
}

void check_eta(const EfficiencyProfile& eta) {
  for (int x = 0; x < eta.etas.size(); ++x) {
    const double e = eta.etas(x);
    if (!(e > 0.0) || e > 1.0 + 1e-12)
      throw std::invalid_argument("efficiency out of (0,1]");
  }
}

}  // namespace

Assemblage Assemblage::zeros(int d, int m, int outcomes, bool includes_no_click) {
  Assemblage a;
  a.d = d; a.m = m; a.outcomes = outcomes; a.includes_no_click = includes_no_click;
  a.members.assign(static_cast<std::size_t>(m) * (outcomes + 1), CMatrix::Zero(d, d));
  return a;
}

const CMatrix& Assemblage::at(int a, int x) const {
  check_index(a, x, m, outcomes, includes_no_click);
  return members[static_cast<std::size_t>(x - 1) * (outcomes + 1) + a];
}

CMatrix& Assemblage::at(int a, int x) {
  check_index(a, x, m, outcomes, includes_no_click);
  return members[static_cast<std::size_t>(x - 1) * (outcomes + 1) + a];
}

void Assemblage::validate() const {
  for (int x = 1; x <= m; ++x) {
    double total = 0.0;
    for (int a = includes_no_click ? 0 : 1; a <= outcomes; ++a) {
      const CMatrix& s = at(a, x);
      if (!is_hermitian(s, 1e-9)) throw std::invalid_argument("assemblage member not Hermitian");
      if (!is_psd(s, 1e-9)) throw std::invalid_argument("assemblage member not PSD");
      total += s.trace().real();
    }
    if (std::abs(total - 1.0) > 1e-8)
      throw std::invalid_argument("assemblage not normalized per setting");
  }
}

SteeringFunctional SteeringFunctional::zeros(int d, int m, int outcomes) {
  SteeringFunctional f;
  f.d = d; f.m = m; f.outcomes = outcomes;
  f.ops.assign(static_cast<std::size_t>(m) * outcomes, CMatrix::Zero(d, d));
  return f;
}

const CMatrix& SteeringFunctional::at(int a, int x) const {
  check_index(a, x, m, outcomes, false);
  return ops[static_cast<std::size_t>(x - 1) * outcomes + (a - 1)];
}

CMatrix& SteeringFunctional::at(int a, int x) {
  check_index(a, x, m, outcomes, false);
  return ops[static_cast<std::size_t>(x - 1) * outcomes + (a - 1)];
}

EfficiencyProfile EfficiencyProfile::uniform(int m, double eta) {
  return {Eigen::VectorXd::Constant(m, eta)};
}

double evaluate(const SteeringFunctional& f, const Assemblage& a) {
  if (f.m != a.m || f.outcomes != a.outcomes || f.d != a.d)
    throw std::invalid_argument("evaluate: functional/assemblage mismatch");
  double v = f.offset;
  for (int x = 1; x <= f.m; ++x)
    for (int o = 1; o <= f.outcomes; ++o)
      v += (f.at(o, x) * a.at(o, x)).trace().real();
  return v;
}

CMatrix unembed_hermitian(const Eigen::MatrixXd& e) {
  const int n = static_cast<int>(e.rows()) / 2;
  Eigen::MatrixXd re = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  Eigen::MatrixXd im = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  CMatrix out(n, n);
  out.real() = 0.5 * (re + re.transpose());
  out.imag() = 0.5 * (im - im.transpose());
  return out;
}

namespace {

// Shared builder for the ideal and post-selected primal SDPs. An empty
// efficiency profile selects the ideal scenario (ideal strategies, one
// normalization constraint).
LhsBoundResult solve_primal(const SteeringFunctional& f,
                            const EfficiencyProfile* eta, const SolveOptions& opts) {
  const int d = f.d, m = f.m;
  const bool apriori = eta != nullptr;
  auto strategies = enumerate_strategies(m, f.outcomes, apriori);
  const int n_lambda = static_cast<int>(strategies.size());

  ConicProgram p;
  p.sense = Sense::Maximize;
  const Eigen::MatrixXd half_id = 0.5 * Eigen::MatrixXd::Identity(2 * d, 2 * d);

  std::vector<int> block_of(n_lambda);
  for (int l = 0; l < n_lambda; ++l) block_of[l] = p.add_psd_block(2 * d);

  // objective scaled to unit magnitude for solver conditioning
  std::vector<CMatrix> coeffs(n_lambda);
  double cmax = 0.0;
  for (int l = 0; l < n_lambda; ++l) {
    CMatrix coeff = CMatrix::Zero(d, d);
    for (int x = 1; x <= m; ++x) {
      const int a = strategies[l].respond(x);
      if (a == 0) continue;
      coeff += f.at(a, x) / (apriori ? eta->etas(x - 1) : 1.0);
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
    for (int x = 1; x <= m; ++x) {
      int eq = p.add_equality(1.0 - eta->etas(x - 1));
      for (int l = 0; l < n_lambda; ++l)
        if (strategies[l].respond(x) == 0) p.add_equality_term(eq, block_of[l], half_id);
    }
  }

  auto sol = solve(p, opts);
  LhsBoundResult res;
  res.value = cmax * sol.value + f.offset;
  res.strategies = std::move(strategies);
  res.hidden_states.reserve(n_lambda);
  for (int l = 0; l < n_lambda; ++l)
    res.hidden_states.push_back(unembed_hermitian(sol.primal[block_of[l]]));
  res.solution = std::move(sol);
  if (res.solution.status != SolveStatus::Optimal)
    throw std::runtime_error("steering bound: solver returned " +
                             to_string(res.solution.status));
  return res;
}

}  // namespace

LhsBoundResult lhs_bound(const SteeringFunctional& f) {
  return solve_primal(f, nullptr, {});
}

LhsBoundResult ps_lhs_bound(const SteeringFunctional& f, const EfficiencyProfile& eta,
                            const SolveOptions& opts) {
  if (eta.etas.size() != f.m)
    throw std::invalid_argument("ps_lhs_bound: efficiency profile size mismatch");
  check_eta(eta);
  return solve_primal(f, &eta, opts);
}

std::pair<double, DualCertificate> ps_lhs_bound_dual(const SteeringFunctional& f,
                                                     const EfficiencyProfile& eta,
                                                     const SolveOptions& opts) {
  if (eta.etas.size() != f.m)
    throw std::invalid_argument("ps_lhs_bound_dual: efficiency profile size mismatch");
  check_eta(eta);
  const int d = f.d, m = f.m;
  auto strategies = enumerate_strategies(m, f.outcomes, true);

  ConicProgram p;
  p.sense = Sense::Minimize;
  const int mu = p.add_free();
  std::vector<int> nu(m);
  for (int x = 0; x < m; ++x) nu[x] = p.add_free();

  p.add_objective(mu, 1.0);
  for (int x = 0; x < m; ++x) p.add_objective(nu[x], 1.0 - eta.etas(x));

  // R_lambda = mu*1 + sum_x nu_x D(0|x)*1 - C_lambda >= 0, entrywise equalities
  // on the real embedding.
  const int n2 = 2 * d;
  for (const auto& s : strategies) {
    CMatrix c = CMatrix::Zero(d, d);
    for (int x = 1; x <= m; ++x) {
      const int a = s.respond(x);
      if (a != 0) c += f.at(a, x) / eta.etas(x - 1);
    }
    Eigen::MatrixXd ce = embed_hermitian(c);
    int blk = p.add_psd_block(n2);
    for (int i = 0; i < n2; ++i)
      for (int j = i; j < n2; ++j) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n2, n2);
        e(i, j) = e(j, i) = (i == j) ? 1.0 : 0.5;
        int eq = p.add_equality(-ce(i, j));
        p.add_equality_term(eq, blk, e);
        if (i == j) {
          p.add_equality_term(eq, mu, -1.0);
          for (int x = 1; x <= m; ++x)
            if (s.respond(x) == 0) p.add_equality_term(eq, nu[x - 1], -1.0);
        }
      }
  }

  auto sol = solve(p, opts);
  if (sol.status != SolveStatus::Optimal)
    throw std::runtime_error("ps_lhs_bound_dual: solver returned " + to_string(sol.status));

  DualCertificate cert;
  cert.mu = sol.primal[mu](0, 0);
  cert.nus.resize(m);
  for (int x = 0; x < m; ++x) cert.nus(x) = sol.primal[nu[x]](0, 0);
  cert.value = sol.value + f.offset;
  return {sol.value + f.offset, cert};
}

SteeringFunctional projective_functional(const ProjectorSet& projectors,
                                         const EfficiencyProfile& eta) {
  const int m = static_cast<int>(projectors.size());
  if (m == 0) throw std::invalid_argument("projective_functional: no measurements");
  if (eta.etas.size() != m)
    throw std::invalid_argument("projective_functional: eta size mismatch");
  check_eta(eta);
  const int d = static_cast<int>(projectors[0][0].rows());
  const int outcomes = static_cast<int>(projectors[0].size());

  for (const auto& meas : projectors)
    for (const auto& pi : meas) {
      if (!is_hermitian(pi, 1e-9) || (pi * pi - pi).cwiseAbs().maxCoeff() > 1e-9 ||
          std::abs(pi.trace().real() - 1.0) > 1e-9)
        throw std::invalid_argument("projective_functional: not a rank-1 projector");
    }
  // no two distinct measurements may share a projector
  for (int x = 0; x < m; ++x)
    for (int xp = x + 1; xp < m; ++xp)
      for (const auto& pi : projectors[x])
        for (const auto& pj : projectors[xp])
          if (std::sqrt(std::abs((pi * pj).trace().real())) > 1.0 - 1e-9)
            throw std::invalid_argument(
                "projective_functional: measurements share a projector");

  SteeringFunctional f = SteeringFunctional::zeros(d, m, outcomes);
  for (int x = 1; x <= m; ++x)
    for (int a = 1; a <= outcomes; ++a)
      f.at(a, x) = eta.etas(x - 1) * projectors[x - 1][a - 1];
  return f;
}

double cos_theta(const ProjectorSet& projectors) {
  const int m = static_cast<int>(projectors.size());
  if (m < 2) throw std::invalid_argument("cos_theta: need at least two measurements");
  double best = 0.0;
  for (int x = 0; x < m; ++x)
    for (int xp = x + 1; xp < m; ++xp)
      for (const auto& pi : projectors[x])
        for (const auto& pj : projectors[xp])
          best = std::max(best, std::sqrt(std::max(0.0, (pi * pj).trace().real())));
  return best;
}

double analytic_upper_bound(int m, double cos_th, double mean_eta) {
  return (1.0 - cos_th) + m * mean_eta * cos_th;
}

std::optional<double> critical_mean_eta(int m, double cos_th, double w, int d) {
  const double denom = w + (1.0 - w) / d - cos_th;
  if (denom <= 0.0) return std::nullopt;
  return (1.0 / m) * (1.0 - cos_th) / denom;
}

}  // namespace steer
