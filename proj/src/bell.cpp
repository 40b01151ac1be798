#include "steer/bell.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace steer {

namespace {

std::size_t bell_index(int a, int b, int x, int y, int m, int stride) {
  return ((static_cast<std::size_t>(x - 1) * m + (y - 1)) * stride + a) * stride + b;
}

void check_bell_index(int a, int b, int x, int y, int m, int d, bool with_zero) {
  const int lo = with_zero ? 0 : 1;
  if (x < 1 || x > m || y < 1 || y > m || a < lo || a > d || b < lo || b > d)
    throw std::out_of_range("behaviour index out of range");
}

}  // namespace

Behaviour Behaviour::zeros(int m, int d, bool includes_no_click) {
  Behaviour b;
  b.m = m; b.d = d; b.includes_no_click = includes_no_click;
  const std::size_t stride = d + 1;
  b.p.assign(static_cast<std::size_t>(m) * m * stride * stride, 0.0);
  return b;
}

double Behaviour::at(int a, int b, int x, int y) const {
  check_bell_index(a, b, x, y, m, d, includes_no_click);
  return p[bell_index(a, b, x, y, m, d + 1)];
}

double& Behaviour::at(int a, int b, int x, int y) {
  check_bell_index(a, b, x, y, m, d, includes_no_click);
  return p[bell_index(a, b, x, y, m, d + 1)];
}

void Behaviour::validate() const {
  const int lo = includes_no_click ? 0 : 1;
  for (int x = 1; x <= m; ++x)
    for (int y = 1; y <= m; ++y) {
      double total = 0.0;
      for (int a = lo; a <= d; ++a)
        for (int b = lo; b <= d; ++b) {
          const double v = at(a, b, x, y);
          if (v < -1e-10) throw std::invalid_argument("Behaviour: negative entry");
          total += v;
        }
      if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("Behaviour: not normalized per setting pair");
    }
}

BellFunctional BellFunctional::zeros(int m, int d) {
  BellFunctional f;
  f.m = m; f.d = d;
  f.coeffs.assign(static_cast<std::size_t>(m) * m * d * d, 0.0);
  return f;
}

double BellFunctional::at(int a, int b, int x, int y) const {
  check_bell_index(a, b, x, y, m, d, false);
  return coeffs[bell_index(a - 1, b - 1, x, y, m, d)];
}

double& BellFunctional::at(int a, int b, int x, int y) {
  check_bell_index(a, b, x, y, m, d, false);
  return coeffs[bell_index(a - 1, b - 1, x, y, m, d)];
}

double evaluate(const BellFunctional& f, const Behaviour& b) {
  if (f.m != b.m || f.d != b.d)
    throw std::invalid_argument("evaluate: functional/behaviour mismatch");
  double v = f.offset;
  for (int x = 1; x <= f.m; ++x)
    for (int y = 1; y <= f.m; ++y)
      for (int oa = 1; oa <= f.d; ++oa)
        for (int ob = 1; ob <= f.d; ++ob) v += f.at(oa, ob, x, y) * b.at(oa, ob, x, y);
  return v;
}

namespace {

double strategy_value(const BellFunctional& f, const ProductStrategy& s,
                      const EfficiencyProfile2* eta) {
  double v = 0.0;
  for (int x = 1; x <= f.m; ++x) {
    const int a = s.alice.respond(x);
    if (a == 0) continue;
    for (int y = 1; y <= f.m; ++y) {
      const int b = s.bob.respond(y);
      if (b == 0) continue;
      v += f.at(a, b, x, y) / (eta ? eta->eta_ab(x - 1, y - 1) : 1.0);
    }
  }
  return v;
}

}  // namespace

double lhv_bound(const BellFunctional& f) {
  double best = -1e300;
  for (const auto& s : enumerate_product_strategies(f.m, f.d, false))
    best = std::max(best, strategy_value(f, s, nullptr));
  return best + f.offset;
}

double algebraic_max(const BellFunctional& f) {
  double v = f.offset;
  for (int x = 1; x <= f.m; ++x)
    for (int y = 1; y <= f.m; ++y) {
      double best = -1e300;
      for (int a = 1; a <= f.d; ++a)
        for (int b = 1; b <= f.d; ++b) best = std::max(best, f.at(a, b, x, y));
      v += best;
    }
  return v;
}

double lhv_bound_lp(const BellFunctional& f, const SolveOptions& opts) {
  auto strategies = enumerate_product_strategies(f.m, f.d, false);
  ConicProgram p;
  p.sense = Sense::Maximize;
  int norm_eq = p.add_equality(1.0);
  for (const auto& s : strategies) {
    int q = p.add_nonneg();
    p.add_objective(q, strategy_value(f, s, nullptr));
    p.add_equality_term(norm_eq, q, 1.0);
  }
  auto sol = solve(p, opts);
  if (sol.status != SolveStatus::Optimal)
    throw std::runtime_error("lhv_bound_lp: solver returned " + to_string(sol.status));
  return sol.value + f.offset;
}

PsLhvResult ps_lhv_bound(const BellFunctional& f, const EfficiencyProfile2& eta,
                         const SolveOptions& opts) {
  if (eta.eta_ab.rows() != f.m || eta.eta_ab.cols() != f.m ||
      eta.eta_a.size() != f.m || eta.eta_b.size() != f.m)
    throw std::invalid_argument("ps_lhv_bound: profile size mismatch");
  for (int x = 0; x < f.m; ++x)
    for (int y = 0; y < f.m; ++y)
      if (!(eta.eta_ab(x, y) > 0.0))
        throw std::invalid_argument("ps_lhv_bound: eta_xy must be positive");
  if (!eta.frechet_consistent())
    std::cerr << "warning: loss profile violates the Frechet bounds; the solver "
                 "will decide feasibility\n";

  auto strategies = enumerate_product_strategies(f.m, f.d, true);
  // objective scaled to unit magnitude: 1/eta_xy can be huge at small eta
  std::vector<double> values(strategies.size());
  double vmax = 0.0;
  for (std::size_t l = 0; l < strategies.size(); ++l) {
    values[l] = strategy_value(f, strategies[l], &eta);
    vmax = std::max(vmax, std::abs(values[l]));
  }
  if (vmax == 0.0) vmax = 1.0;

  ConicProgram p;
  p.sense = Sense::Maximize;
  std::vector<int> q(strategies.size());
  int norm_eq = p.add_equality(1.0);
  for (std::size_t l = 0; l < strategies.size(); ++l) {
    q[l] = p.add_nonneg();
    if (values[l] != 0.0) p.add_objective(q[l], values[l] / vmax);
    p.add_equality_term(norm_eq, q[l], 1.0);
  }
  for (int x = 1; x <= f.m; ++x)
    for (int y = 1; y <= f.m; ++y) {
      int eq = p.add_equality(eta.eta_ab(x - 1, y - 1));
      for (std::size_t l = 0; l < strategies.size(); ++l)
        if (strategies[l].alice.respond(x) != 0 && strategies[l].bob.respond(y) != 0)
          p.add_equality_term(eq, q[l], 1.0);
    }
  for (int x = 1; x <= f.m; ++x) {
    int eq = p.add_equality(eta.eta_a(x - 1));
    for (std::size_t l = 0; l < strategies.size(); ++l)
      if (strategies[l].alice.respond(x) != 0) p.add_equality_term(eq, q[l], 1.0);
  }
  for (int y = 1; y <= f.m; ++y) {
    int eq = p.add_equality(eta.eta_b(y - 1));
    for (std::size_t l = 0; l < strategies.size(); ++l)
      if (strategies[l].bob.respond(y) != 0) p.add_equality_term(eq, q[l], 1.0);
  }

  PsLhvResult res;
  res.solution = solve(p, opts);
  res.status = res.solution.status;
  if (res.status == SolveStatus::Optimal)
    res.value = vmax * res.solution.value + f.offset;
  if (res.status != SolveStatus::Optimal && res.status != SolveStatus::Infeasible)
    throw std::runtime_error("ps_lhv_bound: solver returned " + to_string(res.status));
  return res;
}

BellFunctional tilted_chsh(double alpha) {
  if (alpha < 1.0 || alpha > 1.5)
    std::cerr << "warning: tilted CHSH parameter outside [1, 1.5]\n";
  BellFunctional f = BellFunctional::zeros(2, 2);
  const double c[2][2] = {{alpha, 1.0}, {alpha, -1.0}};  // [x-1][y-1]
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y)
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
          const double sa = (a == 1) ? 1.0 : -1.0;
          const double sb = (b == 1) ? 1.0 : -1.0;
          f.at(a, b, x, y) = c[x - 1][y - 1] * sa * sb;
        }
  return f;
}

Behaviour behaviour_from_state(const QuantumState& rho, const MeasurementSet& meas_a,
                               const MeasurementSet& meas_b) {
  if (rho.dims.size() != 2)
    throw std::invalid_argument("behaviour_from_state: need a bipartite state");
  if (meas_a.m != meas_b.m || meas_a.d != meas_b.d)
    throw std::invalid_argument("behaviour_from_state: measurement shape mismatch");
  if (meas_a.at(1, 1).rows() != rho.dims[0] || meas_b.at(1, 1).rows() != rho.dims[1])
    throw std::invalid_argument("behaviour_from_state: dimension mismatch");
  Behaviour out = Behaviour::zeros(meas_a.m, meas_a.d, false);
  for (int x = 1; x <= meas_a.m; ++x)
    for (int y = 1; y <= meas_b.m; ++y)
      for (int a = 1; a <= meas_a.d; ++a)
        for (int b = 1; b <= meas_b.d; ++b)
          out.at(a, b, x, y) =
              (kron(meas_a.at(a, x), meas_b.at(b, y)) * rho.rho).trace().real();
  return out;
}

MeasurementSet xz_plane_measurements(const std::vector<double>& angles) {
  MeasurementSet out;
  out.m = static_cast<int>(angles.size());
  out.d = 2;
  for (double t : angles) {
    CMatrix ob = std::cos(t) * pauli_z() + std::sin(t) * pauli_x();
    out.elements.push_back(0.5 * (identity(2) + ob));
    out.elements.push_back(0.5 * (identity(2) - ob));
  }
  return out;
}

namespace {

// <A(a) (x) B(b)> on cos(theta)|00> + sin(theta)|11> with X-Z plane
// observables A(t) = cos(t) Z + sin(t) X
double xz_correlator(double theta, double a, double b) {
  return std::cos(a) * std::cos(b) + std::sin(2.0 * theta) * std::sin(a) * std::sin(b);
}

double tilted_value(double alpha, double theta, const Eigen::Vector4d& v) {
  return alpha * (xz_correlator(theta, v(0), v(2)) + xz_correlator(theta, v(1), v(2))) +
         xz_correlator(theta, v(0), v(3)) - xz_correlator(theta, v(1), v(3));
}

}  // namespace

QuantumMaxResult quantum_max_tilted(double alpha, bool product_only) {
  const double pi = std::acos(-1.0);
  // CHSH-optimal start plus a classical corner start
  std::vector<std::pair<double, Eigen::Vector4d>> starts = {
      {pi / 4, Eigen::Vector4d(0.0, pi / 2, pi / 4, -pi / 4)},
      {pi / 8, Eigen::Vector4d(0.0, 0.0, 0.0, 0.0)},
  };
  QuantumMaxResult best;
  best.value = -1e300;
  for (auto [theta, v] : starts) {
    if (product_only) theta = 0.0;
    double step = 0.5;
    double cur = tilted_value(alpha, theta, v);
    while (step > 1e-8) {
      bool improved = false;
      for (int i = -1; i < 4; ++i) {
        if (i == -1 && product_only) continue;
        for (double s : {step, -step}) {
          double t2 = theta + (i == -1 ? s : 0.0);
          Eigen::Vector4d v2 = v;
          if (i >= 0) v2(i) += s;
          const double val = tilted_value(alpha, t2, v2);
          if (val > cur + 1e-14) {
            cur = val; theta = t2; v = v2; improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur > best.value) {
      best.value = cur;
      best.theta = theta;
      best.angles = v;
    }
  }
  return best;
}

EfficiencyProfile2 one_sided_profile(int m, double eta) {
  EfficiencyProfile2 p;
  p.eta_a = Eigen::VectorXd::Ones(m);
  p.eta_b = Eigen::VectorXd::Constant(m, eta);
  p.eta_ab = Eigen::MatrixXd::Constant(m, m, eta);
  return p;
}

EfficiencyProfile2 perfectly_correlated_profile(int m, double eta) {
  EfficiencyProfile2 p;
  p.eta_a = Eigen::VectorXd::Constant(m, eta);
  p.eta_b = Eigen::VectorXd::Constant(m, eta);
  p.eta_ab = Eigen::MatrixXd::Constant(m, m, eta);
  return p;
}

CriticalEtaResult critical_eta(const BellFunctional& f, double quantum_value,
                               const std::function<EfficiencyProfile2(double)>& profile,
                               double tol) {
  auto violable = [&](double e) {
    auto r = ps_lhv_bound(f, profile(e));
    // margin above the ~1e-5 solver noise at strongly scaled objectives
    return r.status == SolveStatus::Optimal && r.value < quantum_value - 5e-5;
  };
  CriticalEtaResult res;
  if (!violable(1.0)) return res;  // not even ideal detectors help
  res.found = true;
  double lo = 0.05, hi = 1.0;
  if (violable(lo)) {
    res.eta = lo;
    return res;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (violable(mid) ? hi : lo) = mid;
  }
  res.eta = 0.5 * (lo + hi);
  return res;
}

}  // namespace steer
