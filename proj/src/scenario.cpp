#include "steer/scenario.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace steer {

int QuantumState::total_dim() const {
  int t = 1;
  for (int d : dims) t *= d;
  return t;
}

void QuantumState::validate() const {
  if (rho.rows() != total_dim() || rho.rows() != rho.cols())
    throw std::invalid_argument("QuantumState: dimension mismatch");
  if (!is_hermitian(rho, 1e-9) || !is_psd(rho, 1e-9))
    throw std::invalid_argument("QuantumState: not PSD");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10)
    throw std::invalid_argument("QuantumState: not normalized");
}

const CMatrix& MeasurementSet::at(int a, int x) const {
  if (x < 1 || x > m || a < 1 || a > d)
    throw std::out_of_range("MeasurementSet: index out of range");
  return elements[static_cast<std::size_t>(x - 1) * d + (a - 1)];
}

CMatrix& MeasurementSet::at(int a, int x) {
  return const_cast<CMatrix&>(std::as_const(*this).at(a, x));
}

void MeasurementSet::validate() const {
  for (int x = 1; x <= m; ++x) {
    CMatrix total = CMatrix::Zero(at(1, x).rows(), at(1, x).cols());
    for (int a = 1; a <= d; ++a) {
      if (!is_psd(at(a, x), 1e-9))
        throw std::invalid_argument("MeasurementSet: element not PSD");
      total += at(a, x);
    }
    if ((total - identity(static_cast<int>(total.rows()))).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("MeasurementSet: incomplete POVM");
  }
}

MeasurementSet MeasurementSet::transposed() const {
  MeasurementSet out = *this;
  for (auto& e : out.elements) e = e.transpose().eval();
  return out;
}

ProjectorSet MeasurementSet::projectors() const {
  ProjectorSet out(m);
  for (int x = 1; x <= m; ++x)
    for (int a = 1; a <= d; ++a) out[x - 1].push_back(at(a, x));
  return out;
}

MeasurementSet measurements_from_projectors(const ProjectorSet& p) {
  MeasurementSet out;
  out.m = static_cast<int>(p.size());
  out.d = static_cast<int>(p[0].size());
  for (const auto& meas : p)
    for (const auto& pi : meas) out.elements.push_back(pi);
  out.validate();
  return out;
}

QuantumState max_entangled(int d) {
  if (d < 2) throw std::invalid_argument("max_entangled: d >= 2 required");
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return {{d, d}, v * v.adjoint()};
}

QuantumState isotropic(int d, double w) {
  if (w < 0.0 || w > 1.0) throw std::invalid_argument("isotropic: w in [0,1]");
  QuantumState phi = max_entangled(d);
  return {{d, d}, w * phi.rho + (1.0 - w) * CMatrix::Identity(d * d, d * d) / (d * d)};
}

QuantumState ghz_state() {
  CVector v = CVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return {{2, 2, 2}, v * v.adjoint()};
}

QuantumState w_state() {
  CVector v = CVector::Zero(8);
  v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
  return {{2, 2, 2}, v * v.adjoint()};
}

namespace {

MeasurementSet basis_measurements(const std::vector<CMatrix>& observables) {
  MeasurementSet out;
  out.m = static_cast<int>(observables.size());
  out.d = 2;
  for (const auto& ob : observables) {
    auto sys = eig_herm(ob);
    // outcome 1 -> +1 eigenvalue, outcome 2 -> -1 eigenvalue
    out.elements.push_back(sys.vectors.col(0) * sys.vectors.col(0).adjoint());
    out.elements.push_back(sys.vectors.col(1) * sys.vectors.col(1).adjoint());
  }
  return out;
}

}  // namespace

MeasurementSet pauli_measurements() {
  return basis_measurements({pauli_x(), pauli_y(), pauli_z()});
}

MeasurementSet pauli_zx_measurements() {
  return basis_measurements({pauli_z(), pauli_x()});
}

Assemblage assemblage_from_state(const QuantumState& rho, const MeasurementSet& meas) {
  if (rho.dims.size() != 2)
    throw std::invalid_argument("assemblage_from_state: need a bipartite state");
  const int dA = rho.dims[0], dB = rho.dims[1];
  if (meas.at(1, 1).rows() != dA)
    throw std::invalid_argument("assemblage_from_state: measurement dimension mismatch");
  Assemblage out = Assemblage::zeros(dB, meas.m, meas.d, false);
  for (int x = 1; x <= meas.m; ++x)
    for (int a = 1; a <= meas.d; ++a)
      out.at(a, x) =
          partial_trace(kron(meas.at(a, x), identity(dB)) * rho.rho, {dA, dB}, {1});
  return out;
}

Assemblage apply_loss(const Assemblage& ideal, const EfficiencyProfile& eta) {
  if (ideal.includes_no_click)
    throw std::invalid_argument("apply_loss: assemblage already a priori");
  if (eta.etas.size() != ideal.m)
    throw std::invalid_argument("apply_loss: efficiency size mismatch");
  for (int x = 0; x < eta.etas.size(); ++x)
    if (eta.etas(x) < 0.0 || eta.etas(x) > 1.0 + 1e-12)
      throw std::invalid_argument("apply_loss: efficiency out of [0,1]");

  Assemblage out = Assemblage::zeros(ideal.d, ideal.m, ideal.outcomes, true);
  for (int x = 1; x <= ideal.m; ++x) {
    CMatrix rho_b = CMatrix::Zero(ideal.d, ideal.d);
    for (int a = 1; a <= ideal.outcomes; ++a) {
      rho_b += ideal.at(a, x);
      out.at(a, x) = eta.etas(x - 1) * ideal.at(a, x);
    }
    out.at(0, x) = (1.0 - eta.etas(x - 1)) * rho_b;
  }
  return out;
}

std::pair<Assemblage, EfficiencyProfile> post_select(const Assemblage& apriori) {
  if (!apriori.includes_no_click)
    throw std::invalid_argument("post_select: assemblage has no no-click outcome");
  Assemblage out = Assemblage::zeros(apriori.d, apriori.m, apriori.outcomes, false);
  EfficiencyProfile eta{Eigen::VectorXd::Zero(apriori.m)};
  for (int x = 1; x <= apriori.m; ++x) {
    double e = 0.0;
    for (int a = 1; a <= apriori.outcomes; ++a) e += apriori.at(a, x).trace().real();
    if (e <= 1e-12) throw std::invalid_argument("post_select: zero-efficiency setting");
    eta.etas(x - 1) = e;
    for (int a = 1; a <= apriori.outcomes; ++a) out.at(a, x) = apriori.at(a, x) / e;
  }
  return {out, eta};
}

SteeredProjectors steered_projectors_for_pure_state(const QuantumState& psi,
                                                    const ProjectorSet& projectors) {
  if (psi.dims.size() != 2)
    throw std::invalid_argument("steered_projectors: need a bipartite state");
  psi.validate();
  // purity check
  if (std::abs((psi.rho * psi.rho).trace().real() - 1.0) > 1e-9)
    throw std::invalid_argument("steered_projectors: state is not pure");
  CMatrix rho_b = partial_trace(psi.rho, {psi.dims[0], psi.dims[1]}, {1});

  auto sys = eig_herm(rho_b);
  int r = 0;
  while (r < sys.values.size() && sys.values(r) > 1e-12) ++r;
  CMatrix v = sys.vectors.leftCols(r);  // isometry onto the support

  CMatrix rho_s = v.adjoint() * rho_b * v;
  CMatrix sq = sqrt_psd(rho_s);

  SteeredProjectors out;
  out.support_dim = r;
  out.projectors.resize(projectors.size());
  out.probabilities.resize(projectors.size());
  for (std::size_t x = 0; x < projectors.size(); ++x)
    for (const auto& pi : projectors[x]) {
      CMatrix pis = v.adjoint() * pi * v;
      double prob = (rho_s * pis).trace().real();
      if (prob <= 1e-14)
        throw std::invalid_argument("steered_projectors: outcome with zero weight");
      out.projectors[x].push_back(sq * pis * sq / prob);
      out.probabilities[x].push_back(prob);
    }
  return out;
}

}  // namespace steer
