#include "steer/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace steer {

CMatrix identity(int d) { return CMatrix::Identity(d, d); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep) {
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: nonpositive dim");
    total *= d;
  }
  if (total != m.rows() || m.rows() != m.cols())
    throw std::invalid_argument("partial_trace: dims do not match matrix");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: bad keep index");
    kept[k] = true;
  }

  long dk = 1, dt = 1;
  for (int i = 0; i < n; ++i) (kept[i] ? dk : dt) *= dims[i];

  // Strides of each factor in the full index.
  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<int> kept_idx, traced_idx;
  for (int i = 0; i < n; ++i) (kept[i] ? kept_idx : traced_idx).push_back(i);

  auto full_index = [&](long kcomp, long tcomp) {
    long idx = 0;
    for (int i = static_cast<int>(kept_idx.size()) - 1; i >= 0; --i) {
      int f = kept_idx[i];
      idx += (kcomp % dims[f]) * stride[f];
      kcomp /= dims[f];
    }
    for (int i = static_cast<int>(traced_idx.size()) - 1; i >= 0; --i) {
      int f = traced_idx[i];
      idx += (tcomp % dims[f]) * stride[f];
      tcomp /= dims[f];
    }
    return idx;
  };

  CMatrix out = CMatrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c)
      for (long t = 0; t < dt; ++t)
        out(r, c) += m(full_index(r, t), full_index(c, t));
  return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

EigenSystem eig_herm(const CMatrix& m, double tol) {
  if (!is_hermitian(m, tol))
    throw std::invalid_argument("eig_herm: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_herm: eigensolver failed");
  // Eigen sorts ascending; flip to descending.
  const Eigen::Index n = m.rows();
  EigenSystem sys;
  sys.values.resize(n);
  sys.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.values(i) = es.eigenvalues()(n - 1 - i);
    sys.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return sys;
}

double opnorm(const CMatrix& m) {
  auto sys = eig_herm(m);
  double hi = std::abs(sys.values(0));
  double lo = std::abs(sys.values(sys.values.size() - 1));
  return std::max(hi, lo);
}

double min_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvalues()(0);
}

bool is_psd(const CMatrix& m, double tol) { return min_eig(m) >= -tol; }

CMatrix dagger(const CMatrix& m) { return m.adjoint(); }

CMatrix sqrt_psd(const CMatrix& m, double tol) {
  auto sys = eig_herm(m);
  const Eigen::Index n = m.rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = sys.values(i);
    if (v < -tol) throw std::invalid_argument("sqrt_psd: matrix not PSD");
    if (v > 0)
      out += std::sqrt(v) * sys.vectors.col(i) * sys.vectors.col(i).adjoint();
  }
  return out;
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix ketbra(int i, int j, int d) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

}  // namespace steer
