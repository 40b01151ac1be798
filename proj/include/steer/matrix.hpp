#ifndef STEER_MATRIX_HPP
#define STEER_MATRIX_HPP

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace steer {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-9;

CMatrix identity(int d);

// Kronecker product, dimensions multiply.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Trace out the subsystems not listed in `keep`. `dims` are the tensor
// factor dimensions in order; their product must equal the side of `m`.
CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep);

bool is_hermitian(const CMatrix& m, double tol = kHermTol);

struct EigenSystem {
  Eigen::VectorXd values;  // descending
  CMatrix vectors;         // columns match values
};

// Eigendecomposition of a Hermitian matrix. Throws on non-Hermitian input.
EigenSystem eig_herm(const CMatrix& m, double tol = kHermTol);

// Largest absolute eigenvalue.
double opnorm(const CMatrix& m);

// Minimum eigenvalue >= -tol.
bool is_psd(const CMatrix& m, double tol = kPsdTol);

double min_eig(const CMatrix& m);

CMatrix dagger(const CMatrix& m);

// Hermitian square root (input must be PSD within tol).
CMatrix sqrt_psd(const CMatrix& m, double tol = kPsdTol);

// Pauli operators and the computational-basis projector |i><j|.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix ketbra(int i, int j, int d);

}  // namespace steer

#endif
