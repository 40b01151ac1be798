#ifndef STEER_CONIC_HPP
#define STEER_CONIC_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steer/matrix.hpp"

namespace steer {

enum class BlockKind { Psd, Nonneg, Free };

struct ConeBlock {
  BlockKind kind;
  int dim;  // side length for Psd, 1 otherwise
};

// One coefficient in a linear functional: <coeff, X_block>.
// For Psd blocks coeff is a dim x dim symmetric matrix, else 1x1.
struct LinearTerm {
  int block;
  Eigen::MatrixXd coeff;
};

struct LinearFunctional {
  std::vector<LinearTerm> terms;
};

struct Equality {
  LinearFunctional lhs;
  double rhs;
};

enum class Sense { Maximize, Minimize };

// Equality-constrained optimization over a product of PSD cones,
// nonnegative scalars and free scalars.
struct ConicProgram {
  std::vector<ConeBlock> blocks;
  LinearFunctional objective;
  std::vector<Equality> equalities;
  Sense sense = Sense::Maximize;

  int add_psd_block(int n);
  int add_nonneg();
  int add_free();
  void add_objective(int block, const Eigen::MatrixXd& coeff);
  void add_objective(int block, double coeff);
  // Begin a new equality; returns its index.
  int add_equality(double rhs);
  void add_equality_term(int eq, int block, const Eigen::MatrixXd& coeff);
  void add_equality_term(int eq, int block, double coeff);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-8;
  int max_iters = 200;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double value = 0.0;                        // objective in the user's sense
  std::vector<Eigen::MatrixXd> primal;       // per block (1x1 for scalars)
  Eigen::VectorXd dual;                      // per equality
  std::vector<Eigen::MatrixXd> dual_slack;   // per block; zero rows/cols for Free
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

ConicSolution solve(const ConicProgram& p, const SolveOptions& opts = {});

// Recomputed feasibility/optimality residuals, independent of the solver path.
struct CertificateReport {
  double primal_eq_residual = 0.0;   // max |<A_j, X> - b_j|
  double primal_cone_violation = 0.0;  // max(0, -min eig) over cone blocks
  double dual_slack_violation = 0.0;   // max(0, -min eig) of recomputed slacks
  double gap = 0.0;                    // |obj(X) - b.y|
  double complementarity = 0.0;        // sum <X_i, S_i>

  bool ok(double tol = 1e-7) const;
};

CertificateReport verify_certificate(const ConicProgram& p, const ConicSolution& sol);

// Real embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
// PSD iff the input is PSD; doubles the trace.
Eigen::MatrixXd embed_hermitian(const CMatrix& h);

}  // namespace steer

#endif
