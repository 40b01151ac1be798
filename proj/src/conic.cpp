#include "steer/conic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace steer {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kStepFraction = 0.99;

int svec_dim(int n) { return n * (n + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      v(k++) = (i == j) ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      if (i == j) {
        m(i, i) = v(k);
      } else {
        m(i, j) = v(k) / kSqrt2;
        m(j, i) = m(i, j);
      }
      ++k;
    }
  return m;
}

struct BlockLayout {
  BlockKind kind;
  int dim;        // matrix side (1 for scalars)
  int vec_size;   // svec length
  int offset;     // offset into the cone or free vector
  bool is_cone() const { return kind != BlockKind::Free; }
};

// Internal problem in minimization form: min c.x  s.t. Ax = b, x in K x R^f.
struct Problem {
  std::vector<BlockLayout> cone_blocks;  // Psd and Nonneg, in program order
  std::vector<int> cone_block_ids;       // original block indices
  std::vector<int> free_block_ids;
  int nk = 0;  // cone vector dimension
  int nf = 0;  // free dimension
  double barrier_nu = 0.0;
  Eigen::MatrixXd Ak, Af;
  Eigen::VectorXd b, ck, cf;
  Sense sense;
};

Problem build_problem(const ConicProgram& p) {
  Problem pr;
  pr.sense = p.sense;
  std::vector<int> cone_index_of_block(p.blocks.size(), -1);
  std::vector<int> free_index_of_block(p.blocks.size(), -1);
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& blk = p.blocks[i];
    if (blk.kind == BlockKind::Free) {
      free_index_of_block[i] = pr.nf;
      pr.free_block_ids.push_back(static_cast<int>(i));
      pr.nf += 1;
    } else {
      BlockLayout lay{blk.kind, blk.dim, svec_dim(blk.dim), pr.nk};
      cone_index_of_block[i] = static_cast<int>(pr.cone_blocks.size());
      pr.cone_blocks.push_back(lay);
      pr.cone_block_ids.push_back(static_cast<int>(i));
      pr.nk += lay.vec_size;
      pr.barrier_nu += blk.dim;
    }
  }

  const int m = static_cast<int>(p.equalities.size());
  pr.Ak = Eigen::MatrixXd::Zero(m, pr.nk);
  pr.Af = Eigen::MatrixXd::Zero(m, pr.nf);
  pr.b.resize(m);
  pr.ck = Eigen::VectorXd::Zero(pr.nk);
  pr.cf = Eigen::VectorXd::Zero(pr.nf);

  const double sgn = (p.sense == Sense::Maximize) ? -1.0 : 1.0;
  auto scatter = [&](const LinearTerm& t, Eigen::Ref<Eigen::VectorXd> vk,
                     Eigen::Ref<Eigen::VectorXd> vf, double scale) {
    const auto& blk = p.blocks[t.block];
    if (blk.kind == BlockKind::Free) {
      vf(free_index_of_block[t.block]) += scale * t.coeff(0, 0);
    } else {
      const auto& lay = pr.cone_blocks[cone_index_of_block[t.block]];
      vk.segment(lay.offset, lay.vec_size) += scale * svec(t.coeff);
    }
  };

  for (const auto& t : p.objective.terms) scatter(t, pr.ck, pr.cf, sgn);
  for (int j = 0; j < m; ++j) {
    pr.b(j) = p.equalities[j].rhs;
    Eigen::VectorXd rowk = Eigen::VectorXd::Zero(pr.nk);
    Eigen::VectorXd rowf = Eigen::VectorXd::Zero(pr.nf);
    for (const auto& t : p.equalities[j].lhs.terms) scatter(t, rowk, rowf, 1.0);
    pr.Ak.row(j) = rowk;
    pr.Af.row(j) = rowf;
  }
  return pr;
}

struct ConeState {
  // Per cone block: primal U, dual S, NT scaling W, and S^{-1}, all dense.
  std::vector<Eigen::MatrixXd> U, S, W, Sinv;
};

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m, bool invert) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    double v = std::max(d(i), 1e-300);
    d(i) = invert ? 1.0 / std::sqrt(v) : std::sqrt(v);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Largest alpha in (0,1] with U + alpha*D staying in the cone.
double max_step(const Eigen::MatrixXd& U, const Eigen::MatrixXd& D) {
  if (U.rows() == 1) {
    if (D(0, 0) >= 0) return 1.0;
    return std::min(1.0, -kStepFraction * U(0, 0) / D(0, 0));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(U);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd B = L.triangularView<Eigen::Lower>().solve(D);
  B = L.triangularView<Eigen::Lower>().solve(B.transpose()).transpose();
  Eigen::MatrixXd Bs = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bs, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return 1.0;
  return std::min(1.0, -kStepFraction / lmin);
}

double cone_min_eig(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

int ConicProgram::add_psd_block(int n) {
  if (n < 1) throw std::invalid_argument("add_psd_block: bad dimension");
  blocks.push_back({BlockKind::Psd, n});
  return static_cast<int>(blocks.size()) - 1;
}

int ConicProgram::add_nonneg() {
  blocks.push_back({BlockKind::Nonneg, 1});
  return static_cast<int>(blocks.size()) - 1;
}

int ConicProgram::add_free() {
  blocks.push_back({BlockKind::Free, 1});
  return static_cast<int>(blocks.size()) - 1;
}

void ConicProgram::add_objective(int block, const Eigen::MatrixXd& coeff) {
  objective.terms.push_back({block, coeff});
}

void ConicProgram::add_objective(int block, double coeff) {
  add_objective(block, Eigen::MatrixXd::Constant(1, 1, coeff));
}

int ConicProgram::add_equality(double rhs) {
  equalities.push_back({{}, rhs});
  return static_cast<int>(equalities.size()) - 1;
}

void ConicProgram::add_equality_term(int eq, int block, const Eigen::MatrixXd& coeff) {
  equalities[eq].lhs.terms.push_back({block, coeff});
}

void ConicProgram::add_equality_term(int eq, int block, double coeff) {
  add_equality_term(eq, block, Eigen::MatrixXd::Constant(1, 1, coeff));
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

Eigen::MatrixXd embed_hermitian(const CMatrix& h) {
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument("embed_hermitian: input not Hermitian");
  const int n = static_cast<int>(h.rows());
  Eigen::MatrixXd out(2 * n, 2 * n);
  Eigen::MatrixXd re = h.real(), im = h.imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return 0.5 * (out + out.transpose());
}

ConicSolution solve(const ConicProgram& prog, const SolveOptions& opts) {
  Problem pr = build_problem(prog);
  const int m_all = static_cast<int>(pr.b.size());
  const int nb = static_cast<int>(pr.cone_blocks.size());
  if (nb == 0) throw std::invalid_argument("solve: program has no cone blocks");

  // Drop linearly dependent equality rows (consistency is re-checked at the end).
  std::vector<int> kept_rows;
  {
    Eigen::MatrixXd At(pr.nk + pr.nf, m_all);
    At.topRows(pr.nk) = pr.Ak.transpose();
    At.bottomRows(pr.nf) = pr.Af.transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    for (int i = 0; i < rank; ++i)
      kept_rows.push_back(static_cast<int>(qr.colsPermutation().indices()(i)));
    std::sort(kept_rows.begin(), kept_rows.end());
  }
  Eigen::MatrixXd Ak_full = pr.Ak, Af_full = pr.Af;
  Eigen::VectorXd b_full = pr.b;
  const int m = static_cast<int>(kept_rows.size());
  {
    Eigen::MatrixXd Ak(m, pr.nk), Af(m, pr.nf);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      Ak.row(i) = pr.Ak.row(kept_rows[i]);
      Af.row(i) = pr.Af.row(kept_rows[i]);
      b(i) = pr.b(kept_rows[i]);
    }
    pr.Ak = Ak; pr.Af = Af; pr.b = b;
  }

  ConeState st;
  st.U.resize(nb); st.S.resize(nb); st.W.resize(nb); st.Sinv.resize(nb);
  for (int i = 0; i < nb; ++i) {
    const int d = pr.cone_blocks[i].dim;
    st.U[i] = Eigen::MatrixXd::Identity(d, d);
    st.S[i] = Eigen::MatrixXd::Identity(d, d);
  }
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(pr.nf);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  auto gather_xk = [&]() {
    Eigen::VectorXd v(pr.nk);
    for (int i = 0; i < nb; ++i)
      v.segment(pr.cone_blocks[i].offset, pr.cone_blocks[i].vec_size) = svec(st.U[i]);
    return v;
  };
  auto gather_sk = [&]() {
    Eigen::VectorXd v(pr.nk);
    for (int i = 0; i < nb; ++i)
      v.segment(pr.cone_blocks[i].offset, pr.cone_blocks[i].vec_size) = svec(st.S[i]);
    return v;
  };
  auto apply_scaling = [&](const Eigen::Ref<const Eigen::VectorXd>& v) {
    Eigen::VectorXd out(pr.nk);
    for (int i = 0; i < nb; ++i) {
      const auto& lay = pr.cone_blocks[i];
      Eigen::MatrixXd Z = unsvec(v.segment(lay.offset, lay.vec_size), lay.dim);
      out.segment(lay.offset, lay.vec_size) = svec(st.W[i] * Z * st.W[i]);
    }
    return out;
  };

  ConicSolution sol;
  sol.primal.resize(prog.blocks.size());
  sol.dual_slack.resize(prog.blocks.size());

  auto finalize = [&](SolveStatus status, int iters) {
    Eigen::VectorXd xk = gather_xk();
    Eigen::VectorXd sk = gather_sk();
    sol.status = status;
    sol.iterations = iters;
    const double sgn = (pr.sense == Sense::Maximize) ? -1.0 : 1.0;
    const double cx = pr.ck.dot(xk) + pr.cf.dot(xf);
    const double by = pr.b.dot(y);
    sol.value = sgn * cx;
    sol.gap = std::abs(cx - by);
    Eigen::VectorXd rp = pr.b - pr.Ak * xk - pr.Af * xf;
    Eigen::VectorXd rdk = pr.ck - pr.Ak.transpose() * y - sk;
    Eigen::VectorXd rdf = pr.cf - pr.Af.transpose() * y;
    sol.primal_residual = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
    double rd = rdk.size() ? rdk.cwiseAbs().maxCoeff() : 0.0;
    if (rdf.size()) rd = std::max(rd, rdf.cwiseAbs().maxCoeff());
    sol.dual_residual = rd;
    sol.dual = Eigen::VectorXd::Zero(m_all);
    for (int i = 0; i < m; ++i) sol.dual(kept_rows[i]) = sgn * y(i);
    for (int i = 0; i < nb; ++i) {
      sol.primal[pr.cone_block_ids[i]] = st.U[i];
      sol.dual_slack[pr.cone_block_ids[i]] = st.S[i];
    }
    for (int i = 0; i < pr.nf; ++i) {
      sol.primal[pr.free_block_ids[i]] = Eigen::MatrixXd::Constant(1, 1, xf(i));
      sol.dual_slack[pr.free_block_ids[i]] = Eigen::MatrixXd::Zero(1, 1);
    }
    // Consistency of the rows dropped by presolve.
    if (status == SolveStatus::Optimal) {
      Eigen::VectorXd r_all = b_full - Ak_full * xk - Af_full * xf;
      if (r_all.size() && r_all.cwiseAbs().maxCoeff() > 1e-6)
        sol.status = SolveStatus::Infeasible;
    }
    return sol;
  };

  const double norm_scale = 1.0 + std::max(pr.b.size() ? pr.b.cwiseAbs().maxCoeff() : 0.0,
                                           std::max(pr.ck.size() ? pr.ck.cwiseAbs().maxCoeff() : 0.0,
                                                    pr.nf ? pr.cf.cwiseAbs().maxCoeff() : 0.0));

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Eigen::VectorXd xk = gather_xk();
    Eigen::VectorXd sk = gather_sk();
    Eigen::VectorXd rp = pr.b - pr.Ak * xk - pr.Af * xf;
    Eigen::VectorXd rdk = pr.ck - pr.Ak.transpose() * y - sk;
    Eigen::VectorXd rdf = pr.cf - pr.Af.transpose() * y;
    const double mu = xk.dot(sk) / pr.barrier_nu;
    const double cx = pr.ck.dot(xk) + pr.cf.dot(xf);
    const double by = pr.b.dot(y);

    double prim_res = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
    double dual_res = rdk.size() ? rdk.cwiseAbs().maxCoeff() : 0.0;
    if (rdf.size()) dual_res = std::max(dual_res, rdf.cwiseAbs().maxCoeff());
    const double gap = std::abs(cx - by);

    if (prim_res <= opts.tol && dual_res <= opts.tol &&
        (gap <= 10 * opts.tol || gap <= 10 * opts.tol * (1.0 + std::abs(cx))))
      return finalize(SolveStatus::Optimal, iter);

    // Certificate-of-infeasibility checks on the current normalized iterates.
    {
      const double ynorm = y.norm();
      if (ynorm > 1.0) {
        Eigen::VectorXd yh = y / ynorm;
        Eigen::VectorXd zk = -pr.Ak.transpose() * yh;
        Eigen::VectorXd zf = -pr.Af.transpose() * yh;
        double viol = zf.size() ? zf.cwiseAbs().maxCoeff() : 0.0;
        for (int i = 0; i < nb; ++i) {
          const auto& lay = pr.cone_blocks[i];
          double me = cone_min_eig(unsvec(zk.segment(lay.offset, lay.vec_size), lay.dim));
          viol = std::max(viol, -me);
        }
        if (viol <= 1e-9 * norm_scale && pr.b.dot(yh) > 1e-6)
          return finalize(SolveStatus::Infeasible, iter);
      }
      const double xnorm = std::sqrt(xk.squaredNorm() + xf.squaredNorm());
      if (xnorm > 1e4) {
        Eigen::VectorXd xkh = xk / xnorm, xfh = xf / xnorm;
        Eigen::VectorXd ax = pr.Ak * xkh + pr.Af * xfh;
        if ((!ax.size() || ax.cwiseAbs().maxCoeff() <= 1e-9 * norm_scale) &&
            pr.ck.dot(xkh) + pr.cf.dot(xfh) < -1e-6)
          return finalize(SolveStatus::Unbounded, iter);
      }
    }

    // NT scaling per block.
    for (int i = 0; i < nb; ++i) {
      if (pr.cone_blocks[i].dim == 1) {
        st.W[i] = Eigen::MatrixXd::Constant(1, 1, std::sqrt(st.U[i](0, 0) / st.S[i](0, 0)));
        st.Sinv[i] = Eigen::MatrixXd::Constant(1, 1, 1.0 / st.S[i](0, 0));
      } else {
        Eigen::MatrixXd Uh = sym_sqrt(st.U[i], false);
        Eigen::MatrixXd T = Uh * st.S[i] * Uh;
        st.W[i] = Uh * sym_sqrt(T, true) * Uh;
        st.W[i] = 0.5 * (st.W[i] + st.W[i].transpose());
        st.Sinv[i] = sym_sqrt(st.S[i], true);
        st.Sinv[i] = st.Sinv[i] * st.Sinv[i];
      }
    }

    // Schur complement M = Ak P Ak^T with P the blockwise W (.) W map.
    Eigen::MatrixXd PAt(pr.nk, m);
    for (int j = 0; j < m; ++j) PAt.col(j) = apply_scaling(pr.Ak.row(j));
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + pr.nf, m + pr.nf);
    K.topLeftCorner(m, m) = pr.Ak * PAt;
    K.topRightCorner(m, pr.nf) = pr.Af;
    K.bottomLeftCorner(pr.nf, m) = pr.Af.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> kkt(K);

    Eigen::VectorXd sinv_vec(pr.nk);
    for (int i = 0; i < nb; ++i)
      sinv_vec.segment(pr.cone_blocks[i].offset, pr.cone_blocks[i].vec_size) =
          svec(st.Sinv[i]);

    auto direction = [&](double sigma_mu, Eigen::VectorXd& dxk, Eigen::VectorXd& dxf,
                         Eigen::VectorXd& dy, Eigen::VectorXd& dsk) {
      Eigen::VectorXd R = sigma_mu * sinv_vec - xk;
      Eigen::VectorXd rhs(m + pr.nf);
      rhs.head(m) = rp - pr.Ak * R + pr.Ak * apply_scaling(rdk);
      rhs.tail(pr.nf) = rdf;
      Eigen::VectorXd dyv = kkt.solve(rhs);
      dy = dyv.head(m);
      dxf = dyv.tail(pr.nf);
      dsk = rdk - pr.Ak.transpose() * dy;
      dxk = R - apply_scaling(dsk);
    };

    auto step_lengths = [&](const Eigen::VectorXd& dxk, const Eigen::VectorXd& dsk,
                            double& ap, double& ad) {
      ap = 1.0; ad = 1.0;
      for (int i = 0; i < nb; ++i) {
        const auto& lay = pr.cone_blocks[i];
        ap = std::min(ap, max_step(st.U[i], unsvec(dxk.segment(lay.offset, lay.vec_size), lay.dim)));
        ad = std::min(ad, max_step(st.S[i], unsvec(dsk.segment(lay.offset, lay.vec_size), lay.dim)));
      }
    };

    Eigen::VectorXd dxk, dxf, dy, dsk;
    direction(0.0, dxk, dxf, dy, dsk);
    double ap_aff, ad_aff;
    step_lengths(dxk, dsk, ap_aff, ad_aff);
    const double mu_aff =
        (xk + ap_aff * dxk).dot(sk + ad_aff * dsk) / pr.barrier_nu;
    double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0);
    sigma = std::min(0.8, std::max(1e-4, sigma));

    direction(sigma * mu, dxk, dxf, dy, dsk);
    double ap, ad;
    step_lengths(dxk, dsk, ap, ad);
    if (ap < 1e-12 && ad < 1e-12) return finalize(SolveStatus::NumericalFailure, iter);

    for (int i = 0; i < nb; ++i) {
      const auto& lay = pr.cone_blocks[i];
      st.U[i] += ap * unsvec(dxk.segment(lay.offset, lay.vec_size), lay.dim);
      st.S[i] += ad * unsvec(dsk.segment(lay.offset, lay.vec_size), lay.dim);
      st.U[i] = 0.5 * (st.U[i] + st.U[i].transpose());
      st.S[i] = 0.5 * (st.S[i] + st.S[i].transpose());
    }
    xf += ap * dxf;
    y += ad * dy;
  }

  return finalize(SolveStatus::MaxIterations, opts.max_iters);
}

bool CertificateReport::ok(double tol) const {
  return primal_eq_residual <= 10 * tol && primal_cone_violation <= 10 * tol &&
         dual_slack_violation <= 10 * tol && gap <= 100 * tol;
}

CertificateReport verify_certificate(const ConicProgram& p, const ConicSolution& sol) {
  CertificateReport rep;
  const double sgn = (p.sense == Sense::Maximize) ? 1.0 : -1.0;

  double obj = 0.0;
  for (const auto& t : p.objective.terms)
    obj += (t.coeff.cwiseProduct(sol.primal[t.block])).sum();

  double by = 0.0;
  for (std::size_t j = 0; j < p.equalities.size(); ++j)
    by += sol.dual(static_cast<Eigen::Index>(j)) * p.equalities[j].rhs;
  rep.gap = std::abs(obj - by);

  for (std::size_t j = 0; j < p.equalities.size(); ++j) {
    double lhs = 0.0;
    for (const auto& t : p.equalities[j].lhs.terms)
      lhs += (t.coeff.cwiseProduct(sol.primal[t.block])).sum();
    rep.primal_eq_residual =
        std::max(rep.primal_eq_residual, std::abs(lhs - p.equalities[j].rhs));
  }

  // Recompute dual slacks from scratch: Z_i = sgn*(sum_j y_j A_ji - C_i)
  // for Maximize (and the negation for Minimize); must be PSD on cone blocks.
  std::vector<Eigen::MatrixXd> slack(p.blocks.size());
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    slack[i] = Eigen::MatrixXd::Zero(p.blocks[i].dim, p.blocks[i].dim);
  for (std::size_t j = 0; j < p.equalities.size(); ++j)
    for (const auto& t : p.equalities[j].lhs.terms)
      slack[t.block] += sgn * sol.dual(static_cast<Eigen::Index>(j)) * t.coeff;
  for (const auto& t : p.objective.terms) slack[t.block] -= sgn * t.coeff;

  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (p.blocks[i].kind == BlockKind::Free) {
      rep.dual_slack_violation =
          std::max(rep.dual_slack_violation, slack[i].cwiseAbs().maxCoeff());
      continue;
    }
    Eigen::MatrixXd zs = 0.5 * (slack[i] + slack[i].transpose());
    rep.dual_slack_violation = std::max(rep.dual_slack_violation, -cone_min_eig(zs));
    rep.primal_cone_violation =
        std::max(rep.primal_cone_violation, -cone_min_eig(sol.primal[i]));
    rep.complementarity += (zs.cwiseProduct(sol.primal[i])).sum();
  }
  return rep;
}

}  // namespace steer
