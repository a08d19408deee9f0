#include "qbound/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace qbound {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& H, double herm_tol) {
  const Eigen::Index n = H.rows();
  if (H.cols() != n) throw RelaxationError("real_embed: matrix not square");
  if (n > 0 && (H - H.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw RelaxationError("real_embed: matrix not Hermitian");
  Eigen::MatrixXd M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = H.real();
  M.bottomRightCorner(n, n) = H.real();
  M.topRightCorner(n, n) = -H.imag();
  M.bottomLeftCorner(n, n) = H.imag();
  return M;
}

Eigen::MatrixXcd real_unembed(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows() / 2;
  Eigen::MatrixXcd H(n, n);
  // average over the complex-structure symmetry; exact on true embeddings
  H.real() = 0.5 * (M.topLeftCorner(n, n) + M.bottomRightCorner(n, n));
  H.imag() = 0.5 * (M.bottomLeftCorner(n, n) - M.topRightCorner(n, n));
  return H;
}

namespace {

// The interior-point internals run in extended precision: the corpus contains
// degenerate problems (blocks without strict complementarity) whose double
// precision stall sits right at the requested gap tolerance.
using Real = long double;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct RealEntry {
  int block, row, col;
  Real v;
};

// Real symmetric block-diagonal SDP in standard form.
struct RealProblem {
  std::vector<int> dims;
  std::vector<MatR> C;
  std::vector<std::vector<RealEntry>> A;  // complete symmetric entry sets
  std::vector<Real> b;
};

std::vector<RealEntry> embed_entries(const std::vector<SdpProblem::Entry>& in,
                                     const std::vector<int>& cdims) {
  std::map<std::tuple<int, int, int>, Real> acc;
  for (const auto& e : in) {
    const int n = cdims[e.block];
    const Real re = e.value.real(), im = e.value.imag();
    if (re != 0.0L) {
      acc[{e.block, e.row, e.col}] += re;
      acc[{e.block, e.row + n, e.col + n}] += re;
    }
    if (im != 0.0L) {
      acc[{e.block, e.row, e.col + n}] += -im;
      acc[{e.block, e.row + n, e.col}] += im;
    }
  }
  std::vector<RealEntry> out;
  out.reserve(acc.size());
  for (const auto& [k, v] : acc)
    if (v != 0.0L) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), v});
  return out;
}

Real sparse_dot(const std::vector<RealEntry>& A, const std::vector<MatR>& X) {
  Real s = 0.0L;
  for (const auto& e : A) s += e.v * X[e.block](e.row, e.col);
  return s;
}

void add_scaled(std::vector<MatR>& M, const std::vector<RealEntry>& A, Real w) {
  for (const auto& e : A) M[e.block](e.row, e.col) += w * e.v;
}

Real frob2(const std::vector<RealEntry>& A) {
  Real s = 0.0L;
  for (const auto& e : A) s += e.v * e.v;
  return s;
}

// Greedy pivoted Cholesky on the constraint Gram matrix; row `forced` is taken
// first.  Equivalent to column-pivoted QR on the stacked constraint rows;
// pivots below tol * sqrt(largest diagonal) are dropped as dependent.
std::vector<int> independent_rows(const RealProblem& rp, int forced, Real tol) {
  const int m = static_cast<int>(rp.A.size());
  MatR G(m, m);
  {
    std::vector<std::map<std::tuple<int, int, int>, Real>> maps(m);
    for (int k = 0; k < m; ++k)
      for (const auto& e : rp.A[k]) maps[k][{e.block, e.row, e.col}] = e.v;
    for (int k = 0; k < m; ++k)
      for (int l = k; l < m; ++l) {
        const auto& small = maps[k].size() <= maps[l].size() ? maps[k] : maps[l];
        const auto& big = maps[k].size() <= maps[l].size() ? maps[l] : maps[k];
        Real s = 0.0L;
        for (const auto& [key, v] : small) {
          auto it = big.find(key);
          if (it != big.end()) s += v * it->second;
        }
        G(k, l) = G(l, k) = s;
      }
  }
  VecR d = G.diagonal();
  const Real thresh = tol * tol * std::max(d.maxCoeff(), Real(1));
  std::vector<int> kept;
  MatR L = MatR::Zero(m, m);  // selected factor rows
  std::vector<bool> used(m, false);
  for (int step = 0; step < m; ++step) {
    int p = -1;
    if (step == 0) {
      p = forced;
    } else {
      Real best = thresh;
      for (int k = 0; k < m; ++k)
        if (!used[k] && d(k) > best) {
          best = d(k);
          p = k;
        }
    }
    if (p < 0) break;
    const Real piv = std::sqrt(std::max(d(p), Real(1e-300)));
    VecR row = G.col(p);
    for (int t = 0; t < static_cast<int>(kept.size()); ++t)
      row -= L(t, p) * L.row(t).transpose();
    row /= piv;
    L.row(static_cast<int>(kept.size())) = row.transpose();
    for (int k = 0; k < m; ++k)
      if (!used[k]) d(k) -= row(k) * row(k);
    used[p] = true;
    kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// max alpha in (0, 1] keeping X + alpha dX positive definite, damped by tau
Real step_length(const std::vector<MatR>& X, const std::vector<MatR>& dX, Real tau) {
  Real alpha = 1.0L;
  for (size_t b = 0; b < X.size(); ++b) {
    Eigen::LLT<MatR> llt(X[b]);
    if (llt.info() != Eigen::Success) {
      // interior only up to roundoff; retry with a tiny diagonal shift
      MatR Xs = X[b];
      Xs.diagonal().array() += 1e-17L * std::max(Real(1), Xs.diagonal().maxCoeff());
      llt.compute(Xs);
      if (llt.info() != Eigen::Success) return 0.0L;
    }
    MatR L = llt.matrixL();
    MatR M = L.template triangularView<Eigen::Lower>().solve(dX[b]);
    M = L.template triangularView<Eigen::Lower>().solve(MatR(M.transpose()));
    Eigen::SelfAdjointEigenSolver<MatR> es(MatR(0.5L * (M + M.transpose())),
                                           Eigen::EigenvaluesOnly);
    const Real lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0L) alpha = std::min(alpha, -tau / lmin);
  }
  return std::min(alpha, Real(1));
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
  p.validate();
  const int nblocks = static_cast<int>(p.block_dims.size());
  const bool trace = std::getenv("QBOUND_SDP_TRACE") != nullptr;

  // real symmetric embedding; <embed A, embed B> = 2 <A, B>, so rhs doubles
  RealProblem rp;
  for (int b = 0; b < nblocks; ++b) rp.dims.push_back(2 * p.block_dims[b]);
  for (int b = 0; b < nblocks; ++b) rp.C.push_back(real_embed(p.objective[b]).cast<Real>());
  for (const auto& c : p.constraints) {
    rp.A.push_back(embed_entries(c.entries, p.block_dims));
    rp.b.push_back(2.0L * static_cast<Real>(c.rhs));
  }

  const std::vector<int> kept = independent_rows(rp, p.normalization_index, 1e-10L);
  RealProblem fp;
  fp.dims = rp.dims;
  fp.C = rp.C;
  std::vector<Real> row_scale;  // rows normalized to unit Frobenius norm
  for (int k : kept) {
    Real nrm = std::sqrt(frob2(rp.A[k]));
    if (nrm <= 0.0L) nrm = 1.0L;
    for (auto& e : rp.A[k]) e.v /= nrm;
    fp.A.push_back(std::move(rp.A[k]));
    fp.b.push_back(rp.b[k] / nrm);
    row_scale.push_back(nrm);
  }
  const int m = static_cast<int>(fp.A.size());
  int N = 0;
  for (int d : fp.dims) N += d;

  // identity start scaled by the data magnitude
  Real data_scale = 1.0L;
  for (const auto& C : fp.C)
    if (C.size() > 0) data_scale = std::max(data_scale, C.cwiseAbs().maxCoeff());
  for (int k = 0; k < m; ++k) data_scale = std::max(data_scale, std::abs(fp.b[k]));
  const Real init = std::max(Real(10), data_scale);

  std::vector<MatR> X, Z;
  for (int d : fp.dims) {
    X.push_back(MatR::Identity(d, d) * init);
    Z.push_back(MatR::Identity(d, d) * init);
  }
  VecR y = VecR::Zero(m);

  SdpSolution sol;
  MatR S(m, m);
  VecR rprim(m), rhs(m), dy(m);
  std::vector<MatR> W(nblocks), Zinv(nblocks), Rd(nblocks), Rc(nblocks), RcEff(nblocks),
      dX(nblocks), dZ(nblocks);

  // best iterate seen, by worst-of(gap, feasibility); degenerate problems can
  // lose ground once the floating-point floor is reached
  std::vector<MatR> bX = X, bZ = Z;
  VecR by = y;
  Real best_score = std::numeric_limits<Real>::infinity();
  int stall = 0;
  int tiny_steps = 0;

  auto dual_value = [&] {
    Real v = 0.0L;
    for (int k = 0; k < m; ++k) v += fp.b[k] * y(k);
    return v / 2.0L;  // complex-side scale
  };

  int iter = 0;
  sol.status = SolveStatus::MaxIter;
  for (iter = 0; iter < opts.max_iter; ++iter) {
    // residuals: rprim_k = b_k - <A_k, X>,  Rd = sum y_k A_k - C - Z
    Real rp_inf = 0.0L;
    for (int k = 0; k < m; ++k) {
      rprim(k) = fp.b[k] - sparse_dot(fp.A[k], X);
      rp_inf = std::max(rp_inf, std::abs(rprim(k)) / 2.0L);
    }
    Real rd_inf = 0.0L;
    for (int b = 0; b < nblocks; ++b) Rd[b] = -fp.C[b] - Z[b];
    for (int k = 0; k < m; ++k) add_scaled(Rd, fp.A[k], y(k));
    for (int b = 0; b < nblocks; ++b)
      rd_inf = std::max(rd_inf, Rd[b].cwiseAbs().maxCoeff());

    Real mu = 0.0L;
    for (int b = 0; b < nblocks; ++b) mu += X[b].cwiseProduct(Z[b]).sum();
    mu /= N;

    Real pobj = 0.0L;
    for (int b = 0; b < nblocks; ++b) pobj += fp.C[b].cwiseProduct(X[b]).sum();
    pobj /= 2.0L;
    const Real dobj = dual_value();
    const Real gap = std::abs(pobj - dobj);
    const Real scale = std::max({Real(1), std::abs(pobj), std::abs(dobj)});
    const Real score = std::max({gap / scale, rp_inf, rd_inf});
    if (score < best_score) {
      best_score = score;
      bX = X;
      bZ = Z;
      by = y;
      stall = 0;
    } else if (++stall >= 10) {
      break;  // no further progress; fall back to the best iterate
    }
    if (gap <= static_cast<Real>(opts.gap_tol) * scale &&
        rp_inf <= static_cast<Real>(opts.feas_tol) &&
        rd_inf <= static_cast<Real>(opts.feas_tol)) {
      sol.status = SolveStatus::Optimal;
      break;
    }
    if (!std::isfinite(static_cast<double>(mu)) || !std::isfinite(static_cast<double>(gap))) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }
    if (mu > 1e14L * init || std::abs(pobj) > 1e14L || std::abs(dobj) > 1e14L) {
      sol.status = SolveStatus::Infeasible;
      break;
    }

    // Nesterov-Todd scaling point per block: W Z W = X.  Roundoff-scale
    // eigenvalues are floored; a block whose slack vanishes at the optimum
    // (non-strict complementarity) is floored at the central-path scale so
    // that Z^-1 cannot outrun mu.
    bool scaling_ok = true;
    for (int b = 0; b < nblocks && scaling_ok; ++b) {
      Eigen::SelfAdjointEigenSolver<MatR> ez(Z[b]);
      const Real znorm = std::max(Z[b].cwiseAbs().maxCoeff(), Real(1e-100));
      if (ez.info() != Eigen::Success ||
          ez.eigenvalues().minCoeff() < -1e-10L * std::max(znorm, Real(1))) {
        scaling_ok = false;
        break;
      }
      const Real zfloor = std::max(
          1e-18L * znorm, 1e-2L * mu / std::max(Real(1), X[b].cwiseAbs().maxCoeff()));
      const VecR lz = ez.eigenvalues().cwiseMax(zfloor);
      const VecR sq = lz.cwiseSqrt();
      const MatR Zh = ez.eigenvectors() * sq.asDiagonal() * ez.eigenvectors().transpose();
      const MatR Zhi =
          ez.eigenvectors() * sq.cwiseInverse().asDiagonal() * ez.eigenvectors().transpose();
      MatR Mi = Zh * X[b] * Zh;
      Eigen::SelfAdjointEigenSolver<MatR> em(MatR(0.5L * (Mi + Mi.transpose())));
      const Real mnorm = std::max(Mi.cwiseAbs().maxCoeff(), Real(1e-100));
      if (em.info() != Eigen::Success ||
          em.eigenvalues().minCoeff() < -1e-10L * std::max(mnorm, Real(1))) {
        scaling_ok = false;
        break;
      }
      const VecR lm = em.eigenvalues().cwiseMax(1e-18L * mnorm);
      const MatR Mh =
          em.eigenvectors() * lm.cwiseSqrt().asDiagonal() * em.eigenvectors().transpose();
      W[b] = Zhi * Mh * Zhi;
      W[b] = 0.5L * (W[b] + W[b].transpose());
      Zinv[b] =
          ez.eigenvectors() * lz.cwiseInverse().asDiagonal() * ez.eigenvectors().transpose();
    }
    if (!scaling_ok) {
      if (trace) std::fprintf(stderr, "  exit: scaling failure\n");
      sol.status = SolveStatus::NumericalFailure;
      break;
    }

    // Schur complement S_kl = tr(A_k W A_l W); one factorization per iteration
    for (int k = 0; k < m; ++k)
      for (int l = k; l < m; ++l) {
        Real s = 0.0L;
        for (const auto& ek : fp.A[k])
          for (const auto& el : fp.A[l]) {
            if (ek.block != el.block) continue;
            const MatR& Wb = W[ek.block];
            s += ek.v * el.v * Wb(ek.col, el.row) * Wb(el.col, ek.row);
          }
        S(k, l) = S(l, k) = s;
      }
    // rows of constraints supported only on blocks whose primal part vanishes
    // degenerate to zero; a per-row floor keeps their multipliers bounded
    {
      const Real big = std::max(Real(1), S.diagonal().maxCoeff());
      for (int k = 0; k < m; ++k)
        S(k, k) = std::max(S(k, k), 1e-24L * big);
    }
    Eigen::LLT<MatR> sllt(S);
    {
      Real reg = 1e-20L * std::max(Real(1), S.diagonal().maxCoeff());
      int attempts = 0;
      while (sllt.info() != Eigen::Success && attempts < 10) {
        S.diagonal().array() += reg;
        sllt.compute(S);
        reg *= 100.0L;
        ++attempts;
      }
      if (sllt.info() != Eigen::Success) {
        if (trace) std::fprintf(stderr, "  exit: schur factorization failure\n");
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
    }

    // Newton direction for target sigma*mu:
    //   dX + W dZ W = Rc,    Rc = sigma mu Z^-1 - X
    //   dZ = sum_k dy_k A_k + Rd
    //   <A_k, dX> = rprim_k
    // eliminating:  S dy = <A_k, Rc - W Rd W> - rprim_k
    // once the dual residual reaches roundoff, carrying it through W Rd W
    // only injects W^2-amplified noise into the right-hand side
    const bool rd_negligible = rd_inf < 1e-13L;
    auto solve_direction = [&](Real sigmu) {
      for (int b = 0; b < nblocks; ++b) {
        Rc[b] = -X[b];
        if (sigmu != 0.0L) Rc[b] += sigmu * Zinv[b];
        RcEff[b] = rd_negligible ? Rc[b] : MatR(Rc[b] - W[b] * Rd[b] * W[b]);
      }
      for (int k = 0; k < m; ++k) rhs(k) = sparse_dot(fp.A[k], RcEff) - rprim(k);
      dy = sllt.solve(rhs);
      // iterative refinement keeps <A_k, dX> = rprim_k accurate even when the
      // Schur complement is ill-conditioned near the optimum
      for (int round = 0; round < 2; ++round) {
        VecR resid = rhs - S * dy;
        dy += sllt.solve(resid);
      }
      for (int b = 0; b < nblocks; ++b) {
        if (rd_negligible)
          dZ[b].setZero(Z[b].rows(), Z[b].cols());
        else
          dZ[b] = Rd[b];
      }
      for (int k = 0; k < m; ++k) add_scaled(dZ, fp.A[k], dy(k));
      for (int b = 0; b < nblocks; ++b) {
        dZ[b] = 0.5L * (dZ[b] + dZ[b].transpose());
        dX[b] = Rc[b] - W[b] * dZ[b] * W[b];
        dX[b] = 0.5L * (dX[b] + dX[b].transpose());
      }
    };

    // predictor (affine scaling) fixes the centering weight
    solve_direction(0.0L);
    const Real ap = step_length(X, dX, 1.0L);
    const Real ad = step_length(Z, dZ, 1.0L);
    Real mu_aff = 0.0L;
    for (int b = 0; b < nblocks; ++b)
      mu_aff += (X[b] + ap * dX[b]).cwiseProduct(Z[b] + ad * dZ[b]).sum();
    mu_aff /= N;
    Real sigma = std::pow(std::clamp(mu_aff / mu, Real(0), Real(1)), Real(3));
    sigma = std::clamp(sigma, Real(1e-12), Real(1));

    // corrector step
    solve_direction(sigma * mu);
    const Real tau = 0.98L;
    const Real sp = step_length(X, dX, tau);
    const Real sd = step_length(Z, dZ, tau);
    if (trace)
      std::fprintf(
          stderr, "it %3d mu %.3Le gap %.3Le rp %.3Le rd %.3Le sigma %.2Le sp %.3Lf sd %.3Lf\n",
          iter, mu, gap, rp_inf, rd_inf, sigma, sp, sd);
    for (int b = 0; b < nblocks; ++b) {
      X[b] += sp * dX[b];
      Z[b] += sd * dZ[b];
      X[b] = 0.5L * (X[b] + X[b].transpose());
      Z[b] = 0.5L * (Z[b] + Z[b].transpose());
    }
    y += sd * dy;

    if (sp < 1e-10L && sd < 1e-10L) {
      if (++tiny_steps >= 3) {
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
    } else {
      tiny_steps = 0;
    }
  }
  sol.iterations = iter;

  // settle on the best iterate and grade it honestly
  X = std::move(bX);
  Z = std::move(bZ);
  y = std::move(by);
  {
    Real rp_inf = 0.0L, rd_inf = 0.0L;
    for (int k = 0; k < m; ++k)
      rp_inf = std::max(rp_inf, std::abs(fp.b[k] - sparse_dot(fp.A[k], X)) / 2.0L);
    for (int b = 0; b < nblocks; ++b) Rd[b] = -fp.C[b] - Z[b];
    for (int k = 0; k < m; ++k) add_scaled(Rd, fp.A[k], y(k));
    for (int b = 0; b < nblocks; ++b)
      rd_inf = std::max(rd_inf, Rd[b].cwiseAbs().maxCoeff());
    Real pobj = 0.0L;
    for (int b = 0; b < nblocks; ++b) pobj += fp.C[b].cwiseProduct(X[b]).sum();
    pobj /= 2.0L;
    const Real dobj = dual_value();
    const Real gap = std::abs(pobj - dobj);
    const Real scale = std::max({Real(1), std::abs(pobj), std::abs(dobj)});
    if (gap <= static_cast<Real>(opts.gap_tol) * scale &&
        rp_inf <= static_cast<Real>(opts.feas_tol) &&
        rd_inf <= static_cast<Real>(opts.feas_tol))
      sol.status = SolveStatus::Optimal;
    else if (sol.status == SolveStatus::Optimal)
      sol.status = SolveStatus::NumericalFailure;
  }

  // de-embed; the complex-structure average cancels numerical drift
  sol.primal.resize(nblocks);
  sol.dual_slack.resize(nblocks);
  sol.dual_y.assign(p.constraints.size(), 0.0);
  for (int t = 0; t < static_cast<int>(kept.size()); ++t)
    sol.dual_y[kept[t]] = static_cast<double>(y(t) / row_scale[t]);
  for (int b = 0; b < nblocks; ++b) sol.primal[b] = real_unembed(X[b].cast<double>());

  // returned slack is the exact reconstruction; report the iterate's distance
  std::vector<Eigen::MatrixXcd> recon = dual_slack(p, sol.dual_y);
  double dres = 0.0;
  for (int b = 0; b < nblocks; ++b) {
    dres = std::max(dres,
                    (real_unembed(Z[b].cast<double>()) - recon[b]).cwiseAbs().maxCoeff());
    sol.dual_slack[b] = std::move(recon[b]);
  }
  sol.dual_residual = dres;

  double pobj = 0.0, prim_res = 0.0;
  for (int b = 0; b < nblocks; ++b)
    pobj += (p.objective[b].adjoint() * sol.primal[b]).trace().real();
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    Complex v = 0.0;
    for (const auto& e : p.constraints[k].entries)
      v += std::conj(e.value) * sol.primal[e.block](e.row, e.col);
    prim_res = std::max(prim_res, std::abs(v - p.constraints[k].rhs));
  }
  sol.primal_obj = pobj;
  sol.dual_obj = static_cast<double>(dual_value());
  sol.gap = std::abs(sol.primal_obj - sol.dual_obj);
  sol.primal_residual = prim_res;
  return sol;
}

}  // namespace qbound
