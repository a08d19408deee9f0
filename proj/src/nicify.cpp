#include "qbound/nicify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qbound/formats.hpp"

namespace qbound {

namespace {

// Rows are phase-normalized so the first nonzero entry is positive real;
// deterministic and invariant under R^dag R.
void normalize_row_phases(Eigen::MatrixXcd& R) {
  for (int i = 0; i < R.rows(); ++i) {
    for (int j = 0; j < R.cols(); ++j) {
      const Complex v = R(i, j);
      if (std::abs(v) > 0.0) {
        R.row(i) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
}

}  // namespace

Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& M, double psd_tol) {
  const int n = static_cast<int>(M.rows());
  if (n == 0) return Eigen::MatrixXcd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success) throw NicifyError("eigendecomposition failed");
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -psd_tol)
    throw NicifyError("matrix is not PSD: min eigenvalue " + format_double(lmin));

  // square root with negatives clipped, then a QR pass for triangularity
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd F =
      clipped.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();  // F^dag F = M
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(F);
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  // flush rank-deficient rows to exact zeros
  const double scale = std::max(1.0, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
  for (int i = 0; i < n; ++i)
    if (R.row(i).norm() <= 1e-14 * scale * n) R.row(i).setZero();
  normalize_row_phases(R);
  return R;
}

Eigen::MatrixXcd block_cholesky(const Eigen::MatrixXcd& Ma, const std::vector<int>& block_sizes,
                                double psd_tol) {
  int total = 0;
  for (int s : block_sizes) total += s;
  if (total != Ma.rows())
    throw NicifyError("block sizes do not cover the Alice corner");
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(total, total);
  int off = 0;
  for (int s : block_sizes) {
    R.block(off, off, s, s) = psd_factor(Ma.block(off, off, s, s), psd_tol);
    off += s;
  }
  return R;
}

StructuredGram gram_from_certificate(const SosCertificate& cert, const MonomialBasis& basis,
                                     const NicifyOptions& opts) {
  const AlgebraSignature& sig = cert.signature;
  StructuredGram g;
  g.signature = sig;

  // partition: per-question Alice letters, then Bob letters, then identity
  std::vector<Monomial> alice, bob;
  for (int q = 0; q < sig.alice_questions; ++q) {
    int count = 0;
    for (const Monomial& m : basis.entries) {
      if (m.degree() != 1) continue;
      const Letter& l = m.word()[0];
      if (l.party == Party::Alice && l.question == q) {
        alice.push_back(m);
        ++count;
      }
    }
    g.alice_block_sizes.push_back(count);
  }
  for (const Monomial& m : basis.entries) {
    if (m.degree() != 1) continue;
    if (m.word()[0].party == Party::Bob) bob.push_back(m);
  }
  g.labels = alice;
  g.labels.insert(g.labels.end(), bob.begin(), bob.end());
  g.labels.push_back(Monomial());  // identity column last
  g.alice_dim = static_cast<int>(alice.size());

  std::map<Monomial, int> pos;
  for (int i = 0; i < static_cast<int>(g.labels.size()); ++i) pos.emplace(g.labels[i], i);

  const int n = static_cast<int>(g.labels.size());
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(static_cast<int>(cert.terms.size()), n);
  for (size_t i = 0; i < cert.terms.size(); ++i) {
    const auto& term = cert.terms[i];
    if (term.lambda < 0.0) throw NicifyError("negative weight in certificate");
    const double w = std::sqrt(term.lambda);
    for (const auto& [m, c] : term.r.terms()) {
      auto it = pos.find(m);
      if (it == pos.end())
        throw NicifyError("certificate term " + std::to_string(i) +
                          " is not degree <= 1 over the eliminated basis (monomial " +
                          poly_to_text(Polynomial::monomial(sig, m)) + ")");
      S(static_cast<int>(i), it->second) = w * c;
    }
  }
  g.M = S.adjoint() * S;
  g.M = 0.5 * (g.M + g.M.adjoint().eval());

  // Alice cross-question blocks must vanish for a level-1-shaped certificate
  int roff = 0;
  for (size_t qa = 0; qa < g.alice_block_sizes.size(); ++qa) {
    int coff = 0;
    for (size_t qb = 0; qb < g.alice_block_sizes.size(); ++qb) {
      if (qa != qb) {
        const auto blockview =
            g.M.block(roff, coff, g.alice_block_sizes[qa], g.alice_block_sizes[qb]);
        const double mx = blockview.cwiseAbs().maxCoeff();
        if (mx > opts.cross_block_tol)
          throw NicifyError("Alice cross-question Gram entry of magnitude " +
                            format_double(mx) + " between questions " + std::to_string(qa) +
                            " and " + std::to_string(qb) +
                            "; not a level-1-shaped certificate");
        g.M.block(roff, coff, g.alice_block_sizes[qa], g.alice_block_sizes[qb]).setZero();
      }
      coff += g.alice_block_sizes[qb];
    }
    roff += g.alice_block_sizes[qa];
  }
  return g;
}

Eigen::MatrixXcd cholesky_complete(const Eigen::MatrixXcd& M, int corner,
                                   const Eigen::MatrixXcd& Ra, const NicifyOptions& opts) {
  const int n = static_cast<int>(M.rows());
  if (corner < 0 || corner > n) throw NicifyError("corner size out of range");
  if (Ra.rows() != corner || Ra.cols() != corner)
    throw NicifyError("corner factor has wrong dimensions");
  const Eigen::MatrixXcd Ma = M.topLeftCorner(corner, corner);
  const double corner_scale = std::max(1.0, Ma.cwiseAbs().maxCoeff());
  if (corner > 0 && (Ra.adjoint() * Ra - Ma).cwiseAbs().maxCoeff() > 1e-9 * corner_scale)
    throw NicifyError("Ra^dag Ra does not match the Alice corner of M");

  // block-triangular factorization M = S^dag S with S = [[Sa, Sab], [0, Sb]]
  const Eigen::MatrixXcd Sa = psd_factor(Ma);
  const Eigen::MatrixXcd Mab = M.topRightCorner(corner, n - corner);
  Eigen::MatrixXcd Sab(corner, n - corner);
  if (corner > 0 && n > corner) {
    // least-squares solve of Sa^dag Sab = Mab; consistent since M is PSD
    Sab = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>(Sa.adjoint()).solve(Mab);
  } else {
    Sab.setZero();
  }
  Eigen::MatrixXcd schur =
      M.bottomRightCorner(n - corner, n - corner) - Sab.adjoint() * Sab;
  schur = 0.5 * (schur + schur.adjoint().eval());
  const Eigen::MatrixXcd Sb = psd_factor(schur, 1e-7);

  // orthogonal Procrustes: unitary V with V Sa = Ra (exists, equal Grams)
  Eigen::MatrixXcd V;
  if (corner > 0) {
    const Eigen::MatrixXcd K = Sa * Ra.adjoint();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
    V = svd.matrixV() * svd.matrixU().adjoint();
    const double align = (V * Sa - Ra).cwiseAbs().maxCoeff();
    if (align > 1e-7 * corner_scale) {
      std::string sv;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        sv += (i ? ", " : "") + format_double(svd.singularValues()(i));
      throw NicifyError("no unitary aligns the corner factors (defect " +
                        format_double(align) + ", singular values [" + sv + "])");
    }
  } else {
    V.resize(0, 0);
  }

  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(n, n);
  R.topLeftCorner(corner, corner) = Ra;
  if (n > corner) {
    R.topRightCorner(corner, n - corner) = V * Sab;
    R.bottomRightCorner(n - corner, n - corner) = Sb;
  }
  const double defect = (R.adjoint() * R - M).cwiseAbs().maxCoeff();
  if (defect > opts.completion_tol)
    throw NicifyError("completion residual " + format_double(defect) + " exceeds tolerance");
  return R;
}

SosCertificate nicify_level1(const SosCertificate& cert, const GamePolynomial& gp,
                             const NicifyOptions& opts) {
  if (!(cert.signature == gp.signature))
    throw NicifyError("certificate and game polynomial signatures differ");
  for (size_t i = 0; i < cert.terms.size(); ++i)
    if (cert.terms[i].r.degree() > 1)
      throw NicifyError("term " + std::to_string(i) + " has degree > 1");

  MonomialBasis basis = npa_basis(cert.signature, 1);
  StructuredGram g = gram_from_certificate(cert, basis, opts);
  const Eigen::MatrixXcd Ra =
      block_cholesky(g.M.topLeftCorner(g.alice_dim, g.alice_dim), g.alice_block_sizes);
  const Eigen::MatrixXcd R = cholesky_complete(g.M, g.alice_dim, Ra, opts);

  SosCertificate out;
  out.bound = cert.bound;
  out.signature = cert.signature;
  out.constraint_part = cert.constraint_part;
  out.provenance = cert.provenance.empty() ? "nicify" : cert.provenance + "+nicify";
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  for (int i = 0; i < R.rows(); ++i) {
    if (R.row(i).norm() <= 1e-12 * scale) continue;
    Polynomial r(cert.signature);
    for (int j = 0; j < R.cols(); ++j)
      if (std::abs(R(i, j)) > 0.0) r.add_term(g.labels[j], R(i, j));
    out.terms.push_back({1.0, std::move(r)});
  }
  return out;
}

}  // namespace qbound
