#pragma once

#include "qbound/certificate.hpp"

namespace qbound {

class NicifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gram matrix of a degree-1 certificate over the reordered degree-1 basis:
// one block per Alice question first, then the Bob-plus-identity band.
// Alice cross-question blocks are exactly zero.
struct StructuredGram {
  Eigen::MatrixXcd M;
  std::vector<Monomial> labels;        // row/column monomials in partition order
  std::vector<int> alice_block_sizes;  // per question
  int alice_dim = 0;                   // leading corner size
  AlgebraSignature signature;
};

struct NicifyOptions {
  double cross_block_tol = 1e-7;   // larger Alice cross-question entries are an error
  double completion_tol = 1e-8;    // bound on ||R^dag R - M||_inf
};

StructuredGram gram_from_certificate(const SosCertificate& cert, const MonomialBasis& basis,
                                     const NicifyOptions& opts = {});

// Rank-revealing upper-triangular factor R with R^dag R = M (pivoted Cholesky
// followed by a QR pass; zero rows mark rank deficiency).
// Throws NicifyError when an eigenvalue is below -psd_tol.
Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& M, double psd_tol = 1e-9);

// Blockwise factorization of a block-diagonal PSD Alice corner.
Eigen::MatrixXcd block_cholesky(const Eigen::MatrixXcd& Ma,
                                const std::vector<int>& block_sizes, double psd_tol = 1e-9);

// Completes a prescribed corner factor Ra (Ra^dag Ra = leading corner of M) to
// a block-triangular R = [[Ra, Rab], [0, Rb]] with R^dag R = M.  The aligning
// unitary is found by orthogonal Procrustes on the corner factors.
Eigen::MatrixXcd cholesky_complete(const Eigen::MatrixXcd& M, int corner,
                                   const Eigen::MatrixXcd& Ra,
                                   const NicifyOptions& opts = {});

// Full pipeline: gram -> blockwise corner factor -> completion -> rows as
// unit-weight terms.  Bound and constraint part are carried over unchanged.
SosCertificate nicify_level1(const SosCertificate& cert, const GamePolynomial& gp,
                             const NicifyOptions& opts = {});

}  // namespace qbound
