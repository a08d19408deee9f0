#pragma once

#include "qbound/sdp.hpp"

namespace qbound {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// nu I - P = sum_i lambda_i r_i^dag r_i + sum_j mu_j s_j.
// The s_j are generated by moment-equality relations and vanish after
// answer-0 substitution; verify() checks the whole identity, it is not assumed.
struct SosCertificate {
  struct Term {
    double lambda = 0.0;
    Polynomial r;
  };
  struct ConstraintTerm {
    double mu = 0.0;
    Polynomial s;
  };

  double bound = 0.0;
  std::vector<Term> terms;
  std::vector<ConstraintTerm> constraint_part;
  AlgebraSignature signature;
  std::string provenance;
};

struct NicenessReport {
  bool is_nice = true;
  // (term index, Alice questions present) for terms touching > 1 question
  std::vector<std::pair<int, std::vector<int>>> offending_terms;
};

struct VerifyReport {
  bool ok = false;
  double max_residual = 0.0;
  std::vector<std::pair<Monomial, double>> residuals;  // nonzero per-monomial
};

struct ExtractOptions {
  double clamp_tol = 1e-7;  // eigenvalues in [-clamp_tol, 0) are clamped to 0
};

// Turns the dual slack of an optimal solution into an SoS certificate via
// blockwise spectral decomposition.  One-sided blocks are confined to a single
// Alice question, so their terms are nice by construction.
SosCertificate extract(const SdpSolution& sol, const SdpProblem& p,
                       const ExtractOptions& opts = {});

// Symbolically expands nu I - gp - sum lambda r^dag r - sum mu s, substitutes
// the eliminated answer-0 generators and reports coefficient residuals.
VerifyReport verify(const SosCertificate& cert, const GamePolynomial& gp, double tol);

NicenessReport is_nice(const SosCertificate& cert);

void save_cert(const SosCertificate& cert, const std::string& path);
SosCertificate load_cert(const std::string& path);

}  // namespace qbound
