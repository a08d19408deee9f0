#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>

#include "qbound/games.hpp"

namespace qbound {

class RelaxationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BasisSide { Both, BobOnly };

// Ordered, linearly independent monomials of degree <= d over the
// non-eliminated generators (Projector kind drops answer 0 of every question;
// Observable kind keeps all powers 1..d-1).  Identity is entry 0.
struct MonomialBasis {
  std::vector<Monomial> entries;
  std::map<Monomial, int> index;
  int degree = 0;
  BasisSide side = BasisSide::Both;

  int size() const { return static_cast<int>(entries.size()); }
};

MonomialBasis npa_basis(const AlgebraSignature& sig, int d, BasisSide side = BasisSide::Both);

// Standard-form SDP with Hermitian data:
//   maximize <C, X>  s.t.  <A_k, X> = b_k,  X (block diagonal) >= 0,
// with <A, B> = tr(A B) for Hermitian A, B.  Exactly one constraint is the
// normalization (b = 1); its dual multiplier is the bound nu.
struct SdpProblem {
  struct Entry {
    int block;
    int row;
    int col;
    Complex value;
  };
  struct Constraint {
    std::vector<Entry> entries;  // the complete Hermitian entry set
    double rhs = 0.0;
  };

  AlgebraSignature sig;
  std::vector<int> block_dims;
  std::vector<Eigen::MatrixXcd> objective;
  std::vector<Constraint> constraints;
  int normalization_index = 0;
  int degree = 0;

  // label map: rows/columns of every block are indexed by `basis`; a block of
  // a one-sided problem additionally carries its Alice (question, answer).
  MonomialBasis basis;
  struct AliceLabel {
    int question;
    int answer;
  };
  std::vector<std::optional<AliceLabel>> block_label;

  // polynomial the problem was built from, for certificate reconstruction
  Polynomial source_poly;
  std::string description;

  int total_dim() const;
  void validate() const;
};

struct RelaxationOptions {
  int degree_cap = 3;  // override for deliberately larger builds
};

// Degree-d NPA moment relaxation of a Hermitian game polynomial.
SdpProblem build_npa(const GamePolynomial& gp, int d, const RelaxationOptions& opts = {});

// Degree-d one-sided relaxation: one moment block per (Alice answer, question)
// pair over the Bob-only basis, linked by consistency constraints.  Requires
// Alice degree <= 1 in every monomial of gp.
SdpProblem build_onesided(const GamePolynomial& gp, int d, const RelaxationOptions& opts = {});

// Description of the dual: which multiplier is the bound nu, and the slack
// reconstruction sum_k y_k A_k - C consumed by certificate extraction.
struct DualView {
  int normalization_index;
};
DualView dual_data(const SdpProblem& p);
std::vector<Eigen::MatrixXcd> dual_slack(const SdpProblem& p, std::span<const double> y);

// The polynomial a matrix entry (block, i, j) stands for:
// block_prefix * basis[i]^dagger * basis[j].  The prefix of a one-sided block
// is the PVM element of its Alice label (Fourier-expanded in Observable kind).
Polynomial entry_polynomial(const SdpProblem& p, int block, int i, int j);
Polynomial block_prefix_polynomial(const SdpProblem& p, int block);
Polynomial constraint_polynomial(const SdpProblem& p, const SdpProblem::Constraint& c);
Polynomial objective_polynomial(const SdpProblem& p);

// JSON dump of the assembled problem, for debugging.
void dump_problem(const SdpProblem& p, const std::string& path);

}  // namespace qbound
