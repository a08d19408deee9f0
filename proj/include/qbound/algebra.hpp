#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Noncommutative monomial/polynomial arithmetic over the generators of a
// two-party game algebra.  Two generator kinds are supported:
//
//   Projector:  per question a PVM {M_aq}, relations  M_aq M_a'q = [a==a'] M_aq,
//               cross-party commutation.  The sum-to-identity relation
//               sum_a M_aq = I is *not* a rewrite rule; it is applied where
//               needed by eliminating answer 0 (see substitute_answer_zero).
//   Observable: per question a unitary of finite order d, relations
//               U_q^d = I, cross-party commutation.  Letters carry the
//               exponent 1..d-1.
//
// Canonical words keep all Alice letters before all Bob letters and never hold
// two adjacent letters of the same (party, question).

namespace qbound {

using Complex = std::complex<double>;

enum class Party : std::uint8_t { Alice = 0, Bob = 1 };
enum class GeneratorKind : std::uint8_t { Projector = 0, Observable = 1 };

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgebraSignature {
  int alice_questions = 0;
  int bob_questions = 0;
  int alice_answers = 0;  // answers per question (Projector) or order d (Observable)
  int bob_answers = 0;
  GeneratorKind kind = GeneratorKind::Projector;

  bool operator==(const AlgebraSignature&) const = default;

  int questions(Party p) const { return p == Party::Alice ? alice_questions : bob_questions; }
  int answers(Party p) const { return p == Party::Alice ? alice_answers : bob_answers; }
  void validate() const;
};

struct Letter {
  Party party = Party::Alice;
  int question = 0;
  // Projector: answer index in [0, answers).  Observable: exponent in [1, d).
  int payload = 0;

  auto operator<=>(const Letter&) const = default;
};

// A canonical word in the generators.  The empty word is the identity.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<Letter> word) : word_(std::move(word)) {}

  const std::vector<Letter>& word() const { return word_; }
  bool is_identity() const { return word_.empty(); }
  int degree() const { return static_cast<int>(word_.size()); }

  // degree-then-lexicographic order; deterministic basis enumeration relies on it
  bool operator<(const Monomial& o) const {
    if (word_.size() != o.word_.size()) return word_.size() < o.word_.size();
    return word_ < o.word_;
  }
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<Letter> word_;
};

// Validates letters against sig; throws AlgebraError on out-of-range letters.
// Returns nullopt when an orthogonality relation annihilates the word.
std::optional<Monomial> canonicalize(std::span<const Letter> word, const AlgebraSignature& sig);

Monomial monomial_adjoint(const Monomial& m, const AlgebraSignature& sig);

// Product of two canonical monomials; nullopt if annihilated.
std::optional<Monomial> monomial_product(const Monomial& a, const Monomial& b,
                                         const AlgebraSignature& sig);

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(AlgebraSignature sig) : sig_(sig) {}

  static Polynomial identity(const AlgebraSignature& sig);
  static Polynomial monomial(const AlgebraSignature& sig, const Monomial& m, Complex c = 1.0);
  static Polynomial letter(const AlgebraSignature& sig, Party p, int question, int payload,
                           Complex c = 1.0);

  const AlgebraSignature& signature() const { return sig_; }
  const std::map<Monomial, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  void add_term(const Monomial& m, Complex c);
  Complex coefficient(const Monomial& m) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(Complex c) const;
  Polynomial operator-() const { return *this * Complex(-1.0); }

  // max |coefficient| over all terms; 0 for the zero polynomial
  double max_abs_coefficient() const;

 private:
  AlgebraSignature sig_;
  std::map<Monomial, Complex> terms_;
};

Polynomial multiply(const Polynomial& p, const Polynomial& q);
Polynomial adjoint(const Polynomial& p);

// Fourier conversion between the two generator kinds.  to_observables expands
// each projector M_aq as (1/d) sum_j w_d^{-a j} U_q^j.  to_projectors expands
// each power U_q^j over the answer-eliminated projector set,
// U_q^j -> I + sum_{a>=1} (w_d^{a j} - 1) M_aq, so the output never contains
// answer-0 letters and the round trip is the identity on eliminated-form input.
Polynomial to_observables(const Polynomial& p);
Polynomial to_projectors(const Polynomial& p);

// Substitutes the designated eliminated generator M_0q -> I - sum_{a>=1} M_aq
// for every question of the selected parties.  Projector kind only.
Polynomial substitute_answer_zero(const Polynomial& p, bool alice = true, bool bob = true);

// Coefficientwise comparison of canonical forms; no sum-to-identity reasoning.
bool equal_mod_relations(const Polynomial& p, const Polynomial& q, double tol);

bool is_hermitian(const Polynomial& p, double tol);

// Primitive d-th root of unity to power k.
Complex root_of_unity(int d, long k);

}  // namespace qbound
