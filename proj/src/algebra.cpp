#include "qbound/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qbound {

void AlgebraSignature::validate() const {
  if (alice_questions < 1 || bob_questions < 1 || alice_answers < 1 || bob_answers < 1)
    throw AlgebraError("signature counts must all be >= 1");
  if (kind == GeneratorKind::Observable && (alice_answers < 2 || bob_answers < 2))
    throw AlgebraError("observable order must be >= 2");
}

Complex root_of_unity(int d, long k) {
  long r = k % d;
  if (r < 0) r += d;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == d) return {-1.0, 0.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / d);
}

namespace {

void check_letter(const Letter& l, const AlgebraSignature& sig) {
  if (l.question < 0 || l.question >= sig.questions(l.party))
    throw AlgebraError("letter question out of range for signature");
  const int d = sig.answers(l.party);
  if (sig.kind == GeneratorKind::Projector) {
    if (l.payload < 0 || l.payload >= d) throw AlgebraError("letter answer out of range");
  } else {
    if (l.payload < 1 || l.payload >= d) throw AlgebraError("letter exponent out of range");
  }
}

// Merges one party's subword with a stack; returns false when annihilated.
bool reduce_party(std::vector<Letter>& stack, const Letter& l, const AlgebraSignature& sig) {
  if (!stack.empty() && stack.back().question == l.question) {
    if (sig.kind == GeneratorKind::Projector) {
      if (stack.back().payload != l.payload) return false;  // orthogonal projectors
      return true;                                          // idempotent
    }
    const int d = sig.answers(l.party);
    int e = (stack.back().payload + l.payload) % d;
    stack.pop_back();
    if (e != 0) {
      // the new top may meet the same question again after a cancellation
      Letter merged{l.party, l.question, e};
      return reduce_party(stack, merged, sig);
    }
    return true;
  }
  stack.push_back(l);
  return true;
}

}  // namespace

std::optional<Monomial> canonicalize(std::span<const Letter> word, const AlgebraSignature& sig) {
  sig.validate();
  std::vector<Letter> alice, bob;
  for (const Letter& l : word) {
    check_letter(l, sig);
    auto& stack = l.party == Party::Alice ? alice : bob;
    if (!reduce_party(stack, l, sig)) return std::nullopt;
  }
  alice.insert(alice.end(), bob.begin(), bob.end());
  return Monomial(std::move(alice));
}

Monomial monomial_adjoint(const Monomial& m, const AlgebraSignature& sig) {
  std::vector<Letter> rev(m.word().rbegin(), m.word().rend());
  if (sig.kind == GeneratorKind::Observable) {
    for (Letter& l : rev) l.payload = sig.answers(l.party) - l.payload;
  }
  auto c = canonicalize(rev, sig);
  // adjoint of a canonical word never annihilates
  return *c;
}

std::optional<Monomial> monomial_product(const Monomial& a, const Monomial& b,
                                         const AlgebraSignature& sig) {
  std::vector<Letter> w;
  w.reserve(a.word().size() + b.word().size());
  w.insert(w.end(), a.word().begin(), a.word().end());
  w.insert(w.end(), b.word().begin(), b.word().end());
  return canonicalize(w, sig);
}

Polynomial Polynomial::identity(const AlgebraSignature& sig) {
  Polynomial p(sig);
  p.add_term(Monomial(), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const AlgebraSignature& sig, const Monomial& m, Complex c) {
  Polynomial p(sig);
  p.add_term(m, c);
  return p;
}

Polynomial Polynomial::letter(const AlgebraSignature& sig, Party party, int question, int payload,
                              Complex c) {
  Letter l{party, question, payload};
  auto m = canonicalize(std::span<const Letter>(&l, 1), sig);
  return Polynomial::monomial(sig, *m, c);
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void Polynomial::add_term(const Monomial& m, Complex c) {
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (std::abs(c) != 0.0) terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) == 0.0) terms_.erase(it);
}

Complex Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (!(sig_ == o.sig_)) throw AlgebraError("signature mismatch in +");
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (!(sig_ == o.sig_)) throw AlgebraError("signature mismatch in -");
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const { return multiply(*this, o); }

Polynomial Polynomial::operator*(Complex c) const {
  Polynomial r(sig_);
  if (std::abs(c) == 0.0) return r;
  for (const auto& [m, co] : terms_) r.add_term(m, co * c);
  return r;
}

double Polynomial::max_abs_coefficient() const {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
  return r;
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  if (!(p.signature() == q.signature())) throw AlgebraError("signature mismatch in multiply");
  Polynomial r(p.signature());
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) {
      auto m = monomial_product(mp, mq, p.signature());
      if (m) r.add_term(*m, cp * cq);
    }
  }
  return r;
}

Polynomial adjoint(const Polynomial& p) {
  Polynomial r(p.signature());
  for (const auto& [m, c] : p.terms())
    r.add_term(monomial_adjoint(m, p.signature()), std::conj(c));
  return r;
}

namespace {

// Expansion of a single letter into the other generator kind.
Polynomial letter_to_observables(const Letter& l, const AlgebraSignature& in,
                                 const AlgebraSignature& out) {
  const int d = in.answers(l.party);
  Polynomial e(out);
  e.add_term(Monomial(), Complex(1.0 / d));
  for (int j = 1; j < d; ++j)
    e = e + Polynomial::letter(out, l.party, l.question, j,
                               root_of_unity(d, -static_cast<long>(l.payload) * j) * (1.0 / d));
  return e;
}

Polynomial letter_to_projectors(const Letter& l, const AlgebraSignature& in,
                                const AlgebraSignature& out) {
  const int d = in.answers(l.party);
  // U_q^j = I + sum_{a>=1} (w^{a j} - 1) M_aq  once M_0q is eliminated
  Polynomial e = Polynomial::identity(out);
  for (int a = 1; a < d; ++a)
    e = e + Polynomial::letter(out, l.party, l.question, a,
                               root_of_unity(d, static_cast<long>(a) * l.payload) - 1.0);
  return e;
}

template <typename LetterMap>
Polynomial convert(const Polynomial& p, const AlgebraSignature& out, LetterMap&& expand) {
  Polynomial r(out);
  for (const auto& [m, c] : p.terms()) {
    Polynomial acc = Polynomial::monomial(out, Monomial(), c);
    for (const Letter& l : m.word()) acc = acc * expand(l, p.signature(), out);
    r = r + acc;
  }
  return r;
}

}  // namespace

Polynomial to_observables(const Polynomial& p) {
  if (p.signature().kind != GeneratorKind::Projector)
    throw AlgebraError("to_observables expects a projector-kind polynomial");
  AlgebraSignature out = p.signature();
  out.kind = GeneratorKind::Observable;
  out.validate();
  return convert(p, out, letter_to_observables);
}

Polynomial to_projectors(const Polynomial& p) {
  if (p.signature().kind != GeneratorKind::Observable)
    throw AlgebraError("to_projectors expects an observable-kind polynomial");
  AlgebraSignature out = p.signature();
  out.kind = GeneratorKind::Projector;
  return convert(p, out, letter_to_projectors);
}

Polynomial substitute_answer_zero(const Polynomial& p, bool alice, bool bob) {
  if (p.signature().kind != GeneratorKind::Projector)
    throw AlgebraError("substitute_answer_zero applies to projector-kind polynomials");
  const AlgebraSignature& sig = p.signature();
  Polynomial r(sig);
  for (const auto& [m, c] : p.terms()) {
    Polynomial acc = Polynomial::monomial(sig, Monomial(), c);
    for (const Letter& l : m.word()) {
      const bool selected = l.party == Party::Alice ? alice : bob;
      if (selected && l.payload == 0) {
        Polynomial sub = Polynomial::identity(sig);
        for (int a = 1; a < sig.answers(l.party); ++a)
          sub = sub - Polynomial::letter(sig, l.party, l.question, a);
        acc = acc * sub;
      } else {
        acc = acc * Polynomial::letter(sig, l.party, l.question, l.payload);
      }
    }
    r = r + acc;
  }
  return r;
}

bool equal_mod_relations(const Polynomial& p, const Polynomial& q, double tol) {
  if (!(p.signature() == q.signature())) throw AlgebraError("signature mismatch in comparison");
  return (p - q).max_abs_coefficient() <= tol;
}

bool is_hermitian(const Polynomial& p, double tol) {
  return (p - adjoint(p)).max_abs_coefficient() <= tol;
}

}  // namespace qbound
