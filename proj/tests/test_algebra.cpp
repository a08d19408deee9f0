#include <doctest.h>

#include <random>

#include "qbound/algebra.hpp"

using namespace qbound;

namespace {

const AlgebraSignature kChsh{2, 2, 2, 2, GeneratorKind::Projector};

Monomial mono(const AlgebraSignature& sig, std::initializer_list<Letter> ls) {
  auto m = canonicalize(std::vector<Letter>(ls), sig);
  REQUIRE(m.has_value());
  return *m;
}

Polynomial proj(const AlgebraSignature& sig, Party p, int q, int a, Complex c = 1.0) {
  return Polynomial::letter(sig, p, q, a, c);
}

// random words for the property checks; fixed seeds keep runs reproducible
std::vector<Letter> random_word(std::mt19937_64& rng, const AlgebraSignature& sig, int maxlen) {
  std::uniform_int_distribution<int> len(0, maxlen);
  const int n = len(rng);
  std::vector<Letter> w;
  const int lo = sig.kind == GeneratorKind::Projector ? 0 : 1;
  for (int i = 0; i < n; ++i) {
    Party p = rng() % 2 ? Party::Alice : Party::Bob;
    std::uniform_int_distribution<int> qd(0, sig.questions(p) - 1);
    std::uniform_int_distribution<int> ad(lo, sig.answers(p) - 1);
    w.push_back(Letter{p, qd(rng), ad(rng)});
  }
  return w;
}

Polynomial random_poly(std::mt19937_64& rng, const AlgebraSignature& sig, int terms, int maxlen,
                       bool eliminated = false) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Polynomial p(sig);
  for (int t = 0; t < terms; ++t) {
    auto w = random_word(rng, sig, maxlen);
    if (eliminated)
      for (Letter& l : w) l.payload = std::max(1, l.payload);
    auto m = canonicalize(w, sig);
    if (m) p.add_term(*m, Complex(coeff(rng), coeff(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("projector idempotence and orthogonality") {
  Letter m00{Party::Alice, 0, 0};
  Letter m10{Party::Alice, 0, 1};
  auto sq = canonicalize(std::vector<Letter>{m00, m00}, kChsh);
  REQUIRE(sq.has_value());
  CHECK(*sq == mono(kChsh, {m00}));
  CHECK_FALSE(canonicalize(std::vector<Letter>{m00, m10}, kChsh).has_value());
}

TEST_CASE("cross-party letters commute into Alice-before-Bob order") {
  Letter n{Party::Bob, 1, 1};
  Letter m{Party::Alice, 0, 1};
  auto c = canonicalize(std::vector<Letter>{n, m}, kChsh);
  REQUIRE(c.has_value());
  CHECK(*c == mono(kChsh, {m, n}));
}

TEST_CASE("observable exponents add modulo the order") {
  AlgebraSignature sig{1, 1, 3, 3, GeneratorKind::Observable};
  Letter a2{Party::Alice, 0, 2};
  // A^2 A^2 = A^4 = A
  auto c = canonicalize(std::vector<Letter>{a2, a2}, sig);
  REQUIRE(c.has_value());
  CHECK(*c == mono(sig, {Letter{Party::Alice, 0, 1}}));
  // A^2 A = 1
  auto id = canonicalize(std::vector<Letter>{a2, Letter{Party::Alice, 0, 1}}, sig);
  REQUIRE(id.has_value());
  CHECK(id->is_identity());
}

TEST_CASE("cancellation exposes further merges") {
  // B0 B1 B1^2 B0 = B0 B0 = B0  (d=3 projectors would differ; observables here)
  AlgebraSignature sig{1, 2, 3, 3, GeneratorKind::Observable};
  Letter b0{Party::Bob, 0, 1}, b1{Party::Bob, 1, 1}, b12{Party::Bob, 1, 2};
  auto c = canonicalize(std::vector<Letter>{b0, b1, b12, b0}, sig);
  REQUIRE(c.has_value());
  CHECK(*c == mono(sig, {Letter{Party::Bob, 0, 2}}));
}

TEST_CASE("letters out of range are rejected") {
  CHECK_THROWS_AS(canonicalize(std::vector<Letter>{Letter{Party::Alice, 2, 0}}, kChsh),
                  AlgebraError);
  CHECK_THROWS_AS(canonicalize(std::vector<Letter>{Letter{Party::Bob, 0, 2}}, kChsh),
                  AlgebraError);
  AlgebraSignature obs{1, 1, 2, 2, GeneratorKind::Observable};
  CHECK_THROWS_AS(canonicalize(std::vector<Letter>{Letter{Party::Alice, 0, 0}}, obs),
                  AlgebraError);
}

TEST_CASE("multiply distributes and respects the identity") {
  Polynomial p = proj(kChsh, Party::Alice, 0, 0) + proj(kChsh, Party::Alice, 0, 1);
  Polynomial q = proj(kChsh, Party::Bob, 0, 0);
  Polynomial r = p * q;
  CHECK(r.terms().size() == 2);
  CHECK(equal_mod_relations(Polynomial::identity(kChsh) * p, p, 0.0));

  // (M00 - M10)(M00 + M10) = M00 - M10 by idempotence/orthogonality
  Polynomial d = proj(kChsh, Party::Alice, 0, 0) - proj(kChsh, Party::Alice, 0, 1);
  Polynomial s = proj(kChsh, Party::Alice, 0, 0) + proj(kChsh, Party::Alice, 0, 1);
  CHECK(equal_mod_relations(d * s, d, 0.0));
}

TEST_CASE("multiply rejects signature mismatches") {
  AlgebraSignature other{2, 2, 3, 3, GeneratorKind::Projector};
  CHECK_THROWS_AS(multiply(Polynomial::identity(kChsh), Polynomial::identity(other)),
                  AlgebraError);
}

TEST_CASE("adjoint of projector monomials is reversal") {
  Polynomial mn = proj(kChsh, Party::Alice, 0, 1) * proj(kChsh, Party::Bob, 1, 1);
  CHECK(equal_mod_relations(adjoint(mn), mn, 0.0));  // Hermitian, commuting letters
}

TEST_CASE("adjoint inverts observable powers and conjugates") {
  AlgebraSignature sig{2, 2, 3, 3, GeneratorKind::Observable};
  const Complex w = root_of_unity(3, 1);
  Polynomial p = Polynomial::letter(sig, Party::Alice, 1, 1, w) *
                 Polynomial::letter(sig, Party::Bob, 1, 1);
  Polynomial expect = Polynomial::letter(sig, Party::Alice, 1, 2, std::conj(w)) *
                      Polynomial::letter(sig, Party::Bob, 1, 2);
  CHECK(equal_mod_relations(adjoint(p), expect, 1e-15));
}

TEST_CASE("equal_mod_relations does not resolve sum-to-identity") {
  Polynomial sum = proj(kChsh, Party::Alice, 0, 0) + proj(kChsh, Party::Alice, 0, 1);
  CHECK_FALSE(equal_mod_relations(Polynomial::identity(kChsh), sum, 0.0));
  // the substitution does
  CHECK(equal_mod_relations(Polynomial::identity(kChsh), substitute_answer_zero(sum), 1e-15));
}

TEST_CASE("fourier conversion examples at d=2") {
  // to_observables maps {M0x, M1x} to (I +/- A_x)/2
  Polynomial m0 = to_observables(proj(kChsh, Party::Alice, 0, 0));
  AlgebraSignature obs = m0.signature();
  Polynomial expect =
      (Polynomial::identity(obs) + Polynomial::letter(obs, Party::Alice, 0, 1)) * Complex(0.5);
  CHECK(equal_mod_relations(m0, expect, 1e-15));
}

TEST_CASE("projector-observable round trip is the identity on eliminated input") {
  for (int d : {2, 3, 4, 5}) {
    AlgebraSignature sig{2, 2, d, d, GeneratorKind::Projector};
    std::mt19937_64 rng(7 + d);
    for (int rep = 0; rep < 25; ++rep) {
      Polynomial p = random_poly(rng, sig, 4, 3, /*eliminated=*/true);
      Polynomial rt = to_projectors(to_observables(p));
      CHECK(equal_mod_relations(rt, p, 1e-12));
    }
  }
}

TEST_CASE("canonicalize is idempotent on random words") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const AlgebraSignature sig = rep % 2 ? kChsh : AlgebraSignature{2, 3, 3, 2,
                                                                    GeneratorKind::Projector};
    auto w = random_word(rng, sig, 10);
    auto once = canonicalize(w, sig);
    if (!once) continue;
    auto twice = canonicalize(once->word(), sig);
    REQUIRE(twice.has_value());
    CHECK(*twice == *once);
  }
}

TEST_CASE("multiply is associative and adjoint is an anti-homomorphism") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    AlgebraSignature sig = rep % 2 ? kChsh : AlgebraSignature{2, 2, 3, 3,
                                                              GeneratorKind::Observable};
    Polynomial p = random_poly(rng, sig, 3, 2);
    Polynomial q = random_poly(rng, sig, 3, 2);
    Polynomial r = random_poly(rng, sig, 3, 2);
    CHECK(equal_mod_relations((p * q) * r, p * (q * r), 1e-12));
    CHECK(equal_mod_relations(adjoint(p * q), adjoint(q) * adjoint(p), 1e-12));
    CHECK(equal_mod_relations(adjoint(adjoint(p)), p, 0.0));
  }
}

TEST_CASE("(I - sum_a M_ax)^2 expands to I - sum_a M_ax symbolically") {
  for (int d : {2, 3, 5}) {
    AlgebraSignature sig{2, 2, d, d, GeneratorKind::Projector};
    for (int x = 0; x < 2; ++x) {
      Polynomial s = Polynomial::identity(sig);
      for (int a = 0; a < d; ++a) s = s - proj(sig, Party::Alice, x, a);
      CHECK(equal_mod_relations(s * s, s, 1e-15));
    }
  }
}

TEST_CASE("zero coefficients are never stored") {
  Polynomial p(kChsh);
  p.add_term(Monomial(), 1.0);
  p.add_term(Monomial(), -1.0);
  CHECK(p.is_zero());
}
