#include <doctest.h>

#include <random>

#include "qbound/formats.hpp"

using namespace qbound;

namespace {
const AlgebraSignature kSig{2, 2, 3, 3, GeneratorKind::Projector};
}

TEST_CASE("identity and zero polynomials have fixed spellings") {
  CHECK(poly_to_text(Polynomial::identity(kSig)) == "1 0 : 1");
  CHECK(poly_to_text(Polynomial(kSig)) == "0");
  CHECK(poly_from_text("0", kSig).is_zero());
}

TEST_CASE("letters print as party.question.payload") {
  Polynomial p = Polynomial::letter(kSig, Party::Alice, 1, 2, Complex(0.5, -1.0)) *
                 Polynomial::letter(kSig, Party::Bob, 0, 1);
  CHECK(poly_to_text(p) == "0.5 -1 : A.1.2 B.0.1");
}

TEST_CASE("text form round trips random polynomials bit-exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int rep = 0; rep < 50; ++rep) {
    Polynomial p(kSig);
    for (int t = 0; t < 6; ++t) {
      std::vector<Letter> w;
      for (int l = 0; l < static_cast<int>(rng() % 4); ++l)
        w.push_back(Letter{rng() % 2 ? Party::Alice : Party::Bob,
                           static_cast<int>(rng() % 2), static_cast<int>(rng() % 3)});
      auto m = canonicalize(w, kSig);
      if (m) p.add_term(*m, Complex(u(rng), u(rng)));
    }
    Polynomial back = poly_from_text(poly_to_text(p), kSig);
    CHECK((back - p).max_abs_coefficient() == 0.0);
  }
}

TEST_CASE("parser reports malformed terms") {
  CHECK_THROWS_AS(poly_from_text("", kSig), FormatError);
  CHECK_THROWS_AS(poly_from_text("1 0 A.0.0", kSig), FormatError);        // no colon
  CHECK_THROWS_AS(poly_from_text("1 : A.0.0", kSig), FormatError);        // one coeff
  CHECK_THROWS_AS(poly_from_text("1 0 2 : A.0.0", kSig), FormatError);    // three coeffs
  CHECK_THROWS_AS(poly_from_text("x 0 : 1", kSig), FormatError);          // bad number
  CHECK_THROWS_AS(poly_from_text("1 0 : C.0.0", kSig), FormatError);      // bad party
  CHECK_THROWS_AS(poly_from_text("1 0 : A.0", kSig), FormatError);        // short letter
  CHECK_THROWS_AS(poly_from_text("1 0 : A.9.0", kSig), FormatError);      // out of range
}

TEST_CASE("parsing canonicalizes words") {
  // Bob before Alice in the text still lands in canonical order
  Polynomial p = poly_from_text("1 0 : B.0.1 A.0.1", kSig);
  Polynomial q = poly_from_text("1 0 : A.0.1 B.0.1", kSig);
  CHECK(equal_mod_relations(p, q, 0.0));
  // annihilated words vanish
  CHECK(poly_from_text("1 0 : A.0.1 A.0.2", kSig).is_zero());
}

TEST_CASE("format_double emits shortest round-trip forms") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(-6.0) == "-6");
}
