#include <doctest.h>

#include <cstdio>

#include "qbound/games.hpp"

using namespace qbound;

TEST_CASE("chsh game polynomial has 8 terms of weight 1/4") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  CHECK(gp.poly.terms().size() == 8);
  for (const auto& [m, c] : gp.poly.terms()) {
    CHECK(c == Complex(0.25, 0.0));
    CHECK(m.degree() == 2);
  }
  CHECK(is_hermitian(gp.poly, 1e-12));
  // predicate spot check
  CHECK(builtin("chsh").game->wins(0, 0, 0, 0));
  CHECK_FALSE(builtin("chsh").game->wins(0, 1, 0, 0));
}

TEST_CASE("trivial game polynomial sums the whole distribution") {
  NonlocalGame g;
  g.name = "trivial";
  g.alice_questions = g.bob_questions = 2;
  g.alice_answers = g.bob_answers = 2;
  g.set_uniform_distribution();
  g.winning.assign(16, 1);
  GamePolynomial gp = game_polynomial(g);
  CHECK(gp.poly.terms().size() == 16);
  Complex total = 0.0;
  for (const auto& [m, c] : gp.poly.terms()) total += c;
  CHECK(total.real() == doctest::Approx(4.0));  // sum_xy pi * |A||B|
}

TEST_CASE("classical values by exhaustive search") {
  CHECK(classical_value(builtin("chsh").game.value()) == doctest::Approx(0.75));
  // 64 deterministic pairs; frozen value 7/9
  CHECK(classical_value(builtin("matching").game.value()) ==
        doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  CHECK(classical_value(builtin("bn:3").game.value()) == doctest::Approx(0.75));

  NonlocalGame g;
  g.name = "trivial";
  g.alice_questions = g.bob_questions = 1;
  g.alice_answers = g.bob_answers = 2;
  g.set_uniform_distribution();
  g.winning.assign(4, 1);
  CHECK(classical_value(g) == doctest::Approx(1.0));

  CHECK_THROWS_AS(classical_value(builtin("matching").game.value(), 10.0), GameError);
}

TEST_CASE("b3 fixture matches the symmetrized polynomial termwise") {
  GamePolynomial gp = builtin("b3").fixture.value();
  CHECK(gp.signature.kind == GeneratorKind::Observable);
  CHECK(gp.poly.terms().size() == 8);
  CHECK(is_hermitian(gp.poly, 1e-15));
  CHECK_FALSE(gp.scale_note.empty());

  const Complex w = root_of_unity(3, 1);
  auto coeff = [&](int x, int j, int y, int k) {
    Letter word[2] = {{Party::Alice, x, j}, {Party::Bob, y, k}};
    return gp.poly.coefficient(*canonicalize(word, gp.signature));
  };
  CHECK(coeff(0, 1, 0, 1) == Complex(1.0));
  CHECK(coeff(0, 2, 0, 2) == Complex(1.0));
  CHECK(coeff(0, 1, 1, 1) == Complex(1.0));
  CHECK(coeff(0, 2, 1, 2) == Complex(1.0));
  CHECK(coeff(1, 1, 0, 1) == Complex(1.0));
  CHECK(coeff(1, 2, 0, 2) == Complex(1.0));
  CHECK(std::abs(coeff(1, 1, 1, 1) - w) <= 1e-15);
  CHECK(std::abs(coeff(1, 2, 1, 2) - std::conj(w)) <= 1e-15);
}

TEST_CASE("matching fixture equals P_M in observable form") {
  GamePolynomial gp = builtin("matching").fixture.value();
  AlgebraSignature sig = gp.signature;
  Polynomial expect(sig);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      Letter word[2] = {{Party::Alice, x, 1}, {Party::Bob, y, 1}};
      expect.add_term(*canonicalize(word, sig), x == y ? 1.0 : -1.0);
    }
  CHECK(equal_mod_relations(gp.poly, expect, 0.0));
}

TEST_CASE("bn:3 winning conditions follow the constraint system") {
  NonlocalGame g = builtin("bn:3").game.value();
  // x=1, y=1 => a+b = 1 (mod 3), the twisted constraint
  CHECK(g.wins(0, 1, 1, 1));
  CHECK(g.wins(2, 2, 1, 1));
  CHECK_FALSE(g.wins(0, 0, 1, 1));
  // y=0 => a = b
  CHECK(g.wins(2, 2, 0, 0));
  CHECK(g.wins(1, 1, 1, 0));
  CHECK_FALSE(g.wins(1, 2, 1, 0));
  // x=0, y=1 => a+b = 0 (mod 3)
  CHECK(g.wins(1, 2, 0, 1));
  CHECK_FALSE(g.wins(1, 1, 0, 1));
}

TEST_CASE("xor games come from sign tables") {
  NonlocalGame g = builtin("xor:++,+-").game.value();
  NonlocalGame chsh = builtin("chsh").game.value();
  CHECK(g.alice_questions == 2);
  CHECK(g.winning == chsh.winning);
  CHECK_THROWS_AS(builtin("xor:++,+"), GameError);   // ragged
  CHECK_THROWS_AS(builtin("xor:+x"), GameError);     // bad character
  CHECK_THROWS_AS(builtin("nonsense"), GameError);
  CHECK_THROWS_AS(builtin("bn:1"), GameError);
  CHECK_THROWS_AS(builtin("bn:x"), GameError);
}

TEST_CASE("game polynomials of every builtin game are Hermitian") {
  for (const char* name : {"chsh", "matching", "bn:3", "bn:4", "xor:+-,-+"}) {
    GamePolynomial gp = game_polynomial(builtin(name).game.value());
    CHECK(is_hermitian(gp.poly, 1e-12));
  }
}

TEST_CASE("game files round trip") {
  NonlocalGame g = builtin("chsh").game.value();
  save_game(g, "rt.game");
  NonlocalGame back = load_game("rt.game");
  CHECK(back == g);
  std::remove("rt.game");
}

TEST_CASE("malformed game files give field diagnostics") {
  auto write = [](const char* path, const char* body) {
    FILE* f = fopen(path, "w");
    fputs(body, f);
    fclose(f);
  };

  // weights summing to 0.9
  write("bad1.game",
        R"({"kind":"game","name":"g","alice_questions":1,"bob_questions":1,
           "alice_answers":2,"bob_answers":2,
           "distribution":[[0,0,0.9]],"winning":[[0,0,0,0]]})");
  CHECK_THROWS_WITH_AS(load_game("bad1.game"),
                       doctest::Contains("distribution weights sum"), GameError);

  // predicate entry out of answer range
  write("bad2.game",
        R"({"kind":"game","name":"g","alice_questions":1,"bob_questions":1,
           "alice_answers":2,"bob_answers":2,"winning":[[2,0,0,0]]})");
  CHECK_THROWS_WITH_AS(load_game("bad2.game"), doctest::Contains("answer range"), GameError);

  // missing required field
  write("bad3.game", R"({"kind":"game","name":"g","alice_questions":1})");
  CHECK_THROWS_WITH_AS(load_game("bad3.game"), doctest::Contains("bob_questions"), GameError);

  write("bad4.game", "{ not json");
  CHECK_THROWS_WITH_AS(load_game("bad4.game"), doctest::Contains("parse error"), GameError);

  CHECK_THROWS_AS(load_game("does_not_exist.game"), GameError);
  for (const char* p : {"bad1.game", "bad2.game", "bad3.game", "bad4.game"}) std::remove(p);
}

TEST_CASE("polynomial fixture files round trip") {
  GamePolynomial gp = builtin("b3").fixture.value();
  save_game_polynomial(gp, "b3", "rt.poly");
  std::string name;
  GamePolynomial back = load_game_polynomial("rt.poly", &name);
  CHECK(name == "b3");
  CHECK(back.signature == gp.signature);
  CHECK(back.scale_note == gp.scale_note);
  CHECK(equal_mod_relations(back.poly, gp.poly, 0.0));
  std::remove("rt.poly");
}

TEST_CASE("omitted distribution defaults to uniform") {
  FILE* f = fopen("uni.game", "w");
  fputs(R"({"kind":"game","name":"g","alice_questions":2,"bob_questions":2,
         "alice_answers":2,"bob_answers":2,"winning":[[0,0,0,0]]})",
        f);
  fclose(f);
  NonlocalGame g = load_game("uni.game");
  CHECK(g.pi(0, 0) == doctest::Approx(0.25));
  CHECK(g.pi(1, 1) == doctest::Approx(0.25));
  std::remove("uni.game");
}
