#include <doctest.h>

#include <cstdio>
#include <set>

#include "qbound/sdp.hpp"

using namespace qbound;

namespace {
const AlgebraSignature kChsh{2, 2, 2, 2, GeneratorKind::Projector};
const AlgebraSignature kMatching{3, 3, 2, 2, GeneratorKind::Observable};
}  // namespace

TEST_CASE("npa basis sizes and ordering") {
  MonomialBasis b0 = npa_basis(kChsh, 0);
  CHECK(b0.size() == 1);
  CHECK(b0.entries[0].is_identity());

  // chsh level 1: {I, M_{1,0}, M_{1,1}, N_{1,0}, N_{1,1}}
  MonomialBasis b1 = npa_basis(kChsh, 1);
  REQUIRE(b1.size() == 5);
  CHECK(b1.entries[0].is_identity());
  CHECK(b1.entries[1].word()[0] == Letter{Party::Alice, 0, 1});
  CHECK(b1.entries[2].word()[0] == Letter{Party::Alice, 1, 1});
  CHECK(b1.entries[3].word()[0] == Letter{Party::Bob, 0, 1});
  CHECK(b1.entries[4].word()[0] == Letter{Party::Bob, 1, 1});

  // matching signature at level 1: 1 + 3 + 3
  CHECK(npa_basis(kMatching, 1).size() == 7);

  // entries are pairwise distinct and canonical-adjacent
  MonomialBasis b2 = npa_basis(kChsh, 2);
  std::set<Monomial> uniq(b2.entries.begin(), b2.entries.end());
  CHECK(uniq.size() == b2.entries.size());
  for (const Monomial& m : b2.entries) {
    for (size_t i = 1; i < m.word().size(); ++i) {
      const Letter &a = m.word()[i - 1], &b = m.word()[i];
      if (a.party == b.party) CHECK(a.question != b.question);
      if (a.party == Party::Bob) CHECK(b.party == Party::Bob);
    }
  }
}

TEST_CASE("bob-only basis ignores alice generators") {
  MonomialBasis b = npa_basis(kChsh, 2, BasisSide::BobOnly);
  for (const Monomial& m : b.entries)
    for (const Letter& l : m.word()) CHECK(l.party == Party::Bob);
  // {I, N10, N11, N10 N11, N11 N10}
  CHECK(b.size() == 5);
}

TEST_CASE("npa problem structure for chsh level 1") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  SdpProblem p = build_npa(gp, 1);
  CHECK(p.block_dims == std::vector<int>{5});
  CHECK(p.normalization_index == 0);
  CHECK(p.constraints[0].rhs == 1.0);
  // objective is Hermitian
  CHECK((p.objective[0] - p.objective[0].adjoint()).cwiseAbs().maxCoeff() == 0.0);
  // constraint matrices are Hermitian entry sets
  for (const auto& c : p.constraints) {
    std::map<std::pair<int, int>, Complex> entries;
    for (const auto& e : c.entries) entries[{e.row, e.col}] = e.value;
    for (const auto& [rc, v] : entries) {
      auto it = entries.find({rc.second, rc.first});
      REQUIRE(it != entries.end());
      CHECK(std::abs(it->second - std::conj(v)) == 0.0);
    }
  }
  // E(C) equals the answer-0-substituted polynomial
  Polynomial enc = objective_polynomial(p);
  CHECK(equal_mod_relations(enc, substitute_answer_zero(gp.poly), 1e-12));
}

TEST_CASE("degree guards") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  CHECK_THROWS_AS(build_npa(gp, 0), RelaxationError);
  CHECK_THROWS_AS(build_npa(gp, 4), RelaxationError);  // default cap 3
  RelaxationOptions opts;
  opts.degree_cap = 4;
  CHECK(build_npa(gp, 4, opts).degree == 4);
  CHECK_THROWS_AS(build_onesided(gp, 7), RelaxationError);
}

TEST_CASE("non-hermitian polynomials are rejected") {
  Polynomial p = Polynomial::letter(kChsh, Party::Alice, 0, 1, Complex(0, 1)) *
                 Polynomial::letter(kChsh, Party::Bob, 0, 1);
  GamePolynomial gp{p, kChsh, ""};
  CHECK_THROWS_AS(build_npa(gp, 1), RelaxationError);
  CHECK_THROWS_AS(build_onesided(gp, 1), RelaxationError);
}

TEST_CASE("one-sided blocks enumerate all answers per question") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  SdpProblem p = build_onesided(gp, 1);
  REQUIRE(p.block_dims.size() == 4);  // 2 questions x 2 answers
  for (int d : p.block_dims) CHECK(d == 3);  // {I, N10, N11}
  REQUIRE(p.block_label.size() == 4);
  CHECK(p.block_label[0]->question == 0);
  CHECK(p.block_label[0]->answer == 0);
  CHECK(p.block_label[3]->question == 1);
  CHECK(p.block_label[3]->answer == 1);
  // normalization touches (I, I) of all x=0 blocks
  CHECK(p.constraints[p.normalization_index].entries.size() == 2);
}

TEST_CASE("one-sided needs alice degree <= 1") {
  Polynomial p = Polynomial::letter(kChsh, Party::Alice, 0, 1) *
                 Polynomial::letter(kChsh, Party::Alice, 1, 1);
  p = p + adjoint(p);
  GamePolynomial gp{p, kChsh, ""};
  CHECK_THROWS_AS(build_onesided(gp, 1), RelaxationError);
}

TEST_CASE("feasible npa solutions restrict to feasible one-sided solutions") {
  // build both relaxations, solve the NPA, restrict its moment matrix to the
  // one-sided blocks and check every one-sided constraint
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  SdpProblem npa = build_npa(gp, 1);
  SdpProblem os = build_onesided(gp, 1);
  SdpSolution s = solve(npa);
  REQUIRE(s.status == SolveStatus::Optimal);

  // restriction: Gamma_ax(s, t) = phi(M_ax s^dag t) evaluated on the npa
  // moment functional; level-1 products of bob words stay inside degree 2
  MonomialBasis b2 = npa_basis(kChsh, 2);
  SdpProblem npa2 = build_npa(gp, 2);
  SdpSolution s2 = solve(npa2);
  REQUIRE(s2.status == SolveStatus::Optimal);
  auto phi = [&](const Polynomial& raw) {
    // read the moment of each monomial from the level-2 moment matrix,
    // after rewriting over the eliminated generators
    Polynomial w = substitute_answer_zero(raw);
    Complex v = 0.0;
    for (const auto& [m, c] : w.terms()) {
      bool found = false;
      for (int i = 0; i < npa2.basis.size() && !found; ++i)
        for (int j = 0; j < npa2.basis.size() && !found; ++j) {
          auto prod = monomial_product(monomial_adjoint(npa2.basis.entries[i], npa2.sig),
                                       npa2.basis.entries[j], npa2.sig);
          if (prod && *prod == m) {
            v += c * s2.primal[0](i, j);
            found = true;
          }
        }
      REQUIRE(found);
    }
    return v;
  };

  std::vector<Eigen::MatrixXcd> restricted;
  for (size_t b = 0; b < os.block_dims.size(); ++b) {
    Eigen::MatrixXcd G(os.basis.size(), os.basis.size());
    for (int i = 0; i < os.basis.size(); ++i)
      for (int j = 0; j < os.basis.size(); ++j)
        G(i, j) = phi(entry_polynomial(os, static_cast<int>(b), i, j));
    restricted.push_back(G);
  }
  for (const auto& c : os.constraints) {
    Complex v = 0.0;
    for (const auto& e : c.entries)
      v += std::conj(e.value) * restricted[e.block](e.row, e.col);
    CHECK(std::abs(v - c.rhs) <= 1e-7);
  }
}

TEST_CASE("dual_data identifies the bound multiplier") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  SdpProblem p = build_npa(gp, 1);
  CHECK(dual_data(p).normalization_index == 0);
  SdpSolution s = solve(p);
  CHECK(s.dual_y[dual_data(p).normalization_index] ==
        doctest::Approx(0.8535533905932737).epsilon(1e-6));
}

TEST_CASE("problem dump is valid json with the advertised fields") {
  GamePolynomial gp = game_polynomial(builtin("chsh").game.value());
  SdpProblem p = build_npa(gp, 1);
  dump_problem(p, "dump.json");
  FILE* f = fopen("dump.json", "r");
  REQUIRE(f != nullptr);
  char buf[256] = {0};
  fread(buf, 1, 255, f);
  fclose(f);
  CHECK(std::string(buf).find("\"block_dims\"") != std::string::npos);
  std::remove("dump.json");
}
