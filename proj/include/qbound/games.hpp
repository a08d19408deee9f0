#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbound/algebra.hpp"

namespace qbound {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Question/answer sets, input distribution pi and predicate V.
// Answer counts are uniform across questions per party.
struct NonlocalGame {
  std::string name;
  int alice_questions = 0;
  int bob_questions = 0;
  int alice_answers = 0;
  int bob_answers = 0;
  std::vector<double> distribution;  // row-major (x, y); sums to 1
  std::vector<std::uint8_t> winning; // index order (a, b, x, y)

  double pi(int x, int y) const { return distribution[x * bob_questions + y]; }
  bool wins(int a, int b, int x, int y) const {
    return winning[((a * bob_answers + b) * alice_questions + x) * bob_questions + y] != 0;
  }
  void set_win(int a, int b, int x, int y, bool w) {
    winning[((a * bob_answers + b) * alice_questions + x) * bob_questions + y] = w ? 1 : 0;
  }
  void set_uniform_distribution();
  // throws GameError on inconsistent sizes or a non-normalized distribution
  void validate() const;

  AlgebraSignature signature() const {
    return AlgebraSignature{alice_questions, bob_questions, alice_answers, bob_answers,
                            GeneratorKind::Projector};
  }
  bool operator==(const NonlocalGame&) const = default;
};

struct GamePolynomial {
  Polynomial poly;
  AlgebraSignature signature;
  std::string scale_note;  // set when the polynomial is a proportional fixture
};

// P_G = sum_{x,y} pi(x,y) sum_{a,b} V(a,b,x,y) M_ax N_by, projector kind.
GamePolynomial game_polynomial(const NonlocalGame& g);

// Exhaustive search over deterministic strategy pairs.
// Throws GameError when |A|^|X| * |B|^|Y| exceeds the budget.
double classical_value(const NonlocalGame& g, double budget = 1e7);

// A built-in corpus entry.  Entries backed by a predicate carry `game`;
// polynomial-scale fixtures carry `fixture`.  "matching" carries both: the
// probability-scale game and the polynomial-scale P_M it is solved at.
struct BuiltinEntry {
  std::string name;
  std::string description;
  std::optional<NonlocalGame> game;
  std::optional<GamePolynomial> fixture;

  // polynomial the relaxations are built from
  GamePolynomial solving_polynomial() const {
    return fixture ? *fixture : game_polynomial(*game);
  }
};

// Recognized names: "chsh", "matching", "b3", "bn:<n>", "xor:<+/- table>".
// Throws GameError for unknown names.
BuiltinEntry builtin(const std::string& name);

// Template names for listings.
std::vector<std::pair<std::string, std::string>> builtin_catalog();

// Game file I/O (JSON; format documented in the README).
NonlocalGame load_game(const std::string& path);
void save_game(const NonlocalGame& g, const std::string& path);

// Polynomial-fixture file I/O.
GamePolynomial load_game_polynomial(const std::string& path, std::string* name = nullptr);
void save_game_polynomial(const GamePolynomial& gp, const std::string& name,
                          const std::string& path);

}  // namespace qbound
