#include "qbound/games.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "qbound/formats.hpp"

namespace qbound {

using nlohmann::json;

void NonlocalGame::set_uniform_distribution() {
  distribution.assign(static_cast<size_t>(alice_questions) * bob_questions,
                      1.0 / (static_cast<double>(alice_questions) * bob_questions));
}

void NonlocalGame::validate() const {
  if (alice_questions < 1 || bob_questions < 1 || alice_answers < 1 || bob_answers < 1)
    throw GameError("game '" + name + "': all counts must be >= 1");
  if (distribution.size() != static_cast<size_t>(alice_questions) * bob_questions)
    throw GameError("game '" + name + "': distribution has wrong size");
  if (winning.size() != static_cast<size_t>(alice_answers) * bob_answers * alice_questions *
                            bob_questions)
    throw GameError("game '" + name + "': predicate table has wrong size");
  double sum = 0.0;
  for (double w : distribution) {
    if (w < 0.0) throw GameError("game '" + name + "': negative distribution weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw GameError("game '" + name + "': distribution weights sum to " +
                    format_double(sum) + ", expected 1");
}

GamePolynomial game_polynomial(const NonlocalGame& g) {
  g.validate();
  AlgebraSignature sig = g.signature();
  Polynomial p(sig);
  for (int x = 0; x < g.alice_questions; ++x)
    for (int y = 0; y < g.bob_questions; ++y) {
      const double w = g.pi(x, y);
      if (w == 0.0) continue;
      for (int a = 0; a < g.alice_answers; ++a)
        for (int b = 0; b < g.bob_answers; ++b) {
          if (!g.wins(a, b, x, y)) continue;
          Letter word[2] = {{Party::Alice, x, a}, {Party::Bob, y, b}};
          p.add_term(*canonicalize(word, sig), w);
        }
    }
  return GamePolynomial{std::move(p), sig, ""};
}

double classical_value(const NonlocalGame& g, double budget) {
  g.validate();
  const double count =
      std::pow(static_cast<double>(g.alice_answers), g.alice_questions) *
      std::pow(static_cast<double>(g.bob_answers), g.bob_questions);
  if (count > budget)
    throw GameError("classical_value: strategy space of size " + format_double(count) +
                    " exceeds budget " + format_double(budget));

  std::vector<int> fa(g.alice_questions, 0), fb(g.bob_questions, 0);
  auto advance = [](std::vector<int>& f, int base) {
    for (size_t i = 0; i < f.size(); ++i) {
      if (++f[i] < base) return true;
      f[i] = 0;
    }
    return false;
  };
  double best = 0.0;
  do {
    std::fill(fb.begin(), fb.end(), 0);
    do {
      double v = 0.0;
      for (int x = 0; x < g.alice_questions; ++x)
        for (int y = 0; y < g.bob_questions; ++y)
          if (g.wins(fa[x], fb[y], x, y)) v += g.pi(x, y);
      best = std::max(best, v);
    } while (advance(fb, g.bob_answers));
  } while (advance(fa, g.alice_answers));
  return best;
}

namespace {

NonlocalGame make_predicate_game(std::string name, int ax, int by, int aa, int bb,
                                 bool (*pred)(int, int, int, int)) {
  NonlocalGame g;
  g.name = std::move(name);
  g.alice_questions = ax;
  g.bob_questions = by;
  g.alice_answers = aa;
  g.bob_answers = bb;
  g.set_uniform_distribution();
  g.winning.assign(static_cast<size_t>(aa) * bb * ax * by, 0);
  for (int a = 0; a < aa; ++a)
    for (int b = 0; b < bb; ++b)
      for (int x = 0; x < ax; ++x)
        for (int y = 0; y < by; ++y) g.set_win(a, b, x, y, pred(a, b, x, y));
  g.validate();
  return g;
}

NonlocalGame make_chsh() {
  return make_predicate_game("chsh", 2, 2, 2, 2,
                             [](int a, int b, int x, int y) { return (a ^ b) == (x & y); });
}

NonlocalGame make_matching_game() {
  return make_predicate_game("matching", 3, 3, 2, 2,
                             [](int a, int b, int x, int y) { return (a == b) == (x == y); });
}

// n-answer CHSH generalization: x=0 or y=0 force a=b / a+b=0; x=1,y=1 forces a+b=1 (mod n).
NonlocalGame make_bn(int n) {
  NonlocalGame g;
  g.name = "bn:" + std::to_string(n);
  g.alice_questions = 2;
  g.bob_questions = 2;
  g.alice_answers = n;
  g.bob_answers = n;
  g.set_uniform_distribution();
  g.winning.assign(static_cast<size_t>(n) * n * 4, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          bool win = y == 0 ? (a == b) : ((a + b) % n == (x == 1 ? 1 : 0));
          g.set_win(a, b, x, y, win);
        }
  g.validate();
  return g;
}

NonlocalGame make_xor_game(const std::string& table) {
  std::vector<std::string> rows;
  std::string cur;
  for (char c : table) {
    if (c == ',') {
      rows.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  rows.push_back(cur);
  if (rows.empty() || rows[0].empty()) throw GameError("xor game: empty sign table");
  const int by = static_cast<int>(rows[0].size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != by)
      throw GameError("xor game: ragged sign table '" + table + "'");
    for (char c : r)
      if (c != '+' && c != '-') throw GameError("xor game: sign table must use '+'/'-'");
  }
  NonlocalGame g;
  g.name = "xor:" + table;
  g.alice_questions = static_cast<int>(rows.size());
  g.bob_questions = by;
  g.alice_answers = 2;
  g.bob_answers = 2;
  g.set_uniform_distribution();
  g.winning.assign(static_cast<size_t>(4) * g.alice_questions * by, 0);
  for (int x = 0; x < g.alice_questions; ++x)
    for (int y = 0; y < by; ++y) {
      const int f = rows[x][y] == '-' ? 1 : 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) g.set_win(a, b, x, y, (a ^ b) == f);
    }
  g.validate();
  return g;
}

// P_M = A1(B1-B2-B3) + A2(B2-B1-B3) + A3(B3-B1-B2), binary observables.
GamePolynomial make_matching_polynomial() {
  AlgebraSignature sig{3, 3, 2, 2, GeneratorKind::Observable};
  Polynomial p(sig);
  for (int x = 0; x < 3; ++x) {
    Polynomial ax = Polynomial::letter(sig, Party::Alice, x, 1);
    Polynomial bsum(sig);
    for (int y = 0; y < 3; ++y)
      bsum = bsum + Polynomial::letter(sig, Party::Bob, y, 1, y == x ? 1.0 : -1.0);
    p = p + ax * bsum;
  }
  return GamePolynomial{std::move(p), sig,
                        "polynomial-scale fixture proportional to the matching game "
                        "polynomial; optimal value 6"};
}

// Symmetrized B3 polynomial over order-3 observables; optimal value 6.
GamePolynomial make_b3_polynomial() {
  AlgebraSignature sig{2, 2, 3, 3, GeneratorKind::Observable};
  const Complex w = root_of_unity(3, 1);
  const Complex w2 = root_of_unity(3, 2);
  auto mono = [&](int x, int j, int y, int k, Complex c) {
    Letter word[2] = {{Party::Alice, x, j}, {Party::Bob, y, k}};
    return Polynomial::monomial(sig, *canonicalize(word, sig), c);
  };
  Polynomial p = mono(0, 1, 0, 1, 1.0) + mono(0, 2, 0, 2, 1.0) + mono(0, 1, 1, 1, 1.0) +
                 mono(0, 2, 1, 2, 1.0) + mono(1, 1, 0, 1, 1.0) + mono(1, 2, 0, 2, 1.0) +
                 mono(1, 1, 1, 1, w) + mono(1, 2, 1, 2, w2);
  return GamePolynomial{std::move(p), sig,
                        "symmetrized polynomial-scale fixture; optimal value 6"};
}

}  // namespace

BuiltinEntry builtin(const std::string& name) {
  if (name == "chsh")
    return BuiltinEntry{name, "CHSH game (2 questions, binary answers)", make_chsh(),
                        std::nullopt};
  if (name == "matching")
    return BuiltinEntry{name,
                        "bipartite matching game (3 questions, binary answers); solved at "
                        "polynomial scale P_M",
                        make_matching_game(), make_matching_polynomial()};
  if (name == "b3")
    return BuiltinEntry{name, "symmetrized B3 polynomial (order-3 observables)", std::nullopt,
                        make_b3_polynomial()};
  if (name.rfind("bn:", 0) == 0) {
    int n = 0;
    try {
      size_t pos = 0;
      n = std::stoi(name.substr(3), &pos);
      if (pos != name.size() - 3) throw std::invalid_argument("trailing chars");
    } catch (const std::exception&) {
      throw GameError("bad bn game name '" + name + "' (expected bn:<n>)");
    }
    if (n < 2) throw GameError("bn game needs n >= 2");
    return BuiltinEntry{name, "n-answer CHSH generalization", make_bn(n), std::nullopt};
  }
  if (name.rfind("xor:", 0) == 0)
    return BuiltinEntry{name, "XOR game from a sign table", make_xor_game(name.substr(4)),
                        std::nullopt};
  throw GameError("unknown builtin game '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> builtin_catalog() {
  return {
      {"chsh", builtin("chsh").description},
      {"matching", builtin("matching").description},
      {"b3", builtin("b3").description},
      {"bn:<n>", "n-answer CHSH generalization (e.g. bn:3)"},
      {"xor:<table>", "XOR game from comma-separated '+'/'-' rows (e.g. xor:++,+-)"},
  };
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw GameError("parse error in '" + path + "': " + e.what());
  }
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GameError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

int get_count(const json& j, const char* field, const std::string& path) {
  if (!j.contains(field))
    throw GameError("'" + path + "': missing field '" + field + "'");
  if (!j[field].is_number_integer() || j[field].get<int>() < 1)
    throw GameError("'" + path + "': field '" + field + "' must be a positive integer");
  return j[field].get<int>();
}

AlgebraSignature signature_from_json(const json& j, GeneratorKind kind, const std::string& path) {
  return AlgebraSignature{get_count(j, "alice_questions", path),
                          get_count(j, "bob_questions", path),
                          get_count(j, "alice_answers", path),
                          get_count(j, "bob_answers", path), kind};
}

}  // namespace

NonlocalGame load_game(const std::string& path) {
  json j = load_json(path);
  if (j.value("kind", "game") != "game")
    throw GameError("'" + path + "': not a game file (kind = '" +
                    j.value("kind", "?") + "')");
  NonlocalGame g;
  g.name = j.value("name", "unnamed");
  g.alice_questions = get_count(j, "alice_questions", path);
  g.bob_questions = get_count(j, "bob_questions", path);
  g.alice_answers = get_count(j, "alice_answers", path);
  g.bob_answers = get_count(j, "bob_answers", path);
  g.winning.assign(static_cast<size_t>(g.alice_answers) * g.bob_answers * g.alice_questions *
                       g.bob_questions,
                   0);
  if (j.contains("distribution")) {
    g.distribution.assign(static_cast<size_t>(g.alice_questions) * g.bob_questions, 0.0);
    for (const auto& entry : j["distribution"]) {
      if (!entry.is_array() || entry.size() != 3)
        throw GameError("'" + path + "': distribution entries must be [x, y, weight]");
      int x = entry[0].get<int>(), y = entry[1].get<int>();
      if (x < 0 || x >= g.alice_questions || y < 0 || y >= g.bob_questions)
        throw GameError("'" + path + "': distribution question pair (" + std::to_string(x) +
                        ", " + std::to_string(y) + ") out of range");
      g.distribution[x * g.bob_questions + y] = entry[2].get<double>();
    }
  } else {
    g.set_uniform_distribution();
  }
  if (!j.contains("winning"))
    throw GameError("'" + path + "': missing field 'winning'");
  for (const auto& entry : j["winning"]) {
    if (!entry.is_array() || entry.size() != 4)
      throw GameError("'" + path + "': winning entries must be [a, b, x, y]");
    int a = entry[0].get<int>(), b = entry[1].get<int>();
    int x = entry[2].get<int>(), y = entry[3].get<int>();
    if (a < 0 || a >= g.alice_answers || b < 0 || b >= g.bob_answers)
      throw GameError("'" + path + "': winning entry answer (" + std::to_string(a) + ", " +
                      std::to_string(b) + ") out of answer range");
    if (x < 0 || x >= g.alice_questions || y < 0 || y >= g.bob_questions)
      throw GameError("'" + path + "': winning entry question (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") out of question range");
    g.set_win(a, b, x, y, true);
  }
  g.validate();
  return g;
}

void save_game(const NonlocalGame& g, const std::string& path) {
  g.validate();
  json j;
  j["format_version"] = 1;
  j["kind"] = "game";
  j["name"] = g.name;
  j["alice_questions"] = g.alice_questions;
  j["bob_questions"] = g.bob_questions;
  j["alice_answers"] = g.alice_answers;
  j["bob_answers"] = g.bob_answers;
  json dist = json::array();
  for (int x = 0; x < g.alice_questions; ++x)
    for (int y = 0; y < g.bob_questions; ++y)
      if (g.pi(x, y) != 0.0) dist.push_back({x, y, g.pi(x, y)});
  j["distribution"] = dist;
  json win = json::array();
  for (int a = 0; a < g.alice_answers; ++a)
    for (int b = 0; b < g.bob_answers; ++b)
      for (int x = 0; x < g.alice_questions; ++x)
        for (int y = 0; y < g.bob_questions; ++y)
          if (g.wins(a, b, x, y)) win.push_back({a, b, x, y});
  j["winning"] = win;
  write_json(j, path);
}

GamePolynomial load_game_polynomial(const std::string& path, std::string* name) {
  json j = load_json(path);
  if (j.value("kind", "") != "game_polynomial")
    throw GameError("'" + path + "': not a game_polynomial file");
  std::string kind_str = j.value("generator_kind", "projector");
  GeneratorKind kind;
  if (kind_str == "projector")
    kind = GeneratorKind::Projector;
  else if (kind_str == "observable")
    kind = GeneratorKind::Observable;
  else
    throw GameError("'" + path + "': bad generator_kind '" + kind_str + "'");
  AlgebraSignature sig = signature_from_json(j, kind, path);
  if (!j.contains("poly") || !j["poly"].is_string())
    throw GameError("'" + path + "': missing 'poly' string");
  Polynomial p;
  try {
    p = poly_from_text(j["poly"].get<std::string>(), sig);
  } catch (const FormatError& e) {
    throw GameError("'" + path + "': " + e.what());
  }
  if (name) *name = j.value("name", "unnamed");
  return GamePolynomial{std::move(p), sig, j.value("scale_note", "")};
}

void save_game_polynomial(const GamePolynomial& gp, const std::string& name,
                          const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "game_polynomial";
  j["name"] = name;
  j["generator_kind"] =
      gp.signature.kind == GeneratorKind::Projector ? "projector" : "observable";
  j["alice_questions"] = gp.signature.alice_questions;
  j["bob_questions"] = gp.signature.bob_questions;
  j["alice_answers"] = gp.signature.alice_answers;
  j["bob_answers"] = gp.signature.bob_answers;
  j["poly"] = poly_to_text(gp.poly);
  if (!gp.scale_note.empty()) j["scale_note"] = gp.scale_note;
  write_json(j, path);
}

}  // namespace qbound
