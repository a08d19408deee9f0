#include "qbound/relaxation.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "qbound/formats.hpp"

namespace qbound {

namespace {

std::vector<Letter> party_letters(const AlgebraSignature& sig, Party p) {
  // answer 0 eliminated (Projector); exponent 0 is the identity (Observable)
  std::vector<Letter> ls;
  for (int q = 0; q < sig.questions(p); ++q)
    for (int a = 1; a < sig.answers(p); ++a) ls.push_back(Letter{p, q, a});
  return ls;
}

void extend_words(std::vector<std::vector<Letter>>& words, const std::vector<Letter>& letters,
                  int length) {
  std::vector<std::vector<Letter>> prev = {{}};
  for (int len = 1; len <= length; ++len) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : prev)
      for (const Letter& l : letters) {
        if (!w.empty() && w.back().question == l.question) continue;
        auto nw = w;
        nw.push_back(l);
        next.push_back(std::move(nw));
      }
    words.insert(words.end(), next.begin(), next.end());
    prev = std::move(next);
  }
}

}  // namespace

MonomialBasis npa_basis(const AlgebraSignature& sig, int d, BasisSide side) {
  sig.validate();
  if (d < 0) throw RelaxationError("basis degree must be >= 0");
  std::vector<std::vector<Letter>> alice_words = {{}};
  std::vector<std::vector<Letter>> bob_words = {{}};
  if (side == BasisSide::Both) extend_words(alice_words, party_letters(sig, Party::Alice), d);
  extend_words(bob_words, party_letters(sig, Party::Bob), d);

  std::vector<Monomial> entries;
  for (const auto& aw : alice_words)
    for (const auto& bw : bob_words) {
      if (static_cast<int>(aw.size() + bw.size()) > d) continue;
      std::vector<Letter> w = aw;
      w.insert(w.end(), bw.begin(), bw.end());
      entries.emplace_back(std::move(w));
    }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  MonomialBasis b;
  b.degree = d;
  b.side = side;
  b.entries = std::move(entries);
  for (int i = 0; i < b.size(); ++i) b.index.emplace(b.entries[i], i);
  return b;
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (int d : block_dims) n += d;
  return n;
}

void SdpProblem::validate() const {
  if (block_dims.empty()) throw RelaxationError("problem has no blocks");
  if (objective.size() != block_dims.size())
    throw RelaxationError("objective block count mismatch");
  if (normalization_index < 0 || normalization_index >= static_cast<int>(constraints.size()))
    throw RelaxationError("missing normalization constraint");
  if (constraints[normalization_index].rhs != 1.0)
    throw RelaxationError("normalization constraint must have rhs 1");
}

namespace {

struct EntryKey {
  int block, row, col;
  bool operator<(const EntryKey& o) const {
    return std::tie(block, row, col) < std::tie(o.block, o.row, o.col);
  }
};

// Accumulates Hermitian constraint matrices entry by entry, pruning
// cancellations (e.g. the real part of a swapped-pair constraint).
class ConstraintBuilder {
 public:
  void add(int block, int row, int col, Complex v) { acc_[{block, row, col}] += v; }
  // adds v at (r,c) and conj(v) at (c,r); a diagonal entry keeps only Re v
  // (the imaginary part pairs to zero against any Hermitian matrix)
  void add_herm(int block, int row, int col, Complex v) {
    if (row == col) {
      add(block, row, col, v.real());
    } else {
      add(block, row, col, v);
      add(block, col, row, std::conj(v));
    }
  }
  std::optional<SdpProblem::Constraint> take(double rhs) {
    SdpProblem::Constraint c;
    c.rhs = rhs;
    for (const auto& [k, v] : acc_) {
      if (std::abs(v) == 0.0) continue;
      c.entries.push_back({k.block, k.row, k.col, v});
    }
    acc_.clear();
    if (c.entries.empty() && rhs == 0.0) return std::nullopt;
    return c;
  }

 private:
  std::map<EntryKey, Complex> acc_;
};

// Entry classes of a moment block: canonical product adjoint(b_i) * b_j for
// every ordered index pair, grouped by monomial.  Groups are kept only for
// monomials m with m <= adjoint(m); the conjugate class is its entrywise swap.
struct EntryClasses {
  std::map<Monomial, std::vector<std::pair<int, int>>> groups;
  std::vector<std::pair<int, int>> zero_entries;  // i <= j
  AlgebraSignature sig;

  // representative entry of the class of m, swap-consistent with adjoints:
  // rep(adjoint(m)) == swapped rep(m)
  std::pair<int, int> rep(const Monomial& m) const {
    auto it = groups.find(m);
    if (it != groups.end()) return it->second.front();
    it = groups.find(monomial_adjoint(m, sig));
    if (it == groups.end())
      throw RelaxationError("monomial not representable in basis (degree overflow)");
    auto [i, j] = it->second.front();
    return {j, i};
  }
};

EntryClasses build_entry_classes(const MonomialBasis& basis, const AlgebraSignature& sig) {
  EntryClasses ec;
  ec.sig = sig;
  const int n = basis.size();
  for (int i = 0; i < n; ++i) {
    Monomial ai = monomial_adjoint(basis.entries[i], sig);
    for (int j = 0; j < n; ++j) {
      auto m = monomial_product(ai, basis.entries[j], sig);
      if (!m) {
        if (i <= j) ec.zero_entries.push_back({i, j});
        continue;
      }
      Monomial madj = monomial_adjoint(*m, sig);
      if (!(madj < *m)) ec.groups[*m].push_back({i, j});
    }
  }
  return ec;
}

// weight making tr(A G) pick up exactly Re G(i,j): mirrored halves off the
// diagonal, full weight on it
double re_weight(int i, int j) { return i == j ? 1.0 : 0.5; }

// Emits the moment-equality and zero constraints of one block.
void emit_block_constraints(const EntryClasses& ec, int block,
                            std::vector<SdpProblem::Constraint>& out) {
  ConstraintBuilder cb;
  for (const auto& [m, members] : ec.groups) {
    const auto [ri, rj] = members.front();
    for (size_t t = 1; t < members.size(); ++t) {
      const auto [i, j] = members[t];
      // real part: Re G(i,j) = Re G(ri,rj)
      cb.add_herm(block, i, j, re_weight(i, j));
      cb.add_herm(block, ri, rj, -re_weight(ri, rj));
      if (auto c = cb.take(0.0)) out.push_back(std::move(*c));
      // imaginary part: Im G(i,j) = Im G(ri,rj); diagonals carry none
      cb.add_herm(block, i, j, Complex(0.0, 0.5));
      cb.add_herm(block, ri, rj, Complex(0.0, -0.5));
      if (auto c = cb.take(0.0)) out.push_back(std::move(*c));
    }
  }
  for (const auto& [i, j] : ec.zero_entries) {
    cb.add_herm(block, i, j, re_weight(i, j));
    if (auto c = cb.take(0.0)) out.push_back(std::move(*c));
    if (i != j) {
      cb.add_herm(block, i, j, Complex(0.0, 0.5));
      if (auto c = cb.take(0.0)) out.push_back(std::move(*c));
    }
  }
}

// Places coefficient c of monomial m so that the entries of class(m) sum to c
// and C stays Hermitian.  A self-adjoint monomial (real c, class closed under
// swap) is split over the mirrored pair; otherwise the adjoint term of the
// Hermitian polynomial supplies the mirror entry.
void add_objective_term(Eigen::MatrixXcd& C, const EntryClasses& ec, const Monomial& m,
                        Complex c) {
  auto [i, j] = ec.rep(m);
  if (monomial_adjoint(m, ec.sig) == m) {
    C(i, j) += c * 0.5;
    C(j, i) += std::conj(c) * 0.5;
  } else {
    C(i, j) += c;
  }
}

void check_degree(int d, const RelaxationOptions& opts) {
  if (d < 1) throw RelaxationError("relaxation degree must be >= 1");
  if (d > opts.degree_cap)
    throw RelaxationError("degree " + std::to_string(d) + " exceeds cap " +
                          std::to_string(opts.degree_cap) + " (raise the cap to override)");
}

// Splits a canonical monomial into its Alice and Bob parts.
std::pair<std::vector<Letter>, std::vector<Letter>> split_parties(const Monomial& m) {
  std::vector<Letter> a, b;
  for (const Letter& l : m.word()) (l.party == Party::Alice ? a : b).push_back(l);
  return {a, b};
}

}  // namespace

SdpProblem build_npa(const GamePolynomial& gp, int d, const RelaxationOptions& opts) {
  check_degree(d, opts);
  if (!is_hermitian(gp.poly, 1e-12))
    throw RelaxationError("game polynomial must be Hermitian");

  SdpProblem p;
  p.sig = gp.signature;
  p.degree = d;
  p.basis = npa_basis(gp.signature, d);
  p.block_dims = {p.basis.size()};
  p.block_label = {std::nullopt};
  p.source_poly = gp.poly;
  p.description = "npa d=" + std::to_string(d);

  EntryClasses ec = build_entry_classes(p.basis, p.sig);

  // normalization <1_{I,I}, G> = 1 goes first
  SdpProblem::Constraint norm;
  norm.entries.push_back({0, 0, 0, 1.0});
  norm.rhs = 1.0;
  p.constraints.push_back(std::move(norm));
  p.normalization_index = 0;
  emit_block_constraints(ec, 0, p.constraints);

  // objective: rewrite the polynomial over the eliminated generators first
  Polynomial obj = p.sig.kind == GeneratorKind::Projector
                       ? substitute_answer_zero(gp.poly)
                       : gp.poly;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(p.basis.size(), p.basis.size());
  for (const auto& [m, c] : obj.terms()) add_objective_term(C, ec, m, c);
  p.objective = {std::move(C)};
  p.validate();
  return p;
}

SdpProblem build_onesided(const GamePolynomial& gp, int d, const RelaxationOptions& opts) {
  check_degree(d, opts);
  if (!is_hermitian(gp.poly, 1e-12))
    throw RelaxationError("game polynomial must be Hermitian");
  const AlgebraSignature& sig = gp.signature;

  SdpProblem p;
  p.sig = sig;
  p.degree = d;
  p.basis = npa_basis(sig, d, BasisSide::BobOnly);
  p.source_poly = gp.poly;
  p.description = "onesided d=" + std::to_string(d);

  // blocks: (question, answer) in question-major order, all answers genuine
  const int na = sig.alice_answers;
  const int nx = sig.alice_questions;
  auto block_of = [&](int x, int a) { return x * na + a; };
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < na; ++a) {
      p.block_dims.push_back(p.basis.size());
      p.block_label.push_back(SdpProblem::AliceLabel{x, a});
    }

  EntryClasses ec = build_entry_classes(p.basis, sig);

  // identity: sum_a G_{a,x=0}(I,I) = 1
  SdpProblem::Constraint norm;
  for (int a = 0; a < na; ++a) norm.entries.push_back({block_of(0, a), 0, 0, 1.0});
  norm.rhs = 1.0;
  p.constraints.push_back(std::move(norm));
  p.normalization_index = 0;

  // within-block moment equalities
  for (int b = 0; b < static_cast<int>(p.block_dims.size()); ++b)
    emit_block_constraints(ec, b, p.constraints);

  // consistency: sum_a G_{a,0}(s,t) = sum_a G_{a,x}(s,t), one per entry class
  {
    ConstraintBuilder cb;
    for (int x = 1; x < nx; ++x) {
      for (const auto& [m, members] : ec.groups) {
        const auto [i, j] = members.front();
        const double w = re_weight(i, j);
        for (int a = 0; a < na; ++a) {
          cb.add_herm(block_of(0, a), i, j, w);
          cb.add_herm(block_of(x, a), i, j, -w);
        }
        if (auto c = cb.take(0.0)) p.constraints.push_back(std::move(*c));
        for (int a = 0; a < na; ++a) {
          cb.add_herm(block_of(0, a), i, j, Complex(0.0, 0.5));
          cb.add_herm(block_of(x, a), i, j, Complex(0.0, -0.5));
        }
        if (auto c = cb.take(0.0)) p.constraints.push_back(std::move(*c));
      }
    }
  }

  // objective
  for (size_t b = 0; b < p.block_dims.size(); ++b)
    p.objective.emplace_back(Eigen::MatrixXcd::Zero(p.basis.size(), p.basis.size()));

  for (const auto& [m, c] : gp.poly.terms()) {
    auto [alice, bob] = split_parties(m);
    if (alice.size() > 1)
      throw RelaxationError("one-sided relaxation needs Alice degree <= 1 in the polynomial");

    // Bob part over the eliminated Bob basis
    Polynomial bob_poly(sig);
    bob_poly.add_term(*canonicalize(bob, sig), 1.0);
    if (sig.kind == GeneratorKind::Projector)
      bob_poly = substitute_answer_zero(bob_poly, /*alice=*/false, /*bob=*/true);

    for (const auto& [bm, bc] : bob_poly.terms()) {
      if (alice.empty()) {
        // identity-functional term: distributes over the x = 0 blocks
        for (int a = 0; a < na; ++a)
          add_objective_term(p.objective[block_of(0, a)], ec, bm, c * bc);
      } else if (sig.kind == GeneratorKind::Projector) {
        add_objective_term(p.objective[block_of(alice[0].question, alice[0].payload)], ec, bm,
                           c * bc);
      } else {
        // observable power U_x^j = sum_a w^{a j} M_ax spreads over the x blocks
        const int x = alice[0].question, jexp = alice[0].payload;
        for (int a = 0; a < na; ++a)
          add_objective_term(p.objective[block_of(x, a)], ec, bm,
                             c * bc * root_of_unity(na, static_cast<long>(a) * jexp));
      }
    }
  }
  p.validate();
  return p;
}

DualView dual_data(const SdpProblem& p) {
  p.validate();
  return DualView{p.normalization_index};
}

std::vector<Eigen::MatrixXcd> dual_slack(const SdpProblem& p, std::span<const double> y) {
  if (y.size() != p.constraints.size())
    throw RelaxationError("multiplier count does not match constraint count");
  std::vector<Eigen::MatrixXcd> Z;
  Z.reserve(p.block_dims.size());
  for (size_t b = 0; b < p.block_dims.size(); ++b) Z.push_back(-p.objective[b]);
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    if (y[k] == 0.0) continue;
    for (const auto& e : p.constraints[k].entries)
      Z[e.block](e.row, e.col) += y[k] * e.value;
  }
  return Z;
}

Polynomial block_prefix_polynomial(const SdpProblem& p, int block) {
  const auto& label = p.block_label[block];
  if (!label) return Polynomial::identity(p.sig);
  if (p.sig.kind == GeneratorKind::Projector)
    return Polynomial::letter(p.sig, Party::Alice, label->question, label->answer);
  // Fourier PVM element of an order-d observable
  const int dd = p.sig.alice_answers;
  Polynomial e(p.sig);
  e.add_term(Monomial(), Complex(1.0 / dd));
  for (int j = 1; j < dd; ++j)
    e = e + Polynomial::letter(p.sig, Party::Alice, label->question, j,
                               root_of_unity(dd, -static_cast<long>(label->answer) * j) *
                                   (1.0 / dd));
  return e;
}

Polynomial entry_polynomial(const SdpProblem& p, int block, int i, int j) {
  Polynomial st(p.sig);
  auto m = monomial_product(monomial_adjoint(p.basis.entries[i], p.sig), p.basis.entries[j],
                            p.sig);
  if (!m) return st;  // annihilated entry
  st.add_term(*m, 1.0);
  return block_prefix_polynomial(p, block) * st;
}

Polynomial constraint_polynomial(const SdpProblem& p, const SdpProblem::Constraint& c) {
  Polynomial s(p.sig);
  for (const auto& e : c.entries)
    s = s + entry_polynomial(p, e.block, e.row, e.col) * e.value;
  return s;
}

Polynomial objective_polynomial(const SdpProblem& p) {
  Polynomial s(p.sig);
  for (size_t b = 0; b < p.objective.size(); ++b) {
    const Eigen::MatrixXcd& C = p.objective[b];
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < C.cols(); ++j) {
        if (std::abs(C(i, j)) == 0.0) continue;
        s = s + entry_polynomial(p, static_cast<int>(b), i, j) * C(i, j);
      }
  }
  return s;
}

void dump_problem(const SdpProblem& p, const std::string& path) {
  nlohmann::json j;
  j["description"] = p.description;
  j["degree"] = p.degree;
  j["block_dims"] = p.block_dims;
  j["normalization_index"] = p.normalization_index;
  nlohmann::json basis = nlohmann::json::array();
  for (const Monomial& m : p.basis.entries)
    basis.push_back(poly_to_text(Polynomial::monomial(p.sig, m)));
  j["basis"] = std::move(basis);
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : p.block_label) {
    if (l)
      labels.push_back({{"question", l->question}, {"answer", l->answer}});
    else
      labels.push_back(nullptr);
  }
  j["block_label"] = std::move(labels);
  nlohmann::json obj = nlohmann::json::array();
  for (size_t b = 0; b < p.objective.size(); ++b) {
    const Eigen::MatrixXcd& C = p.objective[b];
    for (int r = 0; r < C.rows(); ++r)
      for (int c = 0; c < C.cols(); ++c)
        if (std::abs(C(r, c)) != 0.0)
          obj.push_back({b, r, c, C(r, c).real(), C(r, c).imag()});
  }
  j["objective_entries"] = std::move(obj);
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : c.entries)
      entries.push_back({e.block, e.row, e.col, e.value.real(), e.value.imag()});
    cons.push_back({{"rhs", c.rhs}, {"entries", std::move(entries)}});
  }
  j["constraints"] = std::move(cons);
  std::ofstream out(path);
  if (!out) throw RelaxationError("cannot write '" + path + "'");
  out << j.dump() << '\n';
}

}  // namespace qbound
