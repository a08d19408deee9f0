#include "qbound.h"

#include <cstring>
#include <filesystem>
#include <sstream>

#include "qbound/certificate.hpp"
#include "qbound/formats.hpp"
#include "qbound/games.hpp"
#include "qbound/nicify.hpp"
#include "qbound/sdp.hpp"

struct qb_game {
  qbound::BuiltinEntry entry;
};

struct qb_cert {
  qbound::SosCertificate cert;
  std::string offending;  // scratch for check_nice output
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const qbound::GameError& e) {
    return fail(QB_ERR_PARSE, e.what());
  } catch (const qbound::FormatError& e) {
    return fail(QB_ERR_PARSE, e.what());
  } catch (const qbound::CertificateError& e) {
    return fail(QB_ERR_PARSE, e.what());
  } catch (const qbound::NicifyError& e) {
    return fail(QB_ERR_INVALID, e.what());
  } catch (const qbound::RelaxationError& e) {
    return fail(QB_ERR_INVALID, e.what());
  } catch (const qbound::AlgebraError& e) {
    return fail(QB_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(QB_ERR_INTERNAL, e.what());
  }
}

// "matching" and "b3" are solved at their polynomial-scale fixtures
qbound::GamePolynomial solving_polynomial(const qb_game* g) {
  return g->entry.solving_polynomial();
}

}  // namespace

extern "C" {

const char* qb_last_error(void) { return g_last_error.c_str(); }

const char* qb_version(void) { return "1.0.0"; }

const char* qb_builtin_games(void) { return "chsh,matching,b3,bn:<n>,xor:<table>"; }

int qb_game_open(const char* name_or_path, qb_game** out) {
  if (!name_or_path || !out) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    auto g = std::make_unique<qb_game>();
    if (std::filesystem::exists(name_or_path)) {
      // dispatch on the file's "kind" field
      std::string path(name_or_path);
      try {
        qbound::NonlocalGame game = qbound::load_game(path);
        g->entry = qbound::BuiltinEntry{game.name, "loaded from " + path, game, std::nullopt};
      } catch (const qbound::GameError&) {
        std::string name;
        qbound::GamePolynomial gp = qbound::load_game_polynomial(path, &name);
        g->entry = qbound::BuiltinEntry{name, "loaded from " + path, std::nullopt, gp};
      }
    } else {
      g->entry = qbound::builtin(name_or_path);
    }
    *out = g.release();
    return QB_OK;
  });
}

void qb_game_close(qb_game* g) { delete g; }

const char* qb_game_name(const qb_game* g) { return g ? g->entry.name.c_str() : ""; }

const char* qb_game_kind(const qb_game* g) {
  if (!g) return "";
  return g->entry.game ? "game" : "game_polynomial";
}

const char* qb_game_scale_note(const qb_game* g) {
  static const char* empty = "";
  if (!g) return empty;
  if (g->entry.fixture) return g->entry.fixture->scale_note.c_str();
  return empty;
}

int qb_game_save(const qb_game* g, const char* path) {
  if (!g || !path) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    if (g->entry.game)
      qbound::save_game(*g->entry.game, path);
    else
      qbound::save_game_polynomial(*g->entry.fixture, g->entry.name, path);
    return QB_OK;
  });
}

int qb_game_classical_value(const qb_game* g, double budget, double* out) {
  if (!g || !out) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    if (!g->entry.game)
      return fail(QB_ERR_INVALID,
                  "'" + g->entry.name + "' is a polynomial fixture without a predicate game");
    *out = qbound::classical_value(*g->entry.game, budget > 0 ? budget : 1e7);
    return QB_OK;
  });
}

int qb_solve(const qb_game* g, const char* hierarchy, int level, double tol, int max_level,
             qb_solve_report* report, qb_cert** cert_out) {
  if (!g || !hierarchy || !report) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    std::string h(hierarchy);
    if (h != "npa" && h != "onpa")
      return fail(QB_ERR_INVALID, "hierarchy must be 'npa' or 'onpa', got '" + h + "'");
    qbound::GamePolynomial gp = solving_polynomial(g);
    qbound::RelaxationOptions ropts;
    if (max_level > 0) ropts.degree_cap = max_level;
    qbound::SdpProblem prob = h == "npa" ? qbound::build_npa(gp, level, ropts)
                                         : qbound::build_onesided(gp, level, ropts);
    qbound::SolveOptions sopts;
    if (tol > 0) {
      sopts.gap_tol = tol;
      sopts.feas_tol = tol;
    }
    qbound::SdpSolution sol = qbound::solve(prob, sopts);

    std::memset(report, 0, sizeof(*report));
    report->value = sol.primal_obj;
    report->dual_value = sol.dual_obj;
    report->gap = sol.gap;
    report->primal_residual = sol.primal_residual;
    report->dual_residual = sol.dual_residual;
    report->status = static_cast<int>(sol.status);
    report->iterations = sol.iterations;
    report->blocks = static_cast<int>(prob.block_dims.size());
    report->dimension = prob.total_dim();
    report->constraints = static_cast<int>(prob.constraints.size());

    if (sol.status != qbound::SolveStatus::Optimal)
      return fail(QB_ERR_SOLVER,
                  std::string("solver finished with status ") + to_string(sol.status));
    if (cert_out) {
      auto c = std::make_unique<qb_cert>();
      c->cert = qbound::extract(sol, prob);
      *cert_out = c.release();
    }
    return QB_OK;
  });
}

int qb_cert_open(const char* path, qb_cert** out) {
  if (!path || !out) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    auto c = std::make_unique<qb_cert>();
    c->cert = qbound::load_cert(path);
    *out = c.release();
    return QB_OK;
  });
}

int qb_cert_save(const qb_cert* c, const char* path) {
  if (!c || !path) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    qbound::save_cert(c->cert, path);
    return QB_OK;
  });
}

void qb_cert_close(qb_cert* c) { delete c; }

double qb_cert_bound(const qb_cert* c) { return c ? c->cert.bound : 0.0; }

int qb_cert_num_terms(const qb_cert* c) {
  return c ? static_cast<int>(c->cert.terms.size()) : 0;
}

int qb_cert_verify(const qb_cert* c, const qb_game* g, double tol, double* max_residual) {
  if (!c || !g) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    qbound::VerifyReport rep = qbound::verify(c->cert, solving_polynomial(g), tol);
    if (max_residual) *max_residual = rep.max_residual;
    if (!rep.ok)
      return fail(QB_ERR_CHECK, "max residual " + qbound::format_double(rep.max_residual) +
                                    " exceeds tolerance " + qbound::format_double(tol));
    return QB_OK;
  });
}

int qb_cert_check_nice(const qb_cert* c, int* is_nice, char* offending, size_t offending_cap) {
  if (!c || !is_nice) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    qbound::NicenessReport rep = qbound::is_nice(c->cert);
    *is_nice = rep.is_nice ? 1 : 0;
    if (offending && offending_cap > 0) {
      std::ostringstream os;
      for (const auto& [idx, qs] : rep.offending_terms) {
        os << (os.tellp() > 0 ? " " : "") << idx << ":{";
        for (size_t i = 0; i < qs.size(); ++i) os << (i ? "," : "") << qs[i];
        os << '}';
      }
      std::string s = os.str();
      std::strncpy(offending, s.c_str(), offending_cap - 1);
      offending[offending_cap - 1] = '\0';
    }
    return QB_OK;
  });
}

int qb_cert_nicify(const qb_cert* c, const qb_game* g, qb_cert** out) {
  if (!c || !g || !out) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    auto nc = std::make_unique<qb_cert>();
    nc->cert = qbound::nicify_level1(c->cert, solving_polynomial(g));
    *out = nc.release();
    return QB_OK;
  });
}

int qb_dump_problem(const qb_game* g, const char* hierarchy, int level, int max_level,
                    const char* path) {
  if (!g || !hierarchy || !path) return fail(QB_ERR_INVALID, "null argument");
  return guarded([&] {
    std::string h(hierarchy);
    if (h != "npa" && h != "onpa")
      return fail(QB_ERR_INVALID, "hierarchy must be 'npa' or 'onpa', got '" + h + "'");
    qbound::RelaxationOptions ropts;
    if (max_level > 0) ropts.degree_cap = max_level;
    qbound::GamePolynomial gp = solving_polynomial(g);
    qbound::SdpProblem prob = h == "npa" ? qbound::build_npa(gp, level, ropts)
                                         : qbound::build_onesided(gp, level, ropts);
    qbound::dump_problem(prob, path);
    return QB_OK;
  });
}

}  // extern "C"
