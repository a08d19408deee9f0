// qbound command-line tool.  Talks to the library exclusively through the
// extern-C interface in qbound.h.
//
// Reports go to stdout as `key value` lines (value is the rest of the line);
// diagnostics go to stderr.  Exit codes: 0 success, 1 check failed,
// 2 solver failure, 3 bad input.

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include "qbound.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitBadInput = 3;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

int bad_input(const std::string& msg) {
  std::cerr << "error: " << msg << '\n';
  return kExitBadInput;
}

struct GameHandle {
  qb_game* g = nullptr;
  ~GameHandle() { qb_game_close(g); }
};
struct CertHandle {
  qb_cert* c = nullptr;
  ~CertHandle() { qb_cert_close(c); }
};

// flag > QBOUND_TOL > builtin default
double effective_tol(double flag_tol, double fallback) {
  if (flag_tol > 0) return flag_tol;
  if (const char* env = std::getenv("QBOUND_TOL")) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(env, env + std::string(env).size(), v);
    if (ec == std::errc() && v > 0) return v;
    std::cerr << "warning: ignoring malformed QBOUND_TOL '" << env << "'\n";
  }
  return fallback;
}

const char* status_name(int s) {
  switch (s) {
    case 0: return "optimal";
    case 1: return "max_iter";
    case 2: return "infeasible";
    case 3: return "numerical_failure";
  }
  return "unknown";
}

int cmd_solve(const std::string& game, const std::string& hierarchy, int level, double tol,
              int max_level, const std::string& out, const std::string& cert_path,
              const std::string& dump_path) {
  GameHandle gh;
  if (qb_game_open(game.c_str(), &gh.g) != QB_OK) return bad_input(qb_last_error());
  if (!dump_path.empty() &&
      qb_dump_problem(gh.g, hierarchy.c_str(), level, max_level, dump_path.c_str()) != QB_OK)
    return bad_input(qb_last_error());

  qb_solve_report rep;
  CertHandle cert;
  const auto t0 = std::chrono::steady_clock::now();
  int rc = qb_solve(gh.g, hierarchy.c_str(), level, effective_tol(tol, 1e-8), max_level, &rep,
                    cert_path.empty() ? nullptr : &cert.c);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (rc == QB_ERR_INVALID || rc == QB_ERR_PARSE) return bad_input(qb_last_error());

  std::string report;
  report += "report solve\n";
  report += "game " + std::string(qb_game_name(gh.g)) + "\n";
  report += "hierarchy " + hierarchy + "\n";
  report += "level " + std::to_string(level) + "\n";
  report += "status " + std::string(status_name(rep.status)) + "\n";
  if (rep.status == 0) {
    report += "value " + fmt(rep.value) + "\n";
    report += "dual_value " + fmt(rep.dual_value) + "\n";
  }
  report += "gap " + fmt(rep.gap) + "\n";
  report += "primal_residual " + fmt(rep.primal_residual) + "\n";
  report += "dual_residual " + fmt(rep.dual_residual) + "\n";
  report += "iterations " + std::to_string(rep.iterations) + "\n";
  report += "blocks " + std::to_string(rep.blocks) + "\n";
  report += "dimension " + std::to_string(rep.dimension) + "\n";
  report += "constraints " + std::to_string(rep.constraints) + "\n";
  if (const char* note = qb_game_scale_note(gh.g); note && *note)
    report += "scale_note " + std::string(note) + "\n";
  report += "wall_time_ms " + fmt(ms) + "\n";
  if (rc == QB_OK && cert.c) {
    if (qb_cert_save(cert.c, cert_path.c_str()) != QB_OK) return bad_input(qb_last_error());
    report += "certificate " + cert_path + "\n";
  }
  std::cout << report;
  if (!out.empty()) {
    FILE* f = std::fopen(out.c_str(), "w");
    if (!f) return bad_input("cannot write report to '" + out + "'");
    std::fputs(report.c_str(), f);
    std::fclose(f);
  }
  if (rc != QB_OK) {
    std::cerr << "error: " << qb_last_error() << '\n';
    return kExitSolverFailure;
  }
  return kExitOk;
}

int cmd_cert_verify(const std::string& cert_path, const std::string& game, double tol) {
  GameHandle gh;
  if (qb_game_open(game.c_str(), &gh.g) != QB_OK) return bad_input(qb_last_error());
  CertHandle ch;
  if (qb_cert_open(cert_path.c_str(), &ch.c) != QB_OK) return bad_input(qb_last_error());
  const double t = effective_tol(tol, 1e-8);
  double residual = 0.0;
  int rc = qb_cert_verify(ch.c, gh.g, t, &residual);
  if (rc != QB_OK && rc != QB_ERR_CHECK) return bad_input(qb_last_error());
  std::cout << "report cert-verify\n";
  std::cout << "cert " << cert_path << "\n";
  std::cout << "game " << qb_game_name(gh.g) << "\n";
  std::cout << "bound " << fmt(qb_cert_bound(ch.c)) << "\n";
  std::cout << "tol " << fmt(t) << "\n";
  std::cout << "max_residual " << fmt(residual) << "\n";
  std::cout << "ok " << (rc == QB_OK ? "true" : "false") << "\n";
  return rc == QB_OK ? kExitOk : kExitCheckFailed;
}

int cmd_cert_nicify(const std::string& cert_path, const std::string& game,
                    const std::string& out) {
  GameHandle gh;
  if (qb_game_open(game.c_str(), &gh.g) != QB_OK) return bad_input(qb_last_error());
  CertHandle ch;
  if (qb_cert_open(cert_path.c_str(), &ch.c) != QB_OK) return bad_input(qb_last_error());
  CertHandle nice;
  if (qb_cert_nicify(ch.c, gh.g, &nice.c) != QB_OK) return bad_input(qb_last_error());
  if (qb_cert_save(nice.c, out.c_str()) != QB_OK) return bad_input(qb_last_error());
  int flag = 0;
  qb_cert_check_nice(nice.c, &flag, nullptr, 0);
  std::cout << "report cert-nicify\n";
  std::cout << "cert " << cert_path << "\n";
  std::cout << "game " << qb_game_name(gh.g) << "\n";
  std::cout << "out " << out << "\n";
  std::cout << "bound " << fmt(qb_cert_bound(nice.c)) << "\n";
  std::cout << "terms " << qb_cert_num_terms(nice.c) << "\n";
  std::cout << "nice " << (flag ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_cert_check_nice(const std::string& cert_path) {
  CertHandle ch;
  if (qb_cert_open(cert_path.c_str(), &ch.c) != QB_OK) return bad_input(qb_last_error());
  int flag = 0;
  char offending[4096];
  if (qb_cert_check_nice(ch.c, &flag, offending, sizeof(offending)) != QB_OK)
    return bad_input(qb_last_error());
  std::cout << "report check-nice\n";
  std::cout << "cert " << cert_path << "\n";
  std::cout << "terms " << qb_cert_num_terms(ch.c) << "\n";
  std::cout << "nice " << (flag ? "true" : "false") << "\n";
  if (!flag) std::cout << "offending " << offending << "\n";
  return flag ? kExitOk : kExitCheckFailed;
}

int cmd_games_list() {
  std::cout << "report games-list\n";
  std::string names = qb_builtin_games();
  size_t start = 0;
  while (start <= names.size()) {
    size_t comma = names.find(',', start);
    std::string name = names.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!name.empty()) {
      std::cout << "game " << name;
      if (name.find('<') == std::string::npos) {
        GameHandle gh;
        if (qb_game_open(name.c_str(), &gh.g) == QB_OK) {
          std::cout << " kind=" << qb_game_kind(gh.g);
        }
      } else {
        std::cout << " kind=template";
      }
      std::cout << "\n";
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return kExitOk;
}

int cmd_games_export(const std::string& game, const std::string& out) {
  GameHandle gh;
  if (qb_game_open(game.c_str(), &gh.g) != QB_OK) return bad_input(qb_last_error());
  if (qb_game_save(gh.g, out.c_str()) != QB_OK) return bad_input(qb_last_error());
  std::cout << "report games-export\n";
  std::cout << "game " << qb_game_name(gh.g) << "\n";
  std::cout << "kind " << qb_game_kind(gh.g) << "\n";
  std::cout << "out " << out << "\n";
  if (const char* note = qb_game_scale_note(gh.g); note && *note)
    std::cout << "scale_note " << note << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDP bounds and sum-of-squares certificates for nonlocal games"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "build and solve a relaxation");
  std::string game, hierarchy = "npa", out, cert_path, dump_path;
  int level = 1, max_level = 0;
  double tol = 0.0;
  solve->add_option("--game", game, "builtin name or game file path")->required();
  solve->add_option("--hierarchy", hierarchy, "npa or onpa")
      ->check(CLI::IsMember({"npa", "onpa"}));
  solve->add_option("--level", level, "relaxation degree (default 1)");
  solve->add_option("--tol", tol, "gap and feasibility tolerance (default 1e-8)");
  solve->add_option("--max-level", max_level, "override the degree cap (default 3)");
  solve->add_option("--out", out, "also write the report to this file");
  solve->add_option("--cert", cert_path, "extract the dual certificate to this file");
  solve->add_option("--dump-problem", dump_path, "dump the assembled SDP as JSON");

  // cert
  auto* cert = app.add_subcommand("cert", "certificate operations");
  cert->require_subcommand(1);
  auto* verify = cert->add_subcommand("verify", "symbolically verify a certificate");
  std::string v_cert, v_game;
  double v_tol = 0.0;
  verify->add_option("--cert", v_cert, "certificate file")->required();
  verify->add_option("--game", v_game, "builtin name or game file path")->required();
  verify->add_option("--tol", v_tol, "residual tolerance (default 1e-8)");

  auto* nicify = cert->add_subcommand("nicify", "transform a degree-1 certificate into a nice one");
  std::string n_cert, n_game, n_out;
  nicify->add_option("--cert", n_cert, "certificate file")->required();
  nicify->add_option("--game", n_game, "builtin name or game file path")->required();
  nicify->add_option("--out", n_out, "output certificate file")->required();

  auto* check = cert->add_subcommand("check-nice", "report which terms break niceness");
  std::string c_cert;
  check->add_option("--cert", c_cert, "certificate file")->required();

  // games
  auto* games = app.add_subcommand("games", "corpus management");
  games->require_subcommand(1);
  games->add_subcommand("list", "list builtin games");
  auto* exp = games->add_subcommand("export", "write a builtin to a file");
  std::string e_game, e_out;
  exp->add_option("--game", e_game, "builtin name")->required();
  exp->add_option("--out", e_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadInput;
  }

  try {
    if (solve->parsed())
      return cmd_solve(game, hierarchy, level, tol, max_level, out, cert_path, dump_path);
    if (verify->parsed()) return cmd_cert_verify(v_cert, v_game, v_tol);
    if (nicify->parsed()) return cmd_cert_nicify(n_cert, n_game, n_out);
    if (check->parsed()) return cmd_cert_check_nice(c_cert);
    if (games->parsed()) {
      if (games->get_subcommand("list")->parsed()) return cmd_games_list();
      if (exp->parsed()) return cmd_games_export(e_game, e_out);
    }
  } catch (const std::exception& e) {
    return bad_input(e.what());
  }
  return kExitBadInput;
}
