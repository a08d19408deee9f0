#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "qbound.h"

namespace {
const std::string kFixtures = QBOUND_FIXTURE_DIR;
}

TEST_CASE("builtin listing and open/close") {
  CHECK(std::strstr(qb_builtin_games(), "chsh") != nullptr);

  qb_game* g = nullptr;
  REQUIRE(qb_game_open("chsh", &g) == QB_OK);
  CHECK(std::string(qb_game_name(g)) == "chsh");
  CHECK(std::string(qb_game_kind(g)) == "game");
  qb_game_close(g);

  qb_game* bad = nullptr;
  CHECK(qb_game_open("no_such_game", &bad) != QB_OK);
  CHECK(std::strlen(qb_last_error()) > 0);
}

TEST_CASE("open dispatches on file kind") {
  qb_game* g = nullptr;
  REQUIRE(qb_game_open((kFixtures + "/chsh.game").c_str(), &g) == QB_OK);
  CHECK(std::string(qb_game_kind(g)) == "game");
  qb_game_close(g);

  qb_game* p = nullptr;
  REQUIRE(qb_game_open((kFixtures + "/b3.poly").c_str(), &p) == QB_OK);
  CHECK(std::string(qb_game_kind(p)) == "game_polynomial");
  CHECK(std::strlen(qb_game_scale_note(p)) > 0);
  qb_game_close(p);
}

TEST_CASE("classical value through the C surface") {
  qb_game* g = nullptr;
  REQUIRE(qb_game_open("chsh", &g) == QB_OK);
  double v = 0.0;
  REQUIRE(qb_game_classical_value(g, 0, &v) == QB_OK);
  CHECK(v == doctest::Approx(0.75));
  qb_game_close(g);

  qb_game* b3 = nullptr;
  REQUIRE(qb_game_open("b3", &b3) == QB_OK);
  CHECK(qb_game_classical_value(b3, 0, &v) == QB_ERR_INVALID);
  qb_game_close(b3);
}

TEST_CASE("solve, extract, verify, nicify through the C surface") {
  qb_game* g = nullptr;
  REQUIRE(qb_game_open("chsh", &g) == QB_OK);

  qb_solve_report rep;
  qb_cert* cert = nullptr;
  REQUIRE(qb_solve(g, "npa", 1, 0, 0, &rep, &cert) == QB_OK);
  CHECK(rep.status == 0);
  CHECK(rep.value == doctest::Approx(0.8535533905932737).epsilon(1e-6));
  CHECK(rep.gap <= 1e-7);
  REQUIRE(cert != nullptr);
  CHECK(qb_cert_bound(cert) == doctest::Approx(0.8535533905932737).epsilon(1e-6));

  double residual = 0.0;
  CHECK(qb_cert_verify(cert, g, 1e-5, &residual) == QB_OK);
  CHECK(residual <= 1e-5);
  CHECK(qb_cert_verify(cert, g, 1e-16, &residual) == QB_ERR_CHECK);

  qb_cert* nice = nullptr;
  REQUIRE(qb_cert_nicify(cert, g, &nice) == QB_OK);
  int flag = 0;
  char offending[256];
  REQUIRE(qb_cert_check_nice(nice, &flag, offending, sizeof(offending)) == QB_OK);
  CHECK(flag == 1);
  CHECK(qb_cert_bound(nice) == qb_cert_bound(cert));

  // save / load round trip
  REQUIRE(qb_cert_save(nice, "capi_rt.cert") == QB_OK);
  qb_cert* back = nullptr;
  REQUIRE(qb_cert_open("capi_rt.cert", &back) == QB_OK);
  CHECK(qb_cert_bound(back) == qb_cert_bound(nice));
  CHECK(qb_cert_num_terms(back) == qb_cert_num_terms(nice));
  qb_cert_close(back);
  std::remove("capi_rt.cert");

  qb_cert_close(nice);
  qb_cert_close(cert);
  qb_game_close(g);
}

TEST_CASE("solver failures surface as error codes") {
  qb_game* g = nullptr;
  REQUIRE(qb_game_open("chsh", &g) == QB_OK);
  qb_solve_report rep;
  CHECK(qb_solve(g, "bogus", 1, 0, 0, &rep, nullptr) == QB_ERR_INVALID);
  CHECK(qb_solve(g, "npa", 9, 0, 0, &rep, nullptr) == QB_ERR_INVALID);  // above cap
  qb_game_close(g);
}

TEST_CASE("fixture certificates verify through the C surface") {
  qb_game* b3 = nullptr;
  REQUIRE(qb_game_open("b3", &b3) == QB_OK);
  qb_cert* cert = nullptr;
  REQUIRE(qb_cert_open((kFixtures + "/b3_nice.cert").c_str(), &cert) == QB_OK);
  double residual = 1.0;
  CHECK(qb_cert_verify(cert, b3, 1e-9, &residual) == QB_OK);
  CHECK(residual <= 1e-9);
  int flag = 0;
  CHECK(qb_cert_check_nice(cert, &flag, nullptr, 0) == QB_OK);
  CHECK(flag == 1);
  qb_cert_close(cert);
  qb_game_close(b3);
}

TEST_CASE("problem dump through the C surface") {
  qb_game* g = nullptr;
  REQUIRE(qb_game_open("chsh", &g) == QB_OK);
  CHECK(qb_dump_problem(g, "onpa", 1, 0, "capi_dump.json") == QB_OK);
  FILE* f = std::fopen("capi_dump.json", "r");
  CHECK(f != nullptr);
  if (f) std::fclose(f);
  std::remove("capi_dump.json");
  qb_game_close(g);
}
