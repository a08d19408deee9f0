/* qbound shared-library interface.
 *
 * All functions return QB_OK (0) or an error code; qb_last_error() describes
 * the most recent failure on the calling thread.  Objects are opaque handles
 * released with the matching *_close call.  Strings returned by accessors
 * stay valid until their handle is closed.
 */
#ifndef QBOUND_H
#define QBOUND_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define QB_OK 0
#define QB_ERR_INVALID 1  /* bad argument or malformed input */
#define QB_ERR_IO 2       /* file not readable/writable */
#define QB_ERR_PARSE 3    /* file parsed but malformed */
#define QB_ERR_SOLVER 4   /* solve did not reach Optimal */
#define QB_ERR_CHECK 5    /* verification or niceness check failed */
#define QB_ERR_INTERNAL 6

typedef struct qb_game qb_game;
typedef struct qb_cert qb_cert;

const char* qb_last_error(void);
const char* qb_version(void);

/* Comma-separated builtin names/templates, e.g. "chsh,matching,b3,bn:<n>,xor:<table>". */
const char* qb_builtin_games(void);

/* Opens a builtin by name, or a game / game_polynomial file by path. */
int qb_game_open(const char* name_or_path, qb_game** out);
void qb_game_close(qb_game* g);
const char* qb_game_name(const qb_game* g);
/* "game" when a predicate game is attached, else "game_polynomial". */
const char* qb_game_kind(const qb_game* g);
const char* qb_game_scale_note(const qb_game* g);
/* Writes the natural file form (game file, or polynomial fixture for b3). */
int qb_game_save(const qb_game* g, const char* path);
/* Brute force over deterministic strategies; fails for polynomial fixtures. */
int qb_game_classical_value(const qb_game* g, double budget, double* out);

typedef struct {
  double value;          /* primal relaxation value */
  double dual_value;     /* certificate bound */
  double gap;
  double primal_residual;
  double dual_residual;
  int status;            /* 0 optimal, 1 max_iter, 2 infeasible, 3 numerical failure */
  int iterations;
  int blocks;
  int dimension;         /* total complex dimension */
  int constraints;
} qb_solve_report;

/* hierarchy: "npa" or "onpa".  tol <= 0 selects the default (1e-8).
 * max_level <= 0 keeps the default degree cap (3).
 * cert_out may be NULL; on success it receives the extracted certificate. */
int qb_solve(const qb_game* g, const char* hierarchy, int level, double tol, int max_level,
             qb_solve_report* report, qb_cert** cert_out);

int qb_cert_open(const char* path, qb_cert** out);
int qb_cert_save(const qb_cert* c, const char* path);
void qb_cert_close(qb_cert* c);
double qb_cert_bound(const qb_cert* c);
int qb_cert_num_terms(const qb_cert* c);

/* QB_OK when the residual is <= tol, QB_ERR_CHECK otherwise;
 * *max_residual is written in both cases. */
int qb_cert_verify(const qb_cert* c, const qb_game* g, double tol, double* max_residual);

/* *is_nice receives 1/0; offending (optional) receives a summary of the
 * terms touching more than one Alice question. */
int qb_cert_check_nice(const qb_cert* c, int* is_nice, char* offending, size_t offending_cap);

int qb_cert_nicify(const qb_cert* c, const qb_game* g, qb_cert** out);

/* Writes the assembled relaxation (blocks, basis, objective, constraints) as
 * JSON for debugging, without solving it. */
int qb_dump_problem(const qb_game* g, const char* hierarchy, int level, int max_level,
                    const char* path);

#ifdef __cplusplus
}
#endif

#endif /* QBOUND_H */
