/* recweave — recursion weaving over rendezvous channels.
 *
 * C interface to the core library. All functions returning rw_status
 * report RW_OK on success; on any other status the out-parameters are
 * untouched and rw_last_error() carries a message for the calling
 * thread. Every handle has exactly one matching *_free function; free
 * functions accept NULL.
 */
#ifndef RECWEAVE_H
#define RECWEAVE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rw_status {
  RW_OK = 0,
  RW_E_SYNTAX = 1,
  RW_E_FORBIDDEN_VARIABLE = 2,
  RW_E_MISSING_Y = 3,
  RW_E_OVERFLOW = 4,
  RW_E_NEGATIVE_INPUT = 5,
  RW_E_INVALID_DELTA = 6,
  RW_E_ARITY_MISMATCH = 7,
  RW_E_UNKNOWN_NAME = 8,
  RW_E_NON_INVERTIBLE_EFFECT = 9,
  RW_E_TIMEOUT = 10,
  RW_E_IO = 11,
  RW_E_USAGE = 12,
  RW_E_INTERNAL = 13
} rw_status;

const char* rw_status_name(rw_status st);

/* Message for the most recent failing call on this thread; never NULL. */
const char* rw_last_error(void);

/* Strings returned through char** out-parameters are heap-allocated;
 * release them with rw_string_free. */
void rw_string_free(char* s);

/* ---- schemes ---------------------------------------------------------- */

typedef struct rw_scheme rw_scheme;

rw_status rw_scheme_load(const char* path, rw_scheme** out);
rw_status rw_scheme_parse(const char* text, rw_scheme** out);
void rw_scheme_free(rw_scheme* s);

const char* rw_scheme_name(const rw_scheme* s);
int64_t rw_scheme_delta_p(const rw_scheme* s);

/* Direct recursive evaluation. */
rw_status rw_rec_oracle(const rw_scheme* s, int64_t x, int64_t* out);

/* Bottom-up application order: tags[i] is 'B' or 'H', args[i] the
 * argument. Free both arrays with rw_unfold_free. */
rw_status rw_unfold_trace(const rw_scheme* s, int64_t x, char** tags, int64_t** args,
                          size_t* len);
void rw_unfold_free(char* tags, int64_t* args);

/* ---- reversible programs ---------------------------------------------- */

typedef struct rw_program rw_program;

rw_status rw_rir_parse(const char* text, rw_program** out);
void rw_program_free(rw_program* p);
rw_status rw_rir_print(const rw_program* p, char** text);

/* Arity against the built-in definitions (sum, sub, mul, disSel,
 * disStep, quo). */
rw_status rw_rir_arity(const rw_program* p, int* out);

/* Evaluates p on values[0..n). Emitted values are appended to
 * emitted[0..emitted_cap) when emitted is non-NULL; *emitted_len always
 * receives the full emit count. */
rw_status rw_rir_interpret(const rw_program* p, const int64_t* values, size_t n,
                           int64_t* out_values, int64_t* emitted, size_t emitted_cap,
                           size_t* emitted_len);

/* Structural inverse; fails with RW_E_NON_INVERTIBLE_EFFECT if p
 * contains emit. */
rw_status rw_rir_invert(const rw_program* p, rw_program** out);

/* ---- producer generation ---------------------------------------------- */

typedef struct rw_plan rw_plan;

rw_status rw_gen_producer(int64_t delta_p, int strict_ancilla, rw_plan** out);
void rw_plan_free(rw_plan* p);
rw_status rw_plan_print(const rw_plan* p, char** text);
int rw_plan_width(const rw_plan* p);
const char* rw_plan_register_name(const rw_plan* p, int slot); /* NULL out of range */

/* ---- interleaved runs -------------------------------------------------- */

typedef enum rw_producer_kind { RW_PRODUCER_RIR = 0, RW_PRODUCER_REFERENCE = 1 } rw_producer_kind;

typedef enum rw_fault {
  RW_FAULT_NONE = 0,
  RW_FAULT_DROP_LAST_PUT = 1,
  RW_FAULT_DUPLICATE_LAST_PUT = 2
} rw_fault;

typedef struct rw_run_options {
  rw_producer_kind producer;
  uint64_t seed;
  int strict_ancilla;
  int64_t timeout_ms; /* <= 0 selects the default of 5000 */
  rw_fault fault;
} rw_run_options;

typedef struct rw_report rw_report;

/* Runs producer and consumer to completion and verifies the run. The
 * call succeeds even when verdicts fail; inspect the report. */
rw_status rw_run(const rw_scheme* s, int64_t x, const rw_run_options* opts, rw_report** out);
void rw_report_free(rw_report* r);

int rw_report_result(const rw_report* r, int64_t* out); /* 0 if no result */
/* 1 pass, 0 fail, -1 unknown name. Names: oracle_equal,
 * registers_restored, trace_deterministic, no_deadlock, message_count. */
int rw_report_verdict(const rw_report* r, const char* name);
int rw_report_all_pass(const rw_report* r);
int rw_report_timed_out(const rw_report* r);
rw_status rw_report_render(const rw_report* r, int include_trace, char** text);

/* ---- sweeps ------------------------------------------------------------ */

typedef struct rw_sweep_options {
  int64_t max_input;
  int seeds;
  int strict_ancilla;
  int64_t timeout_ms; /* <= 0 selects the default of 5000 */
  rw_fault fault;
} rw_sweep_options;

typedef struct rw_summary rw_summary;

rw_status rw_sweep(const rw_scheme* s, const rw_sweep_options* opts, rw_summary** out);
void rw_summary_free(rw_summary* m);

int64_t rw_summary_runs(const rw_summary* m);
int64_t rw_summary_failures(const rw_summary* m);
/* 1 when every failing run failed only by deadlock/timeout. */
int rw_summary_only_timeouts(const rw_summary* m);
/* "x=.. producer=.. seed=.. check=.." or "" when clean. */
const char* rw_summary_first_failure(const rw_summary* m);

#ifdef __cplusplus
}
#endif

#endif /* RECWEAVE_H */
