#ifndef INEXACT_OPT_H
#define INEXACT_OPT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum IoStatus {
  IO_STATUS_OK = 0,
  IO_STATUS_NULL_POINTER = 1,
  IO_STATUS_INVALID_ARGUMENT = 2,
  IO_STATUS_INVALID_CONFIG = 3,
  IO_STATUS_NUMERIC_FAILURE = 4,
  IO_STATUS_NOT_SUMMABLE = 5,
  IO_STATUS_MODEL_VIOLATION = 6,
  IO_STATUS_SCHEMA = 7,
  IO_STATUS_IO = 8,
  // A string argument was not valid UTF-8.
  IO_STATUS_UTF8 = 9,
  // An index or buffer length was out of range.
  IO_STATUS_OUT_OF_RANGE = 10,
  // Internal panic caught at the boundary.
  IO_STATUS_PANIC = 11,
} IoStatus;

// Tie rule of the hard-thresholding prox.
typedef enum IoTiePolicy {
  IO_TIE_POLICY_KEEP = 0,
  IO_TIE_POLICY_ZERO = 1,
} IoTiePolicy;

// Verdict of the finite-length check.
typedef enum IoVerdict {
  IO_VERDICT_CONVERGED = 0,
  IO_VERDICT_DIVERGED = 1,
  IO_VERDICT_UNDETERMINED = 2,
} IoVerdict;

// Opaque built problem.
typedef struct IoProblem IoProblem;

// Opaque diagnostics report.
typedef struct IoReport IoReport;

// Opaque completed run.
typedef struct IoRun IoRun;

// Constants of the descent and relative-error inequalities.
typedef struct IoConstants {
  double a;
  double b;
  double c;
  double d;
  size_t tau;
} IoConstants;

// Scalar fields of one trace record. Absent values are NaN: the step
// fields on the last record and the witness on the first.
typedef struct IoRecord {
  double obj;
  double step_norm;
  double eta;
  double witness_norm;
} IoRecord;

// Headline numbers of a diagnostics report.
typedef struct IoReportSummary {
  size_t steps;
  size_t descent_violations;
  size_t relerr_violations;
  // 1 when the Lyapunov audit ran, 0 when the noise tail diverges.
  int lyapunov_available;
  int lyapunov_monotone;
  double path_length;
  double tail_path_length;
  double final_witness_norm;
  enum IoVerdict verdict;
} IoReportSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *io_version(void);

// Copies the last error message of this thread into `buf`. Returns the
// size needed including the NUL, or 0 when there is no error.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t io_last_error_message(char *buf, size_t len);

// Builds a problem from its JSON description.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum IoStatus io_problem_from_json(const char *json, struct IoProblem **out);

// # Safety
// `problem` must be null or a handle from [`io_problem_from_json`] not yet freed.
void io_problem_free(struct IoProblem *problem);

// Problem family name (`composite`, `block`, `reweighted`, `dc`, `admm`)
// as a static string, or null for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
const char *io_problem_family(const struct IoProblem *problem);

// Runs a solver on `problem`.
//
// `params_json` is the step object, e.g. `{"kind":"ipg","h":0.5}`.
// `noise_json` is a noise schedule; the splitting scheme uses it for both
// streams. `initial_point` may be null for the zero start.
//
// # Safety
// Pointers must be valid; `initial_point` must hold `initial_len` values.
enum IoStatus io_run_solver(const struct IoProblem *problem,
                            const char *params_json,
                            size_t max_iters,
                            const char *noise_json,
                            const double *initial_point,
                            size_t initial_len,
                            struct IoRun **out);

// Runs the experiment described by a TOML config, in the format read by
// the `run` command. The run keeps the config's diagnostics settings.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum IoStatus io_run_from_toml(const char *toml, struct IoRun **out);

// # Safety
// `run` must be null or a live handle.
void io_run_free(struct IoRun *run);

// Number of completed steps; the trace holds one more record.
//
// # Safety
// `run` must be a live handle.
enum IoStatus io_run_steps(const struct IoRun *run, size_t *out);

// # Safety
// `run` must be a live handle; `out` must be writable.
enum IoStatus io_run_constants(const struct IoRun *run, struct IoConstants *out);

// Record `k`, for `k` in `0..=steps`.
//
// # Safety
// `run` must be a live handle; `out` must be writable.
enum IoStatus io_run_record(const struct IoRun *run, size_t k, struct IoRecord *out);

// Copies the iterate of record `k` into `buf`. `needed` receives its
// length; pass a null `buf` to query it.
//
// # Safety
// `buf` must be null or hold `len` values; `needed` must be null or writable.
enum IoStatus io_run_point(const struct IoRun *run,
                           size_t k,
                           double *buf,
                           size_t len,
                           size_t *needed);

// Runs every diagnostic on a run. `settings_json` may be null for the
// run's own settings; otherwise missing fields take their defaults.
//
// # Safety
// `run` must be a live handle; `out` must be writable.
enum IoStatus io_run_report(const struct IoRun *run,
                            const char *settings_json,
                            struct IoReport **out);

// # Safety
// `report` must be null or a live handle.
void io_report_free(struct IoReport *report);

// # Safety
// `report` must be a live handle; `out` must be writable.
enum IoStatus io_report_summary(const struct IoReport *report, struct IoReportSummary *out);

// Writes the report JSON (as stored in `report.json`) into `buf`. `needed`
// receives the size including the NUL; pass a null `buf` to query it.
//
// # Safety
// `buf` must be null or hold `len` bytes; `needed` must be null or writable.
enum IoStatus io_report_json(const struct IoReport *report, char *buf, size_t len, size_t *needed);

// Soft thresholding of `n` values.
//
// # Safety
// `x` and `out` must hold `n` values; they may alias.
enum IoStatus io_prox_l1(const double *x, size_t n, double tau, double *out);

// Hard thresholding of `n` values; `tie` is an [`IoTiePolicy`] value.
//
// # Safety
// `x` and `out` must hold `n` values; they may alias.
enum IoStatus io_prox_l0(const double *x, size_t n, double tau, int tie, double *out);

// Per-coordinate soft thresholding with thresholds `tau·weights[i]`.
//
// # Safety
// `x`, `weights` and `out` must hold `n` values; `out` may alias `x`.
enum IoStatus io_prox_weighted_l1(const double *x,
                                  const double *weights,
                                  size_t n,
                                  double tau,
                                  double *out);

// `η_k` of a noise schedule given as JSON.
//
// # Safety
// `schedule_json` must be a NUL-terminated string; `out` must be writable.
enum IoStatus io_noise_eta(const char *schedule_json, uint64_t k, double *out);

// `Σ_{l ≥ k} η_l²`; fails with `NotSummable` for a divergent tail.
//
// # Safety
// `schedule_json` must be a NUL-terminated string; `out` must be writable.
enum IoStatus io_noise_tail_sum_sq(const char *schedule_json, uint64_t k, double *out);

// Noise vector `eᵏ` of dimension `n`.
//
// # Safety
// `schedule_json` must be a NUL-terminated string; `out` must hold `n` values.
enum IoStatus io_noise_draw(const char *schedule_json, uint64_t k, size_t n, double *out);

// `c(θ) = (2θ − 1)/(2(θ − 1))` for `θ > 1`.
//
// # Safety
// `out` must be writable.
enum IoStatus io_c_theta(double theta, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* INEXACT_OPT_H */
