#ifndef INFOLOSS_H
#define INFOLOSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>
#include <stddef.h>

typedef enum IlStatus {
  IL_STATUS_OK = 0,
  IL_STATUS_VALIDATION = 1,
  IL_STATUS_CAPACITY = 2,
  IL_STATUS_DOMAIN = 3,
  IL_STATUS_INTEGRITY = 4,
  IL_STATUS_IO = 5,
  IL_STATUS_NULL_POINTER = 6,
  IL_STATUS_INVALID_UTF8 = 7,
  IL_STATUS_PANIC = 8,
} IlStatus;

typedef enum IlModel {
  IL_MODEL_OUTPUT_UNIFORM = 0,
  IL_MODEL_UNIFORM_INPUT = 1,
} IlModel;

typedef enum IlVerdict {
  IL_VERDICT_HALTED = 0,
  IL_VERDICT_FREEZE = 1,
  IL_VERDICT_LOOP_PROVEN = 2,
  IL_VERDICT_HALT_UNREACHABLE = 3,
  IL_VERDICT_STEP_LIMIT = 4,
} IlVerdict;

typedef enum IlAnswer {
  IL_ANSWER_NO = 0,
  IL_ANSWER_YES = 1,
  IL_ANSWER_UNKNOWN = 2,
} IlAnswer;

typedef struct IlCensus IlCensus;

typedef struct IlMachine IlMachine;

typedef struct IlOracle IlOracle;

typedef struct IlTable IlTable;

// Outcome of a bounded run. `entry_step`, `cycle_len` and `shift` are zero
// unless `verdict` is `LoopProven`.
typedef struct IlRunSummary {
  enum IlVerdict verdict;
  uint64_t steps;
  uint64_t entry_step;
  uint64_t cycle_len;
  int64_t shift;
  double lost_bits;
  uint64_t non_blank_cells;
} IlRunSummary;

typedef struct IlCensusRow {
  uint64_t index;
  enum IlVerdict verdict;
  uint64_t steps;
  bool has_cycle;
  uint64_t cycle;
  double lost_bits;
} IlCensusRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *il_last_error(void);

// # Safety
// `s` must come from this library and not have been freed yet.
void il_string_free(char *s);

// Shannon measure of `len` probabilities, in bits.
//
// # Safety
// `probs` must point to `len` readable doubles.
enum IlStatus il_smi(const double *probs, uintptr_t len, double *result);

// # Safety
// `result` must be writable.
enum IlStatus il_surprisal(double p, double *result);

// # Safety
// `result` must be writable.
enum IlStatus il_erasure_entropy(uint64_t prior_states, double *result);

// Minimum heat in joules for erasing `bits` at `temperature` kelvin.
//
// # Safety
// `result` must be writable.
enum IlStatus il_landauer_energy(double bits, double temperature, double *result);

// Looks up a standard gate by name (`NAND`, `XOR`, `TOFFOLI`, ...).
//
// # Safety
// `name` must be a NUL-terminated string; `table` must be writable.
enum IlStatus il_table_standard(const char *name, struct IlTable **table);

// Parses a truth table in `00 -> 1` row format.
//
// # Safety
// `source` must be a NUL-terminated string; `table` must be writable.
enum IlStatus il_table_parse(const char *source, struct IlTable **table);

// # Safety
// `table` must come from this library and not have been freed yet.
void il_table_free(struct IlTable *table);

// # Safety
// `table` must be a live handle; `result` must be writable.
enum IlStatus il_table_joint_entropy(const struct IlTable *table, enum IlModel m, double *result);

// # Safety
// `table` must be a live handle; `result` must be writable.
enum IlStatus il_table_equivocation(const struct IlTable *table, enum IlModel m, double *result);

// # Safety
// `table` must be a live handle; `result` must be writable.
enum IlStatus il_table_is_reversible(const struct IlTable *table, bool *result);

// Parses a machine description (TOML).
//
// # Safety
// `source` must be a NUL-terminated string; `machine` must be writable.
enum IlStatus il_machine_parse(const char *source, struct IlMachine **machine);

// The two-state busy beaver champion.
//
// # Safety
// `machine` must be writable.
enum IlStatus il_machine_busy_beaver_2(struct IlMachine **machine);

// # Safety
// `machine` must come from this library and not have been freed yet.
void il_machine_free(struct IlMachine *machine);

// 16 hex digit digest of the canonical form; free with [`il_string_free`].
// Returns NULL if `machine` is NULL.
//
// # Safety
// `machine` must be a live handle or NULL.
char *il_machine_digest(const struct IlMachine *machine);

// Runs `machine` on `input` (symbol names concatenated, or NULL for a
// blank tape) for at most `max_steps` steps.
//
// # Safety
// `machine` must be a live handle, `input` NULL or a NUL-terminated string,
// and `summary` writable.
enum IlStatus il_machine_run(const struct IlMachine *machine,
                             const char *input,
                             uint64_t max_steps,
                             struct IlRunSummary *summary);

// Classifies every machine with `n_states` working states and `n_symbols`
// symbols on blank tape. `jobs == 0` uses all cores.
//
// # Safety
// `census` must be writable.
enum IlStatus il_census_run(uint32_t n_states,
                            uint32_t n_symbols,
                            uint64_t step_bound,
                            uint32_t jobs,
                            struct IlCensus **census);

// # Safety
// `census` must come from this library and not have been freed yet.
void il_census_free(struct IlCensus *census);

// Number of rows; 0 for NULL.
//
// # Safety
// `census` must be a live handle or NULL.
uint64_t il_census_len(const struct IlCensus *census);

// Row at position `position` (rows are sorted by machine index).
//
// # Safety
// `census` must be a live handle and `row` writable.
enum IlStatus il_census_row(const struct IlCensus *census,
                            uint64_t position,
                            struct IlCensusRow *row);

// The census as CSV; free with [`il_string_free`]. NULL if `census` is NULL.
//
// # Safety
// `census` must be a live handle or NULL.
char *il_census_to_csv(const struct IlCensus *census);

// Halting oracle answering by census index. The census may be freed afterwards.
//
// # Safety
// `census` must be a live handle and `oracle` writable.
enum IlStatus il_oracle_from_census(const struct IlCensus *census, struct IlOracle **oracle);

// # Safety
// `oracle` must come from this library and not have been freed yet.
void il_oracle_free(struct IlOracle *oracle);

// Answer for machine index `query`; `Unknown` for NULL or unlisted indices.
//
// # Safety
// `oracle` must be a live handle or NULL.
enum IlAnswer il_oracle_ask(const struct IlOracle *oracle, uint64_t query);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFOLOSS_H */
