#ifndef DQS_H
#define DQS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DqsStatus {
  DQS_STATUS_OK = 0,
  DQS_STATUS_NULL_POINTER = 1,
  DQS_STATUS_INVALID_ARGUMENT = 2,
  DQS_STATUS_SIMULATION_FAILED = 3,
  DQS_STATUS_PANIC = 4,
} DqsStatus;

typedef enum DqsStrategy {
  DQS_STRATEGY_ANCILLA_CHAIN = 0,
  DQS_STRATEGY_SINGLE_ANCILLA = 1,
  DQS_STRATEGY_ZERO_ANCILLA = 2,
} DqsStrategy;

/*
 Opaque circuit handle.
 */
typedef struct DqsCircuit DqsCircuit;

/*
 Opaque state-vector handle.
 */
typedef struct DqsState DqsState;

typedef struct DqsSearchResult {
  uint32_t n;
  uint64_t target;
  uint64_t measured;
  double probability;
  uint64_t u0_calls;
  uint64_t d2_calls;
} DqsSearchResult;

typedef struct DqsGroverPlan {
  uint64_t iterations;
  double theta;
  double predicted_success;
} DqsGroverPlan;

typedef struct DqsCrossover {
  /*
   1 when a crossover exists below the scan bound.
   */
  uint8_t found;
  uint32_t n;
  uint64_t recursive_cost;
  uint64_t grover_cost;
} DqsCrossover;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *dqs_last_error_message(void);

/*
 Full deterministic search circuit for an even `n`.

 # Safety
 `out` must be null or valid for writing one pointer.
 */
enum DqsStatus dqs_search_circuit(uint32_t n, uint64_t target, struct DqsCircuit **out);

/*
 Partial search circuit resolving the first `k` (even) bits.

 # Safety
 `out` must be null or valid for writing one pointer.
 */
enum DqsStatus dqs_partial_circuit(uint32_t n,
                                   uint64_t target,
                                   uint32_t k,
                                   struct DqsCircuit **out);

/*
 Grover circuit with `iterations` oracle/diffuser rounds.

 # Safety
 `out` must be null or valid for writing one pointer.
 */
enum DqsStatus dqs_grover_circuit(uint32_t n,
                                  uint64_t target,
                                  uint64_t iterations,
                                  struct DqsCircuit **out);

/*
 # Safety
 `circuit` must be null or a handle from this library not yet freed.
 */
void dqs_circuit_free(struct DqsCircuit *circuit);

/*
 Number of gates in the circuit as built.

 # Safety
 `circuit` must be a live handle; `out` must be valid for writing.
 */
enum DqsStatus dqs_circuit_gate_count(const struct DqsCircuit *circuit, uint64_t *out);

/*
 Two-qubit gate count after lowering with the clean-ancilla chain.

 # Safety
 `circuit` must be a live handle; `out` must be valid for writing.
 */
enum DqsStatus dqs_circuit_two_qubit_count(const struct DqsCircuit *circuit, uint64_t *out);

/*
 Text dump of the circuit. Release with [`dqs_string_free`].

 # Safety
 `circuit` must be a live handle; `out` must be valid for writing.
 */
enum DqsStatus dqs_circuit_dump(const struct DqsCircuit *circuit, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library not yet freed.
 */
void dqs_string_free(char *s);

/*
 Uniform superposition over `n` qubits.

 # Safety
 `out` must be null or valid for writing one pointer.
 */
enum DqsStatus dqs_state_uniform(uint32_t n, struct DqsState **out);

/*
 # Safety
 `state` must be null or a handle from this library not yet freed.
 */
void dqs_state_free(struct DqsState *state);

/*
 # Safety
 `state` must be a live handle; `out` must be valid for writing.
 */
enum DqsStatus dqs_state_num_qubits(const struct DqsState *state, uint32_t *out);

/*
 Probability of basis state `index`.

 # Safety
 `state` must be a live handle; `out` must be valid for writing.
 */
enum DqsStatus dqs_state_probability(const struct DqsState *state, uint64_t index, double *out);

/*
 Runs `circuit` on `input` and returns a new state.

 # Safety
 `circuit` and `input` must be live handles; `out` must be valid for
 writing one pointer.
 */
enum DqsStatus dqs_circuit_simulate(const struct DqsCircuit *circuit,
                                    const struct DqsState *input,
                                    struct DqsState **out);

/*
 Builds and simulates the full search in one call.

 # Safety
 `out` must be valid for writing.
 */
enum DqsStatus dqs_run_search(uint32_t n, uint64_t target, struct DqsSearchResult *out);

/*
 Floor-rule Grover iteration plan for `n` qubits.

 # Safety
 `out` must be valid for writing.
 */
enum DqsStatus dqs_grover_plan(uint32_t n, struct DqsGroverPlan *out);

/*
 Recursive D2 count `(3^(n/2) - 1) / 2` for even `n`.

 # Safety
 `out` must be valid for writing.
 */
enum DqsStatus dqs_recursive_diffusion_cost(uint32_t n, uint64_t *out);

/*
 Even-width crossover of the recursive and Grover diffusion costs.

 # Safety
 `out` must be valid for writing.
 */
enum DqsStatus dqs_crossover(enum DqsStrategy strategy, uint64_t k, struct DqsCrossover *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQS_H */
