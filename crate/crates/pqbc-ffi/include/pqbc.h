#ifndef PQBC_H
#define PQBC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PQBC_HAS_ELL 1

#define PQBC_HAS_SIGMA 2

#define PQBC_HAS_QC_DEC 4

#define PQBC_HAS_TAG_BITS 8

typedef enum PqbcConstruction {
  PQBC_CONSTRUCTION_FX = 0,
  PQBC_CONSTRUCTION_LRW = 1,
  PQBC_CONSTRUCTION_XEX2 = 2,
} PqbcConstruction;

typedef enum PqbcDistinguisher {
  PQBC_DISTINGUISHER_CONSTANT_ONE = 0,
  PQBC_DISTINGUISHER_CONSTANT_ZERO = 1,
  PQBC_DISTINGUISHER_BIRTHDAY = 2,
  PQBC_DISTINGUISHER_EVEN_MANSOUR = 3,
  PQBC_DISTINGUISHER_KEY_GUESS = 4,
} PqbcDistinguisher;

/**
 * Which advantage bound [`pqbc_bound`] evaluates.
 */
typedef enum PqbcFormula {
  PQBC_FORMULA_FX_PQ = 0,
  PQBC_FORMULA_LRW_HYBRID = 1,
  PQBC_FORMULA_LRW_GENERAL = 2,
  PQBC_FORMULA_XEX2_PQ = 3,
  PQBC_FORMULA_XEX2_TABLE = 4,
  PQBC_FORMULA_MODE_CBC = 5,
  PQBC_FORMULA_MODE_ECBC = 6,
  PQBC_FORMULA_MODE_CMAC = 7,
  PQBC_FORMULA_MODE_GCM = 8,
  PQBC_FORMULA_MODE_GCM_SST = 9,
} PqbcFormula;

/**
 * Status codes. The numeric values are stable.
 */
typedef enum PqbcStatus {
  PQBC_STATUS_OK = 0,
  PQBC_STATUS_NULL_POINTER = 1,
  PQBC_STATUS_PARAMS_OUT_OF_RANGE = 2,
  PQBC_STATUS_WIDTH_MISMATCH = 3,
  PQBC_STATUS_ZERO_INVERSE = 4,
  PQBC_STATUS_REDUCIBLE_MODULUS = 5,
  PQBC_STATUS_REPEATED_QUERY = 6,
  PQBC_STATUS_TWEAK_OUT_OF_SPACE = 7,
  PQBC_STATUS_PROMISE_VIOLATED = 8,
  PQBC_STATUS_EMPTY_MESSAGE = 9,
  PQBC_STATUS_PARTIAL_BLOCK = 10,
  PQBC_STATUS_TAG_MISMATCH = 11,
  PQBC_STATUS_NONCE_WIDTH = 12,
  PQBC_STATUS_NO_COLLISION_FOUND = 13,
  PQBC_STATUS_RECOVERY_FAILED = 14,
  PQBC_STATUS_NO_KEY = 15,
  PQBC_STATUS_AMBIGUOUS_KEY = 16,
  PQBC_STATUS_REGIME_ERROR = 17,
  PQBC_STATUS_MISSING_PARAMETER = 18,
  PQBC_STATUS_BUDGET_EXCEEDED = 19,
  PQBC_STATUS_IDENTITY_VIOLATION = 20,
  PQBC_STATUS_UNKNOWN_ENUM = 21,
  PQBC_STATUS_PANIC = 22,
} PqbcStatus;

/**
 * An ideal cipher with `m`-bit keys and `n`-bit blocks, fixed by a seed.
 */
typedef struct PqbcCipher PqbcCipher;

/**
 * Bound inputs. Optional fields are read only when their `PQBC_HAS_*` bit
 * is set in `has`.
 */
typedef struct PqbcBoundQuery {
  uint32_t m;
  uint32_t n;
  double q_c;
  double q_q;
  double ell;
  double sigma;
  double q_c_dec;
  uint32_t tag_bits;
  uint32_t has;
} PqbcBoundQuery;

typedef struct PqbcBound {
  /**
   * Unclamped sum of the terms.
   */
  double value;
  /**
   * `min(value, 1)`.
   */
  double clamped;
  bool vacuous;
  uint32_t term_count;
  /**
   * The first four term values; unused slots are zero.
   */
  double terms[4];
} PqbcBound;

/**
 * Distinguishing experiment parameters. `construction` and `distinguisher`
 * take [`PqbcConstruction`] and [`PqbcDistinguisher`] values.
 */
typedef struct PqbcExperimentConfig {
  uint32_t construction;
  uint32_t distinguisher;
  uint32_t m;
  uint32_t n;
  uint64_t trials;
  uint64_t seed;
  uint64_t q_c;
  uint64_t q_q;
} PqbcExperimentConfig;

typedef struct PqbcExperimentResult {
  double p_real;
  double p_ideal;
  double advantage;
  double ci_low;
  double ci_high;
  /**
   * The construction's default bound at the configured budgets.
   */
  double bound;
  bool bound_vacuous;
} PqbcExperimentResult;

typedef struct PqbcHybridSummary {
  uint64_t instances;
  uint64_t bad_instances;
  uint64_t pointwise_checks;
  uint64_t table_comparisons;
  double forward_p_value;
  double inverse_p_value;
} PqbcHybridSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pqbc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * always NUL-terminated when `len > 0`). Returns the full message length
 * excluding the terminator, so a caller can size a second call.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t pqbc_last_error_message(char *buf, size_t len);

/**
 * Creates an ideal cipher (`1 ≤ n ≤ 20`, `m ≤ 24`) and stores the handle in
 * `*out`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PqbcStatus pqbc_cipher_new(uint32_t m, uint32_t n, uint64_t seed, struct PqbcCipher **out);

/**
 * Releases a cipher. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle from [`pqbc_cipher_new`] not yet freed.
 */
void pqbc_cipher_free(struct PqbcCipher *c);

/**
 * `E_k(x)`.
 *
 * # Safety
 * `c` must be a live handle; `out` must be valid for writes.
 */
enum PqbcStatus pqbc_cipher_encrypt(const struct PqbcCipher *c,
                                    uint64_t k,
                                    uint64_t x,
                                    uint64_t *out);

/**
 * `E_k^{-1}(y)`.
 *
 * # Safety
 * `c` must be a live handle; `out` must be valid for writes.
 */
enum PqbcStatus pqbc_cipher_decrypt(const struct PqbcCipher *c,
                                    uint64_t k,
                                    uint64_t y,
                                    uint64_t *out);

/**
 * `FX(x) = E_{k0}(x ⊕ k1) ⊕ k2`, or its inverse when `decrypt` is set.
 *
 * # Safety
 * `c` must be a live handle; `out` must be valid for writes.
 */
enum PqbcStatus pqbc_fx(const struct PqbcCipher *c,
                        uint64_t k0,
                        uint64_t k1,
                        uint64_t k2,
                        uint64_t x,
                        bool decrypt,
                        uint64_t *out);

/**
 * LRW with the multiplicative hash `h_{k'}(τ) = k'·τ` over the canonical
 * field of the cipher's block width. `tweak` must be nonzero.
 *
 * # Safety
 * `c` must be a live handle; `out` must be valid for writes.
 */
enum PqbcStatus pqbc_lrw(const struct PqbcCipher *c,
                         uint64_t k,
                         uint64_t k_prime,
                         uint64_t tweak,
                         uint64_t x,
                         bool decrypt,
                         uint64_t *out);

/**
 * XEX2 with offset `α^j·E_{k'}(i)` over the canonical field.
 *
 * # Safety
 * `c` must be a live handle; `out` must be valid for writes.
 */
enum PqbcStatus pqbc_xex2(const struct PqbcCipher *c,
                          uint64_t k,
                          uint64_t k_prime,
                          uint64_t alpha,
                          uint64_t i,
                          uint64_t j,
                          uint64_t x,
                          bool decrypt,
                          uint64_t *out);

/**
 * `a·b` in the canonical field GF(2^n).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PqbcStatus pqbc_gf_mul(uint32_t n, uint64_t a, uint64_t b, uint64_t *out);

/**
 * `a^{-1}` in the canonical field GF(2^n).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PqbcStatus pqbc_gf_inv(uint32_t n, uint64_t a, uint64_t *out);

/**
 * Evaluates `formula` (a [`PqbcFormula`] value) at `q`.
 *
 * # Safety
 * `q` must be valid for reads and `out` for writes.
 */
enum PqbcStatus pqbc_bound(uint32_t formula_id,
                           const struct PqbcBoundQuery *q,
                           struct PqbcBound *out);

/**
 * Runs a real-vs-ideal distinguishing experiment.
 *
 * # Safety
 * `cfg` must be valid for reads and `out` for writes.
 */
enum PqbcStatus pqbc_run_distinguishing(const struct PqbcExperimentConfig *cfg,
                                        struct PqbcExperimentResult *out);

/**
 * Checks the hybrid identities on `count` random instances (`lrw` selects
 * LRW, otherwise FX). Returns `IdentityViolation` on the first
 * counterexample, with the instance in the error message.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PqbcStatus pqbc_verify_hybrids(bool lrw,
                                    uint32_t m,
                                    uint32_t n,
                                    uint32_t j_max,
                                    uint32_t count,
                                    uint64_t seed,
                                    struct PqbcHybridSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PQBC_H */
