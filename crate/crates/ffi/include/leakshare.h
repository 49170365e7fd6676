#ifndef LEAKSHARE_H
#define LEAKSHARE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_FIELD = 2,
  LS_STATUS_DIVISION_BY_ZERO = 3,
  LS_STATUS_INVALID_PARAMETER = 4,
  LS_STATUS_THRESHOLD_NOT_MET = 5,
  LS_STATUS_DOMAIN = 6,
  LS_STATUS_STATE_SPACE_TOO_LARGE = 7,
  LS_STATUS_NOT_CONVERGED = 8,
  LS_STATUS_CONFIG = 9,
  LS_STATUS_BUFFER_TOO_SMALL = 10,
  LS_STATUS_INTERNAL = 11,
  LS_STATUS_PANIC = 12,
} LsStatus;

/**
 * A field GF(2^l).
 */
typedef struct LsField LsField;

/**
 * ShamirSS(N, t) parameters over a field.
 */
typedef struct LsShamir LsShamir;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *ls_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Creates GF(2^l). `poly = 0` selects the built-in irreducible polynomial.
 *
 * # Safety
 * `out_field` must be a valid pointer to writable storage for a handle.
 */
enum LsStatus ls_field_new(uint32_t l, uint32_t poly, struct LsField **out_field);

/**
 * Releases a field handle. NULL is ignored.
 *
 * # Safety
 * `field` must come from [`ls_field_new`] and not be used afterwards.
 */
void ls_field_free(struct LsField *field);

/**
 * Extension degree and modulus of a field.
 *
 * # Safety
 * `field` must be a live handle; the out-pointers must be valid.
 */
enum LsStatus ls_field_info(const struct LsField *field, uint32_t *out_l, uint32_t *out_poly);

/**
 * Product of two elements.
 *
 * # Safety
 * `field` must be a live handle and `out_value` valid.
 */
enum LsStatus ls_field_mul(const struct LsField *field,
                           uint32_t a,
                           uint32_t b,
                           uint32_t *out_value);

/**
 * Multiplicative inverse; zero gives `LS_STATUS_DIVISION_BY_ZERO`.
 *
 * # Safety
 * `field` must be a live handle and `out_value` valid.
 */
enum LsStatus ls_field_inv(const struct LsField *field, uint32_t a, uint32_t *out_value);

/**
 * Creates ShamirSS(n, t). `gammas` may be NULL for the points 1..n;
 * otherwise it holds `n` distinct nonzero elements.
 *
 * # Safety
 * `field` must be a live handle, `gammas` NULL or readable for `n`
 * elements, and `out_scheme` valid.
 */
enum LsStatus ls_shamir_new(const struct LsField *field,
                            size_t n,
                            size_t t,
                            const uint32_t *gammas,
                            struct LsShamir **out_scheme);

/**
 * Releases a scheme handle. NULL is ignored.
 *
 * # Safety
 * `scheme` must come from [`ls_shamir_new`] and not be used afterwards.
 */
void ls_shamir_free(struct LsShamir *scheme);

/**
 * Shares `secret` with explicit coefficients `a_1..a_{t-1}`.
 * `shares` must have room for `n` values.
 *
 * # Safety
 * `scheme` must be a live handle; `coeffs` readable for `coeffs_len`
 * values; `shares` writable for `shares_len` values.
 */
enum LsStatus ls_shamir_share(const struct LsShamir *scheme,
                              uint32_t secret,
                              const uint32_t *coeffs,
                              size_t coeffs_len,
                              uint32_t *shares,
                              size_t shares_len);

/**
 * Shares `secret` with coefficients drawn from a seeded generator.
 *
 * # Safety
 * `scheme` must be a live handle and `shares` writable for `shares_len` values.
 */
enum LsStatus ls_shamir_share_seeded(const struct LsShamir *scheme,
                                     uint32_t secret,
                                     uint64_t seed,
                                     uint32_t *shares,
                                     size_t shares_len);

/**
 * Recovers the secret from `count` (point, share) pairs; needs `count >= t`.
 *
 * # Safety
 * `scheme` must be a live handle; `points` and `values` readable for
 * `count` values; `out_secret` valid.
 */
enum LsStatus ls_shamir_reconstruct(const struct LsShamir *scheme,
                                    const uint32_t *points,
                                    const uint32_t *values,
                                    size_t count,
                                    uint32_t *out_secret);

/**
 * Ñ of the scheme's full-set recovery equation.
 *
 * # Safety
 * `scheme` must be a live handle and `out_n_tilde` valid.
 */
enum LsStatus ls_shamir_n_tilde(const struct LsShamir *scheme, size_t *out_n_tilde);

/**
 * Exact `I(S; Z)` and `I(S^i; Z)` when every share bit passes through a
 * BSC with crossover `q`. `prior` holds `2^l` probabilities; NULL means
 * uniform. `per_bit` receives `l` values and may be NULL.
 *
 * # Safety
 * `scheme` must be a live handle; `prior` NULL or readable for `prior_len`
 * values; `per_bit` NULL or writable for `per_bit_len` values.
 */
enum LsStatus ls_shamir_exact_mi_bsc(const struct LsShamir *scheme,
                                     double q,
                                     const double *prior,
                                     size_t prior_len,
                                     double *out_total,
                                     double *per_bit,
                                     size_t per_bit_len);

/**
 * Binary entropy `h(p)` in bits.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum LsStatus ls_binary_entropy(double p, double *out_value);

/**
 * Inverse of `h` on `[0, 1/2]`.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum LsStatus ls_binary_entropy_inv(double y, double *out_value);

/**
 * `δ = 1 − 2 h⁻¹(1 − ε)`.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum LsStatus ls_delta_from_eps(double eps, double *out_value);

/**
 * Per-bit bound `δ^{2(Ñ − t')}`.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum LsStatus ls_bound_bitwise(size_t n_tilde, size_t t_prime, double eps, double *out_value);

/**
 * Parses a TOML experiment description and writes the bound report as a
 * JSON string. Free the result with [`ls_string_free`].
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out_json` valid.
 */
enum LsStatus ls_analyze_toml(const char *config_toml, char **out_json);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ls_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEAKSHARE_H */
