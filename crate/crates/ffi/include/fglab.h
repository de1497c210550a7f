#ifndef FGLAB_H
#define FGLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// `rho` value reported for an element of infinite order.
#define FGLAB_RHO_INFINITE -1

// Result codes.
typedef enum FglabStatus {
  FGLAB_STATUS_OK = 0,
  // A required pointer was null.
  FGLAB_STATUS_NULL_POINTER = 1,
  // Bad argument: unknown name, invalid UTF-8, out-of-range value.
  FGLAB_STATUS_USAGE = 2,
  // Input text did not parse.
  FGLAB_STATUS_PARSE = 3,
  // A computation failed or a check did not hold.
  FGLAB_STATUS_VERIFICATION = 4,
  // A resource guard tripped.
  FGLAB_STATUS_GUARD = 5,
  // Internal failure, including a caught panic.
  FGLAB_STATUS_INTERNAL = 6,
} FglabStatus;

// Formal group law over the rationals.
typedef struct FglabLaw FglabLaw;

// Graded ring presentation.
typedef struct FglabPresentation FglabPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library on this thread.
const char *fglab_last_error(void);

// Library version as a static string.
const char *fglab_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void fglab_string_free(char *s);

// Build a law by family name (`additive`, `multiplicative`, `buchstaber`,
// `tate`, `level2` .. `level6`) through total degree `order`.
//
// # Safety
// `family` must be a valid C string; `out` must be valid for a write.
enum FglabStatus fglab_law_new(const char *family, uint32_t order, struct FglabLaw **out);

// # Safety
// `law` must be null or a handle from [`fglab_law_new`], not yet freed.
void fglab_law_free(struct FglabLaw *law);

// Truncation order of the law, or 0 for a null handle.
//
// # Safety
// `law` must be null or a live handle.
uint32_t fglab_law_order(const struct FglabLaw *law);

// Coefficient `a[i, j]` as an expression string.
//
// # Safety
// `law` must be a live handle; `out` must be valid for a write.
enum FglabStatus fglab_law_coeff(const struct FglabLaw *law, uint32_t i, uint32_t j, char **out);

// Number of nonzero associativity defect coefficients through `order`.
//
// # Safety
// `law` must be a live handle; `out` must be valid for a write.
enum FglabStatus fglab_law_assoc_defect(const struct FglabLaw *law, uint32_t order, uintptr_t *out);

// Coefficient table of the law as JSON.
//
// # Safety
// `law` must be a live handle; `out` must be valid for a write.
enum FglabStatus fglab_law_to_json(const struct FglabLaw *law, char **out);

// Presentation of a coefficient ring (`RB`, `R2`, `R3`, `R4`, `RB/J2` ..
// `RB/J6`) through weight `cutoff`. With `linear` nonzero only the relations
// modulo decomposables are kept, which suffices for [`fglab_rho`].
//
// # Safety
// `ring` must be a valid C string; `out` must be valid for a write.
enum FglabStatus fglab_presentation_new(const char *ring,
                                        uint32_t cutoff,
                                        bool linear,
                                        struct FglabPresentation **out);

// Load a presentation from its JSON form.
//
// # Safety
// `json` must be a valid C string; `out` must be valid for a write.
enum FglabStatus fglab_presentation_from_json(const char *json, struct FglabPresentation **out);

// Presentation as JSON.
//
// # Safety
// `pres` must be a live handle; `out` must be valid for a write.
enum FglabStatus fglab_presentation_to_json(const struct FglabPresentation *pres, char **out);

// # Safety
// `pres` must be null or a live handle, not yet freed.
void fglab_presentation_free(struct FglabPresentation *pres);

// `rho(n)`: order of the class of `e_n` among indecomposables, with
// [`FGLAB_RHO_INFINITE`] for infinite order.
//
// # Safety
// `pres` must be a live handle; `out` must be valid for a write.
enum FglabStatus fglab_rho(const struct FglabPresentation *pres, uint32_t n, int64_t *out);

// Run a command line (without the program name) as the `fglab` binary
// would. The report goes to `out_report` and the process exit code
// (0 ok, 1 verification failed, 2 usage, 3 guard) to `out_exit`.
//
// # Safety
// `argv` must point to `argc` valid C strings; out pointers must be valid.
enum FglabStatus fglab_run_command(const char *const *argv,
                                   uintptr_t argc,
                                   char **out_report,
                                   int32_t *out_exit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FGLAB_H */
