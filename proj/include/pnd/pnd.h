// Copyright 2026 The pnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the pnd library. All handles are opaque; every function
 * that can fail returns a status code and leaves a message readable through
 * pnd_last_error() on the calling thread. */

#ifndef PND_PND_H_
#define PND_PND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PND_BUILDING_LIBRARY)
#define PND_API __declspec(dllexport)
#else
#define PND_API __declspec(dllimport)
#endif
#else
#define PND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. They double as the command-line exit codes. */
#define PND_OK 0
#define PND_ERR_GENERAL 1
#define PND_ERR_INFEASIBLE 2
#define PND_ERR_RESONANCE 3
#define PND_ERR_TOLERANCE 4

typedef struct pnd_result pnd_result;
typedef struct pnd_drive pnd_drive;

typedef struct pnd_run_options {
  int has_seed;         /* nonzero: seed overrides the config */
  uint64_t seed;
  int threads;          /* <= 0 means 1 */
  const char* base_dir; /* relative paths in the config; may be NULL */
} pnd_run_options;

PND_API const char* pnd_version(void);

/* Message for the last failure on this thread, "" if none. */
PND_API const char* pnd_last_error(void);

/* Runs "optimize", "verify" or "simulate" on a JSON config. On PND_OK the
 * result holds the output files and the command verdict (pnd_result_status).
 * On failure *out may still carry diagnostics; free it either way.
 * Concurrent calls are allowed and run one at a time. */
PND_API int pnd_run(const char* command, const char* config_json, const pnd_run_options* options, pnd_result** out);

PND_API int pnd_result_status(const pnd_result* result);
PND_API size_t pnd_result_file_count(const pnd_result* result);
PND_API const char* pnd_result_file_name(const pnd_result* result, size_t index);
/* Not NUL-safe for binary data; size gives the exact length. */
PND_API const char* pnd_result_file_data(const pnd_result* result, size_t index, size_t* size);
PND_API size_t pnd_result_diagnostic_count(const pnd_result* result);
PND_API const char* pnd_result_diagnostic(const pnd_result* result, size_t index);
PND_API void pnd_result_free(pnd_result* result);

/* Drive handles. Frequencies as omega / 2 pi. */
PND_API int pnd_drive_create(double chi_mhz, double kerr_khz, double chi_prime_khz, int n_cut, pnd_drive** out);
PND_API int pnd_drive_from_json(const char* drive_json, pnd_drive** out);
PND_API int pnd_drive_add_tone(pnd_drive* drive, int m, double omega_re_over_chi, double omega_im_over_chi, int64_t delta_num,
                               int64_t delta_den);
/* order 2 or 4; energies E_n / 2 pi in kHz for n = 0..n_cut. *count gets
 * n_cut + 1 even when capacity is too small (then PND_ERR_GENERAL). */
PND_API int pnd_drive_spectrum(const pnd_drive* drive, int order, double* energies_khz, size_t capacity, size_t* count);
PND_API int pnd_drive_micromotion_period(const pnd_drive* drive, double* t_m_us);
PND_API void pnd_drive_free(pnd_drive* drive);

#ifdef __cplusplus
}
#endif

#endif /* PND_PND_H_ */
