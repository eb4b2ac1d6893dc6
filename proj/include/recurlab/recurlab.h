/* Copyright (c) 2026 The recurlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
 */

/* Stable C interface to recurlab. Handles are opaque; every call that can fail
 * returns an rl_status and leaves a message in rl_last_error() (per thread).
 * Strings returned through char** are owned by the caller and released with
 * rl_free_string. Complex vectors are interleaved doubles: re1, im1, re2, ... */

#ifndef RECURLAB_H
#define RECURLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(RECURLAB_BUILDING)
#define RL_API __attribute__((visibility("default")))
#else
#define RL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_INVALID_ARGUMENT = 1,
  RL_OUT_OF_RANGE = 2,
  RL_UNSUPPORTED = 3,
  RL_CONFIG = 4,
  RL_INTERNAL = 5
} rl_status;

typedef struct rl_natset rl_natset;
typedef struct rl_operator rl_operator;

RL_API const char* rl_version(void);
/* Message of the last failing call on this thread; empty after success. */
RL_API const char* rl_last_error(void);
RL_API void rl_free_string(char* s);

/* Finite sets of naturals, represented exactly up to a horizon. */
RL_API rl_status rl_natset_materialize(const char* generator_json, uint64_t horizon, rl_natset** out);
RL_API rl_status rl_natset_from_elements(const uint64_t* elements, size_t count, uint64_t horizon, rl_natset** out);
RL_API void rl_natset_free(rl_natset* s);
RL_API size_t rl_natset_size(const rl_natset* s);
RL_API uint64_t rl_natset_horizon(const rl_natset* s);
/* Copies up to cap elements in increasing order; *written gets the count copied. */
RL_API rl_status rl_natset_elements(const rl_natset* s, uint64_t* buf, size_t cap, size_t* written);
RL_API int rl_natset_contains(const rl_natset* s, uint64_t n);
RL_API rl_status rl_natset_density_json(const rl_natset* s, uint64_t window, char** out_json);
RL_API rl_status rl_natset_difference(const rl_natset* s, rl_natset** out);
/* *found is 1 when an l-term progression exists; start/diff give the least one. */
RL_API rl_status rl_natset_ap(const rl_natset* s, uint64_t length, int* found, uint64_t* start, uint64_t* diff);

/* Operators built from JSON descriptors (see docs/schema.md). */
RL_API rl_status rl_operator_new(const char* descriptor_json, rl_operator** out);
RL_API void rl_operator_free(rl_operator* op);
RL_API size_t rl_operator_dim(const rl_operator* op);
RL_API rl_status rl_operator_descriptor(const rl_operator* op, char** out_json);
/* x and y hold 2*dim doubles; dim must equal rl_operator_dim. */
RL_API rl_status rl_operator_apply(const rl_operator* op, const double* x, size_t dim, double* y);
/* n is a non-negative decimal integer of any size. */
RL_API rl_status rl_operator_power(const rl_operator* op, const char* n, const double* x, size_t dim, double* y);
RL_API rl_status rl_operator_krylov_rank(const rl_operator* op, const double* x, size_t dim, size_t depth, double tol,
                                         size_t* rank);
RL_API rl_status rl_operator_return_set(const rl_operator* op, const double* x, size_t dim, double eps, uint64_t horizon,
                                        rl_natset** out);

/* Auge-only queries; RL_UNSUPPORTED for other operators. */
RL_API rl_status rl_auge_lambda(const rl_operator* op, size_t k, const char* n, double* re, double* im);
RL_API rl_status rl_auge_nonrecurrence(const rl_operator* op, uint64_t head, char** out_json);

/* Config checking and experiment runs. rl_config_validate returns RL_CONFIG
 * for an invalid config and fills diagnostics_json with [{path, message}]. */
RL_API rl_status rl_config_validate(const char* config_json, char** diagnostics_json);
RL_API rl_status rl_experiment_run(const char* config_json, const char* out_dir, char** record_json);

#ifdef __cplusplus
}
#endif

#endif /* RECURLAB_H */
