// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/recurlab.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "recurlab/auge.hpp"
#include "recurlab/dynamics.hpp"
#include "recurlab/error.hpp"
#include "recurlab/experiment.hpp"
#include "recurlab/json_io.hpp"

struct rl_natset {
  recurlab::NatSet set;
};

struct rl_operator {
  std::shared_ptr<const recurlab::Operator> op;
};

namespace {

thread_local std::string lastError;

char* dupString(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs f, translating exceptions into status codes and a thread-local message.
template <class F>
rl_status guarded(F&& f) {
  lastError.clear();
  try {
    f();
    return RL_OK;
  } catch (const recurlab::Error& e) {
    lastError = e.what();
    return static_cast<rl_status>(e.code());
  } catch (const std::out_of_range& e) {
    lastError = e.what();
    return RL_OUT_OF_RANGE;
  } catch (const nlohmann::json::exception& e) {
    lastError = e.what();
    return RL_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    lastError = e.what();
    return RL_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    lastError = e.what();
    return RL_INTERNAL;
  } catch (...) {
    lastError = "unknown failure";
    return RL_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) recurlab::fail(recurlab::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

recurlab::Vec readVec(const rl_operator* op, const double* x, size_t dim) {
  need(x, "x");
  if (dim != op->op->dimCap()) recurlab::fail(recurlab::ErrorCode::InvalidArgument, "dim differs from operator dimCap");
  recurlab::Vec v(dim, op->op->normKind());
  for (size_t i = 0; i < dim; ++i) v.coords()[i] = {x[2 * i], x[2 * i + 1]};
  return v;
}

void writeVec(const recurlab::Vec& v, double* y) {
  for (size_t i = 0; i < v.dimCap(); ++i) {
    y[2 * i] = v.coords()[i].real();
    y[2 * i + 1] = v.coords()[i].imag();
  }
}

mpz_class readBig(const char* n) {
  need(n, "n");
  mpz_class v;
  if (v.set_str(n, 10) != 0 || v < 0)
    recurlab::fail(recurlab::ErrorCode::InvalidArgument, "n must be a non-negative decimal integer");
  return v;
}

const recurlab::AugeOperator& augeOf(const rl_operator* op) {
  need(op, "op");
  const auto* a = dynamic_cast<const recurlab::AugeOperator*>(op->op.get());
  if (!a) recurlab::fail(recurlab::ErrorCode::Unsupported, "operator is not an auge operator");
  return *a;
}

}  // namespace

extern "C" {

const char* rl_version(void) { return "0.1.0"; }
const char* rl_last_error(void) { return lastError.c_str(); }
void rl_free_string(char* s) { std::free(s); }

rl_status rl_natset_materialize(const char* generator_json, uint64_t horizon, rl_natset** out) {
  return guarded([&] {
    need(generator_json, "generator_json");
    need(out, "out");
    auto g = recurlab::generatorFromJson(recurlab::Json::parse(generator_json));
    *out = new rl_natset{recurlab::materialize(g, horizon)};
  });
}

rl_status rl_natset_from_elements(const uint64_t* elements, size_t count, uint64_t horizon, rl_natset** out) {
  return guarded([&] {
    need(out, "out");
    if (count) need(elements, "elements");
    *out = new rl_natset{recurlab::NatSet::fromUnsorted(std::vector<uint64_t>(elements, elements + count), horizon)};
  });
}

void rl_natset_free(rl_natset* s) { delete s; }
size_t rl_natset_size(const rl_natset* s) { return s ? s->set.size() : 0; }
uint64_t rl_natset_horizon(const rl_natset* s) { return s ? s->set.horizon() : 0; }
int rl_natset_contains(const rl_natset* s, uint64_t n) { return s && s->set.contains(n) ? 1 : 0; }

rl_status rl_natset_elements(const rl_natset* s, uint64_t* buf, size_t cap, size_t* written) {
  return guarded([&] {
    need(s, "set");
    need(written, "written");
    if (cap) need(buf, "buf");
    const size_t n = std::min(cap, s->set.size());
    std::copy_n(s->set.elements().begin(), n, buf);
    *written = n;
  });
}

rl_status rl_natset_density_json(const rl_natset* s, uint64_t window, char** out_json) {
  return guarded([&] {
    need(s, "set");
    need(out_json, "out_json");
    *out_json = dupString(recurlab::toJson(recurlab::densityProfile(s->set, window)).dump());
  });
}

rl_status rl_natset_difference(const rl_natset* s, rl_natset** out) {
  return guarded([&] {
    need(s, "set");
    need(out, "out");
    *out = new rl_natset{recurlab::differenceSet(s->set)};
  });
}

rl_status rl_natset_ap(const rl_natset* s, uint64_t length, int* found, uint64_t* start, uint64_t* diff) {
  return guarded([&] {
    need(s, "set");
    need(found, "found");
    auto w = recurlab::containsApOfLength(s->set, length);
    *found = w ? 1 : 0;
    if (w && start) *start = w->start;
    if (w && diff) *diff = w->diff;
  });
}

rl_status rl_operator_new(const char* descriptor_json, rl_operator** out) {
  return guarded([&] {
    need(descriptor_json, "descriptor_json");
    need(out, "out");
    *out = new rl_operator{recurlab::operatorFromJson(recurlab::Json::parse(descriptor_json))};
  });
}

void rl_operator_free(rl_operator* op) { delete op; }
size_t rl_operator_dim(const rl_operator* op) { return op ? op->op->dimCap() : 0; }

rl_status rl_operator_descriptor(const rl_operator* op, char** out_json) {
  return guarded([&] {
    need(op, "op");
    need(out_json, "out_json");
    *out_json = dupString(op->op->descriptor());
  });
}

rl_status rl_operator_apply(const rl_operator* op, const double* x, size_t dim, double* y) {
  return guarded([&] {
    need(op, "op");
    need(y, "y");
    writeVec(op->op->apply(readVec(op, x, dim)).image, y);
  });
}

rl_status rl_operator_power(const rl_operator* op, const char* n, const double* x, size_t dim, double* y) {
  return guarded([&] {
    need(op, "op");
    need(y, "y");
    writeVec(op->op->power(readBig(n), readVec(op, x, dim)).image, y);
  });
}

rl_status rl_operator_krylov_rank(const rl_operator* op, const double* x, size_t dim, size_t depth, double tol,
                                  size_t* rank) {
  return guarded([&] {
    need(op, "op");
    need(rank, "rank");
    *rank = recurlab::krylovRank(*op->op, readVec(op, x, dim), depth, tol);
  });
}

rl_status rl_operator_return_set(const rl_operator* op, const double* x, size_t dim, double eps, uint64_t horizon,
                                 rl_natset** out) {
  return guarded([&] {
    need(op, "op");
    need(out, "out");
    *out = new rl_natset{recurlab::returnSet(*op->op, readVec(op, x, dim), eps, horizon)};
  });
}

rl_status rl_auge_lambda(const rl_operator* op, size_t k, const char* n, double* re, double* im) {
  return guarded([&] {
    need(re, "re");
    need(im, "im");
    const auto z = augeOf(op).lambdaKn(k, readBig(n)).value();
    *re = z.real();
    *im = z.imag();
  });
}

rl_status rl_auge_nonrecurrence(const rl_operator* op, uint64_t head, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    const auto& a = augeOf(op);
    const auto cands = recurlab::latticeCandidates(a.modulus(), a.modulus().m(a.levels()) / 2, head);
    const auto r = recurlab::nonRecurrenceScan(a, cands);
    recurlab::Json j{{"minOverN", r.minOverN},
                     {"argmin", r.argmin.get_str()},
                     {"scanned", r.scanned},
                     {"centerBound", r.centerBound}};
    *out_json = dupString(j.dump());
  });
}

rl_status rl_config_validate(const char* config_json, char** diagnostics_json) {
  bool ok = false;
  const rl_status st = guarded([&] {
    need(config_json, "config_json");
    const auto v = recurlab::validateConfig(std::string(config_json));
    ok = v.ok;
    if (diagnostics_json) *diagnostics_json = dupString(recurlab::toJson(v.diagnostics).dump());
    if (!ok) {
      std::string msg = "invalid config:";
      for (const auto& d : v.diagnostics) msg += " " + d.path + ": " + d.message + ";";
      lastError = msg;
    }
  });
  if (st != RL_OK) return st;
  return ok ? RL_OK : RL_CONFIG;
}

rl_status rl_experiment_run(const char* config_json, const char* out_dir, char** record_json) {
  return guarded([&] {
    need(config_json, "config_json");
    recurlab::Json cfg;
    try {
      cfg = recurlab::Json::parse(config_json);
    } catch (const std::exception& e) {
      recurlab::fail(recurlab::ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
    }
    auto r = recurlab::runExperiment(cfg, out_dir ? out_dir : "");
    if (record_json) *record_json = dupString(r.record.dump());
  });
}

}  // extern "C"
