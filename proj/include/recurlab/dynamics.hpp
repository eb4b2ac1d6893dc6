// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Recurrence analytics that work for any Operator: return sets over balls,
// greedy quasi-rigidity search, tuple probes, periods and commutant checks.

#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recurlab/natset.hpp"
#include "recurlab/opcore.hpp"

namespace recurlab {

/// {n in [0, horizon] : ||T^n x - x|| < eps}.
NatSet returnSet(const Operator& op, const Vec& x, double eps, Nat horizon);
/// Candidates n with ||T^n x - x|| < eps, in the given order.
std::vector<mpz_class> returnTimes(const Operator& op, const Vec& x, double eps,
                                   const std::vector<mpz_class>& candidates);

struct QrWitness {
  std::vector<mpz_class> times;
  /// defects[s][k - s] = ||T^{n_k} x_s - x_s|| for k >= s (0-based s, k).
  std::vector<std::vector<double>> defects;
};

struct QrFailure {
  std::vector<mpz_class> prefix;  // times found before the search got stuck
  std::size_t k = 0;              // 1-based step that could not be completed
  std::size_t s = 0;              // least sample count no candidate satisfies
  std::size_t candidatesTried = 0;
  bool certified = false;          // impossibility proven, not just budget exhaustion
  std::optional<double> certifiedMin;  // min over candidates of max_i ||T^n e_i - e_i||
  std::optional<double> centerBound;   // 1/(K pi)
  std::string reason;
};

struct QrResult {
  bool success = false;
  QrWitness witness;
  QrFailure failure;
};

/// Greedy n_1 < n_2 < ... with ||T^{n_k} x_s - x_s|| < tol_k for every s <= k,
/// drawn from op.candidateTimes(timeBudget).
QrResult quasiRigiditySearch(const Operator& op, const std::vector<Vec>& samples, const std::vector<double>& tolSchedule,
                             const mpz_class& timeBudget);

/// Least candidate n >= 1 returning every tuple member to its eps-ball.
std::optional<mpz_class> tupleRecurrenceProbe(const Operator& op, const std::vector<Vec>& tuple, double eps,
                                              const std::vector<mpz_class>& candidates);

/// {n / p : n in a, p | n} with horizon floor(H / p).
NatSet subsampleReturnSet(const NatSet& a, Nat p);

struct PeriodClassification {
  std::optional<Nat> periodBound;   // floor(1/delta) when upperBanachEst >= delta
  std::optional<Nat> pairWindow;    // start of a window of length bound+1 with two returns
  bool fixedPoint = false;          // two consecutive returns
};
PeriodClassification classifyPeriodByDensity(const NatSet& a, const DensityReport& report, const mpq_class& delta);

/// Least p <= maxPeriod with ||T^p x - x|| < eps.
std::optional<Nat> detectPeriod(const Operator& op, const Vec& x, double eps, Nat maxPeriod);

struct CommutantCheck {
  bool holds = true;
  std::optional<Nat> violation;
  double L = 0.0;         // upper bound for ||p(T)||
  std::size_t inner = 0;  // |N_T(x, eps/L)|
  std::size_t outer = 0;  // |N_T(Sx, eps)|
};
/// N_T(x, eps/L) subset of N_T(Sx, eps) over [0, horizon] for S = p(T).
CommutantCheck commutantReturnInclusion(std::shared_ptr<const Operator> op, const Vec& x,
                                        const std::vector<Complex>& poly, double eps, Nat horizon);

}  // namespace recurlab
