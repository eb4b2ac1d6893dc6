// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"

namespace recurlab {

NatSet returnSet(const Operator& op, const Vec& x, double eps, Nat horizon) {
  require(eps > 0.0, "return radius must be positive");
  std::vector<Nat> hits;
  for (Nat n = 0; n <= horizon; ++n)
    if (n == 0 || op.displacement(mpz_class(n), x).norm() < eps) hits.push_back(n);
  return NatSet(std::move(hits), horizon);
}

std::vector<mpz_class> returnTimes(const Operator& op, const Vec& x, double eps,
                                   const std::vector<mpz_class>& candidates) {
  require(eps > 0.0, "return radius must be positive");
  std::vector<mpz_class> out;
  for (const auto& n : candidates)
    if (n == 0 || op.displacement(n, x).norm() < eps) out.push_back(n);
  return out;
}

namespace {

// Number of leading samples (up to `active`) returned within tol at time n.
std::size_t leadingWithin(const Operator& op, const std::vector<Vec>& samples, std::size_t active, const mpz_class& n,
                          double tol) {
  std::size_t s = 0;
  while (s < active && op.displacement(n, samples[s]).norm() < tol) ++s;
  return s;
}

// When the op is the fold operator and the active samples include e_1..e_{N+1},
// the head defect bound decides the step outright.
void certify(const Operator& op, const std::vector<Vec>& samples, std::size_t active,
             const std::vector<mpz_class>& remaining, double tol, QrFailure& f) {
  const auto* auge = dynamic_cast<const AugeOperator*>(&op);
  if (auge == nullptr || remaining.empty()) return;
  const std::size_t N = auge->foldN();
  for (std::size_t i = 1; i <= N + 1; ++i) {
    const Vec e = Vec::basis(i, auge->dimCap(), auge->normKind());
    bool present = false;
    for (std::size_t s = 0; s < active && !present; ++s) present = samples[s].coords() == e.coords();
    if (!present) return;
  }
  const NonRecurrenceResult scan = nonRecurrenceScan(*auge, remaining);
  f.certifiedMin = scan.minOverN;
  f.centerBound = scan.centerBound;
  if (scan.minOverN >= tol) {
    f.certified = true;
    f.reason = "every candidate keeps some head basis vector at distance >= " + std::to_string(scan.minOverN) +
               " > 1/(K pi) - 1e-9; no common return below tol";
  }
}

}  // namespace

QrResult quasiRigiditySearch(const Operator& op, const std::vector<Vec>& samples, const std::vector<double>& tolSchedule,
                             const mpz_class& timeBudget) {
  require(!samples.empty(), "quasi-rigidity search needs samples");
  require(!tolSchedule.empty(), "tolerance schedule is empty");
  for (std::size_t i = 0; i < tolSchedule.size(); ++i) {
    require(tolSchedule[i] > 0.0, "tolerances must be positive");
    require(i == 0 || tolSchedule[i] <= tolSchedule[i - 1], "tolerance schedule must be non-increasing");
  }
  const std::vector<mpz_class> cands = op.candidateTimes(timeBudget);
  QrResult res;
  std::size_t pos = 0;
  for (std::size_t k = 1; k <= tolSchedule.size(); ++k) {
    const std::size_t active = std::min(k, samples.size());
    const double tol = tolSchedule[k - 1];
    std::size_t bestLead = 0;
    bool found = false;
    const std::size_t start = pos;
    for (; pos < cands.size(); ++pos) {
      const std::size_t lead = leadingWithin(op, samples, active, cands[pos], tol);
      bestLead = std::max(bestLead, lead);
      if (lead == active) {
        found = true;
        break;
      }
    }
    if (!found) {
      QrFailure& f = res.failure;
      f.prefix = res.witness.times;
      f.k = k;
      f.s = bestLead + 1;
      f.candidatesTried = cands.size() - start;
      f.reason = "no candidate time up to the budget satisfies all samples (budget exhaustion)";
      certify(op, samples, active, std::vector<mpz_class>(cands.begin() + static_cast<long>(start), cands.end()), tol, f);
      return res;
    }
    res.witness.times.push_back(cands[pos]);
    ++pos;
  }
  res.success = true;
  const auto& times = res.witness.times;
  res.witness.defects.resize(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (std::size_t k = s; k < times.size(); ++k)
      res.witness.defects[s].push_back(op.displacement(times[k], samples[s]).norm());
  return res;
}

std::optional<mpz_class> tupleRecurrenceProbe(const Operator& op, const std::vector<Vec>& tuple, double eps,
                                              const std::vector<mpz_class>& candidates) {
  require(!tuple.empty(), "tuple is empty");
  require(eps > 0.0, "return radius must be positive");
  for (const auto& n : candidates) {
    if (n < 1) continue;
    bool all = true;
    for (const auto& x : tuple) {
      if (!(op.displacement(n, x).norm() < eps)) {
        all = false;
        break;
      }
    }
    if (all) return n;
  }
  return std::nullopt;
}

NatSet subsampleReturnSet(const NatSet& a, Nat p) {
  require(p >= 1, "subsample factor must be >= 1");
  std::vector<Nat> out;
  for (Nat n : a.elements())
    if (n % p == 0) out.push_back(n / p);
  return NatSet(std::move(out), a.horizon() / p);
}

PeriodClassification classifyPeriodByDensity(const NatSet& a, const DensityReport& report, const mpq_class& delta) {
  if (delta <= 0 || delta > 1) fail(ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
  PeriodClassification c;
  c.fixedPoint = report.containsConsecutivePair;
  if (report.upperBanachEst >= delta) {
    mpz_class inv = delta.get_den() / delta.get_num();  // floor(1/delta)
    c.periodBound = inv.get_ui();
    c.pairWindow = windowPairWitness(a, *c.periodBound + 1);
  }
  return c;
}

std::optional<Nat> detectPeriod(const Operator& op, const Vec& x, double eps, Nat maxPeriod) {
  require(maxPeriod >= 1, "maxPeriod must be >= 1");
  for (Nat p = 1; p <= maxPeriod; ++p)
    if (op.displacement(mpz_class(p), x).norm() < eps) return p;
  return std::nullopt;
}

CommutantCheck commutantReturnInclusion(std::shared_ptr<const Operator> op, const Vec& x,
                                        const std::vector<Complex>& poly, double eps, Nat horizon) {
  require(eps > 0.0, "return radius must be positive");
  require(!poly.empty(), "polynomial is empty");
  const PolynomialOperator S(op, poly);
  CommutantCheck c;
  // Round the floating-point norm bound upward.
  c.L = S.normBound() * (1.0 + 4.0 * DBL_EPSILON * static_cast<double>(poly.size() + 1));
  if (c.L == 0.0) fail(ErrorCode::InvalidArgument, "zero polynomial: norm bound L = 0");
  const Vec sx = S.apply(x).image;
  for (Nat n = 0; n <= horizon; ++n) {
    const mpz_class nn(n);
    const bool in = op->displacement(nn, x).norm() < eps / c.L;
    const bool out = op->displacement(nn, sx).norm() < eps;
    c.inner += in;
    c.outer += out;
    if (in && !out && c.holds) {
      c.holds = false;
      c.violation = n;
    }
  }
  return c;
}

}  // namespace recurlab
