// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// The recurrent but not quasi-rigid operator
//
//   T x = R x + sum_{k >= N+2} (1 / m_{k-1}) <w_k*, P x> e_k
//
// with R = diag(exp(2 pi i / m_k)), P the projection onto e_1..e_{N+1} and
// (w_k*) a dense sequence in the sup-norm sphere of span{e_1*, ..., e_{N+1}*}.
// T^{oplus N} is recurrent while T^{oplus (N+1)} is not.

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recurlab/opcore.hpp"

namespace recurlab {

inline constexpr const char* kDefaultGrowthRule = "pow2k2-ksq";

/// g(k) with m_{k+1} = m_k g(k) for k >= N+1. Known rules:
///   "pow2k2-ksq"  g(k) = 2^{k+2} k^2   (default)
///   "pow2k2-k"    g(k) = 2^{k+2} k
mpz_class growthFactor(const std::string& rule, std::size_t k);
bool isKnownGrowthRule(const std::string& rule);

class ModulusSequence {
 public:
  static ModulusSequence build(std::size_t foldN, std::size_t levels, const std::string& rule = kDefaultGrowthRule);

  std::size_t foldN() const { return foldN_; }
  std::size_t levels() const { return m_.size(); }
  const std::string& rule() const { return rule_; }
  /// m_k for 1 <= k <= levels.
  const mpz_class& m(std::size_t k) const;
  /// m_{k+1} / m_k, extended past the last level by the growth rule.
  mpz_class growth(std::size_t k) const;

  /// m_j * sum_{k=j+1}^{levels} 1/m_k, exactly.
  mpq_class certificate(std::size_t j) const;
  /// Rational upper bound for m_j * sum_{k > levels} 1/m_k under the growth rule.
  mpq_class tailBound(std::size_t j) const;
  /// certificate(j) + tailBound(j).
  mpq_class certBound(std::size_t j) const;
  /// 2 pi K certBound(j).
  double rigidityBound(std::size_t j, double K = 1.0) const;
  /// Upper bound for sum_{k > levels} 1/m_{k-1}.
  double inverseTail() const;

  /// Checks divisibility, the head of ones and the inductive condition
  /// g(j) >= 2^{j+1} (j >= N+1) that yields certBound(j) <= 2^{-j}.
  bool certified() const { return certified_; }

 private:
  std::size_t foldN_ = 0;
  std::string rule_;
  std::vector<mpz_class> m_;
  bool certified_ = false;
};

/// One functional w* = sum_j alpha_j e_j*, stored in polar form.
struct GridEntry {
  std::vector<double> modulus;
  std::vector<unsigned long> phaseNum, phaseDen;  // phase = phaseNum / phaseDen turns
  std::vector<Complex> alpha;
};

class FunctionalGrid {
 public:
  std::size_t foldN() const { return foldN_; }
  std::size_t size() const { return entries_.size(); }
  const GridEntry& entry(std::size_t e) const { return entries_.at(e); }
  /// Entry bound to modulus level k (k >= N+2).
  const GridEntry& atLevel(std::size_t k) const;
  /// Covering radius (sup norm on the sphere) of the entries bound to levels N+2..k.
  double meshOf(std::size_t k) const;
  const std::vector<mpq_class>& meshSchedule() const { return mesh_; }
  /// Entry counts at which each net is complete.
  const std::vector<std::size_t>& netEnds() const { return netEnds_; }
  double normEquivLower() const { return 1.0; }
  double normEquivUpper() const { return upper_; }

  friend FunctionalGrid buildGrid(std::size_t, const std::vector<mpq_class>&, std::optional<std::size_t>, NormKind);

 private:
  std::size_t foldN_ = 0;
  std::vector<GridEntry> entries_;
  std::vector<mpq_class> mesh_;
  std::vector<std::size_t> netEnds_;
  double upper_ = 1.0;
};

/// Concatenated polar tau-nets of the sup-norm sphere in C^{N+1}, one per mesh
/// value, truncated to `entries` when given. Norm constants follow `nk`.
FunctionalGrid buildGrid(std::size_t foldN, const std::vector<mpq_class>& meshLevels,
                         std::optional<std::size_t> entries = std::nullopt, NormKind nk = NormKind{});

/// Number of entries in a single tau-net.
std::size_t netSize(std::size_t foldN, const mpq_class& tau);

struct AugeDescriptor {
  std::size_t foldN = 1;
  std::size_t levels = 20;
  std::string growthRule = kDefaultGrowthRule;
  std::vector<mpq_class> meshSchedule{mpq_class(1), mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8)};
  std::size_t dimCap = 20;
  NormKind normKind;

  std::string toJson() const;
  static AugeDescriptor fromJson(const std::string& text);
};

/// lambda_{k,n} = sum_{l<n} lambda_k^l in polar form.
struct LambdaValue {
  bool exactZero = false;
  double modulus = 0.0;
  double phase = 0.0;  // radians
  Complex value() const;
};

/// Residues n mod m_k for every level, computed top-down.
struct PowerPlan {
  mpz_class n;
  std::vector<mpz_class> r;  // r[k-1] = n mod m_k
};

class AugeRotation;

class AugeOperator : public Operator {
 public:
  explicit AugeOperator(const AugeDescriptor& d);

  const AugeDescriptor& spec() const { return d_; }
  std::size_t foldN() const { return d_.foldN; }
  std::size_t levels() const { return mod_->levels(); }
  const ModulusSequence& modulus() const { return *mod_; }
  const FunctionalGrid& grid() const { return grid_; }
  const BasisSystem& basis() const { return basis_; }
  std::size_t dimCap() const override { return d_.dimCap; }
  NormKind normKind() const override { return d_.normKind; }

  /// <w_k*, P x>.
  Complex functionalValue(std::size_t k, const Vec& x) const;
  LambdaValue lambdaKn(std::size_t k, const mpz_class& n) const;
  /// lambda_{k,n} / m_{k-1}, evaluated without overflow.
  Complex scaledLambda(std::size_t k, const mpz_class& r) const;
  PowerPlan plan(const mpz_class& n) const;

  Applied apply(const Vec& x) const override;
  Applied power(const mpz_class& n, const Vec& x) const override;
  Vec displacement(const mpz_class& n, const Vec& x) const override;
  Vec displacement(const PowerPlan& p, const Vec& x) const;
  /// Bound on what the truncation at `levels` omits from T^n x.
  double tailBound(const mpz_class& n, const Vec& x) const;
  double normBound() const override;
  /// M (N+1) K sum_{k=N+2}^{levels} 1/m_{k-1}.
  double perturbationBound() const;
  std::string descriptor() const override;
  /// Linear head 1..10^4 together with the lattice c m_j + {-1, 0, 1}
  /// (c | g(j), c <= 64), limited to 2n <= m_levels.
  std::vector<mpz_class> candidateTimes(const mpz_class& budget) const override;
  /// The rotation R alone.
  std::shared_ptr<AugeRotation> rotation() const;

 private:
  AugeDescriptor d_;
  std::shared_ptr<const ModulusSequence> mod_;
  FunctionalGrid grid_;
  BasisSystem basis_;
  std::vector<double> growthRatio_;  // m_k / m_{k-1} as double, index k-1
  std::vector<double> sinOne_;       // sin(pi / m_k), index k-1
};

class AugeRotation : public Operator {
 public:
  AugeRotation(std::shared_ptr<const ModulusSequence> mod, std::size_t dimCap, NormKind nk);
  std::size_t dimCap() const override { return dim_; }
  NormKind normKind() const override { return nk_; }
  Applied apply(const Vec& x) const override { return power(1, x); }
  Applied power(const mpz_class& n, const Vec& x) const override;
  Vec displacement(const mpz_class& n, const Vec& x) const override;
  double normBound() const override { return 1.0; }
  std::string descriptor() const override;
  std::vector<mpz_class> candidateTimes(const mpz_class& budget) const override;
  const ModulusSequence& modulus() const { return *mod_; }

 private:
  std::shared_ptr<const ModulusSequence> mod_;
  std::size_t dim_;
  NormKind nk_;
};

/// Times from 1..min(head, budget) and the m_j lattice, sorted and unique.
std::vector<mpz_class> latticeCandidates(const ModulusSequence& mod, const mpz_class& budget,
                                         unsigned long head = 10000, std::size_t maxLevel = 0);

struct RigidityResult {
  double defect = 0.0;
  double bound = 0.0;
};
RigidityResult rigidityDefect(const AugeOperator& op, std::size_t j, const std::vector<Vec>& sample);

/// Normalized kernel vector of the N x (N+1) head matrix of the tuple.
std::vector<Complex> annihilatingFunctional(const AugeOperator& op, const std::vector<Vec>& tuple);

/// Least index (1-based) of a maximal-modulus entry.
std::size_t findDominantIndex(const std::vector<Complex>& w);

struct RecurrenceStep {
  std::size_t level = 0;        // k
  mpz_class returnTime;         // m_{k-1}
  double gridDistance = 0.0;    // ||w_k* - w*||_inf
  std::vector<double> distances;
};

struct RecurrenceWitness {
  std::vector<Complex> alpha;
  std::vector<RecurrenceStep> steps;
  double finestMesh = 0.0;
};

RecurrenceWitness recurrenceWitness(const AugeOperator& op, const std::vector<Vec>& tuple, double gridTol);

struct NonRecurrenceResult {
  double minOverN = 0.0;
  mpz_class argmin;
  std::size_t scanned = 0;
  /// Center-point target 1/(K pi).
  double centerBound = 0.0;
};

/// min over candidates n >= 1 of max_i ||T^n e_i - e_i||, i = 1..N+1.
NonRecurrenceResult nonRecurrenceScan(const AugeOperator& op, const std::vector<mpz_class>& candidates);
/// max_i ||T^n e_i - e_i|| for a single n.
double headDefect(const AugeOperator& op, const mpz_class& n);
/// Ball form of the non-recurrence bound: 1/(K pi) - ((N+1+pi)/pi) eps.
double ballThreshold(const AugeOperator& op, double eps);

}  // namespace recurlab
