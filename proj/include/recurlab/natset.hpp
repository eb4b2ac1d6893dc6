// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Finite subsets of N0 observed up to a horizon, the generators that realize
// the standard Furstenberg families, and exact density statistics.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace recurlab {

using Nat = std::uint64_t;

/// Sorted, duplicate-free subset of [0, horizon]. Immutable once built.
class NatSet {
 public:
  NatSet() = default;
  /// Elements must be strictly increasing and bounded by the horizon.
  NatSet(std::vector<Nat> elements, Nat horizon);
  /// Sorts, deduplicates and drops everything above the horizon.
  static NatSet fromUnsorted(std::vector<Nat> values, Nat horizon);
  /// The whole interval [0, horizon].
  static NatSet interval(Nat horizon);

  const std::vector<Nat>& elements() const { return elements_; }
  Nat horizon() const { return horizon_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  bool contains(Nat n) const;
  /// Membership flags for 0..horizon.
  std::vector<char> indicator() const;
  /// Same elements, observed at a smaller horizon.
  NatSet restrictTo(Nat horizon) const;
  bool isSubsetOf(const NatSet& other) const;

  bool operator==(const NatSet&) const = default;

 private:
  std::vector<Nat> elements_;
  Nat horizon_ = 0;
};

struct SetGenerator;

namespace gen {
struct Explicit {
  std::vector<Nat> values;
};
/// {start + k*diff : k >= 0}; diff 0 gives the singleton {start}.
struct ArithmeticProgression {
  Nat start = 0;
  Nat diff = 1;
};
struct Multiples {
  Nat p = 1;
};
/// Finite sums over nonempty subsets of the generator list.
struct IpClosure {
  std::vector<Nat> generators;
};
/// Positive differences of the base set.
struct DeltaOf {
  NatSet base;
};
/// {n : |exp(2 pi i n / m) - 1| < eps}.
struct RotationReturn {
  mpz_class m = 1;
  double eps = 0.0;
};
struct Union {
  std::vector<SetGenerator> parts;
};
struct Intersection {
  std::vector<SetGenerator> parts;
};
}  // namespace gen

struct SetGenerator {
  using Variant = std::variant<gen::Explicit, gen::ArithmeticProgression, gen::Multiples, gen::IpClosure,
                               gen::DeltaOf, gen::RotationReturn, gen::Union, gen::Intersection>;
  Variant v;
};

NatSet materialize(const SetGenerator& g, Nat horizon);

struct DensityReport {
  Nat horizon = 0;
  Nat window = 0;
  mpq_class upperDensityEst, lowerDensityEst;
  mpq_class upperBanachEst, lowerBanachEst;
  /// Longest run of non-members in [0, horizon]; present when the set is
  /// nonempty and the run is shorter than the window.
  std::optional<Nat> syndeticGap;
  Nat maxRun = 0;
  Nat maxApLength = 0;
  bool containsConsecutivePair = false;
};

/// Banach estimates scan the windows [n+1, n+W] for 0 <= n <= H-W.
/// Density estimates scan the prefixes [1, N] for N = W, 2W, ..., floor(H/W)W,
/// which keeps the chain lowerBanach <= lower <= upper <= upperBanach exact.
DensityReport densityProfile(const NatSet& a, Nat window);

/// Lower bound on lowerBanachEst implied by a syndetic gap g: 1/(g+1) - 1/W.
mpq_class syndeticLowerBound(const DensityReport& r);

/// Longest arithmetic progression (difference >= 1) inside the set.
Nat maxApLength(const NatSet& a);
/// Longest block of consecutive members.
Nat maxRun(const NatSet& a);

struct ApWitness {
  Nat start = 0;
  Nat diff = 0;
};
/// First (start, diff) in lexicographic order with start + k*diff in a for k < l.
std::optional<ApWitness> containsApOfLength(const NatSet& a, Nat l);

NatSet differenceSet(const NatSet& a);

/// Least s with at least two elements of a in [s+1, s+n].
std::optional<Nat> windowPairWitness(const NatSet& a, Nat n);

struct CofiniteReport {
  bool holds = false;
  Nat cutoff = 0;
  std::optional<Nat> firstMissing;
  std::string note;
};
/// Every element of a above the cutoff lies in b. Default cutoff: horizon / 2.
CofiniteReport cofiniteInA(const NatSet& b, const NatSet& a, std::optional<Nat> cutoff = std::nullopt);

}  // namespace recurlab
