// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "recurlab/error.hpp"
#include "recurlab/natset.hpp"

using namespace recurlab;

namespace {

std::vector<Nat> els(const NatSet& s) { return s.elements(); }

NatSet bernoulli(std::mt19937_64& rng, Nat H, double p) {
  std::bernoulli_distribution b(p);
  std::vector<Nat> v;
  for (Nat n = 0; n <= H; ++n)
    if (b(rng)) v.push_back(n);
  return NatSet(v, H);
}

}  // namespace

TEST_CASE("materialize basic generators") {
  CHECK(els(materialize({gen::Multiples{3}}, 10)) == std::vector<Nat>{0, 3, 6, 9});
  CHECK(els(materialize({gen::DeltaOf{NatSet({0, 1, 3}, 3)}}, 10)) == std::vector<Nat>{1, 2, 3});
  CHECK(els(materialize({gen::IpClosure{{1, 2, 4}}}, 10)) == oracle::subsetSums({1, 2, 4}, 10));
  CHECK(els(materialize({gen::IpClosure{{1, 2, 4}}}, 10)) == std::vector<Nat>{1, 2, 3, 4, 5, 6, 7});
  CHECK(els(materialize({gen::ArithmeticProgression{2, 5}}, 20)) == std::vector<Nat>{2, 7, 12, 17});
  CHECK(els(materialize({gen::Explicit{{9, 1, 4, 1, 30}}}, 10)) == std::vector<Nat>{1, 4, 9});
}

TEST_CASE("ip closure matches subset sums on random generators") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Nat> d(1, 40);
  for (int t = 0; t < 30; ++t) {
    std::vector<Nat> g(6);
    for (auto& x : g) x = d(rng);
    CHECK(els(materialize({gen::IpClosure{g}}, 150)) == oracle::subsetSums(g, 150));
  }
  CHECK_THROWS_AS(materialize({gen::IpClosure{}}, 10), Error);
}

TEST_CASE("union, intersection and rotation returns") {
  SetGenerator u{gen::Union{{{gen::Multiples{2}}, {gen::Multiples{3}}}}};
  SetGenerator i{gen::Intersection{{{gen::Multiples{2}}, {gen::Multiples{3}}}}};
  CHECK(els(materialize(u, 9)) == std::vector<Nat>{0, 2, 3, 4, 6, 8, 9});
  CHECK(els(materialize(i, 13)) == std::vector<Nat>{0, 6, 12});
  CHECK_THROWS_AS(materialize({gen::Intersection{}}, 5), Error);

  // |e^{2 pi i n/6} - 1| < 1.01 holds for n = 0, +-1 mod 6.
  CHECK(els(materialize({gen::RotationReturn{6, 1.01}}, 13)) == std::vector<Nat>{0, 1, 5, 6, 7, 11, 12, 13});
  CHECK(materialize({gen::RotationReturn{8, 2.001}}, 40) == NatSet::interval(40));
  // exact boundary: n = m/2 gives distance exactly 2, excluded by the strict inequality
  CHECK_FALSE(materialize({gen::RotationReturn{8, 2.0}}, 40).contains(4));
}

TEST_CASE("materialize is a prefix in the horizon") {
  std::vector<SetGenerator> gs{{gen::Multiples{7}}, {gen::IpClosure{{3, 5, 11}}}, {gen::RotationReturn{13, 0.5}},
                               {gen::ArithmeticProgression{4, 9}}};
  for (const auto& g : gs) CHECK(materialize(g, 60) == materialize(g, 200).restrictTo(60));
}

TEST_CASE("density profile examples") {
  const auto full = densityProfile(NatSet::interval(100), 10);
  CHECK(full.upperDensityEst == 1);
  CHECK(full.lowerDensityEst == 1);
  CHECK(full.upperBanachEst == 1);
  CHECK(full.lowerBanachEst == 1);

  const auto m3 = densityProfile(materialize({gen::Multiples{3}}, 99), 30);
  CHECK(m3.lowerBanachEst == mpq_class(1, 3));
  REQUIRE(m3.syndeticGap.has_value());
  CHECK(*m3.syndeticGap == 2);
  CHECK(syndeticLowerBound(m3) <= m3.lowerBanachEst);

  const auto m3b = densityProfile(materialize({gen::Multiples{3}}, 999), 30);
  CHECK(m3b.upperDensityEst == mpq_class(1, 3));
  CHECK(m3b.lowerDensityEst == mpq_class(1, 3));
}

TEST_CASE("density estimates equal the brute-force scan and form a chain") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const NatSet a = bernoulli(rng, 400, 0.4);
    const auto r = densityProfile(a, 20);
    const auto o = oracle::densities(a.elements(), 400, 20);
    CHECK(r.upperDensityEst == o.upper);
    CHECK(r.lowerDensityEst == o.lower);
    CHECK(r.upperBanachEst == o.upperBanach);
    CHECK(r.lowerBanachEst == o.lowerBanach);
    CHECK(r.lowerBanachEst <= r.lowerDensityEst);
    CHECK(r.lowerDensityEst <= r.upperDensityEst);
    CHECK(r.upperDensityEst <= r.upperBanachEst);
  }
}

TEST_CASE("enlarging a set never lowers a density estimate") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const NatSet a = bernoulli(rng, 300, 0.3);
    std::vector<Nat> bigger = a.elements();
    const NatSet extra = bernoulli(rng, 300, 0.1);
    bigger.insert(bigger.end(), extra.elements().begin(), extra.elements().end());
    const NatSet b = NatSet::fromUnsorted(bigger, 300);
    CHECK(a.isSubsetOf(b));
    const auto ra = densityProfile(a, 15), rb = densityProfile(b, 15);
    CHECK(ra.upperDensityEst <= rb.upperDensityEst);
    CHECK(ra.lowerDensityEst <= rb.lowerDensityEst);
    CHECK(ra.upperBanachEst <= rb.upperBanachEst);
    CHECK(ra.lowerBanachEst <= rb.lowerBanachEst);
  }
}

TEST_CASE("arithmetic progressions") {
  auto w = containsApOfLength(materialize({gen::Multiples{5}}, 100), 10);
  REQUIRE(w);
  CHECK(w->start == 0);
  CHECK(w->diff == 5);

  std::vector<Nat> pow2;
  for (Nat p = 1; p <= 1024; p *= 2) pow2.push_back(p);
  CHECK_FALSE(containsApOfLength(NatSet(pow2, 1024), 3));
  CHECK(maxApLength(NatSet(pow2, 1024)) == 2);

  auto pair = containsApOfLength(NatSet({0, 1}, 1), 2);
  REQUIRE(pair);
  CHECK(pair->start == 0);
  CHECK(pair->diff == 1);

  CHECK(maxRun(NatSet({1, 2, 3, 7, 8}, 10)) == 3);
}

TEST_CASE("difference sets") {
  CHECK(els(differenceSet(NatSet({0, 3, 6, 9}, 9))) == std::vector<Nat>{3, 6, 9});
  CHECK(els(differenceSet(NatSet({0, 1, 3}, 3))) == std::vector<Nat>{1, 2, 3});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Nat> d(0, 500);
  for (int t = 0; t < 20; ++t) {
    std::vector<Nat> v(20);
    for (auto& x : v) x = d(rng);
    const NatSet a = NatSet::fromUnsorted(v, 500);
    CHECK(els(differenceSet(a)) == oracle::differences(a.elements()));
  }
  CHECK_THROWS_AS(differenceSet(NatSet({}, 10)), Error);
}

TEST_CASE("window pair witness") {
  CHECK(windowPairWitness(materialize({gen::Multiples{3}}, 30), 4) == Nat{2});
  CHECK_FALSE(windowPairWitness(NatSet({0, 100}, 100), 5));
  CHECK(windowPairWitness(NatSet({4, 5}, 10), 2) == Nat{3});
}

TEST_CASE("cofinite inclusion") {
  const NatSet a = materialize({gen::Multiples{3}}, 1000);
  for (Nat c : {0, 10, 500, 999}) CHECK(cofiniteInA(a, a, c).holds);

  std::vector<Nat> trimmed(a.elements().begin() + 3, a.elements().end());
  CHECK(cofiniteInA(NatSet(trimmed, 1000), a, 6).holds);
  CHECK_FALSE(cofiniteInA(NatSet(trimmed, 1000), a, 5).holds);

  const NatSet evens = materialize({gen::Multiples{2}}, 1000);
  for (Nat c = 0; c <= 994; c += 7) CHECK_FALSE(cofiniteInA(evens, a, c).holds);
}

TEST_CASE("natset construction is validated") {
  CHECK_THROWS_AS(NatSet({3, 1}, 5), Error);
  CHECK_THROWS_AS(NatSet({1, 9}, 5), Error);
  CHECK(NatSet({1, 4}, 5).contains(4));
  CHECK_FALSE(NatSet({1, 4}, 5).contains(2));
}
