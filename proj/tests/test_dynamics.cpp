// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "recurlab/auge.hpp"
#include "recurlab/dynamics.hpp"
#include "recurlab/error.hpp"

using namespace recurlab;

namespace {

const NormKind l2 = NormKind::lp(2);

std::shared_ptr<StockOperator> rotations(std::vector<std::pair<long, long>> roots) {
  std::vector<Eigenvalue> ev;
  for (auto [a, m] : roots) ev.push_back(UnitRoot{a, m});
  return std::make_shared<StockOperator>(StockOperator::Diagonal{ev}, ev.size(), l2);
}

std::vector<Nat> multiplesUpTo(Nat p, Nat H) {
  std::vector<Nat> v;
  for (Nat n = 0; n <= H; n += p) v.push_back(n);
  return v;
}

AugeOperator makeOp(std::size_t N, std::size_t L) {
  AugeDescriptor d;
  d.foldN = N;
  d.levels = L;
  d.dimCap = L;
  return AugeOperator(d);
}

}  // namespace

TEST_CASE("return sets") {
  const auto r3 = rotations({{1, 3}});
  CHECK(returnSet(*r3, Vec::basis(1, 1, l2), 0.1, 30).elements() == multiplesUpTo(3, 30));

  const auto id = std::make_shared<StockOperator>(StockOperator::identity(5, l2));
  CHECK(returnSet(*id, Vec::basis(2, 5, l2), 1e-9, 40) == NatSet::interval(40));

  // eps nesting and 0 always present
  std::mt19937_64 rng(2);
  const auto irr = std::make_shared<StockOperator>(
      StockOperator::Diagonal{{std::polar(1.0, 2.0), std::polar(1.0, 0.7), Complex(1.0)}}, 3, l2);
  for (int t = 0; t < 10; ++t) {
    const Vec x(oracle::randomUnit(3, 3, rng), l2);
    const NatSet a = returnSet(*irr, x, 0.2, 500), b = returnSet(*irr, x, 0.5, 500);
    CHECK(a.contains(0));
    CHECK(a.isSubsetOf(b));
  }
}

TEST_CASE("block vector returns along multiples of 2^m") {
  StockOperator p(StockOperator::BlockPermutationIsometry{}, 4097, l2);
  const Vec x = blockVector(4097, l2);
  // ||T^n x - x|| involves only blocks of length 2^m not dividing n; m_eps from the l2 tail.
  for (auto [eps, me] : {std::pair{0.5, 2}, {0.25, 3}, {0.125, 4}}) {
    const Nat H = Nat{1} << (me + 6);
    const NatSet rs = returnSet(p, x, eps, H);
    CHECK(materialize({gen::Multiples{Nat{1} << me}}, H).isSubsetOf(rs));
  }
}

TEST_CASE("quasi-rigidity search") {
  SUBCASE("identity") {
    const auto id = std::make_shared<StockOperator>(StockOperator::identity(3, l2));
    const auto r = quasiRigiditySearch(*id, {Vec::basis(1, 3, l2), Vec::basis(2, 3, l2)}, {0.1, 0.01, 0.001}, 100);
    REQUIRE(r.success);
    CHECK(r.witness.times == std::vector<mpz_class>{1, 2, 3});
  }

  SUBCASE("rotation part of the Auge operator") {
    const auto op = makeOp(1, 24);
    const auto R = op.rotation();
    Vec x(24, l2);
    for (std::size_t k = 1; k <= 10; ++k) x.coord(k) = 1.0 / std::sqrt(10.0);
    std::vector<double> tol;
    for (std::size_t k = 1; k <= 7; ++k) tol.push_back(op.modulus().rigidityBound(2 + k));
    const auto r = quasiRigiditySearch(*R, {x}, tol, op.modulus().m(24));
    REQUIRE(r.success);
    std::size_t from = 1;
    for (const auto& n : r.witness.times) {
      bool found = false;
      for (std::size_t j = from; j <= 24 && !found; ++j)
        if (op.modulus().m(j) == n) found = true, from = j + 1;
      CHECK(found);
    }
  }

  SUBCASE("the fold operator fails with a certificate") {
    const auto op = makeOp(1, 30);
    const auto r =
        quasiRigiditySearch(op, {Vec::basis(1, 30, l2), Vec::basis(2, 30, l2)}, {0.1, 0.1, 0.1}, op.modulus().m(30) / 2);
    REQUIRE_FALSE(r.success);
    CHECK(r.failure.certified);
    REQUIRE(r.failure.certifiedMin);
    CHECK(*r.failure.certifiedMin > 1.0 / std::numbers::pi - 1e-9);
    CHECK(r.failure.s == 2);
  }

  SUBCASE("budget exhaustion is not a certificate") {
    const auto r3 = rotations({{1, 1000}});
    const auto r = quasiRigiditySearch(*r3, {Vec::basis(1, 1, l2)}, {1e-9}, 50);
    CHECK_FALSE(r.success);
    CHECK_FALSE(r.failure.certified);
  }
}

TEST_CASE("tuple recurrence probe") {
  const auto d = rotations({{1, 2}, {1, 3}});
  std::vector<mpz_class> cands;
  for (unsigned long n = 0; n <= 50; ++n) cands.emplace_back(n);
  const Vec a = Vec::basis(1, 2, l2), b = Vec::basis(2, 2, l2);
  CHECK(tupleRecurrenceProbe(*d, {a, b}, 0.1, cands) == mpz_class(std::lcm(2, 3)));
  const NatSet rs = returnSet(*d, b, 0.1, 50);
  CHECK(tupleRecurrenceProbe(*d, {b}, 0.1, cands) == mpz_class(rs.elements()[1]));

  const auto op = makeOp(1, 15);
  const auto lattice = latticeCandidates(op.modulus(), op.modulus().m(15) / 2);
  CHECK_FALSE(tupleRecurrenceProbe(op, {Vec::basis(1, 15, l2), Vec::basis(2, 15, l2)}, 0.1, lattice));
}

TEST_CASE("subsampled return sets") {
  CHECK(subsampleReturnSet(materialize({gen::Multiples{6}}, 60), 3) == materialize({gen::Multiples{2}}, 20));
  const NatSet a = materialize({gen::IpClosure{{2, 5, 9}}}, 30);
  CHECK(subsampleReturnSet(a, 1) == a);

  std::mt19937_64 rng(12);
  auto base = std::make_shared<const StockOperator>(*rotations({{1, 6}, {2, 9}, {5, 14}}));
  for (Nat p : {2, 3, 7}) {
    const Vec x(oracle::randomUnit(3, 3, rng), l2);
    PowerOperator pw(base, p);
    const NatSet direct = returnSet(pw, x, 0.3, 40);
    CHECK(subsampleReturnSet(returnSet(*base, x, 0.3, 40 * p), p) == direct);
  }
}

TEST_CASE("period classification by density") {
  const auto r5 = rotations({{1, 5}});
  const NatSet rs = returnSet(*r5, Vec::basis(1, 1, l2), 0.1, 5000);
  const auto cls = classifyPeriodByDensity(rs, densityProfile(rs, 50), mpq_class(1, 5));
  CHECK(cls.periodBound == Nat{5});
  CHECK_FALSE(cls.fixedPoint);

  const NatSet full = NatSet::interval(500);
  const auto f = classifyPeriodByDensity(full, densityProfile(full, 20), mpq_class(9, 10));
  CHECK(f.periodBound == Nat{1});
  CHECK(f.fixedPoint);

  const NatSet sparse = materialize({gen::Multiples{50}}, 1000);
  CHECK_FALSE(classifyPeriodByDensity(sparse, densityProfile(sparse, 100), mpq_class(1, 5)).periodBound);
}

TEST_CASE("period detection") {
  CHECK(detectPeriod(*rotations({{1, 4}}), Vec::basis(1, 1, l2), 1.0, 100) == Nat{4});
  const auto irr = std::make_shared<StockOperator>(
      StockOperator::Diagonal{{std::polar(1.0, 2.0 * std::numbers::pi * std::numbers::sqrt2)}}, 1, l2);
  CHECK_FALSE(detectPeriod(*irr, Vec::basis(1, 1, l2), 1e-3, 20));
  const auto id = std::make_shared<StockOperator>(StockOperator::identity(2, l2));
  CHECK(detectPeriod(*id, Vec::basis(2, 2, l2), 1e-9, 10) == Nat{1});
}

TEST_CASE("commutant return inclusion") {
  auto rot = rotations({{1, 6}, {2, 7}, {0, 1}});
  const Vec x = Vec::basis(1, 3, l2) + Vec::basis(2, 3, l2);
  auto c = commutantReturnInclusion(rot, x, {1.0}, 0.3, 500);
  CHECK(c.holds);
  CHECK(c.L >= 1.0);

  // S = T on a rotation: both sets coincide
  c = commutantReturnInclusion(rot, x, {0.0, 1.0}, 0.3, 500);
  CHECK(c.holds);
  CHECK(c.inner == returnSet(*rot, x, 0.3 / c.L, 500).size());

  auto perm = std::make_shared<StockOperator>(StockOperator::BlockPermutationIsometry{}, 257, l2);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> poly(4);
  for (auto& z : poly) z = {u(rng), u(rng)};
  c = commutantReturnInclusion(perm, blockVector(257, l2), poly, 0.25, 10000);
  CHECK(c.holds);
  CHECK_FALSE(c.violation);
}
