// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "recurlab/error.hpp"
#include "recurlab/opcore.hpp"

using namespace recurlab;
using doctest::Approx;

namespace {

const NormKind l2 = NormKind::lp(2);
const Complex I{0.0, 1.0};

Vec vecOf(std::vector<Complex> c) { return Vec(std::move(c), l2); }

double gap(const Vec& a, const Vec& b) { return (a - b).norm(); }

Vec iterate(const Operator& op, Vec x, unsigned n) {
  for (unsigned i = 0; i < n; ++i) x = op.apply(x).image;
  return x;
}

StockOperator rootsDiagonal(std::vector<std::pair<long, long>> roots) {
  std::vector<Eigenvalue> ev;
  for (auto [a, m] : roots) ev.push_back(UnitRoot{a, m});
  return StockOperator(StockOperator::Diagonal{ev}, ev.size(), l2);
}

}  // namespace

TEST_CASE("norms and parsing") {
  const std::vector<Complex> v{3.0, 4.0 * I};
  CHECK(normOf(v, NormKind::lp(2)) == Approx(5.0));
  CHECK(normOf(v, NormKind::lp(1)) == Approx(7.0));
  CHECK(normOf(v, NormKind::supNorm()) == Approx(4.0));
  CHECK(NormKind::parse("sup").sup);
  CHECK(NormKind::parse("3").p == 3.0);
  CHECK_THROWS_AS(NormKind::parse("banana"), Error);
}

TEST_CASE("coordinate bounds with K = 1 on canonical bases") {
  std::mt19937_64 rng(5);
  for (NormKind nk : {NormKind::lp(1), NormKind::lp(2), NormKind::supNorm()}) {
    for (int t = 0; t < 50; ++t) {
      Vec x(oracle::randomUnit(12, 12, rng), nk);
      Vec y(oracle::randomUnit(12, 12, rng), nk);
      for (std::size_t k = 1; k <= 12; ++k) {
        CHECK(std::abs(x.coord(k)) <= x.norm() + 1e-15);
        CHECK(std::abs(x.coord(k) - y.coord(k)) <= (x - y).norm() + 1e-15);
      }
    }
  }
}

TEST_CASE("stock operator single steps") {
  StockOperator d(StockOperator::Diagonal{{Complex(I), Complex(-1.0), Complex(1.0)}}, 3, l2);
  CHECK(gap(d.apply(vecOf({1, 1, 1})).image, vecOf({I, -1.0, 1.0})) == 0.0);

  StockOperator p(StockOperator::BlockPermutationIsometry{}, 8, l2);
  CHECK(gap(p.apply(Vec::basis(4, 8, l2)).image, Vec::basis(3, 8, l2)) == 0.0);
  CHECK(gap(p.apply(Vec::basis(3, 8, l2)).image, Vec::basis(4, 8, l2)) == 0.0);
  CHECK(gap(p.apply(Vec::basis(1, 8, l2)).image, Vec::basis(1, 8, l2)) == 0.0);

  StockOperator s(StockOperator::WeightedBackwardShift{2.0}, 4, l2);
  CHECK(gap(s.apply(Vec::basis(2, 4, l2)).image, vecOf({2.0, 0, 0, 0})) == 0.0);
  CHECK(s.apply(Vec::basis(1, 4, l2)).image.isZero());
}

TEST_CASE("block layout") {
  CHECK(blockOf(2).start == 2);
  CHECK(blockOf(2).length == 1);
  CHECK(blockOf(4).start == 3);
  CHECK(blockOf(4).length == 2);
  CHECK(blockOf(13).start == 9);
  CHECK(blockOf(13).length == 8);
  const Vec b = blockVector(200, l2);
  for (std::size_t m = 0; m <= 6; ++m) CHECK(b.coord((std::size_t{1} << m) + 1) == Complex(std::ldexp(1.0, -int(m))));
  CHECK(b.coord(129 + 1) == Complex(0.0));
}

TEST_CASE("powers agree with iterated application") {
  StockOperator p(StockOperator::BlockPermutationIsometry{}, 64, l2);
  CHECK(gap(p.power(2, Vec::basis(3, 64, l2)).image, Vec::basis(3, 64, l2)) == 0.0);

  StockOperator r5 = rootsDiagonal({{1, 5}, {2, 5}, {0, 1}});
  const Vec x = vecOf({1.0, I, 2.0});
  CHECK(gap(r5.power(5, x).image, x) < 1e-15);

  std::mt19937_64 rng(9);
  std::vector<std::shared_ptr<Operator>> ops{
      std::make_shared<StockOperator>(rootsDiagonal({{1, 7}, {3, 11}, {5, 12}, {0, 1}})),
      std::make_shared<StockOperator>(StockOperator::WeightedBackwardShift{1.5}, 4, l2),
      std::make_shared<StockOperator>(StockOperator::BlockPermutationIsometry{}, 4, l2)};
  for (const auto& op : ops) {
    for (int t = 0; t < 10; ++t) {
      const Vec v(oracle::randomUnit(4, 4, rng), l2);
      CHECK(gap(op->power(0, v).image, v) == 0.0);
      for (unsigned n : {1u, 2u, 3u, 7u, 19u}) CHECK(gap(op->power(n, v).image, iterate(*op, v, n)) < 1e-12);
    }
  }
}

TEST_CASE("block permutation is an isometry away from the last partial block") {
  StockOperator p(StockOperator::BlockPermutationIsometry{}, 64, l2);
  const Vec b = blockVector(64, l2);
  for (unsigned n : {1u, 5u, 31u, 32u, 1000u}) {
    const Applied a = p.power(n, b);
    CHECK(a.image.norm() == Approx(b.norm()).epsilon(1e-14));
    CHECK(a.loss == 0.0);
  }
}

TEST_CASE("krylov rank") {
  StockOperator d3 = rootsDiagonal({{1, 3}, {2, 3}, {0, 1}});
  CHECK(krylovRank(d3, vecOf({1, 1, 1}), 10) == 3);
  CHECK(krylovRank(d3, Vec::basis(2, 3, l2), 10) == 1);

  StockOperator p(StockOperator::BlockPermutationIsometry{}, 200, l2);
  const Vec b = blockVector(200, l2);
  const std::size_t r = krylovRank(p, b, 64);
  CHECK(r >= 33);

  // orbit enumeration oracle: rank of the explicit 64 x 200 orbit matrix
  Eigen::MatrixXd orbit = Eigen::MatrixXd::Zero(64, 200);
  for (int n = 0; n < 64; ++n)
    for (int m = 0; m <= 6; ++m) {
      const int len = 1 << m;
      const int pos = (1 << m) + 1 + (n % len);
      orbit(n, pos - 1) = std::ldexp(1.0, -m);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(orbit);
  CHECK(r == static_cast<std::size_t>(lu.rank()));
}

TEST_CASE("unimodular eigen indices") {
  StockOperator d(StockOperator::Diagonal{{Complex(1.0), Complex(2.0), std::polar(1.0, std::numbers::pi / 7)}}, 3, l2);
  CHECK(unimodularEigenIndices(d, 1e-12).elements() == std::vector<Nat>{1, 3});
  CHECK(unimodularEigenIndices(rootsDiagonal({{1, 3}, {1, 4}}), 1e-12).elements() == std::vector<Nat>{1, 2});

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 2);
  const double mods[] = {0.5, 1.0, 2.0};
  std::vector<Eigenvalue> ev;
  std::vector<Nat> want;
  for (std::size_t k = 1; k <= 40; ++k) {
    const double r = mods[pick(rng)];
    ev.push_back(std::polar(r, 0.3 * double(k)));
    if (r == 1.0) want.push_back(k);
  }
  CHECK(unimodularEigenIndices(StockOperator(StockOperator::Diagonal{ev}, 40, l2), 1e-12).elements() == want);
  CHECK_THROWS_AS(unimodularEigenIndices(StockOperator(StockOperator::WeightedBackwardShift{}, 3, l2), 1e-12), Error);
}

TEST_CASE("polynomial and power adaptors") {
  auto base = std::make_shared<const StockOperator>(rootsDiagonal({{1, 6}, {1, 4}, {0, 1}}));
  PolynomialOperator poly(base, {2.0, 0.0, -1.0});
  const Vec x = vecOf({1.0, I, 3.0});
  const Vec want = Complex(2.0) * x - iterate(*base, x, 2);
  CHECK(gap(poly.apply(x).image, want) < 1e-14);
  CHECK(poly.normBound() >= 3.0);

  PowerOperator pw(base, 4);
  CHECK(gap(pw.power(3, x).image, iterate(*base, x, 12)) < 1e-13);
}

TEST_CASE("dimension checks") {
  StockOperator p(StockOperator::BlockPermutationIsometry{}, 8, l2);
  CHECK_THROWS_AS(p.apply(Vec::basis(1, 9, l2)), Error);
}
