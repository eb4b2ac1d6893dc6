// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Independent brute-force references. Nothing here calls the code under test
// except for plain accessors (elements, m(k), grid entries).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <gmpxx.h>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "recurlab/auge.hpp"
#include "recurlab/natset.hpp"

namespace oracle {

using recurlab::Complex;
using recurlab::Nat;

struct Densities {
  mpq_class upper, lower, upperBanach, lowerBanach;
};

// O(H*W) window scan and prefix scan with the documented window conventions.
inline Densities densities(const std::vector<Nat>& elems, Nat H, Nat W) {
  std::vector<int> in(H + 1, 0);
  for (Nat e : elems) in[e] = 1;
  Densities d;
  bool first = true;
  for (Nat n = 0; n + W <= H; ++n) {
    Nat c = 0;
    for (Nat t = n + 1; t <= n + W; ++t) c += in[t];
    mpq_class q(c, W);
    q.canonicalize();
    if (first || q > d.upperBanach) d.upperBanach = q;
    if (first || q < d.lowerBanach) d.lowerBanach = q;
    first = false;
  }
  first = true;
  for (Nat N = W; N <= H; N += W) {
    Nat c = 0;
    for (Nat t = 1; t <= N; ++t) c += in[t];
    mpq_class q(c, N);
    q.canonicalize();
    if (first || q > d.upper) d.upper = q;
    if (first || q < d.lower) d.lower = q;
    first = false;
  }
  return d;
}

inline std::vector<Nat> differences(const std::vector<Nat>& a) {
  std::set<Nat> out;
  for (Nat x : a)
    for (Nat y : a)
      if (x > y) out.insert(x - y);
  return {out.begin(), out.end()};
}

inline std::vector<Nat> subsetSums(const std::vector<Nat>& g, Nat H) {
  std::set<Nat> out;
  for (unsigned mask = 1; mask < (1u << g.size()); ++mask) {
    Nat s = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (mask >> i & 1u) s += g[i];
    if (s <= H) out.insert(s);
  }
  return {out.begin(), out.end()};
}

// lambda_{k,n} by direct geometric summation; only for small n.
inline Complex lambdaSum(const mpz_class& m, unsigned long n) {
  Complex s = 0;
  const double md = m.get_d();
  for (unsigned long l = 0; l < n; ++l) s += std::polar(1.0, 2.0 * std::numbers::pi * double(l) / md);
  return s;
}

// T x written straight from its defining sum, levels N+2..L.
inline std::vector<Complex> augeApply(const recurlab::AugeOperator& op, const std::vector<Complex>& x) {
  const auto& mod = op.modulus();
  const std::size_t N = op.foldN(), L = op.levels();
  std::vector<Complex> y(x.size());
  for (std::size_t k = 1; k <= x.size(); ++k) {
    Complex lam = 1.0;
    if (k <= L) lam = std::polar(1.0, 2.0 * std::numbers::pi / mod.m(k).get_d());
    y[k - 1] = lam * x[k - 1];
  }
  for (std::size_t k = N + 2; k <= L; ++k) {
    const auto& alpha = op.grid().atLevel(k).alpha;
    Complex w = 0;
    for (std::size_t i = 0; i <= N; ++i) w += alpha[i] * x[i];
    y[k - 1] += w / mod.m(k - 1).get_d();
  }
  return y;
}

inline double dist(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline std::vector<Complex> randomUnit(std::size_t dim, std::size_t support, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(dim);
  double s = 0;
  for (std::size_t i = 0; i < support; ++i) {
    v[i] = {g(rng), g(rng)};
    s += std::norm(v[i]);
  }
  for (auto& z : v) z /= std::sqrt(s);
  return v;
}

}  // namespace oracle
