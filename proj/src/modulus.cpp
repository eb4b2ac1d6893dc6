// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <numbers>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"

namespace recurlab {

bool isKnownGrowthRule(const std::string& rule) { return rule == "pow2k2-ksq" || rule == "pow2k2-k"; }

mpz_class growthFactor(const std::string& rule, std::size_t k) {
  mpz_class g;
  mpz_ui_pow_ui(g.get_mpz_t(), 2, k + 2);
  const mpz_class kk(static_cast<unsigned long>(k));
  if (rule == "pow2k2-ksq") return g * kk * kk;
  if (rule == "pow2k2-k") return g * kk;
  fail(ErrorCode::InvalidArgument, "unknown growth rule '" + rule + "'");
}

ModulusSequence ModulusSequence::build(std::size_t foldN, std::size_t levels, const std::string& rule) {
  require(foldN >= 1, "foldN must be >= 1");
  if (levels < foldN + 3) fail(ErrorCode::InvalidArgument, "levels must be at least foldN + 3");
  if (!isKnownGrowthRule(rule)) fail(ErrorCode::InvalidArgument, "unknown growth rule '" + rule + "'");
  ModulusSequence s;
  s.foldN_ = foldN;
  s.rule_ = rule;
  s.m_.assign(levels, mpz_class(1));
  for (std::size_t k = foldN + 1; k < levels; ++k) s.m_[k] = s.m_[k - 1] * growthFactor(rule, k);

  bool ok = true;
  for (std::size_t k = 1; k <= foldN + 1; ++k) ok = ok && s.m(k) == 1;
  for (std::size_t k = 1; k < levels; ++k) ok = ok && mpz_divisible_p(s.m(k + 1).get_mpz_t(), s.m(k).get_mpz_t());
  // S_j <= (1 + S_{j+1}) / g(j) <= 2 / g(j) <= 2^{-j} once g(j) >= 2^{j+1}.
  for (std::size_t j = foldN + 1; j <= levels + 1; ++j) {
    mpz_class need;
    mpz_ui_pow_ui(need.get_mpz_t(), 2, j + 1);
    ok = ok && growthFactor(rule, j) >= need;
  }
  s.certified_ = ok;
  return s;
}

const mpz_class& ModulusSequence::m(std::size_t k) const {
  if (k < 1 || k > m_.size()) fail(ErrorCode::OutOfRange, "modulus level out of range");
  return m_[k - 1];
}

mpz_class ModulusSequence::growth(std::size_t k) const {
  require(k >= 1, "growth index must be >= 1");
  if (k <= foldN_) return 1;
  return growthFactor(rule_, k);
}

mpq_class ModulusSequence::certificate(std::size_t j) const {
  const std::size_t L = levels();
  if (j < 1 || j > L) fail(ErrorCode::OutOfRange, "certificate index out of range");
  // sum_{k>j} m_j/m_k = (sum_{k>j} m_L/m_k) / (m_L/m_j), all quotients exact.
  mpz_class num = 0, q;
  for (std::size_t k = j + 1; k <= L; ++k) {
    mpz_divexact(q.get_mpz_t(), m(L).get_mpz_t(), m(k).get_mpz_t());
    num += q;
  }
  mpz_divexact(q.get_mpz_t(), m(L).get_mpz_t(), m(j).get_mpz_t());
  mpq_class out(num, q);
  out.canonicalize();
  return out;
}

mpq_class ModulusSequence::tailBound(std::size_t j) const {
  const std::size_t L = levels();
  if (j < 1 || j > L) fail(ErrorCode::OutOfRange, "certificate index out of range");
  // sum_{k>L} m_j/m_k <= (m_j/m_L) (1/g(L)) / (1 - 1/g(L+1)) <= 2 m_j / (m_L g(L)).
  mpz_class q;
  mpz_divexact(q.get_mpz_t(), m(L).get_mpz_t(), m(j).get_mpz_t());
  mpq_class out(mpz_class(2), q * growth(L));
  out.canonicalize();
  return out;
}

mpq_class ModulusSequence::certBound(std::size_t j) const { return certificate(j) + tailBound(j); }

double ModulusSequence::rigidityBound(std::size_t j, double K) const {
  const mpq_class c = certBound(j);
  return 2.0 * std::numbers::pi * K * ratioToDouble(c.get_num(), c.get_den());
}

double ModulusSequence::inverseTail() const {
  const std::size_t L = levels();
  // 1/m_L + 1/m_{L+1} + ... <= (1/m_L)(1 + 2/g(L)).
  const double head = ratioToDouble(1, m(L));
  return head * (1.0 + 2.0 / growth(L).get_d());
}

}  // namespace recurlab
