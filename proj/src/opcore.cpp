// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/opcore.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "recurlab/error.hpp"

namespace recurlab {

using nlohmann::json;

NormKind NormKind::lp(double p) {
  require(std::isfinite(p) && p >= 1.0, "norm exponent must lie in [1, inf)");
  return NormKind{false, p};
}

std::string NormKind::name() const {
  if (sup) return "sup";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

NormKind NormKind::parse(const std::string& s) {
  if (s == "sup" || s == "inf") return supNorm();
  double p = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), p);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(ErrorCode::InvalidArgument, "unknown norm kind '" + s + "'");
  return lp(p);
}

double normOf(const std::vector<Complex>& v, NormKind nk) {
  double top = 0.0;
  for (const auto& z : v) top = std::max(top, std::abs(z));
  if (nk.sup || top == 0.0) return top;
  double acc = 0.0;
  if (nk.p == 2.0) {
    for (const auto& z : v) acc += std::norm(z / top);
    return top * std::sqrt(acc);
  }
  for (const auto& z : v) acc += std::pow(std::abs(z) / top, nk.p);
  return top * std::pow(acc, 1.0 / nk.p);
}

Vec::Vec(std::size_t dimCap, NormKind nk) : c_(dimCap), nk_(nk) {}

Vec::Vec(std::vector<Complex> coords, NormKind nk) : c_(std::move(coords)), nk_(nk) {}

Vec Vec::basis(std::size_t k, std::size_t dimCap, NormKind nk) {
  require(k >= 1 && k <= dimCap, "basis index out of range");
  Vec v(dimCap, nk);
  v.coord(k) = 1.0;
  return v;
}

bool Vec::isZero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Complex& z) { return z == Complex(0.0, 0.0); });
}

Vec& Vec::operator+=(const Vec& o) {
  require(o.dimCap() == dimCap(), "dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  require(o.dimCap() == dimCap(), "dimension mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Vec& Vec::operator*=(Complex s) {
  for (auto& z : c_) z *= s;
  return *this;
}

double BasisSystem::vectorNorm(std::size_t k) const {
  require(k >= 1 && k <= dimCap, "basis index out of range");
  return 1.0;
}

double BasisSystem::functionalNorm(std::size_t k) const {
  require(k >= 1 && k <= dimCap, "basis index out of range");
  return 1.0;
}

double ratioToDouble(const mpz_class& r, const mpz_class& m) {
  if (r == 0) return 0.0;
  long er = 0, em = 0;
  const double dr = mpz_get_d_2exp(&er, r.get_mpz_t());
  const double dm = mpz_get_d_2exp(&em, m.get_mpz_t());
  return std::ldexp(dr / dm, static_cast<int>(er - em));
}

namespace {

// Phase r/m folded into (-1/2, 1/2].
double foldedTurns(const mpz_class& r, const mpz_class& m) {
  mpz_class q;
  mpz_fdiv_r(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  if (2 * q > m) q -= m;
  return ratioToDouble(q, m);
}

Complex powBig(Complex z, const mpz_class& n) {
  if (n == 0) return 1.0;
  if (!n.fits_ulong_p()) return std::pow(z, n.get_d());
  unsigned long e = n.get_ui();
  Complex acc = 1.0;
  while (e) {
    if (e & 1UL) acc *= z;
    z *= z;
    e >>= 1;
  }
  return acc;
}

Complex eigenPower(const Eigenvalue& e, const mpz_class& n) {
  if (const auto* r = std::get_if<UnitRoot>(&e)) return unitRootValue(r->a * n, r->m);
  return powBig(std::get<Complex>(e), n);
}

Complex eigenPowerMinusOne(const Eigenvalue& e, const mpz_class& n) {
  if (const auto* r = std::get_if<UnitRoot>(&e)) return unitRootMinusOne(r->a * n, r->m);
  return powBig(std::get<Complex>(e), n) - 1.0;
}

}  // namespace

Complex unitRootValue(const mpz_class& r, const mpz_class& m) {
  return std::polar(1.0, 2.0 * std::numbers::pi * foldedTurns(r, m));
}

Complex unitRootMinusOne(const mpz_class& r, const mpz_class& m) {
  const double f = foldedTurns(r, m);
  return Complex(0.0, 2.0 * std::sin(std::numbers::pi * f)) * std::polar(1.0, std::numbers::pi * f);
}

Complex eigenvalueValue(const Eigenvalue& e) { return eigenPower(e, 1); }

Vec Operator::displacement(const mpz_class& n, const Vec& x) const { return power(n, x).image - x; }

std::vector<mpz_class> Operator::candidateTimes(const mpz_class& budget) const {
  if (budget > 10'000'000) fail(ErrorCode::OutOfRange, "linear candidate stream limited to 1e7 times");
  std::vector<mpz_class> out;
  for (unsigned long n = 1; n <= budget; ++n) out.emplace_back(n);
  return out;
}

void Operator::checkDim(const Vec& x) const {
  if (x.dimCap() != dimCap()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
}

Block blockOf(std::size_t k) {
  require(k >= 2, "coordinate 1 is not in a permutation block");
  const std::size_t m = std::bit_width(k - 1) - 1;
  return Block{(std::size_t{1} << m) + 1, std::size_t{1} << m};
}

Vec blockVector(std::size_t dimCap, NormKind nk) {
  Vec v(dimCap, nk);
  for (std::size_t m = 0; (std::size_t{2} << m) <= dimCap; ++m) v.coord((std::size_t{1} << m) + 1) = std::ldexp(1.0, -static_cast<int>(m));
  return v;
}

StockOperator::StockOperator(Variant v, std::size_t dimCap, NormKind nk) : v_(std::move(v)), dim_(dimCap), nk_(nk) {
  require(dimCap >= 1, "dimCap must be >= 1");
  if (const auto* d = std::get_if<Diagonal>(&v_)) {
    require(d->lambda.size() == dimCap, "diagonal needs one eigenvalue per coordinate");
    for (const auto& e : d->lambda)
      if (const auto* r = std::get_if<UnitRoot>(&e)) require(r->m >= 1, "root-of-unity modulus must be >= 1");
  }
}

StockOperator StockOperator::identity(std::size_t dimCap, NormKind nk) {
  return StockOperator(Diagonal{std::vector<Eigenvalue>(dimCap, UnitRoot{0, 1})}, dimCap, nk);
}

namespace {

// Image of x under T^n for the block permutation, with the dropped part.
Applied permute(const Vec& x, const mpz_class& n) {
  const std::size_t dim = x.dimCap();
  Vec out(dim, x.normKind());
  std::vector<Complex> lost;
  if (dim >= 1) out.coord(1) = x.coord(1);
  for (std::size_t k = 2; k <= dim; ++k) {
    if (x.coord(k) == Complex(0.0, 0.0)) continue;
    const Block b = blockOf(k);
    const mpz_class shift = n % mpz_class(static_cast<unsigned long>(b.length));
    const std::size_t dest = b.start + (k - b.start + shift.get_ui()) % b.length;
    if (dest <= dim)
      out.coord(dest) += x.coord(k);
    else
      lost.push_back(x.coord(k));
  }
  return {std::move(out), normOf(lost, x.normKind())};
}

}  // namespace

Applied StockOperator::apply(const Vec& x) const {
  checkDim(x);
  if (std::holds_alternative<BlockPermutationIsometry>(v_)) {
    // One step: only the last coordinate of a partial block can leave the truncation.
    Vec out(dim_, nk_);
    std::vector<Complex> lost;
    out.coord(1) = x.coord(1);
    for (std::size_t k = 2; k <= dim_; ++k) {
      const Block b = blockOf(k);
      const std::size_t dest = (k + 1 == b.start + b.length) ? b.start : k + 1;
      if (dest <= dim_)
        out.coord(dest) += x.coord(k);
      else if (x.coord(k) != Complex(0.0, 0.0))
        lost.push_back(x.coord(k));
    }
    return {std::move(out), normOf(lost, nk_)};
  }
  return power(1, x);
}

Applied StockOperator::power(const mpz_class& n, const Vec& x) const {
  checkDim(x);
  require(n >= 0, "power exponent must be >= 0");
  if (n == 0) return {x, 0.0};
  if (const auto* d = std::get_if<Diagonal>(&v_)) {
    Vec out = x;
    for (std::size_t k = 1; k <= dim_; ++k)
      if (x.coord(k) != Complex(0.0, 0.0)) out.coord(k) *= eigenPower(d->lambda[k - 1], n);
    return {std::move(out), 0.0};
  }
  if (const auto* s = std::get_if<WeightedBackwardShift>(&v_)) {
    Vec out(dim_, nk_);
    if (n >= dim_) return {std::move(out), 0.0};
    const std::size_t shift = n.get_ui();
    const Complex f = powBig(s->lambda, n);
    for (std::size_t k = shift + 1; k <= dim_; ++k) out.coord(k - shift) = f * x.coord(k);
    return {std::move(out), 0.0};
  }
  return permute(x, n);
}

Vec StockOperator::displacement(const mpz_class& n, const Vec& x) const {
  if (const auto* d = std::get_if<Diagonal>(&v_)) {
    checkDim(x);
    Vec out(dim_, nk_);
    if (n == 0) return out;
    for (std::size_t k = 1; k <= dim_; ++k)
      if (x.coord(k) != Complex(0.0, 0.0)) out.coord(k) = eigenPowerMinusOne(d->lambda[k - 1], n) * x.coord(k);
    return out;
  }
  return Operator::displacement(n, x);
}

double StockOperator::normBound() const {
  if (const auto* d = std::get_if<Diagonal>(&v_)) {
    double top = 0.0;
    for (const auto& e : d->lambda) top = std::max(top, std::abs(eigenvalueValue(e)));
    return top;
  }
  if (const auto* s = std::get_if<WeightedBackwardShift>(&v_)) return std::abs(s->lambda);
  return 1.0;
}

std::string StockOperator::descriptor() const {
  json j;
  j["dimCap"] = dim_;
  j["normKind"] = nk_.name();
  if (const auto* d = std::get_if<Diagonal>(&v_)) {
    j["type"] = "diagonal";
    json ev = json::array();
    for (const auto& e : d->lambda) {
      if (const auto* r = std::get_if<UnitRoot>(&e))
        ev.push_back({{"root", {r->a.get_str(), r->m.get_str()}}});
      else
        ev.push_back({{"value", {std::get<Complex>(e).real(), std::get<Complex>(e).imag()}}});
    }
    j["eigenvalues"] = std::move(ev);
  } else if (const auto* s = std::get_if<WeightedBackwardShift>(&v_)) {
    j["type"] = "shift";
    j["lambda"] = {s->lambda.real(), s->lambda.imag()};
  } else {
    j["type"] = "blockperm";
  }
  return j.dump();
}

PowerOperator::PowerOperator(std::shared_ptr<const Operator> base, mpz_class p) : base_(std::move(base)), p_(std::move(p)) {
  require(base_ != nullptr, "null base operator");
  require(p_ >= 1, "power must be >= 1");
}

double PowerOperator::normBound() const { return std::pow(base_->normBound(), p_.get_d()); }

std::string PowerOperator::descriptor() const {
  json j{{"type", "power"}, {"p", p_.get_str()}, {"base", json::parse(base_->descriptor())}};
  return j.dump();
}

PolynomialOperator::PolynomialOperator(std::shared_ptr<const Operator> base, std::vector<Complex> coeffs)
    : base_(std::move(base)), c_(std::move(coeffs)) {
  require(base_ != nullptr, "null base operator");
  require(!c_.empty(), "polynomial needs at least one coefficient");
}

Applied PolynomialOperator::apply(const Vec& x) const {
  checkDim(x);
  Vec acc(dimCap(), normKind());
  double loss = 0.0;
  Vec cur = x;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (j > 0) {
      Applied step = base_->apply(cur);
      loss += std::abs(c_[j]) * step.loss;
      cur = std::move(step.image);
    }
    if (c_[j] != Complex(0.0, 0.0)) acc += c_[j] * cur;
  }
  return {std::move(acc), loss};
}

Applied PolynomialOperator::power(const mpz_class& n, const Vec& x) const {
  Applied moved = base_->power(n, x);
  Applied out = apply(moved.image);
  out.loss += normBound() * moved.loss;
  return out;
}

double PolynomialOperator::normBound() const {
  const double b = base_->normBound();
  double acc = 0.0, bj = 1.0;
  for (const auto& c : c_) {
    acc += std::abs(c) * bj;
    bj *= b;
  }
  return acc;
}

std::string PolynomialOperator::descriptor() const {
  json coeffs = json::array();
  for (const auto& c : c_) coeffs.push_back({c.real(), c.imag()});
  json j{{"type", "polynomial"}, {"coeffs", coeffs}, {"base", json::parse(base_->descriptor())}};
  return j.dump();
}

std::size_t krylovRank(const Operator& op, const Vec& x, std::size_t depth, double tol) {
  require(depth >= 1, "Krylov depth must be >= 1");
  if (x.isZero()) return 0;
  const std::size_t dim = op.dimCap();
  Eigen::MatrixXcd rows(depth, dim);
  Vec cur = x;
  for (std::size_t i = 0; i < depth; ++i) {
    if (i > 0) cur = op.apply(cur).image;
    for (std::size_t k = 0; k < dim; ++k) rows(i, k) = cur.coords()[k];
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(rows);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

NatSet unimodularEigenIndices(const StockOperator& op, double tol) {
  const auto* d = std::get_if<StockOperator::Diagonal>(&op.variant());
  if (d == nullptr) fail(ErrorCode::Unsupported, "unimodularEigenIndices supports the Diagonal variant only");
  std::vector<Nat> idx;
  for (std::size_t k = 1; k <= d->lambda.size(); ++k)
    if (std::abs(std::abs(eigenvalueValue(d->lambda[k - 1])) - 1.0) <= tol) idx.push_back(k);
  return NatSet(std::move(idx), d->lambda.size());
}

}  // namespace recurlab
