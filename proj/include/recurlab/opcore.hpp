// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Truncated sequence spaces over C and the stock operators.

#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "recurlab/natset.hpp"

namespace recurlab {

using Complex = std::complex<double>;

/// l^p for p in [1, inf), or the sup norm.
struct NormKind {
  bool sup = false;
  double p = 2.0;

  static NormKind lp(double p);
  static NormKind supNorm() { return NormKind{true, 0.0}; }
  /// Hoelder conjugate exponent as 1/q (0 for p = 1, 1 for sup).
  double dualInverse() const { return sup ? 1.0 : 1.0 - 1.0 / p; }
  std::string name() const;
  static NormKind parse(const std::string& s);
  bool operator==(const NormKind&) const = default;
};

double normOf(const std::vector<Complex>& v, NormKind nk);

/// Vector with coordinates 1..dimCap.
class Vec {
 public:
  Vec() = default;
  Vec(std::size_t dimCap, NormKind nk);
  Vec(std::vector<Complex> coords, NormKind nk);
  static Vec basis(std::size_t k, std::size_t dimCap, NormKind nk);

  std::size_t dimCap() const { return c_.size(); }
  NormKind normKind() const { return nk_; }
  const Complex& coord(std::size_t k) const { return c_[k - 1]; }
  Complex& coord(std::size_t k) { return c_[k - 1]; }
  const std::vector<Complex>& coords() const { return c_; }
  std::vector<Complex>& coords() { return c_; }
  double norm() const { return normOf(c_, nk_); }
  bool isZero() const;

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(Complex s);
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Complex s, Vec a) { return a *= s; }

 private:
  std::vector<Complex> c_;
  NormKind nk_;
};

/// Canonical basis of the truncation: unit vectors and coordinate functionals.
struct BasisSystem {
  std::size_t dimCap = 0;
  double K = 1.0;
  NormKind normKind;

  double vectorNorm(std::size_t k) const;
  double functionalNorm(std::size_t k) const;
};

/// exp(2 pi i a / m) kept as an exact phase.
struct UnitRoot {
  mpz_class a = 0;
  mpz_class m = 1;
};

using Eigenvalue = std::variant<Complex, UnitRoot>;

/// r / m as a double, safe for operands far outside the double range.
double ratioToDouble(const mpz_class& r, const mpz_class& m);
/// exp(2 pi i r / m).
Complex unitRootValue(const mpz_class& r, const mpz_class& m);
/// exp(2 pi i r / m) - 1 without cancellation.
Complex unitRootMinusOne(const mpz_class& r, const mpz_class& m);
Complex eigenvalueValue(const Eigenvalue& e);

struct Applied {
  Vec image;
  /// Norm of mass dropped at the truncation boundary, or the tail bound.
  double loss = 0.0;
};

/// Bounded operator on a truncation of a sequence space.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual std::size_t dimCap() const = 0;
  virtual NormKind normKind() const = 0;
  virtual Applied apply(const Vec& x) const = 0;
  virtual Applied power(const mpz_class& n, const Vec& x) const = 0;
  /// T^n x - x. Overridden where it can be formed without cancellation.
  virtual Vec displacement(const mpz_class& n, const Vec& x) const;
  /// Upper bound for the operator norm on the truncation.
  virtual double normBound() const = 0;
  /// Canonical JSON text that rebuilds the operator.
  virtual std::string descriptor() const = 0;
  /// Times worth probing up to the budget; the default is 1..budget.
  virtual std::vector<mpz_class> candidateTimes(const mpz_class& budget) const;

 protected:
  void checkDim(const Vec& x) const;
};

class StockOperator : public Operator {
 public:
  struct Diagonal {
    std::vector<Eigenvalue> lambda;
  };
  /// e_k -> lambda e_{k-1}, e_1 -> 0.
  struct WeightedBackwardShift {
    Complex lambda{1.0, 0.0};
  };
  /// e_1 fixed; each block {2^m+1, ..., 2^{m+1}} is cycled forward.
  struct BlockPermutationIsometry {};
  using Variant = std::variant<Diagonal, WeightedBackwardShift, BlockPermutationIsometry>;

  StockOperator(Variant v, std::size_t dimCap, NormKind nk);
  static StockOperator identity(std::size_t dimCap, NormKind nk);

  const Variant& variant() const { return v_; }
  std::size_t dimCap() const override { return dim_; }
  NormKind normKind() const override { return nk_; }
  Applied apply(const Vec& x) const override;
  Applied power(const mpz_class& n, const Vec& x) const override;
  Vec displacement(const mpz_class& n, const Vec& x) const override;
  double normBound() const override;
  std::string descriptor() const override;

 private:
  Variant v_;
  std::size_t dim_;
  NormKind nk_;
};

/// First index and length of the permutation block holding coordinate k >= 2.
struct Block {
  std::size_t start = 0;
  std::size_t length = 0;
};
Block blockOf(std::size_t k);
/// Sum of 2^-m e_{2^m+1} over the blocks that fit inside dimCap.
Vec blockVector(std::size_t dimCap, NormKind nk);

/// T^p viewed as an operator.
class PowerOperator : public Operator {
 public:
  PowerOperator(std::shared_ptr<const Operator> base, mpz_class p);
  std::size_t dimCap() const override { return base_->dimCap(); }
  NormKind normKind() const override { return base_->normKind(); }
  Applied apply(const Vec& x) const override { return base_->power(p_, x); }
  Applied power(const mpz_class& n, const Vec& x) const override { return base_->power(n * p_, x); }
  Vec displacement(const mpz_class& n, const Vec& x) const override { return base_->displacement(n * p_, x); }
  double normBound() const override;
  std::string descriptor() const override;

 private:
  std::shared_ptr<const Operator> base_;
  mpz_class p_;
};

/// S = c_0 + c_1 T + ... + c_d T^d.
class PolynomialOperator : public Operator {
 public:
  PolynomialOperator(std::shared_ptr<const Operator> base, std::vector<Complex> coeffs);
  std::size_t dimCap() const override { return base_->dimCap(); }
  NormKind normKind() const override { return base_->normKind(); }
  Applied apply(const Vec& x) const override;
  Applied power(const mpz_class& n, const Vec& x) const override;
  double normBound() const override;
  std::string descriptor() const override;
  const std::vector<Complex>& coefficients() const { return c_; }

 private:
  std::shared_ptr<const Operator> base_;
  std::vector<Complex> c_;
};

/// Numerical rank of the rows x, Tx, ..., T^{depth-1}x (singular values above tol * largest).
std::size_t krylovRank(const Operator& op, const Vec& x, std::size_t depth, double tol = 1e-9);

/// Indices k with ||lambda_k| - 1| <= tol; Diagonal only.
NatSet unimodularEigenIndices(const StockOperator& op, double tol);

}  // namespace recurlab
