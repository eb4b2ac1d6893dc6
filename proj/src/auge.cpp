// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <set>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"

namespace recurlab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// sin(pi r / m) for 0 <= r <= m, folded so that r near m keeps full precision.
double sinPiRatio(const mpz_class& r, const mpz_class& m) {
  if (2 * r > m) return std::sin(kPi * ratioToDouble(m - r, m));
  return std::sin(kPi * ratioToDouble(r, m));
}

mpq_class parseRational(const json& j) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (j.is_string()) {
    mpq_class q;
    if (q.set_str(j.get<std::string>(), 10) != 0) fail(ErrorCode::InvalidArgument, "bad rational '" + j.get<std::string>() + "'");
    q.canonicalize();
    return q;
  }
  fail(ErrorCode::InvalidArgument, "mesh values must be integers or strings like \"1/2\"");
}

}  // namespace

std::string AugeDescriptor::toJson() const {
  json mesh = json::array();
  for (const auto& q : meshSchedule) mesh.push_back(q.get_str());
  json j{{"type", "auge"},         {"foldN", foldN},   {"levels", levels},
         {"growthRule", growthRule}, {"meshSchedule", mesh}, {"dimCap", dimCap},
         {"normKind", normKind.name()}};
  return j.dump();
}

AugeDescriptor AugeDescriptor::fromJson(const std::string& text) {
  const json j = json::parse(text);
  AugeDescriptor d;
  if (j.contains("type") && j.at("type") != "auge") fail(ErrorCode::InvalidArgument, "descriptor type is not auge");
  d.foldN = j.at("foldN").get<std::size_t>();
  d.levels = j.at("levels").get<std::size_t>();
  d.growthRule = j.value("growthRule", std::string(kDefaultGrowthRule));
  if (j.contains("meshSchedule")) {
    d.meshSchedule.clear();
    for (const auto& v : j.at("meshSchedule")) d.meshSchedule.push_back(parseRational(v));
  }
  d.dimCap = j.value("dimCap", d.levels);
  d.normKind = NormKind::parse(j.value("normKind", std::string("2")));
  return d;
}

Complex LambdaValue::value() const { return exactZero ? Complex(0.0, 0.0) : std::polar(modulus, phase); }

AugeOperator::AugeOperator(const AugeDescriptor& d) : d_(d) {
  if (d.dimCap < d.levels) fail(ErrorCode::InvalidArgument, "dimCap must be >= levels");
  mod_ = std::make_shared<const ModulusSequence>(ModulusSequence::build(d.foldN, d.levels, d.growthRule));
  grid_ = buildGrid(d.foldN, d.meshSchedule, d.levels - d.foldN - 1, d.normKind);
  basis_ = BasisSystem{d.dimCap, 1.0, d.normKind};
  growthRatio_.assign(d.levels, 1.0);
  sinOne_.assign(d.levels, 0.0);
  for (std::size_t k = 1; k <= d.levels; ++k) {
    if (k >= 2) growthRatio_[k - 1] = ratioToDouble(mod_->m(k), mod_->m(k - 1));
    sinOne_[k - 1] = std::sin(kPi * ratioToDouble(1, mod_->m(k)));
  }
}

Complex AugeOperator::functionalValue(std::size_t k, const Vec& x) const {
  const auto& a = grid_.atLevel(k).alpha;
  Complex acc = 0.0;
  for (std::size_t j = 1; j <= d_.foldN + 1; ++j) acc += a[j - 1] * x.coord(j);
  return acc;
}

LambdaValue AugeOperator::lambdaKn(std::size_t k, const mpz_class& n) const {
  if (k < d_.foldN + 2 || k > levels()) fail(ErrorCode::OutOfRange, "lambdaKn level out of range");
  require(n >= 1, "lambdaKn needs n >= 1");
  const mpz_class& m = mod_->m(k);
  mpz_class r = n % m;
  LambdaValue v;
  if (r == 0) {
    v.exactZero = true;
    return v;
  }
  const double rd = r.get_d();
  double mod;
  if (sinOne_[k - 1] > 0.0 && std::isnormal(sinOne_[k - 1])) {
    mod = sinPiRatio(r, m) / sinOne_[k - 1];
  } else {
    mod = rd * sinc(kPi * ratioToDouble(r, m)) / sinc(kPi * ratioToDouble(1, m));
  }
  v.modulus = std::min(mod, rd);  // |lambda_{k,n}| <= r holds exactly
  v.phase = kPi * ratioToDouble(r - 1, m);
  return v;
}

Complex AugeOperator::scaledLambda(std::size_t k, const mpz_class& r) const {
  if (r == 0) return 0.0;
  const mpz_class& m = mod_->m(k);
  // |lambda_{k,n}| / m_{k-1} = (m_k / m_{k-1}) sin(pi r/m_k) / (pi sinc(pi/m_k)).
  const double s1 = sinc(kPi * ratioToDouble(1, m));
  double mag = growthRatio_[k - 1] * sinPiRatio(r, m) / (kPi * s1);
  mag = std::min(mag, ratioToDouble(r, mod_->m(k - 1)));
  return std::polar(mag, kPi * ratioToDouble(r - 1, m));
}

PowerPlan AugeOperator::plan(const mpz_class& n) const {
  require(n >= 0, "power exponent must be >= 0");
  PowerPlan p;
  p.n = n;
  const std::size_t L = levels();
  p.r.resize(L);
  mpz_class cur = n;
  for (std::size_t k = L; k >= 1; --k) {
    const mpz_class& m = mod_->m(k);
    if (cur >= m) cur %= m;
    p.r[k - 1] = cur;
  }
  return p;
}

Vec AugeOperator::displacement(const PowerPlan& p, const Vec& x) const {
  checkDim(x);
  Vec out(d_.dimCap, d_.normKind);
  if (p.n == 0) return out;
  const std::size_t N = d_.foldN;
  for (std::size_t k = N + 2; k <= levels(); ++k) {
    const mpz_class& r = p.r[k - 1];
    if (r == 0) continue;
    Complex v = 0.0;
    if (x.coord(k) != Complex(0.0, 0.0)) v += unitRootMinusOne(r, mod_->m(k)) * x.coord(k);
    const Complex c = functionalValue(k, x);
    if (c != Complex(0.0, 0.0)) v += scaledLambda(k, r) * c;
    out.coord(k) = v;
  }
  return out;
}

Vec AugeOperator::displacement(const mpz_class& n, const Vec& x) const { return displacement(plan(n), x); }

Applied AugeOperator::power(const mpz_class& n, const Vec& x) const {
  checkDim(x);
  if (n == 0) return {x, 0.0};
  const PowerPlan p = plan(n);
  Vec out = x;
  for (std::size_t k = d_.foldN + 2; k <= levels(); ++k) {
    const mpz_class& r = p.r[k - 1];
    if (r == 0) continue;
    Complex v = unitRootValue(r, mod_->m(k)) * x.coord(k);
    const Complex c = functionalValue(k, x);
    if (c != Complex(0.0, 0.0)) v += scaledLambda(k, r) * c;
    out.coord(k) = v;
  }
  return {std::move(out), tailBound(n, x)};
}

Applied AugeOperator::apply(const Vec& x) const {
  checkDim(x);
  Vec out = x;
  for (std::size_t k = d_.foldN + 2; k <= levels(); ++k) {
    const mpz_class& m = mod_->m(k);
    Complex v = unitRootValue(1, m) * x.coord(k);
    const Complex c = functionalValue(k, x);
    if (c != Complex(0.0, 0.0)) v += ratioToDouble(1, mod_->m(k - 1)) * c;
    out.coord(k) = v;
  }
  return {std::move(out), tailBound(1, x)};
}

double AugeOperator::tailBound(const mpz_class& n, const Vec& x) const {
  const std::size_t L = levels();
  const double M = grid_.normEquivUpper();
  const double N1 = static_cast<double>(d_.foldN + 1);
  // Perturbation beyond level L: |lambda_{k,n}| <= n.
  double tail = M * N1 * basis_.K * x.norm() * n.get_d() * mod_->inverseTail();
  if (d_.dimCap > L) {
    // R rotates coordinates beyond L by at most 2 pi n / m_{L+1}.
    std::vector<Complex> beyond(x.coords().begin() + static_cast<long>(L), x.coords().end());
    const double turn = 2.0 * kPi * ratioToDouble(n, mod_->m(L) * mod_->growth(L));
    tail += normOf(beyond, d_.normKind) * std::min(2.0, turn);
  }
  return tail;
}

double AugeOperator::perturbationBound() const {
  double s = 0.0;
  for (std::size_t k = d_.foldN + 2; k <= levels(); ++k) s += ratioToDouble(1, mod_->m(k - 1));
  return grid_.normEquivUpper() * static_cast<double>(d_.foldN + 1) * basis_.K * s;
}

double AugeOperator::normBound() const { return 1.0 + perturbationBound(); }

std::string AugeOperator::descriptor() const { return d_.toJson(); }

std::vector<mpz_class> latticeCandidates(const ModulusSequence& mod, const mpz_class& budget, unsigned long head,
                                         std::size_t maxLevel) {
  const std::size_t L = mod.levels();
  const std::size_t top = maxLevel == 0 ? L : std::min(maxLevel, L);
  const mpz_class limit = mod.m(L) / 2;  // 2n <= m_L
  auto ok = [&](const mpz_class& n) { return n >= 1 && n <= budget && n <= limit; };
  std::set<mpz_class> out;
  for (unsigned long n = 1; n <= head; ++n) {
    mpz_class v(n);
    if (!ok(v)) break;
    out.insert(v);
  }
  for (std::size_t j = mod.foldN() + 1; j <= top; ++j) {
    const mpz_class g = mod.growth(j);
    for (unsigned long c = 1; c <= 64; ++c) {
      if (!mpz_divisible_ui_p(g.get_mpz_t(), c)) continue;
      const mpz_class base = mod.m(j) * c;
      for (int delta = -1; delta <= 1; ++delta) {
        mpz_class v = base + delta;
        if (ok(v)) out.insert(v);
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<mpz_class> AugeOperator::candidateTimes(const mpz_class& budget) const {
  return latticeCandidates(*mod_, budget);
}

std::shared_ptr<AugeRotation> AugeOperator::rotation() const {
  return std::make_shared<AugeRotation>(mod_, d_.dimCap, d_.normKind);
}

AugeRotation::AugeRotation(std::shared_ptr<const ModulusSequence> mod, std::size_t dimCap, NormKind nk)
    : mod_(std::move(mod)), dim_(dimCap), nk_(nk) {
  require(dim_ >= mod_->levels(), "dimCap must be >= levels");
}

Applied AugeRotation::power(const mpz_class& n, const Vec& x) const {
  checkDim(x);
  Vec out = x;
  for (std::size_t k = 1; k <= mod_->levels(); ++k)
    if (x.coord(k) != Complex(0.0, 0.0)) out.coord(k) *= unitRootValue(n, mod_->m(k));
  return {std::move(out), 0.0};
}

Vec AugeRotation::displacement(const mpz_class& n, const Vec& x) const {
  checkDim(x);
  Vec out(dim_, nk_);
  for (std::size_t k = 1; k <= mod_->levels(); ++k)
    if (x.coord(k) != Complex(0.0, 0.0)) out.coord(k) = unitRootMinusOne(n, mod_->m(k)) * x.coord(k);
  return out;
}

std::string AugeRotation::descriptor() const {
  json j{{"type", "auge-rotation"}, {"foldN", mod_->foldN()},      {"levels", mod_->levels()},
         {"growthRule", mod_->rule()}, {"dimCap", dim_}, {"normKind", nk_.name()}};
  return j.dump();
}

std::vector<mpz_class> AugeRotation::candidateTimes(const mpz_class& budget) const {
  return latticeCandidates(*mod_, budget);
}

RigidityResult rigidityDefect(const AugeOperator& op, std::size_t j, const std::vector<Vec>& sample) {
  if (j < 1 || j + 1 > op.levels()) fail(ErrorCode::OutOfRange, "rigidity index must satisfy j <= levels - 1");
  const auto R = op.rotation();
  RigidityResult res;
  const mpz_class& n = op.modulus().m(j);
  for (const auto& x : sample) res.defect = std::max(res.defect, R->displacement(n, x).norm());
  res.bound = op.modulus().rigidityBound(j, op.basis().K);
  return res;
}

std::vector<Complex> annihilatingFunctional(const AugeOperator& op, const std::vector<Vec>& tuple) {
  const std::size_t N = op.foldN();
  if (tuple.size() != N) fail(ErrorCode::InvalidArgument, "tuple length must equal foldN");
  Eigen::MatrixXcd A(N, N + 1);
  double rowMax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    require(tuple[i].dimCap() == op.dimCap(), "dimension mismatch");
    for (std::size_t j = 0; j <= N; ++j) A(i, j) = tuple[i].coord(j + 1);
    rowMax = std::max(rowMax, A.row(i).norm());
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * std::max(1.0, s(0))) ++rank;

  // Among the kernel basis vectors prefer the one whose dominant entry comes first.
  std::vector<Complex> best;
  std::size_t bestIdx = N + 2;
  for (std::size_t c = rank; c <= N; ++c) {
    Eigen::VectorXcd v = svd.matrixV().col(static_cast<Eigen::Index>(c));
    std::vector<Complex> w(v.data(), v.data() + v.size());
    double top = 0.0;
    for (const auto& z : w) top = std::max(top, std::abs(z));
    for (auto& z : w) z /= top;
    const std::size_t idx = findDominantIndex(w);
    if (idx < bestIdx) {
      bestIdx = idx;
      best = std::move(w);
    }
  }
  const Complex rot = std::conj(best[bestIdx - 1]) / std::abs(best[bestIdx - 1]);
  for (auto& z : best) {
    z *= rot;
    if (std::abs(z) > 1.0) z /= std::abs(z);
  }
  best[bestIdx - 1] = 1.0;

  for (std::size_t i = 0; i < N; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j <= N; ++j) acc += A(i, j) * best[j];
    if (std::abs(acc) > 1e-10 * std::max(rowMax, 1e-300) && rowMax > 0.0)
      fail(ErrorCode::Internal, "annihilating functional residual too large");
  }
  return best;
}

std::size_t findDominantIndex(const std::vector<Complex>& w) {
  double top = 0.0;
  for (const auto& z : w) top = std::max(top, std::abs(z));
  if (top == 0.0) fail(ErrorCode::InvalidArgument, "findDominantIndex of the zero functional");
  // Entries within rounding of the maximum count as ties.
  for (std::size_t i = 0; i < w.size(); ++i)
    if (std::abs(w[i]) >= top * (1.0 - 1e-12)) return i + 1;
  return 1;
}

RecurrenceWitness recurrenceWitness(const AugeOperator& op, const std::vector<Vec>& tuple, double gridTol) {
  require(gridTol > 0.0, "gridTol must be positive");
  RecurrenceWitness w;
  w.alpha = annihilatingFunctional(op, tuple);
  const auto& grid = op.grid();
  const std::size_t N = op.foldN();
  w.finestMesh = grid.meshOf(op.levels());
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t k = N + 2; k <= op.levels(); ++k) {
    const auto& a = grid.atLevel(k).alpha;
    double dist = 0.0;
    for (std::size_t j = 0; j <= N; ++j) dist = std::max(dist, std::abs(a[j] - w.alpha[j]));
    if (dist > std::max(gridTol, grid.meshOf(k)) || dist > last) continue;
    last = dist;
    RecurrenceStep s;
    s.level = k;
    s.returnTime = op.modulus().m(k - 1);
    s.gridDistance = dist;
    const PowerPlan p = op.plan(s.returnTime);
    for (const auto& x : tuple) s.distances.push_back(op.displacement(p, x).norm());
    w.steps.push_back(std::move(s));
  }
  if (w.steps.empty())
    fail(ErrorCode::InvalidArgument,
         "no grid entry within gridTol; finest available mesh is " + std::to_string(w.finestMesh));
  return w;
}

double headDefect(const AugeOperator& op, const mpz_class& n) {
  const std::size_t N = op.foldN();
  const std::size_t L = op.levels();
  if (2 * n > op.modulus().m(L))
    fail(ErrorCode::OutOfRange, "candidate " + n.get_str() + " beyond certified range 2n <= m_levels");
  const PowerPlan p = op.plan(n);
  // T^n e_i - e_i lives on levels N+2..L with entries scaledLambda * alpha_i.
  std::vector<Complex> scaled(L + 1, 0.0);
  for (std::size_t k = N + 2; k <= L; ++k) scaled[k] = op.scaledLambda(k, p.r[k - 1]);
  double worst = 0.0;
  std::vector<Complex> col(L - N - 1);
  for (std::size_t i = 0; i <= N; ++i) {
    for (std::size_t k = N + 2; k <= L; ++k) col[k - N - 2] = scaled[k] * op.grid().atLevel(k).alpha[i];
    worst = std::max(worst, normOf(col, op.normKind()));
  }
  return worst;
}

NonRecurrenceResult nonRecurrenceScan(const AugeOperator& op, const std::vector<mpz_class>& candidates) {
  require(!candidates.empty(), "candidate list is empty");
  NonRecurrenceResult res;
  res.centerBound = 1.0 / (op.basis().K * kPi);
  res.minOverN = std::numeric_limits<double>::infinity();
  for (const auto& n : candidates) {
    if (n < 1) continue;
    const double d = headDefect(op, n);
    ++res.scanned;
    if (d < res.minOverN) {
      res.minOverN = d;
      res.argmin = n;
    }
  }
  require(res.scanned > 0, "no candidate n >= 1");
  return res;
}

double ballThreshold(const AugeOperator& op, double eps) {
  const double N1 = static_cast<double>(op.foldN() + 1);
  return 1.0 / (op.basis().K * kPi) - ((N1 + kPi) / kPi) * eps;
}

}  // namespace recurlab
