// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/json_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"

namespace recurlab {

namespace {

mpz_class bigFromJson(const Json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    mpz_class v;
    if (v.set_str(j.get<std::string>(), 10) != 0) fail(ErrorCode::InvalidArgument, "bad integer '" + j.get<std::string>() + "'");
    return v;
  }
  fail(ErrorCode::InvalidArgument, "expected an integer or decimal string");
}

Complex complexFromJson(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::InvalidArgument, "complex numbers are [re, im] pairs");
}

NormKind normFromJson(const Json& j) {
  if (j.is_number()) return NormKind::lp(j.get<double>());
  return NormKind::parse(j.get<std::string>());
}

}  // namespace

Json rationalJson(const mpq_class& q) { return Json{{"num", q.get_num().get_ui()}, {"den", q.get_den().get_ui()}}; }

Json toJson(const NatSet& s) { return Json{{"elements", s.elements()}, {"horizon", s.horizon()}}; }

NatSet natSetFromJson(const Json& j) {
  return NatSet(j.at("elements").get<std::vector<Nat>>(), j.at("horizon").get<Nat>());
}

Json toJson(const DensityReport& r) {
  Json j{{"horizon", r.horizon},
         {"window", r.window},
         {"upperDensityEst", rationalJson(r.upperDensityEst)},
         {"lowerDensityEst", rationalJson(r.lowerDensityEst)},
         {"upperBanachEst", rationalJson(r.upperBanachEst)},
         {"lowerBanachEst", rationalJson(r.lowerBanachEst)},
         {"maxRun", r.maxRun},
         {"maxApLength", r.maxApLength},
         {"containsConsecutivePair", r.containsConsecutivePair}};
  j["syndeticGap"] = r.syndeticGap ? Json(*r.syndeticGap) : Json(nullptr);
  return j;
}

Json toJson(const Vec& v) {
  Json coords = Json::array();
  for (const auto& z : v.coords()) coords.push_back({z.real(), z.imag()});
  return Json{{"dimCap", v.dimCap()}, {"normKind", v.normKind().name()}, {"coords", coords}};
}

Vec vecFromJson(const Json& j) {
  const std::size_t dim = j.at("dimCap").get<std::size_t>();
  const NormKind nk = normFromJson(j.value("normKind", Json("2")));
  Vec v(dim, nk);
  const auto& c = j.at("coords");
  require(c.size() <= dim, "more coordinates than dimCap");
  for (std::size_t i = 0; i < c.size(); ++i) v.coords()[i] = complexFromJson(c[i]);
  return v;
}

SetGenerator generatorFromJson(const Json& j) {
  require(j.is_object() && j.size() == 1, "a generator is an object with exactly one variant key");
  const std::string key = j.begin().key();
  const Json& val = j.begin().value();
  if (key == "explicit") return {gen::Explicit{val.get<std::vector<Nat>>()}};
  if (key == "ap") return {gen::ArithmeticProgression{val.at("start").get<Nat>(), val.at("diff").get<Nat>()}};
  if (key == "multiples") return {gen::Multiples{val.get<Nat>()}};
  if (key == "ip") return {gen::IpClosure{val.get<std::vector<Nat>>()}};
  if (key == "delta") return {gen::DeltaOf{natSetFromJson(val)}};
  if (key == "rotation") return {gen::RotationReturn{bigFromJson(val.at("m")), val.at("eps").get<double>()}};
  if (key == "union" || key == "intersection") {
    std::vector<SetGenerator> parts;
    for (const auto& p : val) parts.push_back(generatorFromJson(p));
    if (key == "union") return {gen::Union{std::move(parts)}};
    return {gen::Intersection{std::move(parts)}};
  }
  fail(ErrorCode::InvalidArgument, "unknown generator '" + key + "'");
}

Json toJson(const SetGenerator& g) {
  struct V {
    Json operator()(const gen::Explicit& e) const { return {{"explicit", e.values}}; }
    Json operator()(const gen::ArithmeticProgression& e) const { return {{"ap", {{"start", e.start}, {"diff", e.diff}}}}; }
    Json operator()(const gen::Multiples& e) const { return {{"multiples", e.p}}; }
    Json operator()(const gen::IpClosure& e) const { return {{"ip", e.generators}}; }
    Json operator()(const gen::DeltaOf& e) const { return {{"delta", toJson(e.base)}}; }
    Json operator()(const gen::RotationReturn& e) const { return {{"rotation", {{"m", e.m.get_str()}, {"eps", e.eps}}}}; }
    Json operator()(const gen::Union& e) const {
      Json a = Json::array();
      for (const auto& p : e.parts) a.push_back(toJson(p));
      return {{"union", a}};
    }
    Json operator()(const gen::Intersection& e) const {
      Json a = Json::array();
      for (const auto& p : e.parts) a.push_back(toJson(p));
      return {{"intersection", a}};
    }
  };
  return std::visit(V{}, g.v);
}

std::shared_ptr<const Operator> operatorFromJson(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "auge") return std::make_shared<AugeOperator>(AugeDescriptor::fromJson(j.dump()));
  if (type == "auge-rotation") {
    const std::size_t levels = j.at("levels").get<std::size_t>();
    auto mod = std::make_shared<const ModulusSequence>(ModulusSequence::build(
        j.at("foldN").get<std::size_t>(), levels, j.value("growthRule", std::string(kDefaultGrowthRule))));
    return std::make_shared<AugeRotation>(mod, j.value("dimCap", levels), normFromJson(j.value("normKind", Json("2"))));
  }
  const std::size_t dim = j.at("dimCap").get<std::size_t>();
  const NormKind nk = normFromJson(j.value("normKind", Json("2")));
  if (type == "identity") return std::make_shared<StockOperator>(StockOperator::identity(dim, nk));
  if (type == "diagonal") {
    std::vector<Eigenvalue> ev(dim, UnitRoot{0, 1});
    const auto& list = j.at("eigenvalues");
    require(list.size() <= dim, "more eigenvalues than dimCap");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      if (e.contains("root"))
        ev[i] = UnitRoot{bigFromJson(e.at("root")[0]), bigFromJson(e.at("root")[1])};
      else
        ev[i] = complexFromJson(e.at("value"));
    }
    return std::make_shared<StockOperator>(StockOperator::Diagonal{std::move(ev)}, dim, nk);
  }
  if (type == "shift")
    return std::make_shared<StockOperator>(StockOperator::WeightedBackwardShift{complexFromJson(j.at("lambda"))}, dim, nk);
  if (type == "blockperm") return std::make_shared<StockOperator>(StockOperator::BlockPermutationIsometry{}, dim, nk);
  fail(ErrorCode::InvalidArgument, "unknown operator type '" + type + "'");
}

Vec randomUnitVec(std::size_t dimCap, std::size_t support, NormKind nk, std::mt19937_64& rng) {
  require(support >= 1 && support <= dimCap, "random support must lie in [1, dimCap]");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dimCap, nk);
  for (std::size_t k = 1; k <= support; ++k) v.coord(k) = Complex(gauss(rng), gauss(rng));
  const double n = v.norm();
  v *= Complex(1.0 / n, 0.0);
  return v;
}

Vec vecFromSpec(const Json& spec, std::size_t dimCap, NormKind nk, std::mt19937_64& rng) {
  require(spec.is_object() && spec.size() == 1, "a vector spec is an object with exactly one key");
  const std::string key = spec.begin().key();
  const Json& val = spec.begin().value();
  if (key == "basis") return Vec::basis(val.get<std::size_t>(), dimCap, nk);
  if (key == "coords") {
    Vec v(dimCap, nk);
    require(val.size() <= dimCap, "more coordinates than dimCap");
    for (std::size_t i = 0; i < val.size(); ++i) v.coords()[i] = complexFromJson(val[i]);
    return v;
  }
  if (key == "random") return randomUnitVec(dimCap, val.value("support", dimCap), nk, rng);
  if (key == "uniform") {
    const std::size_t s = val.value("support", dimCap);
    require(s >= 1 && s <= dimCap, "uniform support must lie in [1, dimCap]");
    Vec v(dimCap, nk);
    for (std::size_t k = 1; k <= s; ++k) v.coord(k) = 1.0;
    v *= Complex(1.0 / v.norm(), 0.0);
    return v;
  }
  if (key == "blockVector") return blockVector(dimCap, nk);
  fail(ErrorCode::InvalidArgument, "unknown vector spec '" + key + "'");
}

std::string fnv1aHex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string formatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace recurlab
