// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "recurlab/auge.hpp"
#include "recurlab/dynamics.hpp"
#include "recurlab/error.hpp"
#include "recurlab/report.hpp"

namespace recurlab {

namespace {

const std::set<std::string> kKinds{"families", "auge-recur", "auge-nonrecur", "rigidity",
                                   "orbit",    "qr-search",  "period",        "krylov"};

constexpr Nat kMaxHorizon = 50'000'000;
constexpr Nat kMaxDim = 100'000;
constexpr Nat kMaxLevels = 4000;

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Collects diagnostics while copying validated values (and defaults) into `out`.
class Checker {
 public:
  std::vector<Diagnostic> diags;

  void err(const std::string& path, const std::string& msg) { diags.push_back({path, msg}); }

  bool keys(const Json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      err(path, "must be an object");
      return false;
    }
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) err(sub(path, k), "unknown key");
    return true;
  }

  std::optional<Nat> nat(const Json& obj, Json& out, const std::string& path, const std::string& key,
                         std::optional<Nat> def, Nat lo, Nat hi) {
    const std::string p = sub(path, key);
    if (!obj.contains(key)) {
      if (!def) {
        err(p, "is required");
        return std::nullopt;
      }
      out[key] = *def;
      return def;
    }
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) {
      err(p, "must be an integer");
      return std::nullopt;
    }
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
      err(p, "must be non-negative");
      return std::nullopt;
    }
    const Nat n = v.get<Nat>();
    if (n < lo || n > hi) {
      err(p, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    out[key] = n;
    return n;
  }

  std::optional<double> real(const Json& obj, Json& out, const std::string& path, const std::string& key,
                             std::optional<double> def, bool strictlyPositive) {
    const std::string p = sub(path, key);
    if (!obj.contains(key)) {
      if (!def) {
        err(p, "is required");
        return std::nullopt;
      }
      out[key] = *def;
      return def;
    }
    const Json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      err(p, "must be a finite number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (strictlyPositive && !(x > 0.0)) {
      err(p, "must be positive");
      return std::nullopt;
    }
    out[key] = x;
    return x;
  }

  std::optional<mpz_class> big(const Json& obj, Json& out, const std::string& path, const std::string& key,
                               std::optional<std::string> def) {
    const std::string p = sub(path, key);
    mpz_class v;
    if (!obj.contains(key)) {
      if (!def) {
        err(p, "is required");
        return std::nullopt;
      }
      v.set_str(*def, 10);
    } else if (obj.at(key).is_number_unsigned()) {
      v = mpz_class(std::to_string(obj.at(key).get<Nat>()));
    } else if (obj.at(key).is_string()) {
      if (v.set_str(obj.at(key).get<std::string>(), 10) != 0) {
        err(p, "must be a decimal integer");
        return std::nullopt;
      }
    } else {
      err(p, "must be a non-negative integer or decimal string");
      return std::nullopt;
    }
    if (v < 1) {
      err(p, "must be >= 1");
      return std::nullopt;
    }
    out[key] = v.get_str();
    return v;
  }

  std::optional<mpq_class> rational(const Json& obj, Json& out, const std::string& path, const std::string& key,
                                    std::optional<std::string> def) {
    const std::string p = sub(path, key);
    std::string text;
    if (!obj.contains(key)) {
      if (!def) {
        err(p, "is required");
        return std::nullopt;
      }
      text = *def;
    } else if (obj.at(key).is_string()) {
      text = obj.at(key).get<std::string>();
    } else if (obj.at(key).is_number_integer()) {
      text = std::to_string(obj.at(key).get<long long>());
    } else {
      err(p, "must be a rational string such as \"1/5\"");
      return std::nullopt;
    }
    mpq_class q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) {
      err(p, "must be a rational string such as \"1/5\"");
      return std::nullopt;
    }
    q.canonicalize();
    out[key] = q.get_str();
    return q;
  }

  std::optional<std::string> choice(const Json& obj, Json& out, const std::string& path, const std::string& key,
                                    std::optional<std::string> def, const std::set<std::string>& allowed) {
    const std::string p = sub(path, key);
    std::string v;
    if (!obj.contains(key)) {
      if (!def) {
        err(p, "is required");
        return std::nullopt;
      }
      v = *def;
    } else if (!obj.at(key).is_string()) {
      err(p, "must be a string");
      return std::nullopt;
    } else {
      v = obj.at(key).get<std::string>();
    }
    if (!allowed.count(v)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      err(p, "must be one of {" + list + "}");
      return std::nullopt;
    }
    out[key] = v;
    return v;
  }
};

// ---------------------------------------------------------------------------
// Validation of the pieces shared by several kinds.

std::shared_ptr<const Operator> checkOperator(Checker& c, const Json& j, Json& out) {
  const std::string path = "operator";
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    c.err(sub(path, "type"), "is required");
    return nullptr;
  }
  const std::string type = j.at("type").get<std::string>();
  std::set<std::string> allowed{"type", "dimCap", "normKind"};
  if (type == "auge") allowed.insert({"foldN", "levels", "growthRule", "meshSchedule"});
  else if (type == "auge-rotation") allowed.insert({"foldN", "levels", "growthRule"});
  else if (type == "diagonal") allowed.insert("eigenvalues");
  else if (type == "shift") allowed.insert("lambda");
  else if (type != "identity" && type != "blockperm") {
    c.err(sub(path, "type"), "unknown operator type '" + type + "'");
    return nullptr;
  }
  c.keys(j, path, allowed);
  out = j;
  out["type"] = type;
  const std::size_t before = c.diags.size();
  std::optional<Nat> levels;
  if (type == "auge" || type == "auge-rotation") {
    auto foldN = c.nat(j, out, path, "foldN", 1, 1, 8);
    levels = c.nat(j, out, path, "levels", 20, 4, kMaxLevels);
    if (foldN && levels && *levels < *foldN + 3) c.err(sub(path, "levels"), "must be at least foldN + 3");
    c.choice(j, out, path, "growthRule", std::string(kDefaultGrowthRule), {"pow2k2-ksq", "pow2k2-k"});
    if (type == "auge") {
      if (!j.contains("meshSchedule")) out["meshSchedule"] = Json::array({"1", "1/2", "1/4", "1/8"});
      const Json& ms = out["meshSchedule"];
      if (!ms.is_array() || ms.empty()) c.err(sub(path, "meshSchedule"), "must be a nonempty array of rationals");
    }
  }
  if (!c.nat(j, out, path, "dimCap", levels, levels.value_or(1), kMaxDim)) return nullptr;
  if (!j.contains("normKind")) out["normKind"] = "2";
  if (c.diags.size() != before) return nullptr;
  try {
    return operatorFromJson(out);
  } catch (const std::exception& e) {
    c.err(path, e.what());
    return nullptr;
  }
}

void checkVecSpec(Checker& c, const Json& j, const std::string& path, std::size_t dim) {
  if (!j.is_object() || j.size() != 1) {
    c.err(path, "must be an object with exactly one of basis, coords, random, uniform, blockVector");
    return;
  }
  const std::string key = j.begin().key();
  const Json& val = j.begin().value();
  if (key == "basis") {
    if (!val.is_number_unsigned() || val.get<Nat>() < 1 || val.get<Nat>() > dim)
      c.err(sub(path, key), "must be an index in [1, dimCap]");
  } else if (key == "coords") {
    if (!val.is_array() || val.size() > dim) c.err(sub(path, key), "must be an array of at most dimCap [re, im] pairs");
  } else if (key == "random" || key == "uniform") {
    Json ignored;
    if (c.keys(val, sub(path, key), {"support"})) c.nat(val, ignored, sub(path, key), "support", dim, 1, dim);
  } else if (key == "blockVector") {
    if (!val.is_boolean() || !val.get<bool>()) c.err(sub(path, key), "must be true");
  } else {
    c.err(path, "unknown vector spec '" + key + "'");
  }
}

void checkGenerator(Checker& c, const Json& j, const std::string& path) {
  try {
    (void)generatorFromJson(j);
  } catch (const std::exception& e) {
    c.err(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Per-kind parameter validation.

void checkParams(Checker& c, const std::string& kind, const Json& p, Json& out, const Operator* op) {
  const std::string path = "params";
  const std::size_t dim = op ? op->dimCap() : 1;
  const auto* auge = dynamic_cast<const AugeOperator*>(op);
  if (kind == "families") {
    c.keys(p, path, {"set", "horizon", "window", "apLength", "pairWindow", "delta"});
    if (!p.contains("set")) c.err(sub(path, "set"), "is required");
    else {
      checkGenerator(c, p.at("set"), sub(path, "set"));
      out["set"] = p.at("set");
    }
    auto h = c.nat(p, out, path, "horizon", std::nullopt, 1, kMaxHorizon);
    auto w = c.nat(p, out, path, "window", std::nullopt, 1, kMaxHorizon);
    if (h && w && *w > *h) c.err(sub(path, "window"), "window exceeds horizon");
    c.nat(p, out, path, "apLength", 3, 2, 1000);
    if (p.contains("pairWindow")) c.nat(p, out, path, "pairWindow", std::nullopt, 2, kMaxHorizon);
    if (p.contains("delta")) {
      auto d = c.rational(p, out, path, "delta", std::nullopt);
      if (d && (*d <= 0 || *d > 1)) c.err(sub(path, "delta"), "must lie in (0, 1]");
    }
    return;
  }
  if (kind == "auge-recur" || kind == "auge-nonrecur" || kind == "rigidity") {
    if (op && !auge) c.err("operator.type", "must be auge for kind " + kind);
  }
  if (kind == "auge-recur") {
    c.keys(p, path, {"tuples", "count", "gridTol", "support"});
    c.choice(p, out, path, "tuples", std::string("head"), {"head", "random"});
    c.nat(p, out, path, "count", 20, 1, 10000);
    c.real(p, out, path, "gridTol", 0.05, true);
    c.nat(p, out, path, "support", dim, 1, dim);
  } else if (kind == "auge-nonrecur") {
    c.keys(p, path, {"head", "latticeLevels", "ballEps"});
    c.nat(p, out, path, "head", 10000, 1, 10'000'000);
    const Nat levels = auge ? auge->levels() : 1;
    c.nat(p, out, path, "latticeLevels", levels, 1, levels);
    if (p.contains("ballEps")) c.real(p, out, path, "ballEps", std::nullopt, true);
  } else if (kind == "rigidity") {
    c.keys(p, path, {"jMax", "samples", "support"});
    const Nat levels = auge ? auge->levels() : 2;
    c.nat(p, out, path, "jMax", std::min<Nat>(levels - 1, 14), 1, levels - 1);
    c.nat(p, out, path, "samples", 8, 1, 10000);
    c.nat(p, out, path, "support", dim, 1, dim);
  } else if (kind == "orbit" || kind == "period") {
    std::set<std::string> allowed{"vector", "epsilon", "horizon", "window"};
    if (kind == "period") allowed.insert({"maxPeriod", "delta"});
    c.keys(p, path, allowed);
    if (!p.contains("vector")) c.err(sub(path, "vector"), "is required");
    else {
      checkVecSpec(c, p.at("vector"), sub(path, "vector"), dim);
      out["vector"] = p.at("vector");
    }
    c.real(p, out, path, "epsilon", std::nullopt, true);
    auto h = c.nat(p, out, path, "horizon", std::nullopt, 1, 1'000'000);
    auto w = c.nat(p, out, path, "window", h ? std::max<Nat>(1, *h / 10) : 1, 1, kMaxHorizon);
    if (h && w && *w > *h) c.err(sub(path, "window"), "window exceeds horizon");
    if (kind == "period") {
      c.nat(p, out, path, "maxPeriod", 100, 1, 1'000'000);
      auto d = c.rational(p, out, path, "delta", std::string("1/2"));
      if (d && (*d <= 0 || *d > 1)) c.err(sub(path, "delta"), "must lie in (0, 1]");
    }
  } else if (kind == "qr-search") {
    c.keys(p, path, {"samples", "tolSchedule", "budget"});
    if (!p.contains("samples") || !p.at("samples").is_array() || p.at("samples").empty()) {
      c.err(sub(path, "samples"), "must be a nonempty array of vector specs");
    } else {
      for (std::size_t i = 0; i < p.at("samples").size(); ++i)
        checkVecSpec(c, p.at("samples")[i], idx(sub(path, "samples"), i), dim);
      out["samples"] = p.at("samples");
    }
    const std::string tp = sub(path, "tolSchedule");
    if (!p.contains("tolSchedule")) {
      c.err(tp, "is required");
    } else if (p.at("tolSchedule").is_array()) {
      const Json& ts = p.at("tolSchedule");
      if (ts.empty()) c.err(tp, "must not be empty");
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!ts[i].is_number() || !(ts[i].get<double>() > 0.0)) c.err(idx(tp, i), "must be positive");
        else if (i > 0 && ts[i - 1].is_number() && ts[i].get<double>() > ts[i - 1].get<double>())
          c.err(idx(tp, i), "schedule must be non-increasing");
      }
      out["tolSchedule"] = ts;
    } else if (p.at("tolSchedule").is_object()) {
      Json o;
      if (c.keys(p.at("tolSchedule"), tp, {"rigidityCount", "scale"})) {
        c.nat(p.at("tolSchedule"), o, tp, "rigidityCount", std::nullopt, 1, 1000);
        c.real(p.at("tolSchedule"), o, tp, "scale", 1.0, true);
      }
      if (!dynamic_cast<const AugeRotation*>(op) && !auge)
        c.err(tp, "rigidity-bound schedules need an auge or auge-rotation operator");
      out["tolSchedule"] = o;
    } else {
      c.err(tp, "must be an array of tolerances or {rigidityCount, scale}");
    }
    c.big(p, out, path, "budget", std::string("10000"));
  } else if (kind == "krylov") {
    c.keys(p, path, {"vector", "depths", "tol"});
    if (!p.contains("vector")) c.err(sub(path, "vector"), "is required");
    else {
      checkVecSpec(c, p.at("vector"), sub(path, "vector"), dim);
      out["vector"] = p.at("vector");
    }
    if (!p.contains("depths") || !p.at("depths").is_array() || p.at("depths").empty()) {
      c.err(sub(path, "depths"), "must be a nonempty array of depths");
    } else {
      for (std::size_t i = 0; i < p.at("depths").size(); ++i) {
        const Json& d = p.at("depths")[i];
        if (!d.is_number_unsigned() || d.get<Nat>() < 1 || d.get<Nat>() > 5000)
          c.err(idx(sub(path, "depths"), i), "must be an integer in [1, 5000]");
      }
      out["depths"] = p.at("depths");
    }
    c.real(p, out, path, "tol", 1e-9, true);
  }
}

// ---------------------------------------------------------------------------
// Runners.

struct Ctx {
  Json params;
  std::shared_ptr<const Operator> op;
  std::mt19937_64 rng;
  std::vector<std::string> formats;
  Json result = Json::object();
  std::string status = "ok";
  std::optional<std::string> csv;
  std::optional<std::string> svg;

  bool wants(const std::string& f) const { return std::find(formats.begin(), formats.end(), f) != formats.end(); }
};

Json bigJson(const mpz_class& v) { return v.get_str(); }

std::vector<Json> headElements(const NatSet& s, std::size_t n) {
  std::vector<Json> out;
  for (std::size_t i = 0; i < s.size() && i < n; ++i) out.push_back(s.elements()[i]);
  return out;
}

void runFamilies(Ctx& x) {
  const Json& p = x.params;
  const NatSet a = materialize(generatorFromJson(p.at("set")), p.at("horizon").get<Nat>());
  const Nat W = p.at("window").get<Nat>();
  const DensityReport rep = densityProfile(a, W);
  x.result["size"] = a.size();
  x.result["headElements"] = headElements(a, 64);
  x.result["density"] = toJson(rep);
  if (rep.syndeticGap) x.result["syndeticLowerBound"] = rationalJson(syndeticLowerBound(rep));
  const Nat l = p.at("apLength").get<Nat>();
  if (auto ap = containsApOfLength(a, l))
    x.result["arithmeticProgression"] = {{"length", l}, {"start", ap->start}, {"diff", ap->diff}};
  else
    x.result["arithmeticProgression"] = nullptr;
  if (p.contains("pairWindow")) {
    auto w = windowPairWitness(a, p.at("pairWindow").get<Nat>());
    x.result["pairWindowStart"] = w ? Json(*w) : Json(nullptr);
  }
  if (p.contains("delta")) {
    mpq_class d(p.at("delta").get<std::string>());
    d.canonicalize();
    const auto cls = classifyPeriodByDensity(a, rep, d);
    x.result["periodBound"] = cls.periodBound ? Json(*cls.periodBound) : Json(nullptr);
    x.result["fixedPoint"] = cls.fixedPoint;
  }
  const auto in = a.indicator();
  CsvTable t({"window_start", "count", "density"});
  Series s{"#(A in [s+1, s+W]) / W", {}};
  Nat count = 0;
  for (Nat i = 1; i <= W; ++i) count += in[i];
  for (Nat n = 0; n + W <= a.horizon(); ++n) {
    if (n > 0) count += in[n + W] - in[n];
    const double dens = static_cast<double>(count) / static_cast<double>(W);
    t.row({std::to_string(n), std::to_string(count), formatDouble(dens)});
    s.points.emplace_back(static_cast<double>(n), dens);
  }
  x.csv = t.str();
  x.svg = svgLineChart("Window density profile", "window start", "density", {s});
}

std::vector<std::vector<Vec>> recurTuples(Ctx& x, const AugeOperator& op) {
  const std::size_t N = op.foldN();
  std::vector<std::vector<Vec>> tuples;
  if (x.params.at("tuples") == "head") {
    for (std::size_t omit = 1; omit <= N + 1; ++omit) {
      std::vector<Vec> t;
      for (std::size_t i = 1; i <= N + 1; ++i)
        if (i != omit) t.push_back(Vec::basis(i, op.dimCap(), op.normKind()));
      tuples.push_back(std::move(t));
    }
  } else {
    const std::size_t count = x.params.at("count").get<std::size_t>();
    const std::size_t support = x.params.at("support").get<std::size_t>();
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<Vec> t;
      for (std::size_t i = 0; i < N; ++i) t.push_back(randomUnitVec(op.dimCap(), support, op.normKind(), x.rng));
      tuples.push_back(std::move(t));
    }
  }
  return tuples;
}

void runAugeRecur(Ctx& x) {
  const auto& op = dynamic_cast<const AugeOperator&>(*x.op);
  const double tol = x.params.at("gridTol").get<double>();
  const auto tuples = recurTuples(x, op);
  CsvTable t({"tuple", "step", "level", "return_time_digits", "grid_distance", "max_distance"});
  std::vector<Series> series;
  Json list = Json::array();
  double worstFinal = 0.0;
  for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
    const RecurrenceWitness w = recurrenceWitness(op, tuples[ti], tol);
    Series s{"tuple " + std::to_string(ti), {}};
    for (std::size_t si = 0; si < w.steps.size(); ++si) {
      const auto& st = w.steps[si];
      const double mx = *std::max_element(st.distances.begin(), st.distances.end());
      t.row({std::to_string(ti), std::to_string(si), std::to_string(st.level),
             std::to_string(st.returnTime.get_str().size()), formatDouble(st.gridDistance), formatDouble(mx)});
      s.points.emplace_back(static_cast<double>(si), mx);
    }
    if (series.size() < 8) series.push_back(std::move(s));
    const auto& fin = w.steps.back();
    const double finMax = *std::max_element(fin.distances.begin(), fin.distances.end());
    worstFinal = std::max(worstFinal, finMax);
    Json alpha = Json::array();
    for (const auto& z : w.alpha) alpha.push_back({z.real(), z.imag()});
    list.push_back({{"alpha", alpha},
                    {"steps", w.steps.size()},
                    {"finalLevel", fin.level},
                    {"finalReturnTime", bigJson(fin.returnTime)},
                    {"finalGridDistance", fin.gridDistance},
                    {"finalDistances", fin.distances}});
  }
  x.result["tuples"] = list;
  x.result["finestMesh"] = op.grid().meshOf(op.levels());
  x.result["maxFinalDistance"] = worstFinal;
  x.result["withinTenGridTol"] = worstFinal <= 10.0 * tol;
  x.csv = t.str();
  x.svg = svgLineChart("Recurrence witness distances", "witness index", "max_i ||T^n x_i - x_i||", series);
}

void runAugeNonRecur(Ctx& x) {
  const auto& op = dynamic_cast<const AugeOperator&>(*x.op);
  const auto head = x.params.at("head").get<unsigned long>();
  const auto lattice = x.params.at("latticeLevels").get<std::size_t>();
  const auto cands = latticeCandidates(op.modulus(), op.modulus().m(op.levels()) / 2, head, lattice);
  CsvTable t({"n", "head_defect"});
  Series s{"max_i ||T^n e_i - e_i||", {}};
  double best = std::numeric_limits<double>::infinity();
  mpz_class arg;
  for (const auto& n : cands) {
    const double d = headDefect(op, n);
    if (d < best) best = d, arg = n;
    t.row({n.get_str(), formatDouble(d)});
    if (n <= head) s.points.emplace_back(n.get_d(), d);
  }
  const double center = 1.0 / (op.basis().K * std::numbers::pi);
  x.result["scanned"] = cands.size();
  x.result["minOverN"] = best;
  x.result["argmin"] = bigJson(arg);
  x.result["centerBound"] = center;
  x.result["verified"] = best > center - 1e-9;
  if (x.params.contains("ballEps")) {
    const double e = x.params.at("ballEps").get<double>();
    x.result["ballThreshold"] = {{"eps", e}, {"value", ballThreshold(op, e)}};
  }
  x.csv = t.str();
  x.svg = svgLineChart("Head defect over the linear scan", "n", "max_i ||T^n e_i - e_i||",
                       {s, Series{"1/pi", {{1.0, center}, {static_cast<double>(head), center}}}});
}

void runRigidity(Ctx& x) {
  const auto& op = dynamic_cast<const AugeOperator&>(*x.op);
  const auto jMax = x.params.at("jMax").get<std::size_t>();
  const auto count = x.params.at("samples").get<std::size_t>();
  const auto support = x.params.at("support").get<std::size_t>();
  std::vector<Vec> sample;
  for (std::size_t i = 0; i < count; ++i) sample.push_back(randomUnitVec(op.dimCap(), support, op.normKind(), x.rng));
  CsvTable t({"j", "m_j_digits", "defect", "bound"});
  Series sd{"log10 defect", {}}, sb{"log10 bound", {}};
  bool under = true;
  Json rows = Json::array();
  for (std::size_t j = 1; j <= jMax; ++j) {
    const RigidityResult r = rigidityDefect(op, j, sample);
    under = under && r.defect <= r.bound;
    const std::size_t digits = op.modulus().m(j).get_str().size();
    t.row({std::to_string(j), std::to_string(digits), formatDouble(r.defect), formatDouble(r.bound)});
    rows.push_back({{"j", j}, {"mDigits", digits}, {"defect", r.defect}, {"bound", r.bound}});
    if (r.defect > 0) sd.points.emplace_back(static_cast<double>(j), std::log10(r.defect));
    sb.points.emplace_back(static_cast<double>(j), std::log10(r.bound));
  }
  x.result["rows"] = rows;
  x.result["defectUnderBound"] = under;
  x.csv = t.str();
  x.svg = svgLineChart("Rigidity defect along m_j", "j", "log10", {sd, sb});
}

Vec paramVec(Ctx& x, const Json& spec) { return vecFromSpec(spec, x.op->dimCap(), x.op->normKind(), x.rng); }

void distanceSeries(Ctx& x, const Vec& v, Nat horizon) {
  CsvTable t({"n", "distance"});
  Series s{"||T^n x - x||", {}};
  for (Nat n = 0; n <= horizon; ++n) {
    const double d = x.op->displacement(mpz_class(n), v).norm();
    t.row({std::to_string(n), formatDouble(d)});
    s.points.emplace_back(static_cast<double>(n), d);
  }
  x.csv = t.str();
  x.svg = svgLineChart("Orbit distance to the base point", "n", "distance", {s});
}

void runOrbit(Ctx& x) {
  const Vec v = paramVec(x, x.params.at("vector"));
  const double eps = x.params.at("epsilon").get<double>();
  const Nat H = x.params.at("horizon").get<Nat>();
  const NatSet rs = returnSet(*x.op, v, eps, H);
  x.result["returnCount"] = rs.size();
  x.result["headReturns"] = headElements(rs, 64);
  x.result["density"] = toJson(densityProfile(rs, x.params.at("window").get<Nat>()));
  x.result["vectorNorm"] = v.norm();
  distanceSeries(x, v, H);
}

void runPeriod(Ctx& x) {
  const Vec v = paramVec(x, x.params.at("vector"));
  const double eps = x.params.at("epsilon").get<double>();
  const Nat H = x.params.at("horizon").get<Nat>();
  const auto period = detectPeriod(*x.op, v, eps, x.params.at("maxPeriod").get<Nat>());
  const NatSet rs = returnSet(*x.op, v, eps, H);
  const DensityReport rep = densityProfile(rs, x.params.at("window").get<Nat>());
  mpq_class d(x.params.at("delta").get<std::string>());
  d.canonicalize();
  const auto cls = classifyPeriodByDensity(rs, rep, d);
  x.result["detectedPeriod"] = period ? Json(*period) : Json(nullptr);
  x.result["density"] = toJson(rep);
  x.result["periodBound"] = cls.periodBound ? Json(*cls.periodBound) : Json(nullptr);
  x.result["pairWindowStart"] = cls.pairWindow ? Json(*cls.pairWindow) : Json(nullptr);
  x.result["fixedPoint"] = cls.fixedPoint;
  if (!period) x.status = "inconclusive";
  distanceSeries(x, v, H);
}

void runQrSearch(Ctx& x) {
  std::vector<Vec> samples;
  for (const auto& s : x.params.at("samples")) samples.push_back(paramVec(x, s));
  std::vector<double> tols;
  const Json& ts = x.params.at("tolSchedule");
  if (ts.is_array()) {
    tols = ts.get<std::vector<double>>();
  } else {
    const ModulusSequence* mod = nullptr;
    if (const auto* a = dynamic_cast<const AugeOperator*>(x.op.get())) mod = &a->modulus();
    if (const auto* r = dynamic_cast<const AugeRotation*>(x.op.get())) mod = &r->modulus();
    const auto count = ts.at("rigidityCount").get<std::size_t>();
    const double scale = ts.at("scale").get<double>();
    double top = 0.0;
    for (const auto& s : samples) top = std::max(top, s.norm());
    for (std::size_t k = 1; k <= count; ++k) {
      const std::size_t j = mod->foldN() + 1 + k;
      if (j + 1 > mod->levels()) break;
      tols.push_back(scale * top * mod->rigidityBound(j));
    }
    x.result["tolSchedule"] = tols;
  }
  const mpz_class budget(x.params.at("budget").get<std::string>());
  const QrResult r = quasiRigiditySearch(*x.op, samples, tols, budget);
  x.result["success"] = r.success;
  CsvTable t({"k", "time", "max_defect", "tol"});
  Series s{"log10 max defect", {}};
  if (r.success) {
    Json times = Json::array();
    for (const auto& n : r.witness.times) times.push_back(bigJson(n));
    x.result["times"] = times;
    x.result["defects"] = r.witness.defects;
    for (std::size_t k = 0; k < r.witness.times.size(); ++k) {
      double mx = 0.0;
      for (std::size_t si = 0; si <= k && si < samples.size(); ++si) mx = std::max(mx, r.witness.defects[si][k - si]);
      t.row({std::to_string(k + 1), r.witness.times[k].get_str(), formatDouble(mx), formatDouble(tols[k])});
      if (mx > 0) s.points.emplace_back(static_cast<double>(k + 1), std::log10(mx));
    }
  } else {
    const auto& f = r.failure;
    Json prefix = Json::array();
    for (const auto& n : f.prefix) prefix.push_back(bigJson(n));
    x.result["failure"] = {{"prefix", prefix},
                           {"k", f.k},
                           {"s", f.s},
                           {"candidatesTried", f.candidatesTried},
                           {"certified", f.certified},
                           {"certifiedMin", f.certifiedMin ? Json(*f.certifiedMin) : Json(nullptr)},
                           {"centerBound", f.centerBound ? Json(*f.centerBound) : Json(nullptr)},
                           {"reason", f.reason}};
    x.status = f.certified ? "refuted" : "inconclusive";
  }
  x.csv = t.str();
  x.svg = svgLineChart("Quasi-rigidity witness", "k", "log10 max_s defect", {s});
}

void runKrylov(Ctx& x) {
  const Vec v = paramVec(x, x.params.at("vector"));
  const double tol = x.params.at("tol").get<double>();
  CsvTable t({"depth", "rank"});
  Series s{"rank", {}};
  Json ranks = Json::array();
  for (const auto& d : x.params.at("depths")) {
    const std::size_t depth = d.get<std::size_t>();
    const std::size_t r = krylovRank(*x.op, v, depth, tol);
    ranks.push_back({{"depth", depth}, {"rank", r}});
    t.row({std::to_string(depth), std::to_string(r)});
    s.points.emplace_back(static_cast<double>(depth), static_cast<double>(r));
  }
  x.result["ranks"] = ranks;
  x.csv = t.str();
  x.svg = svgLineChart("Krylov rank", "depth", "rank", {s});
}

}  // namespace

Json toJson(const std::vector<Diagnostic>& d) {
  Json a = Json::array();
  for (const auto& x : d) a.push_back({{"path", x.path}, {"message", x.message}});
  return a;
}

Validation validateConfig(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    Validation v;
    v.diagnostics.push_back({"", std::string("not valid JSON: ") + e.what()});
    return v;
  }
  return validateConfig(j);
}

Validation validateConfig(const Json& j) {
  Checker c;
  Validation v;
  Json out = Json::object();
  if (!c.keys(j, "", {"schema", "kind", "seed", "operator", "params", "output"})) {
    v.diagnostics = c.diags;
    return v;
  }
  if (!j.contains("schema")) c.err("schema", "is required");
  else if (!j.at("schema").is_number_integer() || j.at("schema").get<long long>() != kConfigSchema)
    c.err("schema", "unsupported schema version (expected " + std::to_string(kConfigSchema) + ")");
  out["schema"] = kConfigSchema;
  auto kind = c.choice(j, out, "", "kind", std::nullopt, kKinds);
  c.nat(j, out, "", "seed", 0, 0, std::numeric_limits<Nat>::max());

  std::shared_ptr<const Operator> op;
  if (kind && *kind != "families") {
    if (!j.contains("operator")) c.err("operator", "is required for kind " + *kind);
    else {
      Json o;
      op = checkOperator(c, j.at("operator"), o);
      out["operator"] = o;
    }
  } else if (j.contains("operator")) {
    c.err("operator", "not used by kind families");
  }

  const Json params = j.value("params", Json::object());
  Json po = Json::object();
  if (kind && c.keys(params, "params", {"set", "horizon", "window", "apLength", "pairWindow", "delta", "tuples", "count",
                                        "gridTol", "support", "head", "latticeLevels", "ballEps", "jMax", "samples",
                                        "vector", "epsilon", "maxPeriod", "tolSchedule", "budget", "depths", "tol"})) {
    if (*kind == "families" || op) checkParams(c, *kind, params, po, op.get());
  }
  out["params"] = po;

  Json output = j.value("output", Json::object());
  Json oo = Json::object();
  if (c.keys(output, "output", {"dir", "name", "formats"})) {
    if (output.contains("dir")) {
      if (!output.at("dir").is_string()) c.err("output.dir", "must be a string");
      else oo["dir"] = output.at("dir");
    }
    if (output.contains("name") && (!output.at("name").is_string() || output.at("name").get<std::string>().empty() ||
                                    output.at("name").get<std::string>().find('/') != std::string::npos))
      c.err("output.name", "must be a plain file stem");
    oo["name"] = output.value("name", kind.value_or("run"));
    Json formats = output.value("formats", Json::array({"json"}));
    std::set<std::string> seen;
    if (!formats.is_array()) c.err("output.formats", "must be an array");
    else
      for (std::size_t i = 0; i < formats.size(); ++i) {
        if (!formats[i].is_string() || !std::set<std::string>{"json", "csv", "svg"}.count(formats[i].get<std::string>()))
          c.err(idx("output.formats", i), "must be one of json, csv, svg");
        else
          seen.insert(formats[i].get<std::string>());
      }
    seen.insert("json");
    oo["formats"] = Json(std::vector<std::string>(seen.begin(), seen.end()));
  }
  out["output"] = oo;

  v.diagnostics = c.diags;
  v.ok = c.diags.empty();
  if (v.ok) v.config = out;
  return v;
}

RunResult runExperiment(const Json& config, const std::string& outDir) {
  const Validation v = validateConfig(config);
  if (!v.ok) {
    std::string msg = "invalid config:";
    for (const auto& d : v.diagnostics) msg += " " + d.path + ": " + d.message + ";";
    fail(ErrorCode::Config, msg);
  }
  const Json& cfg = v.config;
  const std::string kind = cfg.at("kind");
  Ctx x;
  x.params = cfg.at("params");
  x.rng.seed(cfg.at("seed").get<Nat>());
  x.formats = cfg.at("output").at("formats").get<std::vector<std::string>>();
  std::string descriptor;
  if (cfg.contains("operator")) {
    x.op = operatorFromJson(cfg.at("operator"));
    descriptor = x.op->descriptor();
  } else {
    descriptor = toJson(generatorFromJson(x.params.at("set"))).dump();
  }

  static const std::map<std::string, std::function<void(Ctx&)>> runners{
      {"families", runFamilies}, {"auge-recur", runAugeRecur}, {"auge-nonrecur", runAugeNonRecur},
      {"rigidity", runRigidity}, {"orbit", runOrbit},         {"qr-search", runQrSearch},
      {"period", runPeriod},     {"krylov", runKrylov}};
  runners.at(kind)(x);

  const std::string name = cfg.at("output").at("name");
  const std::filesystem::path dir(outDir.empty() ? cfg.at("output").value("dir", std::string(".")) : outDir);
  RunResult rr;
  rr.status = x.status;
  std::vector<std::string> files{name + ".json"};
  if (x.wants("csv") && x.csv) files.push_back(name + ".csv");
  if (x.wants("svg") && x.svg) files.push_back(name + ".svg");

  Json record{{"schema", kConfigSchema},
              {"kind", kind},
              {"status", x.status},
              {"config", cfg},
              {"descriptor", Json::parse(descriptor)},
              {"descriptorHash", fnv1aHex(descriptor)},
              {"result", x.result},
              {"files", files}};
  if (x.wants("csv") && x.csv) writeFileAtomic((dir / (name + ".csv")).string(), *x.csv);
  if (x.wants("svg") && x.svg) writeFileAtomic((dir / (name + ".svg")).string(), *x.svg);
  writeFileAtomic((dir / (name + ".json")).string(), record.dump(2) + "\n");
  for (const auto& f : files) rr.files.push_back((dir / f).string());
  rr.record = std::move(record);
  return rr;
}

}  // namespace recurlab
