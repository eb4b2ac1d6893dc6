// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"
#include "recurlab/experiment.hpp"

using namespace recurlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("recurlab_test_" + name);
  fs::remove_all(p);
  return p;
}

bool hasDiag(const Validation& v, const std::string& path, const std::string& needle = "") {
  for (const auto& d : v.diagnostics)
    if (d.path == path && d.message.find(needle) != std::string::npos) return true;
  return false;
}

const Json kFamilies = Json::parse(R"({"schema":1,"kind":"families",
  "params":{"set":{"multiples":3},"horizon":999,"window":30}})");

}  // namespace

TEST_CASE("config validation") {
  const auto ok = validateConfig(kFamilies);
  REQUIRE(ok.ok);
  CHECK(ok.config.at("seed") == 0);
  CHECK(ok.config.at("params").at("apLength") == 3);
  CHECK(ok.config.at("output").at("formats") == Json::array({"json"}));

  Json bad = kFamilies;
  bad["params"]["window"] = 1000;
  CHECK(hasDiag(validateConfig(bad), "params.window", "window exceeds horizon"));

  Json eps = Json::parse(R"({"schema":1,"kind":"orbit","operator":{"type":"identity","dimCap":3},
    "params":{"vector":{"basis":1},"epsilon":-0.5,"horizon":10}})");
  CHECK(hasDiag(validateConfig(eps), "params.epsilon"));

  Json unknown = kFamilies;
  unknown["params"]["colour"] = "blue";
  unknown["extra"] = 1;
  const auto u = validateConfig(unknown);
  CHECK(hasDiag(u, "params.colour", "unknown key"));
  CHECK(hasDiag(u, "extra", "unknown key"));

  CHECK(hasDiag(validateConfig(std::string("{not json")), ""));
  CHECK(hasDiag(validateConfig(Json::parse(R"({"schema":2,"kind":"families"})")), "schema"));
  CHECK(hasDiag(validateConfig(Json::parse(R"({"schema":1,"kind":"warp"})")), "kind"));

  Json wrongOp = Json::parse(R"({"schema":1,"kind":"rigidity","operator":{"type":"identity","dimCap":4}})");
  CHECK(hasDiag(validateConfig(wrongOp), "operator.type"));

  Json badLevels = Json::parse(R"({"schema":1,"kind":"rigidity","operator":{"type":"auge","levels":"many"}})");
  CHECK(hasDiag(validateConfig(badLevels), "operator.levels"));

  Json badTol = Json::parse(R"({"schema":1,"kind":"qr-search","operator":{"type":"identity","dimCap":2},
    "params":{"samples":[{"basis":1}],"tolSchedule":[0.1,0.5]}})");
  CHECK(hasDiag(validateConfig(badTol), "params.tolSchedule[1]"));
}

TEST_CASE("families run reports exact densities") {
  const fs::path dir = scratch("families");
  Json cfg = kFamilies;
  cfg["output"] = {{"formats", {"json", "csv", "svg"}}};
  const auto r = runExperiment(cfg, dir.string());
  CHECK(r.status == "ok");
  const Json& d = r.record.at("result").at("density");
  for (const char* k : {"upperDensityEst", "lowerDensityEst", "upperBanachEst", "lowerBanachEst"}) {
    CHECK(d.at(k).at("num") == 1);
    CHECK(d.at(k).at("den") == 3);
  }
  CHECK(fs::exists(dir / "families.csv"));
  CHECK(slurp(dir / "families.svg").rfind("<svg", 0) == 0);
  CHECK(slurp(dir / "families.csv").rfind("window_start,count,density\n", 0) == 0);
  CHECK(r.record.at("config") == validateConfig(cfg).config);
  CHECK(r.record.at("descriptorHash").get<std::string>().size() == 16);
}

TEST_CASE("rigidity run: defect column under bound column") {
  const fs::path dir = scratch("rigidity");
  const Json cfg = Json::parse(R"({"schema":1,"kind":"rigidity","seed":3,
    "operator":{"type":"auge","foldN":1,"levels":12},"output":{"formats":["csv"]}})");
  runExperiment(cfg, dir.string());
  std::istringstream csv(slurp(dir / "rigidity.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "j,m_j_digits,defect,bound");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 4);
    CHECK(std::stod(cells[2]) <= std::stod(cells[3]));
    ++rows;
  }
  CHECK(rows == 11);
  const std::string first = slurp(dir / "rigidity.json");
  runExperiment(cfg, dir.string());
  CHECK(slurp(dir / "rigidity.json") == first);
}

TEST_CASE("nonrecur run matches the direct scan") {
  const fs::path dir = scratch("nonrecur");
  const Json cfg = Json::parse(R"({"schema":1,"kind":"auge-nonrecur",
    "operator":{"type":"auge","foldN":1,"levels":15},"params":{"head":10000}})");
  const auto r = runExperiment(cfg, dir.string());
  AugeDescriptor d;
  d.foldN = 1;
  d.levels = 15;
  d.dimCap = 15;
  const AugeOperator op(d);
  const auto direct = nonRecurrenceScan(op, latticeCandidates(op.modulus(), op.modulus().m(15) / 2, 10000));
  CHECK(r.record.at("result").at("minOverN").get<double>() == direct.minOverN);
  CHECK(r.record.at("result").at("minOverN").get<double>() > 0.318);
  CHECK(r.record.at("result").at("verified") == true);
}

TEST_CASE("qr-search statuses") {
  const fs::path dir = scratch("qr");
  const Json refuted = Json::parse(R"({"schema":1,"kind":"qr-search",
    "operator":{"type":"auge","foldN":1,"levels":30},
    "params":{"samples":[{"basis":1},{"basis":2}],"tolSchedule":[0.1,0.1],
              "budget":"10000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000"}})");
  CHECK(runExperiment(refuted, dir.string()).status == "refuted");

  const Json inconclusive = Json::parse(R"({"schema":1,"kind":"qr-search",
    "operator":{"type":"diagonal","dimCap":1,"eigenvalues":[{"root":[1,1000]}]},
    "params":{"samples":[{"basis":1}],"tolSchedule":[1e-9],"budget":50}})");
  CHECK(runExperiment(inconclusive, dir.string()).status == "inconclusive");
}

TEST_CASE("invalid configs do not run") {
  Json bad = kFamilies;
  bad["params"]["horizon"] = -4;
  CHECK_THROWS_AS(runExperiment(bad, scratch("bad").string()), Error);
}
