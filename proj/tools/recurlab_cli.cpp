// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Command-line driver. Flags fill an experiment config; --config <file> is
// merged on top, so file values win. All work goes through the C API.

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "recurlab/recurlab.h"

using Json = nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInternal = 2;

struct Common {
  std::string configFile;
  std::string outDir = ".";
  std::vector<std::string> formats;
  std::string name;
  uint64_t seed = 0;
};

struct OperatorFlags {
  std::string type;
  std::string json;
  std::size_t foldN = 0, levels = 0, dimCap = 0;
  std::string norm, growthRule, lambda;
  std::vector<std::string> mesh;
};

// Records each flag the user actually passed, keyed by its config name.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <class T>
  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(flag, *value, help);
    entries_.push_back({key, opt, [value]() -> Json { return Json(*value); }});
  }

  // JSON-valued flag (vector specs, generator specs).
  void addJson(const std::string& flag, const std::string& key, const std::string& help, bool repeat = false) {
    auto value = std::make_shared<std::vector<std::string>>();
    CLI::Option* opt = app_->add_option(flag, *value, help);
    if (!repeat) opt->expected(1);
    entries_.push_back({key, opt, [value, repeat]() -> Json {
                          Json arr = Json::array();
                          for (const auto& s : *value) arr.push_back(Json::parse(s));
                          return repeat ? arr : arr.at(0);
                        }});
  }

  Json collect() const {
    Json out = Json::object();
    for (const auto& e : entries_)
      if (e.opt->count() > 0) out[e.key] = e.get();
    return out;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<Json()> get;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

void addOperatorFlags(CLI::App* app, OperatorFlags& f) {
  app->add_option("--op", f.type, "operator type: auge, auge-rotation, identity, diagonal, shift, blockperm");
  app->add_option("--operator-json", f.json, "full operator descriptor as JSON");
  app->add_option("--fold-n", f.foldN, "auge fold parameter N");
  app->add_option("--levels", f.levels, "auge truncation level L");
  app->add_option("--dim-cap", f.dimCap, "truncation dimension");
  app->add_option("--norm", f.norm, "norm: 2, sup or any p >= 1");
  app->add_option("--growth-rule", f.growthRule, "modulus growth rule");
  app->add_option("--lambda", f.lambda, "shift weight");
  app->add_option("--mesh", f.mesh, "mesh schedule entries such as 1/2");
}

Json operatorJson(const CLI::App* app, const OperatorFlags& f, const std::string& defaultType) {
  Json op = f.json.empty() ? Json::object() : Json::parse(f.json);
  if (app->count("--op")) op["type"] = f.type;
  if (!op.contains("type")) op["type"] = defaultType;
  if (app->count("--fold-n")) op["foldN"] = f.foldN;
  if (app->count("--levels")) op["levels"] = f.levels;
  if (app->count("--dim-cap")) op["dimCap"] = f.dimCap;
  if (app->count("--norm")) op["normKind"] = f.norm;
  if (app->count("--growth-rule")) op["growthRule"] = f.growthRule;
  if (app->count("--lambda")) op["lambda"] = std::stod(f.lambda);
  if (app->count("--mesh")) op["meshSchedule"] = f.mesh;
  return op;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(Json cfg, const Common& c) {
  if (!c.configFile.empty()) {
    Json file;
    try {
      file = Json::parse(readFile(c.configFile));
    } catch (const std::exception& e) {
      std::cerr << "config: " << e.what() << "\n";
      return kExitConfig;
    }
    cfg.merge_patch(file);
  }
  const std::string text = cfg.dump();
  char* diags = nullptr;
  const rl_status v = rl_config_validate(text.c_str(), &diags);
  if (v == RL_CONFIG) {
    for (const auto& d : Json::parse(diags)) {
      const std::string path = d.at("path");
      std::cerr << (path.empty() ? "<root>" : path) << ": " << d.at("message").get<std::string>() << "\n";
    }
    rl_free_string(diags);
    return kExitConfig;
  }
  rl_free_string(diags);
  if (v != RL_OK) {
    std::cerr << "error: " << rl_last_error() << "\n";
    return kExitInternal;
  }
  char* record = nullptr;
  const rl_status st = rl_experiment_run(text.c_str(), c.outDir.c_str(), &record);
  if (st != RL_OK) {
    std::cerr << "error: " << rl_last_error() << "\n";
    return st == RL_CONFIG ? kExitConfig : kExitInternal;
  }
  const Json r = Json::parse(record);
  rl_free_string(record);
  std::cout << r.at("kind").get<std::string>() << ": " << r.at("status").get<std::string>() << "\n";
  for (const auto& f : r.at("files")) std::cout << "  " << (c.outDir + "/" + f.get<std::string>()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recurlab: recurrence experiments on truncated Banach-space operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rl_version()));

  Common common;
  OperatorFlags opFlags;
  std::string augeMode = "recur";

  auto attachCommon = [&](CLI::App* sub) {
    sub->add_option("--config", common.configFile, "JSON config file; its values override flags");
    sub->add_option("--out-dir", common.outDir, "directory for report files");
    sub->add_option("--format", common.formats, "report format: json, csv or svg (repeatable)");
    sub->add_option("--name", common.name, "file stem for reports");
    sub->add_option("--seed", common.seed, "seed for sampled vectors and tuples");
  };

  std::vector<std::pair<CLI::App*, std::unique_ptr<Flags>>> subs;
  auto make = [&](const std::string& name, const std::string& help, bool withOperator) {
    CLI::App* sub = app.add_subcommand(name, help);
    attachCommon(sub);
    if (withOperator) addOperatorFlags(sub, opFlags);
    subs.emplace_back(sub, std::make_unique<Flags>(sub));
    return subs.back().second.get();
  };

  Flags* fam = make("families", "density and combinatorics of a set of naturals", false);
  fam->addJson("--set", "set", "set generator as JSON, e.g. {\"multiples\":3}");
  fam->add<uint64_t>("--horizon", "horizon", "horizon H");
  fam->add<uint64_t>("--window", "window", "window length W");
  fam->add<uint64_t>("--ap-length", "apLength", "arithmetic progression length to search for");
  fam->add<uint64_t>("--pair-window", "pairWindow", "window length for the two-element witness");
  fam->add<std::string>("--delta", "delta", "density threshold for the period bound");

  Flags* auge = make("auge", "recurrence and non-recurrence of the Auge operator", true);
  subs.back().first->add_option("--mode", augeMode, "recur or nonrecur")->check(CLI::IsMember({"recur", "nonrecur"}));
  auge->add<std::string>("--tuples", "tuples", "head or random");
  auge->add<uint64_t>("--count", "count", "number of random tuples");
  auge->add<double>("--grid-tol", "gridTol", "grid matching tolerance");
  auge->add<uint64_t>("--support", "support", "support of random vectors");
  auge->add<uint64_t>("--head", "head", "linear scan length for nonrecur");
  auge->add<uint64_t>("--lattice-levels", "latticeLevels", "levels contributing lattice candidates");
  auge->add<double>("--ball-eps", "ballEps", "ball radius for the ball form of the bound");

  Flags* rig = make("rigidity", "rigidity defect along m_j", true);
  rig->add<uint64_t>("--j-max", "jMax", "largest j");
  rig->add<uint64_t>("--samples", "samples", "number of random unit samples");
  rig->add<uint64_t>("--support", "support", "support of the samples");

  Flags* orb = make("orbit", "return set of one vector", true);
  orb->addJson("--vector", "vector", "vector spec as JSON, e.g. {\"basis\":1}");
  orb->add<double>("--epsilon", "epsilon", "return radius");
  orb->add<uint64_t>("--horizon", "horizon", "horizon");
  orb->add<uint64_t>("--window", "window", "density window");

  Flags* qr = make("qr-search", "greedy quasi-rigidity witness search", true);
  qr->addJson("--sample", "samples", "sample vector spec as JSON (repeatable)", true);
  qr->add<std::vector<double>>("--tol", "tolSchedule", "tolerance schedule entries (repeatable)");
  qr->add<std::string>("--budget", "budget", "largest time considered (decimal)");

  Flags* per = make("period", "period detection and density classification", true);
  per->addJson("--vector", "vector", "vector spec as JSON");
  per->add<double>("--epsilon", "epsilon", "return radius");
  per->add<uint64_t>("--max-period", "maxPeriod", "largest period tried");
  per->add<uint64_t>("--horizon", "horizon", "horizon");
  per->add<uint64_t>("--window", "window", "density window");
  per->add<std::string>("--delta", "delta", "density threshold");

  Flags* kry = make("krylov", "Krylov rank of an orbit", true);
  kry->addJson("--vector", "vector", "vector spec as JSON");
  kry->add<std::vector<std::size_t>>("--depth", "depths", "Krylov depths (repeatable)");
  kry->add<double>("--tol", "tol", "relative singular value cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& [sub, flags] : subs) {
      if (!sub->parsed()) continue;
      const std::string name = sub->get_name();
      Json cfg{{"schema", 1}, {"seed", common.seed}};
      std::string kind = name;
      if (name == "auge") kind = augeMode == "recur" ? "auge-recur" : "auge-nonrecur";
      cfg["kind"] = kind;
      if (name != "families") {
        std::string defaultType = "identity";
        if (name == "auge" || name == "rigidity") defaultType = "auge";
        cfg["operator"] = operatorJson(sub, opFlags, defaultType);
      }
      cfg["params"] = flags->collect();
      Json output = Json::object();
      if (!common.formats.empty()) output["formats"] = common.formats;
      if (!common.name.empty()) output["name"] = common.name;
      cfg["output"] = output;
      return run(std::move(cfg), common);
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
