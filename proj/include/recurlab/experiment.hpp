// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Experiment configs (versioned JSON, unknown keys rejected) and the driver
// that turns one config into a JSON record plus optional CSV and SVG files.

#pragma once

#include <string>
#include <vector>

#include "recurlab/json_io.hpp"

namespace recurlab {

inline constexpr int kConfigSchema = 1;

struct Diagnostic {
  std::string path;
  std::string message;
};

struct Validation {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
  /// Config with every default filled in; valid only when ok.
  Json config;
};

Validation validateConfig(const std::string& text);
Validation validateConfig(const Json& j);
Json toJson(const std::vector<Diagnostic>& d);

struct RunResult {
  /// "ok", "refuted" (impossibility certified) or "inconclusive" (budget exhausted).
  std::string status;
  Json record;
  std::vector<std::string> files;
};

/// Runs a validated config; files land in outDir (or output.dir when outDir is empty).
RunResult runExperiment(const Json& config, const std::string& outDir);

}  // namespace recurlab
