// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// JSON forms of the core types. Layouts are documented in docs/schema.md.

#pragma once

#include <cstdint>
#include <json.hpp>
#include <memory>
#include <random>
#include <string>

#include "recurlab/natset.hpp"
#include "recurlab/opcore.hpp"

namespace recurlab {

using Json = nlohmann::json;

Json toJson(const NatSet& s);
NatSet natSetFromJson(const Json& j);
Json toJson(const DensityReport& r);
Json rationalJson(const mpq_class& q);

Json toJson(const Vec& v);
Vec vecFromJson(const Json& j);

SetGenerator generatorFromJson(const Json& j);
Json toJson(const SetGenerator& g);

/// Builds any operator from its descriptor (auge, auge-rotation, diagonal,
/// identity, shift, blockperm).
std::shared_ptr<const Operator> operatorFromJson(const Json& j);

/// Vector recipes used by configs: basis, coords, random, uniform, blockVector.
Vec vecFromSpec(const Json& spec, std::size_t dimCap, NormKind nk, std::mt19937_64& rng);
/// Uniformly random direction on the unit sphere of the first `support` coordinates.
Vec randomUnitVec(std::size_t dimCap, std::size_t support, NormKind nk, std::mt19937_64& rng);

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string fnv1aHex(const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string formatDouble(double v);

}  // namespace recurlab
