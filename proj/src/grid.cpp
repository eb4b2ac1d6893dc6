// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include "recurlab/auge.hpp"
#include "recurlab/error.hpp"

namespace recurlab {

namespace {

struct DiskPoint {
  double modulus;
  unsigned long num, den;
};

// Least n >= 1 with chordScale * sin(pi / (2n)) <= tau.
unsigned long phaseCount(double chordScale, double tau) {
  if (chordScale <= tau) return 1;
  auto n = static_cast<unsigned long>(std::ceil(std::numbers::pi / (2.0 * std::asin(tau / chordScale))));
  n = std::max(n, 1UL);
  while (chordScale * std::sin(std::numbers::pi / (2.0 * static_cast<double>(n))) > tau) ++n;
  return n;
}

// Rings of radius i*tau (clamped to 1) until 1 - tau/2 is reached; each ring
// carries enough phases that every point of the closed disk lies within tau.
std::vector<DiskPoint> diskNet(double tau) {
  std::vector<DiskPoint> pts{{0.0, 0, 1}};
  double last = 0.0;
  for (unsigned long i = 1; last < 1.0 - tau / 2.0; ++i) {
    const double rho = std::min(1.0, static_cast<double>(i) * tau);
    const unsigned long n = phaseCount(4.0 * rho, tau);
    for (unsigned long a = 0; a < n; ++a) pts.push_back({rho, a, n});
    last = rho;
  }
  return pts;
}

std::pair<unsigned long, unsigned long> reduced(unsigned long num, unsigned long den) {
  if (num == 0) return {0, 1};
  const unsigned long g = std::gcd(num, den);
  return {num / g, den / g};
}

GridEntry makeEntry(const std::vector<DiskPoint>& coords) {
  GridEntry e;
  for (const auto& c : coords) {
    auto [num, den] = reduced(c.num, c.den);
    e.modulus.push_back(c.modulus);
    e.phaseNum.push_back(num);
    e.phaseDen.push_back(den);
    const double turns = static_cast<double>(num) / static_cast<double>(den);
    e.alpha.push_back(c.modulus == 0.0 ? Complex(0.0, 0.0) : std::polar(c.modulus, 2.0 * std::numbers::pi * turns));
  }
  return e;
}

// Appends one tau-net, stopping early once `cap` entries exist in total.
void appendNet(std::size_t foldN, double tau, std::vector<GridEntry>& out, std::size_t cap) {
  const std::size_t dim = foldN + 1;
  const unsigned long nPin = phaseCount(2.0, tau);
  const auto disk = diskNet(tau);
  using Key = std::vector<std::tuple<double, unsigned long, unsigned long>>;
  std::set<Key> seen;
  std::vector<std::size_t> odo(foldN, 0);
  for (std::size_t pin = 0; pin < dim; ++pin) {
    for (unsigned long a = 0; a < nPin; ++a) {
      std::fill(odo.begin(), odo.end(), 0);
      while (true) {
        std::vector<DiskPoint> coords;
        for (std::size_t j = 0, o = 0; j < dim; ++j)
          coords.push_back(j == pin ? DiskPoint{1.0, a, nPin} : disk[odo[o++]]);
        Key key;
        for (const auto& c : coords) {
          auto [num, den] = reduced(c.num, c.den);
          key.emplace_back(c.modulus, num, den);
        }
        if (seen.insert(key).second) {
          if (out.size() >= cap) return;
          out.push_back(makeEntry(coords));
        }
        std::size_t pos = foldN;
        while (pos > 0 && ++odo[pos - 1] == disk.size()) odo[--pos] = 0;
        if (pos == 0) break;
      }
    }
  }
}

}  // namespace

std::size_t netSize(std::size_t foldN, const mpq_class& tau) {
  std::vector<GridEntry> tmp;
  appendNet(foldN, tau.get_d(), tmp, static_cast<std::size_t>(-1));
  return tmp.size();
}

FunctionalGrid buildGrid(std::size_t foldN, const std::vector<mpq_class>& meshLevels, std::optional<std::size_t> entries,
                         NormKind nk) {
  require(foldN >= 1, "foldN must be >= 1");
  require(!meshLevels.empty(), "mesh schedule is empty");
  for (std::size_t i = 0; i < meshLevels.size(); ++i) {
    require(meshLevels[i] > 0, "mesh values must be positive");
    require(i == 0 || meshLevels[i] < meshLevels[i - 1], "mesh values must be strictly decreasing");
  }
  FunctionalGrid g;
  g.foldN_ = foldN;
  g.mesh_ = meshLevels;
  // ||alpha||_q <= (N+1)^{1/q} ||alpha||_inf, sharp on the all-ones vector.
  g.upper_ = std::pow(static_cast<double>(foldN + 1), nk.dualInverse());
  const std::size_t cap = entries.value_or(static_cast<std::size_t>(-1));
  for (const auto& tau : meshLevels) {
    if (g.entries_.size() >= cap) break;
    const std::size_t before = g.entries_.size();
    appendNet(foldN, tau.get_d(), g.entries_, cap);
    if (g.entries_.size() - before == netSize(foldN, tau)) g.netEnds_.push_back(g.entries_.size());
  }
  if (entries && g.entries_.size() < *entries)
    fail(ErrorCode::InvalidArgument, "mesh schedule exhausted after " + std::to_string(g.entries_.size()) +
                                         " entries; " + std::to_string(*entries) + " required (add finer mesh values)");
  return g;
}

const GridEntry& FunctionalGrid::atLevel(std::size_t k) const {
  if (k < foldN_ + 2 || k - foldN_ - 2 >= entries_.size()) fail(ErrorCode::OutOfRange, "grid level out of range");
  return entries_[k - foldN_ - 2];
}

double FunctionalGrid::meshOf(std::size_t k) const {
  if (k < foldN_ + 2) fail(ErrorCode::OutOfRange, "grid level out of range");
  const std::size_t count = k - foldN_ - 1;
  double mesh = 2.0;  // diameter of the sphere: no complete net yet
  for (std::size_t t = 0; t < netEnds_.size(); ++t)
    if (netEnds_[t] <= count) mesh = mesh_[t].get_d();
  return mesh;
}

}  // namespace recurlab
