// Copyright (c) 2026 The recurlab Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "recurlab/natset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "recurlab/error.hpp"

namespace recurlab {

NatSet::NatSet(std::vector<Nat> elements, Nat horizon) : elements_(std::move(elements)), horizon_(horizon) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    require(elements_[i] <= horizon_, "NatSet element exceeds horizon");
    require(i == 0 || elements_[i - 1] < elements_[i], "NatSet elements must be strictly increasing");
  }
}

NatSet NatSet::fromUnsorted(std::vector<Nat> values, Nat horizon) {
  std::erase_if(values, [horizon](Nat v) { return v > horizon; });
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return NatSet(std::move(values), horizon);
}

NatSet NatSet::interval(Nat horizon) {
  std::vector<Nat> all(horizon + 1);
  for (Nat i = 0; i <= horizon; ++i) all[i] = i;
  return NatSet(std::move(all), horizon);
}

bool NatSet::contains(Nat n) const { return std::binary_search(elements_.begin(), elements_.end(), n); }

std::vector<char> NatSet::indicator() const {
  std::vector<char> flags(horizon_ + 1, 0);
  for (Nat e : elements_) flags[e] = 1;
  return flags;
}

NatSet NatSet::restrictTo(Nat horizon) const {
  require(horizon <= horizon_, "restriction horizon exceeds the observed horizon");
  std::vector<Nat> kept(elements_.begin(), std::upper_bound(elements_.begin(), elements_.end(), horizon));
  return NatSet(std::move(kept), horizon);
}

bool NatSet::isSubsetOf(const NatSet& other) const {
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(), elements_.end());
}

namespace {

NatSet fromFlags(const std::vector<char>& flags, Nat horizon) {
  std::vector<Nat> out;
  for (Nat n = 0; n <= horizon; ++n)
    if (flags[n]) out.push_back(n);
  return NatSet(std::move(out), horizon);
}

// 2|sin(pi r / m)| with the residue folded into [0, m/2] for accuracy.
double chordOfResidue(const mpz_class& r, const mpz_class& m) {
  mpz_class folded = r;
  if (2 * r > m) folded = m - r;
  long er = 0, em = 0;
  double dr = mpz_get_d_2exp(&er, folded.get_mpz_t());
  double dm = mpz_get_d_2exp(&em, m.get_mpz_t());
  double f = std::ldexp(dr / dm, static_cast<int>(er - em));
  return 2.0 * std::sin(std::numbers::pi * f);
}

NatSet materializeRotation(const gen::RotationReturn& g, Nat horizon) {
  require(g.m >= 1, "RotationReturn modulus must be >= 1");
  require(std::isfinite(g.eps), "RotationReturn tolerance must be finite");
  std::vector<char> flags(horizon + 1, 0);
  if (g.m.fits_ulong_p()) {
    const Nat m = g.m.get_ui();
    const Nat span = std::min<Nat>(m, horizon + 1);
    std::vector<char> base(span, 0);
    for (Nat r = 0; r < span; ++r) {
      const Nat folded = std::min(r, m - r);
      base[r] = 2.0 * std::sin(std::numbers::pi * (static_cast<double>(folded) / static_cast<double>(m))) < g.eps;
    }
    for (Nat n = 0; n <= horizon; ++n) flags[n] = base[n % span];
  } else {
    // m exceeds every n in range, so the residue is n itself.
    for (Nat n = 0; n <= horizon; ++n) flags[n] = chordOfResidue(mpz_class(n), g.m) < g.eps;
  }
  return fromFlags(flags, horizon);
}

NatSet materializeIp(const gen::IpClosure& g, Nat horizon) {
  if (g.generators.empty()) fail(ErrorCode::InvalidArgument, "empty IP generator");
  // reach[s]: s is the sum of some nonempty subset of the generators seen so far.
  std::vector<char> reach(horizon + 1, 0);
  for (Nat x : g.generators) {
    if (x > horizon) continue;
    for (Nat s = horizon - x + 1; s-- > 0;)
      if (reach[s]) reach[s + x] = 1;
    reach[x] = 1;
  }
  return fromFlags(reach, horizon);
}

struct Materializer {
  Nat horizon;

  NatSet operator()(const gen::Explicit& g) const { return NatSet::fromUnsorted(g.values, horizon); }

  NatSet operator()(const gen::ArithmeticProgression& g) const {
    std::vector<Nat> out;
    if (g.start <= horizon) {
      if (g.diff == 0) {
        out.push_back(g.start);
      } else {
        for (Nat v = g.start; v <= horizon; v += g.diff) {
          out.push_back(v);
          if (horizon - v < g.diff) break;
        }
      }
    }
    return NatSet(std::move(out), horizon);
  }

  NatSet operator()(const gen::Multiples& g) const {
    require(g.p >= 1, "Multiples requires p >= 1");
    return (*this)(gen::ArithmeticProgression{0, g.p});
  }

  NatSet operator()(const gen::IpClosure& g) const { return materializeIp(g, horizon); }

  NatSet operator()(const gen::DeltaOf& g) const {
    std::vector<char> flags(horizon + 1, 0);
    const auto& b = g.base.elements();
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) {
        Nat d = b[j] - b[i];
        if (d <= horizon) flags[d] = 1;
      }
    return fromFlags(flags, horizon);
  }

  NatSet operator()(const gen::RotationReturn& g) const { return materializeRotation(g, horizon); }

  NatSet operator()(const gen::Union& g) const {
    std::vector<char> flags(horizon + 1, 0);
    for (const auto& part : g.parts) {
      const NatSet m = materialize(part, horizon);
      for (Nat e : m.elements()) flags[e] = 1;
    }
    return fromFlags(flags, horizon);
  }

  NatSet operator()(const gen::Intersection& g) const {
    require(!g.parts.empty(), "Intersection needs at least one part");
    std::vector<int> hits(horizon + 1, 0);
    for (const auto& part : g.parts) {
      const NatSet m = materialize(part, horizon);
      for (Nat e : m.elements()) ++hits[e];
    }
    std::vector<Nat> out;
    const int need = static_cast<int>(g.parts.size());
    for (Nat n = 0; n <= horizon; ++n)
      if (hits[n] == need) out.push_back(n);
    return NatSet(std::move(out), horizon);
  }
};

}  // namespace

NatSet materialize(const SetGenerator& g, Nat horizon) {
  require(horizon >= 1, "horizon must be >= 1");
  return std::visit(Materializer{horizon}, g.v);
}

Nat maxRun(const NatSet& a) {
  Nat best = 0, cur = 0;
  const auto& e = a.elements();
  for (std::size_t i = 0; i < e.size(); ++i) {
    cur = (i > 0 && e[i] == e[i - 1] + 1) ? cur + 1 : 1;
    best = std::max(best, cur);
  }
  return best;
}

Nat maxApLength(const NatSet& a) {
  const auto& e = a.elements();
  if (e.size() <= 2) return e.size();
  const Nat h = a.horizon();
  const auto in = a.indicator();
  Nat best = 2;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const Nat d = e[j] - e[i];
      // Even a full progression from e[i] cannot beat the current best.
      if ((h - e[i]) / d + 1 <= best) break;
      if (e[i] >= d && in[e[i] - d]) continue;  // not the start of a maximal run
      Nat len = 2;
      for (Nat v = e[j]; h - v >= d && in[v + d]; v += d) ++len;
      best = std::max(best, len);
    }
  }
  return best;
}

DensityReport densityProfile(const NatSet& a, Nat window) {
  const Nat h = a.horizon();
  require(window >= 1, "window must be >= 1");
  if (window > h) fail(ErrorCode::InvalidArgument, "window exceeds horizon");

  // prefix[i] = #(a ∩ [1, i])
  std::vector<Nat> prefix(h + 1, 0);
  const auto in = a.indicator();
  for (Nat i = 1; i <= h; ++i) prefix[i] = prefix[i - 1] + (in[i] ? 1 : 0);

  Nat hi = 0, lo = window;
  for (Nat n = 0; n + window <= h; ++n) {
    Nat c = prefix[n + window] - prefix[n];
    hi = std::max(hi, c);
    lo = std::min(lo, c);
  }

  DensityReport r;
  r.horizon = h;
  r.window = window;
  r.upperBanachEst = mpq_class(hi, window);
  r.lowerBanachEst = mpq_class(lo, window);
  r.upperBanachEst.canonicalize();
  r.lowerBanachEst.canonicalize();

  bool first = true;
  for (Nat n = window; n <= h; n += window) {
    mpq_class q(prefix[n], n);
    q.canonicalize();
    if (first || q > r.upperDensityEst) r.upperDensityEst = q;
    if (first || q < r.lowerDensityEst) r.lowerDensityEst = q;
    first = false;
  }

  Nat gap = 0, cur = 0;
  for (Nat i = 0; i <= h; ++i) {
    cur = in[i] ? 0 : cur + 1;
    gap = std::max(gap, cur);
  }
  if (!a.empty() && gap < window) r.syndeticGap = gap;

  r.maxRun = maxRun(a);
  r.maxApLength = maxApLength(a);
  r.containsConsecutivePair = r.maxRun >= 2;
  return r;
}

mpq_class syndeticLowerBound(const DensityReport& r) {
  require(r.syndeticGap.has_value(), "report has no syndetic gap");
  mpq_class b = mpq_class(1, *r.syndeticGap + 1) - mpq_class(1, r.window);
  b.canonicalize();
  return b;
}

std::optional<ApWitness> containsApOfLength(const NatSet& a, Nat l) {
  require(l >= 2, "progression length must be >= 2");
  const auto& e = a.elements();
  const Nat h = a.horizon();
  const auto in = a.indicator();
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const Nat d = e[j] - e[i];
      if ((h - e[i]) / d < l - 1) break;
      Nat k = 2;
      while (k < l && in[e[i] + k * d]) ++k;
      if (k == l) return ApWitness{e[i], d};
    }
  }
  return std::nullopt;
}

NatSet differenceSet(const NatSet& a) {
  require(!a.empty(), "difference set of an empty set");
  const auto& e = a.elements();
  std::vector<char> flags(a.horizon() + 1, 0);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) flags[e[j] - e[i]] = 1;
  return fromFlags(flags, a.horizon());
}

std::optional<Nat> windowPairWitness(const NatSet& a, Nat n) {
  require(n >= 2, "window length must be >= 2");
  const auto& e = a.elements();
  // Windows start at s+1 >= 1, so the element 0 never counts.
  std::size_t i = (!e.empty() && e[0] == 0) ? 1 : 0;
  for (; i + 1 < e.size(); ++i) {
    if (e[i + 1] - e[i] <= n - 1) return e[i + 1] > n ? e[i + 1] - n : 0;
  }
  return std::nullopt;
}

CofiniteReport cofiniteInA(const NatSet& b, const NatSet& a, std::optional<Nat> cutoff) {
  require(a.horizon() == b.horizon(), "cofiniteInA needs a shared horizon");
  CofiniteReport rep;
  rep.cutoff = cutoff.value_or(a.horizon() / 2);
  rep.holds = true;
  for (Nat x : a.elements()) {
    if (x <= rep.cutoff) continue;
    if (!b.contains(x)) {
      rep.holds = false;
      rep.firstMissing = x;
      break;
    }
  }
  rep.note = "finite-horizon surrogate: elements of A in (cutoff, horizon] checked; "
             "cofiniteness itself is not decidable at a finite horizon";
  return rep;
}

}  // namespace recurlab
