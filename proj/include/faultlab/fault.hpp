/*
 * Copyright 2026 The faultlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Single-bit fault injection into plaintexts and ciphertexts.
//
// A fault flips bit j of the stored non-negative residue of one coefficient
// of one limb, then reduces modulo the limb modulus (recording whether the
// reduction wrapped). Targets stored in the evaluation domain are, by
// default, moved to the coefficient domain with an inverse NTT, flipped, and
// transformed back; FaultDomain::Stored flips the evaluation-domain word as
// stored instead.

#ifndef FAULTLAB_FAULT_HPP_
#define FAULTLAB_FAULT_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "faultlab/ckks.hpp"
#include "faultlab/errors.hpp"
#include "faultlab/random.hpp"
#include "faultlab/ring_arith.hpp"

namespace faultlab {

enum class Stage { PostEncode, PostEncrypt, PreDecode };
enum class Target { PlaintextPoly, C0, C1 };
enum class FaultDomain { Coefficient, Stored };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::PostEncode: return "post_encode";
    case Stage::PostEncrypt: return "post_encrypt";
    case Stage::PreDecode: return "pre_decode";
  }
  return "?";
}

inline const char* to_string(Target t) {
  switch (t) {
    case Target::PlaintextPoly: return "plaintext";
    case Target::C0: return "c0";
    case Target::C1: return "c1";
  }
  return "?";
}

inline const char* to_string(FaultDomain d) { return d == FaultDomain::Coefficient ? "coefficient" : "stored"; }

inline Stage parse_stage(std::string_view s) {
  if (s == "post_encode") return Stage::PostEncode;
  if (s == "post_encrypt") return Stage::PostEncrypt;
  if (s == "pre_decode") return Stage::PreDecode;
  throw ArgumentError("unknown stage '" + std::string(s) + "'");
}

inline Target parse_target(std::string_view s) {
  if (s == "plaintext") return Target::PlaintextPoly;
  if (s == "c0") return Target::C0;
  if (s == "c1") return Target::C1;
  throw ArgumentError("unknown target '" + std::string(s) + "'");
}

inline FaultDomain parse_fault_domain(std::string_view s) {
  if (s == "coefficient") return FaultDomain::Coefficient;
  if (s == "stored") return FaultDomain::Stored;
  throw ArgumentError("unknown fault domain '" + std::string(s) + "'");
}

inline bool stage_accepts(Stage s, Target t) {
  return s == Stage::PostEncrypt ? (t == Target::C0 || t == Target::C1) : t == Target::PlaintextPoly;
}

struct FaultSpec {
  Stage stage = Stage::PostEncrypt;
  Target target = Target::C0;
  std::size_t limb = 0;
  std::size_t coeff = 0;
  int bit = 0;

  /// Canonical form stage:target:limb:coeff:bit.
  std::string to_string() const {
    return std::string(faultlab::to_string(stage)) + ":" + faultlab::to_string(target) + ":" +
           std::to_string(limb) + ":" + std::to_string(coeff) + ":" + std::to_string(bit);
  }

  static FaultSpec parse(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = text.find(':', start);
      parts.emplace_back(text.substr(start, pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 5) throw ArgumentError("fault spec needs 5 fields: " + std::string(text));
    FaultSpec f;
    f.stage = parse_stage(parts[0]);
    f.target = parse_target(parts[1]);
    try {
      f.limb = std::stoul(parts[2]);
      f.coeff = std::stoul(parts[3]);
      f.bit = std::stoi(parts[4]);
    } catch (const std::exception&) {
      throw ArgumentError("fault spec has a non-numeric field: " + std::string(text));
    }
    return f;
  }

  void validate(const CkksContext& ctx) const {
    if (!stage_accepts(stage, target)) {
      throw ArgumentError("fault spec " + to_string() + ": target not available at this stage");
    }
    if (limb >= ctx.limb_count()) throw ArgumentError("fault spec " + to_string() + ": limb out of range");
    if (coeff >= ctx.ring_dimension()) throw ArgumentError("fault spec " + to_string() + ": coefficient out of range");
    if (bit < 0 || bit >= ctx.injectable_width()) {
      throw ArgumentError("fault spec " + to_string() + ": bit outside injectable width " +
                          std::to_string(ctx.injectable_width()));
    }
  }

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

template <typename T>
struct FlipResult {
  T value;
  bool wrapped;
};

/// XOR bit j into a word residue, then reduce mod q.
inline FlipResult<u64> flip_bit(u64 value, int j, u64 q) {
  if (j < 0 || j >= 64) throw ArgumentError("flip_bit: bit index outside the 64-bit word");
  if (value >= q) throw ArgumentError("flip_bit: value not reduced");
  const u64 x = value ^ (u64{1} << j);
  return x >= q ? FlipResult<u64>{x % q, true} : FlipResult<u64>{x, false};
}

/// XOR bit j into an arbitrary-precision residue, j < bit_width(Q).
inline FlipResult<BigInt> flip_bit(const BigInt& value, int j, const BigInt& q) {
  if (j < 0 || j >= bit_length(q)) throw ArgumentError("flip_bit: bit index outside bit_width(Q)");
  if (value < 0 || value >= q) throw ArgumentError("flip_bit: value not reduced");
  BigInt x = value;
  boost::multiprecision::bit_flip(x, static_cast<unsigned>(j));
  if (x >= q) return {BigInt(x % q), true};
  return {std::move(x), false};
}

/// Flips one bit of one coefficient of `target` in place; returns the wrap flag.
inline bool flip_in_poly(const CkksContext& ctx, Poly& target, std::size_t limb, std::size_t coeff, int bit,
                         FaultDomain domain = FaultDomain::Coefficient) {
  if (auto* big = std::get_if<BigPoly>(&target)) {
    auto r = flip_bit(big->coeffs.at(coeff), bit, big->q());
    big->coeffs[coeff] = std::move(r.value);
    return r.wrapped;
  }
  auto& rns = std::get<RnsPoly>(target);
  RingPoly& l = rns.limbs.at(limb);
  if (l.domain == Domain::Evaluation && domain == FaultDomain::Coefficient) {
    RingPoly coeffs = ntt_inverse(std::move(l), ctx.ntt_tables(limb));
    const auto r = flip_bit(coeffs.coeffs.at(coeff), bit, coeffs.q());
    coeffs.coeffs[coeff] = r.value;
    l = ntt_forward(std::move(coeffs), ctx.ntt_tables(limb));
    return r.wrapped;
  }
  const auto r = flip_bit(l.coeffs.at(coeff), bit, l.q());
  l.coeffs[coeff] = r.value;
  return r.wrapped;
}

/// Pipeline snapshot at one of the injection stages. PostEncode and PreDecode
/// hold a plaintext; PostEncrypt holds a ciphertext.
struct PipelineState {
  Stage stage = Stage::PostEncrypt;
  std::optional<Plaintext> plaintext;
  std::optional<Ciphertext> ciphertext;
  bool wrapped = false;
};

inline PipelineState inject(const CkksContext& ctx, PipelineState state, const FaultSpec& spec,
                            FaultDomain domain = FaultDomain::Coefficient) {
  spec.validate(ctx);
  if (state.stage != spec.stage) {
    throw StateError(std::string("inject: state is at ") + to_string(state.stage) + ", fault targets " +
                     to_string(spec.stage));
  }
  Poly* target = nullptr;
  switch (spec.target) {
    case Target::PlaintextPoly:
      if (!state.plaintext) throw StateError("inject: no plaintext in state");
      target = &state.plaintext->poly;
      break;
    case Target::C0:
      if (!state.ciphertext) throw StateError("inject: no ciphertext in state");
      target = &state.ciphertext->c0;
      break;
    case Target::C1:
      if (!state.ciphertext) throw StateError("inject: no ciphertext in state");
      target = &state.ciphertext->c1;
      break;
  }
  state.wrapped = flip_in_poly(ctx, *target, spec.limb, spec.coeff, spec.bit, domain);
  return state;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

struct Sampling {
  enum class Kind { Exhaustive, Strided, RandomSubset };
  Kind kind = Kind::Exhaustive;
  std::size_t step = 1;    // Strided
  std::size_t count = 0;   // RandomSubset
  std::uint64_t seed = 0;  // RandomSubset

  static Sampling exhaustive() { return {}; }
  static Sampling strided(std::size_t step) { return {Kind::Strided, step, 0, 0}; }
  static Sampling random_subset(std::size_t count, std::uint64_t seed) {
    return {Kind::RandomSubset, 1, count, seed};
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Exhaustive: return "exhaustive";
      case Kind::Strided: return "strided:" + std::to_string(step);
      case Kind::RandomSubset: return "random:" + std::to_string(count) + ":" + std::to_string(seed);
    }
    return "?";
  }
};

using StageTarget = std::pair<Stage, Target>;

/// Canonical (stage, target) order used by enumerate_faults.
inline std::vector<StageTarget> all_stage_targets() {
  return {{Stage::PostEncode, Target::PlaintextPoly},
          {Stage::PostEncrypt, Target::C0},
          {Stage::PostEncrypt, Target::C1},
          {Stage::PreDecode, Target::PlaintextPoly}};
}

/// Mixed-radix view of the exhaustive fault space
/// (stage/target, limb, coeff, bit), without materializing it.
class FaultSpace {
 public:
  FaultSpace(const CkksContext& ctx, std::vector<StageTarget> filter)
      : limbs_(ctx.limb_count()), n_(ctx.ring_dimension()), width_(static_cast<std::size_t>(ctx.injectable_width())) {
    for (const auto& st : all_stage_targets()) {
      if (std::find(filter.begin(), filter.end(), st) != filter.end()) targets_.push_back(st);
    }
    for (const auto& st : filter) {
      if (!stage_accepts(st.first, st.second)) throw ArgumentError("invalid stage/target pair in filter");
    }
  }

  std::size_t per_target() const { return limbs_ * n_ * width_; }
  std::size_t size() const { return targets_.size() * per_target(); }

  FaultSpec at(std::size_t index) const {
    FaultSpec f;
    f.bit = static_cast<int>(index % width_);
    index /= width_;
    f.coeff = index % n_;
    index /= n_;
    f.limb = index % limbs_;
    index /= limbs_;
    f.stage = targets_.at(index).first;
    f.target = targets_.at(index).second;
    return f;
  }

 private:
  std::vector<StageTarget> targets_;
  std::size_t limbs_;
  std::size_t n_;
  std::size_t width_;
};

/// Deterministic fault list in (stage, target, limb, coeff, bit) order.
inline std::vector<FaultSpec> enumerate_faults(const CkksContext& ctx, const std::vector<StageTarget>& filter,
                                               const Sampling& sampling) {
  const FaultSpace space(ctx, filter);
  const std::size_t total = space.size();
  std::vector<std::size_t> indices;
  switch (sampling.kind) {
    case Sampling::Kind::Exhaustive:
      indices.resize(total);
      for (std::size_t i = 0; i < total; ++i) indices[i] = i;
      break;
    case Sampling::Kind::Strided:
      if (sampling.step == 0) throw ArgumentError("strided sampling needs step >= 1");
      for (std::size_t i = 0; i < total; i += sampling.step) indices.push_back(i);
      break;
    case Sampling::Kind::RandomSubset: {
      // Floyd's algorithm: `count` distinct indices, then sorted.
      const std::size_t count = std::min(sampling.count, total);
      Rng rng = derive_rng(sampling.seed, {"fault-subset"});
      std::unordered_set<std::size_t> chosen;
      for (std::size_t j = total - count; j < total; ++j) {
        const std::size_t t = static_cast<std::size_t>(rng.uniform_below(static_cast<u64>(j) + 1));
        chosen.insert(chosen.contains(t) ? j : t);
      }
      indices.assign(chosen.begin(), chosen.end());
      std::sort(indices.begin(), indices.end());
      break;
    }
  }
  std::vector<FaultSpec> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(space.at(i));
  return out;
}

}  // namespace faultlab

#endif  // FAULTLAB_FAULT_HPP_
