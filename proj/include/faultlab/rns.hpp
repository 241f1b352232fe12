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

// Residue number system: limb decomposition of big coefficients and exact
// CRT reconstruction, p = (sum_k r_k [Q_k^{-1} mod q_k] Q_k) mod Q.

#ifndef FAULTLAB_RNS_HPP_
#define FAULTLAB_RNS_HPP_

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "faultlab/errors.hpp"
#include "faultlab/ring_arith.hpp"

namespace faultlab {

/// Ordered RNS basis with the CRT constants Q_k = Q / q_k and
/// Q_k^{-1} mod q_k precomputed.
class LimbChain {
 public:
  LimbChain() = default;

  explicit LimbChain(std::vector<PrimeModulus> moduli) : modulus_(moduli), moduli_(std::move(moduli)) {
    const BigInt& q = modulus_.value();
    for (const auto& m : moduli_) {
      BigInt q_hat = q / m.value();
      const u64 q_hat_mod = static_cast<u64>(q_hat % m.value());
      q_hat_inv_.push_back(mod_inv(q_hat_mod, m.value()));
      q_hat_.push_back(std::move(q_hat));
    }
  }

  std::size_t size() const { return moduli_.size(); }
  const std::vector<PrimeModulus>& moduli() const { return moduli_; }
  const PrimeModulus& modulus(std::size_t k) const { return moduli_.at(k); }
  const CompositeModulus& composite() const { return modulus_; }
  const BigInt& product() const { return modulus_.value(); }
  /// Q_k = Q / q_k.
  const BigInt& q_hat(std::size_t k) const { return q_hat_.at(k); }
  /// Q_k^{-1} mod q_k.
  u64 q_hat_inv(std::size_t k) const { return q_hat_inv_.at(k); }

  friend bool operator==(const LimbChain& a, const LimbChain& b) { return a.moduli_ == b.moduli_; }

 private:
  CompositeModulus modulus_;
  std::vector<PrimeModulus> moduli_;
  std::vector<BigInt> q_hat_;
  std::vector<u64> q_hat_inv_;
};

/// L distinct NTT-friendly primes of q0_bits bits each, in search order.
inline LimbChain build_chain(int q0_bits, std::size_t limbs, std::size_t n) {
  if (limbs < 1) throw ParameterError("build_chain: need at least one limb");
  std::set<u64> used;
  std::vector<PrimeModulus> moduli;
  for (std::size_t k = 0; k < limbs; ++k) {
    moduli.push_back(find_ntt_prime(q0_bits, n, used));
    used.insert(moduli.back().value());
  }
  return LimbChain(std::move(moduli));
}

/// One RingPoly per limb, all with the same length and domain.
struct RnsPoly {
  std::vector<RingPoly> limbs;

  std::size_t size() const { return limbs.empty() ? 0 : limbs.front().size(); }
  std::size_t limb_count() const { return limbs.size(); }
  Domain domain() const { return limbs.empty() ? Domain::Coefficient : limbs.front().domain; }

  friend bool operator==(const RnsPoly&, const RnsPoly&) = default;
};

inline RnsPoly decompose(const BigPoly& p, const LimbChain& chain) {
  if (p.q() != chain.product()) throw ArgumentError("decompose: modulus does not match chain");
  RnsPoly out;
  out.limbs.reserve(chain.size());
  for (const auto& m : chain.moduli()) {
    RingPoly limb(p.size(), m, Domain::Coefficient);
    for (std::size_t i = 0; i < p.size(); ++i) {
      limb.coeffs[i] = static_cast<u64>(p.coeffs[i] % m.value());
    }
    out.limbs.push_back(std::move(limb));
  }
  return out;
}

inline BigInt crt_reconstruct_coeff(const RnsPoly& r, std::size_t i, const LimbChain& chain) {
  BigInt acc = 0;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const u64 qk = chain.modulus(k).value();
    const u64 t = mod_mul(r.limbs[k].coeffs[i], chain.q_hat_inv(k), qk);
    acc += chain.q_hat(k) * t;
  }
  const BigInt& q = chain.product();
  while (acc >= q) acc -= q;
  return acc;
}

inline BigPoly crt_reconstruct(const RnsPoly& r, const LimbChain& chain) {
  if (r.limb_count() != chain.size()) throw ArgumentError("crt_reconstruct: limb count mismatch");
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (r.limbs[k].q() != chain.modulus(k).value()) {
      throw ArgumentError("crt_reconstruct: limb " + std::to_string(k) + " modulus mismatch");
    }
    if (r.limbs[k].domain != Domain::Coefficient) {
      throw StateError("crt_reconstruct: limbs must be in the coefficient domain");
    }
  }
  BigPoly out(r.size(), chain.composite());
  for (std::size_t i = 0; i < r.size(); ++i) out.coeffs[i] = crt_reconstruct_coeff(r, i, chain);
  return out;
}

/// Change of the reconstructed value when limb k moves by e:
/// e * Q_k * [Q_k^{-1} mod q_k] mod Q, centered into (-Q/2, Q/2].
inline BigInt predict_rns_error(const BigInt& e, std::size_t k, const LimbChain& chain) {
  if (k >= chain.size()) throw ArgumentError("predict_rns_error: limb index out of range");
  const BigInt& q = chain.product();
  BigInt v = (e * chain.q_hat(k) * chain.q_hat_inv(k)) % q;
  if (v < 0) v += q;
  return centered(v, q);
}

}  // namespace faultlab

#endif  // FAULTLAB_RNS_HPP_
