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

// Client-side CKKS pipeline: keygen, encode, encrypt (secret or public key),
// decrypt and decode, in four storage modes:
//
//   Vanilla  single big modulus, arbitrary-precision coefficients
//   RnsOnly  limb-decomposed word residues, coefficient domain
//   NttOnly  one word limb, evaluation domain
//   RnsNtt   limb-decomposed word residues, evaluation domain
//
// Depth zero only: there is no evaluation API.

#ifndef FAULTLAB_CKKS_HPP_
#define FAULTLAB_CKKS_HPP_

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "faultlab/errors.hpp"
#include "faultlab/random.hpp"
#include "faultlab/ring_arith.hpp"
#include "faultlab/rns.hpp"
#include "faultlab/transforms.hpp"

namespace faultlab {

enum class Mode { Vanilla, RnsOnly, NttOnly, RnsNtt };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Vanilla: return "vanilla";
    case Mode::RnsOnly: return "rns";
    case Mode::NttOnly: return "ntt";
    case Mode::RnsNtt: return "rns_ntt";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "vanilla") return Mode::Vanilla;
  if (s == "rns" || s == "rns_only") return Mode::RnsOnly;
  if (s == "ntt" || s == "ntt_only") return Mode::NttOnly;
  if (s == "rns_ntt" || s == "rns+ntt") return Mode::RnsNtt;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

inline bool uses_ntt(Mode m) { return m == Mode::NttOnly || m == Mode::RnsNtt; }

struct SchemeParams {
  std::size_t ring_dimension = 16;
  int q0_bits = 60;
  std::size_t num_limbs = 1;
  int delta_log2 = 20;
  Mode mode = Mode::Vanilla;
  std::size_t slots = 8;
  std::optional<std::size_t> hamming_weight;
  double sigma = 3.2;
  // Vanilla only: Q = q0 * Delta^vanilla_levels (0 keeps Q = q0).
  int vanilla_levels = 0;

  void validate() const {
    if (!is_power_of_two(ring_dimension) || ring_dimension < 4) {
      throw ParameterError("N must be a power of two >= 4");
    }
    if (q0_bits < 8 || q0_bits > 61) throw ParameterError("q0_bits must be in [8, 61]");
    if (num_limbs < 1) throw ParameterError("num_limbs must be >= 1");
    if ((mode == Mode::Vanilla || mode == Mode::NttOnly) && num_limbs != 1) {
      throw ParameterError(std::string(to_string(mode)) + " mode uses a single limb");
    }
    if (delta_log2 < 1 || delta_log2 >= q0_bits) {
      throw ParameterError("delta_log2 must be in [1, q0_bits)");
    }
    if (slots < 1 || slots > ring_dimension / 2) throw ParameterError("slots must be in [1, N/2]");
    if (hamming_weight && (*hamming_weight < 1 || *hamming_weight > ring_dimension)) {
      throw ParameterError("hamming_weight must be in [1, N]");
    }
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    if (vanilla_levels < 0 || (vanilla_levels > 0 && mode != Mode::Vanilla)) {
      throw ParameterError("vanilla_levels applies to vanilla mode only");
    }
  }

  std::string fingerprint() const {
    std::ostringstream os;
    os << to_string(mode) << "/N" << ring_dimension << "/q" << q0_bits << "/L" << num_limbs << "/d"
       << delta_log2 << "/n" << slots;
    if (hamming_weight) os << "/h" << *hamming_weight;
    if (vanilla_levels) os << "/lv" << vanilla_levels;
    return os.str();
  }
};

/// Polynomial in the active representation of a context.
using Poly = std::variant<BigPoly, RnsPoly>;

/// Small signed polynomial (secret, ephemeral key) with its image in the
/// active representation.
struct SmallPoly {
  std::vector<i64> coeffs;
  Poly rep;
};

struct SecretKey {
  SmallPoly s;
  std::uint64_t seed = 0;
};

struct PublicKey {
  Poly p0;
  Poly p1;
};

struct KeyPair {
  SecretKey sk;
  PublicKey pk;
};

struct Plaintext {
  Poly poly;
  int delta_log2 = 0;
  std::size_t slots = 0;

  friend bool operator==(const Plaintext&, const Plaintext&) = default;
};

struct Ciphertext {
  Poly c0;
  Poly c1;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

class CkksContext {
 public:
  explicit CkksContext(SchemeParams params)
      : params_((params.validate(), std::move(params))),
        encoding_(params_.ring_dimension, params_.slots, params_.delta_log2) {
    const std::size_t n = params_.ring_dimension;
    chain_ = build_chain(params_.q0_bits, params_.num_limbs, n);
    if (params_.mode == Mode::Vanilla) {
      BigInt q = chain_.modulus(0).value();
      for (int l = 0; l < params_.vanilla_levels; ++l) q <<= params_.delta_log2;
      big_modulus_ = CompositeModulus(q);
    } else {
      big_modulus_ = chain_.composite();
    }
    if (uses_ntt(params_.mode)) {
      for (const auto& m : chain_.moduli()) tables_.emplace_back(m);
    }
  }

  static std::shared_ptr<const CkksContext> create(SchemeParams params) {
    return std::make_shared<const CkksContext>(std::move(params));
  }

  const SchemeParams& params() const { return params_; }
  Mode mode() const { return params_.mode; }
  std::size_t ring_dimension() const { return params_.ring_dimension; }
  const EncodingContext& encoding() const { return encoding_; }
  const LimbChain& chain() const { return chain_; }
  /// Q of the active representation.
  const CompositeModulus& modulus() const { return big_modulus_; }
  const NttTables& ntt_tables(std::size_t k) const { return tables_.at(k); }
  bool is_vanilla() const { return params_.mode == Mode::Vanilla; }
  Domain storage_domain() const {
    return uses_ntt(params_.mode) ? Domain::Evaluation : Domain::Coefficient;
  }
  std::size_t limb_count() const { return is_vanilla() ? 1 : chain_.size(); }

  /// Bit positions a single flip may address: bit_width(Q) for
  /// arbitrary-precision residues, the full 64-bit word otherwise.
  int injectable_width() const { return is_vanilla() ? big_modulus_.bit_width() : 64; }

  // -- representation -------------------------------------------------------

  Poly zero() const {
    const std::size_t n = ring_dimension();
    if (is_vanilla()) return BigPoly(n, big_modulus_);
    RnsPoly p;
    for (const auto& m : chain_.moduli()) p.limbs.emplace_back(n, m, storage_domain());
    return p;
  }

  /// Signed integer coefficients mapped into the active representation;
  /// negative v becomes Q - |v|.
  Poly from_signed(std::span<const i64> v) const {
    const std::size_t n = ring_dimension();
    if (v.size() != n) throw ArgumentError("from_signed: length mismatch");
    if (is_vanilla()) {
      BigPoly p(n, big_modulus_);
      for (std::size_t i = 0; i < n; ++i) {
        p.coeffs[i] = v[i] >= 0 ? BigInt(v[i]) : BigInt(big_modulus_.value() + v[i]);
      }
      return p;
    }
    RnsPoly p;
    for (std::size_t k = 0; k < chain_.size(); ++k) {
      const auto& m = chain_.modulus(k);
      RingPoly limb(n, m, Domain::Coefficient);
      for (std::size_t i = 0; i < n; ++i) limb.coeffs[i] = faultlab::from_signed(v[i], m.value());
      p.limbs.push_back(std::move(limb));
    }
    return to_storage(std::move(p));
  }

  SmallPoly small(std::vector<i64> coeffs) const {
    Poly rep = from_signed(coeffs);
    return SmallPoly{std::move(coeffs), std::move(rep)};
  }

  /// Uniform element of Z_Q[X]/(X^N+1), sampled coefficient-major and
  /// limb-minor directly in the storage domain.
  Poly uniform(Rng& rng) const {
    const std::size_t n = ring_dimension();
    if (is_vanilla()) {
      BigPoly p(n, big_modulus_);
      for (auto& c : p.coeffs) c = rng.uniform_below(big_modulus_.value());
      return p;
    }
    RnsPoly p;
    for (const auto& m : chain_.moduli()) p.limbs.emplace_back(n, m, storage_domain());
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& limb : p.limbs) limb.coeffs[i] = rng.uniform_below(limb.q());
    }
    return p;
  }

  RnsPoly to_storage(RnsPoly p) const {
    if (!uses_ntt(params_.mode)) return p;
    for (std::size_t k = 0; k < p.limbs.size(); ++k) {
      if (p.limbs[k].domain == Domain::Coefficient) p.limbs[k] = ntt_forward(std::move(p.limbs[k]), tables_[k]);
    }
    return p;
  }

  RnsPoly to_coefficient(RnsPoly p) const {
    for (std::size_t k = 0; k < p.limbs.size(); ++k) {
      if (p.limbs[k].domain == Domain::Evaluation) p.limbs[k] = ntt_inverse(std::move(p.limbs[k]), tables_.at(k));
    }
    return p;
  }

  Poly add(const Poly& a, const Poly& b) const { return binary(a, b, [](const auto& x, const auto& y) { return faultlab::add(x, y); }); }
  Poly sub(const Poly& a, const Poly& b) const { return binary(a, b, [](const auto& x, const auto& y) { return faultlab::sub(x, y); }); }

  Poly negate(const Poly& a) const {
    if (const auto* big = std::get_if<BigPoly>(&a)) return faultlab::negate(*big);
    RnsPoly out = std::get<RnsPoly>(a);
    for (auto& limb : out.limbs) limb = faultlab::negate(limb);
    return out;
  }

  /// a * s in the ring: schoolbook in the coefficient domain, entrywise in the
  /// evaluation domain.
  Poly mul_small(const Poly& a, const SmallPoly& s) const {
    if (const auto* big = std::get_if<BigPoly>(&a)) return negacyclic_mul_small(*big, s.coeffs);
    const auto& ra = std::get<RnsPoly>(a);
    const auto& rs = std::get<RnsPoly>(s.rep);
    check_limbs(ra, rs);
    RnsPoly out;
    for (std::size_t k = 0; k < ra.limbs.size(); ++k) {
      if (ra.limbs[k].domain == Domain::Evaluation) {
        out.limbs.push_back(pointwise_mul(ra.limbs[k], rs.limbs[k]));
      } else {
        out.limbs.push_back(negacyclic_mul_small(ra.limbs[k], s.coeffs));
      }
    }
    return out;
  }

  /// Exact centered coefficients in (-Q/2, Q/2] (inverse NTT and CRT as needed).
  std::vector<BigInt> centered_coeffs(const Poly& p) const {
    std::vector<BigInt> out(ring_dimension());
    if (const auto* big = std::get_if<BigPoly>(&p)) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = centered(big->coeffs[i], big->q());
      return out;
    }
    const BigPoly rec = crt_reconstruct(to_coefficient(std::get<RnsPoly>(p)), chain_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = centered(rec.coeffs[i], rec.q());
    return out;
  }

 private:
  template <typename F>
  Poly binary(const Poly& a, const Poly& b, F f) const {
    if (a.index() != b.index()) throw StateError("representation mismatch");
    if (const auto* big = std::get_if<BigPoly>(&a)) return f(*big, std::get<BigPoly>(b));
    const auto& ra = std::get<RnsPoly>(a);
    const auto& rb = std::get<RnsPoly>(b);
    check_limbs(ra, rb);
    RnsPoly out;
    for (std::size_t k = 0; k < ra.limbs.size(); ++k) out.limbs.push_back(f(ra.limbs[k], rb.limbs[k]));
    return out;
  }

  static void check_limbs(const RnsPoly& a, const RnsPoly& b) {
    if (a.limb_count() != b.limb_count()) throw StateError("limb count mismatch");
  }

  SchemeParams params_;
  EncodingContext encoding_;
  LimbChain chain_;
  CompositeModulus big_modulus_;
  std::vector<NttTables> tables_;
};

// ---------------------------------------------------------------------------
// Keys
// ---------------------------------------------------------------------------

/// Secret s (ternary, or exactly h nonzeros), then e0, then a, all from one
/// stream derived from the seed. pk = ([-a s + e0]_Q, a).
inline KeyPair keygen(const CkksContext& ctx, std::uint64_t scheme_seed) {
  const auto& p = ctx.params();
  const std::size_t n = ctx.ring_dimension();
  Rng rng = derive_rng(scheme_seed, {"keygen"});
  std::vector<i64> s = p.hamming_weight ? sample_sparse_ternary(rng, n, *p.hamming_weight)
                                        : sample_ternary(rng, n);
  const std::vector<i64> e0 = sample_gaussian(rng, n, p.sigma);
  Poly a = ctx.uniform(rng);

  KeyPair kp;
  kp.sk.s = ctx.small(std::move(s));
  kp.sk.seed = scheme_seed;
  kp.pk.p0 = ctx.add(ctx.negate(ctx.mul_small(a, kp.sk.s)), ctx.from_signed(e0));
  kp.pk.p1 = std::move(a);

  // p0 + p1 s must be the small error e0.
  const double bound = 6.0 * p.sigma * std::sqrt(static_cast<double>(n));
  for (const auto& c : ctx.centered_coeffs(ctx.add(kp.pk.p0, ctx.mul_small(kp.pk.p1, kp.sk.s)))) {
    if (boost::multiprecision::abs(c) > BigInt(static_cast<long long>(bound))) {
      throw StateError("keygen: public key error exceeds bound");
    }
  }
  return kp;
}

// ---------------------------------------------------------------------------
// Encode / decode
// ---------------------------------------------------------------------------

inline Plaintext encode_pt(const CkksContext& ctx, std::span<const double> z) {
  const auto& p = ctx.params();
  const double budget = std::ldexp(1.0, p.q0_bits - p.delta_log2 - 1);
  for (double x : z) {
    if (!(std::fabs(x) < budget)) {
      throw CapacityError("encode: |z_i| = " + std::to_string(x) + " exceeds 2^" +
                          std::to_string(p.q0_bits - p.delta_log2 - 1));
    }
  }
  const std::vector<i64> m = encode(z, ctx.encoding());
  return Plaintext{ctx.from_signed(m), p.delta_log2, p.slots};
}

/// Centered plaintext coefficients as long double, the decoder's input.
inline std::vector<long double> decode_input(const CkksContext& ctx, const Plaintext& pt) {
  std::vector<long double> out(ctx.ring_dimension());
  const std::vector<BigInt> c = ctx.centered_coeffs(pt.poly);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c[i].convert_to<long double>();
  return out;
}

inline std::vector<double> decode_pt(const CkksContext& ctx, const Plaintext& pt) {
  return decode(decode_input(ctx, pt), ctx.encoding());
}

// ---------------------------------------------------------------------------
// Encrypt / decrypt
// ---------------------------------------------------------------------------

namespace detail {
inline void check_poly(const CkksContext& ctx, const Poly& poly, const char* what) {
  if (poly.index() != ctx.zero().index()) throw StateError(std::string(what) + " representation mismatch");
  if (const auto* r = std::get_if<RnsPoly>(&poly)) {
    if (r->limb_count() != ctx.chain().size() || r->domain() != ctx.storage_domain()) {
      throw StateError(std::string(what) + " limbs or domain do not match the context");
    }
  }
}

inline void check_plaintext(const CkksContext& ctx, const Plaintext& pt) { check_poly(ctx, pt.poly, "plaintext"); }

inline void check_ciphertext(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
  check_poly(ctx, ct.c0, "ciphertext");
  check_poly(ctx, ct.c1, "ciphertext");
  check_poly(ctx, sk.s.rep, "secret key");
}
}  // namespace detail

/// ([m + a s + e]_Q, [-a]_Q) for explicit a and e.
inline Ciphertext encrypt_sk_with(const CkksContext& ctx, const Plaintext& pt, const SecretKey& sk,
                                  const Poly& a, std::span<const i64> e) {
  detail::check_plaintext(ctx, pt);
  Poly c0 = ctx.add(ctx.add(pt.poly, ctx.mul_small(a, sk.s)), ctx.from_signed(e));
  return Ciphertext{std::move(c0), ctx.negate(a)};
}

/// Samples e, then a.
inline Ciphertext encrypt_sk(const CkksContext& ctx, const Plaintext& pt, const SecretKey& sk, Rng& rng) {
  const std::vector<i64> e = sample_gaussian(rng, ctx.ring_dimension(), ctx.params().sigma);
  const Poly a = ctx.uniform(rng);
  return encrypt_sk_with(ctx, pt, sk, a, e);
}

/// ([m + p0 v + e1]_Q, [p1 v + e2]_Q) for explicit v, e1, e2.
inline Ciphertext encrypt_pk_with(const CkksContext& ctx, const Plaintext& pt, const PublicKey& pk,
                                  const SmallPoly& v, std::span<const i64> e1, std::span<const i64> e2) {
  detail::check_plaintext(ctx, pt);
  Poly c0 = ctx.add(ctx.add(pt.poly, ctx.mul_small(pk.p0, v)), ctx.from_signed(e1));
  Poly c1 = ctx.add(ctx.mul_small(pk.p1, v), ctx.from_signed(e2));
  return Ciphertext{std::move(c0), std::move(c1)};
}

struct PkRandomness {
  SmallPoly v;
  std::vector<i64> e1;
  std::vector<i64> e2;
};

/// Samples v (uniform ternary), e1, e2 in that order.
inline PkRandomness sample_pk_randomness(const CkksContext& ctx, Rng& rng) {
  const std::size_t n = ctx.ring_dimension();
  std::vector<i64> v = sample_ternary(rng, n);
  std::vector<i64> e1 = sample_gaussian(rng, n, ctx.params().sigma);
  std::vector<i64> e2 = sample_gaussian(rng, n, ctx.params().sigma);
  return PkRandomness{ctx.small(std::move(v)), std::move(e1), std::move(e2)};
}

inline Ciphertext encrypt_pk(const CkksContext& ctx, const Plaintext& pt, const PublicKey& pk, Rng& rng) {
  const PkRandomness r = sample_pk_randomness(ctx, rng);
  return encrypt_pk_with(ctx, pt, pk, r.v, r.e1, r.e2);
}

/// m = [c0 + c1 s]_Q, kept in the storage representation.
inline Plaintext decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
  detail::check_ciphertext(ctx, ct, sk);
  return Plaintext{ctx.add(ct.c0, ctx.mul_small(ct.c1, sk.s)), ctx.params().delta_log2, ctx.params().slots};
}

/// Decryptor for ciphertexts that differ from a reference ciphertext in a few
/// coefficient-domain entries of c1. The reference product c1 s is cached and
/// updated by the product of the sparse difference, which is exact by
/// linearity; evaluation-domain ciphertexts are decrypted in full.
class CachedDecryptor {
 public:
  CachedDecryptor(std::shared_ptr<const CkksContext> ctx, SecretKey sk, Ciphertext reference)
      : ctx_(std::move(ctx)), sk_(std::move(sk)), reference_(std::move(reference)),
        product_((detail::check_ciphertext(*ctx_, reference_, sk_), ctx_->mul_small(reference_.c1, sk_.s))) {}

  const Ciphertext& reference() const { return reference_; }

  Plaintext decrypt(const Ciphertext& ct) const {
    detail::check_ciphertext(*ctx_, ct, sk_);
    const auto& p = ctx_->params();
    return Plaintext{ctx_->add(ct.c0, c1_times_s(ct.c1)), p.delta_log2, p.slots};
  }

 private:
  static constexpr std::size_t kMaxSparse = 16;

  Poly c1_times_s(const Poly& c1) const {
    if (const auto* big = std::get_if<BigPoly>(&c1)) {
      const auto& ref = std::get<BigPoly>(reference_.c1);
      std::vector<std::size_t> diff;
      for (std::size_t i = 0; i < big->size() && diff.size() <= kMaxSparse; ++i) {
        if (big->coeffs[i] != ref.coeffs[i]) diff.push_back(i);
      }
      if (diff.size() > kMaxSparse) return ctx_->mul_small(c1, sk_.s);
      BigPoly out = std::get<BigPoly>(product_);
      for (std::size_t i : diff) add_shifted(out, BigInt(big->coeffs[i] - ref.coeffs[i]), i);
      return out;
    }
    const auto& r = std::get<RnsPoly>(c1);
    const auto& ref = std::get<RnsPoly>(reference_.c1);
    if (r.domain() == Domain::Evaluation) return ctx_->mul_small(c1, sk_.s);
    RnsPoly out = std::get<RnsPoly>(product_);
    for (std::size_t k = 0; k < r.limbs.size(); ++k) {
      std::vector<std::size_t> diff;
      for (std::size_t i = 0; i < r.size() && diff.size() <= kMaxSparse; ++i) {
        if (r.limbs[k].coeffs[i] != ref.limbs[k].coeffs[i]) diff.push_back(i);
      }
      if (diff.size() > kMaxSparse) {
        out.limbs[k] = negacyclic_mul_small(r.limbs[k], sk_.s.coeffs);
        continue;
      }
      for (std::size_t i : diff) {
        add_shifted(out.limbs[k], mod_sub(r.limbs[k].coeffs[i], ref.limbs[k].coeffs[i], r.limbs[k].q()), i);
      }
    }
    return out;
  }

  // out += d X^i s
  void add_shifted(BigPoly& out, const BigInt& d, std::size_t i) const {
    const auto& s = sk_.s.coeffs;
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
      if (s[j] == 0) continue;
      const std::size_t k = (i + j) % n;
      const bool wrap = i + j >= n;
      out.coeffs[k] += (wrap ? -s[j] : s[j]) * d;
      out.coeffs[k] = detail::big_mod(std::move(out.coeffs[k]), out.q());
    }
  }

  void add_shifted(RingPoly& out, u64 d, std::size_t i) const {
    const auto& s = sk_.s.coeffs;
    const std::size_t n = s.size();
    const u64 q = out.q();
    for (std::size_t j = 0; j < n; ++j) {
      if (s[j] == 0) continue;
      const std::size_t k = (i + j) % n;
      const i64 sign = i + j >= n ? -s[j] : s[j];
      const u64 term = mod_mul(d, from_signed(sign, q), q);
      out.coeffs[k] = mod_add(out.coeffs[k], term, q);
    }
  }

  std::shared_ptr<const CkksContext> ctx_;
  SecretKey sk_;
  Ciphertext reference_;
  Poly product_;
};

}  // namespace faultlab

#endif  // FAULTLAB_CKKS_HPP_
