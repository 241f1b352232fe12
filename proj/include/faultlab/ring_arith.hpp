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

// Exact modular arithmetic over Z_q[X]/(X^N + 1) for word-sized prime moduli
// and arbitrary-precision composite moduli, plus NTT-friendly prime search.

#ifndef FAULTLAB_RING_ARITH_HPP_
#define FAULTLAB_RING_ARITH_HPP_

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "faultlab/errors.hpp"

namespace faultlab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using BigInt = boost::multiprecision::cpp_int;

enum class Domain { Coefficient, Evaluation };

inline const char* to_string(Domain d) {
  return d == Domain::Coefficient ? "coefficient" : "evaluation";
}

// ---------------------------------------------------------------------------
// Word arithmetic. All moduli are below 2^63, so a + b never overflows.
// ---------------------------------------------------------------------------

inline u64 mod_add(u64 a, u64 b, u64 q) {
  const u64 s = a + b;
  return s >= q ? s - q : s;
}

inline u64 mod_sub(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + (q - b); }

inline u64 mod_neg(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

inline u64 mod_mul(u64 a, u64 b, u64 q) {
  return static_cast<u64>((static_cast<u128>(a) * b) % q);
}

inline u64 mod_pow(u64 base, u64 exp, u64 q) {
  u64 result = 1 % q;
  base %= q;
  while (exp != 0) {
    if (exp & 1) result = mod_mul(result, base, q);
    base = mod_mul(base, base, q);
    exp >>= 1;
  }
  return result;
}

// Inverse of a modulo m via extended Euclid; m need not be prime.
inline u64 mod_inv(u64 a, u64 m) {
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    const __int128 quot = r / new_r;
    t -= quot * new_t;
    std::swap(t, new_t);
    r -= quot * new_r;
    std::swap(r, new_r);
  }
  if (r != 1) throw ArgumentError("mod_inv: value is not invertible");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

// Residue reduced from a signed value.
inline u64 from_signed(i64 v, u64 q) {
  if (v >= 0) return static_cast<u64>(v) % q;
  const u64 mag = static_cast<u64>(-(v + 1)) + 1;  // |v| without overflow
  const u64 r = mag % q;
  return r == 0 ? 0 : q - r;
}

// Signed representative in (-q/2, q/2].
inline i64 centered(u64 x, u64 q) {
  return x <= q / 2 ? static_cast<i64>(x) : -static_cast<i64>(q - x);
}

inline BigInt centered(const BigInt& x, const BigInt& q) {
  return x <= q / 2 ? x : BigInt(x - q);
}

inline int bit_length(u64 x) { return x == 0 ? 0 : 64 - std::countl_zero(x); }

inline int bit_length(const BigInt& x) {
  return x == 0 ? 0 : static_cast<int>(boost::multiprecision::msb(x)) + 1;
}

// Deterministic Miller-Rabin; the first twelve primes as witnesses are exact
// for every 64-bit input.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  constexpr u64 kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : kWitnesses) {
    u64 x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mod_mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Smallest primitive `order`-th root of unity modulo prime q, `order` a power
// of two. One root is found from a generator candidate; every primitive root
// of that order is one of its odd powers, and the minimum is returned.
inline u64 find_primitive_root(u64 q, u64 order) {
  if (order < 2 || !is_power_of_two(order)) {
    throw ParameterError("find_primitive_root: order must be a power of two >= 2");
  }
  if (q < 3 || (q - 1) % order != 0) {
    throw ParameterError("find_primitive_root: q is not 1 mod " + std::to_string(order));
  }
  const u64 half = order / 2;
  const u64 cofactor = (q - 1) / order;
  u64 root = 0;
  for (u64 g = 2; g < q; ++g) {
    const u64 x = mod_pow(g, cofactor, q);
    if (mod_pow(x, half, q) == q - 1) {
      root = x;
      break;
    }
  }
  if (root == 0) throw ParameterError("find_primitive_root: no root found");
  const u64 step = mod_mul(root, root, q);
  u64 best = root;
  u64 cur = root;
  for (u64 k = 3; k < order; k += 2) {
    cur = mod_mul(cur, step, q);
    best = std::min(best, cur);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Moduli
// ---------------------------------------------------------------------------

/// A word-sized prime modulus. When built with `ntt_friendly` it also carries
/// the primitive 2N-th root psi, its inverse and N^{-1}; plain CRT moduli
/// leave those at zero.
class PrimeModulus {
 public:
  PrimeModulus() = default;

  explicit PrimeModulus(u64 q) : q_(q), bit_width_(bit_length(q)) {
    if (q < 2 || q >= (u64{1} << 62) || !is_prime(q)) {
      throw ArgumentError("PrimeModulus: " + std::to_string(q) + " is not a prime below 2^62");
    }
  }

  static PrimeModulus ntt_friendly(u64 q, std::size_t n) {
    if (!is_power_of_two(n)) throw ParameterError("PrimeModulus: N must be a power of two");
    PrimeModulus m(q);
    if ((q - 1) % (2 * n) != 0) {
      throw ParameterError("PrimeModulus: q is not 1 mod 2N");
    }
    m.n_ = n;
    m.psi_ = find_primitive_root(q, 2 * n);
    m.psi_inv_ = mod_inv(m.psi_, q);
    m.n_inv_ = mod_inv(n % q, q);
    return m;
  }

  u64 value() const { return q_; }
  int bit_width() const { return bit_width_; }
  bool supports_ntt() const { return n_ != 0; }
  std::size_t ring_dimension() const { return n_; }
  u64 psi() const { return psi_; }
  u64 psi_inv() const { return psi_inv_; }
  u64 n_inv() const { return n_inv_; }

  friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) {
    return a.q_ == b.q_ && a.n_ == b.n_;
  }

 private:
  u64 q_ = 0;
  int bit_width_ = 0;
  std::size_t n_ = 0;
  u64 psi_ = 0;
  u64 psi_inv_ = 0;
  u64 n_inv_ = 0;
};

/// Arbitrary-precision modulus Q, optionally the product of pairwise distinct
/// prime factors (the RNS basis).
class CompositeModulus {
 public:
  CompositeModulus() = default;

  explicit CompositeModulus(BigInt q) : q_(std::move(q)) {
    if (q_ < 2) throw ArgumentError("CompositeModulus: Q must be >= 2");
    bit_width_ = bit_length(q_);
  }

  explicit CompositeModulus(std::vector<PrimeModulus> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw ArgumentError("CompositeModulus: empty factor list");
    q_ = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (factors_[i].value() == factors_[j].value()) {
          throw ArgumentError("CompositeModulus: factors must be pairwise distinct");
        }
      }
      q_ *= factors_[i].value();
    }
    bit_width_ = bit_length(q_);
  }

  const BigInt& value() const { return q_; }
  int bit_width() const { return bit_width_; }
  const std::vector<PrimeModulus>& factors() const { return factors_; }

  friend bool operator==(const CompositeModulus& a, const CompositeModulus& b) {
    return a.q_ == b.q_;
  }

 private:
  BigInt q_ = 0;
  int bit_width_ = 0;
  std::vector<PrimeModulus> factors_;
};

/// Prime of exactly `bits` bits with q = 1 mod 2N, found by scanning down from
/// 2^bits - 1. Primes in `exclude` are skipped.
inline PrimeModulus find_ntt_prime(int bits, std::size_t n, const std::set<u64>& exclude = {}) {
  if (bits < 2 || bits > 62) throw ParameterError("find_ntt_prime: bits must be in [2, 62]");
  if (!is_power_of_two(n)) throw ParameterError("find_ntt_prime: N must be a power of two");
  const u64 step = 2 * static_cast<u64>(n);
  const u64 hi = (u64{1} << bits) - 1;
  const u64 lo = u64{1} << (bits - 1);
  if (hi < step + 1) throw ParameterError("find_ntt_prime: bit width too small for 2N");
  u64 cand = hi - ((hi - 1) % step);  // largest value <= hi with cand = 1 mod step
  for (; cand >= lo; cand -= step) {
    if (!exclude.contains(cand) && is_prime(cand)) return PrimeModulus::ntt_friendly(cand, n);
    if (cand < step) break;
  }
  throw ParameterError("find_ntt_prime: no " + std::to_string(bits) + "-bit prime = 1 mod " +
                       std::to_string(step));
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Polynomial with word residues in [0, q), tagged with its domain.
struct RingPoly {
  std::vector<u64> coeffs;
  PrimeModulus modulus;
  Domain domain = Domain::Coefficient;

  RingPoly() = default;
  RingPoly(std::size_t n, PrimeModulus m, Domain d = Domain::Coefficient)
      : coeffs(n, 0), modulus(std::move(m)), domain(d) {
    if (!is_power_of_two(n)) throw ArgumentError("RingPoly: N must be a power of two");
  }
  RingPoly(std::vector<u64> c, PrimeModulus m, Domain d = Domain::Coefficient)
      : coeffs(std::move(c)), modulus(std::move(m)), domain(d) {
    if (!is_power_of_two(coeffs.size())) throw ArgumentError("RingPoly: N must be a power of two");
    for (u64 x : coeffs) {
      if (x >= modulus.value()) throw ArgumentError("RingPoly: coefficient not reduced");
    }
  }

  std::size_t size() const { return coeffs.size(); }
  u64 q() const { return modulus.value(); }

  friend bool operator==(const RingPoly&, const RingPoly&) = default;
};

/// Polynomial with arbitrary-precision residues in [0, Q). Always in the
/// coefficient domain.
struct BigPoly {
  std::vector<BigInt> coeffs;
  CompositeModulus modulus;

  BigPoly() = default;
  BigPoly(std::size_t n, CompositeModulus m) : coeffs(n, BigInt(0)), modulus(std::move(m)) {
    if (!is_power_of_two(n)) throw ArgumentError("BigPoly: N must be a power of two");
  }
  BigPoly(std::vector<BigInt> c, CompositeModulus m) : coeffs(std::move(c)), modulus(std::move(m)) {
    if (!is_power_of_two(coeffs.size())) throw ArgumentError("BigPoly: N must be a power of two");
    for (const auto& x : coeffs) {
      if (x < 0 || x >= modulus.value()) throw ArgumentError("BigPoly: coefficient not reduced");
    }
  }

  std::size_t size() const { return coeffs.size(); }
  const BigInt& q() const { return modulus.value(); }

  friend bool operator==(const BigPoly& a, const BigPoly& b) {
    return a.modulus == b.modulus && a.coeffs == b.coeffs;
  }
};

namespace detail {

inline void check_compatible(const RingPoly& a, const RingPoly& b, const char* op) {
  if (a.size() != b.size()) throw ArgumentError(std::string(op) + ": length mismatch");
  if (a.q() != b.q()) throw ArgumentError(std::string(op) + ": modulus mismatch");
  if (a.domain != b.domain) throw StateError(std::string(op) + ": domain mismatch");
}

inline void check_compatible(const BigPoly& a, const BigPoly& b, const char* op) {
  if (a.size() != b.size()) throw ArgumentError(std::string(op) + ": length mismatch");
  if (!(a.modulus == b.modulus)) throw ArgumentError(std::string(op) + ": modulus mismatch");
}

inline BigInt big_mod(BigInt x, const BigInt& q) {
  x %= q;
  if (x < 0) x += q;
  return x;
}

}  // namespace detail

inline RingPoly add(const RingPoly& a, const RingPoly& b) {
  detail::check_compatible(a, b, "add");
  RingPoly c = a;
  const u64 q = a.q();
  for (std::size_t i = 0; i < c.size(); ++i) c.coeffs[i] = mod_add(a.coeffs[i], b.coeffs[i], q);
  return c;
}

inline RingPoly sub(const RingPoly& a, const RingPoly& b) {
  detail::check_compatible(a, b, "sub");
  RingPoly c = a;
  const u64 q = a.q();
  for (std::size_t i = 0; i < c.size(); ++i) c.coeffs[i] = mod_sub(a.coeffs[i], b.coeffs[i], q);
  return c;
}

inline RingPoly negate(const RingPoly& a) {
  RingPoly c = a;
  for (auto& x : c.coeffs) x = mod_neg(x, a.q());
  return c;
}

inline BigPoly add(const BigPoly& a, const BigPoly& b) {
  detail::check_compatible(a, b, "add");
  BigPoly c = a;
  const BigInt& q = a.q();
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.coeffs[i] += b.coeffs[i];
    if (c.coeffs[i] >= q) c.coeffs[i] -= q;
  }
  return c;
}

inline BigPoly sub(const BigPoly& a, const BigPoly& b) {
  detail::check_compatible(a, b, "sub");
  BigPoly c = a;
  const BigInt& q = a.q();
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.coeffs[i] -= b.coeffs[i];
    if (c.coeffs[i] < 0) c.coeffs[i] += q;
  }
  return c;
}

inline BigPoly negate(const BigPoly& a) {
  BigPoly c = a;
  for (auto& x : c.coeffs) {
    if (x != 0) x = a.q() - x;
  }
  return c;
}

/// c_k = sum_{i+j=k} a_i b_j - sum_{i+j=k+N} a_i b_j  (mod q).
inline RingPoly negacyclic_mul_schoolbook(const RingPoly& a, const RingPoly& b) {
  detail::check_compatible(a, b, "negacyclic_mul_schoolbook");
  if (a.domain != Domain::Coefficient) {
    throw StateError("negacyclic_mul_schoolbook: operands must be in the coefficient domain");
  }
  const std::size_t n = a.size();
  const u64 q = a.q();
  RingPoly c(n, a.modulus, Domain::Coefficient);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const u64 prod = mod_mul(a.coeffs[i], b.coeffs[j], q);
      const std::size_t k = i + j;
      if (k < n) {
        c.coeffs[k] = mod_add(c.coeffs[k], prod, q);
      } else {
        c.coeffs[k - n] = mod_sub(c.coeffs[k - n], prod, q);
      }
    }
  }
  return c;
}

inline BigPoly negacyclic_mul_schoolbook(const BigPoly& a, const BigPoly& b) {
  detail::check_compatible(a, b, "negacyclic_mul_schoolbook");
  const std::size_t n = a.size();
  std::vector<BigInt> acc(n, BigInt(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i + j;
      if (k < n) {
        acc[k] += a.coeffs[i] * b.coeffs[j];
      } else {
        acc[k - n] -= a.coeffs[i] * b.coeffs[j];
      }
    }
  }
  BigPoly c(n, a.modulus);
  for (std::size_t k = 0; k < n; ++k) c.coeffs[k] = detail::big_mod(std::move(acc[k]), a.q());
  return c;
}

/// Schoolbook product with a polynomial whose coefficients are small signed
/// integers (ternary secrets, ephemeral keys). Same result as the generic
/// schoolbook product with `small` reduced mod q; no word multiplications.
inline RingPoly negacyclic_mul_small(const RingPoly& a, std::span<const i64> small) {
  if (a.domain != Domain::Coefficient) {
    throw StateError("negacyclic_mul_small: operand must be in the coefficient domain");
  }
  const std::size_t n = a.size();
  if (small.size() != n) throw ArgumentError("negacyclic_mul_small: length mismatch");
  const u64 q = a.q();
  RingPoly c(n, a.modulus, Domain::Coefficient);
  u64* out = c.coeffs.data();
  const u64* in = a.coeffs.data();
  for (std::size_t j = 0; j < n; ++j) {
    const i64 sj = small[j];
    if (sj == 0) continue;
    if (sj == 1 || sj == -1) {
      // +a on [j, n), -a on the wrapped part (and the reverse for sj = -1).
      const bool plus = sj == 1;
      for (std::size_t i = 0; i + j < n; ++i) {
        const u64 x = out[i + j];
        const u64 y = in[i];
        out[i + j] = plus ? mod_add(x, y, q) : mod_sub(x, y, q);
      }
      for (std::size_t i = n - j; i < n; ++i) {
        const u64 x = out[i + j - n];
        const u64 y = in[i];
        out[i + j - n] = plus ? mod_sub(x, y, q) : mod_add(x, y, q);
      }
      continue;
    }
    const u64 s = from_signed(sj, q);
    for (std::size_t i = 0; i < n; ++i) {
      const u64 prod = mod_mul(in[i], s, q);
      const std::size_t k = i + j;
      if (k < n) {
        out[k] = mod_add(out[k], prod, q);
      } else {
        out[k - n] = mod_sub(out[k - n], prod, q);
      }
    }
  }
  return c;
}

inline BigPoly negacyclic_mul_small(const BigPoly& a, std::span<const i64> small) {
  const std::size_t n = a.size();
  if (small.size() != n) throw ArgumentError("negacyclic_mul_small: length mismatch");
  std::vector<BigInt> acc(n, BigInt(0));
  for (std::size_t j = 0; j < n; ++j) {
    const i64 sj = small[j];
    if (sj == 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.coeffs[i] == 0) continue;
      const std::size_t k = i + j;
      if (k < n) {
        acc[k] += a.coeffs[i] * sj;
      } else {
        acc[k - n] -= a.coeffs[i] * sj;
      }
    }
  }
  BigPoly c(n, a.modulus);
  for (std::size_t k = 0; k < n; ++k) c.coeffs[k] = detail::big_mod(std::move(acc[k]), a.q());
  return c;
}

/// Entrywise product; used for evaluation-domain multiplication.
inline RingPoly pointwise_mul(const RingPoly& a, const RingPoly& b) {
  detail::check_compatible(a, b, "pointwise_mul");
  RingPoly c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.coeffs[i] = mod_mul(a.coeffs[i], b.coeffs[i], a.q());
  return c;
}

}  // namespace faultlab

#endif  // FAULTLAB_RING_ARITH_HPP_
