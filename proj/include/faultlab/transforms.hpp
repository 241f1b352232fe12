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

// Encode/decode through the negacyclic DFT with sparse (gap) packing, the
// analytic single-flip L2 predictor, and the negacyclic NTT.
//
// Packing: n requested slots are padded to n' = next_pow2(n). The small ring
// of dimension 2n' is embedded at stride gap = (N/2)/n', i.e. small
// coefficient t lives at index t * gap of the big polynomial. The small DFT
// matrix is W[r][c] = xi^((2r+1) c) with xi = exp(-2 pi i / 4n').
//
// All DFT arithmetic is carried out in long double; Delta * z reaches 2^58
// at Delta = 2^50, which double cannot hold exactly.

#ifndef FAULTLAB_TRANSFORMS_HPP_
#define FAULTLAB_TRANSFORMS_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "faultlab/errors.hpp"
#include "faultlab/ring_arith.hpp"

namespace faultlab {

using cld = std::complex<long double>;

inline std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

class EncodingContext {
 public:
  EncodingContext(std::size_t ring_dimension, std::size_t slots, int delta_log2)
      : n_(ring_dimension), slots_(slots), delta_log2_(delta_log2) {
    if (!is_power_of_two(n_) || n_ < 2) {
      throw ArgumentError("EncodingContext: N must be a power of two >= 2");
    }
    if (slots_ < 1) throw ArgumentError("EncodingContext: slot count must be >= 1");
    if (slots_ > n_ / 2) {
      throw CapacityError("EncodingContext: " + std::to_string(slots_) + " slots exceed N/2 = " +
                          std::to_string(n_ / 2));
    }
    if (delta_log2_ < 0 || delta_log2_ > 62) {
      throw ArgumentError("EncodingContext: delta_log2 must be in [0, 62]");
    }
    padded_ = next_pow2(slots_);
    gap_ = (n_ / 2) / padded_;
    delta_ = std::ldexp(1.0L, delta_log2_);
    build_roots();
  }

  std::size_t ring_dimension() const { return n_; }
  std::size_t slots() const { return slots_; }
  std::size_t padded_slots() const { return padded_; }
  std::size_t small_dimension() const { return 2 * padded_; }
  std::size_t gap() const { return gap_; }
  int delta_log2() const { return delta_log2_; }
  long double delta() const { return delta_; }

  /// Entry (r, c) of the small decoding matrix W.
  cld w(std::size_t r, std::size_t c) const { return roots_[((2 * r + 1) * c) % roots_.size()]; }

  /// Entry (r, c) of W^{-1} = W^H / (2n').
  cld w_inv(std::size_t r, std::size_t c) const {
    return std::conj(w(c, r)) / static_cast<long double>(small_dimension());
  }

  /// Real part of W[r][c]; exact zero on the imaginary-only column c = n'.
  long double w_real(std::size_t r, std::size_t c) const {
    return roots_[((2 * r + 1) * c) % roots_.size()].real();
  }

  /// Coefficient index read by decode (a multiple of gap).
  bool is_structural(std::size_t i) const { return i < n_ && i % gap_ == 0; }

  /// Coefficient index whose perturbation reaches the real slot outputs:
  /// structural and not the imaginary-only index N/2.
  bool is_sensitive(std::size_t i) const { return is_structural(i) && i != n_ / 2; }

  /// Number of structural coefficients, 2n' = N / gap.
  std::size_t structural_count() const { return small_dimension(); }

  std::vector<std::vector<cld>> decode_matrix() const {
    const std::size_t m = small_dimension();
    std::vector<std::vector<cld>> out(m, std::vector<cld>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) out[r][c] = w(r, c);
    return out;
  }

  std::vector<std::vector<cld>> encode_matrix() const {
    const std::size_t m = small_dimension();
    std::vector<std::vector<cld>> out(m, std::vector<cld>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) out[r][c] = w_inv(r, c);
    return out;
  }

 private:
  // roots_[k] = xi^k for k < 4n'. Quarter turns are exact, and the table is
  // built by symmetry so conjugate pairs are bitwise conjugates.
  void build_roots() {
    const std::size_t m = 4 * padded_;
    const std::size_t quarter = m / 4;
    roots_.assign(m, cld(0, 0));
    roots_[0] = cld(1, 0);
    for (std::size_t k = 1; k < quarter; ++k) {
      const long double angle = 2.0L * std::numbers::pi_v<long double> * k / m;
      roots_[k] = cld(std::cos(angle), -std::sin(angle));
    }
    for (std::size_t k = quarter; k < 2 * quarter; ++k) {
      const cld a = roots_[k - quarter];  // times xi^(m/4) = -i
      roots_[k] = cld(a.imag(), -a.real());
    }
    for (std::size_t k = 2 * quarter; k < m; ++k) roots_[k] = -roots_[k - 2 * quarter];
  }

  std::size_t n_;
  std::size_t slots_;
  std::size_t padded_ = 1;
  std::size_t gap_ = 1;
  int delta_log2_;
  long double delta_ = 1;
  std::vector<cld> roots_;
};

/// Integer coefficient vector of length N for the real input z:
/// Round(Delta * W^{-1} v) placed at stride gap, where v is z zero-padded to
/// n' and mirrored as (u_0..u_{n'-1}, conj(u_{n'-1})..conj(u_0)). Rounding is
/// half away from zero.
inline std::vector<i64> encode(std::span<const double> z, const EncodingContext& ctx) {
  const std::size_t n = ctx.ring_dimension();
  if (z.size() > n / 2) throw CapacityError("encode: more values than N/2 slots");
  if (z.size() != ctx.slots()) {
    throw ArgumentError("encode: expected " + std::to_string(ctx.slots()) + " values, got " +
                        std::to_string(z.size()));
  }
  const std::size_t np = ctx.padded_slots();
  const std::size_t m = ctx.small_dimension();
  std::vector<long double> v(m, 0.0L);
  for (std::size_t t = 0; t < z.size(); ++t) v[t] = z[t];
  for (std::size_t t = 0; t < np; ++t) v[np + t] = v[np - 1 - t];

  // Conjugate symmetry of v makes W^{-1} v real; only the real part is formed.
  const long double scale = ctx.delta() / static_cast<long double>(m);
  std::vector<i64> out(n, 0);
  for (std::size_t c = 0; c < m; ++c) {
    long double acc = 0.0L;
    for (std::size_t r = 0; r < m; ++r) acc += ctx.w_real(r, c) * v[r];
    const long double scaled = acc * scale;
    if (!(std::fabs(scaled) < 0x1p62L)) throw CapacityError("encode: coefficient exceeds 62 bits");
    out[c * ctx.gap()] = std::llround(scaled);
  }
  return out;
}

/// Real parts of the first n entries of W (m_small / Delta), reading only the
/// coefficients at multiples of gap.
inline std::vector<double> decode(std::span<const long double> m, const EncodingContext& ctx) {
  if (m.size() != ctx.ring_dimension()) throw ArgumentError("decode: length mismatch");
  const std::size_t small = ctx.small_dimension();
  std::vector<long double> s(small);
  for (std::size_t t = 0; t < small; ++t) s[t] = m[t * ctx.gap()] / ctx.delta();
  std::vector<double> out(ctx.slots());
  for (std::size_t r = 0; r < ctx.slots(); ++r) {
    long double acc = 0.0L;
    for (std::size_t c = 0; c < small; ++c) acc += ctx.w_real(r, c) * s[c];
    out[r] = static_cast<double>(acc);
  }
  return out;
}

inline std::vector<double> decode(std::span<const i64> m, const EncodingContext& ctx) {
  std::vector<long double> wide(m.begin(), m.end());
  return decode(wide, ctx);
}

/// L2 norm of the real slot outputs of the decode map applied to 2^j at
/// coefficient i (no rounding).
inline double predict_l2_norm(std::size_t i, int j, const EncodingContext& ctx) {
  if (i >= ctx.ring_dimension()) throw ArgumentError("predict_l2_norm: coefficient out of range");
  if (j < 0) throw ArgumentError("predict_l2_norm: negative bit index");
  if (!ctx.is_structural(i)) return 0.0;
  const std::size_t t = i / ctx.gap();
  const long double e = std::ldexp(1.0L, j) / ctx.delta();
  long double sum = 0.0L;
  for (std::size_t r = 0; r < ctx.slots(); ++r) {
    const long double x = ctx.w_real(r, t) * e;
    sum += x * x;
  }
  return static_cast<double>(std::sqrt(sum));
}

// ---------------------------------------------------------------------------
// Negacyclic NTT: a_r = sum_c p_c psi^((2r+1)c) mod q, natural order in and
// out. Implemented as a psi^c twist followed by a radix-2 cyclic transform
// with omega = psi^2.
// ---------------------------------------------------------------------------

class NttTables {
 public:
  NttTables() = default;

  explicit NttTables(PrimeModulus m) : modulus_(std::move(m)) {
    if (!modulus_.supports_ntt()) throw ParameterError("NttTables: modulus has no 2N-th root");
    const std::size_t n = modulus_.ring_dimension();
    const u64 q = modulus_.value();
    const u64 psi = modulus_.psi();
    const u64 psi_inv = modulus_.psi_inv();
    forward_twiddles_.resize(n);
    inverse_twiddles_.resize(n);
    u64 f = 1, b = modulus_.n_inv();
    for (std::size_t c = 0; c < n; ++c) {
      forward_twiddles_[c] = f;
      inverse_twiddles_[c] = b;  // psi^{-c} * N^{-1}
      f = mod_mul(f, psi, q);
      b = mod_mul(b, psi_inv, q);
    }
    const u64 omega = mod_mul(psi, psi, q);
    const u64 omega_inv = mod_mul(psi_inv, psi_inv, q);
    omega_pows_.resize(n / 2 + 1);
    omega_inv_pows_.resize(n / 2 + 1);
    u64 x = 1, y = 1;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      omega_pows_[k] = x;
      omega_inv_pows_[k] = y;
      x = mod_mul(x, omega, q);
      y = mod_mul(y, omega_inv, q);
    }
  }

  const PrimeModulus& modulus() const { return modulus_; }
  std::size_t size() const { return forward_twiddles_.size(); }
  u64 n_inv() const { return modulus_.n_inv(); }
  const std::vector<u64>& forward_twiddles() const { return forward_twiddles_; }
  const std::vector<u64>& inverse_twiddles() const { return inverse_twiddles_; }

  void cyclic(std::vector<u64>& a, bool inverse) const {
    const std::size_t n = a.size();
    const u64 q = modulus_.value();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    const std::vector<u64>& pows = inverse ? omega_inv_pows_ : omega_pows_;
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t stride = n / len;
      const std::size_t half = len / 2;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const u64 u = a[i + j];
          const u64 v = mod_mul(a[i + j + half], pows[j * stride], q);
          a[i + j] = mod_add(u, v, q);
          a[i + j + half] = mod_sub(u, v, q);
        }
      }
    }
  }

 private:
  PrimeModulus modulus_;
  std::vector<u64> forward_twiddles_;
  std::vector<u64> inverse_twiddles_;
  std::vector<u64> omega_pows_;
  std::vector<u64> omega_inv_pows_;
};

inline RingPoly ntt_forward(RingPoly p, const NttTables& t) {
  if (p.domain != Domain::Coefficient) throw StateError("ntt_forward: already in evaluation domain");
  if (!(p.modulus == t.modulus()) || p.size() != t.size()) {
    throw ArgumentError("ntt_forward: tables do not match the polynomial");
  }
  const u64 q = p.q();
  for (std::size_t c = 0; c < p.size(); ++c) {
    p.coeffs[c] = mod_mul(p.coeffs[c], t.forward_twiddles()[c], q);
  }
  t.cyclic(p.coeffs, false);
  p.domain = Domain::Evaluation;
  return p;
}

inline RingPoly ntt_inverse(RingPoly p, const NttTables& t) {
  if (p.domain != Domain::Evaluation) throw StateError("ntt_inverse: already in coefficient domain");
  if (!(p.modulus == t.modulus()) || p.size() != t.size()) {
    throw ArgumentError("ntt_inverse: tables do not match the polynomial");
  }
  const u64 q = p.q();
  t.cyclic(p.coeffs, true);
  for (std::size_t c = 0; c < p.size(); ++c) {
    p.coeffs[c] = mod_mul(p.coeffs[c], t.inverse_twiddles()[c], q);
  }
  p.domain = Domain::Coefficient;
  return p;
}

}  // namespace faultlab

#endif  // FAULTLAB_TRANSFORMS_HPP_
