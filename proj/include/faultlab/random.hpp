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

// Reproducible random streams. A stream key is BLAKE2b-256 over
//   "faultlab/rng/v1" || seed (8 bytes, little-endian)
//   || for each label: length (8 bytes, little-endian) || label bytes
// and the stream itself is the ChaCha20 keystream under that key with a zero
// nonce. Words are read little-endian from the keystream.

#ifndef FAULTLAB_RANDOM_HPP_
#define FAULTLAB_RANDOM_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <sodium.h>

#include "faultlab/errors.hpp"
#include "faultlab/ring_arith.hpp"

namespace faultlab {

namespace detail {
inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

inline void append_le64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}
}  // namespace detail

class Rng {
 public:
  using Key = std::array<unsigned char, crypto_stream_chacha20_KEYBYTES>;

  explicit Rng(const Key& key) : key_(key) { detail::ensure_sodium(); }

  void fill(std::span<unsigned char> out) {
    for (auto& byte : out) {
      if (pos_ == buffer_.size()) refill();
      byte = buffer_[pos_++];
    }
  }

  std::uint64_t next_u64() {
    if (buffer_.size() - pos_ < 8) {
      std::array<unsigned char, 8> bytes{};
      fill(bytes);
      return load_le(bytes.data());
    }
    const std::uint64_t v = load_le(buffer_.data() + pos_);
    pos_ += 8;
    return v;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  /// Uniform in [0, bound) by rejection on bit_length(bound)-bit words.
  u64 uniform_below(u64 bound) {
    if (bound == 0) throw ArgumentError("uniform_below: zero bound");
    const int bits = bit_length(bound);
    const u64 mask = bits >= 64 ? ~u64{0} : (u64{1} << bits) - 1;
    for (;;) {
      const u64 x = next_u64() & mask;
      if (x < bound) return x;
    }
  }

  BigInt uniform_below(const BigInt& bound) {
    if (bound <= 0) throw ArgumentError("uniform_below: non-positive bound");
    const int bits = bit_length(bound);
    const int words = (bits + 63) / 64;
    const int top_bits = bits - 64 * (words - 1);
    const u64 top_mask = top_bits >= 64 ? ~u64{0} : (u64{1} << top_bits) - 1;
    for (;;) {
      BigInt x = 0;
      for (int w = 0; w < words; ++w) {
        u64 word = next_u64();
        if (w == words - 1) word &= top_mask;
        x |= BigInt(word) << (64 * w);
      }
      if (x < bound) return x;
    }
  }

  /// Uniform over {-1, 0, 1}.
  i64 ternary() {
    for (;;) {
      const u64 x = next_u64() >> 62;
      if (x < 3) return static_cast<i64>(x) - 1;
    }
  }

  /// Rounded continuous Gaussian (polar method), resampled outside
  /// [-tail * sigma, tail * sigma].
  i64 rounded_gaussian(double sigma, double tail = 6.0) {
    const double bound = tail * sigma;
    for (;;) {
      double u, v, s;
      do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
      } while (s >= 1.0 || s == 0.0);
      const double x = sigma * u * std::sqrt(-2.0 * std::log(s) / s);
      const double r = std::round(x);
      if (std::fabs(r) <= bound) return static_cast<i64>(r);
    }
  }

 private:
  static std::uint64_t load_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
  }

  void refill() {
    const std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES> nonce{};
    std::array<unsigned char, kBufferBytes> zeros{};
    crypto_stream_chacha20_xor_ic(buffer_.data(), zeros.data(), buffer_.size(), nonce.data(),
                                  block_counter_, key_.data());
    block_counter_ += kBufferBytes / 64;
    pos_ = 0;
  }

  static constexpr std::size_t kBufferBytes = 4096;
  Key key_;
  std::array<unsigned char, kBufferBytes> buffer_{};
  std::size_t pos_ = kBufferBytes;
  std::uint64_t block_counter_ = 0;
};

inline Rng derive_rng(std::uint64_t master_seed, std::span<const std::string> labels) {
  detail::ensure_sodium();
  std::vector<unsigned char> msg;
  constexpr std::string_view kTag = "faultlab/rng/v1";
  msg.insert(msg.end(), kTag.begin(), kTag.end());
  detail::append_le64(msg, master_seed);
  for (const auto& label : labels) {
    detail::append_le64(msg, label.size());
    msg.insert(msg.end(), label.begin(), label.end());
  }
  Rng::Key key{};
  crypto_generichash(key.data(), key.size(), msg.data(), msg.size(), nullptr, 0);
  return Rng(key);
}

inline Rng derive_rng(std::uint64_t master_seed, std::initializer_list<std::string> labels) {
  return derive_rng(master_seed, std::span<const std::string>(labels.begin(), labels.size()));
}

inline std::vector<i64> sample_ternary(Rng& rng, std::size_t n) {
  std::vector<i64> out(n);
  for (auto& x : out) x = rng.ternary();
  return out;
}

/// Exactly h nonzero entries in {-1, 1}; positions by partial Fisher-Yates.
inline std::vector<i64> sample_sparse_ternary(Rng& rng, std::size_t n, std::size_t h) {
  if (h > n) throw ArgumentError("sample_sparse_ternary: hamming weight exceeds N");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<i64> out(n, 0);
  for (std::size_t k = 0; k < h; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.uniform_below(n - k));
    std::swap(idx[k], idx[pick]);
    out[idx[k]] = (rng.next_u64() & 1) ? 1 : -1;
  }
  return out;
}

inline std::vector<i64> sample_gaussian(Rng& rng, std::size_t n, double sigma) {
  std::vector<i64> out(n);
  for (auto& x : out) x = rng.rounded_gaussian(sigma);
  return out;
}

}  // namespace faultlab

#endif  // FAULTLAB_RANDOM_HPP_
