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

// Error metrics between a golden output x and a faulted output y, and the
// three-way outcome classification.

#ifndef FAULTLAB_METRICS_HPP_
#define FAULTLAB_METRICS_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faultlab/errors.hpp"

namespace faultlab {

enum class Category { Robust, ApplicationDependent, Catastrophic };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::Robust: return "robust";
    case Category::ApplicationDependent: return "app_dependent";
    case Category::Catastrophic: return "catastrophic";
  }
  return "?";
}

inline Category parse_category(std::string_view s) {
  if (s == "robust") return Category::Robust;
  if (s == "app_dependent") return Category::ApplicationDependent;
  if (s == "catastrophic") return Category::Catastrophic;
  throw ArgumentError("unknown category '" + std::string(s) + "'");
}

constexpr double kDefaultTau = 1e-3;

namespace detail {
inline void check_lengths(std::span<const double> x, std::span<const double> y, const char* op) {
  if (x.size() != y.size()) throw ArgumentError(std::string(op) + ": length mismatch");
}
}  // namespace detail

inline double l2_error(std::span<const double> x, std::span<const double> y) {
  detail::check_lengths(x, y, "l2_error");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double d = static_cast<long double>(y[i]) - x[i];
    sum += d * d;
  }
  return static_cast<double>(std::sqrt(sum));
}

/// sqrt(mean(delta^2)), i.e. l2_error / sqrt(k).
inline double mse(std::span<const double> x, std::span<const double> y) {
  detail::check_lengths(x, y, "mse");
  if (x.empty()) throw ArgumentError("mse: empty input");
  return l2_error(x, y) / std::sqrt(static_cast<double>(x.size()));
}

/// eps_i = |y_i - x_i| / |x_i|. References below abs_floor = tau * (mean|x| +
/// machine epsilon) are judged on absolute error instead: they get 0 when
/// |y_i - x_i| < abs_floor and +inf otherwise.
inline std::vector<double> relative_errors(std::span<const double> x, std::span<const double> y,
                                           double tau = kDefaultTau) {
  detail::check_lengths(x, y, "relative_errors");
  std::vector<double> eps(x.size(), 0.0);
  if (x.empty()) return eps;
  long double mean_abs = 0.0L;
  for (double v : x) mean_abs += std::fabs(v);
  mean_abs /= static_cast<long double>(x.size());
  const double abs_floor = tau * static_cast<double>(mean_abs + std::numeric_limits<double>::epsilon());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::fabs(y[i] - x[i]);
    if (std::fabs(x[i]) < abs_floor) {
      eps[i] = d < abs_floor ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      eps[i] = d / std::fabs(x[i]);
    }
  }
  return eps;
}

struct Classification {
  double frac_correct;
  Category category;
};

/// Catastrophic below 1% correct, Robust above 99%, otherwise
/// application-dependent.
inline Classification classify(std::span<const double> eps, double tau = kDefaultTau) {
  if (eps.empty()) throw ArgumentError("classify: empty input");
  std::size_t correct = 0;
  for (double e : eps) {
    if (e <= tau) ++correct;
  }
  const double frac = static_cast<double>(correct) / static_cast<double>(eps.size());
  Category c = Category::ApplicationDependent;
  if (frac < 0.01) c = Category::Catastrophic;
  if (frac > 0.99) c = Category::Robust;
  return {frac, c};
}

}  // namespace faultlab

#endif  // FAULTLAB_METRICS_HPP_
