// accentlab/numerics.hpp

// Copyright 2026  Accentlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTLAB_NUMERICS_HPP_
#define ACCENTLAB_NUMERICS_HPP_

#include <cmath>
#include <limits>
#include <span>

namespace accentlab {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// log(exp(x) + exp(y)) without leaving the log domain.
inline double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (x == kLogZero) return kLogZero;
  double neg_diff = y - x;
  if (neg_diff < -745.0) return x;  // exp underflows to 0 anyway
  return x + std::log1p(std::exp(neg_diff));
}

inline double log_sum_exp(std::span<const double> vals) {
  double acc = kLogZero;
  for (double v : vals) acc = log_add(acc, v);
  return acc;
}

inline bool all_finite(std::span<const double> vals) {
  for (double v : vals)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace accentlab

#endif  // ACCENTLAB_NUMERICS_HPP_
