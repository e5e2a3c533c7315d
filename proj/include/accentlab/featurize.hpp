// accentlab/featurize.hpp

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

#ifndef ACCENTLAB_FEATURIZE_HPP_
#define ACCENTLAB_FEATURIZE_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "accentlab/error.hpp"
#include "accentlab/model.hpp"
#include "accentlab/score.hpp"

namespace accentlab {

// Fixed-order utterance-level vector: for each score type (target-language
// first, then native-language when present), for each phone pool (vowel,
// consonant, combined = vowels plus consonants), the statistics
// (min, mean, std, std/mean). 12 entries without the native score, 24 with.
struct UtteranceFeatures {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
};

inline std::vector<std::string> feature_names(bool use_l1) {
  static const char* kScores[] = {"psl2", "psl1"};
  static const char* kPools[] = {"vowel", "consonant", "combined"};
  static const char* kStats[] = {"min", "mean", "std", "stdmean"};
  std::vector<std::string> names;
  for (int s = 0; s < (use_l1 ? 2 : 1); ++s)
    for (const char* pool : kPools)
      for (const char* stat : kStats)
        names.push_back(std::string(kScores[s]) + "_" + pool + "_" + stat);
  return names;
}

namespace detail {

// min, mean, population std, std/mean. The quotient keeps the mean's sign;
// a mean within 1e-12 of zero makes it 0 to stay finite. Values are summed
// in sorted order so the vector is exactly invariant to record order.
inline void append_stats(std::vector<double> values, std::vector<double>& out) {
  std::sort(values.begin(), values.end());
  double minimum = values[0], mean = 0.0;
  for (double v : values) {
    minimum = std::min(minimum, v);
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  double sd = std::sqrt(var);
  out.push_back(minimum);
  out.push_back(mean);
  out.push_back(sd);
  out.push_back(std::abs(mean) < 1e-12 ? 0.0 : sd / mean);
}

}  // namespace detail

// Aggregates one utterance's score records into the fixed feature vector.
// Needs at least two vowel and two consonant records so every pool has a
// defined spread.
inline UtteranceFeatures aggregate(std::span<const ScoreRecord> records,
                                   const PhoneInventory& inventory, bool use_l1) {
  std::vector<double> vowel_l2, consonant_l2, vowel_l1, consonant_l1;
  for (const ScoreRecord& rec : records) {
    if (rec.segment.phone < 0 || rec.segment.phone >= inventory.size())
      throw InvalidInput("aggregate: record phone id out of range");
    PhoneCategory cat = inventory.categories[rec.segment.phone];
    if (cat == PhoneCategory::kSilence)
      throw InvalidInput("aggregate: silence phone '" + inventory.phones[rec.segment.phone] +
                         "' has no pronunciation category");
    if (use_l1 && !rec.ps_l1.has_value())
      throw InvalidInput("aggregate: native-language features requested but a record has no "
                         "ps_l1 value");
    if (cat == PhoneCategory::kVowel) {
      vowel_l2.push_back(rec.ps_l2);
      if (use_l1) vowel_l1.push_back(*rec.ps_l1);
    } else {
      consonant_l2.push_back(rec.ps_l2);
      if (use_l1) consonant_l1.push_back(*rec.ps_l1);
    }
  }
  if (vowel_l2.size() < 2)
    throw InsufficientPhones("aggregate: need at least 2 vowel records, got " +
                             std::to_string(vowel_l2.size()));
  if (consonant_l2.size() < 2)
    throw InsufficientPhones("aggregate: need at least 2 consonant records, got " +
                             std::to_string(consonant_l2.size()));

  auto combine = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> all(a);
    all.insert(all.end(), b.begin(), b.end());
    return all;
  };

  UtteranceFeatures out;
  out.values.reserve(use_l1 ? 24 : 12);
  detail::append_stats(vowel_l2, out.values);
  detail::append_stats(consonant_l2, out.values);
  detail::append_stats(combine(vowel_l2, consonant_l2), out.values);
  if (use_l1) {
    detail::append_stats(vowel_l1, out.values);
    detail::append_stats(consonant_l1, out.values);
    detail::append_stats(combine(vowel_l1, consonant_l1), out.values);
  }
  return out;
}

}  // namespace accentlab

#endif  // ACCENTLAB_FEATURIZE_HPP_
