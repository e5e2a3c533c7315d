// accentlab/model.hpp

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

#ifndef ACCENTLAB_MODEL_HPP_
#define ACCENTLAB_MODEL_HPP_

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "accentlab/error.hpp"
#include "accentlab/numerics.hpp"

namespace accentlab {

enum class PhoneCategory { kVowel, kConsonant, kSilence };

inline std::string to_string(PhoneCategory c) {
  switch (c) {
    case PhoneCategory::kVowel: return "vowel";
    case PhoneCategory::kConsonant: return "consonant";
    case PhoneCategory::kSilence: return "silence";
  }
  return "?";
}

inline PhoneCategory phone_category_from_string(const std::string& s) {
  if (s == "vowel") return PhoneCategory::kVowel;
  if (s == "consonant") return PhoneCategory::kConsonant;
  if (s == "silence") return PhoneCategory::kSilence;
  throw SchemaError("unknown phone category '" + s + "'");
}

// Ordered phone set with per-phone categories. Structural checks (unique
// symbols, at most one silence) apply to every inventory; corpus-facing
// loaders additionally require exactly one silence plus at least one vowel
// and one consonant, which lab-scale test models need not satisfy.
struct PhoneInventory {
  std::vector<std::string> phones;
  std::vector<PhoneCategory> categories;

  int size() const { return static_cast<int>(phones.size()); }

  int find(const std::string& symbol) const {
    for (int i = 0; i < size(); ++i)
      if (phones[i] == symbol) return i;
    return -1;
  }

  // Index of the designated silence phone, or -1 if none.
  int silence() const {
    for (int i = 0; i < size(); ++i)
      if (categories[i] == PhoneCategory::kSilence) return i;
    return -1;
  }

  bool is_silence(int phone) const {
    return phone >= 0 && phone < size() && categories[phone] == PhoneCategory::kSilence;
  }

  void validate_structure() const {
    if (phones.size() != categories.size())
      throw SchemaError("inventory: phones and categories differ in length");
    if (phones.empty()) throw SchemaError("inventory: empty phone set");
    int silence_count = 0;
    for (int i = 0; i < size(); ++i) {
      if (phones[i].empty()) throw SchemaError("inventory: empty phone symbol");
      for (int j = i + 1; j < size(); ++j)
        if (phones[i] == phones[j])
          throw SchemaError("inventory: duplicate phone symbol '" + phones[i] + "'");
      if (categories[i] == PhoneCategory::kSilence) ++silence_count;
    }
    if (silence_count > 1) throw SchemaError("inventory: more than one silence phone");
  }

  void validate_full() const {
    validate_structure();
    if (silence() < 0) throw SchemaError("inventory: no silence phone designated");
    bool vowel = false, consonant = false;
    for (PhoneCategory c : categories) {
      vowel = vowel || c == PhoneCategory::kVowel;
      consonant = consonant || c == PhoneCategory::kConsonant;
    }
    if (!vowel || !consonant)
      throw SchemaError("inventory: need at least one vowel and one consonant");
  }
};

// Pronunciation dictionary: word -> one or more phone sequences. Entry order
// within a word is meaningful; the pipeline uses the first pronunciation.
struct Lexicon {
  std::map<std::string, std::vector<std::vector<std::string>>> entries;

  const std::vector<std::string>& first_pronunciation(const std::string& word) const {
    auto it = entries.find(word);
    if (it == entries.end() || it->second.empty())
      throw UnknownPhone("lexicon: no pronunciation for word '" + word + "'");
    return it->second.front();
  }

  void validate(const PhoneInventory& inventory) const {
    for (const auto& [word, prons] : entries) {
      if (prons.empty()) throw SchemaError("lexicon: word '" + word + "' has no pronunciation");
      for (const auto& pron : prons) {
        if (pron.empty())
          throw SchemaError("lexicon: word '" + word + "' has an empty pronunciation");
        for (const auto& phone : pron)
          if (inventory.find(phone) < 0)
            throw SchemaError("lexicon: word '" + word + "' uses unknown phone '" + phone + "'");
      }
    }
  }
};

struct GmmComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> var;  // diagonal covariance
};

// Diagonal-covariance Gaussian mixture tied to one HMM state.
struct GmmState {
  std::vector<GmmComponent> components;

  int dim() const { return components.empty() ? 0 : static_cast<int>(components.front().mean.size()); }
};

inline double log_gaussian_diag(std::span<const double> frame, std::span<const double> mean,
                                std::span<const double> var) {
  double acc = 0.0;
  for (size_t d = 0; d < frame.size(); ++d) {
    double diff = frame[d] - mean[d];
    acc += std::log(var[d]) + diff * diff / var[d];
  }
  return -0.5 * (static_cast<double>(frame.size()) * kLogTwoPi + acc);
}

// log P(o|s) = log sum_k w_k N(o; mu_k, diag sigma2_k), accumulated in the
// log domain so it stays finite far from every component.
inline double gmm_log_likelihood(const GmmState& s, std::span<const double> frame) {
  if (s.components.empty()) throw InvalidInput("gmm_log_likelihood: state has no components");
  if (static_cast<int>(frame.size()) != s.dim())
    throw InvalidInput("gmm_log_likelihood: frame dim " + std::to_string(frame.size()) +
                       " != state dim " + std::to_string(s.dim()));
  double acc = kLogZero;
  for (const auto& c : s.components)
    acc = log_add(acc, std::log(c.weight) + log_gaussian_diag(frame, c.mean, c.var));
  return acc;
}

// Strict left-to-right HMM, no skips: each state has a self-loop and a
// forward transition (forward out of the last state is the phone exit).
struct PhoneHmm {
  std::string phone;
  std::vector<GmmState> states;
  std::vector<double> self_loop;  // probabilities, one per state
  std::vector<double> forward;

  int num_states() const { return static_cast<int>(states.size()); }
};

// One HMM per inventory phone, in inventory order. The flattened list of
// (phone, state-position) pairs is the global state set; the slice belonging
// to one phone is that phone's state set.
struct AcousticModel {
  PhoneInventory inventory;
  std::vector<PhoneHmm> hmms;  // parallel to inventory.phones

  int dim() const {
    for (const auto& h : hmms)
      if (!h.states.empty()) return h.states.front().dim();
    return 0;
  }

  void validate() const {
    inventory.validate_structure();
    if (hmms.size() != static_cast<size_t>(inventory.size()))
      throw SchemaError("model: every phone needs exactly one HMM");
    const int d = dim();
    for (int p = 0; p < inventory.size(); ++p) {
      const PhoneHmm& h = hmms[p];
      if (h.phone != inventory.phones[p])
        throw SchemaError("model: HMM order does not match inventory at '" +
                          inventory.phones[p] + "'");
      if (h.states.empty()) throw SchemaError("model: phone '" + h.phone + "' has no states");
      if (h.self_loop.size() != h.states.size() || h.forward.size() != h.states.size())
        throw SchemaError("model: phone '" + h.phone + "' transition arrays mismatch states");
      for (int s = 0; s < h.num_states(); ++s) {
        if (h.self_loop[s] < 0.0 || h.forward[s] < 0.0 ||
            std::abs(h.self_loop[s] + h.forward[s] - 1.0) > 1e-8)
          throw SchemaError("model: phone '" + h.phone + "' state " + std::to_string(s) +
                            " transition probabilities do not sum to 1");
        const GmmState& g = h.states[s];
        if (g.components.empty())
          throw SchemaError("model: phone '" + h.phone + "' state " + std::to_string(s) +
                            " has no mixture components");
        double wsum = 0.0;
        for (const auto& c : g.components) {
          if (c.weight <= 0.0)
            throw SchemaError("model: phone '" + h.phone + "' has a non-positive mixture weight");
          if (c.mean.size() != c.var.size() || static_cast<int>(c.mean.size()) != d)
            throw SchemaError("model: phone '" + h.phone + "' mixes feature dimensions");
          for (double v : c.var)
            if (v <= 0.0)
              throw SchemaError("model: phone '" + h.phone + "' has a non-positive variance");
          wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-8)
          throw SchemaError("model: phone '" + h.phone + "' mixture weights sum to " +
                            std::to_string(wsum));
      }
    }
  }
};

// Flat view over a model's global state list. Global index g enumerates all
// states of all phones in inventory order.
class StateIndex {
 public:
  explicit StateIndex(const AcousticModel& m) : model_(&m) {
    offsets_.reserve(m.hmms.size() + 1);
    offsets_.push_back(0);
    for (const auto& h : m.hmms) offsets_.push_back(offsets_.back() + h.num_states());
    phone_of_.reserve(offsets_.back());
    for (int p = 0; p < static_cast<int>(m.hmms.size()); ++p)
      for (int s = 0; s < m.hmms[p].num_states(); ++s) phone_of_.push_back(p);
  }

  int total() const { return offsets_.back(); }
  int offset(int phone) const { return offsets_[phone]; }
  int phone_of(int g) const { return phone_of_[g]; }
  int pos_of(int g) const { return g - offsets_[phone_of_[g]]; }
  const GmmState& state(int g) const {
    return model_->hmms[phone_of(g)].states[pos_of(g)];
  }

 private:
  const AcousticModel* model_;
  std::vector<int> offsets_;
  std::vector<int> phone_of_;
};

// Maps phone symbols to inventory indices; unknown symbols are an error.
inline std::vector<int> to_phone_ids(const PhoneInventory& inventory,
                                     std::span<const std::string> symbols) {
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const auto& s : symbols) {
    int id = inventory.find(s);
    if (id < 0) throw UnknownPhone("phone '" + s + "' not in inventory");
    ids.push_back(id);
  }
  return ids;
}

}  // namespace accentlab

#endif  // ACCENTLAB_MODEL_HPP_
