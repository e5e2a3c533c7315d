// accentlab/synth.hpp

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
//
// The synthetic-accent lab: a pair of reference acoustic models whose
// parameters can be interpolated along an accent continuum, a sampler that
// renders feature matrices from a generator model, and a corpus builder that
// stands in for an annotated accented-speech collection at desk scale.

#ifndef ACCENTLAB_SYNTH_HPP_
#define ACCENTLAB_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "accentlab/align.hpp"
#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/model.hpp"
#include "accentlab/rng.hpp"

namespace accentlab {

struct SynthConfig {
  std::uint64_t seed = 0;
  int num_speakers = 30;
  // alpha (accent strength) is sampled uniformly on [0, 1]; the label model
  // is 1 + 3*alpha + N(0, sigma^2), clamped to the [1, 4] annotation scale.
  double label_noise_sigma = 0.15;
  // Frames-per-phone law: uniform integers, clamped to the HMM state count.
  int min_frames_per_phone = 6;
  int max_frames_per_phone = 12;
  int min_silence_frames = 5;
  int max_silence_frames = 10;
  double silence_gap_prob = 0.5;  // chance of a silence between adjacent words

  void validate() const {
    if (num_speakers < 1) throw InvalidConfig("synth: num_speakers must be positive");
    if (label_noise_sigma < 0.0) throw InvalidConfig("synth: label noise sigma must be >= 0");
    if (min_frames_per_phone < 1 || max_frames_per_phone < min_frames_per_phone)
      throw InvalidConfig("synth: bad frames-per-phone range");
    if (min_silence_frames < 1 || max_silence_frames < min_silence_frames)
      throw InvalidConfig("synth: bad silence frames range");
    if (silence_gap_prob < 0.0 || silence_gap_prob > 1.0)
      throw InvalidConfig("synth: silence_gap_prob must be in [0, 1]");
  }
};

// Accent continuum between two models: per mapped state, mixture weights,
// means and variances are interpolated linearly with components matched by
// weight rank; transitions and unmapped phones (silence) come from the
// target-language endpoint. phone_map[p] is the L1 phone index for L2 phone
// p, or -1 for the silence phone.
inline AcousticModel interpolate_models(const AcousticModel& m_l2, const AcousticModel& m_l1,
                                        double alpha, std::span<const int> phone_map) {
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidInput("interpolate_models: alpha must be in [0, 1]");
  if (m_l2.dim() != m_l1.dim())
    throw InvalidInput("interpolate_models: models differ in feature dimension");
  if (static_cast<int>(phone_map.size()) != m_l2.inventory.size())
    throw SchemaError("interpolate_models: phone_map must cover the L2 inventory");

  auto rank_by_weight = [](const GmmState& s) {
    std::vector<int> order(s.components.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return s.components[a].weight > s.components[b].weight;
    });
    return order;
  };

  AcousticModel out = m_l2;
  for (int p = 0; p < m_l2.inventory.size(); ++p) {
    int q = phone_map[p];
    if (m_l2.inventory.is_silence(p)) {
      if (q >= 0) throw SchemaError("interpolate_models: the silence phone must be unmapped");
      continue;
    }
    if (q < 0 || q >= m_l1.inventory.size())
      throw SchemaError("interpolate_models: unmapped L2 phone '" + m_l2.inventory.phones[p] +
                        "'");
    const PhoneHmm& h2 = m_l2.hmms[p];
    const PhoneHmm& h1 = m_l1.hmms[q];
    if (h2.num_states() != h1.num_states())
      throw InvalidInput("interpolate_models: state count mismatch for '" +
                         m_l2.inventory.phones[p] + "'");
    for (int s = 0; s < h2.num_states(); ++s) {
      const GmmState& s2 = h2.states[s];
      const GmmState& s1 = h1.states[s];
      if (s2.components.size() != s1.components.size())
        throw InvalidInput("interpolate_models: component count mismatch for '" +
                           m_l2.inventory.phones[p] + "'");
      std::vector<int> rank2 = rank_by_weight(s2);
      std::vector<int> rank1 = rank_by_weight(s1);
      for (size_t r = 0; r < rank2.size(); ++r) {
        const GmmComponent& c2 = s2.components[rank2[r]];
        const GmmComponent& c1 = s1.components[rank1[r]];
        GmmComponent& dst = out.hmms[p].states[s].components[rank2[r]];
        dst.weight = (1.0 - alpha) * c2.weight + alpha * c1.weight;
        for (size_t d = 0; d < c2.mean.size(); ++d) {
          dst.mean[d] = (1.0 - alpha) * c2.mean[d] + alpha * c1.mean[d];
          dst.var[d] = (1.0 - alpha) * c2.var[d] + alpha * c1.var[d];
        }
      }
    }
  }
  return out;
}

struct SynthUtterance {
  Matrix features;
  std::vector<PhoneSegment> true_segments;
  double alpha = 0.0;
  double label = 0.0;
};

// Renders one utterance from a generator model: a duration is sampled per
// phone instance, frames are split uniformly across the phone's states in
// left-to-right order, and each frame is drawn from its state's GMM.
inline SynthUtterance synth_speaker(const AcousticModel& gen, std::span<const int> phones,
                                    const SynthConfig& cfg, double alpha, Rng& rng) {
  cfg.validate();
  for (int p : phones)
    if (p < 0 || p >= gen.inventory.size())
      throw UnknownPhone("synth_speaker: phone id " + std::to_string(p) + " not in model");
  if (phones.empty()) throw InvalidInput("synth_speaker: empty transcript");

  SynthUtterance out;
  out.alpha = alpha;
  out.label = std::clamp(1.0 + 3.0 * alpha + cfg.label_noise_sigma * rng.normal(), 1.0, 4.0);

  const int dim = gen.dim();
  std::vector<int> durations;
  durations.reserve(phones.size());
  int total = 0;
  for (int p : phones) {
    bool silence = gen.inventory.is_silence(p);
    int lo = silence ? cfg.min_silence_frames : cfg.min_frames_per_phone;
    int hi = silence ? cfg.max_silence_frames : cfg.max_frames_per_phone;
    int d = std::max(rng.uniform_int(lo, hi), gen.hmms[p].num_states());
    durations.push_back(d);
    total += d;
  }

  out.features = Matrix(total, dim);
  int t0 = 0;
  for (size_t i = 0; i < phones.size(); ++i) {
    const PhoneHmm& h = gen.hmms[phones[i]];
    const int d = durations[i];
    const int n = h.num_states();
    out.true_segments.push_back({phones[i], t0, t0 + d});
    for (int j = 0; j < d; ++j) {
      int s = static_cast<int>(static_cast<long long>(j) * n / d);
      const GmmState& state = h.states[s];
      double u = rng.uniform();
      int comp = 0;
      double cum = 0.0;
      for (size_t k = 0; k < state.components.size(); ++k) {
        cum += state.components[k].weight;
        comp = static_cast<int>(k);
        if (u < cum) break;
      }
      const GmmComponent& c = state.components[comp];
      for (int dd = 0; dd < dim; ++dd)
        out.features(t0 + j, dd) = c.mean[dd] + std::sqrt(c.var[dd]) * rng.normal();
    }
    t0 += d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Default lab geometry. Non-silence phones sit on a ring in the first two
// feature dimensions; each synthetic native language places its phones at a
// fixed angular offset from the target-language ring, so that dragging a
// phone toward its native counterpart eventually crosses into a competing
// target-language phone. Dimension 2 separates HMM states within a phone and
// dimension 3 separates speech from silence.

struct LabModels {
  AcousticModel l2;
  AcousticModel l1;
  std::vector<int> phone_map;  // L2 phone index -> L1 phone index, -1 for silence
};

namespace detail {

inline AcousticModel make_ring_model(const std::vector<std::string>& phones,
                                     const std::vector<PhoneCategory>& categories,
                                     double angle_offset) {
  constexpr int kDim = 4;
  constexpr int kStates = 3;
  constexpr double kRadius = 4.0;
  AcousticModel m;
  m.inventory.phones = phones;
  m.inventory.categories = categories;
  const int num_speech = static_cast<int>(phones.size()) - 1;
  int speech_seen = 0;
  for (int p = 0; p < static_cast<int>(phones.size()); ++p) {
    PhoneHmm h;
    h.phone = phones[p];
    bool silence = categories[p] == PhoneCategory::kSilence;
    for (int s = 0; s < kStates; ++s) {
      std::vector<double> mean(kDim, 0.0);
      if (silence) {
        mean[3] = -3.0;
      } else {
        double angle = 2.0 * M_PI * speech_seen / num_speech + angle_offset;
        mean[0] = kRadius * std::cos(angle);
        mean[1] = kRadius * std::sin(angle);
        mean[3] = 1.0;
      }
      mean[2] = 0.5 * (s - 1);  // state drift
      h.states.push_back(GmmState{{GmmComponent{1.0, mean, std::vector<double>(kDim, 1.0)}}});
      h.self_loop.push_back(0.6);
      h.forward.push_back(0.4);
    }
    if (!silence) ++speech_seen;
    m.hmms.push_back(std::move(h));
  }
  m.validate();
  return m;
}

}  // namespace detail

// language 0 offsets its native ring by +90 degrees, language 1 by -90.
inline LabModels make_lab_models(int language) {
  if (language != 0 && language != 1)
    throw InvalidConfig("make_lab_models: language must be 0 or 1");
  using PC = PhoneCategory;
  std::vector<std::string> l2_phones = {"sil", "aa", "bb", "iy", "dd", "uw", "gg"};
  std::vector<PC> cats = {PC::kSilence, PC::kVowel, PC::kConsonant, PC::kVowel,
                          PC::kConsonant, PC::kVowel, PC::kConsonant};
  std::vector<std::string> l1_phones =
      language == 0 ? std::vector<std::string>{"sil", "ah", "pp", "eh", "tt", "oh", "kk"}
                    : std::vector<std::string>{"sil", "ax", "ff", "ix", "ss", "ux", "hh"};

  LabModels lab;
  lab.l2 = detail::make_ring_model(l2_phones, cats, 0.0);
  lab.l1 = detail::make_ring_model(l1_phones, cats, language == 0 ? M_PI / 2 : -M_PI / 2);
  lab.phone_map.assign(l2_phones.size(), -1);
  for (int p = 0; p < static_cast<int>(l2_phones.size()); ++p)
    if (!lab.l2.inventory.is_silence(p)) lab.phone_map[p] = p;  // same ordinal layout
  return lab;
}

// Words pair each vowel with the following consonant: w1 = aa bb, etc.
inline Lexicon lab_lexicon() {
  Lexicon lex;
  lex.entries["w1"] = {{"aa", "bb"}};
  lex.entries["w2"] = {{"iy", "dd"}};
  lex.entries["w3"] = {{"uw", "gg"}};
  return lex;
}

inline std::vector<std::string> lab_transcript_words(int repeats = 3) {
  std::vector<std::string> words;
  for (int r = 0; r < repeats; ++r)
    for (const char* w : {"w1", "w2", "w3"}) words.emplace_back(w);
  return words;
}

struct SynthSpeaker {
  std::string id;
  std::string l1_tag;
  SynthUtterance utterance;
  std::vector<std::string> transcript_words;
};

// Samples one language group: per speaker, an accent strength alpha, a
// generator interpolated toward the native model, silences at the utterance
// edges plus coin-flip silences between words, and the rendered features.
inline std::vector<SynthSpeaker> make_synth_corpus(const LabModels& lab, const SynthConfig& cfg,
                                                   int language) {
  cfg.validate();
  const std::string tag = language == 0 ? "l1a" : "l1b";
  const Lexicon lexicon = lab_lexicon();
  const std::vector<std::string> words = lab_transcript_words();
  const int silence = lab.l2.inventory.silence();

  Rng corpus_rng = Rng(cfg.seed).split(static_cast<std::uint64_t>(language));
  std::vector<SynthSpeaker> speakers;
  for (int i = 0; i < cfg.num_speakers; ++i) {
    Rng rng = corpus_rng.split(static_cast<std::uint64_t>(i) + 1);
    double alpha = rng.uniform();
    AcousticModel gen = interpolate_models(lab.l2, lab.l1, alpha, lab.phone_map);

    std::vector<int> phones;
    phones.push_back(silence);
    for (size_t w = 0; w < words.size(); ++w) {
      if (w > 0 && rng.uniform() < cfg.silence_gap_prob) phones.push_back(silence);
      for (const std::string& ph : lexicon.first_pronunciation(words[w]))
        phones.push_back(lab.l2.inventory.find(ph));
    }
    phones.push_back(silence);

    SynthSpeaker spk;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%02d", language == 0 ? 'a' : 'b', i + 1);
    spk.id = buf;
    spk.l1_tag = tag;
    spk.transcript_words = words;
    spk.utterance = synth_speaker(gen, phones, cfg, alpha, rng);
    speakers.push_back(std::move(spk));
  }
  return speakers;
}

}  // namespace accentlab

#endif  // ACCENTLAB_SYNTH_HPP_
