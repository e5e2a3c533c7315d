// accentlab/score.hpp

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

#ifndef ACCENTLAB_SCORE_HPP_
#define ACCENTLAB_SCORE_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "accentlab/align.hpp"
#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/model.hpp"

namespace accentlab {

// Per-segment pronunciation scores. Both scores are duration-normalized
// log-ratios and therefore non-positive; the target-language score is zero
// exactly when the target phone attains the competitor maximum.
struct ScoreRecord {
  PhoneSegment segment;              // target phone (L2 inventory index) and span
  double ps_l2 = 0.0;
  int argmax_l2_phone = -1;          // L2 inventory index attaining the denominator max
  std::optional<double> ps_l1;       // absent when no L1 model was supplied
  int l1_phone = -1;                 // L1 inventory index of the most frequent decoded phone
};

// Target-language pronunciation score of one aligned segment:
//
//   [ loglik(segment | target) - max over non-silence q of loglik(segment | q) ] / frames
//
// with every likelihood a best-path score over the same span. Phone priors
// are uniform and cancel. Silence never competes in the max (it trivially
// wins low-energy segments and is not a pronunciation category) and is not
// scorable as a target. The target keeps exact ties, so the score is zero
// precisely when the returned argmax equals the target.
inline std::pair<double, int> ps_l2(const Matrix& f, const PhoneSegment& seg,
                                    const AcousticModel& m) {
  if (seg.phone < 0 || seg.phone >= m.inventory.size())
    throw UnknownPhone("ps_l2: phone id " + std::to_string(seg.phone) + " not in model");
  if (m.inventory.is_silence(seg.phone))
    throw SilenceNotScorable("ps_l2: target phone '" + m.inventory.phones[seg.phone] +
                             "' is the silence phone");
  if (seg.start < 0 || seg.end > f.rows() || seg.start >= seg.end)
    throw InvalidInput("ps_l2: segment out of range");

  const double target_ll = segment_viterbi_loglik(f, seg.start, seg.end, m.hmms[seg.phone]).first;
  double best = target_ll;
  int best_phone = seg.phone;
  for (int q = 0; q < m.inventory.size(); ++q) {
    if (q == seg.phone || m.inventory.is_silence(q)) continue;
    double ll = segment_viterbi_loglik(f, seg.start, seg.end, m.hmms[q]).first;
    if (ll > best) {
      best = ll;
      best_phone = q;
    }
  }
  return {(target_ll - best) / seg.length(), best_phone};
}

// Native-language pronunciation score of one aligned segment. The span is
// decoded with an unconstrained phone loop over the L1 model; the most
// frequent per-frame phone p (ties to the lowest inventory index) is taken
// as the closest L1 phone, and the score averages, over the frames decoded
// as p, the log-ratio of the summed state densities of p's states to the
// summed densities of all states.
inline std::pair<double, int> ps_l1(const Matrix& f, const PhoneSegment& seg,
                                    const AcousticModel& m_l1) {
  StatePath path = phone_loop_decode(f, seg.start, seg.end, m_l1);
  const StateIndex idx(m_l1);

  std::vector<int> counts(m_l1.inventory.size(), 0);
  for (int g : path.states) ++counts[idx.phone_of(g)];
  int p = 0;
  for (int q = 1; q < m_l1.inventory.size(); ++q)
    if (counts[q] > counts[p]) p = q;

  const int p_begin = idx.offset(p);
  const int p_end = p_begin + m_l1.hmms[p].num_states();
  double total = 0.0;
  int num_frames = 0;
  std::vector<double> state_ll(idx.total());
  for (int t = 0; t < seg.length(); ++t) {
    if (idx.phone_of(path.states[t]) != p) continue;
    auto frame = f.row(seg.start + t);
    for (int g = 0; g < idx.total(); ++g) state_ll[g] = gmm_log_likelihood(idx.state(g), frame);
    double numer = kLogZero, denom = kLogZero;
    for (int g = p_begin; g < p_end; ++g) numer = log_add(numer, state_ll[g]);
    for (int g = 0; g < idx.total(); ++g) denom = log_add(denom, state_ll[g]);
    total += numer - denom;
    ++num_frames;
  }
  return {total / num_frames, p};
}

// Runs the full per-utterance scoring pass: force-align the transcript with
// the target-language model, then emit one record per non-silence segment.
// Silence segments produced by the alignment are dropped.
inline std::vector<ScoreRecord> score_utterance(const Matrix& f, std::span<const int> phones,
                                                const AcousticModel& m_l2,
                                                const AcousticModel* m_l1,
                                                bool allow_optional_silence = true) {
  if (m_l1 != nullptr && m_l1->dim() != m_l2.dim())
    throw InvalidInput("score_utterance: L1 and L2 models differ in feature dimension");
  AlignmentResult alignment = force_align(f, phones, m_l2, allow_optional_silence);

  std::vector<ScoreRecord> records;
  for (const PhoneSegment& seg : alignment.segments) {
    if (m_l2.inventory.is_silence(seg.phone)) continue;
    ScoreRecord rec;
    rec.segment = seg;
    auto [l2_score, l2_argmax] = ps_l2(f, seg, m_l2);
    rec.ps_l2 = l2_score;
    rec.argmax_l2_phone = l2_argmax;
    if (m_l1 != nullptr) {
      auto [l1_score, l1_best] = ps_l1(f, seg, *m_l1);
      rec.ps_l1 = l1_score;
      rec.l1_phone = l1_best;
    }
    records.push_back(rec);
  }
  return records;
}

}  // namespace accentlab

#endif  // ACCENTLAB_SCORE_HPP_
