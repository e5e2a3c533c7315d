// accentlab/train.hpp

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

#ifndef ACCENTLAB_TRAIN_HPP_
#define ACCENTLAB_TRAIN_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "accentlab/align.hpp"
#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/model.hpp"

namespace accentlab {

struct TrainConfig {
  int num_states = 3;             // states per phone HMM
  int max_components = 4;         // mixture components per state at the final stage
  std::vector<int> split_schedule;  // per-stage component targets; empty = 1,2,4,... up to max
  int iterations_per_stage = 5;
  double variance_floor = 1e-3;   // applied to post-CMVN features
  double transition_floor = 1e-3;
  double convergence_tol = 1e-6;  // stop a stage early below this objective gain
  // When set, the EM alignment passes may insert the silence phone between
  // transcript phones and at the edges. Flat-start always uses the literal
  // transcript, so silence must appear somewhere in it to get seeded.
  bool optional_silence_in_alignment = false;

  void validate() const {
    if (num_states < 1 || max_components < 1 || iterations_per_stage < 1)
      throw InvalidConfig("train: counts must be positive");
    if (variance_floor <= 0.0) throw InvalidConfig("train: variance_floor must be positive");
    if (transition_floor <= 0.0 || transition_floor >= 0.5)
      throw InvalidConfig("train: transition_floor must be in (0, 0.5)");
    int prev = 0;
    for (int target : split_schedule) {
      if (target <= prev) throw InvalidConfig("train: split_schedule must be increasing");
      prev = target;
    }
  }

  std::vector<int> effective_schedule() const {
    if (!split_schedule.empty()) {
      std::vector<int> s;
      for (int target : split_schedule) s.push_back(std::min(target, max_components));
      s.erase(std::unique(s.begin(), s.end()), s.end());
      return s;
    }
    std::vector<int> s{1};
    while (s.back() < max_components) s.push_back(std::min(2 * s.back(), max_components));
    return s;
  }
};

struct TrainUtterance {
  Matrix features;
  std::vector<int> phones;  // inventory indices, silence included where present
};

struct TrainStats {
  // stage_objectives[stage][iter] is the summed best-path log-likelihood of
  // the alignment pass at the start of that iteration, i.e. the Viterbi
  // training objective of the parameters entering the iteration.
  std::vector<std::vector<double>> stage_objectives;
  std::vector<std::string> warnings;
  int used_utterances = 0;
  int skipped_utterances = 0;
};

namespace detail {

struct StateAccumulator {
  std::vector<double> mass;                 // per component
  std::vector<std::vector<double>> sum;     // per component, per dim
  std::vector<std::vector<double>> sumsq;
  double self_count = 0.0;
  double forward_count = 0.0;

  void reset(int num_components, int dim) {
    mass.assign(num_components, 0.0);
    sum.assign(num_components, std::vector<double>(dim, 0.0));
    sumsq.assign(num_components, std::vector<double>(dim, 0.0));
    self_count = forward_count = 0.0;
  }
};

inline void accumulate_frame(const GmmState& state, std::span<const double> frame,
                             StateAccumulator& acc) {
  const int K = static_cast<int>(state.components.size());
  // Component responsibilities under the current state GMM (hard state
  // assignment, soft within the state).
  std::vector<double> log_resp(K);
  double norm = kLogZero;
  for (int k = 0; k < K; ++k) {
    log_resp[k] = std::log(state.components[k].weight) +
                  log_gaussian_diag(frame, state.components[k].mean, state.components[k].var);
    norm = log_add(norm, log_resp[k]);
  }
  for (int k = 0; k < K; ++k) {
    double r = std::exp(log_resp[k] - norm);
    acc.mass[k] += r;
    for (size_t d = 0; d < frame.size(); ++d) {
      acc.sum[k][d] += r * frame[d];
      acc.sumsq[k][d] += r * frame[d] * frame[d];
    }
  }
}

inline void update_state(const StateAccumulator& acc, double variance_floor, GmmState& state) {
  double total = 0.0;
  for (double m : acc.mass) total += m;
  if (total <= 0.0) return;  // state saw no frames; keep previous parameters
  const int K = static_cast<int>(state.components.size());
  constexpr double kMinComponentMass = 1e-8;
  double weight_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    GmmComponent& c = state.components[k];
    if (acc.mass[k] > kMinComponentMass) {
      c.weight = acc.mass[k] / total;
      for (size_t d = 0; d < c.mean.size(); ++d) {
        double mean = acc.sum[k][d] / acc.mass[k];
        double var = acc.sumsq[k][d] / acc.mass[k] - mean * mean;
        c.mean[d] = mean;
        c.var[d] = std::max(var, variance_floor);
      }
    } else {
      c.weight = kMinComponentMass;  // starved component; keep parameters
    }
    weight_sum += c.weight;
  }
  for (auto& c : state.components) c.weight /= weight_sum;
}

inline void update_transitions(const StateAccumulator& acc, double floor, int state_pos,
                               PhoneHmm& h) {
  double total = acc.self_count + acc.forward_count;
  if (total <= 0.0) return;
  double p_self = acc.self_count / total;
  p_self = std::clamp(p_self, floor, 1.0 - floor);
  h.self_loop[state_pos] = p_self;
  h.forward[state_pos] = 1.0 - p_self;
}

// Adds one component by splitting the heaviest one (ties to the lowest
// component index) with +/-0.2 sigma mean perturbation.
inline void split_heaviest_component(GmmState& state) {
  int heaviest = 0;
  for (int k = 1; k < static_cast<int>(state.components.size()); ++k)
    if (state.components[k].weight > state.components[heaviest].weight) heaviest = k;
  GmmComponent& c = state.components[heaviest];
  GmmComponent twin = c;
  c.weight *= 0.5;
  twin.weight = c.weight;
  for (size_t d = 0; d < c.mean.size(); ++d) {
    double sigma = std::sqrt(c.var[d]);
    c.mean[d] += 0.2 * sigma;
    twin.mean[d] -= 0.2 * sigma;
  }
  state.components.push_back(std::move(twin));
}

}  // namespace detail

// Flat-start Viterbi-EM monophone training. Each utterance is first
// segmented uniformly across its transcript states to seed single-Gaussian
// states; training then alternates forced alignment with maximum-likelihood
// re-estimation of GMM parameters (hard state assignment, soft component
// responsibilities) and transitions, growing mixtures stage by stage.
// Utterances shorter than their minimum state path are excluded with a
// warning in TrainStats.
inline AcousticModel train_monophone(const PhoneInventory& inventory,
                                     const std::vector<TrainUtterance>& corpus,
                                     const TrainConfig& cfg, TrainStats* stats = nullptr) {
  cfg.validate();
  inventory.validate_structure();
  if (corpus.empty()) throw InvalidInput("train_monophone: empty corpus");

  const int dim = corpus.front().features.cols();
  TrainStats local_stats;
  TrainStats& st = stats ? *stats : local_stats;

  std::vector<const TrainUtterance*> used;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const TrainUtterance& u = corpus[i];
    if (u.features.cols() != dim)
      throw InvalidInput("train_monophone: inconsistent feature dimension in corpus");
    if (!u.features.all_finite())
      throw InvalidInput("train_monophone: non-finite features in utterance " + std::to_string(i));
    if (u.phones.empty())
      throw InvalidInput("train_monophone: empty transcript in utterance " + std::to_string(i));
    for (int p : u.phones)
      if (p < 0 || p >= inventory.size())
        throw UnknownPhone("train_monophone: transcript phone id " + std::to_string(p) +
                           " not in inventory");
    int min_frames = static_cast<int>(u.phones.size()) * cfg.num_states;
    if (u.features.rows() < min_frames) {
      st.warnings.push_back("skipped utterance " + std::to_string(i) + ": " +
                            std::to_string(u.features.rows()) + " frames < " +
                            std::to_string(min_frames) + " states");
      ++st.skipped_utterances;
      continue;
    }
    used.push_back(&u);
  }
  st.used_utterances = static_cast<int>(used.size());
  if (used.empty()) throw InvalidInput("train_monophone: no usable utterances");

  std::vector<bool> covered(inventory.size(), false);
  for (const TrainUtterance* u : used)
    for (int p : u->phones) covered[p] = true;
  std::string missing;
  for (int p = 0; p < inventory.size(); ++p)
    if (!covered[p]) missing += (missing.empty() ? "" : ", ") + inventory.phones[p];
  if (!missing.empty())
    throw UncoveredPhone("train_monophone: phones never observed in usable transcripts: " +
                         missing);

  // Flat start: uniform segmentation of every utterance across its
  // transcript states, then single-Gaussian ML estimates per state.
  AcousticModel model;
  model.inventory = inventory;
  model.hmms.resize(inventory.size());
  for (int p = 0; p < inventory.size(); ++p) {
    PhoneHmm& h = model.hmms[p];
    h.phone = inventory.phones[p];
    h.states.assign(cfg.num_states, GmmState{{GmmComponent{1.0, std::vector<double>(dim, 0.0),
                                                           std::vector<double>(dim, 1.0)}}});
    h.self_loop.assign(cfg.num_states, 0.5);
    h.forward.assign(cfg.num_states, 0.5);
  }
  StateIndex idx(model);

  std::vector<detail::StateAccumulator> acc(idx.total());
  for (auto& a : acc) a.reset(1, dim);
  for (const TrainUtterance* u : used) {
    const int T = u->features.rows();
    const int M = static_cast<int>(u->phones.size()) * cfg.num_states;
    for (int j = 0; j < M; ++j) {
      int phone = u->phones[j / cfg.num_states];
      int g = idx.offset(phone) + j % cfg.num_states;
      int lo = static_cast<int>(static_cast<long long>(j) * T / M);
      int hi = static_cast<int>(static_cast<long long>(j + 1) * T / M);
      for (int t = lo; t < hi; ++t) {
        auto frame = u->features.row(t);
        acc[g].mass[0] += 1.0;
        for (int d = 0; d < dim; ++d) {
          acc[g].sum[0][d] += frame[d];
          acc[g].sumsq[0][d] += frame[d] * frame[d];
        }
      }
      acc[g].self_count += hi - lo - 1;
      acc[g].forward_count += 1;
    }
  }
  for (int g = 0; g < idx.total(); ++g) {
    detail::update_state(acc[g], cfg.variance_floor, model.hmms[idx.phone_of(g)].states[idx.pos_of(g)]);
    detail::update_transitions(acc[g], cfg.transition_floor, idx.pos_of(g),
                               model.hmms[idx.phone_of(g)]);
  }

  // Viterbi-EM stages with mixture growth between stages.
  for (int target_components : cfg.effective_schedule()) {
    for (auto& h : model.hmms)
      for (auto& s : h.states)
        while (static_cast<int>(s.components.size()) < target_components)
          detail::split_heaviest_component(s);

    st.stage_objectives.emplace_back();
    double prev_objective = kLogZero;
    for (int iter = 0; iter < cfg.iterations_per_stage; ++iter) {
      for (int g = 0; g < idx.total(); ++g)
        acc[g].reset(target_components, dim);

      double objective = 0.0;
      for (const TrainUtterance* u : used) {
        AlignmentResult ali = force_align(u->features, u->phones, model, false);
        objective += ali.log_likelihood;
        const auto& states = ali.path.states;
        // Segment ends mark forward transitions even when adjacent identical
        // phones keep the same global state across the boundary.
        std::vector<bool> boundary(states.size(), false);
        for (const PhoneSegment& seg : ali.segments)
          if (seg.end < static_cast<int>(states.size())) boundary[seg.end - 1] = true;
        for (size_t t = 0; t < states.size(); ++t) {
          int g = states[t];
          detail::accumulate_frame(idx.state(g), u->features.row(t), acc[g]);
          if (t + 1 < states.size()) {
            if (states[t + 1] == g && !boundary[t])
              acc[g].self_count += 1.0;
            else
              acc[g].forward_count += 1.0;
          }
        }
      }
      st.stage_objectives.back().push_back(objective);

      for (int g = 0; g < idx.total(); ++g) {
        detail::update_state(acc[g], cfg.variance_floor,
                             model.hmms[idx.phone_of(g)].states[idx.pos_of(g)]);
        detail::update_transitions(acc[g], cfg.transition_floor, idx.pos_of(g),
                                   model.hmms[idx.phone_of(g)]);
      }

      if (iter > 0 && objective - prev_objective < cfg.convergence_tol) break;
      prev_objective = objective;
    }
  }

  model.validate();
  return model;
}

}  // namespace accentlab

#endif  // ACCENTLAB_TRAIN_HPP_
