// accentlab/align.hpp

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

#ifndef ACCENTLAB_ALIGN_HPP_
#define ACCENTLAB_ALIGN_HPP_

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/model.hpp"

namespace accentlab {

// Half-open frame span [start, end) aligned to one phone.
struct PhoneSegment {
  int phone = -1;  // inventory index
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
};

// Per-frame state indices over a span. Produced by phone_loop_decode with
// global model state indices; segment_viterbi_loglik fills it with state
// positions local to the evaluated topology.
struct StatePath {
  std::vector<int> states;
};

struct AlignmentResult {
  std::vector<PhoneSegment> segments;
  double log_likelihood = 0.0;
  StatePath path;  // global state index per frame
};

namespace detail {

// Predecessor choice under the documented tie rule: strictly better score
// wins; exact ties go to the lowest tie key (global state index, then a
// structural index for duplicated phones).
struct Candidate {
  double score = kLogZero;
  long long tie = std::numeric_limits<long long>::max();
  int back = -1;

  void consider(double s, long long tie_key, int back_node) {
    if (s > score || (s == score && tie_key < tie)) {
      score = s;
      tie = tie_key;
      back = back_node;
    }
  }
};

}  // namespace detail

// Maximum-likelihood segmentation of `phones` (inventory indices) against
// the feature matrix under concatenated left-to-right HMMs. With
// allow_optional_silence, the silence phone may also appear before the first
// phone, between consecutive phones, and after the last one; silences that
// receive no frames produce no segment.
inline AlignmentResult force_align(const Matrix& f, std::span<const int> phones,
                                   const AcousticModel& m, bool allow_optional_silence) {
  if (f.empty()) throw InvalidInput("force_align: empty feature matrix");
  if (phones.empty()) throw InvalidInput("force_align: empty phone sequence");
  if (f.cols() != m.dim())
    throw InvalidInput("force_align: feature dim " + std::to_string(f.cols()) +
                       " != model dim " + std::to_string(m.dim()));
  for (int p : phones)
    if (p < 0 || p >= m.inventory.size())
      throw UnknownPhone("force_align: phone id " + std::to_string(p) + " not in model");
  const int silence = m.inventory.silence();
  if (allow_optional_silence && silence < 0)
    throw UnknownPhone("force_align: optional silence requested but model has no silence phone");

  // Unit sequence: transcript phones, with optional silence slots around them.
  struct Unit {
    int phone;
    bool optional;
  };
  std::vector<Unit> units;
  if (allow_optional_silence) units.push_back({silence, true});
  for (size_t i = 0; i < phones.size(); ++i) {
    units.push_back({phones[i], false});
    if (allow_optional_silence) units.push_back({silence, true});
  }

  const int T = f.rows();
  int mandatory_states = 0;
  for (int p : phones) mandatory_states += m.hmms[p].num_states();
  if (T < mandatory_states)
    throw InfeasibleAlignment("force_align: " + std::to_string(T) + " frames < " +
                              std::to_string(mandatory_states) + " mandatory states");

  const StateIndex idx(m);
  const int num_units = static_cast<int>(units.size());

  // Flatten units into DP nodes.
  std::vector<int> unit_offset(num_units + 1, 0);
  for (int u = 0; u < num_units; ++u)
    unit_offset[u + 1] = unit_offset[u] + m.hmms[units[u].phone].num_states();
  const int num_nodes = unit_offset[num_units];

  std::vector<int> node_unit(num_nodes), node_pos(num_nodes), node_state(num_nodes);
  std::vector<double> log_self(num_nodes), log_fwd(num_nodes);
  for (int u = 0; u < num_units; ++u) {
    const PhoneHmm& h = m.hmms[units[u].phone];
    for (int s = 0; s < h.num_states(); ++s) {
      int n = unit_offset[u] + s;
      node_unit[n] = u;
      node_pos[n] = s;
      node_state[n] = idx.offset(units[u].phone) + s;
      log_self[n] = std::log(h.self_loop[s]);
      log_fwd[n] = std::log(h.forward[s]);
    }
  }
  auto tie_key = [&](int n) {
    return static_cast<long long>(node_state[n]) * num_nodes + n;
  };

  // Exits that can feed unit u's entry: the previous unit, plus earlier ones
  // reachable by skipping a run of optional units.
  std::vector<std::vector<int>> prev_exits(num_units);
  for (int u = 1; u < num_units; ++u) {
    for (int w = u - 1; w >= 0; --w) {
      prev_exits[u].push_back(unit_offset[w + 1] - 1);
      if (!units[w].optional) break;
    }
  }
  std::vector<int> start_units, end_units;
  for (int u = 0; u < num_units; ++u) {
    start_units.push_back(u);
    if (!units[u].optional) break;
  }
  for (int u = num_units - 1; u >= 0; --u) {
    end_units.push_back(u);
    if (!units[u].optional) break;
  }

  // Emission cache per distinct phone in the unit sequence.
  std::map<int, Matrix> emissions;
  for (const Unit& u : units) {
    if (emissions.count(u.phone)) continue;
    const PhoneHmm& h = m.hmms[u.phone];
    Matrix e(T, h.num_states());
    for (int t = 0; t < T; ++t)
      for (int s = 0; s < h.num_states(); ++s)
        e(t, s) = gmm_log_likelihood(h.states[s], f.row(t));
    emissions.emplace(u.phone, std::move(e));
  }
  auto emission = [&](int n, int t) { return emissions.at(units[node_unit[n]].phone)(t, node_pos[n]); };

  std::vector<std::vector<double>> score(T, std::vector<double>(num_nodes, kLogZero));
  std::vector<std::vector<int>> back(T, std::vector<int>(num_nodes, -1));

  for (int u : start_units) {
    int n = unit_offset[u];
    score[0][n] = emission(n, 0);
  }
  for (int t = 1; t < T; ++t) {
    for (int n = 0; n < num_nodes; ++n) {
      detail::Candidate best;
      if (score[t - 1][n] > kLogZero)
        best.consider(score[t - 1][n] + log_self[n], tie_key(n), n);
      if (node_pos[n] > 0 && score[t - 1][n - 1] > kLogZero)
        best.consider(score[t - 1][n - 1] + log_fwd[n - 1], tie_key(n - 1), n - 1);
      if (node_pos[n] == 0)
        for (int e : prev_exits[node_unit[n]])
          if (score[t - 1][e] > kLogZero)
            best.consider(score[t - 1][e] + log_fwd[e], tie_key(e), e);
      if (best.back >= 0) {
        score[t][n] = best.score + emission(n, t);
        back[t][n] = best.back;
      }
    }
  }

  detail::Candidate final_best;
  for (int u : end_units) {
    int n = unit_offset[u + 1] - 1;
    if (score[T - 1][n] > kLogZero) final_best.consider(score[T - 1][n], tie_key(n), n);
  }
  if (final_best.back < 0) throw InfeasibleAlignment("force_align: no feasible path");

  std::vector<int> node_path(T);
  node_path[T - 1] = final_best.back;
  for (int t = T - 1; t > 0; --t) node_path[t - 1] = back[t][node_path[t]];

  AlignmentResult result;
  result.log_likelihood = final_best.score;
  result.path.states.resize(T);
  for (int t = 0; t < T; ++t) result.path.states[t] = node_state[node_path[t]];
  int run_start = 0;
  for (int t = 1; t <= T; ++t) {
    if (t == T || node_unit[node_path[t]] != node_unit[node_path[run_start]]) {
      result.segments.push_back({units[node_unit[node_path[run_start]]].phone, run_start, t});
      run_start = t;
    }
  }
  return result;
}

inline AlignmentResult force_align(const Matrix& f, std::span<const std::string> phones,
                                   const AcousticModel& m, bool allow_optional_silence) {
  std::vector<int> ids = to_phone_ids(m.inventory, phones);
  return force_align(f, ids, m, allow_optional_silence);
}

// Best-path log-likelihood of frames [start, end) under a single phone HMM,
// entering at the first state and finishing in the last reachable state.
// Spans shorter than the state count are scored against a reduced topology
// that keeps only the first (end - start) states, so every phone stays
// comparable on a fixed segment.
inline std::pair<double, StatePath> segment_viterbi_loglik(const Matrix& f, int start, int end,
                                                           const PhoneHmm& h) {
  if (start < 0 || end > f.rows() || start >= end)
    throw InvalidInput("segment_viterbi_loglik: bad span [" + std::to_string(start) + ", " +
                       std::to_string(end) + ") for " + std::to_string(f.rows()) + " frames");
  const int len = end - start;
  const int n_eff = std::min(h.num_states(), len);

  std::vector<double> log_self(n_eff), log_fwd(n_eff);
  for (int s = 0; s < n_eff; ++s) {
    log_self[s] = std::log(h.self_loop[s]);
    log_fwd[s] = std::log(h.forward[s]);
  }

  std::vector<std::vector<double>> score(len, std::vector<double>(n_eff, kLogZero));
  std::vector<std::vector<int>> back(len, std::vector<int>(n_eff, -1));
  score[0][0] = gmm_log_likelihood(h.states[0], f.row(start));
  for (int t = 1; t < len; ++t) {
    for (int s = 0; s < n_eff; ++s) {
      detail::Candidate best;
      if (s > 0 && score[t - 1][s - 1] > kLogZero)
        best.consider(score[t - 1][s - 1] + log_fwd[s - 1], s - 1, s - 1);
      if (score[t - 1][s] > kLogZero) best.consider(score[t - 1][s] + log_self[s], s, s);
      if (best.back >= 0) {
        score[t][s] = best.score + gmm_log_likelihood(h.states[s], f.row(start + t));
        back[t][s] = best.back;
      }
    }
  }

  StatePath path;
  path.states.resize(len);
  path.states[len - 1] = n_eff - 1;
  for (int t = len - 1; t > 0; --t) path.states[t - 1] = back[t][path.states[t]];
  return {score[len - 1][n_eff - 1], std::move(path)};
}

// Unconstrained phone recognition over frames [start, end): Viterbi through a
// loop of all phone HMMs with free (zero-penalty) transitions from any phone
// exit to any phone entry. The path may end in any state.
inline StatePath phone_loop_decode(const Matrix& f, int start, int end, const AcousticModel& m) {
  if (start < 0 || end > f.rows() || start >= end)
    throw InvalidInput("phone_loop_decode: bad span [" + std::to_string(start) + ", " +
                       std::to_string(end) + ") for " + std::to_string(f.rows()) + " frames");
  if (f.cols() != m.dim())
    throw InvalidInput("phone_loop_decode: feature dim != model dim");

  const StateIndex idx(m);
  const int S = idx.total();
  const int len = end - start;

  std::vector<double> log_self(S), log_fwd(S);
  std::vector<bool> is_first(S), is_last(S);
  for (int g = 0; g < S; ++g) {
    const PhoneHmm& h = m.hmms[idx.phone_of(g)];
    int pos = idx.pos_of(g);
    log_self[g] = std::log(h.self_loop[pos]);
    log_fwd[g] = std::log(h.forward[pos]);
    is_first[g] = pos == 0;
    is_last[g] = pos == h.num_states() - 1;
  }

  std::vector<std::vector<double>> score(len, std::vector<double>(S, kLogZero));
  std::vector<std::vector<int>> back(len, std::vector<int>(S, -1));
  for (int g = 0; g < S; ++g)
    if (is_first[g]) score[0][g] = gmm_log_likelihood(idx.state(g), f.row(start));

  for (int t = 1; t < len; ++t) {
    detail::Candidate exit;
    for (int g = 0; g < S; ++g)
      if (is_last[g] && score[t - 1][g] > kLogZero)
        exit.consider(score[t - 1][g] + log_fwd[g], g, g);
    for (int g = 0; g < S; ++g) {
      detail::Candidate best;
      if (score[t - 1][g] > kLogZero) best.consider(score[t - 1][g] + log_self[g], g, g);
      if (!is_first[g] && score[t - 1][g - 1] > kLogZero)
        best.consider(score[t - 1][g - 1] + log_fwd[g - 1], g - 1, g - 1);
      if (is_first[g] && exit.back >= 0) best.consider(exit.score, exit.tie, exit.back);
      if (best.back >= 0) {
        score[t][g] = best.score + gmm_log_likelihood(idx.state(g), f.row(start + t));
        back[t][g] = best.back;
      }
    }
  }

  detail::Candidate final_best;
  for (int g = 0; g < S; ++g)
    if (score[len - 1][g] > kLogZero) final_best.consider(score[len - 1][g], g, g);
  if (final_best.back < 0) throw InvalidInput("phone_loop_decode: no feasible path");

  StatePath path;
  path.states.resize(len);
  path.states[len - 1] = final_best.back;
  for (int t = len - 1; t > 0; --t) path.states[t - 1] = back[t][path.states[t]];
  return path;
}

// Per-frame phone labels of a decoded path.
inline std::vector<int> path_phone_labels(const StatePath& path, const AcousticModel& m) {
  const StateIndex idx(m);
  std::vector<int> labels;
  labels.reserve(path.states.size());
  for (int g : path.states) labels.push_back(idx.phone_of(g));
  return labels;
}

}  // namespace accentlab

#endif  // ACCENTLAB_ALIGN_HPP_
