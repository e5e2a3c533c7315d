// accentlab/io.hpp

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
// File formats. All structured documents are JSON with a `format_version`
// field; the matrix, lexicon and tabular formats are line-oriented text.
// Schemas are documented in the README.

#ifndef ACCENTLAB_IO_HPP_
#define ACCENTLAB_IO_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "accentlab/error.hpp"
#include "accentlab/featurize.hpp"
#include "accentlab/matrix.hpp"
#include "accentlab/model.hpp"
#include "accentlab/regress.hpp"
#include "accentlab/score.hpp"

namespace accentlab {

using json = nlohmann::json;

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

inline json parse_json_file(const std::string& path, const std::string& expected_kind) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw SchemaError(path + ": expected a JSON object");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
    throw SchemaError(path + ": missing integer field 'format_version'");
  if (doc["format_version"].get<int>() != 1)
    throw SchemaError(path + ": unsupported format_version " +
                      doc["format_version"].dump());
  if (!doc.contains("kind") || doc["kind"] != expected_kind)
    throw SchemaError(path + ": expected kind '" + expected_kind + "'");
  return doc;
}

inline std::vector<std::string> split_whitespace(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Phone inventory (corpus-facing: full invariants enforced on load)

inline json inventory_to_json(const PhoneInventory& inv) {
  json phones = json::array();
  for (int i = 0; i < inv.size(); ++i)
    phones.push_back({{"symbol", inv.phones[i]}, {"category", to_string(inv.categories[i])}});
  return {{"format_version", 1}, {"kind", "accentlab-phone-inventory"}, {"phones", phones}};
}

inline PhoneInventory inventory_from_json(const json& doc, const std::string& context) {
  if (!doc.contains("phones") || !doc["phones"].is_array())
    throw SchemaError(context + ": missing 'phones' array");
  PhoneInventory inv;
  for (const auto& entry : doc["phones"]) {
    if (!entry.is_object() || !entry.contains("symbol") || !entry.contains("category"))
      throw SchemaError(context + ": each phone needs 'symbol' and 'category'");
    inv.phones.push_back(entry["symbol"].get<std::string>());
    inv.categories.push_back(phone_category_from_string(entry["category"].get<std::string>()));
  }
  return inv;
}

inline void save_inventory(const std::string& path, const PhoneInventory& inv) {
  inv.validate_full();
  detail::write_text_file(path, inventory_to_json(inv).dump(2) + "\n");
}

inline PhoneInventory load_inventory(const std::string& path) {
  json doc = detail::parse_json_file(path, "accentlab-phone-inventory");
  PhoneInventory inv = inventory_from_json(doc, path);
  inv.validate_full();
  return inv;
}

// ---------------------------------------------------------------------------
// Lexicon: line-oriented `word phone phone ...`; repeated words add
// alternative pronunciations; '#' starts a comment.

inline void save_lexicon(const std::string& path, const Lexicon& lex) {
  std::ostringstream out;
  for (const auto& [word, prons] : lex.entries)
    for (const auto& pron : prons) {
      out << word;
      for (const auto& phone : pron) out << ' ' << phone;
      out << '\n';
    }
  detail::write_text_file(path, out.str());
}

inline Lexicon load_lexicon(const std::string& path) {
  std::string text = detail::read_text_file(path);
  Lexicon lex;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> tokens = detail::split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2)
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": lexicon entry needs a word and at least one phone");
    lex.entries[tokens.front()].push_back({tokens.begin() + 1, tokens.end()});
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Acoustic model (structural invariants enforced on load)

inline json model_to_json(const AcousticModel& m) {
  json hmms = json::array();
  for (const PhoneHmm& h : m.hmms) {
    json states = json::array();
    for (int s = 0; s < h.num_states(); ++s) {
      json components = json::array();
      for (const GmmComponent& c : h.states[s].components)
        components.push_back({{"weight", c.weight}, {"mean", c.mean}, {"var", c.var}});
      states.push_back({{"self_loop", h.self_loop[s]},
                        {"forward", h.forward[s]},
                        {"components", components}});
    }
    hmms.push_back({{"phone", h.phone}, {"states", states}});
  }
  json doc = {{"format_version", 1}, {"kind", "accentlab-acoustic-model"}, {"hmms", hmms}};
  doc["inventory"] = inventory_to_json(m.inventory)["phones"];
  return doc;
}

inline AcousticModel model_from_json(const json& doc, const std::string& context) {
  AcousticModel m;
  if (!doc.contains("inventory") || !doc["inventory"].is_array())
    throw SchemaError(context + ": missing 'inventory' array");
  m.inventory = inventory_from_json(json{{"phones", doc["inventory"]}}, context);
  if (!doc.contains("hmms") || !doc["hmms"].is_array())
    throw SchemaError(context + ": missing 'hmms' array");
  for (const auto& hj : doc["hmms"]) {
    PhoneHmm h;
    h.phone = hj.at("phone").get<std::string>();
    for (const auto& sj : hj.at("states")) {
      GmmState state;
      for (const auto& cj : sj.at("components")) {
        GmmComponent c;
        c.weight = cj.at("weight").get<double>();
        c.mean = cj.at("mean").get<std::vector<double>>();
        c.var = cj.at("var").get<std::vector<double>>();
        state.components.push_back(std::move(c));
      }
      h.states.push_back(std::move(state));
      h.self_loop.push_back(sj.at("self_loop").get<double>());
      h.forward.push_back(sj.at("forward").get<double>());
    }
    m.hmms.push_back(std::move(h));
  }
  return m;
}

inline void save_model(const std::string& path, const AcousticModel& m) {
  m.validate();
  detail::write_text_file(path, model_to_json(m).dump(2) + "\n");
}

inline AcousticModel load_model(const std::string& path) {
  json doc = detail::parse_json_file(path, "accentlab-acoustic-model");
  AcousticModel m;
  try {
    m = model_from_json(doc, path);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": malformed model document: " + e.what());
  }
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Feature matrix file: `accentlab-feats 1`, then `rows cols`, then one row
// of full-precision decimals per frame.

inline void save_feature_matrix(const std::string& path, const Matrix& f) {
  std::ostringstream out;
  out << "accentlab-feats 1\n" << f.rows() << ' ' << f.cols() << '\n';
  for (int t = 0; t < f.rows(); ++t) {
    for (int c = 0; c < f.cols(); ++c) {
      if (c) out << ' ';
      out << detail::format_full(f(t, c));
    }
    out << '\n';
  }
  detail::write_text_file(path, out.str());
}

inline Matrix load_feature_matrix(const std::string& path) {
  std::istringstream in(detail::read_text_file(path));
  std::string magic;
  int version = 0, rows = 0, cols = 0;
  in >> magic >> version;
  if (magic != "accentlab-feats" || version != 1)
    throw SchemaError(path + ": not an accentlab feature matrix file");
  in >> rows >> cols;
  if (!in || rows < 0 || cols <= 0) throw SchemaError(path + ": bad matrix header");
  Matrix f(rows, cols);
  for (int t = 0; t < rows; ++t)
    for (int c = 0; c < cols; ++c)
      if (!(in >> f(t, c))) throw SchemaError(path + ": truncated matrix body");
  if (!f.all_finite()) throw InvalidInput(path + ": non-finite feature values");
  return f;
}

// ---------------------------------------------------------------------------
// Corpus manifest

struct SpeakerEntry {
  std::string id;
  std::string l1;
  std::string features_path;  // exactly one of features_path / audio_path is set
  std::string audio_path;
  std::vector<std::string> transcript;  // words
  std::optional<double> label;          // accentedness in [1, 4]
};

struct CorpusManifest {
  std::string base_dir;  // directory of the manifest file; referenced paths are relative to it
  std::string lexicon_path;
  std::string inventory_path;
  std::vector<SpeakerEntry> speakers;

  std::string resolve(const std::string& rel) const {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return rel;
    return (std::filesystem::path(base_dir) / p).string();
  }
};

inline CorpusManifest load_manifest(const std::string& path) {
  json doc = detail::parse_json_file(path, "accentlab-corpus-manifest");
  CorpusManifest m;
  m.base_dir = std::filesystem::path(path).parent_path().string();
  if (m.base_dir.empty()) m.base_dir = ".";
  try {
    m.lexicon_path = doc.at("lexicon").get<std::string>();
    m.inventory_path = doc.at("inventory").get<std::string>();
    if (!doc.contains("speakers") || !doc["speakers"].is_array())
      throw SchemaError(path + ": missing 'speakers' array");
    for (const auto& sj : doc["speakers"]) {
      SpeakerEntry e;
      e.id = sj.at("id").get<std::string>();
      e.l1 = sj.value("l1", std::string());
      if (sj.contains("features")) e.features_path = sj["features"].get<std::string>();
      if (sj.contains("audio")) e.audio_path = sj["audio"].get<std::string>();
      e.transcript = detail::split_whitespace(sj.at("transcript").get<std::string>());
      if (sj.contains("label")) {
        if (!sj["label"].is_number())
          throw SchemaError(path + ": speaker '" + e.id + "': 'label' must be a number");
        e.label = sj["label"].get<double>();
      }
      m.speakers.push_back(std::move(e));
    }
  } catch (const json::exception& err) {
    throw SchemaError(path + ": malformed manifest: " + err.what());
  }

  for (size_t i = 0; i < m.speakers.size(); ++i) {
    const SpeakerEntry& e = m.speakers[i];
    for (size_t j = i + 1; j < m.speakers.size(); ++j)
      if (m.speakers[j].id == e.id)
        throw SchemaError(path + ": duplicate speaker id '" + e.id + "'");
    if (e.features_path.empty() == e.audio_path.empty())
      throw SchemaError(path + ": speaker '" + e.id +
                        "' needs exactly one of 'features' or 'audio'");
    if (e.transcript.empty())
      throw SchemaError(path + ": speaker '" + e.id + "' has an empty transcript");
    if (e.label && (*e.label < 1.0 || *e.label > 4.0))
      throw SchemaError(path + ": speaker '" + e.id + "': field 'label' = " +
                        std::to_string(*e.label) + " outside [1, 4]");
    std::string data_path = m.resolve(e.features_path.empty() ? e.audio_path : e.features_path);
    if (!std::filesystem::exists(data_path))
      throw IoError(path + ": speaker '" + e.id + "' references missing file " + data_path);
  }
  for (const std::string& ref : {m.lexicon_path, m.inventory_path})
    if (!std::filesystem::exists(m.resolve(ref)))
      throw IoError(path + ": referenced file missing: " + m.resolve(ref));
  return m;
}

inline void save_manifest(const std::string& path, const CorpusManifest& m) {
  json speakers = json::array();
  for (const SpeakerEntry& e : m.speakers) {
    json sj = {{"id", e.id}};
    if (!e.l1.empty()) sj["l1"] = e.l1;
    if (!e.features_path.empty()) sj["features"] = e.features_path;
    if (!e.audio_path.empty()) sj["audio"] = e.audio_path;
    std::string transcript;
    for (size_t i = 0; i < e.transcript.size(); ++i)
      transcript += (i ? " " : "") + e.transcript[i];
    sj["transcript"] = transcript;
    if (e.label) sj["label"] = *e.label;
    speakers.push_back(std::move(sj));
  }
  json doc = {{"format_version", 1},
              {"kind", "accentlab-corpus-manifest"},
              {"lexicon", m.lexicon_path},
              {"inventory", m.inventory_path},
              {"speakers", speakers}};
  detail::write_text_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Alignment file: one segment per line,
// `utterance phone start_frame end_frame loglik` (tab-separated, header row).

struct AlignmentFileRow {
  std::string utterance;
  std::string phone;
  int start = 0;
  int end = 0;
  double loglik = 0.0;
};

inline void save_alignments(const std::string& path, std::span<const AlignmentFileRow> rows) {
  std::ostringstream out;
  out << "utterance\tphone\tstart_frame\tend_frame\tloglik\n";
  for (const auto& r : rows)
    out << r.utterance << '\t' << r.phone << '\t' << r.start << '\t' << r.end << '\t'
        << detail::format_full(r.loglik) << '\n';
  detail::write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Score file: one record per line,
// `utterance phone start end ps_l2 ps_l1 l1_phone argmax_l2_phone`
// (tab-separated, header row, NA for fields absent in L2-only runs).

struct ScoreFileRow {
  std::string utterance;
  std::string phone;
  int start = 0;
  int end = 0;
  double ps_l2 = 0.0;
  std::optional<double> ps_l1;
  std::string l1_phone;  // empty when ps_l1 is absent
  std::string argmax_l2_phone;
};

inline void save_scores(const std::string& path, std::span<const ScoreFileRow> rows) {
  std::ostringstream out;
  out << "utterance\tphone\tstart\tend\tps_l2\tps_l1\tl1_phone\targmax_l2_phone\n";
  for (const auto& r : rows) {
    out << r.utterance << '\t' << r.phone << '\t' << r.start << '\t' << r.end << '\t'
        << detail::format_full(r.ps_l2) << '\t'
        << (r.ps_l1 ? detail::format_full(*r.ps_l1) : "NA") << '\t'
        << (r.l1_phone.empty() ? "NA" : r.l1_phone) << '\t' << r.argmax_l2_phone << '\n';
  }
  detail::write_text_file(path, out.str());
}

inline std::vector<ScoreFileRow> load_scores(const std::string& path) {
  std::istringstream in(detail::read_text_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      line != "utterance\tphone\tstart\tend\tps_l2\tps_l1\tl1_phone\targmax_l2_phone")
    throw SchemaError(path + ": bad score file header");
  std::vector<ScoreFileRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    size_t pos = 0;
    while (true) {
      size_t tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() != 8)
      throw SchemaError(path + ":" + std::to_string(line_no) + ": expected 8 columns");
    ScoreFileRow r;
    r.utterance = cols[0];
    r.phone = cols[1];
    try {
      r.start = std::stoi(cols[2]);
      r.end = std::stoi(cols[3]);
      r.ps_l2 = std::stod(cols[4]);
      if (cols[5] != "NA") r.ps_l1 = std::stod(cols[5]);
    } catch (const std::exception&) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": bad numeric field");
    }
    if (cols[6] != "NA") r.l1_phone = cols[6];
    r.argmax_l2_phone = cols[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Utterance feature file: CSV with a named header, one row per speaker.

inline void save_feature_csv(const std::string& path,
                             std::span<const std::string> speaker_ids,
                             std::span<const UtteranceFeatures> features, bool use_l1) {
  if (speaker_ids.size() != features.size())
    throw InvalidInput("save_feature_csv: speakers and feature rows differ in length");
  std::vector<std::string> names = feature_names(use_l1);
  std::ostringstream out;
  out << "speaker";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != names.size())
      throw InvalidInput("save_feature_csv: row dimension mismatch for '" + speaker_ids[i] + "'");
    out << speaker_ids[i];
    for (double v : features[i].values) out << ',' << detail::format_full(v);
    out << '\n';
  }
  detail::write_text_file(path, out.str());
}

struct FeatureCsv {
  std::vector<std::string> speakers;
  std::vector<UtteranceFeatures> features;
  bool use_l1 = false;
};

inline FeatureCsv load_feature_csv(const std::string& path) {
  std::istringstream in(detail::read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty feature file");
  auto split_csv = [](const std::string& s) {
    std::vector<std::string> cols;
    size_t pos = 0;
    while (true) {
      size_t comma = s.find(',', pos);
      cols.push_back(s.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return cols;
  };
  std::vector<std::string> header = split_csv(line);
  FeatureCsv out;
  if (header.size() == 13) {
    out.use_l1 = false;
  } else if (header.size() == 25) {
    out.use_l1 = true;
  } else {
    throw SchemaError(path + ": expected 12 or 24 feature columns, got " +
                      std::to_string(header.size() - 1));
  }
  std::vector<std::string> expected = feature_names(out.use_l1);
  if (header.front() != "speaker")
    throw SchemaError(path + ": first column must be 'speaker'");
  for (size_t i = 0; i < expected.size(); ++i)
    if (header[i + 1] != expected[i])
      throw SchemaError(path + ": column " + std::to_string(i + 1) + " is '" + header[i + 1] +
                        "', expected '" + expected[i] + "'");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols = split_csv(line);
    if (cols.size() != header.size())
      throw SchemaError(path + ":" + std::to_string(line_no) + ": wrong column count");
    out.speakers.push_back(cols.front());
    UtteranceFeatures f;
    for (size_t i = 1; i < cols.size(); ++i) {
      try {
        f.values.push_back(std::stod(cols[i]));
      } catch (const std::exception&) {
        throw SchemaError(path + ":" + std::to_string(line_no) + ": bad numeric field");
      }
    }
    out.features.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation report: JSON document plus a human-readable table.

inline json report_to_json(const EvalReport& r) {
  json speakers = json::array();
  for (size_t i = 0; i < r.speakers.size(); ++i)
    speakers.push_back({{"id", r.speakers[i]},
                        {"label", r.y_true[i]},
                        {"prediction", r.y_pred[i]},
                        {"lambda", r.fold_choices[i].lambda},
                        {"k", r.fold_choices[i].k}});
  return {{"format_version", 1},
          {"kind", "accentlab-eval-report"},
          {"pcc", r.pcc},
          {"mae", r.mae},
          {"degenerate_pcc", r.degenerate_pcc},
          {"speakers", speakers}};
}

inline std::string report_to_text(const EvalReport& r) {
  std::ostringstream out;
  out << "speaker            label  prediction  lambda      k\n";
  char buf[160];
  for (size_t i = 0; i < r.speakers.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-18s %5.2f  %10.4f  %-8g %4d\n", r.speakers[i].c_str(),
                  r.y_true[i], r.y_pred[i], r.fold_choices[i].lambda, r.fold_choices[i].k);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "PCC %.6f  MAE %.6f%s\n", r.pcc, r.mae,
                r.degenerate_pcc ? "  (degenerate: constant vector, PCC reported as 0)" : "");
  out << buf;
  return out.str();
}

inline void save_report(const std::string& json_path, const std::string& text_path,
                        const EvalReport& r) {
  detail::write_text_file(json_path, report_to_json(r).dump(2) + "\n");
  detail::write_text_file(text_path, report_to_text(r));
}

}  // namespace accentlab

#endif  // ACCENTLAB_IO_HPP_
