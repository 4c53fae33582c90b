// Copyright 2026 The kconflict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef KCONFLICT_EVALUATION_HPP_
#define KCONFLICT_EVALUATION_HPP_

// Scoring of reader predictions on original and substituted instances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kconflict/answer_match.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/entity_type.hpp"
#include "kconflict/error.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/rng.hpp"
#include "kconflict/substitution.hpp"

namespace kconflict {

struct Prediction {
  std::string qid;
  std::string text;
  std::optional<double> score;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using PredictionMap = std::unordered_map<std::string, Prediction>;

// {qid: "text"} or {qid: {"text": ..., "score": ...}}.
inline PredictionMap PredictionsFromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchema, "predictions must be a JSON object");
  }
  PredictionMap out;
  for (const auto& [qid, value] : j.items()) {
    if (qid.empty()) throw Error(ErrorCode::kSchema, "empty prediction qid");
    Prediction p{qid, {}, std::nullopt};
    if (value.is_string()) {
      p.text = value.get<std::string>();
    } else if (value.is_object() && value.contains("text") &&
               value["text"].is_string()) {
      p.text = value["text"].get<std::string>();
      if (auto it = value.find("score"); it != value.end() && !it->is_null()) {
        if (!it->is_number()) {
          throw Error(ErrorCode::kSchema,
                      "score for qid \"" + qid + "\" must be a number");
        }
        p.score = it->get<double>();
      }
    } else {
      throw Error(ErrorCode::kSchema,
                  "prediction for qid \"" + qid +
                      "\" must be a string or {\"text\", \"score\"}");
    }
    out.emplace(qid, std::move(p));
  }
  return out;
}

inline nlohmann::json PredictionsToJson(const PredictionMap& predictions) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [qid, p] : predictions) {
    if (p.score) {
      j[qid] = {{"text", p.text}, {"score", *p.score}};
    } else {
      j[qid] = p.text;
    }
  }
  return j;
}

inline PredictionMap ReadPredictionsFile(const std::string& path) {
  LineReader lines(path);
  std::string all;
  std::string line;
  while (lines.Next(line)) {
    all += line;
    all += '\n';
  }
  try {
    return PredictionsFromJson(nlohmann::json::parse(all));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

inline void WritePredictionsFile(const PredictionMap& predictions,
                                 const std::string& path) {
  LineWriter out(path);
  out.Write(DumpJson(PredictionsToJson(predictions)));
  out.Close();
}

enum class Outcome { kOriginal = 0, kSubstitute, kOther };

inline constexpr std::array<Outcome, 3> kAllOutcomes = {
    Outcome::kOriginal, Outcome::kSubstitute, Outcome::kOther};

inline std::string_view OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kOriginal: return "original";
    case Outcome::kSubstitute: return "substitute";
    case Outcome::kOther: return "other";
  }
  return "other";
}

// Substitute is tested first so the result is defined even when a' and an
// original gold answer normalize to the same string.
inline Outcome Categorize(std::string_view prediction,
                          std::span<const std::string> original_golds,
                          std::string_view substitute_answer) {
  if (ExactMatch(prediction, substitute_answer)) return Outcome::kSubstitute;
  if (ExactMatch(prediction, original_golds)) return Outcome::kOriginal;
  return Outcome::kOther;
}

inline std::optional<double> MemorizationRatio(std::size_t original_count,
                                               std::size_t substitute_count) {
  const std::size_t denominator = original_count + substitute_count;
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(original_count) / static_cast<double>(denominator);
}

struct EvalReport {
  std::size_t n_total = 0;
  std::size_t n_correct_on_original = 0;
  std::array<std::size_t, 3> counts{};
  // Pairs where both predictions carry a score, and of those how many had
  // p(x) > p(x'), per outcome.
  std::array<std::size_t, 3> n_scored{};
  std::array<std::size_t, 3> n_confidence_gt{};
  std::map<std::string, EvalReport> strata;

  std::size_t count(Outcome o) const { return counts[static_cast<std::size_t>(o)]; }

  std::optional<double> percent(Outcome o) const {
    if (n_correct_on_original == 0) return std::nullopt;
    return 100.0 * static_cast<double>(count(o)) /
           static_cast<double>(n_correct_on_original);
  }

  std::optional<double> memorization_ratio() const {
    return MemorizationRatio(count(Outcome::kOriginal),
                             count(Outcome::kSubstitute));
  }

  std::optional<double> confidence_gt_percent(Outcome o) const {
    const auto i = static_cast<std::size_t>(o);
    if (n_scored[i] == 0) return std::nullopt;
    return 100.0 * static_cast<double>(n_confidence_gt[i]) /
           static_cast<double>(n_scored[i]);
  }

  std::optional<double> confidence_gt_overall() const {
    std::size_t scored = 0;
    std::size_t greater = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      scored += n_scored[i];
      greater += n_confidence_gt[i];
    }
    if (scored == 0) return std::nullopt;
    return 100.0 * static_cast<double>(greater) / static_cast<double>(scored);
  }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

namespace eval_internal {

inline nlohmann::json OptionalNumber(std::optional<double> v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::size_t CountField(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw Error(ErrorCode::kSchema,
                "report field \"" + std::string(key) +
                    "\" missing or not a count");
  }
  return it->get<std::size_t>();
}

}  // namespace eval_internal

inline nlohmann::json ReportToJson(const EvalReport& r) {
  using eval_internal::OptionalNumber;
  nlohmann::json counts, percent;
  for (Outcome o : kAllOutcomes) {
    const std::string name(OutcomeName(o));
    counts[name] = r.count(o);
    percent[name] = OptionalNumber(r.percent(o));
  }
  nlohmann::json j = {{"n_total", r.n_total},
                      {"n_correct_on_original", r.n_correct_on_original},
                      {"counts", counts},
                      {"percent", percent},
                      {"memorization_ratio", OptionalNumber(r.memorization_ratio())}};
  if (r.confidence_gt_overall()) {
    nlohmann::json conf, scored, greater;
    for (Outcome o : kAllOutcomes) {
      const std::string name(OutcomeName(o));
      const auto i = static_cast<std::size_t>(o);
      conf[name] = OptionalNumber(r.confidence_gt_percent(o));
      scored[name] = r.n_scored[i];
      greater[name] = r.n_confidence_gt[i];
    }
    conf["overall"] = OptionalNumber(r.confidence_gt_overall());
    conf["n_scored"] = scored;
    conf["n_greater"] = greater;
    j["confidence_gt"] = conf;
  } else {
    j["confidence_gt"] = nullptr;
  }
  if (r.strata.empty()) {
    j["strata"] = nullptr;
  } else {
    nlohmann::json strata = nlohmann::json::object();
    for (const auto& [key, sub] : r.strata) strata[key] = ReportToJson(sub);
    j["strata"] = strata;
  }
  return j;
}

// Rebuilds a report from its JSON form, using only the raw counts.
inline EvalReport ReportFromJson(const nlohmann::json& j) {
  using eval_internal::CountField;
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "report must be an object");
  EvalReport r;
  r.n_total = CountField(j, "n_total");
  r.n_correct_on_original = CountField(j, "n_correct_on_original");
  if (!j.contains("counts")) throw Error(ErrorCode::kSchema, "report has no counts");
  for (Outcome o : kAllOutcomes) {
    const std::string name(OutcomeName(o));
    r.counts[static_cast<std::size_t>(o)] = CountField(j["counts"], name.c_str());
  }
  if (auto it = j.find("confidence_gt"); it != j.end() && it->is_object()) {
    for (Outcome o : kAllOutcomes) {
      const std::string name(OutcomeName(o));
      const auto i = static_cast<std::size_t>(o);
      r.n_scored[i] = CountField((*it)["n_scored"], name.c_str());
      r.n_confidence_gt[i] = CountField((*it)["n_greater"], name.c_str());
    }
  }
  if (auto it = j.find("strata"); it != j.end() && it->is_object()) {
    for (const auto& [key, sub] : it->items()) r.strata[key] = ReportFromJson(sub);
  }
  return r;
}

// Per-record scoring result before aggregation.
struct ScoredRecord {
  const SubstitutionRecord* record = nullptr;
  bool correct_on_original = false;
  Outcome outcome = Outcome::kOther;
  bool scored = false;
  bool confidence_gt = false;
};

// One substituted run: its records and the reader's predictions on x'.
struct SubstitutedRun {
  const std::vector<SubstitutionRecord>* records = nullptr;
  const PredictionMap* predictions = nullptr;
};

// Scores every record of every run. Records whose original instance was
// answered incorrectly are marked and later excluded from the categories.
inline std::vector<ScoredRecord> ScoreRecords(
    const PredictionMap& original_predictions, const Dataset& original_dataset,
    const std::vector<SubstitutedRun>& runs) {
  const auto index = IndexByQid(original_dataset);
  std::vector<std::string> missing;
  std::vector<std::string> unknown;
  std::vector<ScoredRecord> scored;
  for (const auto& run : runs) {
    for (const auto& record : *run.records) {
      auto ds = index.find(record.qid);
      auto orig = original_predictions.find(record.qid);
      auto sub = run.predictions->find(record.qid);
      if (ds == index.end()) unknown.push_back(record.qid);
      if (orig == original_predictions.end() || sub == run.predictions->end()) {
        missing.push_back(record.qid);
      }
      if (ds == index.end() || orig == original_predictions.end() ||
          sub == run.predictions->end()) {
        continue;
      }
      const auto& golds = original_dataset.instances[ds->second].gold_answers;
      ScoredRecord s;
      s.record = &record;
      s.correct_on_original = ExactMatch(orig->second.text, golds);
      if (s.correct_on_original) {
        s.outcome =
            Categorize(sub->second.text, golds, record.substitute_answer);
        if (orig->second.score && sub->second.score) {
          s.scored = true;
          // Ties count as not greater.
          s.confidence_gt = *orig->second.score > *sub->second.score;
        }
      }
      scored.push_back(s);
    }
  }
  auto describe = [](const std::vector<std::string>& qids) {
    std::string out;
    for (std::size_t i = 0; i < qids.size() && i < 20; ++i) {
      out += (i ? ", " : "") + qids[i];
    }
    if (qids.size() > 20) out += ", ... (" + std::to_string(qids.size()) + " total)";
    return out;
  };
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingPrediction,
                "no prediction for qids: " + describe(missing));
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kValidation,
                "records reference qids absent from the original dataset: " +
                    describe(unknown));
  }
  return scored;
}

inline void Accumulate(EvalReport& report, const ScoredRecord& s) {
  ++report.n_total;
  if (!s.correct_on_original) return;
  ++report.n_correct_on_original;
  const auto i = static_cast<std::size_t>(s.outcome);
  ++report.counts[i];
  if (s.scored) {
    ++report.n_scored[i];
    if (s.confidence_gt) ++report.n_confidence_gt[i];
  }
}

enum class Stratification { kNone, kBucket, kTypePair };

inline std::string TypePairKey(EntityType original, EntityType substitute) {
  return std::string(EntityTypeName(original)) + "->" +
         std::string(EntityTypeName(substitute));
}

inline std::string StratumKey(const SubstitutionRecord& r, Stratification by) {
  switch (by) {
    case Stratification::kBucket:
      return r.bucket_index ? "bucket_" + std::to_string(*r.bucket_index)
                            : "unbucketed";
    case Stratification::kTypePair:
      return TypePairKey(r.original_type, r.substitute_type);
    case Stratification::kNone: break;
  }
  return {};
}

inline EvalReport Aggregate(const std::vector<ScoredRecord>& scored,
                            Stratification by = Stratification::kNone) {
  EvalReport report;
  for (const auto& s : scored) {
    Accumulate(report, s);
    if (by != Stratification::kNone) {
      Accumulate(report.strata[StratumKey(*s.record, by)], s);
    }
  }
  return report;
}

// Restricts to instances answered correctly on x, then categorizes the
// prediction on x' as original, substitute or other.
inline EvalReport EvalConflict(const PredictionMap& original_predictions,
                               const PredictionMap& substituted_predictions,
                               const Dataset& original_dataset,
                               const std::vector<SubstitutionRecord>& records,
                               Stratification by = Stratification::kNone) {
  return Aggregate(ScoreRecords(original_predictions, original_dataset,
                                {{&records, &substituted_predictions}}),
                   by);
}

inline EvalReport EvalConflictRuns(const PredictionMap& original_predictions,
                                   const Dataset& original_dataset,
                                   const std::vector<SubstitutedRun>& runs,
                                   Stratification by = Stratification::kNone) {
  return Aggregate(ScoreRecords(original_predictions, original_dataset, runs),
                   by);
}

using TypeSwapGrid =
    std::array<std::array<std::optional<double>, kNumEntityTypes>,
               kNumEntityTypes>;

// Cell [original][substitute] holds that pair's memorization ratio; the
// diagonal and pairs without data stay empty.
inline TypeSwapGrid TypeSwapMatrix(
    const std::map<std::pair<EntityType, EntityType>, EvalReport>& reports) {
  TypeSwapGrid grid{};
  for (const auto& [pair, report] : reports) {
    if (pair.first == pair.second) continue;
    grid[Index(pair.first)][Index(pair.second)] = report.memorization_ratio();
  }
  return grid;
}

inline std::map<std::pair<EntityType, EntityType>, EvalReport> ReportsByTypePair(
    const std::vector<ScoredRecord>& scored) {
  std::map<std::pair<EntityType, EntityType>, EvalReport> out;
  for (const auto& s : scored) {
    Accumulate(out[{s.record->original_type, s.record->substitute_type}], s);
  }
  return out;
}

// Recovers type-pair reports from "PER->DAT" strata keys.
inline std::map<std::pair<EntityType, EntityType>, EvalReport>
TypePairReportsFromStrata(const EvalReport& report) {
  std::map<std::pair<EntityType, EntityType>, EvalReport> out;
  for (const auto& [key, sub] : report.strata) {
    const auto arrow = key.find("->");
    if (arrow == std::string::npos) continue;
    auto from = ParseEntityType(std::string_view(key).substr(0, arrow));
    auto to = ParseEntityType(std::string_view(key).substr(arrow + 2));
    if (from && to) out[{*from, *to}] = sub;
  }
  return out;
}

struct OverlapSplit {
  Dataset ao;
  Dataset nao;
};

// Dev instances with any normalized gold answer among the training set's
// normalized gold answers go to AO; the rest to NAO. Order is preserved.
inline OverlapSplit SplitAnswerOverlap(const Dataset& dev, const Dataset& train) {
  std::unordered_set<std::string> train_answers;
  for (const auto& instance : train.instances) {
    for (const auto& gold : instance.gold_answers) {
      train_answers.insert(NormalizeAnswer(gold));
    }
  }
  OverlapSplit split;
  split.ao.header = dev.header;
  split.nao.header = dev.header;
  for (const auto& instance : dev.instances) {
    bool overlap = false;
    for (const auto& gold : instance.gold_answers) {
      overlap = overlap || train_answers.contains(NormalizeAnswer(gold));
    }
    (overlap ? split.ao : split.nao).instances.push_back(instance);
  }
  return split;
}

// One Other prediction prepared for manual review.
struct OtherSample {
  std::string qid;
  std::string question;
  std::string substituted_context;
  std::string original_answer;
  std::string substitute_answer;
  std::string prediction;
};

inline nlohmann::json OtherSampleToJson(const OtherSample& s) {
  return {{"qid", s.qid},
          {"question", s.question},
          {"context", s.substituted_context},
          {"original_answer", s.original_answer},
          {"substitute_answer", s.substitute_answer},
          {"prediction", s.prediction}};
}

// Uniform sample without replacement of up to n records categorized Other.
inline std::vector<OtherSample> SampleOtherPredictions(
    const PredictionMap& original_predictions,
    const PredictionMap& substituted_predictions,
    const Dataset& original_dataset, const Dataset& substituted_dataset,
    const std::vector<SubstitutionRecord>& records, std::size_t n, Rng& rng) {
  const auto scored = ScoreRecords(original_predictions, original_dataset,
                                   {{&records, &substituted_predictions}});
  std::vector<const SubstitutionRecord*> others;
  for (const auto& s : scored) {
    if (s.correct_on_original && s.outcome == Outcome::kOther) {
      others.push_back(s.record);
    }
  }
  const auto sub_index = IndexByQid(substituted_dataset);
  std::vector<OtherSample> out;
  for (const SubstitutionRecord* r : SampleWithoutReplacement(others, n, rng)) {
    OtherSample s;
    s.qid = r->qid;
    if (auto it = sub_index.find(r->qid); it != sub_index.end()) {
      s.question = substituted_dataset.instances[it->second].question;
      s.substituted_context = substituted_dataset.instances[it->second].context;
    }
    s.original_answer = r->original_answer;
    s.substitute_answer = r->substitute_answer;
    s.prediction = substituted_predictions.at(r->qid).text;
    out.push_back(std::move(s));
  }
  return out;
}

inline constexpr std::string_view kSimulatedOtherAnswer =
    "zzqx simulated off-context answer";

// Synthetic reader over x': per instance, predict the original answer with
// probability memorization_prob, a fixed off-context string with
// probability other_prob, and the substitute otherwise. Scores are
// uniform on [0, 1).
inline PredictionMap SimulateReader(const Dataset& substituted,
                                    const std::vector<SubstitutionRecord>& records,
                                    double memorization_prob, double other_prob,
                                    Rng& rng) {
  if (memorization_prob < 0 || other_prob < 0 ||
      memorization_prob + other_prob > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulator needs m, other >= 0 and m + other <= 1");
  }
  std::unordered_map<std::string_view, const SubstitutionRecord*> by_qid;
  for (const auto& r : records) by_qid.emplace(r.qid, &r);
  PredictionMap out;
  for (const auto& instance : substituted.instances) {
    auto it = by_qid.find(instance.qid);
    if (it == by_qid.end()) continue;
    const double u = rng.UniformDouble();
    Prediction p{instance.qid, {}, std::nullopt};
    if (u < memorization_prob) {
      p.text = it->second->original_answer;
    } else if (u < memorization_prob + other_prob) {
      p.text = std::string(kSimulatedOtherAnswer);
    } else {
      p.text = it->second->substitute_answer;
    }
    p.score = rng.UniformDouble();
    out.emplace(instance.qid, std::move(p));
  }
  return out;
}

// Predicts the first gold answer of every instance.
inline PredictionMap GoldPredictions(const Dataset& dataset,
                                     std::optional<double> score = 1.0) {
  PredictionMap out;
  for (const auto& instance : dataset.instances) {
    out.emplace(instance.qid,
                Prediction{instance.qid, instance.gold_answers.front(), score});
  }
  return out;
}

namespace render_internal {

inline std::string Fixed(std::optional<double> v, int precision = 1) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, *v);
  return buf;
}

// Left-aligns the first column, right-aligns the rest.
inline std::string Table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const std::string& cell = rows[r][c];
      const std::string pad(widths[c] - cell.size(), ' ');
      if (c > 0) out << "  ";
      out << (c == 0 ? cell + pad : pad + cell);
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace render_internal

// Category breakdown (percent of instances correct on x) and M_R per row,
// followed by the confidence comparison when scores were available.
inline std::string RenderReportTable(const EvalReport& report,
                                     const std::string& label = "all") {
  using render_internal::Fixed;
  std::vector<std::pair<std::string, const EvalReport*>> rows = {{label, &report}};
  for (const auto& [key, sub] : report.strata) rows.emplace_back(key, &sub);
  std::vector<std::vector<std::string>> table = {
      {"Inference Set", "N", "Correct", "Orig.", "Sub.", "Other", "M_R"}};
  for (const auto& [name, r] : rows) {
    auto mr = r->memorization_ratio();
    table.push_back({name, std::to_string(r->n_total),
                     std::to_string(r->n_correct_on_original),
                     Fixed(r->percent(Outcome::kOriginal)),
                     Fixed(r->percent(Outcome::kSubstitute)),
                     Fixed(r->percent(Outcome::kOther)),
                     Fixed(mr ? std::optional<double>(*mr * 100.0) : std::nullopt)});
  }
  std::string out = render_internal::Table(table);
  if (report.confidence_gt_overall()) {
    std::vector<std::vector<std::string>> conf = {
        {"p(x) > p(x') %", "Orig.", "Other", "Sub.", "Avg."}};
    for (const auto& [name, r] : rows) {
      conf.push_back({name, Fixed(r->confidence_gt_percent(Outcome::kOriginal)),
                      Fixed(r->confidence_gt_percent(Outcome::kOther)),
                      Fixed(r->confidence_gt_percent(Outcome::kSubstitute)),
                      Fixed(r->confidence_gt_overall())});
    }
    out += "\n" + render_internal::Table(conf);
  }
  return out;
}

// Rows are original types, columns substitute types; cells are M_R.
inline std::string RenderTypeSwapMatrix(const TypeSwapGrid& grid) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"orig \\ sub"};
  for (EntityType t : kAllEntityTypes) header.emplace_back(EntityTypeName(t));
  table.push_back(header);
  for (EntityType from : kAllEntityTypes) {
    std::vector<std::string> row = {std::string(EntityTypeName(from))};
    for (EntityType to : kAllEntityTypes) {
      row.push_back(render_internal::Fixed(grid[Index(from)][Index(to)], 2));
    }
    table.push_back(row);
  }
  return render_internal::Table(table);
}

}  // namespace kconflict

#endif  // KCONFLICT_EVALUATION_HPP_
