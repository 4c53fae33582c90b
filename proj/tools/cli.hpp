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


#ifndef KCONFLICT_TOOLS_CLI_HPP_
#define KCONFLICT_TOOLS_CLI_HPP_

// Command-line front end. Exit status: 0 success, 1 data/validation/I-O
// error, 2 usage error. Diagnostics go to `err`; data goes only to the
// declared output paths (or `out` for `report` without --out).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kconflict/kconflict.hpp"

namespace kconflict::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

inline void WriteJsonFile(const nlohmann::json& value, const std::string& path) {
  LineWriter out(path);
  out.Write(value.dump(2, ' ', false, nlohmann::json::error_handler_t::replace));
  out.Close();
}

inline void WriteSkipped(const std::vector<SkippedInstance>& skipped,
                         const std::string& path) {
  LineWriter out(path);
  for (const auto& s : skipped) out.Write(DumpJson(SkippedToJson(s)));
  out.Close();
}

inline EntityType ParseTypeFlag(const std::string& name, const char* flag) {
  auto type = ParseEntityType(name);
  if (!type) {
    throw UsageError(std::string(flag) + ": unknown entity type \"" + name +
                     "\" (expected PER, DAT, NUM, ORG or LOC)");
  }
  return *type;
}

inline void Require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

// Answer pool: the input dataset's annotated answers unless a separate pool
// dataset is given.
struct PoolOptions {
  std::string input;
  std::string annotations;
};

inline AnswerPool LoadPool(const PoolOptions& options, const Dataset& dataset,
                           const AnnotationMap& annotations) {
  if (options.input.empty()) return AnswerPool::Build(dataset, annotations);
  const Dataset pool_dataset = ReadMrqaFile(options.input);
  const AnnotationMap pool_annotations =
      options.annotations.empty() ? annotations
                                  : IngestAnnotationsFile(options.annotations);
  return AnswerPool::Build(
      FilterEntityInstances(pool_dataset, pool_annotations).kept,
      pool_annotations);
}

inline EntityCatalog LoadCatalogOrEmpty(const std::string& path,
                                        std::ostream& err) {
  if (path.empty()) return EntityCatalog();
  EntityCatalog catalog = EntityCatalog::LoadFile(path);
  for (const auto& warning : catalog.warnings()) {
    err << "warning: " << warning << '\n';
  }
  return catalog;
}

}  // namespace internal

inline int Run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  using namespace internal;
  CLI::App app{"Knowledge-conflict QA dataset generation and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  unsigned parallelism = 1;
  auto add_parallelism = [&](CLI::App* sub) {
    sub->add_option("--parallelism", parallelism, "Worker threads")
        ->check(CLI::PositiveNumber);
  };

  // annotate
  struct {
    std::string input, catalog, sidecar, out;
  } annotate;
  auto* annotate_cmd = app.add_subcommand(
      "annotate", "Type gold answers heuristically and write a sidecar");
  annotate_cmd->add_option("--input", annotate.input, "MRQA dataset")->required();
  annotate_cmd->add_option("--catalog", annotate.catalog, "Entity catalog JSONL");
  annotate_cmd->add_option("--annotations", annotate.sidecar,
                           "Existing sidecar; its entries take precedence");
  annotate_cmd->add_option("--out", annotate.out, "Output sidecar")->required();
  add_parallelism(annotate_cmd);

  // filter
  struct {
    std::string input, annotations, out, skipped;
  } filter;
  auto* filter_cmd = app.add_subcommand(
      "filter", "Keep instances with a typed gold answer present in context");
  filter_cmd->add_option("--input", filter.input)->required();
  filter_cmd->add_option("--annotations", filter.annotations)->required();
  filter_cmd->add_option("--out", filter.out)->required();
  filter_cmd->add_option("--skipped", filter.skipped, "Skipped qids JSONL");
  add_parallelism(filter_cmd);

  // substitute
  struct {
    std::string policy, input, annotations, catalog, out, records, skipped,
        manifest, target_type;
    PoolOptions pool;
    std::optional<std::uint64_t> seed, pop_lower, pop_upper;
  } sub;
  auto* sub_cmd = app.add_subcommand(
      "substitute", "Rewrite contexts with substitute answers");
  sub_cmd->add_option("--policy", sub.policy)
      ->required()
      ->check(CLI::IsMember({"corpus", "type-swap", "popularity", "alias"}));
  sub_cmd->add_option("--input", sub.input)->required();
  sub_cmd->add_option("--annotations", sub.annotations)->required();
  sub_cmd->add_option("--catalog", sub.catalog,
                      "Required for popularity and alias policies");
  sub_cmd->add_option("--pool-input", sub.pool.input,
                      "Dataset whose answers form the corpus pool");
  sub_cmd->add_option("--pool-annotations", sub.pool.annotations);
  sub_cmd->add_option("--seed", sub.seed)->required();
  sub_cmd->add_option("--out", sub.out)->required();
  sub_cmd->add_option("--records", sub.records)->required();
  sub_cmd->add_option("--skipped", sub.skipped);
  sub_cmd->add_option("--manifest", sub.manifest);
  sub_cmd->add_option("--target-type", sub.target_type, "type-swap only");
  sub_cmd->add_option("--pop-lower", sub.pop_lower, "popularity only");
  sub_cmd->add_option("--pop-upper", sub.pop_upper,
                      "popularity only; unbounded when omitted");
  add_parallelism(sub_cmd);

  // popularity-suite
  struct {
    std::string input, annotations, catalog, type = "PER", out_dir;
    std::size_t buckets = 5;
    std::optional<std::uint64_t> seed;
  } suite;
  auto* suite_cmd = app.add_subcommand(
      "popularity-suite", "One popularity substitution per catalog bucket");
  suite_cmd->add_option("--input", suite.input)->required();
  suite_cmd->add_option("--annotations", suite.annotations)->required();
  suite_cmd->add_option("--catalog", suite.catalog)->required();
  suite_cmd->add_option("--type", suite.type, "Entity type (default PER)");
  suite_cmd->add_option("--buckets", suite.buckets, "Bucket count (default 5)")
      ->check(CLI::PositiveNumber);
  suite_cmd->add_option("--seed", suite.seed)->required();
  suite_cmd->add_option("--out-dir", suite.out_dir)->required();
  add_parallelism(suite_cmd);

  // split-overlap
  struct {
    std::string dev, train, ao_out, nao_out;
  } split;
  auto* split_cmd = app.add_subcommand(
      "split-overlap", "Partition a dev set by answer overlap with train");
  split_cmd->add_option("--dev", split.dev)->required();
  split_cmd->add_option("--train", split.train)->required();
  split_cmd->add_option("--ao-out", split.ao_out)->required();
  split_cmd->add_option("--nao-out", split.nao_out)->required();

  // evaluate
  struct {
    std::string dataset, original_predictions, stratify = "none", out,
        matrix_out, substituted_dataset, sample_out;
    std::vector<std::string> records, substituted_predictions;
    std::size_t sample_other = 0;
    std::optional<std::uint64_t> seed;
  } eval;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Categorize predictions on substituted instances");
  eval_cmd->add_option("--dataset", eval.dataset, "Original dataset")->required();
  eval_cmd->add_option("--original-predictions", eval.original_predictions)
      ->required();
  eval_cmd->add_option("--records", eval.records, "Repeatable")->required();
  eval_cmd->add_option("--substituted-predictions",
                       eval.substituted_predictions,
                       "Repeatable; pairs with --records in order")
      ->required();
  eval_cmd->add_option("--stratify", eval.stratify)
      ->check(CLI::IsMember({"none", "bucket", "type-pair"}));
  eval_cmd->add_option("--out", eval.out, "Report JSON")->required();
  eval_cmd->add_option("--matrix-out", eval.matrix_out,
                       "Type-swap M_R matrix JSON");
  eval_cmd->add_option("--sample-other", eval.sample_other,
                       "Sample N Other predictions for review");
  eval_cmd->add_option("--substituted-dataset", eval.substituted_dataset);
  eval_cmd->add_option("--sample-out", eval.sample_out);
  eval_cmd->add_option("--seed", eval.seed, "Required with --sample-other");

  // augment
  struct {
    std::string input, annotations, out, records, manifest, skipped;
    std::optional<std::uint64_t> seed;
    bool allow_mixed = false;
  } aug;
  auto* aug_cmd = app.add_subcommand(
      "augment", "Append corpus-substituted copies to a training set");
  aug_cmd->add_option("--input", aug.input)->required();
  aug_cmd->add_option("--annotations", aug.annotations)->required();
  aug_cmd->add_option("--seed", aug.seed)->required();
  aug_cmd->add_option("--out", aug.out)->required();
  aug_cmd->add_option("--records", aug.records)->required();
  aug_cmd->add_option("--manifest", aug.manifest)->required();
  aug_cmd->add_option("--skipped", aug.skipped);
  aug_cmd->add_flag("--allow-mixed", aug.allow_mixed,
                    "Accept inputs that already contain -sub copies");
  add_parallelism(aug_cmd);

  // report
  struct {
    std::string input, format = "table", out;
  } rep;
  auto* rep_cmd = app.add_subcommand("report", "Render a report as text");
  rep_cmd->add_option("--input", rep.input, "Report or matrix JSON")->required();
  rep_cmd->add_option("--format", rep.format)
      ->check(CLI::IsMember({"table", "matrix"}));
  rep_cmd->add_option("--out", rep.out, "Defaults to standard output");

  std::vector<const char*> argv;
  argv.push_back("kconflict");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (auto chosen = app.get_subcommands(); !chosen.empty()) {
      err << chosen.front()->help();
    } else {
      err << app.help();
    }
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (chosen == annotate_cmd) {
      const Dataset dataset = ReadMrqaFile(annotate.input);
      const EntityCatalog catalog = LoadCatalogOrEmpty(annotate.catalog, err);
      std::optional<AnnotationMap> sidecar;
      if (!annotate.sidecar.empty()) {
        sidecar = IngestAnnotationsFile(annotate.sidecar);
      }
      const AnnotationMap annotations = AnnotateDataset(
          dataset, catalog, sidecar ? &*sidecar : nullptr, parallelism);
      LineWriter writer(annotate.out);
      WriteAnnotations(annotations, writer);
      writer.Close();
      err << "annotated " << annotations.size() << " of " << dataset.size()
          << " instances\n";
    } else if (chosen == filter_cmd) {
      const Dataset dataset = ReadMrqaFile(filter.input);
      const AnnotationMap annotations = IngestAnnotationsFile(filter.annotations);
      const FilterResult result =
          FilterEntityInstances(dataset, annotations, parallelism);
      WriteMrqaFile(result.kept, filter.out);
      if (!filter.skipped.empty()) WriteSkipped(result.skipped, filter.skipped);
      err << "kept " << result.kept.size() << ", skipped "
          << result.skipped.size() << "\n";
    } else if (chosen == sub_cmd) {
      const PolicyKind kind = *ParsePolicyKind(sub.policy);
      SubstitutionPolicy policy{kind, {}, {}};
      Require(kind == PolicyKind::kTypeSwap || sub.target_type.empty(),
              "--target-type is only valid with --policy type-swap");
      Require(kind == PolicyKind::kPopularity ||
                  (!sub.pop_lower && !sub.pop_upper),
              "--pop-lower/--pop-upper are only valid with --policy popularity");
      if (kind == PolicyKind::kTypeSwap && !sub.target_type.empty()) {
        policy.target_type = ParseTypeFlag(sub.target_type, "--target-type");
      }
      if (kind == PolicyKind::kPopularity) {
        Require(sub.pop_lower.has_value(),
                "--policy popularity requires --pop-lower");
        policy.range = PopularityRange{*sub.pop_lower, sub.pop_upper};
        Require(policy.range.IsValid(), "--pop-lower must be < --pop-upper");
      }
      Require((kind != PolicyKind::kPopularity && kind != PolicyKind::kAlias) ||
                  !sub.catalog.empty(),
              "--policy " + sub.policy + " requires --catalog");
      const Dataset dataset = ReadMrqaFile(sub.input);
      const AnnotationMap annotations = IngestAnnotationsFile(sub.annotations);
      const EntityCatalog catalog = LoadCatalogOrEmpty(sub.catalog, err);
      const AnswerPool pool = LoadPool(sub.pool, dataset, annotations);
      const SubstitutionResult result = SubstituteDataset(
          dataset, annotations, policy, pool, catalog, *sub.seed, parallelism);
      WriteMrqaFile(result.dataset, sub.out);
      WriteRecordsFile(result.records, sub.records);
      if (!sub.skipped.empty()) WriteSkipped(result.skipped, sub.skipped);
      if (!sub.manifest.empty()) {
        nlohmann::json manifest = {{"command", "substitute"},
                                   {"policy", sub.policy},
                                   {"seed", *sub.seed},
                                   {"input", sub.input},
                                   {"n_input", dataset.size()},
                                   {"n_substituted", result.records.size()},
                                   {"n_skipped", result.skipped.size()}};
        if (policy.target_type) {
          manifest["target_type"] = std::string(EntityTypeName(*policy.target_type));
        }
        if (kind == PolicyKind::kPopularity) {
          manifest["pop_lower"] = policy.range.lower;
          manifest["pop_upper"] = policy.range.upper
                                      ? nlohmann::json(*policy.range.upper)
                                      : nlohmann::json(nullptr);
        }
        WriteJsonFile(manifest, sub.manifest);
      }
      err << "substituted " << result.records.size() << ", skipped "
          << result.skipped.size() << "\n";
    } else if (chosen == suite_cmd) {
      const EntityType type = ParseTypeFlag(suite.type, "--type");
      const Dataset dataset = ReadMrqaFile(suite.input);
      const AnnotationMap annotations = IngestAnnotationsFile(suite.annotations);
      const EntityCatalog catalog = LoadCatalogOrEmpty(suite.catalog, err);
      const auto entries = GeneratePopularitySuite(
          dataset, annotations, catalog, type, suite.buckets, *suite.seed,
          parallelism);
      std::filesystem::create_directories(suite.out_dir);
      nlohmann::json buckets = nlohmann::json::array();
      for (const auto& entry : entries) {
        const std::string stem =
            suite.out_dir + "/bucket_" + std::to_string(entry.bucket.index);
        WriteMrqaFile(entry.result.dataset, stem + ".jsonl.gz");
        WriteRecordsFile(entry.result.records, stem + ".records.jsonl");
        buckets.push_back(
            {{"index", entry.bucket.index},
             {"lower", entry.bucket.range.lower},
             {"upper", entry.bucket.range.upper
                           ? nlohmann::json(*entry.bucket.range.upper)
                           : nlohmann::json(nullptr)},
             {"member_count", entry.bucket.member_count},
             {"n_substituted", entry.result.records.size()},
             {"n_skipped", entry.result.skipped.size()}});
      }
      WriteJsonFile({{"command", "popularity-suite"},
                     {"type", suite.type},
                     {"seed", *suite.seed},
                     {"input", suite.input},
                     {"buckets", buckets}},
                    suite.out_dir + "/manifest.json");
      err << "wrote " << entries.size() << " buckets to " << suite.out_dir
          << "\n";
    } else if (chosen == split_cmd) {
      const OverlapSplit result =
          SplitAnswerOverlap(ReadMrqaFile(split.dev), ReadMrqaFile(split.train));
      WriteMrqaFile(result.ao, split.ao_out);
      WriteMrqaFile(result.nao, split.nao_out);
      err << "AO " << result.ao.size() << ", NAO " << result.nao.size() << "\n";
    } else if (chosen == eval_cmd) {
      Require(eval.records.size() == eval.substituted_predictions.size(),
              "--records and --substituted-predictions must pair up");
      Require(eval.sample_other == 0 || eval.seed.has_value(),
              "--sample-other requires --seed");
      Require(eval.sample_other == 0 ||
                  (!eval.sample_out.empty() && !eval.substituted_dataset.empty() &&
                   eval.records.size() == 1),
              "--sample-other needs --sample-out, --substituted-dataset and a "
              "single --records file");
      const Dataset dataset = ReadMrqaFile(eval.dataset);
      const PredictionMap original = ReadPredictionsFile(eval.original_predictions);
      std::vector<std::vector<SubstitutionRecord>> records;
      std::vector<PredictionMap> predictions;
      for (std::size_t i = 0; i < eval.records.size(); ++i) {
        records.push_back(ReadRecordsFile(eval.records[i]));
        predictions.push_back(ReadPredictionsFile(eval.substituted_predictions[i]));
      }
      std::vector<SubstitutedRun> runs;
      for (std::size_t i = 0; i < records.size(); ++i) {
        runs.push_back({&records[i], &predictions[i]});
      }
      const Stratification by =
          eval.stratify == "bucket"      ? Stratification::kBucket
          : eval.stratify == "type-pair" ? Stratification::kTypePair
                                         : Stratification::kNone;
      const auto scored = ScoreRecords(original, dataset, runs);
      const EvalReport report = Aggregate(scored, by);
      WriteJsonFile(ReportToJson(report), eval.out);
      if (!eval.matrix_out.empty()) {
        const TypeSwapGrid grid = TypeSwapMatrix(ReportsByTypePair(scored));
        nlohmann::json matrix = nlohmann::json::object();
        for (EntityType from : kAllEntityTypes) {
          nlohmann::json row = nlohmann::json::object();
          for (EntityType to : kAllEntityTypes) {
            const auto& cell = grid[Index(from)][Index(to)];
            row[std::string(EntityTypeName(to))] =
                cell ? nlohmann::json(*cell) : nlohmann::json(nullptr);
          }
          matrix[std::string(EntityTypeName(from))] = row;
        }
        WriteJsonFile({{"memorization_ratio_matrix", matrix}}, eval.matrix_out);
      }
      if (eval.sample_other > 0) {
        Rng rng(*eval.seed);
        const auto samples = SampleOtherPredictions(
            original, predictions.front(), dataset,
            ReadMrqaFile(eval.substituted_dataset), records.front(),
            eval.sample_other, rng);
        LineWriter writer(eval.sample_out);
        for (const auto& s : samples) writer.Write(DumpJson(OtherSampleToJson(s)));
        writer.Close();
      }
      const auto mr = report.memorization_ratio();
      err << "evaluated " << report.n_total << " (" << report.n_correct_on_original
          << " correct on original), M_R = "
          << (mr ? std::to_string(*mr) : std::string("n/a")) << "\n";
    } else if (chosen == aug_cmd) {
      const Dataset train = ReadMrqaFile(aug.input);
      if (!aug.allow_mixed && HasSubstitutedCopies(train)) {
        err << "error: " << aug.input
            << " already contains -sub copies (pass --allow-mixed to proceed)\n";
        return 1;
      }
      const AnnotationMap annotations = IngestAnnotationsFile(aug.annotations);
      const AnswerPool pool = AnswerPool::Build(
          FilterEntityInstances(train, annotations).kept, annotations);
      const MixedTrainingSet mixed =
          BuildMixedTraining(train, annotations, pool, *aug.seed, parallelism);
      WriteMrqaFile(mixed.dataset, aug.out);
      WriteRecordsFile(mixed.records, aug.records);
      nlohmann::json manifest = ManifestToJson(mixed.manifest);
      manifest["command"] = "augment";
      manifest["input"] = aug.input;
      WriteJsonFile(manifest, aug.manifest);
      if (!aug.skipped.empty()) WriteSkipped(mixed.skipped, aug.skipped);
      err << "mixed set: " << mixed.manifest.n_original << " originals + "
          << mixed.manifest.n_substituted << " copies\n";
    } else if (chosen == rep_cmd) {
      LineReader lines(rep.input);
      std::string text, line;
      while (lines.Next(line)) text += line + "\n";
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kParse, rep.input + ": " + e.what());
      }
      std::string rendered;
      if (rep.format == "matrix") {
        TypeSwapGrid grid{};
        const auto& m = j.contains("memorization_ratio_matrix")
                            ? j["memorization_ratio_matrix"]
                            : j;
        for (EntityType from : kAllEntityTypes) {
          for (EntityType to : kAllEntityTypes) {
            const std::string f(EntityTypeName(from)), t(EntityTypeName(to));
            if (m.contains(f) && m[f].contains(t) && m[f][t].is_number()) {
              grid[Index(from)][Index(to)] = m[f][t].get<double>();
            }
          }
        }
        if (!j.contains("memorization_ratio_matrix")) {
          grid = TypeSwapMatrix(TypePairReportsFromStrata(ReportFromJson(j)));
        }
        rendered = RenderTypeSwapMatrix(grid);
      } else {
        rendered = RenderReportTable(ReportFromJson(j));
      }
      if (rep.out.empty()) {
        out << rendered;
      } else {
        std::ofstream file(rep.out, std::ios::binary | std::ios::trunc);
        file << rendered;
        if (!file) throw Error(ErrorCode::kIo, "write failed on " + rep.out);
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << chosen->help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace kconflict::cli

#endif  // KCONFLICT_TOOLS_CLI_HPP_
