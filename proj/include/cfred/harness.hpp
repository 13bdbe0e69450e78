// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// End-to-end orchestration: metric columns from a manifest, ranking tables
// with human-agreement footers, and backbone ablation group-bys.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfred/manifest.hpp"
#include "cfred/metrics.hpp"
#include "cfred/rank_eval.hpp"
#include "cfred/report.hpp"

namespace cfred {

struct BenchmarkOptions {
  std::size_t threads = 1;
  EstimatorConfig estimator;
  CmmdOptions cmmd;
  /// Adds the per-group expectation form when prompts carry groups.
  bool expectation_form = true;
  std::optional<std::uint64_t> seed;  // provenance only
};

/// One metric column ready for ranking. `rank_basis`, when set, is a
/// lower-better column (mean per-sample ranks) that decides R# and rank
/// accuracy while `scores` stay the displayed values.
struct MetricColumn {
  std::string name;
  Direction direction = Direction::kLowerBetter;
  std::vector<double> scores;
  std::optional<std::vector<double>> rank_basis;
  std::optional<SampleScoreTensor> samples;
};

struct ScoreColumns {
  std::string dataset;
  std::vector<std::string> models;
  std::vector<MetricColumn> metrics;
  std::optional<HumanColumn> human;
};

/// Turns a per-sample score tensor into a column: mean raw score for
/// display, mean per-sample rank as the ranking basis.
MetricColumn sample_metric_column(std::string name, SampleScoreTensor tensor,
                                  Direction direction);

RankingTable build_table(const ScoreColumns& columns);

struct BenchmarkResult {
  ScoreColumns columns;
  std::vector<MetricReport> reports;  // model-major, metric order of columns
  RankingTable table;
};

/// Computes FD, cFreD (closed form, plus the expectation form for grouped
/// prompts), CMMD and, when a joint text/image space is available,
/// CLIPScore for every model against the manifest's reference embeddings.
/// Output does not depend on options.threads.
BenchmarkResult run_benchmark(const DatasetManifest& manifest,
                              const BenchmarkOptions& options = {});

/// Flat per-model metric listing with provenance.
Report score_report(const BenchmarkResult& result);

// ---------------------------------------------------------------------------
// Backbone ablations.

enum class AblationAxis { kTrainingData, kImageSize, kModelSize, kFeatureDim, kZeroShot };

AblationAxis parse_axis(std::string_view text);
const char* to_string(AblationAxis axis) noexcept;

/// Documented bucket enumerations for the categorical axes.
const std::vector<std::string>& training_data_buckets();
const std::vector<std::string>& model_size_buckets();

struct BackboneAttribute {
  std::string id;
  std::string training_data;  // one of training_data_buckets()
  int image_size = 0;         // input side length in pixels
  std::string model_size;     // one of model_size_buckets()
  int feature_dim = 0;
  std::optional<double> zero_shot;  // ImageNet-1k zero-shot accuracy, percent
};

void validate(const BackboneAttribute& attribute);

/// Image backbones x text backbones, row-major; absent cells are nullopt.
struct CorrelationGrid {
  std::vector<std::string> image_backbones;
  std::vector<std::string> text_backbones;
  std::vector<std::optional<double>> values;

  const std::optional<double>& at(std::size_t image, std::size_t text) const {
    return values[image * text_backbones.size() + text];
  }
};

void validate(const CorrelationGrid& grid);

struct BucketStat {
  std::string bucket;
  std::optional<double> mean;  // absent for an empty bucket
  std::size_t count = 0;       // grid cells averaged
};

/// Mean over present grid cells whose image backbone falls in each bucket of
/// `axis`. Categorical axes list every enumerated bucket in enumeration
/// order; numeric axes list the observed values in ascending order.
/// Backbones without a zero-shot accuracy are left out of that axis.
std::vector<BucketStat> ablate(const CorrelationGrid& grid,
                               const std::vector<BackboneAttribute>& attributes,
                               AblationAxis axis);

Report ablation_report(const std::vector<BucketStat>& buckets, AblationAxis axis);

// ---------------------------------------------------------------------------
// Reports for the column-level subcommands.

/// Pearson and Spearman (signed and squared) of `metric` against the human
/// column, or against another metric column when `against` names one.
Report correlation_report(const ScoreColumns& columns, const std::string& metric,
                          const std::string& against = "human");

struct RankingCandidates {
  std::vector<std::string> models;
  std::vector<double> truth;
  std::vector<std::string> names;
  std::vector<std::vector<double>> ranks;
};

Report winrate_report(const RankingCandidates& candidates);

Report combo_report(const ScoreColumns& columns, const std::string& metric_a,
                    const std::string& metric_b);

// ---------------------------------------------------------------------------
// JSON inputs of the CLI. Each parser throws DataError with a precise
// message on any schema violation.

ScoreColumns parse_score_columns(const std::string& json_text);
RankingCandidates parse_ranking_candidates(const std::string& json_text);
CorrelationGrid parse_correlation_grid(const std::string& json_text);
std::vector<BackboneAttribute> parse_backbone_attributes(const std::string& json_text);

/// Materialises a synthetic dataset described by a JSON spec ("joint" or
/// "swap" kind) as EMB1 files plus manifest.json under `out_dir`. `seed`
/// overrides the seed in the synth JSON. Returns a summary listing written
/// files and the analytic reference values.
Report synthesize(const std::string& spec_json, std::optional<std::uint64_t> seed,
                  const std::string& out_dir);

}  // namespace cfred
