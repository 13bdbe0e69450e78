// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "cfred/emb_io.hpp"
#include "cfred/error.hpp"

namespace cfred {

namespace {

constexpr int kValueDecimals = 4;

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
  std::vector<float> data;
  data.reserve(rows.size() * m.cols());
  for (std::size_t r : rows) {
    const auto src = m.row(r);
    data.insert(data.end(), src.begin(), src.end());
  }
  return FeatureMatrix(rows.size(), m.cols(), std::move(data));
}

std::optional<Correlation> try_correlation(const ModelScoreColumn& column,
                                           const HumanColumn& human,
                                           CorrelationMethod method) {
  try {
    return correlation(column, human, method);
  } catch (const UndefinedCorrelationError&) {
    return std::nullopt;
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  }
}

struct GroupIndex {
  std::vector<std::string> labels;               // first-appearance order
  std::vector<std::vector<std::size_t>> rows;
};

GroupIndex index_groups(const DatasetManifest& m) {
  GroupIndex out;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < m.prompts.size(); ++i) {
    const std::string& g = *m.prompts[i].group;
    auto [it, inserted] = slot.emplace(g, out.labels.size());
    if (inserted) {
      out.labels.push_back(g);
      out.rows.emplace_back();
    }
    out.rows[it->second].push_back(i);
  }
  return out;
}

struct ModelScores {
  double fd = 0.0;
  double cfred = 0.0;
  std::optional<double> grouped;
  double cmmd = 0.0;
  std::optional<double> clip;
};

[[noreturn]] void rethrow_with_context(const std::exception_ptr& error,
                                       const std::string& model) {
  const std::string prefix = "model '" + model + "': ";
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    throw Error(e.category(), prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

std::vector<double> mean_scores(const SampleScoreTensor& t) {
  std::vector<double> out(t.models(), 0.0);
  for (std::size_t s = 0; s < t.samples(); ++s) {
    for (std::size_t j = 0; j < t.models(); ++j) out[j] += t.at(s, j);
  }
  for (double& v : out) v /= static_cast<double>(t.samples());
  return out;
}

}  // namespace

MetricColumn sample_metric_column(std::string name, SampleScoreTensor tensor,
                                  Direction direction) {
  MetricColumn c;
  c.name = std::move(name);
  c.direction = direction;
  c.scores = mean_scores(tensor);
  c.rank_basis = aggregate_sample_ranks(tensor, direction).scores;
  c.samples = std::move(tensor);
  return c;
}

RankingTable build_table(const ScoreColumns& columns) {
  const auto& models = columns.models;
  if (models.size() < 2) throw DegenerateInputError("a ranking table needs >= 2 models");
  if (std::set<std::string>(models.begin(), models.end()).size() != models.size()) {
    throw DataError("duplicate model id in table");
  }

  RankingTable table;
  table.dataset = columns.dataset;
  table.models = models;

  std::optional<HumanColumn> human;
  std::vector<double> truth;
  if (columns.human) {
    human = HumanColumn{models,
                        align_to(models, columns.human->model_ids, columns.human->preference),
                        columns.human->kind};
    validate(*human);
    truth = truth_ranks(*human);
    const Ranking r = rank_models({models, human->preference, Direction::kHigherBetter});
    table.human = TableColumn{"Human", Direction::kHigherBetter, human->preference,
                              r.ranks, r.tied, std::nullopt};
    table.human_kind = human->kind;
  }

  for (const auto& m : columns.metrics) {
    if (m.scores.size() != models.size()) {
      throw DimensionError("metric '" + m.name + "' has " + std::to_string(m.scores.size()) +
                           " scores for " + std::to_string(models.size()) + " models");
    }
    const ModelScoreColumn displayed{models, m.scores, m.direction};
    validate(displayed);
    const ModelScoreColumn basis =
        m.rank_basis ? ModelScoreColumn{models, *m.rank_basis, Direction::kLowerBetter}
                     : displayed;
    validate(basis);
    const Ranking r = rank_models(basis);
    TableColumn col{m.name, m.direction, m.scores, r.ranks, r.tied, std::nullopt};
    if (human) {
      ColumnFooter f;
      f.pearson = try_correlation(displayed, *human, CorrelationMethod::kPearson);
      f.spearman = try_correlation(displayed, *human, CorrelationMethod::kSpearman);
      f.rank_accuracy = rank_accuracy(fractional_ranks(basis.scores, basis.direction), truth);
      if (m.samples) {
        if (m.samples->model_ids() != models) {
          throw DataError("sample scores of '" + m.name + "' are not in table model order");
        }
        f.per_item_rank_accuracy = per_item_rank_accuracy(*m.samples, truth, m.direction);
      }
      col.footer = f;
    }
    table.metrics.push_back(std::move(col));
  }
  return table;
}

BenchmarkResult run_benchmark(const DatasetManifest& manifest,
                              const BenchmarkOptions& options) {
  if (options.threads == 0) throw UsageError("threads must be >= 1");
  const auto& models = manifest.models;
  if (models.empty()) throw ManifestError("manifest lists no models");

  const CovarianceDivisor divisor = options.estimator.divisor;
  const FeatureMatrix text = read_embedding(manifest.text_embeddings);
  const FeatureMatrix reference = read_embedding(manifest.reference_embeddings);
  const GaussianMoments ref_moments = accumulate_moments(reference, divisor);
  const JointMoments ref_joint = accumulate_joint_moments(text, reference, divisor);

  const bool clip_files =
      manifest.clip_text_embeddings &&
      std::all_of(models.begin(), models.end(),
                  [](const ModelEntry& e) { return e.clip_embeddings.has_value(); });
  const bool clip_primary = !clip_files && text.cols() == reference.cols();
  std::optional<FeatureMatrix> clip_text;
  if (clip_files) clip_text = read_embedding(*manifest.clip_text_embeddings);

  const bool grouped = options.expectation_form && manifest.has_groups();
  GroupIndex groups;
  std::vector<FeatureMatrix> ref_groups;
  if (grouped) {
    groups = index_groups(manifest);
    for (const auto& rows : groups.rows) ref_groups.push_back(select_rows(reference, rows));
  }

  std::vector<ModelScores> results(models.size());
  std::vector<std::exception_ptr> errors(models.size());
  const auto evaluate = [&](std::size_t i) {
    const FeatureMatrix gen = read_embedding(models[i].embeddings);
    ModelScores& out = results[i];
    out.fd = frechet_distance(ref_moments, accumulate_moments(gen, divisor));
    out.cfred = cfred_unconditional_form(ref_joint, accumulate_joint_moments(text, gen, divisor));
    if (grouped) {
      std::vector<ConditionGroup> parts;
      for (std::size_t g = 0; g < groups.labels.size(); ++g) {
        const auto first = text.row(groups.rows[g].front());
        parts.push_back(ConditionGroup{groups.labels[g],
                                       std::vector<float>(first.begin(), first.end()),
                                       ref_groups[g], select_rows(gen, groups.rows[g])});
      }
      out.grouped = cfred_expectation_form(GroupedDataset(std::move(parts)), options.estimator);
    }
    out.cmmd = cmmd(reference, gen, options.cmmd);
    if (clip_files) {
      out.clip = clipscore(*clip_text, read_embedding(*models[i].clip_embeddings));
    } else if (clip_primary) {
      out.clip = clipscore(text, gen);
    }
  };

  const std::size_t workers = std::min(options.threads, models.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < models.size(); i = next.fetch_add(1)) {
      try {
        evaluate(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (errors[i]) rethrow_with_context(errors[i], models[i].id);
  }

  BenchmarkResult result;
  ScoreColumns& cols = result.columns;
  cols.dataset = manifest.dataset;
  cols.models = manifest.model_ids();
  cols.human = manifest.human_column();

  const auto add = [&](const char* name, Direction dir, auto&& get) {
    MetricColumn c;
    c.name = name;
    c.direction = dir;
    for (const auto& r : results) c.scores.push_back(get(r));
    cols.metrics.push_back(std::move(c));
  };
  add("FD", Direction::kLowerBetter, [](const ModelScores& r) { return r.fd; });
  add("cFreD", Direction::kLowerBetter, [](const ModelScores& r) { return r.cfred; });
  if (grouped) {
    add("cFreD-groups", Direction::kLowerBetter,
        [](const ModelScores& r) { return *r.grouped; });
  }
  add("CMMD", Direction::kLowerBetter, [](const ModelScores& r) { return r.cmmd; });
  if (clip_files || clip_primary) {
    add("CLIPScore", Direction::kHigherBetter, [](const ModelScores& r) { return *r.clip; });
  }

  // Sample-score series are matched by metric name across models; the
  // manifest loader guarantees every model carries the same set.
  for (const auto& series : models.front().sample_scores) {
    const std::size_t n = manifest.prompts.size();
    std::vector<double> values(n * models.size());
    for (std::size_t j = 0; j < models.size(); ++j) {
      const auto& list = models[j].sample_scores;
      const auto it = std::find_if(list.begin(), list.end(), [&](const SampleScoreSeries& s) {
        return s.metric == series.metric;
      });
      if (it->direction != series.direction) {
        throw ManifestError("sample metric '" + series.metric +
                            "' has conflicting directions across models");
      }
      for (std::size_t s = 0; s < n; ++s) values[s * models.size() + j] = it->values[s];
    }
    cols.metrics.push_back(sample_metric_column(
        series.metric, SampleScoreTensor(cols.models, n, std::move(values)), series.direction));
  }

  for (std::size_t i = 0; i < models.size(); ++i) {
    for (const auto& c : cols.metrics) {
      result.reports.push_back(MetricReport{c.name, c.scores[i], c.direction,
                                            manifest.prompts.size(), manifest.backbones.image,
                                            manifest.backbones.text, options.seed});
    }
  }
  result.table = build_table(cols);
  return result;
}

Report score_report(const BenchmarkResult& result) {
  Report r;
  r.title = result.columns.dataset;
  r.columns = {"model",     "metric",         "value",         "direction",
               "n_samples", "image_backbone", "text_backbone", "seed"};
  const std::size_t per_model = result.columns.metrics.size();
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    const MetricReport& m = result.reports[k];
    Cell seed = std::monostate{};
    if (m.seed) seed = static_cast<std::int64_t>(*m.seed);
    r.rows.push_back({result.columns.models[k / per_model], m.metric_name,
                      Fixed{m.value, kValueDecimals}, std::string(to_string(m.direction)),
                      static_cast<std::int64_t>(m.n_samples), m.image_backbone,
                      m.text_backbone, seed});
  }
  return r;
}

// ---------------------------------------------------------------------------

AblationAxis parse_axis(std::string_view text) {
  if (text == "training_data") return AblationAxis::kTrainingData;
  if (text == "image_size") return AblationAxis::kImageSize;
  if (text == "model_size") return AblationAxis::kModelSize;
  if (text == "feature_dim") return AblationAxis::kFeatureDim;
  if (text == "zero_shot") return AblationAxis::kZeroShot;
  throw UsageError("unknown ablation axis '" + std::string(text) +
                   "' (expected training_data, image_size, model_size, feature_dim or "
                   "zero_shot)");
}

const char* to_string(AblationAxis axis) noexcept {
  switch (axis) {
    case AblationAxis::kTrainingData: return "training_data";
    case AblationAxis::kImageSize: return "image_size";
    case AblationAxis::kModelSize: return "model_size";
    case AblationAxis::kFeatureDim: return "feature_dim";
    case AblationAxis::kZeroShot: return "zero_shot";
  }
  return "training_data";
}

const std::vector<std::string>& training_data_buckets() {
  static const std::vector<std::string> buckets{"1M", "10M", "100M", "1B",
                                                "2B", "5B",  "10B",  "other"};
  return buckets;
}

const std::vector<std::string>& model_size_buckets() {
  static const std::vector<std::string> buckets{"Small", "Base",     "Large", "Huge",
                                                "Giant", "Gigantic", "SO",    "other"};
  return buckets;
}

void validate(const BackboneAttribute& a) {
  const auto in = [](const std::vector<std::string>& list, const std::string& v) {
    return std::find(list.begin(), list.end(), v) != list.end();
  };
  if (a.id.empty()) throw DataError("backbone attribute without id");
  if (!in(training_data_buckets(), a.training_data)) {
    throw DataError("backbone '" + a.id + "': unknown training data bucket '" +
                    a.training_data + "'");
  }
  if (!in(model_size_buckets(), a.model_size)) {
    throw DataError("backbone '" + a.id + "': unknown model size '" + a.model_size + "'");
  }
  if (a.image_size < 1) throw DataError("backbone '" + a.id + "': image size must be >= 1");
  if (a.feature_dim < 1) throw DataError("backbone '" + a.id + "': feature dim must be >= 1");
  if (a.zero_shot && !(*a.zero_shot >= 0.0 && *a.zero_shot <= 100.0)) {
    throw DataError("backbone '" + a.id + "': zero-shot accuracy must be in [0, 100]");
  }
}

void validate(const CorrelationGrid& g) {
  if (g.values.size() != g.image_backbones.size() * g.text_backbones.size()) {
    throw DimensionError("correlation grid has " + std::to_string(g.values.size()) +
                         " values for " + std::to_string(g.image_backbones.size()) + "x" +
                         std::to_string(g.text_backbones.size()) + " backbones");
  }
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const auto& v = g.values[i];
    if (v && !(*v >= -1.0 && *v <= 1.0)) {
      throw DataError("correlation grid value at image " +
                      std::to_string(i / g.text_backbones.size()) + ", text " +
                      std::to_string(i % g.text_backbones.size()) + " is outside [-1, 1]");
    }
  }
}

std::vector<BucketStat> ablate(const CorrelationGrid& grid,
                               const std::vector<BackboneAttribute>& attributes,
                               AblationAxis axis) {
  validate(grid);
  std::map<std::string, const BackboneAttribute*> by_id;
  for (const auto& a : attributes) {
    validate(a);
    if (!by_id.emplace(a.id, &a).second) {
      throw DataError("duplicate backbone attribute '" + a.id + "'");
    }
  }

  std::vector<BucketStat> out;
  std::map<std::string, std::size_t> slot;
  const auto bucket_index = [&](const std::string& label) {
    auto it = slot.find(label);
    if (it == slot.end()) {
      it = slot.emplace(label, out.size()).first;
      out.push_back(BucketStat{label, std::nullopt, 0});
    }
    return it->second;
  };
  const auto numeric_label = [](double v, bool integral) {
    char buf[32];
    std::snprintf(buf, sizeof buf, integral ? "%.0f" : "%.2f", v);
    return std::string(buf);
  };

  // Numeric axes are ordered by value, so collect keys before summing.
  std::vector<std::pair<double, std::string>> numeric_keys;
  std::vector<std::optional<std::string>> label_of(grid.image_backbones.size());
  for (std::size_t i = 0; i < grid.image_backbones.size(); ++i) {
    const auto it = by_id.find(grid.image_backbones[i]);
    if (it == by_id.end()) {
      throw DataError("image backbone '" + grid.image_backbones[i] +
                      "' has no attribute record");
    }
    const BackboneAttribute& a = *it->second;
    switch (axis) {
      case AblationAxis::kTrainingData: label_of[i] = a.training_data; break;
      case AblationAxis::kModelSize: label_of[i] = a.model_size; break;
      case AblationAxis::kImageSize:
        label_of[i] = numeric_label(a.image_size, true);
        numeric_keys.emplace_back(a.image_size, *label_of[i]);
        break;
      case AblationAxis::kFeatureDim:
        label_of[i] = numeric_label(a.feature_dim, true);
        numeric_keys.emplace_back(a.feature_dim, *label_of[i]);
        break;
      case AblationAxis::kZeroShot:
        if (a.zero_shot) {
          label_of[i] = numeric_label(*a.zero_shot, false);
          numeric_keys.emplace_back(*a.zero_shot, *label_of[i]);
        }
        break;
    }
  }
  if (axis == AblationAxis::kTrainingData) {
    for (const auto& b : training_data_buckets()) bucket_index(b);
  } else if (axis == AblationAxis::kModelSize) {
    for (const auto& b : model_size_buckets()) bucket_index(b);
  } else {
    std::sort(numeric_keys.begin(), numeric_keys.end());
    for (const auto& k : numeric_keys) bucket_index(k.second);
  }

  std::vector<double> sums(out.size(), 0.0);
  for (std::size_t i = 0; i < grid.image_backbones.size(); ++i) {
    if (!label_of[i]) continue;
    const std::size_t b = slot.at(*label_of[i]);
    for (std::size_t t = 0; t < grid.text_backbones.size(); ++t) {
      if (const auto& v = grid.at(i, t)) {
        sums[b] += *v;
        ++out[b].count;
      }
    }
  }
  for (std::size_t b = 0; b < out.size(); ++b) {
    if (out[b].count > 0) out[b].mean = sums[b] / static_cast<double>(out[b].count);
  }
  return out;
}

Report ablation_report(const std::vector<BucketStat>& buckets, AblationAxis axis) {
  Report r;
  r.title = std::string("ablation by ") + to_string(axis);
  r.columns = {to_string(axis), "mean", "count"};
  for (const auto& b : buckets) {
    Cell mean = std::string("NA");
    if (b.mean) mean = Fixed{*b.mean, kValueDecimals};
    r.rows.push_back({b.bucket, mean, static_cast<std::int64_t>(b.count)});
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

const MetricColumn& find_metric(const ScoreColumns& columns, const std::string& name) {
  for (const auto& m : columns.metrics) {
    if (m.name == name) return m;
  }
  throw UsageError("no metric column named '" + name + "'");
}

const HumanColumn& require_human(const ScoreColumns& columns) {
  if (!columns.human) throw DataError("input has no human preference column");
  return *columns.human;
}

}  // namespace

Report correlation_report(const ScoreColumns& columns, const std::string& metric,
                          const std::string& against) {
  const MetricColumn& m = find_metric(columns, metric);
  const ModelScoreColumn column{columns.models, m.scores, m.direction};
  HumanColumn target;
  if (against == "human") {
    target = require_human(columns);
  } else {
    // Another metric acts as the reference after aligning it to higher-better.
    const MetricColumn& other = find_metric(columns, against);
    target.model_ids = columns.models;
    for (double s : other.scores) {
      target.preference.push_back(other.direction == Direction::kLowerBetter ? -s : s);
    }
  }
  Report r;
  r.title = metric + " vs " + against;
  r.columns = {"metric", "against", "method", "rho", "rho^2", "n"};
  for (const auto method : {CorrelationMethod::kPearson, CorrelationMethod::kSpearman}) {
    const Correlation c = correlation(column, target, method);
    r.rows.push_back({metric, against,
                      std::string(method == CorrelationMethod::kPearson ? "pearson"
                                                                        : "spearman"),
                      Fixed{c.rho, kValueDecimals}, Fixed{c.rho_squared, kValueDecimals},
                      static_cast<std::int64_t>(columns.models.size())});
  }
  return r;
}

Report winrate_report(const RankingCandidates& c) {
  if (c.names.size() != c.ranks.size()) {
    throw DataError("candidate names and rankings differ in count");
  }
  const WinRateReport w = win_rate_matchup(c.ranks, c.truth);
  Report r;
  r.title = "win rate";
  r.columns = {"candidate", "opponent", "win", "lose", "both_good", "both_bad",
               "win_rate", "lose_rate"};
  const auto row = [&](const std::string& a, const std::string& b, const WinRateTally& t) {
    r.rows.push_back({a, b, static_cast<std::int64_t>(t.win),
                      static_cast<std::int64_t>(t.lose),
                      static_cast<std::int64_t>(t.both_good),
                      static_cast<std::int64_t>(t.both_bad),
                      Fixed{t.fraction(t.win), kValueDecimals},
                      Fixed{t.fraction(t.lose), kValueDecimals}});
  };
  for (std::size_t i = 0; i < c.names.size(); ++i) {
    for (std::size_t j = 0; j < c.names.size(); ++j) {
      if (i != j) row(c.names[i], c.names[j], w.matchups[i][j]);
    }
  }
  for (std::size_t i = 0; i < c.names.size(); ++i) row(c.names[i], "*", w.per_candidate[i]);
  return r;
}

Report combo_report(const ScoreColumns& columns, const std::string& metric_a,
                    const std::string& metric_b) {
  const MetricColumn& a = find_metric(columns, metric_a);
  const MetricColumn& b = find_metric(columns, metric_b);
  const LinearCombo fit =
      fit_linear_combo({columns.models, a.scores, a.direction},
                       {columns.models, b.scores, b.direction}, require_human(columns));
  Report r;
  r.title = metric_a + " + " + metric_b;
  r.columns = {"metric_a", "metric_b", "weight_a", "weight_b", "rank_acc",
               "rank_acc_a", "rank_acc_b"};
  r.rows.push_back({metric_a, metric_b, Fixed{fit.weight_a, 3}, Fixed{fit.weight_b, 3},
                    Fixed{100.0 * fit.accuracy, 1}, Fixed{100.0 * fit.accuracy_a, 1},
                    Fixed{100.0 * fit.accuracy_b, 1}});
  return r;
}

}  // namespace cfred
