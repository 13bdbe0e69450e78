// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// JSON inputs of the column-level subcommands and synthetic dataset export.

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cfred/emb_io.hpp"
#include "cfred/error.hpp"
#include "cfred/harness.hpp"
#include "cfred/synth.hpp"

namespace cfred {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DataError(where + ": missing required key '" + key + "'");
  }
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw DataError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw DataError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw DataError(where + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> string_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw DataError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw DataError(where + " must contain only strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

Eigen::VectorXd vector_field(const json& obj, const char* key, const std::string& where) {
  const auto v = number_array(field(obj, key, where), where + "." + key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_field(const json& obj, const char* key, const std::string& where) {
  const json& rows = field(obj, key, where);
  const std::string name = where + "." + key;
  if (!rows.is_array() || rows.empty()) throw DataError(name + " must be a non-empty array");
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = number_array(rows[r], name + " row " + std::to_string(r));
    if (r == 0) m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(row.size()));
    if (row.size() != static_cast<std::size_t>(m.cols())) {
      throw DataError(name + " is ragged at row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return m;
}

Direction direction_field(const json& obj, const std::string& where) {
  try {
    return parse_direction(string_field(obj, "direction", where));
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
}

template <typename F>
auto guarded(const char* what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

bool safe_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return id != "." && id != "..";
}

}  // namespace

ScoreColumns parse_score_columns(const std::string& text) {
  const json doc = parse_json(text, "score columns");
  return guarded("score columns", [&] {
    ScoreColumns out;
    if (doc.contains("dataset")) out.dataset = string_field(doc, "dataset", "columns");
    out.models = string_array(field(doc, "models", "columns"), "columns.models");
    if (doc.contains("human")) {
      const json& h = doc.at("human");
      HumanColumn human;
      human.model_ids = out.models;
      try {
        human.kind = parse_human_kind(string_field(h, "kind", "human"));
      } catch (const DataError& e) {
        throw DataError(std::string("human: ") + e.what());
      }
      human.preference = number_array(field(h, "values", "human"), "human.values");
      if (human.preference.size() != out.models.size()) {
        throw DataError("human.values has " + std::to_string(human.preference.size()) +
                        " entries for " + std::to_string(out.models.size()) + " models");
      }
      out.human = std::move(human);
    }
    if (doc.contains("metrics")) {
      for (const auto& m : doc.at("metrics")) {
        MetricColumn c;
        c.name = string_field(m, "name", "metric");
        const std::string where = "metric '" + c.name + "'";
        c.direction = direction_field(m, where);
        c.scores = number_array(field(m, "scores", where), where + " scores");
        if (c.scores.size() != out.models.size()) {
          throw DataError(where + " has " + std::to_string(c.scores.size()) + " scores for " +
                          std::to_string(out.models.size()) + " models");
        }
        out.metrics.push_back(std::move(c));
      }
    }
    if (doc.contains("sample_metrics")) {
      for (const auto& m : doc.at("sample_metrics")) {
        const std::string name = string_field(m, "name", "sample metric");
        const std::string where = "sample metric '" + name + "'";
        const Direction dir = direction_field(m, where);
        const json& rows = field(m, "scores", where);
        if (!rows.is_array()) throw DataError(where + ": 'scores' must be an array of rows");
        std::vector<double> flat;
        for (std::size_t s = 0; s < rows.size(); ++s) {
          const auto row = number_array(rows[s], where + " sample " + std::to_string(s));
          if (row.size() != out.models.size()) {
            throw DataError(where + " sample " + std::to_string(s) + " has " +
                            std::to_string(row.size()) + " scores for " +
                            std::to_string(out.models.size()) + " models");
          }
          flat.insert(flat.end(), row.begin(), row.end());
        }
        out.metrics.push_back(sample_metric_column(
            name, SampleScoreTensor(out.models, rows.size(), std::move(flat)), dir));
      }
    }
    return out;
  });
}

RankingCandidates parse_ranking_candidates(const std::string& text) {
  const json doc = parse_json(text, "win-rate input");
  return guarded("win-rate input", [&] {
    RankingCandidates out;
    out.models = string_array(field(doc, "models", "winrate"), "winrate.models");
    out.truth = number_array(field(doc, "truth", "winrate"), "winrate.truth");
    if (out.truth.size() != out.models.size()) {
      throw DataError("winrate.truth must have one rank per model");
    }
    const json& cands = field(doc, "candidates", "winrate");
    if (!cands.is_array()) throw DataError("winrate.candidates must be an array");
    for (const auto& c : cands) {
      out.names.push_back(string_field(c, "name", "candidate"));
      const std::string where = "candidate '" + out.names.back() + "'";
      out.ranks.push_back(number_array(field(c, "ranks", where), where + " ranks"));
      if (out.ranks.back().size() != out.models.size()) {
        throw DataError(where + " must have one rank per model");
      }
    }
    return out;
  });
}

CorrelationGrid parse_correlation_grid(const std::string& text) {
  const json doc = parse_json(text, "correlation grid");
  return guarded("correlation grid", [&] {
    CorrelationGrid g;
    g.image_backbones = string_array(field(doc, "image_backbones", "grid"), "grid.image_backbones");
    g.text_backbones = string_array(field(doc, "text_backbones", "grid"), "grid.text_backbones");
    const json& rows = field(doc, "values", "grid");
    if (!rows.is_array() || rows.size() != g.image_backbones.size()) {
      throw DataError("grid.values must have one row per image backbone");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || rows[i].size() != g.text_backbones.size()) {
        throw DataError("grid.values row " + std::to_string(i) +
                        " must have one entry per text backbone");
      }
      for (const auto& v : rows[i]) {
        if (v.is_null()) {
          g.values.emplace_back();
        } else if (v.is_number()) {
          g.values.emplace_back(v.get<double>());
        } else {
          throw DataError("grid.values row " + std::to_string(i) + " holds a non-number");
        }
      }
    }
    validate(g);
    return g;
  });
}

std::vector<BackboneAttribute> parse_backbone_attributes(const std::string& text) {
  const json doc = parse_json(text, "backbone attributes");
  return guarded("backbone attributes", [&] {
    if (!doc.is_array()) throw DataError("backbone attributes must be an array");
    std::vector<BackboneAttribute> out;
    for (const auto& a : doc) {
      BackboneAttribute b;
      b.id = string_field(a, "id", "attribute");
      const std::string where = "attribute '" + b.id + "'";
      b.training_data = string_field(a, "training_data", where);
      b.model_size = string_field(a, "model_size", where);
      const json& size = field(a, "image_size", where);
      const json& dim = field(a, "feature_dim", where);
      if (!size.is_number_integer() || !dim.is_number_integer()) {
        throw DataError(where + ": image_size and feature_dim must be integers");
      }
      b.image_size = size.get<int>();
      b.feature_dim = dim.get<int>();
      if (a.contains("zero_shot") && !a.at("zero_shot").is_null()) {
        if (!a.at("zero_shot").is_number()) throw DataError(where + ": zero_shot must be a number");
        b.zero_shot = a.at("zero_shot").get<double>();
      }
      validate(b);
      out.push_back(std::move(b));
    }
    return out;
  });
}

// ---------------------------------------------------------------------------

namespace {

struct SynthModel {
  std::string id;
  FeatureMatrix embeddings;
  double analytic_fd;
  double analytic_cfred;
  std::optional<double> human;
};

struct SynthOutput {
  std::string dataset;
  FeatureMatrix text;
  FeatureMatrix reference;
  std::vector<SynthModel> models;
  std::vector<std::optional<std::string>> groups;  // per row
};

SynthOutput synth_joint(const json& doc, std::optional<std::uint64_t> seed_override) {
  const auto n_field = field(doc, "n", "synth");
  if (!n_field.is_number_unsigned() || n_field.get<std::uint64_t>() < 2) {
    throw DataError("synth: 'n' must be an integer >= 2");
  }
  const std::size_t n = n_field.get<std::size_t>();
  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw DataError("synth: 'seed' must be >= 0");
    seed = doc.at("seed").get<std::uint64_t>();
  }
  if (seed_override) seed = *seed_override;

  const json& cond = field(doc, "condition", "synth");
  const json& ref = field(doc, "reference", "synth");
  const json& models = field(doc, "models", "synth");
  if (!models.is_array() || models.empty()) {
    throw DataError("synth: 'models' must be a non-empty array");
  }

  const auto spec_for = [&](const json& m, const std::string& where) {
    JointGaussianSpec s;
    s.mean_x = vector_field(cond, "mean", "condition");
    s.cov_xx = matrix_field(cond, "cov", "condition");
    s.mean_y = vector_field(ref, "mean", "reference");
    s.cov_yy = matrix_field(ref, "cov", "reference");
    s.cov_yx = matrix_field(ref, "cross", "reference");
    s.mean_yhat = vector_field(m, "mean", where);
    s.cov_yhat = matrix_field(m, "cov", where);
    s.cov_yhat_x = matrix_field(m, "cross", where);
    s.seed = seed;
    return s;
  };

  std::optional<SampleTriple> base;
  SynthOutput out{doc.value("dataset", std::string("synthetic")), FeatureMatrix{{0.0f}},
                  FeatureMatrix{{0.0f}}, {}, {}};
  for (std::size_t j = 0; j < models.size(); ++j) {
    const std::string id = string_field(models[j], "id", "model");
    const std::string where = "model '" + id + "'";
    const JointGaussianSpec spec = spec_for(models[j], where);
    FeatureMatrix gen = FeatureMatrix{{0.0f}};
    if (!base) {
      base = sample_joint(spec, n);
      gen = base->generated;
    } else {
      validate(spec);
      gen = sample_conditional(spec.generated_moments(), base->condition, seed,
                               streams::kGenerated + j);
    }
    std::optional<double> human;
    if (models[j].contains("human")) {
      if (!models[j].at("human").is_number()) throw DataError(where + ": human must be a number");
      human = models[j].at("human").get<double>();
    }
    out.models.push_back(
        SynthModel{id, std::move(gen), analytic_fd(spec), analytic_cfred(spec), human});
  }
  out.text = base->condition;
  out.reference = base->real;
  out.groups.assign(n, std::nullopt);
  return out;
}

SynthOutput synth_swap(const json& doc) {
  const json& k = field(doc, "k", "synth");
  const json& n = field(doc, "n_per_class", "synth");
  if (!k.is_number_unsigned() || !n.is_number_unsigned()) {
    throw DataError("synth: 'k' and 'n_per_class' must be non-negative integers");
  }
  const std::size_t classes = k.get<std::size_t>();
  const std::size_t per = n.get<std::size_t>();
  SwapDataset faithful = make_swap_dataset(classes, per, 0);
  SwapDataset swapped = make_swap_dataset(classes, per, 1);
  // Population moments of class-constant rows: FD ties at 0 and the swap
  // costs ||e_a - e_b||^2 = 2 per condition.
  SynthOutput out{doc.value("dataset", std::string("swap")), faithful.condition,
                  faithful.real, {}, {}};
  out.models.push_back(SynthModel{"faithful", faithful.generated, 0.0, 0.0, std::nullopt});
  out.models.push_back(SynthModel{"swapped", swapped.generated, 0.0, 2.0, std::nullopt});
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per; ++i) out.groups.emplace_back("class" + std::to_string(c));
  }
  return out;
}

}  // namespace

Report synthesize(const std::string& spec_json, std::optional<std::uint64_t> seed,
                  const std::string& out_dir) {
  const json doc = parse_json(spec_json, "synth spec");
  SynthOutput out = guarded("synth spec", [&] {
    const std::string kind = string_field(doc, "kind", "synth");
    if (kind == "joint") return synth_joint(doc, seed);
    if (kind == "swap") return synth_swap(doc);
    throw DataError("synth: unknown kind '" + kind + "' (expected joint or swap)");
  });
  for (const auto& m : out.models) {
    if (!safe_id(m.id)) {
      throw DataError("synth: model id '" + m.id + "' is not usable as a file name");
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());

  DatasetManifest manifest;
  manifest.dataset = out.dataset;
  for (std::size_t i = 0; i < out.text.rows(); ++i) {
    manifest.prompts.push_back(Prompt{"p" + std::to_string(i), "", out.groups[i]});
  }
  manifest.text_embeddings = dir / "text.emb1";
  manifest.reference_embeddings = dir / "reference.emb1";
  write_embedding(manifest.text_embeddings, out.text);
  write_embedding(manifest.reference_embeddings, out.reference);

  Report report;
  report.title = out.dataset;
  report.columns = {"model", "file", "analytic_fd", "analytic_cfred"};
  report.rows.push_back({std::string("-"), std::string("text.emb1"), std::monostate{},
                         std::monostate{}});
  report.rows.push_back({std::string("-"), std::string("reference.emb1"), std::monostate{},
                         std::monostate{}});
  const bool all_human = std::all_of(out.models.begin(), out.models.end(),
                                     [](const SynthModel& m) { return m.human.has_value(); });
  HumanBlock human;
  for (const auto& m : out.models) {
    const std::string file = "model_" + m.id + ".emb1";
    write_embedding(dir / file, m.embeddings);
    manifest.models.push_back(ModelEntry{m.id, dir / file, std::nullopt, {}});
    if (all_human) human.values.push_back(*m.human);
    report.rows.push_back({m.id, file, Fixed{m.analytic_fd, 6}, Fixed{m.analytic_cfred, 6}});
  }
  if (all_human) manifest.human = std::move(human);
  manifest.backbones = Backbones{"synthetic", "synthetic"};

  const fs::path manifest_path = dir / "manifest.json";
  {
    std::ofstream f(manifest_path, std::ios::binary | std::ios::trunc);
    f << manifest_to_json(manifest, dir);
    if (!f) throw DataError("cannot write " + manifest_path.string());
  }
  report.rows.push_back({std::string("-"), std::string("manifest.json"), std::monostate{},
                         std::monostate{}});
  return report;
}

}  // namespace cfred
