// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cfred/emb_io.hpp"
#include "cfred/error.hpp"

namespace cfred {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ManifestError(where + ": missing required key '" + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ManifestError(where + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void check_rows(const std::filesystem::path& path, std::size_t expected,
                const std::string& owner) {
  if (!std::filesystem::exists(path)) {
    throw ManifestError(owner + ": file not found: " + path.string());
  }
  const auto [rows, cols] = read_embedding_shape(path);
  (void)cols;
  if (rows != expected) {
    throw ManifestError(owner + ": row-count mismatch in " + path.string() +
                        ": expected " + std::to_string(expected) + " rows (one per prompt), got " +
                        std::to_string(rows));
  }
}

std::uint64_t cols_of(const std::filesystem::path& path) {
  return read_embedding_shape(path).second;
}

SampleScoreSeries parse_series(const json& j, const std::filesystem::path& base,
                               std::size_t n_prompts, const std::string& where) {
  SampleScoreSeries s;
  s.metric = require_string(j, "metric", where);
  const std::string owner = where + " metric '" + s.metric + "'";
  s.direction = parse_direction(require_string(j, "direction", owner));
  const bool has_values = j.contains("values");
  const bool has_path = j.contains("path");
  if (has_values == has_path) {
    throw ManifestError(owner + ": give exactly one of 'values' or 'path'");
  }
  if (has_values) {
    if (!j.at("values").is_array()) {
      throw ManifestError(owner + ": 'values' must be an array");
    }
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) throw ManifestError(owner + ": non-numeric sample score");
      s.values.push_back(v.get<double>());
    }
    if (s.values.size() != n_prompts) {
      throw ManifestError(owner + ": row-count mismatch: expected " +
                          std::to_string(n_prompts) + " sample scores, got " +
                          std::to_string(s.values.size()));
    }
  } else {
    const auto path = resolve(base, j.at("path").get<std::string>());
    check_rows(path, n_prompts, owner);
    const FeatureMatrix m = read_embedding(path);
    if (m.cols() != 1) {
      throw ManifestError(owner + ": sample score file must have exactly 1 column");
    }
    for (float v : m.data()) s.values.push_back(v);
  }
  return s;
}

DatasetManifest parse_document(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ManifestError("manifest: top level must be an object");
  DatasetManifest m;
  m.dataset = require_string(doc, "dataset", "manifest");

  const json& prompts = require(doc, "prompts", "manifest");
  if (!prompts.is_array() || prompts.empty()) {
    throw ManifestError("manifest: 'prompts' must be a non-empty array");
  }
  std::set<std::string> prompt_ids;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const std::string where = "prompt " + std::to_string(i);
    Prompt p;
    p.id = require_string(prompts[i], "id", where);
    p.text = require_string(prompts[i], "text", where);
    if (prompts[i].contains("group")) p.group = require_string(prompts[i], "group", where);
    if (!prompt_ids.insert(p.id).second) {
      throw ManifestError("manifest: duplicate prompt id '" + p.id + "'");
    }
    m.prompts.push_back(std::move(p));
  }
  const std::size_t n = m.prompts.size();
  std::size_t grouped = 0;
  for (const auto& p : m.prompts) grouped += p.group.has_value();
  if (grouped != 0 && grouped != n) {
    throw ManifestError("manifest: either every prompt has a 'group' or none does");
  }

  m.text_embeddings = resolve(base, require_string(doc, "text_embeddings", "manifest"));
  check_rows(m.text_embeddings, n, "text_embeddings");
  m.reference_embeddings =
      resolve(base, require_string(doc, "reference_embeddings", "manifest"));
  check_rows(m.reference_embeddings, n, "reference_embeddings");
  if (doc.contains("clip_text_embeddings")) {
    m.clip_text_embeddings =
        resolve(base, require_string(doc, "clip_text_embeddings", "manifest"));
    check_rows(*m.clip_text_embeddings, n, "clip_text_embeddings");
  }
  const auto image_dim = cols_of(m.reference_embeddings);

  const json& models = require(doc, "models", "manifest");
  if (!models.is_array() || models.empty()) {
    throw ManifestError("manifest: 'models' must be a non-empty array");
  }
  std::set<std::string> model_ids;
  for (std::size_t i = 0; i < models.size(); ++i) {
    ModelEntry e;
    e.id = require_string(models[i], "id", "model " + std::to_string(i));
    const std::string where = "model '" + e.id + "'";
    if (!model_ids.insert(e.id).second) {
      throw ManifestError("manifest: duplicate model id '" + e.id + "'");
    }
    e.embeddings = resolve(base, require_string(models[i], "embeddings", where));
    check_rows(e.embeddings, n, where);
    if (cols_of(e.embeddings) != image_dim) {
      throw ManifestError(where + ": embedding dimension " +
                          std::to_string(cols_of(e.embeddings)) +
                          " differs from reference dimension " + std::to_string(image_dim));
    }
    if (models[i].contains("clip_embeddings")) {
      e.clip_embeddings = resolve(base, require_string(models[i], "clip_embeddings", where));
      check_rows(*e.clip_embeddings, n, where + " clip_embeddings");
    }
    if (models[i].contains("sample_scores")) {
      const json& series = models[i].at("sample_scores");
      if (!series.is_array()) throw ManifestError(where + ": 'sample_scores' must be an array");
      std::set<std::string> metrics;
      for (const auto& s : series) {
        e.sample_scores.push_back(parse_series(s, base, n, where));
        if (!metrics.insert(e.sample_scores.back().metric).second) {
          throw ManifestError(where + ": duplicate sample score metric '" +
                              e.sample_scores.back().metric + "'");
        }
      }
    }
    m.models.push_back(std::move(e));
  }

  // Sample-score metrics must be reported by every model with one direction.
  std::map<std::string, Direction> first;
  for (const auto& s : m.models.front().sample_scores) first[s.metric] = s.direction;
  for (const auto& e : m.models) {
    std::map<std::string, Direction> mine;
    for (const auto& s : e.sample_scores) mine[s.metric] = s.direction;
    if (mine != first) {
      throw ManifestError("model '" + e.id +
                          "': sample_scores must list the same metrics and directions "
                          "as model '" + m.models.front().id + "'");
    }
  }

  if (doc.contains("human")) {
    const json& h = doc.at("human");
    HumanBlock block;
    block.kind = [&] {
      try {
        return parse_human_kind(require_string(h, "kind", "human"));
      } catch (const ManifestError&) {
        throw;
      } catch (const DataError& e) {
        throw ManifestError(std::string("human: ") + e.what());
      }
    }();
    const json& values = require(h, "values", "human");
    if (!values.is_object()) throw ManifestError("human: 'values' must be an object");
    for (const auto& [key, _] : values.items()) {
      if (!model_ids.count(key)) {
        throw ManifestError("human: value for unknown model '" + key + "'");
      }
    }
    for (const auto& e : m.models) {
      if (!values.contains(e.id) || !values.at(e.id).is_number()) {
        throw ManifestError("human: missing numeric value for model '" + e.id + "'");
      }
      block.values.push_back(values.at(e.id).get<double>());
    }
    m.human = std::move(block);
  }

  const json& bb = require(doc, "backbones", "manifest");
  m.backbones.image = require_string(bb, "image", "backbones");
  m.backbones.text = require_string(bb, "text", "backbones");
  return m;
}

std::string relative_or_absolute(const std::filesystem::path& p,
                                 const std::filesystem::path& base) {
  std::error_code ec;
  const auto rel = std::filesystem::relative(p, base, ec);
  if (ec || rel.empty() || rel.native().starts_with("..")) return p.string();
  return rel.generic_string();
}

}  // namespace

std::vector<std::string> DatasetManifest::model_ids() const {
  std::vector<std::string> ids;
  for (const auto& e : models) ids.push_back(e.id);
  return ids;
}

bool DatasetManifest::has_groups() const {
  return !prompts.empty() && prompts.front().group.has_value();
}

std::optional<HumanColumn> DatasetManifest::human_column() const {
  if (!human) return std::nullopt;
  return HumanColumn{model_ids(), human->values, human->kind};
}

DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    return parse_document(doc, base_dir);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestError("cannot open manifest '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.parent_path());
}

std::string manifest_to_json(const DatasetManifest& m,
                             const std::filesystem::path& base_dir) {
  nlohmann::ordered_json doc;
  doc["dataset"] = m.dataset;
  doc["prompts"] = nlohmann::ordered_json::array();
  for (const auto& p : m.prompts) {
    nlohmann::ordered_json jp;
    jp["id"] = p.id;
    jp["text"] = p.text;
    if (p.group) jp["group"] = *p.group;
    doc["prompts"].push_back(std::move(jp));
  }
  doc["text_embeddings"] = relative_or_absolute(m.text_embeddings, base_dir);
  doc["reference_embeddings"] = relative_or_absolute(m.reference_embeddings, base_dir);
  if (m.clip_text_embeddings) {
    doc["clip_text_embeddings"] = relative_or_absolute(*m.clip_text_embeddings, base_dir);
  }
  doc["models"] = nlohmann::ordered_json::array();
  for (const auto& e : m.models) {
    nlohmann::ordered_json jm;
    jm["id"] = e.id;
    jm["embeddings"] = relative_or_absolute(e.embeddings, base_dir);
    if (e.clip_embeddings) {
      jm["clip_embeddings"] = relative_or_absolute(*e.clip_embeddings, base_dir);
    }
    if (!e.sample_scores.empty()) {
      jm["sample_scores"] = nlohmann::ordered_json::array();
      for (const auto& s : e.sample_scores) {
        nlohmann::ordered_json js;
        js["metric"] = s.metric;
        js["direction"] = to_string(s.direction);
        js["values"] = s.values;
        jm["sample_scores"].push_back(std::move(js));
      }
    }
    doc["models"].push_back(std::move(jm));
  }
  if (m.human) {
    nlohmann::ordered_json jh;
    jh["kind"] = to_string(m.human->kind);
    jh["values"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < m.models.size(); ++i) {
      jh["values"][m.models[i].id] = m.human->values[i];
    }
    doc["human"] = std::move(jh);
  }
  doc["backbones"] = {{"image", m.backbones.image}, {"text", m.backbones.text}};
  return doc.dump(2) + "\n";
}

}  // namespace cfred
