// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// Dataset manifests bind prompts, condition (text) embeddings, reference
// image embeddings, per-model generated embeddings and optional human
// preference values. Schema:
//
//   {
//     "dataset": "name",
//     "prompts": [{"id": "p0", "text": "...", "group": "g0"?}, ...],
//     "text_embeddings": "text.emb1",
//     "reference_embeddings": "reference.emb1",
//     "clip_text_embeddings": "clip_text.emb1",            (optional)
//     "models": [{"id": "m", "embeddings": "m.emb1",
//                 "clip_embeddings": "m_clip.emb1",         (optional)
//                 "sample_scores": [{"metric": "ImageReward",
//                                    "direction": "higher",
//                                    "values": [...] | "path": "s.emb1"}]}],
//     "human": {"kind": "rate" | "elo", "values": {"m": 80.87, ...}},  (optional)
//     "backbones": {"image": "...", "text": "..."}
//   }
//
// Relative paths resolve against the manifest's directory. Every embedding
// file must have one row per prompt.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfred/direction.hpp"
#include "cfred/rank_eval.hpp"

namespace cfred {

struct Prompt {
  std::string id;
  std::string text;
  std::optional<std::string> group;
};

struct SampleScoreSeries {
  std::string metric;
  Direction direction = Direction::kHigherBetter;
  std::vector<double> values;  // one per prompt
};

struct ModelEntry {
  std::string id;
  std::filesystem::path embeddings;
  std::optional<std::filesystem::path> clip_embeddings;
  std::vector<SampleScoreSeries> sample_scores;
};

struct HumanBlock {
  HumanKind kind = HumanKind::kRate;
  std::vector<double> values;  // aligned with DatasetManifest::models
};

struct Backbones {
  std::string image;
  std::string text;
};

struct DatasetManifest {
  std::string dataset;
  std::vector<Prompt> prompts;
  std::filesystem::path text_embeddings;
  std::filesystem::path reference_embeddings;
  std::optional<std::filesystem::path> clip_text_embeddings;
  std::vector<ModelEntry> models;
  std::optional<HumanBlock> human;
  Backbones backbones;

  std::vector<std::string> model_ids() const;
  bool has_groups() const;
  std::optional<HumanColumn> human_column() const;
};

/// Parses and fully validates, including every row-count cross-check.
/// Throws ManifestError (or FormatError for unreadable embeddings).
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Same as load_manifest for an in-memory document; relative paths resolve
/// against `base_dir`.
DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir);

/// Serialises with paths relative to `base_dir` where possible.
std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& base_dir);

}  // namespace cfred
