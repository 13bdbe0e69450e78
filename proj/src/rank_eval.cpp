// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/rank_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "cfred/error.hpp"

namespace cfred {

namespace {

// Higher aligned value = better model.
std::vector<double> aligned(std::span<const double> scores, Direction direction) {
  std::vector<double> out(scores.begin(), scores.end());
  if (direction == Direction::kLowerBetter) {
    for (double& v : out) v = -v;
  }
  return out;
}

std::vector<std::size_t> best_first_order(std::span<const double> scores,
                                          Direction direction) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::kLowerBetter ? scores[a] < scores[b]
                                                : scores[a] > scores[b];
  });
  return order;
}

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw DataError(std::string(what) + ": duplicate model id '" + id + "'");
    }
  }
}

void require_finite(const std::vector<double>& values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError(std::string(what) + ": non-finite value at index " +
                      std::to_string(i));
    }
  }
}

void require_tie_free(std::span<const double> truth) {
  std::vector<double> sorted(truth.begin(), truth.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DataError("ground-truth ranking contains ties");
  }
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<double> zscore_aligned(const ModelScoreColumn& column,
                                   const std::vector<double>& scores) {
  std::vector<double> z = aligned(scores, column.direction);
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) {
    throw DataError("zero-variance column cannot be z-normalised");
  }
  for (double& v : z) v = (v - mean) / sd;
  return z;
}

}  // namespace

const char* to_string(HumanKind kind) noexcept {
  return kind == HumanKind::kRate ? "rate" : "elo";
}

HumanKind parse_human_kind(std::string_view text) {
  if (text == "rate") return HumanKind::kRate;
  if (text == "elo") return HumanKind::kElo;
  throw DataError("unknown human preference kind '" + std::string(text) +
                  "' (expected rate or elo)");
}

SampleScoreTensor::SampleScoreTensor(std::vector<std::string> model_ids,
                                     std::size_t samples,
                                     std::vector<double> scores)
    : model_ids_(std::move(model_ids)), samples_(samples), scores_(std::move(scores)) {
  if (model_ids_.size() < 2 || samples_ == 0) {
    throw DegenerateInputError("sample score tensor needs >= 2 models and >= 1 sample");
  }
  if (scores_.size() != samples_ * model_ids_.size()) {
    throw DimensionError("sample score tensor has " + std::to_string(scores_.size()) +
                         " entries, expected " +
                         std::to_string(samples_ * model_ids_.size()));
  }
  require_unique(model_ids_, "sample score tensor");
  require_finite(scores_, "sample score tensor");
}

void validate(const ModelScoreColumn& column) {
  if (column.model_ids.size() < 2) {
    throw DegenerateInputError("score column needs at least 2 models");
  }
  if (column.scores.size() != column.model_ids.size()) {
    throw DimensionError("score column has " + std::to_string(column.scores.size()) +
                         " scores for " + std::to_string(column.model_ids.size()) +
                         " models");
  }
  require_unique(column.model_ids, "score column");
  require_finite(column.scores, "score column");
}

void validate(const HumanColumn& column) {
  if (column.preference.size() != column.model_ids.size()) {
    throw DimensionError("human column has " +
                         std::to_string(column.preference.size()) +
                         " values for " + std::to_string(column.model_ids.size()) +
                         " models");
  }
  require_unique(column.model_ids, "human column");
  require_finite(column.preference, "human column");
}

bool Ranking::has_ties() const noexcept {
  return std::find(tied.begin(), tied.end(), true) != tied.end();
}

Ranking rank_models(const ModelScoreColumn& column) {
  validate(column);
  const auto order = best_first_order(column.scores, column.direction);
  Ranking out;
  out.ranks.assign(order.size(), 0);
  out.tied.assign(order.size(), false);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    out.ranks[order[pos]] = static_cast<int>(pos + 1);
    if (pos > 0 && column.scores[order[pos]] == column.scores[order[pos - 1]]) {
      out.tied[order[pos]] = true;
      out.tied[order[pos - 1]] = true;
    }
  }
  return out;
}

std::vector<double> fractional_ranks(std::span<const double> scores,
                                     Direction direction) {
  const auto order = best_first_order(scores, direction);
  std::vector<double> ranks(scores.size(), 0.0);
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    // positions start..end-1 hold 1-based ranks start+1..end
    const double mean_rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = mean_rank;
    start = end;
  }
  return ranks;
}

std::vector<double> truth_ranks(const HumanColumn& human) {
  validate(human);
  const auto ranks = fractional_ranks(human.preference, Direction::kHigherBetter);
  require_tie_free(ranks);
  return ranks;
}

double rank_accuracy(std::span<const double> predicted,
                     std::span<const double> truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("rank_accuracy length mismatch: " +
                         std::to_string(predicted.size()) + " vs " +
                         std::to_string(truth.size()));
  }
  if (truth.size() < 2) {
    throw DegenerateInputError("rank_accuracy needs at least 2 entries");
  }
  require_tie_free(truth);
  const std::size_t n = truth.size();
  double concordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int p = sign(predicted[i] - predicted[j]);
      if (p == 0) {
        concordant += 0.5;
      } else if (p == sign(truth[i] - truth[j])) {
        concordant += 1.0;
      }
    }
  }
  return concordant / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double rank_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  const std::vector<double> p(predicted.begin(), predicted.end());
  const std::vector<double> t(truth.begin(), truth.end());
  return rank_accuracy(std::span<const double>(p), std::span<const double>(t));
}

double per_item_rank_accuracy(const SampleScoreTensor& tensor,
                              std::span<const double> truth, Direction direction) {
  if (truth.size() != tensor.models()) {
    throw DimensionError("per-item rank accuracy: tensor has " +
                         std::to_string(tensor.models()) + " models, truth has " +
                         std::to_string(truth.size()));
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < tensor.samples(); ++s) {
    sum += rank_accuracy(fractional_ranks(tensor.sample(s), direction), truth);
  }
  return sum / static_cast<double>(tensor.samples());
}

ModelScoreColumn aggregate_sample_ranks(const SampleScoreTensor& tensor,
                                        Direction direction) {
  std::vector<double> sum(tensor.models(), 0.0);
  for (std::size_t s = 0; s < tensor.samples(); ++s) {
    const auto ranks = fractional_ranks(tensor.sample(s), direction);
    for (std::size_t m = 0; m < ranks.size(); ++m) sum[m] += ranks[m];
  }
  for (double& v : sum) v /= static_cast<double>(tensor.samples());
  return ModelScoreColumn{tensor.model_ids(), std::move(sum), Direction::kLowerBetter};
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("pearson length mismatch");
  }
  if (a.size() < 3) {
    throw DegenerateInputError("correlation needs at least 3 models");
  }
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw UndefinedCorrelationError("correlation is undefined for a zero-variance column");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Correlation correlation(const ModelScoreColumn& column, const HumanColumn& human,
                        CorrelationMethod method) {
  validate(column);
  validate(human);
  const auto pref = align_to(column.model_ids, human.model_ids, human.preference);
  const auto score = aligned(column.scores, column.direction);
  double rho = 0.0;
  if (method == CorrelationMethod::kPearson) {
    rho = pearson(score, pref);
  } else {
    rho = pearson(fractional_ranks(score, Direction::kHigherBetter),
                  fractional_ranks(pref, Direction::kHigherBetter));
  }
  return Correlation{rho, rho * rho};
}

double WinRateTally::fraction(std::size_t part) const noexcept {
  const std::size_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(t);
}

WinRateReport win_rate_matchup(const std::vector<std::vector<double>>& candidates,
                               std::span<const double> truth) {
  if (candidates.size() < 2) {
    throw DegenerateInputError("win-rate matchup needs at least 2 candidates");
  }
  if (truth.size() < 2) {
    throw DegenerateInputError("win-rate matchup needs at least 2 models");
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (candidates[c].size() != truth.size()) {
      throw DimensionError("candidate " + std::to_string(c) + " ranks " +
                           std::to_string(candidates[c].size()) + " models, truth ranks " +
                           std::to_string(truth.size()));
    }
  }
  require_tie_free(truth);

  const std::size_t k = candidates.size();
  const std::size_t n = truth.size();
  WinRateReport out;
  out.per_candidate.assign(k, {});
  out.matchups.assign(k, std::vector<WinRateTally>(k));

  std::vector<bool> agrees(k);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const int t = sign(truth[p] - truth[q]);
      for (std::size_t c = 0; c < k; ++c) {
        agrees[c] = sign(candidates[c][p] - candidates[c][q]) == t;
      }
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j) continue;
          WinRateTally& m = out.matchups[i][j];
          if (agrees[i] && agrees[j]) {
            ++m.both_good;
          } else if (agrees[i]) {
            ++m.win;
          } else if (agrees[j]) {
            ++m.lose;
          } else {
            ++m.both_bad;
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const WinRateTally& m = out.matchups[i][j];
      out.per_candidate[i].win += m.win;
      out.per_candidate[i].lose += m.lose;
      out.per_candidate[i].both_good += m.both_good;
      out.per_candidate[i].both_bad += m.both_bad;
    }
  }
  return out;
}

LinearCombo fit_linear_combo(const ModelScoreColumn& a, const ModelScoreColumn& b,
                             const HumanColumn& human) {
  validate(a);
  validate(b);
  validate(human);
  if (a.model_ids.size() < 3) {
    throw DegenerateInputError("linear combination needs at least 3 models");
  }
  const auto b_scores = align_to(a.model_ids, b.model_ids, b.scores);
  const auto pref = align_to(a.model_ids, human.model_ids, human.preference);
  const auto truth =
      truth_ranks(HumanColumn{a.model_ids, pref, human.kind});
  const auto za = zscore_aligned(a, a.scores);
  const auto zb = zscore_aligned(b, b_scores);

  constexpr int kSteps = 1000;
  LinearCombo best;
  best.accuracy = -1.0;
  std::vector<double> combined(za.size());
  for (int step = 0; step <= kSteps; ++step) {
    const double w = static_cast<double>(step) / kSteps;
    for (std::size_t i = 0; i < za.size(); ++i) {
      combined[i] = w * za[i] + (1.0 - w) * zb[i];
    }
    const double acc =
        rank_accuracy(fractional_ranks(combined, Direction::kHigherBetter), truth);
    if (step == 0) best.accuracy_b = acc;
    if (step == kSteps) best.accuracy_a = acc;
    if (acc > best.accuracy) {
      best.accuracy = acc;
      best.weight_a = w;
      best.weight_b = 1.0 - w;
    }
  }
  return best;
}

std::vector<double> align_to(const std::vector<std::string>& target_ids,
                             const std::vector<std::string>& ids,
                             const std::vector<double>& values) {
  if (ids.size() != target_ids.size() || values.size() != ids.size()) {
    throw DataError("model sets differ in size: " + std::to_string(target_ids.size()) +
                    " vs " + std::to_string(ids.size()));
  }
  std::map<std::string, double> by_id;
  for (std::size_t i = 0; i < ids.size(); ++i) by_id.emplace(ids[i], values[i]);
  std::vector<double> out;
  out.reserve(target_ids.size());
  for (const auto& id : target_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DataError("model '" + id + "' is missing from the compared column");
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace cfred
