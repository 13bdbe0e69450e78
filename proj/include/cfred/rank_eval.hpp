// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// Agreement between metric rankings and human preference: rankings, pairwise
// rank accuracy, Pearson/Spearman correlation, win-rate matchups between
// candidate rankings and the two-metric linear-combination baseline.
//
// Rank vectors are 1-based with 1 = best and are carried as doubles so that
// averaged (fractional) ranks flow through the same code.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfred/direction.hpp"

namespace cfred {

struct ModelScoreColumn {
  std::vector<std::string> model_ids;
  std::vector<double> scores;
  Direction direction = Direction::kLowerBetter;
};

enum class HumanKind { kRate, kElo };

const char* to_string(HumanKind kind) noexcept;
HumanKind parse_human_kind(std::string_view text);

/// Human preference per model; always higher-is-better.
struct HumanColumn {
  std::vector<std::string> model_ids;
  std::vector<double> preference;
  HumanKind kind = HumanKind::kRate;
};

/// Per-sample scores, row-major samples x models.
class SampleScoreTensor {
 public:
  SampleScoreTensor(std::vector<std::string> model_ids, std::size_t samples,
                    std::vector<double> scores);

  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  std::size_t samples() const noexcept { return samples_; }
  std::size_t models() const noexcept { return model_ids_.size(); }
  double at(std::size_t sample, std::size_t model) const noexcept {
    return scores_[sample * model_ids_.size() + model];
  }
  std::span<const double> sample(std::size_t s) const noexcept {
    return {scores_.data() + s * model_ids_.size(), model_ids_.size()};
  }

 private:
  std::vector<std::string> model_ids_;
  std::size_t samples_;
  std::vector<double> scores_;
};

/// Throws DataError unless ids are unique, scores finite and >= 2 models.
void validate(const ModelScoreColumn& column);
void validate(const HumanColumn& column);

struct Ranking {
  std::vector<int> ranks;   // permutation of 1..n
  std::vector<bool> tied;   // score equal to some other model's score
  bool has_ties() const noexcept;
};

/// Ordinal ranks honoring the column direction; equal scores keep input
/// order and are flagged.
Ranking rank_models(const ModelScoreColumn& column);

/// Average ranks (ties share the mean of the positions they span).
std::vector<double> fractional_ranks(std::span<const double> scores,
                                     Direction direction);

/// Ranks of a human column, 1 = most preferred. Throws DataError on ties.
std::vector<double> truth_ranks(const HumanColumn& human);

/// Concordant pairs / C(n, 2). Pairs tied in `predicted` count one half.
/// Throws on a length mismatch, fewer than 2 entries or ties in `truth`.
double rank_accuracy(std::span<const double> predicted,
                     std::span<const double> truth);
double rank_accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Mean over samples of the rank accuracy of each sample's model ranking.
double per_item_rank_accuracy(const SampleScoreTensor& tensor,
                              std::span<const double> truth,
                              Direction direction);

/// Mean per-sample rank of each model, as a lower-better column.
ModelScoreColumn aggregate_sample_ranks(const SampleScoreTensor& tensor,
                                        Direction direction);

enum class CorrelationMethod { kPearson, kSpearman };

struct Correlation {
  double rho = 0.0;
  double rho_squared = 0.0;
};

double pearson(std::span<const double> a, std::span<const double> b);

/// Correlation between the direction-aligned scores (negated when lower is
/// better) and the human preference. Spearman is Pearson on average ranks.
/// Models are matched by id. Throws UndefinedCorrelationError on a constant
/// column.
Correlation correlation(const ModelScoreColumn& column, const HumanColumn& human,
                        CorrelationMethod method);

struct WinRateTally {
  std::size_t win = 0;
  std::size_t lose = 0;
  std::size_t both_good = 0;
  std::size_t both_bad = 0;

  std::size_t total() const noexcept { return win + lose + both_good + both_bad; }
  double fraction(std::size_t part) const noexcept;
};

struct WinRateReport {
  std::vector<WinRateTally> per_candidate;
  /// matchups[i][j] is candidate i's tally against candidate j; the diagonal
  /// stays empty.
  std::vector<std::vector<WinRateTally>> matchups;
};

/// For every unordered model pair and every ordered candidate matchup, a
/// candidate wins when it orders the pair like `truth` and its opponent does
/// not. Both agreeing is both-good, neither is both-bad. A tie in a candidate
/// ranking does not agree with the tie-free truth.
WinRateReport win_rate_matchup(const std::vector<std::vector<double>>& candidates,
                               std::span<const double> truth);

struct LinearCombo {
  double weight_a = 0.0;
  double weight_b = 0.0;
  double accuracy = 0.0;
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
};

/// Grid search over w in {0, 0.001, ..., 1} of w*z(a) + (1-w)*z(b), where z is
/// a z-score aligned so that higher is better, maximising rank accuracy
/// against the human ranking. The smallest maximising w wins.
LinearCombo fit_linear_combo(const ModelScoreColumn& a, const ModelScoreColumn& b,
                             const HumanColumn& human);

/// Reorders `values` (keyed by `ids`) into the order of `target_ids`. Throws
/// DataError unless both id lists name the same set.
std::vector<double> align_to(const std::vector<std::string>& target_ids,
                             const std::vector<std::string>& ids,
                             const std::vector<double>& values);

}  // namespace cfred
