// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfred/direction.hpp"
#include "cfred/rank_eval.hpp"

namespace cfred {

enum class ReportFormat { kCsv, kJson, kMarkdown };

ReportFormat parse_format(std::string_view text);
const char* to_string(ReportFormat format) noexcept;

/// Footer statistics of one metric column against the human column.
/// Correlations are absent when undefined (constant column).
struct ColumnFooter {
  std::optional<Correlation> pearson;
  std::optional<Correlation> spearman;
  double rank_accuracy = 0.0;
  std::optional<double> per_item_rank_accuracy;
};

struct TableColumn {
  std::string name;
  Direction direction = Direction::kLowerBetter;
  std::vector<double> scores;
  std::vector<int> ranks;
  std::vector<bool> tied;
  std::optional<ColumnFooter> footer;
};

/// Models x metrics grid. `human`, when present, is rendered first and every
/// metric column then carries a footer.
struct RankingTable {
  std::string dataset;
  std::vector<std::string> models;
  std::optional<TableColumn> human;
  std::optional<HumanKind> human_kind;
  std::vector<TableColumn> metrics;
};

/// A number rendered with a fixed count of decimals.
struct Fixed {
  double value;
  int decimals;
};

using Cell = std::variant<std::monostate, std::string, std::int64_t, Fixed>;

/// Flat tabular report used by every non-table subcommand.
struct Report {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Deterministic rendering: stable column order; scores and correlations
/// with 2 decimals, accuracies as percentages with 1 decimal.
std::string emit_report(const RankingTable& table, ReportFormat format);
std::string emit_report(const Report& report, ReportFormat format);

/// RFC-4180 field quoting.
std::string csv_escape(std::string_view field);

}  // namespace cfred
