// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/report.hpp"

#include <cstdio>
#include <string>

#include <json.hpp>

#include "cfred/error.hpp"

namespace cfred {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kScoreDecimals = 2;
constexpr int kCorrelationDecimals = 2;
constexpr int kAccuracyDecimals = 1;

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

double rounded(double value, int decimals) {
  return std::stod(format_fixed(value, decimals));
}

std::string render_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const Fixed& f) const { return format_fixed(f.value, f.decimals); }
  };
  return std::visit(Visitor{}, cell);
}

ojson json_cell(const Cell& cell) {
  struct Visitor {
    ojson operator()(std::monostate) const { return nullptr; }
    ojson operator()(const std::string& s) const { return s; }
    ojson operator()(std::int64_t v) const { return v; }
    ojson operator()(const Fixed& f) const { return rounded(f.value, f.decimals); }
  };
  return std::visit(Visitor{}, cell);
}

std::string markdown_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

bool is_numeric(const Cell& c) {
  return std::holds_alternative<Fixed>(c) || std::holds_alternative<std::int64_t>(c);
}

std::string emit_csv(const Report& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(r.columns[i]);
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(render_cell(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string emit_markdown(const Report& r) {
  std::string out;
  if (!r.title.empty()) out += "### " + markdown_escape(r.title) + "\n\n";
  out += '|';
  for (const auto& c : r.columns) out += ' ' + markdown_escape(c) + " |";
  out += "\n|";
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    bool numeric = false;
    for (const auto& row : r.rows) numeric = numeric || (i < row.size() && is_numeric(row[i]));
    out += numeric ? " ---: |" : " --- |";
  }
  out += '\n';
  for (const auto& row : r.rows) {
    out += '|';
    for (const auto& cell : row) out += ' ' + markdown_escape(render_cell(cell)) + " |";
    out += '\n';
  }
  return out;
}

std::string emit_json(const Report& r) {
  ojson doc;
  doc["title"] = r.title;
  doc["columns"] = r.columns;
  doc["rows"] = ojson::array();
  for (const auto& row : r.rows) {
    ojson jr = ojson::object();
    for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) {
      jr[r.columns[i]] = json_cell(row[i]);
    }
    doc["rows"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

Cell rank_cell(const TableColumn& c, std::size_t i) {
  std::string s = std::to_string(c.ranks[i]);
  if (c.tied[i]) s += '*';
  return s;
}

// Flattens a ranking table into the grid shared by CSV and Markdown.
Report table_grid(const RankingTable& t) {
  Report r;
  r.title = t.dataset;
  std::vector<const TableColumn*> cols;
  if (t.human) cols.push_back(&*t.human);
  for (const auto& m : t.metrics) cols.push_back(&m);

  r.columns.push_back("Model");
  for (const auto* c : cols) {
    r.columns.push_back(c->name + " R#");
    r.columns.push_back(c->name + " Score");
  }
  if (cols.empty()) return r;

  for (std::size_t i = 0; i < t.models.size(); ++i) {
    std::vector<Cell> row{t.models[i]};
    for (const auto* c : cols) {
      row.push_back(rank_cell(*c, i));
      row.push_back(Fixed{c->scores[i], kScoreDecimals});
    }
    r.rows.push_back(std::move(row));
  }
  if (!t.human) return r;

  const auto footer_row = [&](const std::string& label, auto&& value_of) {
    std::vector<Cell> row{label};
    for (const auto* c : cols) {
      row.push_back(std::monostate{});
      if (c == &*t.human || !c->footer) {
        row.push_back(std::string("-"));
      } else {
        row.push_back(value_of(*c->footer));
      }
    }
    r.rows.push_back(std::move(row));
  };
  const auto corr = [](const std::optional<Correlation>& c, bool squared) -> Cell {
    if (!c) return std::string("NA");
    return Fixed{squared ? c->rho_squared : c->rho, kCorrelationDecimals};
  };
  footer_row("rho (Pearson)", [&](const ColumnFooter& f) { return corr(f.pearson, false); });
  footer_row("rho^2 (Pearson)", [&](const ColumnFooter& f) { return corr(f.pearson, true); });
  footer_row("rho (Spearman)", [&](const ColumnFooter& f) { return corr(f.spearman, false); });
  footer_row("rho^2 (Spearman)", [&](const ColumnFooter& f) { return corr(f.spearman, true); });
  footer_row("Rank Acc. (%)", [&](const ColumnFooter& f) -> Cell {
    return Fixed{100.0 * f.rank_accuracy, kAccuracyDecimals};
  });
  bool any_per_item = false;
  for (const auto& m : t.metrics) {
    any_per_item = any_per_item || (m.footer && m.footer->per_item_rank_accuracy);
  }
  if (any_per_item) {
    footer_row("Per-item Rank Acc. (%)", [&](const ColumnFooter& f) -> Cell {
      if (!f.per_item_rank_accuracy) return std::string("-");
      return Fixed{100.0 * *f.per_item_rank_accuracy, kAccuracyDecimals};
    });
  }
  return r;
}

ojson correlation_json(const std::optional<Correlation>& c) {
  if (!c) return nullptr;
  ojson j;
  j["rho"] = rounded(c->rho, kCorrelationDecimals);
  j["rho2"] = rounded(c->rho_squared, kCorrelationDecimals);
  return j;
}

ojson column_json(const TableColumn& c) {
  ojson j;
  j["name"] = c.name;
  j["direction"] = to_string(c.direction);
  j["ranks"] = c.ranks;
  ojson tied = ojson::array();
  for (bool b : c.tied) tied.push_back(b);
  j["tied"] = std::move(tied);
  ojson scores = ojson::array();
  for (double s : c.scores) scores.push_back(rounded(s, kScoreDecimals));
  j["scores"] = std::move(scores);
  if (c.footer) {
    ojson f;
    f["pearson"] = correlation_json(c.footer->pearson);
    f["spearman"] = correlation_json(c.footer->spearman);
    f["rank_accuracy"] = rounded(100.0 * c.footer->rank_accuracy, kAccuracyDecimals);
    if (c.footer->per_item_rank_accuracy) {
      f["per_item_rank_accuracy"] =
          rounded(100.0 * *c.footer->per_item_rank_accuracy, kAccuracyDecimals);
    }
    j["footer"] = std::move(f);
  }
  return j;
}

std::string table_json(const RankingTable& t) {
  ojson doc;
  doc["dataset"] = t.dataset;
  doc["models"] = t.models;
  if (t.human) {
    ojson h = column_json(*t.human);
    if (t.human_kind) h["kind"] = to_string(*t.human_kind);
    doc["human"] = std::move(h);
  }
  doc["metrics"] = ojson::array();
  for (const auto& m : t.metrics) doc["metrics"].push_back(column_json(m));
  return doc.dump(2) + "\n";
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  throw UsageError("unknown format '" + std::string(text) +
                   "' (expected csv, json or markdown)");
}

const char* to_string(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kJson: return "json";
    case ReportFormat::kMarkdown: return "markdown";
  }
  return "csv";
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string emit_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: return emit_csv(report);
    case ReportFormat::kJson: return emit_json(report);
    case ReportFormat::kMarkdown: return emit_markdown(report);
  }
  return emit_csv(report);
}

std::string emit_report(const RankingTable& table, ReportFormat format) {
  if (format == ReportFormat::kJson) return table_json(table);
  return emit_report(table_grid(table), format);
}

}  // namespace cfred
