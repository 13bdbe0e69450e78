// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// cfred command line: score, rank, correlate, winrate, combo, ablate, synth.

#include <unistd.h>

#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cfred/cfred.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct Failure {
  int code;
  std::string message;
};

int exit_code(cfred_status s) {
  switch (s) {
    case CFRED_OK: return 0;
    case CFRED_ERR_USAGE: return kExitUsage;
    case CFRED_ERR_DATA: return kExitData;
    case CFRED_ERR_NUMERICAL: return kExitNumerical;
    case CFRED_ERR_INTERNAL: break;
  }
  return kExitData;
}

void check(cfred_status s) {
  if (s != CFRED_OK) throw Failure{exit_code(s), cfred_last_error()};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot open input '" + path + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  if (!in.good() && !in.eof()) throw Failure{kExitData, "cannot read input '" + path + "'"};
  return s.str();
}

// Writes to a sibling temporary and renames, so a failed run never leaves a
// partial file at `path`.
void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << text;
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw Failure{kExitData, "cannot write output '" + path + "'"};
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Failure{kExitData, "cannot write output '" + path + "': " + ec.message()};
  }
}

cfred_format format_of(const std::string& name) {
  if (name == "json") return CFRED_FORMAT_JSON;
  if (name == "markdown" || name == "md") return CFRED_FORMAT_MARKDOWN;
  return CFRED_FORMAT_CSV;
}

class ReportHandle {
 public:
  ReportHandle() = default;
  ReportHandle(const ReportHandle&) = delete;
  ReportHandle& operator=(const ReportHandle&) = delete;
  ~ReportHandle() { cfred_report_destroy(r_); }
  cfred_report** out() { return &r_; }
  cfred_report* get() const { return r_; }

 private:
  cfred_report* r_ = nullptr;
};

class ManifestHandle {
 public:
  explicit ManifestHandle(const std::string& path) {
    check(cfred_manifest_load(path.c_str(), &m_));
  }
  ManifestHandle(const ManifestHandle&) = delete;
  ManifestHandle& operator=(const ManifestHandle&) = delete;
  ~ManifestHandle() { cfred_manifest_destroy(m_); }
  const cfred_manifest* get() const { return m_; }

 private:
  cfred_manifest* m_ = nullptr;
};

void publish(const ReportHandle& report, const CommonFlags& flags) {
  char* buf = nullptr;
  std::size_t len = 0;
  check(cfred_report_render(report.get(), format_of(flags.format), &buf, &len));
  const std::string text(buf, len);
  cfred_string_free(buf);
  if (flags.out.empty() || flags.out == "-") {
    std::cout << text << std::flush;
  } else {
    write_atomically(flags.out, text);
  }
}

void add_common(CLI::App* cmd, CommonFlags& flags, const char* out_help) {
  cmd->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "markdown", "md"}))
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Seed recorded in reports and used by synth");
  cmd->add_option("--out", flags.out, out_help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional Frechet distance benchmark toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("cfred ") + cfred_version() + ", EMB format version " +
                           std::to_string(cfred_emb_format_version()));

  std::size_t threads = 1;
  std::string divisor = "ml";
  bool no_groups = false;
  const std::map<std::string, cfred_divisor> divisors{{"ml", CFRED_DIVISOR_ML},
                                                      {"unbiased", CFRED_DIVISOR_UNBIASED}};
  const auto add_estimator = [&](CLI::App* cmd) {
    cmd->add_option("--threads", threads, "Worker threads (one model per task)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--divisor", divisor, "Covariance divisor: ml (n) or unbiased (n - 1)")
        ->check(CLI::IsMember({"ml", "unbiased"}))
        ->capture_default_str();
    cmd->add_flag("--no-groups", no_groups, "Skip the per-group expectation-form column");
  };

  CommonFlags flags;
  std::string input, metric, against = "human", metric_a, metric_b, grid, attributes, axis;
  bool from_manifest = false;

  auto* score = app.add_subcommand("score", "Metric columns for every model of a manifest");
  score->add_option("manifest", input, "Dataset manifest (JSON)")->required();
  add_estimator(score);
  add_common(score, flags, "Output file (default stdout)");

  auto* rank = app.add_subcommand("rank", "Ranking table with human-agreement footers");
  rank->add_option("input", input, "Score columns JSON, or a manifest with --manifest")
      ->required();
  rank->add_flag("--manifest", from_manifest, "Treat input as a dataset manifest");
  add_estimator(rank);
  add_common(rank, flags, "Output file (default stdout)");

  auto* correlate = app.add_subcommand("correlate", "Pearson and Spearman of one column");
  correlate->add_option("columns", input, "Score columns JSON")->required();
  correlate->add_option("--metric", metric, "Metric column")->required();
  correlate->add_option("--against", against, "'human' or another metric column")
      ->capture_default_str();
  add_common(correlate, flags, "Output file (default stdout)");

  auto* winrate = app.add_subcommand("winrate", "Pairwise matchups of candidate rankings");
  winrate->add_option("input", input, "Candidates JSON")->required();
  add_common(winrate, flags, "Output file (default stdout)");

  auto* combo = app.add_subcommand("combo", "Best linear combination of two metrics");
  combo->add_option("columns", input, "Score columns JSON")->required();
  combo->add_option("--metric-a", metric_a, "First metric column")->required();
  combo->add_option("--metric-b", metric_b, "Second metric column")->required();
  add_common(combo, flags, "Output file (default stdout)");

  auto* ablate = app.add_subcommand("ablate", "Mean correlation per backbone attribute bucket");
  ablate->add_option("--grid", grid, "Correlation grid JSON")->required();
  ablate->add_option("--attributes", attributes, "Backbone attributes JSON")->required();
  ablate->add_option("--axis", axis,
                     "training_data, image_size, model_size, feature_dim or zero_shot")
      ->required();
  add_common(ablate, flags, "Output file (default stdout)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic Gaussian dataset");
  synth->add_option("spec", input, "Synthetic spec JSON")->required();
  add_common(synth, flags, "Output directory (required)");
  std::string summary_path;
  synth->add_option("--summary", summary_path, "Summary report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    cfred_options options;
    cfred_options_init(&options);
    options.threads = threads;
    options.divisor = divisors.at(divisor);
    options.expectation_form = no_groups ? 0 : 1;
    options.has_seed = flags.seed.has_value();
    options.seed = flags.seed.value_or(0);

    ReportHandle report;
    if (score->parsed()) {
      const ManifestHandle manifest(input);
      check(cfred_benchmark_scores(manifest.get(), &options, report.out()));
    } else if (rank->parsed()) {
      if (from_manifest) {
        const ManifestHandle manifest(input);
        check(cfred_benchmark_rank(manifest.get(), &options, report.out()));
      } else {
        check(cfred_rank_columns(read_text(input).c_str(), report.out()));
      }
    } else if (correlate->parsed()) {
      check(cfred_correlate(read_text(input).c_str(), metric.c_str(), against.c_str(),
                            report.out()));
    } else if (winrate->parsed()) {
      check(cfred_winrate(read_text(input).c_str(), report.out()));
    } else if (combo->parsed()) {
      check(cfred_combo(read_text(input).c_str(), metric_a.c_str(), metric_b.c_str(),
                        report.out()));
    } else if (ablate->parsed()) {
      const std::string g = read_text(grid);
      const std::string a = read_text(attributes);
      check(cfred_ablate(g.c_str(), a.c_str(), axis.c_str(), report.out()));
    } else if (synth->parsed()) {
      if (flags.out.empty()) throw Failure{kExitUsage, "synth requires --out DIR"};
      check(cfred_synth(read_text(input).c_str(), &options, flags.out.c_str(), report.out()));
      flags.out = summary_path;
    }
    publish(report, flags);
  } catch (const Failure& f) {
    std::cerr << "cfred: error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "cfred: error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
