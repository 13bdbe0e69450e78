// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/cfred.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>

#include "cfred/emb_io.hpp"
#include "cfred/error.hpp"
#include "cfred/harness.hpp"

struct cfred_matrix {
  cfred::FeatureMatrix m;
};

struct cfred_manifest {
  cfred::DatasetManifest m;
};

struct cfred_report {
  std::variant<cfred::RankingTable, cfred::Report> content;
};

namespace {

thread_local std::string g_last_error;

cfred_status status_of(cfred::ErrorCategory c) {
  switch (c) {
    case cfred::ErrorCategory::kUsage: return CFRED_ERR_USAGE;
    case cfred::ErrorCategory::kData: return CFRED_ERR_DATA;
    case cfred::ErrorCategory::kNumerical: return CFRED_ERR_NUMERICAL;
  }
  return CFRED_ERR_INTERNAL;
}

template <typename F>
cfred_status guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CFRED_OK;
  } catch (const cfred::Error& e) {
    g_last_error = e.what();
    return status_of(e.category());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return CFRED_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw cfred::UsageError(std::string(what) + " must not be null");
}

cfred::CovarianceDivisor divisor_of(cfred_divisor d) {
  switch (d) {
    case CFRED_DIVISOR_ML: return cfred::CovarianceDivisor::kMaximumLikelihood;
    case CFRED_DIVISOR_UNBIASED: return cfred::CovarianceDivisor::kUnbiased;
  }
  throw cfred::UsageError("unknown covariance divisor");
}

cfred::BenchmarkOptions options_of(const cfred_options* o) {
  cfred_options defaults;
  cfred_options_init(&defaults);
  if (o == nullptr) o = &defaults;
  cfred::BenchmarkOptions out;
  out.threads = o->threads;
  out.estimator.divisor = divisor_of(o->divisor);
  out.expectation_form = o->expectation_form != 0;
  if (o->has_seed) out.seed = o->seed;
  return out;
}

template <typename T>
void emit(cfred_report** out, T&& content) {
  *out = new cfred_report{std::forward<T>(content)};
}

}  // namespace

extern "C" {

void cfred_options_init(cfred_options* options) {
  if (options == nullptr) return;
  options->threads = 1;
  options->divisor = CFRED_DIVISOR_ML;
  options->expectation_form = 1;
  options->has_seed = 0;
  options->seed = 0;
}

const char* cfred_version(void) { return CFRED_VERSION_STRING; }

unsigned cfred_emb_format_version(void) { return cfred::kEmbVersion; }

const char* cfred_last_error(void) { return g_last_error.c_str(); }

cfred_status cfred_matrix_create(size_t rows, size_t cols, const float* data,
                                 cfred_matrix** out) {
  return guard([&] {
    require(out, "out");
    require(data, "data");
    if (rows != 0 && cols > SIZE_MAX / rows) throw cfred::DataError("matrix size overflows");
    *out = new cfred_matrix{
        cfred::FeatureMatrix(rows, cols, std::vector<float>(data, data + rows * cols))};
  });
}

cfred_status cfred_matrix_read(const char* path, cfred_matrix** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new cfred_matrix{cfred::read_embedding(path)};
  });
}

cfred_status cfred_matrix_write(const cfred_matrix* m, const char* path) {
  return guard([&] {
    require(m, "matrix");
    require(path, "path");
    cfred::write_embedding(path, m->m);
  });
}

size_t cfred_matrix_rows(const cfred_matrix* m) { return m ? m->m.rows() : 0; }
size_t cfred_matrix_cols(const cfred_matrix* m) { return m ? m->m.cols() : 0; }
const float* cfred_matrix_data(const cfred_matrix* m) {
  return m ? m->m.data().data() : nullptr;
}
void cfred_matrix_destroy(cfred_matrix* m) { delete m; }

cfred_status cfred_frechet_distance(const cfred_matrix* a, const cfred_matrix* b,
                                    cfred_divisor divisor, double* out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = cfred::frechet_distance(a->m, b->m, cfred::EstimatorConfig{divisor_of(divisor)});
  });
}

cfred_status cfred_conditional_frechet_distance(const cfred_matrix* condition,
                                                const cfred_matrix* real,
                                                const cfred_matrix* generated,
                                                cfred_divisor divisor, double* out) {
  return guard([&] {
    require(condition, "condition");
    require(real, "real");
    require(generated, "generated");
    require(out, "out");
    *out = cfred::cfred(condition->m, real->m, generated->m,
                        cfred::EstimatorConfig{divisor_of(divisor)});
  });
}

cfred_status cfred_cmmd(const cfred_matrix* real, const cfred_matrix* generated, double sigma,
                        double scale, double* out) {
  return guard([&] {
    require(real, "real");
    require(generated, "generated");
    require(out, "out");
    if (!(sigma > 0.0)) throw cfred::UsageError("sigma must be positive");
    *out = cfred::cmmd(real->m, generated->m, cfred::CmmdOptions{sigma, scale});
  });
}

cfred_status cfred_clipscore(const cfred_matrix* text, const cfred_matrix* image, double* out) {
  return guard([&] {
    require(text, "text");
    require(image, "image");
    require(out, "out");
    *out = cfred::clipscore(text->m, image->m);
  });
}

cfred_status cfred_manifest_load(const char* path, cfred_manifest** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new cfred_manifest{cfred::load_manifest(path)};
  });
}

void cfred_manifest_destroy(cfred_manifest* manifest) { delete manifest; }

cfred_status cfred_benchmark_scores(const cfred_manifest* manifest,
                                    const cfred_options* options, cfred_report** out) {
  return guard([&] {
    require(manifest, "manifest");
    require(out, "out");
    emit(out, cfred::score_report(cfred::run_benchmark(manifest->m, options_of(options))));
  });
}

cfred_status cfred_benchmark_rank(const cfred_manifest* manifest,
                                  const cfred_options* options, cfred_report** out) {
  return guard([&] {
    require(manifest, "manifest");
    require(out, "out");
    emit(out, cfred::run_benchmark(manifest->m, options_of(options)).table);
  });
}

cfred_status cfred_rank_columns(const char* columns_json, cfred_report** out) {
  return guard([&] {
    require(columns_json, "columns_json");
    require(out, "out");
    emit(out, cfred::build_table(cfred::parse_score_columns(columns_json)));
  });
}

cfred_status cfred_correlate(const char* columns_json, const char* metric, const char* against,
                             cfred_report** out) {
  return guard([&] {
    require(columns_json, "columns_json");
    require(metric, "metric");
    require(out, "out");
    emit(out, cfred::correlation_report(cfred::parse_score_columns(columns_json), metric,
                                        against ? against : "human"));
  });
}

cfred_status cfred_winrate(const char* candidates_json, cfred_report** out) {
  return guard([&] {
    require(candidates_json, "candidates_json");
    require(out, "out");
    emit(out, cfred::winrate_report(cfred::parse_ranking_candidates(candidates_json)));
  });
}

cfred_status cfred_combo(const char* columns_json, const char* metric_a, const char* metric_b,
                         cfred_report** out) {
  return guard([&] {
    require(columns_json, "columns_json");
    require(metric_a, "metric_a");
    require(metric_b, "metric_b");
    require(out, "out");
    emit(out, cfred::combo_report(cfred::parse_score_columns(columns_json), metric_a, metric_b));
  });
}

cfred_status cfred_ablate(const char* grid_json, const char* attributes_json, const char* axis,
                          cfred_report** out) {
  return guard([&] {
    require(grid_json, "grid_json");
    require(attributes_json, "attributes_json");
    require(axis, "axis");
    require(out, "out");
    const cfred::AblationAxis a = cfred::parse_axis(axis);
    emit(out, cfred::ablation_report(
                  cfred::ablate(cfred::parse_correlation_grid(grid_json),
                                cfred::parse_backbone_attributes(attributes_json), a),
                  a));
  });
}

cfred_status cfred_synth(const char* spec_json, const cfred_options* options,
                         const char* out_dir, cfred_report** out) {
  return guard([&] {
    require(spec_json, "spec_json");
    require(out_dir, "out_dir");
    require(out, "out");
    emit(out, cfred::synthesize(spec_json, options_of(options).seed, out_dir));
  });
}

cfred_status cfred_report_render(const cfred_report* report, cfred_format format, char** out,
                                 size_t* length) {
  return guard([&] {
    require(report, "report");
    require(out, "out");
    cfred::ReportFormat f;
    switch (format) {
      case CFRED_FORMAT_CSV: f = cfred::ReportFormat::kCsv; break;
      case CFRED_FORMAT_JSON: f = cfred::ReportFormat::kJson; break;
      case CFRED_FORMAT_MARKDOWN: f = cfred::ReportFormat::kMarkdown; break;
      default: throw cfred::UsageError("unknown report format");
    }
    const std::string text =
        std::visit([&](const auto& c) { return cfred::emit_report(c, f); }, report->content);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
    if (length) *length = text.size();
  });
}

void cfred_string_free(char* s) { std::free(s); }

void cfred_report_destroy(cfred_report* report) { delete report; }

}  // extern "C"
