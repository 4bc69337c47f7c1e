// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/mirrorlab.h"

#include "mirrorlab/suites.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <new>
#include <string>

using namespace mirrorlab;

struct mlab_config {
  Config cfg;
  std::string hash;
};

struct mlab_schedule {
  Schedule s;
};

struct mlab_family {
  FamilyPtr f;
};

struct mlab_matrix {
  Mat m;  // column-major storage
  std::vector<double> row_major;
};

struct mlab_result {
  bool is_suite = false;
  SuiteResult suite;
  ExperimentReport report;
  std::string table;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

mlab_status to_status(ErrorCode code) { return static_cast<mlab_status>(static_cast<int>(code)); }

template <typename F>
mlab_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MLAB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MLAB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::input, std::string(what) + " must not be null");
}

Vec view(const double* p, size_t n) {
  need(p, "vector argument");
  return Eigen::Map<const Vec>(p, static_cast<Eigen::Index>(n));
}

void copy_out(const Vec& v, double* out) {
  need(out, "output buffer");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

SuiteOptions to_options(const mlab_options* o) {
  SuiteOptions opt;
  if (o == nullptr) return opt;
  if (o->family) opt.family = o->family;
  if (o->variant) opt.variant = o->variant;
  opt.depth = o->depth;
  opt.expect_fail = o->expect_fail != 0;
  if (o->schedule) opt.schedule = o->schedule;
  if (o->has_seed) opt.seed = o->seed;
  return opt;
}

const Config& config_or_empty(const mlab_config* cfg) {
  static const Config empty;
  return cfg ? cfg->cfg : empty;
}

}  // namespace

extern "C" {

const char* mlab_version(void) { return "0.1.0"; }

const char* mlab_status_string(mlab_status status) {
  if (status == MLAB_OK) return "ok";
  if (status == MLAB_ERR_INTERNAL) return "internal error";
  return to_string(static_cast<ErrorCode>(status));
}

const char* mlab_last_error(void) { return g_last_error.c_str(); }

// ---------------------------------------------------------------------------

mlab_status mlab_config_new(mlab_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mlab_config{Config{}, Config{}.hash()};
  });
}

mlab_status mlab_config_load(const char* path, mlab_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    Config c = Config::load(path);
    *out = new mlab_config{c, c.hash()};
  });
}

mlab_status mlab_config_parse(const char* text, mlab_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    Config c = Config::parse(text);
    *out = new mlab_config{c, c.hash()};
  });
}

mlab_status mlab_config_set(mlab_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
    cfg->hash = cfg->cfg.hash();
  });
}

const char* mlab_config_hash(const mlab_config* cfg) { return cfg ? cfg->hash.c_str() : ""; }

void mlab_config_free(mlab_config* cfg) { delete cfg; }

// ---------------------------------------------------------------------------

mlab_status mlab_schedule_new(const char* kind, double alpha0, double turnoff_time, double t_end,
                              mlab_schedule** out) {
  return guarded([&] {
    need(kind, "kind");
    need(out, "out");
    *out = new mlab_schedule{Schedule(parse_schedule_kind(kind), alpha0, turnoff_time, t_end)};
  });
}

mlab_status mlab_schedule_alpha(const mlab_schedule* s, double t, double* out) {
  return guarded([&] {
    need(s, "schedule");
    need(out, "out");
    *out = s->s.alpha(t);
  });
}

mlab_status mlab_schedule_a(const mlab_schedule* s, double t, double* out) {
  return guarded([&] {
    need(s, "schedule");
    need(out, "out");
    *out = s->s.a(t);
  });
}

void mlab_schedule_free(mlab_schedule* s) { delete s; }

// ---------------------------------------------------------------------------

mlab_status mlab_family_entropy(const double* x0, size_t n, double scale, mlab_family** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mlab_family{make_entropy(view(x0, n), scale)};
  });
}

mlab_status mlab_family_hyperbolic_entropy(const double* m0, const double* w0, size_t n, mlab_family** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mlab_family{make_hyperbolic_entropy_from_hadamard(view(m0, n), view(w0, n))};
  });
}

mlab_status mlab_family_log_cosh(const double* u0, const double* v0, size_t n, mlab_family** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mlab_family{make_log_cosh(view(u0, n), view(v0, n))};
  });
}

mlab_status mlab_family_diff_powers(int k, const double* u0, const double* v0, size_t n, mlab_family** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mlab_family{make_diff_powers_flow(k, view(u0, n), view(v0, n))};
  });
}

size_t mlab_family_dim(const mlab_family* f) { return f ? static_cast<size_t>(f->f->dim()) : 0; }

mlab_status mlab_family_value(const mlab_family* f, double a, const double* x, double* out) {
  return guarded([&] {
    need(f, "family");
    need(out, "out");
    *out = f->f->value(a, view(x, mlab_family_dim(f)));
  });
}

mlab_status mlab_family_grad(const mlab_family* f, double a, const double* x, double* out) {
  return guarded([&] {
    need(f, "family");
    copy_out(f->f->grad(a, view(x, mlab_family_dim(f))), out);
  });
}

mlab_status mlab_family_dual_map(const mlab_family* f, double a, const double* mu, double* out) {
  return guarded([&] {
    need(f, "family");
    copy_out(f->f->dual_map(a, view(mu, mlab_family_dim(f))), out);
  });
}

mlab_status mlab_family_argmin(const mlab_family* f, double a, double* out) {
  return guarded([&] {
    need(f, "family");
    copy_out(f->f->argmin_position(a), out);
  });
}

mlab_status mlab_family_bregman(const mlab_family* f, double a, const double* x, const double* y, double* out) {
  return guarded([&] {
    need(f, "family");
    need(out, "out");
    const size_t n = mlab_family_dim(f);
    *out = f->f->bregman_divergence(a, view(x, n), view(y, n));
  });
}

mlab_status mlab_family_dual_domain(const mlab_family* f, double a, double* lo, double* hi) {
  return guarded([&] {
    need(f, "family");
    need(lo, "lo");
    need(hi, "hi");
    const DomainInfo info = f->f->domain(a);
    for (size_t i = 0; i < info.dual.size(); ++i) {
      lo[i] = info.dual[i].lo;
      hi[i] = info.dual[i].hi;
    }
  });
}

void mlab_family_free(mlab_family* f) { delete f; }

// ---------------------------------------------------------------------------

namespace {
mlab_matrix* wrap_matrix(Mat m) {
  auto* out = new mlab_matrix{std::move(m), {}};
  out->row_major.resize(static_cast<size_t>(out->m.size()));
  for (Eigen::Index i = 0; i < out->m.rows(); ++i)
    for (Eigen::Index j = 0; j < out->m.cols(); ++j)
      out->row_major[static_cast<size_t>(i * out->m.cols() + j)] = out->m(i, j);
  return out;
}
}  // namespace

mlab_status mlab_matrix_new(size_t rows, size_t cols, const double* data, mlab_matrix** out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    *out = wrap_matrix(std::move(m));
  });
}

mlab_status mlab_matrix_load(const char* path, mlab_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = wrap_matrix(load_matrix(path));
  });
}

mlab_status mlab_matrix_save(const mlab_matrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    save_matrix(path, m->m);
  });
}

size_t mlab_matrix_rows(const mlab_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }
size_t mlab_matrix_cols(const mlab_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }
const double* mlab_matrix_data(const mlab_matrix* m) { return m ? m->row_major.data() : nullptr; }
void mlab_matrix_free(mlab_matrix* m) { delete m; }

mlab_status mlab_nuclear_frobenius_ratio(const mlab_matrix* m, double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = nuclear_frobenius_ratio(m->m);
  });
}

// ---------------------------------------------------------------------------

void mlab_options_init(mlab_options* opt) {
  if (opt == nullptr) return;
  *opt = mlab_options{nullptr, nullptr, 0, 0, nullptr, 0, 0};
}

mlab_status mlab_verify(const char* suite, const mlab_config* cfg, const mlab_options* opt, mlab_result** out) {
  return guarded([&] {
    need(suite, "suite");
    need(out, "out");
    auto* r = new mlab_result;
    try {
      r->is_suite = true;
      r->suite = run_verify_suite(suite, config_or_empty(cfg), to_options(opt));
      r->table = r->suite.table();
      r->json = r->suite.to_json();
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

mlab_status mlab_run(const char* experiment, const mlab_config* cfg, const mlab_options* opt, mlab_result** out) {
  return guarded([&] {
    need(experiment, "experiment");
    need(out, "out");
    auto* r = new mlab_result;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      r->report = run_experiment(experiment, config_or_empty(cfg), to_options(opt));
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r->json = summary_json(r->report, cfg ? cfg->hash : Config{}.hash(), wall);
      char buf[256];
      const auto& rep = r->report;
      std::snprintf(buf, sizeof buf, "%s seed=%llu records=%zu converged=%s%s", rep.experiment.c_str(),
                    static_cast<unsigned long long>(rep.seed), rep.size(), rep.converged ? "yes" : "no",
                    rep.stopped ? " stopped" : "");
      r->table = buf;
      if (rep.stopped) r->table += ": " + rep.message;
      for (const auto& c : metric_columns()) {
        if (!rep.has(c) || rep.metric(c).empty()) continue;
        std::snprintf(buf, sizeof buf, "\n  final %-12s %.6e", c.c_str(), rep.final(c));
        r->table += buf;
      }
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

int mlab_result_passed(const mlab_result* r) {
  if (r == nullptr) return 0;
  return r->is_suite ? r->suite.passed() : !r->report.stopped;
}

int mlab_result_diverged(const mlab_result* r) { return r && !r->is_suite && r->report.stopped; }

const char* mlab_result_table(const mlab_result* r) { return r ? r->table.c_str() : ""; }

const char* mlab_result_json(const mlab_result* r) { return r ? r->json.c_str() : ""; }

mlab_status mlab_result_write_csv(const mlab_result* r, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(path, "path");
    if (r->is_suite) fail(ErrorCode::unsupported, "verification results have no trajectory");
    write_report_csv(std::string(path), r->report);
  });
}

mlab_status mlab_result_write_states(const mlab_result* r, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(path, "path");
    if (r->is_suite) fail(ErrorCode::unsupported, "verification results have no trajectory");
    write_states_csv(path, r->report);
  });
}

mlab_status mlab_result_write_svg(const mlab_result* r, const char* metric, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(metric, "metric");
    need(path, "path");
    if (r->is_suite) fail(ErrorCode::unsupported, "verification results have no trajectory");
    write_text(path, report_svg(r->report, metric));
  });
}

mlab_status mlab_result_series(const mlab_result* r, const char* name, const double** data, size_t* len) {
  return guarded([&] {
    need(r, "result");
    need(name, "name");
    need(data, "data");
    need(len, "len");
    if (r->is_suite) fail(ErrorCode::unsupported, "verification results have no series");
    const std::string key = name;
    const std::vector<double>* v = nullptr;
    if (key == "t") v = &r->report.times;
    else if (key == "a") v = &r->report.a;
    else v = &r->report.metric(key);
    *data = v->data();
    *len = v->size();
  });
}

void mlab_result_free(mlab_result* r) { delete r; }

}  // extern "C"
