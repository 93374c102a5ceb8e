#include "recweave.h"

#include <cstring>
#include <new>
#include <string>

#include "errors.hpp"
#include "rir.hpp"
#include "runtime.hpp"
#include "scheme.hpp"
#include "weave.hpp"

using recweave::Error;
using recweave::errc;

struct rw_scheme {
  recweave::scheme::Scheme impl;
};
struct rw_program {
  recweave::rir::FnPtr impl;
};
struct rw_plan {
  recweave::weave::ProducerPlan impl;
};
struct rw_report {
  recweave::runtime::RunReport impl;
};
struct rw_summary {
  recweave::runtime::SweepSummary impl;
};

namespace {

thread_local std::string g_last_error;

rw_status to_status(errc c) {
  switch (c) {
    case errc::syntax: return RW_E_SYNTAX;
    case errc::forbidden_variable: return RW_E_FORBIDDEN_VARIABLE;
    case errc::missing_y: return RW_E_MISSING_Y;
    case errc::overflow: return RW_E_OVERFLOW;
    case errc::negative_input: return RW_E_NEGATIVE_INPUT;
    case errc::invalid_delta: return RW_E_INVALID_DELTA;
    case errc::arity_mismatch: return RW_E_ARITY_MISMATCH;
    case errc::unknown_name: return RW_E_UNKNOWN_NAME;
    case errc::non_invertible_effect: return RW_E_NON_INVERTIBLE_EFFECT;
    case errc::timeout: return RW_E_TIMEOUT;
    case errc::io: return RW_E_IO;
  }
  return RW_E_INTERNAL;
}

template <typename F>
rw_status guarded(F&& body) {
  try {
    body();
    return RW_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RW_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RW_E_INTERNAL;
  }
}

rw_status usage(const char* message) {
  g_last_error = message;
  return RW_E_USAGE;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::chrono::milliseconds effective_timeout(int64_t timeout_ms) {
  return std::chrono::milliseconds(timeout_ms > 0 ? timeout_ms : 5000);
}

recweave::channels::FaultKind to_fault(rw_fault f) {
  switch (f) {
    case RW_FAULT_DROP_LAST_PUT: return recweave::channels::FaultKind::drop_put;
    case RW_FAULT_DUPLICATE_LAST_PUT: return recweave::channels::FaultKind::duplicate_put;
    default: return recweave::channels::FaultKind::none;
  }
}

}  // namespace

extern "C" {

const char* rw_status_name(rw_status st) {
  switch (st) {
    case RW_OK: return "ok";
    case RW_E_SYNTAX: return "syntax";
    case RW_E_FORBIDDEN_VARIABLE: return "forbidden-variable";
    case RW_E_MISSING_Y: return "missing-y";
    case RW_E_OVERFLOW: return "overflow";
    case RW_E_NEGATIVE_INPUT: return "negative-input";
    case RW_E_INVALID_DELTA: return "invalid-delta";
    case RW_E_ARITY_MISMATCH: return "arity-mismatch";
    case RW_E_UNKNOWN_NAME: return "unknown-name";
    case RW_E_NON_INVERTIBLE_EFFECT: return "non-invertible-effect";
    case RW_E_TIMEOUT: return "timeout";
    case RW_E_IO: return "io";
    case RW_E_USAGE: return "usage";
    case RW_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rw_last_error(void) { return g_last_error.c_str(); }

void rw_string_free(char* s) { delete[] s; }

/* ---- schemes ---------------------------------------------------------- */

rw_status rw_scheme_load(const char* path, rw_scheme** out) {
  if (!path || !out) return usage("rw_scheme_load: path and out are required");
  return guarded([&] { *out = new rw_scheme{recweave::scheme::load_scheme_file(path)}; });
}

rw_status rw_scheme_parse(const char* text, rw_scheme** out) {
  if (!text || !out) return usage("rw_scheme_parse: text and out are required");
  return guarded([&] { *out = new rw_scheme{recweave::scheme::parse_scheme_text(text)}; });
}

void rw_scheme_free(rw_scheme* s) { delete s; }

const char* rw_scheme_name(const rw_scheme* s) { return s ? s->impl.name.c_str() : ""; }

int64_t rw_scheme_delta_p(const rw_scheme* s) { return s ? s->impl.delta_p : 0; }

rw_status rw_rec_oracle(const rw_scheme* s, int64_t x, int64_t* out) {
  if (!s || !out) return usage("rw_rec_oracle: scheme and out are required");
  return guarded([&] { *out = recweave::scheme::rec_oracle(s->impl, x); });
}

rw_status rw_unfold_trace(const rw_scheme* s, int64_t x, char** tags, int64_t** args,
                          size_t* len) {
  if (!s || !tags || !args || !len)
    return usage("rw_unfold_trace: scheme, tags, args and len are required");
  return guarded([&] {
    auto entries = recweave::scheme::unfold_trace(s->impl, x);
    char* t = new char[entries.size()];
    int64_t* a = new int64_t[entries.size()];
    for (size_t i = 0; i < entries.size(); ++i) {
      t[i] = entries[i].tag;
      a[i] = entries[i].arg;
    }
    *tags = t;
    *args = a;
    *len = entries.size();
  });
}

void rw_unfold_free(char* tags, int64_t* args) {
  delete[] tags;
  delete[] args;
}

/* ---- reversible programs ---------------------------------------------- */

rw_status rw_rir_parse(const char* text, rw_program** out) {
  if (!text || !out) return usage("rw_rir_parse: text and out are required");
  return guarded([&] { *out = new rw_program{recweave::rir::parse_rir(text)}; });
}

void rw_program_free(rw_program* p) { delete p; }

rw_status rw_rir_print(const rw_program* p, char** text) {
  if (!p || !text) return usage("rw_rir_print: program and text are required");
  return guarded([&] { *text = copy_string(recweave::rir::print_rir(*p->impl)); });
}

rw_status rw_rir_arity(const rw_program* p, int* out) {
  if (!p || !out) return usage("rw_rir_arity: program and out are required");
  return guarded([&] {
    recweave::rir::Defs defs = recweave::rir::stdlib();
    *out = recweave::rir::arity(*p->impl, defs);
  });
}

rw_status rw_rir_interpret(const rw_program* p, const int64_t* values, size_t n,
                           int64_t* out_values, int64_t* emitted, size_t emitted_cap,
                           size_t* emitted_len) {
  if (!p || (!values && n) || !out_values)
    return usage("rw_rir_interpret: program, values and out_values are required");
  return guarded([&] {
    recweave::rir::Defs defs = recweave::rir::stdlib();
    size_t count = 0;
    auto sink = [&](int64_t v) {
      if (emitted && count < emitted_cap) emitted[count] = v;
      ++count;
    };
    recweave::rir::Tuple in(values, values + n);
    recweave::rir::Tuple out = recweave::rir::interpret(*p->impl, std::move(in), defs, sink);
    for (size_t i = 0; i < out.size(); ++i) out_values[i] = out[i];
    if (emitted_len) *emitted_len = count;
  });
}

rw_status rw_rir_invert(const rw_program* p, rw_program** out) {
  if (!p || !out) return usage("rw_rir_invert: program and out are required");
  return guarded([&] { *out = new rw_program{recweave::rir::invert(p->impl)}; });
}

/* ---- producer generation ---------------------------------------------- */

rw_status rw_gen_producer(int64_t delta_p, int strict_ancilla, rw_plan** out) {
  if (!out) return usage("rw_gen_producer: out is required");
  return guarded(
      [&] { *out = new rw_plan{recweave::weave::gen_producer(delta_p, strict_ancilla != 0)}; });
}

void rw_plan_free(rw_plan* p) { delete p; }

rw_status rw_plan_print(const rw_plan* p, char** text) {
  if (!p || !text) return usage("rw_plan_print: plan and text are required");
  return guarded([&] { *text = copy_string(recweave::rir::print_rir(*p->impl.program)); });
}

int rw_plan_width(const rw_plan* p) { return p ? p->impl.width() : 0; }

const char* rw_plan_register_name(const rw_plan* p, int slot) {
  if (!p || slot < 0 || slot >= p->impl.width()) return nullptr;
  return p->impl.layout[slot].c_str();
}

/* ---- interleaved runs -------------------------------------------------- */

rw_status rw_run(const rw_scheme* s, int64_t x, const rw_run_options* opts, rw_report** out) {
  if (!s || !out) return usage("rw_run: scheme and out are required");
  rw_run_options defaults{RW_PRODUCER_RIR, 0, 0, 0, RW_FAULT_NONE};
  const rw_run_options& o = opts ? *opts : defaults;
  return guarded([&] {
    recweave::runtime::RunOptions ro;
    ro.strict_ancilla = o.strict_ancilla != 0;
    ro.timeout = effective_timeout(o.timeout_ms);
    ro.fault = to_fault(o.fault);
    auto kind = o.producer == RW_PRODUCER_REFERENCE ? recweave::runtime::ProducerKind::reference
                                                    : recweave::runtime::ProducerKind::rir;
    recweave::runtime::RunReport rep =
        recweave::runtime::run_interleaved(s->impl, x, kind, o.seed, ro);
    recweave::runtime::verify_run(rep, s->impl, x);
    *out = new rw_report{std::move(rep)};
  });
}

void rw_report_free(rw_report* r) { delete r; }

int rw_report_result(const rw_report* r, int64_t* out) {
  if (!r || !r->impl.consumer_done) return 0;
  if (out) *out = r->impl.result;
  return 1;
}

int rw_report_verdict(const rw_report* r, const char* name) {
  if (!r || !name) return -1;
  auto it = r->impl.verdicts.find(name);
  if (it == r->impl.verdicts.end()) return -1;
  return it->second ? 1 : 0;
}

int rw_report_all_pass(const rw_report* r) { return r && r->impl.all_pass() ? 1 : 0; }

int rw_report_timed_out(const rw_report* r) { return r && r->impl.timed_out() ? 1 : 0; }

rw_status rw_report_render(const rw_report* r, int include_trace, char** text) {
  if (!r || !text) return usage("rw_report_render: report and text are required");
  return guarded(
      [&] { *text = copy_string(recweave::runtime::render_report(r->impl, include_trace != 0)); });
}

/* ---- sweeps ------------------------------------------------------------ */

rw_status rw_sweep(const rw_scheme* s, const rw_sweep_options* opts, rw_summary** out) {
  if (!s || !opts || !out) return usage("rw_sweep: scheme, opts and out are required");
  return guarded([&] {
    recweave::runtime::SweepOptions so;
    so.seeds = opts->seeds > 0 ? opts->seeds : 1;
    so.strict_ancilla = opts->strict_ancilla != 0;
    so.timeout = effective_timeout(opts->timeout_ms);
    so.fault = to_fault(opts->fault);
    recweave::runtime::SweepSummary sum =
        recweave::runtime::sweep(s->impl, opts->max_input, so);
    *out = new rw_summary{std::move(sum)};
  });
}

void rw_summary_free(rw_summary* m) { delete m; }

int64_t rw_summary_runs(const rw_summary* m) { return m ? m->impl.runs : 0; }

int64_t rw_summary_failures(const rw_summary* m) { return m ? m->impl.failures : 0; }

int rw_summary_only_timeouts(const rw_summary* m) {
  return m && m->impl.only_timeout_failures ? 1 : 0;
}

const char* rw_summary_first_failure(const rw_summary* m) {
  return m ? m->impl.first_failure.c_str() : "";
}

}  // extern "C"
