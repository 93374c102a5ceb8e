#include <chrono>
#include <string>
#include <vector>

#include "channels.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "runtime.hpp"
#include "scheme.hpp"

using namespace recweave;
using namespace std::chrono_literals;
using runtime::ProducerKind;
using runtime::RunOptions;
using runtime::RunReport;

namespace {

scheme::Scheme make(int64_t delta_p, const char* base, const char* step) {
  return scheme::parse_scheme_text("name = t\ndelta_p = " + std::to_string(delta_p) +
                                   "\nbase = " + base + "\nstep = " + std::string(step) + "\n");
}

RunReport verified_run(const scheme::Scheme& s, int64_t x, ProducerKind kind, uint64_t seed = 0,
                       const RunOptions& opts = {}) {
  RunReport rep = runtime::run_interleaved(s, x, kind, seed, opts);
  runtime::verify_run(rep, s, x);
  return rep;
}

}  // namespace

TEST_CASE("canonical trace for the two-step descent") {
  scheme::Scheme s = make(-2, "x", "x + y");
  const std::string want =
      "SEQ=0 INJECT.PUT 3\n"
      "SEQ=1 INJECT.SWAP_IN 0 3\n"
      "SEQ=2 PROBE.PUT 2\n"
      "SEQ=3 PROBE.GET 2\n"
      "SEQ=4 PROBE.PUT -1\n"
      "SEQ=5 PROBE.GET -1\n"
      "SEQ=6 PROBE.PUT 1\n"
      "SEQ=7 PROBE.GET 1\n"
      "SEQ=8 PROBE.PUT 3\n"
      "SEQ=9 PROBE.GET 3\n"
      "SEQ=10 INJECT.SWAP_OUT 3 0\n"
      "SEQ=11 RESULT 3\n";
  for (ProducerKind kind : {ProducerKind::reference, ProducerKind::rir}) {
    CAPTURE(runtime::producer_kind_name(kind));
    RunReport rep = verified_run(s, 3, kind);
    CHECK(rep.result == 3);
    CHECK(rep.all_pass());
    CHECK(runtime::render_trace(rep.trace) == want);
  }
}

TEST_CASE("trace for input zero") {
  scheme::Scheme s = make(-1, "x", "x + y");
  RunReport rep = verified_run(s, 0, ProducerKind::reference);
  const std::string want =
      "SEQ=0 INJECT.PUT 0\n"
      "SEQ=1 INJECT.SWAP_IN 0 0\n"
      "SEQ=2 PROBE.PUT 0\n"
      "SEQ=3 PROBE.GET 0\n"
      "SEQ=4 PROBE.PUT 0\n"
      "SEQ=5 PROBE.GET 0\n"
      "SEQ=6 INJECT.SWAP_OUT 0 0\n"
      "SEQ=7 RESULT 0\n";
  CHECK(rep.all_pass());
  CHECK(runtime::render_trace(rep.trace) == want);
}

TEST_CASE("both producer kinds leave identical traces") {
  for (int64_t delta : {-1, -2, -3}) {
    scheme::Scheme s = make(delta, "x", "x - y");
    for (int64_t x = 0; x <= 10; ++x) {
      CAPTURE(delta);
      CAPTURE(x);
      RunReport a = verified_run(s, x, ProducerKind::reference);
      RunReport b = verified_run(s, x, ProducerKind::rir);
      CHECK(a.all_pass());
      CHECK(b.all_pass());
      CHECK(a.trace == b.trace);
    }
  }
}

TEST_CASE("seeds perturb scheduling but never the trace") {
  scheme::Scheme s = make(-2, "x", "x + y");
  RunReport base = verified_run(s, 7, ProducerKind::rir, 0);
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    RunReport rep = verified_run(s, 7, ProducerKind::rir, seed);
    CAPTURE(seed);
    CHECK(rep.all_pass());
    CHECK(rep.trace == base.trace);
  }
}

TEST_CASE("verdicts carry names and all_pass summarizes them") {
  scheme::Scheme s = make(-1, "x", "x + y");
  RunReport rep = verified_run(s, 5, ProducerKind::rir);
  CHECK(rep.verdicts.size() == 5);
  CHECK(rep.verdicts.at("oracle_equal"));
  CHECK(rep.verdicts.at("registers_restored"));
  CHECK(rep.verdicts.at("trace_deterministic"));
  CHECK(rep.verdicts.at("no_deadlock"));
  CHECK(rep.verdicts.at("message_count"));
  CHECK(rep.all_pass());
  CHECK_FALSE(rep.timed_out());
}

TEST_CASE("dropping the closing put is caught as a deadlock") {
  scheme::Scheme s = make(-1, "x", "x + y");
  RunOptions opts;
  opts.timeout = 200ms;
  opts.fault = channels::FaultKind::drop_put;
  RunReport rep = verified_run(s, 4, ProducerKind::reference, 0, opts);
  CHECK_FALSE(rep.consumer_done);
  CHECK(rep.consumer_timed_out);
  CHECK(rep.timed_out());
  CHECK_FALSE(rep.verdicts.at("no_deadlock"));
  CHECK_FALSE(rep.verdicts.at("message_count"));
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.consumer_error.find("timeout") != std::string::npos);
}

TEST_CASE("duplicating the closing put is caught by the message count") {
  scheme::Scheme s = make(-1, "x", "x + y");
  RunOptions opts;
  opts.timeout = 500ms;
  opts.fault = channels::FaultKind::duplicate_put;
  RunReport rep = verified_run(s, 4, ProducerKind::rir, 0, opts);
  CHECK(rep.verdicts.at("no_deadlock"));
  CHECK_FALSE(rep.verdicts.at("message_count"));
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.timed_out());
}

TEST_CASE("strict runs verify the gate registers too") {
  scheme::Scheme s = make(-2, "x", "x + y");
  RunOptions opts;
  opts.strict_ancilla = true;
  for (int64_t x : {3, 4}) {  // one divisible, one not
    for (ProducerKind kind : {ProducerKind::reference, ProducerKind::rir}) {
      CAPTURE(x);
      CAPTURE(runtime::producer_kind_name(kind));
      RunReport rep = verified_run(s, x, kind, 0, opts);
      CHECK(rep.all_pass());
    }
  }
}

TEST_CASE("sweep counts runs and stays green") {
  scheme::Scheme s = make(-1, "x", "x + y");
  runtime::SweepOptions opts;
  opts.seeds = 3;
  runtime::SweepSummary sum = runtime::sweep(s, 0, opts);
  CHECK(sum.runs == 2 * 3);  // two producer kinds, one input, three seeds
  CHECK(sum.failures == 0);
  CHECK(sum.first_failure.empty());
  CHECK_FALSE(sum.only_timeout_failures);

  sum = runtime::sweep(s, 6, {});
  CHECK(sum.runs == 14);
  CHECK(sum.failures == 0);
}

TEST_CASE("sweep reports the first counterexample under a fault") {
  scheme::Scheme s = make(-1, "x", "x + y");
  runtime::SweepOptions opts;
  opts.timeout = 150ms;
  opts.fault = channels::FaultKind::drop_put;
  runtime::SweepSummary sum = runtime::sweep(s, 2, opts);
  CHECK(sum.runs == 6);
  CHECK(sum.failures == 6);
  CHECK(sum.first_failure.find("x=0") != std::string::npos);
  CHECK(sum.first_failure.find("seed=0") != std::string::npos);
  // the dropped put also breaks the message-count law, so the failures
  // are not timeout-only
  CHECK_FALSE(sum.only_timeout_failures);
}

TEST_CASE("report rendering is line-oriented and stable") {
  scheme::Scheme s = make(-2, "x", "x + y");
  RunReport rep = verified_run(s, 3, ProducerKind::rir);
  std::string text = runtime::render_report(rep, /*include_trace=*/false);
  CHECK(text.find("RESULT 3\n") == 0);
  CHECK(text.find("VERDICT oracle_equal pass\n") != std::string::npos);
  CHECK(text.find("VERDICT message_count pass\n") != std::string::npos);
  CHECK(text.find("TRACE") == std::string::npos);
  std::string with_trace = runtime::render_report(rep, /*include_trace=*/true);
  CHECK(with_trace.find("TRACE\nSEQ=0 INJECT.PUT 3\n") != std::string::npos);
}

TEST_CASE("negative input is rejected before any thread spawns") {
  scheme::Scheme s = make(-1, "x", "x + y");
  CHECK_THROWS_AS(runtime::run_interleaved(s, -1, ProducerKind::rir, 0), Error);
}
