#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weave.hpp"

namespace recweave::runtime {

enum class ProducerKind { rir, reference };
const char* producer_kind_name(ProducerKind k);

// The canonical total order of a run. Per channel the commit order is
// exact (events are recorded under the channel lock); across channels
// events are linearized by the protocol's happens-before edges:
// INJECT.PUT, INJECT.SWAP_IN, the PROBE traffic, INJECT.SWAP_OUT,
// RESULT. The one racy pair — the producer's closing SWAP_OUT against
// the consumer's last PROBE.GET — is independent of it, so pinning it
// after the probe events keeps equal runs byte-identical.
enum class EventKind { inject_put, inject_swap_in, probe_put, probe_get, inject_swap_out, result };
const char* event_kind_name(EventKind k);

struct TraceEvent {
  EventKind kind;
  int64_t value = 0;
  std::optional<int64_t> returned;  // swaps carry back a second value
  bool operator==(const TraceEvent&) const = default;
};

// "SEQ=<n> <KIND> <value>[ <value>]" per line.
std::string render_trace(const std::vector<TraceEvent>& trace);

struct RunOptions {
  bool strict_ancilla = false;
  std::chrono::milliseconds timeout{5000};
  channels::FaultKind fault = channels::FaultKind::none;
};

struct RunReport {
  ProducerKind producer = ProducerKind::reference;
  int64_t input = 0;
  uint64_t seed = 0;
  bool strict_ancilla = false;

  bool consumer_done = false;
  bool producer_done = false;
  int64_t result = 0;            // valid when consumer_done
  std::string consumer_error;    // empty when clean
  std::string producer_error;
  bool consumer_timed_out = false;
  bool producer_timed_out = false;

  std::vector<TraceEvent> trace;
  weave::Registers initial_registers;
  weave::Registers final_registers;  // empty unless the producer finished
  double wall_ms = 0.0;

  std::map<std::string, bool> verdicts;  // filled by verify_run
  bool all_pass() const;
  bool timed_out() const { return consumer_timed_out || producer_timed_out; }
};

// Spawns the consumer and the chosen producer on fresh channels and
// runs them to completion. The seed drives randomized yields and delays
// at every channel operation; it must never change what the trace
// contains. Worker failures (timeout, overflow) land in the report.
RunReport run_interleaved(const scheme::Scheme& s, int64_t x, ProducerKind kind, uint64_t seed,
                          const RunOptions& opts = {});

// Fills report.verdicts: oracle_equal (result matches the recursive
// oracle and the single-threaded engine), registers_restored (producer
// locals back to their initial values; the gate pair too when strict),
// trace_deterministic (pass here; sweep compares across seeds),
// no_deadlock (both parties finished), message_count (exactly g+2
// PROBE.PUT events reached the consumer).
void verify_run(RunReport& report, const scheme::Scheme& s, int64_t x);

struct SweepOptions {
  int seeds = 1;
  bool strict_ancilla = false;
  std::chrono::milliseconds timeout{5000};
  channels::FaultKind fault = channels::FaultKind::none;
};

struct SweepSummary {
  int64_t runs = 0;
  int64_t failures = 0;
  std::string first_failure;  // "x=3 producer=rir seed=2 check=no_deadlock"
  // True when every failing run failed only its no_deadlock verdict.
  bool only_timeout_failures = false;
};

// x in 0..=x_max, both producer kinds, opts.seeds seeds each. Traces
// must agree byte-for-byte across seeds of the same (x, kind) pair.
SweepSummary sweep(const scheme::Scheme& s, int64_t x_max, const SweepOptions& opts = {});

// Line-oriented, golden-stable: RESULT, VERDICT and ERROR lines, plus
// the trace block on request. No timestamps.
std::string render_report(const RunReport& report, bool include_trace);

}  // namespace recweave::runtime
