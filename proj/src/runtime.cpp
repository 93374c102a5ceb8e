#include "runtime.hpp"

#include <mutex>
#include <random>
#include <thread>

#include "errors.hpp"

namespace recweave::runtime {

const char* producer_kind_name(ProducerKind k) {
  return k == ProducerKind::rir ? "rir" : "reference";
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::inject_put: return "INJECT.PUT";
    case EventKind::inject_swap_in: return "INJECT.SWAP_IN";
    case EventKind::probe_put: return "PROBE.PUT";
    case EventKind::probe_get: return "PROBE.GET";
    case EventKind::inject_swap_out: return "INJECT.SWAP_OUT";
    case EventKind::result: return "RESULT";
  }
  return "?";
}

std::string render_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (size_t i = 0; i < trace.size(); ++i) {
    out += "SEQ=" + std::to_string(i) + ' ';
    out += event_kind_name(trace[i].kind);
    out += ' ' + std::to_string(trace[i].value);
    if (trace[i].returned) out += ' ' + std::to_string(*trace[i].returned);
    out += '\n';
  }
  return out;
}

bool RunReport::all_pass() const {
  if (verdicts.empty()) return false;
  for (const auto& [name, ok] : verdicts)
    if (!ok) return false;
  return true;
}

namespace {

// Collects per-channel commit logs; merged() linearizes them into the
// canonical order documented on EventKind.
class Recorder {
 public:
  void on_probe(const channels::ChannelEvent& ev) {
    std::lock_guard lock(m_);
    probe_.push_back({ev.site == channels::OpSite::probe_put ? EventKind::probe_put
                                                             : EventKind::probe_get,
                      ev.value, std::nullopt});
  }

  void on_inject(const channels::ChannelEvent& ev) {
    std::lock_guard lock(m_);
    switch (ev.site) {
      case channels::OpSite::inject_put:
        opening_.push_back({EventKind::inject_put, ev.value, std::nullopt});
        break;
      case channels::OpSite::inject_swap_in:
        opening_.push_back({EventKind::inject_swap_in, ev.value, ev.returned});
        break;
      case channels::OpSite::inject_swap_out:
        closing_.push_back({EventKind::inject_swap_out, ev.value, ev.returned});
        break;
      default: break;  // plain gets are not part of the weave protocol
    }
  }

  std::vector<TraceEvent> merged(std::optional<int64_t> result) {
    std::lock_guard lock(m_);
    std::vector<TraceEvent> out = opening_;
    out.insert(out.end(), probe_.begin(), probe_.end());
    out.insert(out.end(), closing_.begin(), closing_.end());
    if (result) out.push_back({EventKind::result, *result, std::nullopt});
    return out;
  }

 private:
  std::mutex m_;
  std::vector<TraceEvent> opening_;  // inject put + swap_in
  std::vector<TraceEvent> probe_;
  std::vector<TraceEvent> closing_;  // inject swap_out
};

uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Randomized yields/delays injected before each channel operation. One
// pacer per party, each touched only by its own thread.
struct Pacer {
  std::mt19937_64 rng;

  explicit Pacer(uint64_t seed) : rng(seed) {}

  void operator()() {
    switch (rng() & 3u) {
      case 0: break;
      case 1: std::this_thread::yield(); break;
      default: std::this_thread::sleep_for(std::chrono::microseconds(rng() % 64)); break;
    }
  }
};

weave::Registers initial_registers_for(ProducerKind kind) {
  weave::Registers r{{"x_local", 0}, {"w", 0}, {"g", 0}, {"e", 0}, {"s", 0}, {"divGate", 0}};
  if (kind == ProducerKind::reference) {
    r["nonDivGate"] = 1;
  } else {
    r["nonDivGate"] = 0;
    r["xCopy"] = 0;
  }
  return r;
}

weave::Registers run_plan(const weave::ProducerPlan& plan, channels::ProbeChannel& probe,
                          channels::InjectChannel& inject) {
  int64_t x0 = inject.swap_in(0);
  rir::Tuple t(plan.width(), 0);
  int x_slot = plan.slot("x");
  t[x_slot] = x0;
  rir::Defs no_defs;  // generated producers are closed terms
  rir::Tuple out = rir::interpret(*plan.program, std::move(t), no_defs,
                                  [&](int64_t v) { probe.put(v); });
  int64_t back = inject.swap_out(out[x_slot]);
  weave::Registers regs;
  for (int i = 0; i < plan.width(); ++i)
    if (i != x_slot) regs[plan.layout[i]] = out[i];
  regs["x_local"] = back;  // what swap_out handed back in exchange for x
  return regs;
}

std::string describe(const Error& e) {
  return std::string(errc_name(e.code())) + ": " + e.what();
}

}  // namespace

RunReport run_interleaved(const scheme::Scheme& s, int64_t x, ProducerKind kind, uint64_t seed,
                          const RunOptions& opts) {
  scheme::validate_scheme(s);
  if (x < 0)
    fail(errc::negative_input, "run: input must be >= 0, got " + std::to_string(x));

  RunReport rep;
  rep.producer = kind;
  rep.input = x;
  rep.seed = seed;
  rep.strict_ancilla = opts.strict_ancilla;
  rep.initial_registers = initial_registers_for(kind);

  channels::ProbeChannel probe(opts.timeout);
  channels::InjectChannel inject(opts.timeout);

  Recorder rec;
  probe.set_observer([&](const channels::ChannelEvent& ev) { rec.on_probe(ev); });
  inject.set_observer([&](const channels::ChannelEvent& ev) { rec.on_inject(ev); });

  if (opts.fault != channels::FaultKind::none) {
    // Sabotage the closing put; g + 2 is the protocol's full count.
    weave::Counters c = weave::expected_counters(s.delta_p, x);
    probe.arm_fault(opts.fault, static_cast<uint64_t>(c.g) + 2);
  }

  Pacer producer_pacer(splitmix64(seed * 2 + 1));
  Pacer consumer_pacer(splitmix64(seed * 2 + 2));
  probe.set_pre_op_hook([&](channels::OpSite site) {
    site == channels::OpSite::probe_put ? producer_pacer() : consumer_pacer();
  });
  inject.set_pre_op_hook([&](channels::OpSite site) {
    site == channels::OpSite::inject_put ? consumer_pacer() : producer_pacer();
  });

  std::optional<weave::ProducerPlan> plan;
  if (kind == ProducerKind::rir) plan = weave::gen_producer(s.delta_p, opts.strict_ancilla);

  auto t0 = std::chrono::steady_clock::now();
  // The consumer opens the protocol with INJECT.PUT.
  std::thread consumer_thread([&] {
    try {
      rep.result = weave::consumer(s, probe, inject, x);
      rep.consumer_done = true;
    } catch (const Error& e) {
      rep.consumer_error = describe(e);
      rep.consumer_timed_out = e.code() == errc::timeout;
    } catch (const std::exception& e) {
      rep.consumer_error = e.what();
    }
  });
  std::thread producer_thread([&] {
    try {
      rep.final_registers = kind == ProducerKind::reference
                                ? weave::reference_producer(s.delta_p, probe, inject,
                                                            opts.strict_ancilla)
                                : run_plan(*plan, probe, inject);
      rep.producer_done = true;
    } catch (const Error& e) {
      rep.producer_error = describe(e);
      rep.producer_timed_out = e.code() == errc::timeout;
    } catch (const std::exception& e) {
      rep.producer_error = e.what();
    }
  });
  consumer_thread.join();
  producer_thread.join();
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

  rep.trace = rec.merged(rep.consumer_done ? std::optional(rep.result) : std::nullopt);
  return rep;
}

void verify_run(RunReport& rep, const scheme::Scheme& s, int64_t x) {
  bool no_deadlock = rep.consumer_done && rep.producer_done;

  bool oracle = false;
  if (rep.consumer_done) {
    try {
      int64_t want = scheme::rec_oracle(s, x);
      weave::ItgResult mono = weave::monolithic_itg(s, x);
      oracle = rep.result == want && rep.result == mono.y;
    } catch (const Error&) {
      oracle = false;  // the oracle itself failed (e.g. overflow)
    }
  }

  bool restored = rep.producer_done;
  if (restored) {
    std::vector<std::string> keys = {"x_local", "w", "g", "e", "s"};
    if (rep.strict_ancilla) {
      keys.push_back("divGate");
      keys.push_back("nonDivGate");
    }
    for (const std::string& key : keys) {
      auto fin = rep.final_registers.find(key);
      auto ini = rep.initial_registers.find(key);
      if (fin == rep.final_registers.end() || ini == rep.initial_registers.end() ||
          fin->second != ini->second) {
        restored = false;
        break;
      }
    }
  }

  // Emission law: the producer sends exactly g+2 probe values. A dropped
  // or duplicated put shows up here even when nobody deadlocks.
  bool message_count = false;
  try {
    weave::Counters c = weave::expected_counters(s.delta_p, x);
    int64_t puts = 0;
    for (const TraceEvent& ev : rep.trace)
      if (ev.kind == EventKind::probe_put) ++puts;
    message_count = puts == checked_add(c.g, 2);
  } catch (const Error&) {
    message_count = false;
  }

  rep.verdicts = {{"oracle_equal", oracle},
                  {"registers_restored", restored},
                  {"trace_deterministic", true},  // cross-seed: see sweep
                  {"no_deadlock", no_deadlock},
                  {"message_count", message_count}};
}

namespace {

const char* kVerdictOrder[] = {"oracle_equal", "registers_restored", "trace_deterministic",
                               "no_deadlock", "message_count"};

std::string first_failed_verdict(const RunReport& rep) {
  for (const char* name : kVerdictOrder) {
    auto it = rep.verdicts.find(name);
    if (it != rep.verdicts.end() && !it->second) return name;
  }
  return "unknown";
}

bool failed_only_deadlock(const RunReport& rep) {
  for (const auto& [name, ok] : rep.verdicts)
    if (!ok && name != "no_deadlock") return false;
  return true;
}

}  // namespace

SweepSummary sweep(const scheme::Scheme& s, int64_t x_max, const SweepOptions& opts) {
  scheme::validate_scheme(s);
  if (x_max < 0)
    fail(errc::negative_input, "sweep: max input must be >= 0, got " + std::to_string(x_max));
  if (opts.seeds < 1) fail(errc::negative_input, "sweep: need at least one seed");

  RunOptions run_opts;
  run_opts.strict_ancilla = opts.strict_ancilla;
  run_opts.timeout = opts.timeout;
  run_opts.fault = opts.fault;

  SweepSummary sum;
  sum.only_timeout_failures = true;
  for (int64_t x = 0; x <= x_max; ++x) {
    for (ProducerKind kind : {ProducerKind::rir, ProducerKind::reference}) {
      std::string baseline;
      for (int seed = 0; seed < opts.seeds; ++seed) {
        RunReport rep = run_interleaved(s, x, kind, static_cast<uint64_t>(seed), run_opts);
        verify_run(rep, s, x);
        std::string rendered = render_trace(rep.trace);
        if (seed == 0)
          baseline = rendered;
        else if (rendered != baseline)
          rep.verdicts["trace_deterministic"] = false;
        ++sum.runs;
        if (!rep.all_pass()) {
          ++sum.failures;
          sum.only_timeout_failures = sum.only_timeout_failures && failed_only_deadlock(rep);
          if (sum.first_failure.empty()) {
            sum.first_failure = "x=" + std::to_string(x) +
                                " producer=" + producer_kind_name(kind) +
                                " seed=" + std::to_string(seed) +
                                " check=" + first_failed_verdict(rep);
          }
        }
      }
    }
  }
  if (sum.failures == 0) sum.only_timeout_failures = false;
  return sum;
}

std::string render_report(const RunReport& rep, bool include_trace) {
  std::string out;
  out += rep.consumer_done ? "RESULT " + std::to_string(rep.result) + "\n" : "RESULT none\n";
  for (const char* name : kVerdictOrder) {
    auto it = rep.verdicts.find(name);
    if (it == rep.verdicts.end()) continue;
    out += std::string("VERDICT ") + name + (it->second ? " pass" : " fail") + "\n";
  }
  if (!rep.consumer_error.empty()) out += "ERROR consumer " + rep.consumer_error + "\n";
  if (!rep.producer_error.empty()) out += "ERROR producer " + rep.producer_error + "\n";
  if (include_trace) {
    out += "TRACE\n";
    out += render_trace(rep.trace);
  }
  return out;
}

}  // namespace recweave::runtime
