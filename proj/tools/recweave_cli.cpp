// Command-line front end. Talks to the core exclusively through the C
// API in recweave.h.
//
// Exit codes: 0 all checks passed, 1 verification failure, 2 usage or
// configuration error, 3 deadlock/timeout.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "recweave.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTimeout = 3;

int exit_for_status(rw_status st) {
  switch (st) {
    case RW_OK: return kExitPass;
    case RW_E_TIMEOUT: return kExitTimeout;
    case RW_E_SYNTAX:
    case RW_E_FORBIDDEN_VARIABLE:
    case RW_E_MISSING_Y:
    case RW_E_NEGATIVE_INPUT:
    case RW_E_INVALID_DELTA:
    case RW_E_IO:
    case RW_E_USAGE: return kExitUsage;
    default: return kExitVerification;
  }
}

int complain(rw_status st) {
  std::fprintf(stderr, "error (%s): %s\n", rw_status_name(st), rw_last_error());
  return exit_for_status(st);
}

using SchemePtr = std::unique_ptr<rw_scheme, decltype(&rw_scheme_free)>;

int load_scheme(const std::string& path, SchemePtr& out) {
  rw_scheme* raw = nullptr;
  rw_status st = rw_scheme_load(path.c_str(), &raw);
  if (st != RW_OK) return complain(st);
  out.reset(raw);
  return kExitPass;
}

rw_fault parse_fault(const std::string& name) {
  if (name == "drop-last-put") return RW_FAULT_DROP_LAST_PUT;
  if (name == "duplicate-last-put") return RW_FAULT_DUPLICATE_LAST_PUT;
  return RW_FAULT_NONE;
}

struct RunArgs {
  std::string scheme_path;
  int64_t input = 0;
  std::string producer = "rir";
  uint64_t seed = 0;
  bool trace = false;
  bool strict_ancilla = false;
  int64_t timeout_ms = 0;
  std::string fault = "none";
};

int cmd_run(const RunArgs& a) {
  SchemePtr scheme(nullptr, rw_scheme_free);
  if (int rc = load_scheme(a.scheme_path, scheme)) return rc;

  rw_run_options opts{};
  opts.producer = a.producer == "reference" ? RW_PRODUCER_REFERENCE : RW_PRODUCER_RIR;
  opts.seed = a.seed;
  opts.strict_ancilla = a.strict_ancilla ? 1 : 0;
  opts.timeout_ms = a.timeout_ms;
  opts.fault = parse_fault(a.fault);

  rw_report* report = nullptr;
  rw_status st = rw_run(scheme.get(), a.input, &opts, &report);
  if (st != RW_OK) return complain(st);
  std::unique_ptr<rw_report, decltype(&rw_report_free)> guard(report, rw_report_free);

  char* text = nullptr;
  st = rw_report_render(report, a.trace ? 1 : 0, &text);
  if (st != RW_OK) return complain(st);
  std::fputs(text, stdout);
  rw_string_free(text);

  if (rw_report_timed_out(report)) return kExitTimeout;
  return rw_report_all_pass(report) ? kExitPass : kExitVerification;
}

struct OracleArgs {
  std::string scheme_path;
  int64_t input = 0;
};

int cmd_oracle(const OracleArgs& a) {
  SchemePtr scheme(nullptr, rw_scheme_free);
  if (int rc = load_scheme(a.scheme_path, scheme)) return rc;

  int64_t value = 0;
  rw_status st = rw_rec_oracle(scheme.get(), a.input, &value);
  if (st != RW_OK) return complain(st);

  char* tags = nullptr;
  int64_t* args = nullptr;
  size_t len = 0;
  st = rw_unfold_trace(scheme.get(), a.input, &tags, &args, &len);
  if (st != RW_OK) return complain(st);

  std::printf("ORACLE %lld\n", static_cast<long long>(value));
  for (size_t i = 0; i < len; ++i)
    std::printf("UNFOLD %c %lld\n", tags[i], static_cast<long long>(args[i]));
  rw_unfold_free(tags, args);
  return kExitPass;
}

struct CheckArgs {
  std::string scheme_path;
  int64_t max_input = 0;
  int seeds = 1;
  bool strict_ancilla = false;
  int64_t timeout_ms = 0;
  std::string fault = "none";
};

int cmd_check(const CheckArgs& a) {
  SchemePtr scheme(nullptr, rw_scheme_free);
  if (int rc = load_scheme(a.scheme_path, scheme)) return rc;

  rw_sweep_options opts{};
  opts.max_input = a.max_input;
  opts.seeds = a.seeds;
  opts.strict_ancilla = a.strict_ancilla ? 1 : 0;
  opts.timeout_ms = a.timeout_ms;
  opts.fault = parse_fault(a.fault);

  rw_summary* summary = nullptr;
  rw_status st = rw_sweep(scheme.get(), &opts, &summary);
  if (st != RW_OK) return complain(st);
  std::unique_ptr<rw_summary, decltype(&rw_summary_free)> guard(summary, rw_summary_free);

  std::printf("RUNS %lld\n", static_cast<long long>(rw_summary_runs(summary)));
  std::printf("FAILURES %lld\n", static_cast<long long>(rw_summary_failures(summary)));
  if (rw_summary_failures(summary) == 0) return kExitPass;
  std::printf("FIRST_FAILURE %s\n", rw_summary_first_failure(summary));
  return rw_summary_only_timeouts(summary) ? kExitTimeout : kExitVerification;
}

struct EmitArgs {
  int64_t delta_p = 0;
  bool strict_ancilla = false;
};

int cmd_emit_rir(const EmitArgs& a) {
  rw_plan* plan = nullptr;
  rw_status st = rw_gen_producer(a.delta_p, a.strict_ancilla ? 1 : 0, &plan);
  if (st != RW_OK) return complain(st);
  std::unique_ptr<rw_plan, decltype(&rw_plan_free)> guard(plan, rw_plan_free);

  char* text = nullptr;
  st = rw_plan_print(plan, &text);
  if (st != RW_OK) return complain(st);
  std::puts(text);
  rw_string_free(text);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recursion weaving over rendezvous channels"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "interleave producer and consumer, verify the run");
  run->add_option("scheme", run_args.scheme_path, "scheme file")->required();
  run->add_option("--input", run_args.input, "input value (>= 0)")->required();
  run->add_option("--producer", run_args.producer, "producer kind")
      ->check(CLI::IsMember({"rir", "reference"}))
      ->capture_default_str();
  run->add_option("--seed", run_args.seed, "scheduler seed")->capture_default_str();
  run->add_flag("--trace", run_args.trace, "print the event trace");
  run->add_flag("--strict-ancilla", run_args.strict_ancilla,
                "require the gate registers to be restored too");
  run->add_option("--timeout-ms", run_args.timeout_ms, "channel timeout (default 5000)");
  run->add_option("--inject-fault", run_args.fault, "sabotage the closing probe put")
      ->check(CLI::IsMember({"none", "drop-last-put", "duplicate-last-put"}))
      ->capture_default_str();

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "recursive evaluation and unfold order");
  oracle->add_option("scheme", oracle_args.scheme_path, "scheme file")->required();
  oracle->add_option("--input", oracle_args.input, "input value (>= 0)")->required();

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check", "sweep inputs, producers and seeds");
  check->add_option("scheme", check_args.scheme_path, "scheme file")->required();
  check->add_option("--max-input", check_args.max_input, "sweep 0..=N")->required();
  check->add_option("--seeds", check_args.seeds, "scheduler seeds per input")
      ->capture_default_str();
  check->add_flag("--strict-ancilla", check_args.strict_ancilla,
                  "require the gate registers to be restored too");
  check->add_option("--timeout-ms", check_args.timeout_ms, "channel timeout (default 5000)");
  check->add_option("--inject-fault", check_args.fault, "sabotage the closing probe put")
      ->check(CLI::IsMember({"none", "drop-last-put", "duplicate-last-put"}))
      ->capture_default_str();

  EmitArgs emit_args;
  CLI::App* emit = app.add_subcommand("emit-rir", "print the generated producer program");
  emit->add_option("--delta-p", emit_args.delta_p, "step size (<= -1)")->required();
  emit->add_flag("--strict-ancilla", emit_args.strict_ancilla,
                 "generate the gate-restoring epilogue as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (run->parsed()) return cmd_run(run_args);
  if (oracle->parsed()) return cmd_oracle(oracle_args);
  if (check->parsed()) return cmd_check(check_args);
  if (emit->parsed()) return cmd_emit_rir(emit_args);
  return kExitUsage;
}
