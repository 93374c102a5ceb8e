// End-to-end checks of the installed command surface: spawn the real
// binary, parse its output, inspect its exit code.

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "doctest.h"
#include "rir.hpp"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult cli(const std::string& args) {
  std::string cmd = std::string(RECWEAVE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  int rc = pclose(pipe);
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::string scheme(const char* name) {
  return std::string(RECWEAVE_SOURCE_DIR) + "/schemes/" + name;
}

}  // namespace

TEST_CASE("run: passing verdicts exit 0") {
  CmdResult r = cli("run " + scheme("sum.scheme") + " --input 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("RESULT 6\n") == 0);
  CHECK(r.out.find("VERDICT oracle_equal pass") != std::string::npos);
  CHECK(r.out.find("TRACE") == std::string::npos);  // off unless asked
}

TEST_CASE("run: --trace appends the canonical block") {
  CmdResult r = cli("run " + scheme("sum2.scheme") + " --input 3 --trace --producer reference");
  CHECK(r.exit_code == 0);
  const char* want =
      "TRACE\n"
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
  CHECK(r.out.find(want) != std::string::npos);
}

TEST_CASE("run: seeds do not change the output") {
  CmdResult a = cli("run " + scheme("prod.scheme") + " --input 5 --trace --seed 1");
  CmdResult b = cli("run " + scheme("prod.scheme") + " --input 5 --trace --seed 99");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("RESULT 120\n") == 0);
}

TEST_CASE("oracle prints the value and the unfolding") {
  CmdResult r = cli("oracle " + scheme("sum.scheme") + " --input 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "ORACLE 6\n"
        "UNFOLD B 0\n"
        "UNFOLD H 1\n"
        "UNFOLD H 2\n"
        "UNFOLD H 3\n");
}

TEST_CASE("check sweeps clean schemes") {
  CmdResult r = cli("check " + scheme("diff.scheme") + " --max-input 5 --seeds 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "RUNS 24\n"
        "FAILURES 0\n");
}

TEST_CASE("check with strict ancilla") {
  CmdResult r = cli("check " + scheme("sum2.scheme") + " --max-input 5 --strict-ancilla");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAILURES 0\n") != std::string::npos);
}

TEST_CASE("emit-rir output is machine-readable") {
  CmdResult r = cli("emit-rir --delta-p -1");
  CHECK(r.exit_code == 0);
  REQUIRE(!r.out.empty());
  std::string text = r.out.substr(0, r.out.find('\n'));
  CHECK_NOTHROW(recweave::rir::parse_rir(text));
}

TEST_CASE("config errors exit 2") {
  CHECK(cli("run " + std::string(RECWEAVE_SOURCE_DIR) +
            "/tests/data/bad_delta.scheme --input 2")
            .exit_code == 2);
  CHECK(cli("oracle " + scheme("sum.scheme") + " --input -1").exit_code == 2);
  CHECK(cli("run /no/such/file --input 1").exit_code == 2);
  CHECK(cli("emit-rir --delta-p 1").exit_code == 2);
  CHECK(cli("bogus-subcommand").exit_code == 2);
  CHECK(cli("run " + scheme("sum.scheme")).exit_code == 2);  // --input required
  CHECK(cli("run " + scheme("sum.scheme") + " --input 1 --producer turbo").exit_code == 2);
  CHECK(cli("").exit_code == 2);
}

TEST_CASE("verification failures exit 1, deadlocks exit 3") {
  CmdResult dup = cli("run " + scheme("sum.scheme") +
                      " --input 4 --inject-fault duplicate-last-put --timeout-ms 500");
  CHECK(dup.exit_code == 1);
  CHECK(dup.out.find("VERDICT message_count fail") != std::string::npos);

  CmdResult drop = cli("run " + scheme("sum.scheme") +
                       " --input 4 --inject-fault drop-last-put --timeout-ms 200");
  CHECK(drop.exit_code == 3);
  CHECK(drop.out.find("RESULT none\n") == 0);
  CHECK(drop.out.find("VERDICT no_deadlock fail") != std::string::npos);

  CmdResult check = cli("check " + scheme("sum.scheme") +
                        " --max-input 2 --inject-fault drop-last-put --timeout-ms 150");
  CHECK(check.exit_code == 1);
  CHECK(check.out.find("FIRST_FAILURE x=0") != std::string::npos);
}

TEST_CASE("help exits 0") {
  CHECK(cli("--help").exit_code == 0);
  CHECK(cli("run --help").exit_code == 0);
}
