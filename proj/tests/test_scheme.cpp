#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "scheme.hpp"

using namespace recweave;
using scheme::Scheme;
using scheme::UnfoldEntry;

namespace {

Scheme make(int64_t delta_p, const char* base, const char* step) {
  std::string text = "name = t\ndelta_p = " + std::to_string(delta_p) + "\nbase = " +
                     base + "\nstep = " + std::string(step) + "\n";
  return scheme::parse_scheme_text(text);
}

}  // namespace

TEST_CASE("recursive evaluation, frozen values") {
  Scheme sum = make(-1, "x", "x + y");
  // 0+1+...+x
  CHECK(scheme::rec_oracle(sum, 0) == 0);
  CHECK(scheme::rec_oracle(sum, 1) == 1);
  CHECK(scheme::rec_oracle(sum, 3) == 6);
  CHECK(scheme::rec_oracle(sum, 10) == 55);

  Scheme sum2 = make(-2, "x", "x + y");
  // descends 3, 1, -1: 3 + 1 + (-1)
  CHECK(scheme::rec_oracle(sum2, 3) == 3);
  // descends 4, 2, 0: 4 + 2 + 0
  CHECK(scheme::rec_oracle(sum2, 4) == 6);

  Scheme prod = make(-1, "1", "x * y");
  CHECK(scheme::rec_oracle(prod, 0) == 1);
  CHECK(scheme::rec_oracle(prod, 5) == 120);

  Scheme diff = make(-1, "x", "x - y");
  // 3 - (2 - (1 - 0)) = 2
  CHECK(scheme::rec_oracle(diff, 3) == 2);
}

TEST_CASE("negative initial input is rejected, negative base positions are not") {
  Scheme sum2 = make(-2, "x", "x + y");
  try {
    scheme::rec_oracle(sum2, -1);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::negative_input);
  }
  CHECK(scheme::rec_oracle(sum2, 1) == 0);  // base fires at -1
}

TEST_CASE("unfold order: one base entry, then steps ascending") {
  Scheme sum2 = make(-2, "x", "x + y");
  std::vector<UnfoldEntry> got = scheme::unfold_trace(sum2, 3);
  std::vector<UnfoldEntry> want = {{'B', -1}, {'H', 1}, {'H', 3}};
  CHECK(got == want);

  got = scheme::unfold_trace(sum2, 0);
  want = {{'B', 0}};
  CHECK(got == want);

  Scheme sum = make(-1, "x", "x + y");
  got = scheme::unfold_trace(sum, 3);
  want = {{'B', 0}, {'H', 1}, {'H', 2}, {'H', 3}};
  CHECK(got == want);
}

TEST_CASE("unfold positions fold back to the oracle value") {
  // Replaying the unfold entries through base/step must reproduce
  // rec_oracle: that is exactly the consumer's job later.
  for (int64_t delta : {-1, -2, -3, -5}) {
    Scheme s = make(delta, "x", "x - y");
    for (int64_t x = 0; x <= 30; ++x) {
      auto entries = scheme::unfold_trace(s, x);
      REQUIRE(!entries.empty());
      REQUIRE(entries.front().tag == 'B');
      int64_t acc = scheme::eval_expr(*s.base, entries.front().arg);
      for (size_t i = 1; i < entries.size(); ++i) {
        REQUIRE(entries[i].tag == 'H');
        acc = scheme::eval_expr(*s.step, entries[i].arg, acc);
      }
      CHECK(acc == scheme::rec_oracle(s, x));
    }
  }
}

TEST_CASE("scheme text parsing") {
  Scheme s = scheme::parse_scheme_text(
      "# comment\n"
      "name = widget\n"
      "\n"
      "delta_p = -3\n"
      "base = x * 2\n"
      "step = x + y - 1\n");
  CHECK(s.name == "widget");
  CHECK(s.delta_p == -3);
  CHECK(scheme::eval_expr(*s.base, 4) == 8);
}

TEST_CASE("scheme text rejections") {
  auto code_of = [](const char* text) {
    try {
      scheme::parse_scheme_text(text);
      return errc::io;  // anything distinct from the expected codes
    } catch (const Error& e) {
      return e.code();
    }
  };
  CHECK(code_of("name = t\ndelta_p = 0\nbase = x\nstep = y\n") == errc::invalid_delta);
  CHECK(code_of("name = t\ndelta_p = -1\nbase = y\nstep = y\n") == errc::forbidden_variable);
  CHECK(code_of("name = t\ndelta_p = -1\nbase = x\n") == errc::syntax);          // missing step
  CHECK(code_of("name = t\ndelta_p = -1\nbase = x\nstep = x +\n") == errc::syntax);
  CHECK(code_of("name = t\ncolor = red\ndelta_p = -1\nbase = x\nstep = y\n") == errc::syntax);
  CHECK(code_of("name = t\nname = u\ndelta_p = -1\nbase = x\nstep = y\n") == errc::syntax);
  CHECK(code_of("name = 9lives\ndelta_p = -1\nbase = x\nstep = y\n") == errc::syntax);
  CHECK(code_of("just some words\n") == errc::syntax);
  CHECK(code_of("name = t\ndelta_p = x\nbase = x\nstep = y\n") == errc::syntax);
}

TEST_CASE("line numbers appear in parse errors") {
  try {
    scheme::parse_scheme_text("name = t\n\nbogus_key = 1\n");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
