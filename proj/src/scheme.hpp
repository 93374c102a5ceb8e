#pragma once

#include <string>
#include <vector>

#include "expr.hpp"

namespace recweave::scheme {

// A recursive scheme: result(x) = base(x) when x <= 0, otherwise
// step(x, result(x + delta_p)). delta_p <= -1 keeps the argument
// strictly decreasing, so every non-negative input terminates.
struct Scheme {
  std::string name;
  int64_t delta_p = -1;
  ExprPtr base;
  ExprPtr step;
};

// delta_p <= -1, base never references y, both expressions present.
void validate_scheme(const Scheme& s);

// Direct recursive evaluation — the reference everything else is checked
// against. x must be >= 0 (errc::negative_input).
int64_t rec_oracle(const Scheme& s, int64_t x);

struct UnfoldEntry {
  char tag;  // 'B' or 'H'
  int64_t arg;
  bool operator==(const UnfoldEntry&) const = default;
};

// Bottom-up application order: one B entry first, then the H entries
// with ascending arguments. Folding the list through eval_expr
// reproduces rec_oracle.
std::vector<UnfoldEntry> unfold_trace(const Scheme& s, int64_t x);

// Line-based `key = value` format with `#` comments. Exactly the keys
// name, delta_p, base and step are required; unknown or duplicate keys
// are errors.
Scheme parse_scheme_text(std::string_view text);
Scheme load_scheme_file(const std::string& path);

}  // namespace recweave::scheme
