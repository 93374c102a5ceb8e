#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

namespace recweave::scheme {

// Arithmetic over the scheme variables. `x` is always in scope; `y` only
// inside step expressions (it names the value carried up from the
// previous application).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { literal, var_x, var_y, negate, add, sub, mul };
  Kind kind;
  int64_t value = 0;  // literal only
  ExprPtr lhs, rhs;   // negate uses lhs only
};

// Parses "x * (y - 3)" style text: integer literals, x, y, unary minus,
// + - *, parentheses. With allow_y=false a `y` is rejected with
// errc::forbidden_variable; malformed text raises errc::syntax with the
// offending position in the message.
ExprPtr parse_expr(std::string_view text, bool allow_y);

// y must be supplied when e references it (errc::missing_y otherwise).
int64_t eval_expr(const Expr& e, int64_t x, std::optional<int64_t> y = std::nullopt);

bool references_y(const Expr& e);

}  // namespace recweave::scheme
