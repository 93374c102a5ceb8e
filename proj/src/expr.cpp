#include "expr.hpp"

#include <cctype>
#include <charconv>

#include "errors.hpp"

namespace recweave::scheme {

namespace {

ExprPtr node(Expr::Kind k, int64_t v = 0, ExprPtr l = nullptr, ExprPtr r = nullptr) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->value = v;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

class Parser {
 public:
  Parser(std::string_view text, bool allow_y) : text_(text), allow_y_(allow_y) {}

  ExprPtr run() {
    auto e = expr();
    skip_ws();
    if (pos_ != text_.size())
      fail(errc::syntax, "expression: unexpected '" + std::string(1, text_[pos_]) +
                             "' at position " + std::to_string(pos_));
    return e;
  }

 private:
  // expr := term (('+'|'-') term)*
  ExprPtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        lhs = node(Expr::Kind::add, 0, lhs, term());
      else if (eat('-'))
        lhs = node(Expr::Kind::sub, 0, lhs, term());
      else
        return lhs;
    }
  }

  // term := factor ('*' factor)*
  ExprPtr term() {
    auto lhs = factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        lhs = node(Expr::Kind::mul, 0, lhs, factor());
      else
        return lhs;
    }
  }

  // factor := INT | 'x' | 'y' | '-' factor | '(' expr ')'
  ExprPtr factor() {
    skip_ws();
    if (pos_ == text_.size()) fail(errc::syntax, "expression: unexpected end of input");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return node(Expr::Kind::negate, 0, factor());
    }
    if (c == '(') {
      ++pos_;
      auto e = expr();
      skip_ws();
      if (!eat(')'))
        fail(errc::syntax, "expression: expected ')' at position " + std::to_string(pos_));
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return literal();
    if (c == 'x' && !is_name_char(peek_at(pos_ + 1))) {
      ++pos_;
      return node(Expr::Kind::var_x);
    }
    if (c == 'y' && !is_name_char(peek_at(pos_ + 1))) {
      if (!allow_y_)
        fail(errc::forbidden_variable,
             "expression: 'y' is only allowed in step expressions (position " +
                 std::to_string(pos_) + ")");
      ++pos_;
      return node(Expr::Kind::var_y);
    }
    fail(errc::syntax, "expression: unexpected '" + std::string(1, c) + "' at position " +
                           std::to_string(pos_));
  }

  ExprPtr literal() {
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    int64_t v = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || p != text_.data() + pos_)
      fail(errc::syntax,
           "expression: integer literal out of range at position " + std::to_string(start));
    return node(Expr::Kind::literal, v);
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  char peek_at(size_t i) const { return i < text_.size() ? text_[i] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view text_;
  bool allow_y_;
  size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expr(std::string_view text, bool allow_y) {
  return Parser(text, allow_y).run();
}

int64_t eval_expr(const Expr& e, int64_t x, std::optional<int64_t> y) {
  switch (e.kind) {
    case Expr::Kind::literal: return e.value;
    case Expr::Kind::var_x: return x;
    case Expr::Kind::var_y:
      if (!y) fail(errc::missing_y, "expression references y but no y value was supplied");
      return *y;
    case Expr::Kind::negate: return checked_neg(eval_expr(*e.lhs, x, y));
    case Expr::Kind::add: return checked_add(eval_expr(*e.lhs, x, y), eval_expr(*e.rhs, x, y));
    case Expr::Kind::sub: return checked_sub(eval_expr(*e.lhs, x, y), eval_expr(*e.rhs, x, y));
    case Expr::Kind::mul: return checked_mul(eval_expr(*e.lhs, x, y), eval_expr(*e.rhs, x, y));
  }
  fail(errc::syntax, "expression: corrupt node");
}

bool references_y(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::var_y: return true;
    case Expr::Kind::literal:
    case Expr::Kind::var_x: return false;
    case Expr::Kind::negate: return references_y(*e.lhs);
    default: return references_y(*e.lhs) || references_y(*e.rhs);
  }
}

}  // namespace recweave::scheme
