#include "rir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "errors.hpp"

namespace recweave::rir {

namespace {

FnPtr freeze(Fn f) { return std::make_shared<const Fn>(std::move(f)); }

FnPtr node(Op op, std::vector<FnPtr> sub) {
  Fn f;
  f.op = op;
  f.sub = std::move(sub);
  return freeze(std::move(f));
}

bool is_permutation(const std::vector<int>& targets) {
  std::vector<bool> seen(targets.size(), false);
  for (int t : targets) {
    if (t < 1 || static_cast<size_t>(t) > targets.size() || seen[t - 1]) return false;
    seen[t - 1] = true;
  }
  return !targets.empty();
}

}  // namespace

FnPtr id() { return node(Op::id, {}); }
FnPtr inc() { return node(Op::inc, {}); }
FnPtr dec() { return node(Op::dec, {}); }
FnPtr neg() { return node(Op::neg, {}); }

FnPtr perm(std::vector<int> targets) {
  if (!is_permutation(targets))
    fail(errc::syntax, "perm: indices are not a permutation of 1..n");
  Fn f;
  f.op = Op::perm;
  f.perm = std::move(targets);
  return freeze(std::move(f));
}

FnPtr seq(FnPtr f, FnPtr g) { return node(Op::seq, {std::move(f), std::move(g)}); }
FnPtr par(FnPtr f, FnPtr g) { return node(Op::par, {std::move(f), std::move(g)}); }

FnPtr sel(FnPtr on_pos, FnPtr on_zero, FnPtr on_neg) {
  return node(Op::sel, {std::move(on_pos), std::move(on_zero), std::move(on_neg)});
}

FnPtr it(FnPtr body) { return node(Op::it, {std::move(body)}); }
FnPtr inv(FnPtr body) { return node(Op::inv, {std::move(body)}); }

FnPtr call(std::string name) {
  Fn f;
  f.op = Op::call;
  f.name = std::move(name);
  return freeze(std::move(f));
}

FnPtr emit(int slot, int arity) {
  if (slot < 1 || arity < slot)
    fail(errc::syntax, "emit: slot must satisfy 1 <= slot <= arity");
  Fn f;
  f.op = Op::emit;
  f.emit_slot = slot;
  f.emit_arity = arity;
  return freeze(std::move(f));
}

bool operator==(const Fn& a, const Fn& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::perm: return a.perm == b.perm;
    case Op::call: return a.name == b.name;
    case Op::emit: return a.emit_slot == b.emit_slot && a.emit_arity == b.emit_arity;
    default: break;
  }
  if (a.sub.size() != b.sub.size()) return false;
  for (size_t i = 0; i < a.sub.size(); ++i)
    if (!(*a.sub[i] == *b.sub[i])) return false;
  return true;
}

void Defs::define(std::string name, int declared_arity, FnPtr body) {
  if (!body) fail(errc::syntax, "define: missing body for '" + name + "'");
  if (map_.count(name)) fail(errc::syntax, "define: duplicate name '" + name + "'");
  // Bodies may only call names already present, which rules out recursion.
  int got = arity(*body, *this);
  if (got != declared_arity)
    fail(errc::arity_mismatch, "define: '" + name + "' declared arity " +
                                   std::to_string(declared_arity) + " but body has arity " +
                                   std::to_string(got));
  order_.push_back(name);
  map_.emplace(std::move(name), Entry{declared_arity, std::move(body)});
}

const Defs::Entry* Defs::find(std::string_view name) const {
  auto it = map_.find(name);
  return it == map_.end() ? nullptr : &it->second;
}

const Defs::Entry& Defs::at(std::string_view name) const {
  const Entry* e = find(name);
  if (!e) fail(errc::unknown_name, "unknown definition '" + std::string(name) + "'");
  return *e;
}

std::vector<std::string> Defs::names() const { return order_; }

int arity(const Fn& f, const Defs& defs) {
  switch (f.op) {
    case Op::id:
    case Op::inc:
    case Op::dec:
    case Op::neg: return 1;
    case Op::perm: return static_cast<int>(f.perm.size());
    case Op::seq: {
      int a = arity(*f.sub[0], defs);
      int b = arity(*f.sub[1], defs);
      if (a != b)
        fail(errc::arity_mismatch, "seq: arity " + std::to_string(a) + " composed with arity " +
                                       std::to_string(b) + " in " + print_rir(f));
      return a;
    }
    case Op::par: return arity(*f.sub[0], defs) + arity(*f.sub[1], defs);
    case Op::sel: {
      int g = arity(*f.sub[0], defs);
      int z = arity(*f.sub[1], defs);
      int s = arity(*f.sub[2], defs);
      if (g != z || z != s)
        fail(errc::arity_mismatch, "if: branch arities differ in " + print_rir(f));
      return g + 1;
    }
    case Op::it: return arity(*f.sub[0], defs) + 1;
    case Op::inv: return arity(*f.sub[0], defs);
    case Op::call: return defs.at(f.name).declared_arity;
    case Op::emit: return f.emit_arity;
  }
  fail(errc::syntax, "arity: corrupt node");
}

namespace {

// One evaluation: caches per-node arities (par splits need them on every
// visit) and materialized inverses (inv bodies inside loops).
class Interp {
 public:
  Interp(const Defs& defs, const EffectSink& sink) : defs_(defs), sink_(sink) {}

  Tuple run(const Fn& f, Tuple t) {
    switch (f.op) {
      case Op::id: return t;
      case Op::inc:
        t[0] = checked_add(t[0], 1);
        return t;
      case Op::dec:
        t[0] = checked_sub(t[0], 1);
        return t;
      case Op::neg:
        t[0] = checked_neg(t[0]);
        return t;
      case Op::perm: {
        Tuple out(t.size());
        for (size_t k = 0; k < t.size(); ++k) out[k] = t[f.perm[k] - 1];
        return out;
      }
      case Op::seq: return run(*f.sub[1], run(*f.sub[0], std::move(t)));
      case Op::par: {
        size_t split = static_cast<size_t>(ar(*f.sub[0]));
        Tuple left(t.begin(), t.begin() + split);
        Tuple right(t.begin() + split, t.end());
        left = run(*f.sub[0], std::move(left));
        right = run(*f.sub[1], std::move(right));
        left.insert(left.end(), right.begin(), right.end());
        return left;
      }
      case Op::sel: {
        int64_t ctrl = t.back();
        t.pop_back();
        const Fn& branch = ctrl > 0 ? *f.sub[0] : ctrl == 0 ? *f.sub[1] : *f.sub[2];
        t = run(branch, std::move(t));
        t.push_back(ctrl);
        return t;
      }
      case Op::it: {
        int64_t ctrl = t.back();
        t.pop_back();
        uint64_t reps = ctrl < 0 ? -static_cast<uint64_t>(ctrl) : static_cast<uint64_t>(ctrl);
        for (uint64_t i = 0; i < reps; ++i) t = run(*f.sub[0], std::move(t));
        t.push_back(ctrl);
        return t;
      }
      case Op::inv: return run(*inverse_of(f.sub[0]), std::move(t));
      case Op::call: return run(*defs_.at(f.name).body, std::move(t));
      case Op::emit:
        if (sink_) sink_(t[f.emit_slot - 1]);
        return t;
    }
    fail(errc::syntax, "interpret: corrupt node");
  }

  int ar(const Fn& f) {
    auto it = arities_.find(&f);
    if (it != arities_.end()) return it->second;
    int a = arity(f, defs_);
    arities_.emplace(&f, a);
    return a;
  }

 private:
  // inv(call(N)) is symbolic: resolve N here, then invert its body.
  const FnPtr& inverse_of(const FnPtr& f) {
    auto it = inverses_.find(f.get());
    if (it != inverses_.end()) return it->second;
    FnPtr inv_fn =
        f->op == Op::call ? invert(defs_.at(f->name).body) : invert(f);
    return inverses_.emplace(f.get(), std::move(inv_fn)).first->second;
  }

  const Defs& defs_;
  const EffectSink& sink_;
  std::unordered_map<const Fn*, int> arities_;
  std::unordered_map<const Fn*, FnPtr> inverses_;
};

}  // namespace

Tuple interpret(const Fn& f, Tuple input, const Defs& defs, const EffectSink& sink) {
  int need = arity(f, defs);
  if (static_cast<size_t>(need) != input.size())
    fail(errc::arity_mismatch, "interpret: tuple has " + std::to_string(input.size()) +
                                   " ports but the function needs " + std::to_string(need));
  return Interp(defs, sink).run(f, std::move(input));
}

FnPtr invert(const FnPtr& f) {
  switch (f->op) {
    case Op::id:
    case Op::neg: return f;  // self-inverse
    case Op::inc: return dec();
    case Op::dec: return inc();
    case Op::perm: {
      std::vector<int> inv_targets(f->perm.size());
      for (size_t k = 0; k < f->perm.size(); ++k) inv_targets[f->perm[k] - 1] = static_cast<int>(k) + 1;
      return perm(std::move(inv_targets));
    }
    case Op::seq: return seq(invert(f->sub[1]), invert(f->sub[0]));
    case Op::par: return par(invert(f->sub[0]), invert(f->sub[1]));
    case Op::sel: return sel(invert(f->sub[0]), invert(f->sub[1]), invert(f->sub[2]));
    case Op::it: return it(invert(f->sub[0]));
    case Op::inv: return f->sub[0];
    case Op::call: return inv(f);  // resolved against the definitions when interpreted
    case Op::emit:
      fail(errc::non_invertible_effect, "invert: emit has no inverse");
  }
  fail(errc::syntax, "invert: corrupt node");
}

namespace {

bool contains_emit_inner(const Fn& f, const Defs& defs,
                         std::unordered_set<const Fn*>& visited) {
  if (!visited.insert(&f).second) return false;
  switch (f.op) {
    case Op::emit: return true;
    case Op::call: return contains_emit_inner(*defs.at(f.name).body, defs, visited);
    default:
      for (const auto& s : f.sub)
        if (contains_emit_inner(*s, defs, visited)) return true;
      return false;
  }
}

}  // namespace

bool contains_emit(const Fn& f, const Defs& defs) {
  std::unordered_set<const Fn*> visited;
  return contains_emit_inner(f, defs, visited);
}

FnPtr strip_emits(const FnPtr& f) {
  switch (f->op) {
    case Op::emit: {
      if (f->emit_arity == 1) return id();
      std::vector<int> identity(f->emit_arity);
      for (int k = 0; k < f->emit_arity; ++k) identity[k] = k + 1;
      return perm(std::move(identity));
    }
    case Op::seq: return seq(strip_emits(f->sub[0]), strip_emits(f->sub[1]));
    case Op::par: return par(strip_emits(f->sub[0]), strip_emits(f->sub[1]));
    case Op::sel:
      return sel(strip_emits(f->sub[0]), strip_emits(f->sub[1]), strip_emits(f->sub[2]));
    case Op::it: return it(strip_emits(f->sub[0]));
    case Op::inv: return inv(strip_emits(f->sub[0]));
    default: return f;  // leaves and calls (definitions are emit-free)
  }
}

bool check_reversibility(const FnPtr& f, const Tuple& t, const Defs& defs) {
  if (contains_emit(*f, defs))
    fail(errc::non_invertible_effect, "check_reversibility: function contains emit");
  Tuple forward = interpret(*f, t, defs);
  Tuple back = interpret(*invert(f), std::move(forward), defs);
  return back == t;
}

Defs stdlib() {
  Defs d;
  d.define("sum", 2, it(inc()));
  d.define("sub", 2, inv(call("sum")));
  d.define("mul", 3, seq(perm({3, 1, 2}), it(call("sum"))));
  // Selection tree: the last port picks the outer branch, the second
  // port (a saturation counter) picks the inner one.
  d.define("disSel", 3,
           sel(seq(sel(id(), id(), id()), par(id(), id())),
               seq(sel(id(), id(), id()), par(id(), inc())),
               seq(sel(dec(), dec(), id()), par(id(), inc()))));
  // One division round over (remainder, divisor, quotient, counter).
  d.define("disStep", 4,
           seq(par(call("sub"), par(inc(), id())),
               seq(perm({2, 3, 4, 1}),
                   seq(par(id(), call("disSel")), perm({4, 1, 2, 3})))));
  d.define("quo", 5,
           seq(perm({4, 1, 2, 3, 5}),
               seq(par(call("sum"), par(id(), par(id(), id()))),
                   seq(perm({2, 3, 4, 5, 1}), it(call("disStep"))))));
  return d;
}

// ---- text form ----------------------------------------------------------

namespace {

struct Token {
  enum class Kind { ident, number, lparen, rparen, end };
  Kind kind;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    size_t start = pos_;
    if (pos_ == text_.size()) {
      current_ = {Token::Kind::end, "", start};
      return;
    }
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      current_ = {Token::Kind::lparen, "(", start};
    } else if (c == ')') {
      ++pos_;
      current_ = {Token::Kind::rparen, ")", start};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      current_ = {Token::Kind::number, std::string(text_.substr(start, pos_ - start)), start};
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_'))
        ++pos_;
      current_ = {Token::Kind::ident, std::string(text_.substr(start, pos_ - start)), start};
    } else {
      fail(errc::syntax,
           "rir: unexpected '" + std::string(1, c) + "' at position " + std::to_string(start));
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  Token current_;
};

class RirParser {
 public:
  explicit RirParser(std::string_view text) : lex_(text) {}

  FnPtr run() {
    FnPtr f = fn();
    if (lex_.peek().kind != Token::Kind::end)
      fail(errc::syntax, "rir: trailing input at position " + std::to_string(lex_.peek().pos));
    return f;
  }

 private:
  FnPtr fn() {
    Token head = expect(Token::Kind::ident, "combinator");
    const std::string& kw = head.text;
    if (kw == "id") return id();
    if (kw == "inc") return inc();
    if (kw == "dec") return dec();
    if (kw == "neg") return neg();
    if (kw == "perm") {
      open();
      std::vector<int> targets;
      while (lex_.peek().kind == Token::Kind::number) targets.push_back(number("index"));
      close();
      if (!is_permutation(targets))
        fail(errc::syntax, "rir: perm indices at position " + std::to_string(head.pos) +
                               " are not a permutation of 1..n");
      return perm(std::move(targets));
    }
    if (kw == "seq" || kw == "par") {
      open();
      FnPtr a = fn();
      FnPtr b = fn();
      close();
      return kw == "seq" ? seq(std::move(a), std::move(b)) : par(std::move(a), std::move(b));
    }
    if (kw == "if") {
      open();
      FnPtr g = fn();
      FnPtr z = fn();
      FnPtr s = fn();
      close();
      return sel(std::move(g), std::move(z), std::move(s));
    }
    if (kw == "it" || kw == "inv") {
      open();
      FnPtr body = fn();
      close();
      return kw == "it" ? it(std::move(body)) : inv(std::move(body));
    }
    if (kw == "call") {
      open();
      Token name = expect(Token::Kind::ident, "definition name");
      close();
      return call(name.text);
    }
    if (kw == "emit") {
      open();
      int slot = number("slot");
      int width = lex_.peek().kind == Token::Kind::number ? number("arity") : slot;
      close();
      if (slot < 1 || width < slot)
        fail(errc::syntax, "rir: emit at position " + std::to_string(head.pos) +
                               " needs 1 <= slot <= arity");
      return emit(slot, width);
    }
    fail(errc::syntax,
         "rir: unknown combinator '" + kw + "' at position " + std::to_string(head.pos));
  }

  Token expect(Token::Kind kind, const char* what) {
    Token t = lex_.next();
    if (t.kind != kind)
      fail(errc::syntax, std::string("rir: expected ") + what + " at position " +
                             std::to_string(t.pos));
    return t;
  }

  void open() { expect(Token::Kind::lparen, "'('"); }
  void close() { expect(Token::Kind::rparen, "')'"); }

  int number(const char* what) {
    Token t = expect(Token::Kind::number, what);
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      fail(errc::syntax, std::string("rir: ") + what + " out of range at position " +
                             std::to_string(t.pos));
    return v;
  }

  Lexer lex_;
};

void print_node(const Fn& f, std::string& out) {
  switch (f.op) {
    case Op::id: out += "id"; return;
    case Op::inc: out += "inc"; return;
    case Op::dec: out += "dec"; return;
    case Op::neg: out += "neg"; return;
    case Op::perm: {
      out += "perm(";
      for (size_t k = 0; k < f.perm.size(); ++k) {
        if (k) out += ' ';
        out += std::to_string(f.perm[k]);
      }
      out += ')';
      return;
    }
    case Op::seq:
    case Op::par: {
      out += f.op == Op::seq ? "seq(" : "par(";
      print_node(*f.sub[0], out);
      out += ' ';
      print_node(*f.sub[1], out);
      out += ')';
      return;
    }
    case Op::sel: {
      out += "if(";
      print_node(*f.sub[0], out);
      out += ' ';
      print_node(*f.sub[1], out);
      out += ' ';
      print_node(*f.sub[2], out);
      out += ')';
      return;
    }
    case Op::it:
    case Op::inv: {
      out += f.op == Op::it ? "it(" : "inv(";
      print_node(*f.sub[0], out);
      out += ')';
      return;
    }
    case Op::call:
      out += "call(";
      out += f.name;
      out += ')';
      return;
    case Op::emit:
      out += "emit(";
      out += std::to_string(f.emit_slot);
      if (f.emit_arity != f.emit_slot) {
        out += ' ';
        out += std::to_string(f.emit_arity);
      }
      out += ')';
      return;
  }
}

}  // namespace

FnPtr parse_rir(std::string_view text) { return RirParser(text).run(); }

std::string print_rir(const Fn& f) {
  std::string out;
  print_node(f, out);
  return out;
}

}  // namespace recweave::rir
