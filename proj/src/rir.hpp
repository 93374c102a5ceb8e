#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace recweave::rir {

// Combinators of the reversible IR. Every construct except emit has a
// structural inverse.
//
// Arity discipline:
//   id / inc / dec / neg        1
//   perm(i1 .. in)              n      output port k takes input port ik
//   seq(f g)                    arity(f), which must equal arity(g)
//   par(f g)                    arity(f) + arity(g)
//   if(g z s)                   branch arity + 1; last port is the
//                               control, dispatched on sign, never
//                               modified
//   it(f)                       arity(f) + 1; applies f |control| times
//   inv(f)                      arity(f)
//   call(NAME)                  the named definition's arity
//   emit(k [n])                 n; identity on the tuple, sends port k
//                               to the effect sink (not invertible)
struct Fn;
using FnPtr = std::shared_ptr<const Fn>;

enum class Op { id, inc, dec, neg, perm, seq, par, sel, it, inv, call, emit };

struct Fn {
  Op op;
  std::vector<FnPtr> sub;   // seq/par: 2, sel: 3, it/inv: 1
  std::vector<int> perm;    // 1-based input index per output port
  std::string name;         // call target
  int emit_slot = 0;        // 1-based
  int emit_arity = 0;
};

bool operator==(const Fn& a, const Fn& b);

FnPtr id();
FnPtr inc();
FnPtr dec();
FnPtr neg();
FnPtr perm(std::vector<int> targets);
FnPtr seq(FnPtr f, FnPtr g);
FnPtr par(FnPtr f, FnPtr g);
FnPtr sel(FnPtr on_pos, FnPtr on_zero, FnPtr on_neg);  // prints as "if"
FnPtr it(FnPtr body);
FnPtr inv(FnPtr body);
FnPtr call(std::string name);
FnPtr emit(int slot, int arity);

using Tuple = std::vector<int64_t>;

// Named definitions. A body may only call names defined before it, so a
// complete Defs can never recurse.
class Defs {
 public:
  struct Entry {
    int declared_arity;
    FnPtr body;
  };

  void define(std::string name, int declared_arity, FnPtr body);
  const Entry* find(std::string_view name) const;
  const Entry& at(std::string_view name) const;  // errc::unknown_name
  std::vector<std::string> names() const;        // insertion order

 private:
  std::vector<std::string> order_;
  std::map<std::string, Entry, std::less<>> map_;
};

// Fixture definitions used throughout the tests: sum, sub, mul, disSel,
// disStep, quo.
Defs stdlib();

// Number of tuple ports f consumes and produces. Checks the arity rules
// over the whole term (errc::arity_mismatch, errc::unknown_name).
int arity(const Fn& f, const Defs& defs);

// Called once per dynamic emit, in execution order.
using EffectSink = std::function<void(int64_t)>;

// Big-step evaluation. The input tuple length must equal arity(f).
Tuple interpret(const Fn& f, Tuple input, const Defs& defs, const EffectSink& sink = {});

// Structural inverse. emit anywhere in f raises
// errc::non_invertible_effect; inv(call(N)) stays symbolic and is
// resolved against the definitions at interpretation time.
FnPtr invert(const FnPtr& f);

bool contains_emit(const Fn& f, const Defs& defs);

// Replaces every emit with a same-arity identity, making f invertible.
FnPtr strip_emits(const FnPtr& f);

// interpret(invert(f), interpret(f, t)) == t. f must be emit-free.
bool check_reversibility(const FnPtr& f, const Tuple& t, const Defs& defs);

// Text form, lowercase and whitespace-separated:
//   fn ::= id | inc | dec | neg | perm(i1 .. in) | seq(fn fn)
//        | par(fn fn) | if(fn fn fn) | it(fn) | inv(fn) | call(NAME)
//        | emit(k) | emit(k n)
// print_rir(f) parses back to a structurally equal term. emit prints its
// declared arity n only when it differs from k.
FnPtr parse_rir(std::string_view text);
std::string print_rir(const Fn& f);

}  // namespace recweave::rir
