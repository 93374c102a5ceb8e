#include "weave.hpp"

#include <algorithm>
#include <functional>

#include "errors.hpp"

namespace recweave::weave {

namespace {

void require_delta(int64_t delta_p) {
  if (delta_p > -1)
    fail(errc::invalid_delta, "delta_p must be <= -1, got " + std::to_string(delta_p));
  checked_neg(delta_p);
}

void require_input(int64_t x, const char* who) {
  if (x < 0)
    fail(errc::negative_input, std::string(who) + ": input must be >= 0, got " + std::to_string(x));
}

}  // namespace

Counters expected_counters(int64_t delta_p, int64_t x) {
  require_delta(delta_p);
  require_input(x, "expected_counters");
  int64_t w = x;
  int64_t mag = checked_neg(delta_p);
  Counters c;
  if (w % mag == 0) {
    c.g = w / mag;
    c.e = 1;
  } else {
    // ceiling division; w and mag are both positive here
    c.g = checked_add(w, mag - 1) / mag;
    c.e = 0;
  }
  c.s = checked_sub(checked_add(w, 1), checked_add(c.g, c.e));
  return c;
}

Interval interval(int64_t w, int64_t delta_p) {
  require_delta(delta_p);
  Interval iv;
  iv.low = checked_add(w, checked_mul(checked_add(w, 1), delta_p));
  iv.high = w;
  return iv;
}

// ---- reference producer --------------------------------------------------

Registers reference_producer(int64_t delta_p, channels::ProbeChannel& probe,
                             channels::InjectChannel& inject, bool strict_ancilla) {
  require_delta(delta_p);
  int64_t s = 0, e = 0, g = 0, w = 0, x = 0;
  int64_t div_gate = 0, non_div_gate = 1;
  auto p = [&](int64_t v) { return checked_add(v, delta_p); };
  auto p_inv = [&](int64_t v) { return checked_sub(v, delta_p); };

  x = inject.swap_in(x);  // pick up the consumer's input, leave 0 behind
  w = checked_add(w, x);
  for (int64_t i = 0; i <= w; ++i) {
    if (x > 0)
      ++g;
    else if (x == 0)
      ++e;
    else
      ++s;
    x = p(x);
  }
  // e is 1 exactly when the walk touched 0; swap the gates that often.
  for (int64_t i = 0; i < e; ++i) {
    div_gate = checked_add(div_gate, non_div_gate);
    non_div_gate = checked_sub(div_gate, non_div_gate);
  }
  for (int64_t j = 0; j < div_gate; ++j) {
    probe.put(g);  // iteration count for the consumer
    for (int64_t i = 0; i <= w; ++i) {
      x = p_inv(x);
      if (x > 0) {
        --g;
        probe.put(x);  // step argument
      } else if (x == 0) {
        --e;
        probe.put(x);  // base argument
      } else {
        --s;
      }
    }
  }
  for (int64_t j = 0; j < non_div_gate; ++j) {
    probe.put(g);
    ++w;
    for (int64_t i = 0; i <= w; ++i) {
      x = p_inv(x);
      if (x > 0) {
        --g;
        x = p(x);
        probe.put(x);  // base or step argument, one step down
        x = p_inv(x);
      } else if (x == 0) {
        --e;
      } else {
        --s;
      }
    }
    --w;
    // the loop above overshoots by one rung: step x back down and
    // return the matching count to g
    x = p(x);
    ++g;
  }
  w = checked_sub(w, x);

  if (strict_ancilla) {
    // Re-derive the counters, unwind the gate swaps, then un-derive.
    w = checked_add(w, x);
    for (int64_t i = 0; i <= w; ++i) {
      if (x > 0)
        ++g;
      else if (x == 0)
        ++e;
      else
        ++s;
      x = p(x);
    }
    for (int64_t i = 0; i < e; ++i) {
      non_div_gate = checked_sub(div_gate, non_div_gate);
      div_gate = checked_sub(div_gate, non_div_gate);
    }
    for (int64_t i = 0; i <= w; ++i) {
      x = p_inv(x);
      if (x > 0)
        --g;
      else if (x == 0)
        --e;
      else
        --s;
    }
    w = checked_sub(w, x);
  }

  x = inject.swap_out(x);  // restore the consumer's slot, take back the 0

  return Registers{{"x_local", x}, {"w", w},           {"g", g},
                   {"e", e},       {"s", s},           {"divGate", div_gate},
                   {"nonDivGate", non_div_gate}};
}

// ---- generated producer --------------------------------------------------

namespace {

using rir::FnPtr;

enum class Reg { x, w, g, e, s, div_gate, non_div_gate, x_copy };

constexpr const char* kRegNames[] = {"x", "w", "g", "e", "s", "divGate", "nonDivGate", "xCopy"};

// Tracks which register sits at which tuple slot. Control conjugation
// removes a register from scope, shifting the ones behind it.
class Ctx {
 public:
  static Ctx full() {
    Ctx c;
    for (int i = 0; i < 8; ++i) c.slots_.push_back(static_cast<Reg>(i));
    return c;
  }

  int width() const { return static_cast<int>(slots_.size()); }

  int pos(Reg r) const {
    for (int i = 0; i < width(); ++i)
      if (slots_[i] == r) return i;
    fail(errc::unknown_name, "producer codegen: register out of scope");
  }

  Ctx without(Reg r) const {
    Ctx c = *this;
    c.slots_.erase(c.slots_.begin() + pos(r));
    return c;
  }

 private:
  std::vector<Reg> slots_;
};

using Gen = std::function<FnPtr(const Ctx&)>;

FnPtr seq_all(std::vector<FnPtr> parts) {
  FnPtr out = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) out = rir::seq(*it, out);
  return out;
}

// f (arity 1) applied at one slot, identity elsewhere.
FnPtr at_slot(int width, int slot, FnPtr f) {
  FnPtr out = slot == width - 1 ? std::move(f) : rir::id();
  for (int i = width - 2; i >= 0; --i)
    out = rir::par(i == slot ? f : rir::id(), std::move(out));
  return out;
}

FnPtr lift(const Ctx& c, Reg r, FnPtr unary) { return at_slot(c.width(), c.pos(r), std::move(unary)); }

FnPtr identity_of(int width) {
  FnPtr out = rir::id();
  for (int i = 1; i < width; ++i) out = rir::par(rir::id(), std::move(out));
  return out;
}

FnPtr unary_chain(const FnPtr& u, int64_t times) {
  FnPtr out = u;
  for (int64_t i = 1; i < times; ++i) out = rir::seq(u, std::move(out));
  return out;
}

// Moves the control slot to the last port, applies `node` there, and
// moves it back.
FnPtr conjugate(const Ctx& c, Reg ctrl, FnPtr node) {
  int k = c.pos(ctrl);
  int n = c.width();
  if (k == n - 1) return node;
  std::vector<int> rot(n);
  for (int j = 0; j < n - 1; ++j) rot[j] = j < k ? j + 1 : j + 2;
  rot[n - 1] = k + 1;
  FnPtr rot_fn = rir::perm(rot);
  return rir::seq(rot_fn, rir::seq(std::move(node), rir::invert(rot_fn)));
}

FnPtr ctrl_it(const Ctx& c, Reg ctrl, const Gen& body) {
  return conjugate(c, ctrl, rir::it(body(c.without(ctrl))));
}

FnPtr ctrl_if(const Ctx& c, Reg ctrl, const Gen& on_pos, const Gen& on_zero, const Gen& on_neg) {
  Ctx inner = c.without(ctrl);
  return conjugate(c, ctrl, rir::sel(on_pos(inner), on_zero(inner), on_neg(inner)));
}

FnPtr emit_reg(const Ctx& c, Reg r) { return rir::emit(c.pos(r) + 1, c.width()); }

Gen bump(Reg r, FnPtr unary) {
  return [r, unary](const Ctx& c) { return lift(c, r, unary); };
}

Gen same() {
  return [](const Ctx& c) { return identity_of(c.width()); };
}

// Body applied value(ctrl)+1 times: once unrolled, then value(ctrl)
// more under the iterator. ctrl must be non-negative when reached.
FnPtr loop_succ(const Ctx& c, Reg ctrl, const Gen& body) {
  return rir::seq(body(c), ctrl_it(c, ctrl, body));
}

}  // namespace

int ProducerPlan::slot(std::string_view name) const {
  for (int i = 0; i < width(); ++i)
    if (layout[i] == name) return i;
  return -1;
}

ProducerPlan gen_producer(int64_t delta_p, bool strict_ancilla) {
  require_delta(delta_p);
  int64_t mag = checked_neg(delta_p);
  // p(x) compiles to a chain of |delta_p| decrements, so the program
  // size is linear in the magnitude; keep it within reason.
  if (mag > 4096)
    fail(errc::invalid_delta,
         "delta_p magnitude " + std::to_string(mag) + " exceeds the code generation limit (4096)");

  const Ctx top = Ctx::full();
  const FnPtr step_x_down = unary_chain(rir::dec(), mag);  // x = p(x)
  const FnPtr step_x_up = unary_chain(rir::inc(), mag);    // x = pInv(x)

  // w = w + x
  FnPtr w_plus_x = ctrl_it(top, Reg::x, bump(Reg::w, rir::inc()));

  // one counting pass: classify the sign of x, then step x down
  Gen count_pass = [&](const Ctx& c) {
    FnPtr classify = ctrl_if(c, Reg::x, bump(Reg::g, rir::inc()), bump(Reg::e, rir::inc()),
                             bump(Reg::s, rir::inc()));
    return rir::seq(classify, lift(c, Reg::x, step_x_down));
  };
  FnPtr counting = loop_succ(top, Reg::w, count_pass);

  // divGate = e, nonDivGate = 1 - e
  FnPtr gates = seq_all({
      lift(top, Reg::non_div_gate, rir::inc()),
      ctrl_it(top, Reg::e, bump(Reg::div_gate, rir::inc())),
      ctrl_it(top, Reg::e, bump(Reg::non_div_gate, rir::dec())),
  });

  // xCopy = x (signed), assuming xCopy == 0
  Gen copy_x = [&](const Ctx& c) {
    return rir::seq(ctrl_it(c, Reg::x, bump(Reg::x_copy, rir::inc())),
                    ctrl_if(c, Reg::x, same(), same(), bump(Reg::x_copy, rir::neg())));
  };

  // one replay pass of the divisible phase: step x up, then publish it
  // (via the copy) while returning the matching count
  Gen div_pass = [&](const Ctx& c) {
    FnPtr cp = copy_x(c);
    FnPtr choose = ctrl_if(
        c, Reg::x,
        [&](const Ctx& q) { return rir::seq(lift(q, Reg::g, rir::dec()), emit_reg(q, Reg::x_copy)); },
        [&](const Ctx& q) { return rir::seq(lift(q, Reg::e, rir::dec()), emit_reg(q, Reg::x_copy)); },
        bump(Reg::s, rir::dec()));
    return seq_all({lift(c, Reg::x, step_x_up), cp, choose, rir::invert(cp)});
  };
  Gen div_body = [&](const Ctx& c) {
    return rir::seq(emit_reg(c, Reg::g), loop_succ(c, Reg::w, div_pass));
  };
  FnPtr div_phase = ctrl_it(top, Reg::div_gate, div_body);

  // non-divisible replay pass: like div_pass, but the published value
  // sits one step down from x and only the positive branch publishes
  Gen non_div_pass = [&](const Ctx& c) {
    FnPtr cp = copy_x(c);
    FnPtr choose = ctrl_if(
        c, Reg::x,
        [&](const Ctx& q) {
          return seq_all({lift(q, Reg::g, rir::dec()), lift(q, Reg::x_copy, step_x_down),
                          emit_reg(q, Reg::x_copy), lift(q, Reg::x_copy, step_x_up)});
        },
        bump(Reg::e, rir::dec()), bump(Reg::s, rir::dec()));
    return seq_all({lift(c, Reg::x, step_x_up), cp, choose, rir::invert(cp)});
  };
  Gen non_div_body = [&](const Ctx& c) {
    return seq_all({
        emit_reg(c, Reg::g),
        lift(c, Reg::w, rir::inc()),
        loop_succ(c, Reg::w, non_div_pass),
        lift(c, Reg::w, rir::dec()),
        lift(c, Reg::x, step_x_down),  // the replay overshot one rung:
        lift(c, Reg::g, rir::inc()),   // step back down, return the count
    });
  };
  FnPtr non_div_phase = ctrl_it(top, Reg::non_div_gate, non_div_body);

  // w = w - x
  FnPtr w_minus_x = ctrl_it(top, Reg::x, bump(Reg::w, rir::dec()));

  FnPtr program =
      seq_all({w_plus_x, counting, gates, div_phase, non_div_phase, w_minus_x});

  if (strict_ancilla) {
    // Recompute the counters, uncompute the gates against them, then
    // run the recomputation backwards. Leaves every slot but x at 0.
    FnPtr recount = rir::seq(w_plus_x, counting);
    program = seq_all({program, recount, rir::invert(gates), rir::invert(recount)});
  }

  ProducerPlan plan;
  plan.program = std::move(program);
  plan.layout.assign(std::begin(kRegNames), std::end(kRegNames));
  plan.delta_p = delta_p;
  plan.strict_ancilla = strict_ancilla;
  return plan;
}

// ---- consumer and the single-threaded engine -----------------------------

int64_t consumer(const scheme::Scheme& s, channels::ProbeChannel& probe,
                 channels::InjectChannel& inject, int64_t x) {
  scheme::validate_scheme(s);
  require_input(x, "consumer");
  inject.put(x);
  int64_t iterations = probe.get();
  int64_t out = scheme::eval_expr(*s.base, probe.get());
  for (int64_t i = 0; i < iterations; ++i) out = scheme::eval_expr(*s.step, probe.get(), out);
  return out;
}

ItgResult monolithic_itg(const scheme::Scheme& sch, int64_t input, bool restore_z) {
  scheme::validate_scheme(sch);
  require_input(input, "monolithic_itg");
  int64_t s = 0, e = 0, g = 0, w = 0, z = 0;
  int64_t div_gate = 0, non_div_gate = 1;
  int64_t x = input, y = 0;
  auto p = [&](int64_t v) { return checked_add(v, sch.delta_p); };
  auto p_inv = [&](int64_t v) { return checked_sub(v, sch.delta_p); };

  w = checked_add(w, x);
  for (int64_t i = 0; i <= w; ++i) {
    if (x > 0)
      ++g;
    else if (x == 0)
      ++e;
    else
      ++s;
    x = p(x);
  }
  for (int64_t i = 0; i < e; ++i) {
    div_gate = checked_add(div_gate, non_div_gate);
    non_div_gate = checked_sub(div_gate, non_div_gate);
  }
  for (int64_t j = 0; j < div_gate; ++j) {
    for (int64_t i = 0; i <= w; ++i) {
      x = p_inv(x);
      if (x > 0) {
        --g;
        y = scheme::eval_expr(*sch.step, x, y);
      } else if (x == 0) {
        --e;
        y = scheme::eval_expr(*sch.base, x);
      } else {
        --s;
      }
    }
  }
  for (int64_t j = 0; j < non_div_gate; ++j) {
    ++w;
    for (int64_t i = 0; i <= w; ++i) {
      x = p_inv(x);
      if (x > 0) {
        --g;
        x = p(x);
        // z picks the base application exactly once, on the lowest rung
        if (z < 0) {
        } else if (z == 0) {
          y = scheme::eval_expr(*sch.base, x);
          ++z;
        } else {
          y = scheme::eval_expr(*sch.step, x, y);
        }
        x = p_inv(x);
      } else if (x == 0) {
        --e;
      } else {
        --s;
      }
    }
    --w;
    x = p(x);  // overshoot compensation, as in the producer
    ++g;
  }
  w = checked_sub(w, x);
  if (restore_z)
    for (int64_t i = 0; i < non_div_gate; ++i) --z;

  ItgResult r;
  r.y = y;
  r.registers = Registers{{"x", x},       {"w", w},
                          {"g", g},       {"e", e},
                          {"s", s},       {"z", z},
                          {"divGate", div_gate}, {"nonDivGate", non_div_gate}};
  return r;
}

}  // namespace recweave::weave
