#pragma once

#include <map>
#include <string>
#include <vector>

#include "channels.hpp"
#include "rir.hpp"
#include "scheme.hpp"

namespace recweave::weave {

using Registers = std::map<std::string, int64_t>;

// How often the counting phase sees the running value strictly positive
// (g), exactly zero (e) and strictly negative (s) while stepping x down
// by delta_p, w+1 = x+1 times. g is also the number of step
// applications the consumer will perform; g + e + s == x + 1.
struct Counters {
  int64_t g = 0, e = 0, s = 0;
  bool operator==(const Counters&) const = default;
};
Counters expected_counters(int64_t delta_p, int64_t x);

// Closed range of values the counting phase walks through on input w:
// [w + (w+1)*delta_p, w].
struct Interval {
  int64_t low = 0, high = 0;
  bool operator==(const Interval&) const = default;
};
Interval interval(int64_t w, int64_t delta_p);

// The hand-written producer: swap the input in, count, publish the
// iteration count followed by the base and step arguments in ascending
// order, restore every register, swap the input back out. The returned
// map holds the local registers at exit (x_local is the value swap_out
// handed back). strict_ancilla re-derives and un-computes the gate pair
// so it also returns to its initial state.
Registers reference_producer(int64_t delta_p, channels::ProbeChannel& probe,
                             channels::InjectChannel& inject, bool strict_ancilla = false);

// A generated producer with the same observable behavior, expressed in
// the reversible IR. The program is closed (no calls) and emit is its
// only effect; stripping the emits yields an invertible term.
struct ProducerPlan {
  rir::FnPtr program;
  std::vector<std::string> layout;  // register name per tuple slot
  int64_t delta_p = -1;
  bool strict_ancilla = false;

  int width() const { return static_cast<int>(layout.size()); }
  int slot(std::string_view name) const;  // -1 when absent
};
ProducerPlan gen_producer(int64_t delta_p, bool strict_ancilla = false);

// The classical side: sends x over inject, then folds the probe stream
// (iteration count, base argument, step arguments) through the scheme's
// expressions.
int64_t consumer(const scheme::Scheme& s, channels::ProbeChannel& probe,
                 channels::InjectChannel& inject, int64_t x);

// Single-threaded engine computing the same result with the same
// register discipline, no channels involved. Used as a second oracle
// next to rec_oracle.
struct ItgResult {
  int64_t y = 0;
  Registers registers;
};
ItgResult monolithic_itg(const scheme::Scheme& s, int64_t x, bool restore_z = true);

}  // namespace recweave::weave
