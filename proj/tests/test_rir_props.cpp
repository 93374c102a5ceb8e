// Property tests over randomly generated emit-free programs. The
// generator is deliberately closed (no call nodes) so every program is
// self-contained.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "rir.hpp"

using namespace recweave;
using rir::FnPtr;
using rir::Tuple;

namespace {

const rir::Defs kEmpty;

class Gen {
 public:
  explicit Gen(uint64_t seed, bool allow_inv = true) : rng_(seed), allow_inv_(allow_inv) {}

  FnPtr program(int arity, int depth) {
    if (depth <= 0) return leaf(arity);
    int choice = pick(arity == 1 ? 4 : 7);
    if (choice == 3 && !allow_inv_) choice = 1;
    switch (choice) {
      case 0: return leaf(arity);
      case 1: return rir::seq(program(arity, depth - 1), program(arity, depth - 1));
      case 2: {  // unary chains stress seq nesting
        FnPtr f = leaf(arity);
        return rir::seq(std::move(f), program(arity, depth - 1));
      }
      case 3: return rir::inv(program(arity, depth - 1));
      case 4: {
        int left = 1 + pick(arity - 1);
        return rir::par(program(left, depth - 1), program(arity - left, depth - 1));
      }
      case 5: return rir::sel(program(arity - 1, depth - 1), program(arity - 1, depth - 1),
                              program(arity - 1, depth - 1));
      default: return rir::it(program(arity - 1, depth - 1));
    }
  }

  Tuple tuple(int arity) {
    Tuple t(arity);
    for (auto& v : t) v = static_cast<int64_t>(pick(41)) - 20;
    return t;
  }

  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }

 private:
  FnPtr leaf(int arity) {
    if (arity == 1) {
      switch (pick(4)) {
        case 0: return rir::id();
        case 1: return rir::inc();
        case 2: return rir::dec();
        default: return rir::neg();
      }
    }
    std::vector<int> targets(arity);
    for (int k = 0; k < arity; ++k) targets[k] = k + 1;
    std::shuffle(targets.begin(), targets.end(), rng_);
    return rir::perm(std::move(targets));
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST_CASE("inversion round-trips on random programs") {
  Gen gen(0xC0FFEE);
  for (int i = 0; i < 300; ++i) {
    int arity = 1 + gen.pick(4);
    FnPtr f = gen.program(arity, 5);
    CAPTURE(rir::print_rir(*f));
    REQUIRE(rir::arity(*f, kEmpty) == arity);
    FnPtr back = rir::invert(f);
    for (int j = 0; j < 5; ++j) {
      Tuple t = gen.tuple(arity);
      Tuple mid = rir::interpret(*f, t, kEmpty);
      CHECK(rir::interpret(*back, mid, kEmpty) == t);
      CHECK(rir::check_reversibility(f, t, kEmpty));
    }
  }
}

TEST_CASE("double inversion is structural identity") {
  Gen gen(0xBADD1CE);
  for (int i = 0; i < 200; ++i) {
    int arity = 1 + gen.pick(4);
    FnPtr f = gen.program(arity, 4);
    CAPTURE(rir::print_rir(*f));
    CHECK(*rir::invert(rir::invert(f)) == *f);
  }
}

TEST_CASE("loops and selections never touch their control port") {
  Gen gen(0x5EED5);
  for (int i = 0; i < 200; ++i) {
    int body_arity = 1 + gen.pick(3);
    FnPtr body = gen.program(body_arity, 3);
    FnPtr f = gen.pick(2) ? rir::it(body)
                          : rir::sel(body, gen.program(body_arity, 3),
                                     gen.program(body_arity, 3));
    Tuple t = gen.tuple(body_arity + 1);
    Tuple out = rir::interpret(*f, t, kEmpty);
    CAPTURE(rir::print_rir(*f));
    CHECK(out.back() == t.back());
  }
}

TEST_CASE("iteration applies its body a magnitude number of times") {
  Gen gen(0xF00D);
  for (int i = 0; i < 100; ++i) {
    int64_t ctrl = static_cast<int64_t>(gen.pick(41)) - 20;
    int64_t start = static_cast<int64_t>(gen.pick(41)) - 20;
    Tuple out = rir::interpret(*rir::it(rir::inc()), {start, ctrl}, kEmpty);
    int64_t mag = ctrl < 0 ? -ctrl : ctrl;
    CHECK(out == Tuple{start + mag, ctrl});
  }
}

TEST_CASE("permutations route and invert soundly") {
  Gen gen(0xA5A5A5);
  for (int i = 0; i < 200; ++i) {
    int n = 1 + gen.pick(6);
    std::vector<int> targets(n);
    for (int k = 0; k < n; ++k) targets[k] = k + 1;
    std::mt19937_64 shuffle_rng(static_cast<uint64_t>(gen.pick(1 << 20)));
    std::shuffle(targets.begin(), targets.end(), shuffle_rng);
    FnPtr p = rir::perm(targets);
    Tuple t = gen.tuple(n);
    Tuple out = rir::interpret(*p, t, kEmpty);
    for (int k = 0; k < n; ++k) CHECK(out[k] == t[targets[k] - 1]);
    CHECK(rir::interpret(*rir::invert(p), out, kEmpty) == t);
  }
}
