#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace recweave {

enum class errc {
  syntax,
  forbidden_variable,
  missing_y,
  overflow,
  negative_input,
  invalid_delta,
  arity_mismatch,
  unknown_name,
  non_invertible_effect,
  timeout,
  io,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::syntax: return "syntax";
    case errc::forbidden_variable: return "forbidden-variable";
    case errc::missing_y: return "missing-y";
    case errc::overflow: return "overflow";
    case errc::negative_input: return "negative-input";
    case errc::invalid_delta: return "invalid-delta";
    case errc::arity_mismatch: return "arity-mismatch";
    case errc::unknown_name: return "unknown-name";
    case errc::non_invertible_effect: return "non-invertible-effect";
    case errc::timeout: return "timeout";
    case errc::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, std::string message) {
  throw Error(code, std::move(message));
}

// Checked 64-bit arithmetic. Every arithmetic step in the project goes
// through these so wraparound can never corrupt an equivalence check.
inline int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(errc::overflow, "integer overflow in addition");
  return r;
}

inline int64_t checked_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) fail(errc::overflow, "integer overflow in subtraction");
  return r;
}

inline int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(errc::overflow, "integer overflow in multiplication");
  return r;
}

inline int64_t checked_neg(int64_t a) {
  if (a == INT64_MIN) fail(errc::overflow, "integer overflow in negation");
  return -a;
}

}  // namespace recweave
