#include "scheme.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace recweave::scheme {

void validate_scheme(const Scheme& s) {
  if (!s.base || !s.step) fail(errc::syntax, "scheme: base and step expressions are required");
  if (s.delta_p > -1) {
    fail(errc::invalid_delta,
         "scheme: delta_p must be <= -1, got " + std::to_string(s.delta_p));
  }
  checked_neg(s.delta_p);  // |delta_p| must be representable
  if (references_y(*s.base))
    fail(errc::forbidden_variable, "scheme: base expression must not reference y");
}

namespace {

// Recursive positions may drop below zero (the base case fires at the
// first value <= 0); only the initial input is required to be >= 0.
int64_t rec_eval(const Scheme& s, int64_t x) {
  if (x <= 0) return eval_expr(*s.base, x);
  return eval_expr(*s.step, x, rec_eval(s, checked_add(x, s.delta_p)));
}

}  // namespace

int64_t rec_oracle(const Scheme& s, int64_t x) {
  if (x < 0) fail(errc::negative_input, "rec_oracle: input must be >= 0, got " + std::to_string(x));
  return rec_eval(s, x);
}

std::vector<UnfoldEntry> unfold_trace(const Scheme& s, int64_t x) {
  if (x < 0)
    fail(errc::negative_input, "unfold_trace: input must be >= 0, got " + std::to_string(x));
  std::vector<int64_t> visited;  // x, p(x), p(p(x)), ... down to the first value <= 0
  int64_t v = x;
  while (v > 0) {
    visited.push_back(v);
    v = checked_add(v, s.delta_p);
  }
  std::vector<UnfoldEntry> out;
  out.reserve(visited.size() + 1);
  out.push_back({'B', v});
  for (auto it = visited.rbegin(); it != visited.rend(); ++it) out.push_back({'H', *it});
  return out;
}

namespace {

std::string_view trim(std::string_view v) {
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  return v;
}

bool valid_name(std::string_view v) {
  if (v.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(v[0])) && v[0] != '_') return false;
  return std::all_of(v.begin(), v.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

int64_t parse_delta(std::string_view v, int line_no) {
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(errc::syntax, "scheme: line " + std::to_string(line_no) + ": delta_p is not an integer");
  return out;
}

}  // namespace

Scheme parse_scheme_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(errc::syntax, "scheme: line " + std::to_string(line_no) + ": expected `key = value`");
    std::string key{trim(line.substr(0, eq))};
    std::string value{trim(line.substr(eq + 1))};
    if (key != "name" && key != "delta_p" && key != "base" && key != "step")
      fail(errc::syntax, "scheme: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!kv.emplace(key, value).second)
      fail(errc::syntax, "scheme: line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (key == "delta_p") parse_delta(value, line_no);  // surface bad integers with the line number
  }
  for (const char* key : {"name", "delta_p", "base", "step"})
    if (!kv.count(key)) fail(errc::syntax, std::string("scheme: missing key '") + key + "'");

  Scheme s;
  s.name = kv["name"];
  if (!valid_name(s.name)) fail(errc::syntax, "scheme: invalid name '" + s.name + "'");
  s.delta_p = parse_delta(kv["delta_p"], 0);
  s.base = parse_expr(kv["base"], /*allow_y=*/false);
  s.step = parse_expr(kv["step"], /*allow_y=*/true);
  validate_scheme(s);
  return s;
}

Scheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open scheme file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scheme_text(buf.str());
}

}  // namespace recweave::scheme
