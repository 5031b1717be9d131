#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gafz {

/// "%.17g", with "null" for NaN and infinities (JSON has no literal for them).
std::string format_double(double x);

/// Streaming JSON builder. Floats always use format_double so that output is
/// stable across runs and libraries; separators are inserted automatically.
class JsonOut {
 public:
  explicit JsonOut(int indent = 2) : indent_(indent) {}

  JsonOut& begin_object();
  JsonOut& end_object();
  JsonOut& begin_array();
  JsonOut& end_array();
  JsonOut& key(std::string_view k);

  JsonOut& value(double x);
  JsonOut& value(std::int64_t x);
  JsonOut& value(std::uint64_t x);
  JsonOut& value(int x) { return value(static_cast<std::int64_t>(x)); }
  JsonOut& value(bool b);
  JsonOut& value(std::string_view s);
  JsonOut& value(const char* s) { return value(std::string_view(s)); }

  template <typename T>
  JsonOut& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  const std::string& str() const { return out_; }

 private:
  void before_value();
  void newline();

  std::string out_;
  int indent_;
  /// One entry per open container: whether it already has an element.
  std::vector<bool> has_element_;
  bool after_key_ = false;
};

std::string json_escape(std::string_view s);

}  // namespace gafz
