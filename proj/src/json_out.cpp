#include "gafzeros/json_out.hpp"

#include <cmath>
#include <cstdio>

namespace gafz {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

void JsonOut::newline() {
  if (indent_ <= 0) return;
  out_ += '\n';
  out_.append(has_element_.size() * static_cast<std::size_t>(indent_), ' ');
}

void JsonOut::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!has_element_.empty()) {
    if (has_element_.back()) out_ += ',';
    has_element_.back() = true;
    newline();
  }
}

JsonOut& JsonOut::begin_object() {
  before_value();
  out_ += '{';
  has_element_.push_back(false);
  return *this;
}

JsonOut& JsonOut::end_object() {
  const bool any = has_element_.back();
  has_element_.pop_back();
  if (any) newline();
  out_ += '}';
  return *this;
}

JsonOut& JsonOut::begin_array() {
  before_value();
  out_ += '[';
  has_element_.push_back(false);
  return *this;
}

JsonOut& JsonOut::end_array() {
  const bool any = has_element_.back();
  has_element_.pop_back();
  if (any) newline();
  out_ += ']';
  return *this;
}

JsonOut& JsonOut::key(std::string_view k) {
  before_value();
  out_ += json_escape(k);
  out_ += indent_ > 0 ? ": " : ":";
  after_key_ = true;
  return *this;
}

JsonOut& JsonOut::value(double x) {
  before_value();
  out_ += format_double(x);
  return *this;
}

JsonOut& JsonOut::value(std::int64_t x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonOut& JsonOut::value(std::uint64_t x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonOut& JsonOut::value(bool b) {
  before_value();
  out_ += b ? "true" : "false";
  return *this;
}

JsonOut& JsonOut::value(std::string_view s) {
  before_value();
  out_ += json_escape(s);
  return *this;
}

}  // namespace gafz
