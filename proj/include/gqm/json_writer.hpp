#pragma once

#include <cassert>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "gqm/decimal.hpp"

namespace gqm {

// Canonical JSON emitter. Callers control key order; numbers go through
// format_decimal. Pretty layout uses two-space indentation and is
// newline-terminated; compact layout emits a single line without spaces.
class JsonWriter {
 public:
  enum class Layout { compact, pretty };

  explicit JsonWriter(Layout layout) : layout_(layout) {}

  void begin_object() {
    begin_value();
    out_ += '{';
    stack_.push_back({true, 0});
  }

  void end_object() {
    Frame f = stack_.back();
    stack_.pop_back();
    if (f.count > 0) {
      newline_indent(stack_.size());
    }
    out_ += '}';
  }

  void begin_array() {
    begin_value();
    out_ += '[';
    stack_.push_back({false, 0});
  }

  void end_array() {
    Frame f = stack_.back();
    stack_.pop_back();
    if (f.count > 0) {
      newline_indent(stack_.size());
    }
    out_ += ']';
  }

  void key(std::string_view name) {
    assert(!stack_.empty() && stack_.back().is_object);
    next_element();
    append_escaped(name);
    out_ += ':';
    if (layout_ == Layout::pretty) {
      out_ += ' ';
    }
    pending_key_ = true;
  }

  void string_value(std::string_view s) {
    begin_value();
    append_escaped(s);
  }

  void number_value(double v) {
    begin_value();
    out_ += format_decimal(v);
  }

  // The document text; pretty documents are newline-terminated.
  std::string take() {
    assert(stack_.empty());
    if (layout_ == Layout::pretty) {
      out_ += '\n';
    }
    return std::move(out_);
  }

 private:
  struct Frame {
    bool is_object;
    std::size_t count;
  };

  void begin_value() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (!stack_.empty()) {
      assert(!stack_.back().is_object);
      next_element();
    }
  }

  void next_element() {
    Frame& f = stack_.back();
    if (f.count > 0) {
      out_ += ',';
    }
    f.count += 1;
    newline_indent(stack_.size());
  }

  void newline_indent(std::size_t depth) {
    if (layout_ != Layout::pretty) {
      return;
    }
    out_ += '\n';
    out_.append(depth * 2, ' ');
  }

  void append_escaped(std::string_view s) {
    out_ += '"';
    for (unsigned char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\b': out_ += "\\b"; break;
        case '\f': out_ += "\\f"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += static_cast<char>(c);
          }
      }
    }
    out_ += '"';
  }

  Layout layout_;
  std::string out_;
  std::vector<Frame> stack_;
  bool pending_key_ = false;
};

}  // namespace gqm
