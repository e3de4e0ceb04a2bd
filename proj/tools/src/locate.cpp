#include "netgrad_cli/locate.hpp"

#include <cctype>
#include <vector>

namespace netgrad::cli {

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view t) : text_(t) {}

  void value(const std::string& ptr) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(ptr, line_);
    const char c = text_[pos_];
    if (c == '{') {
      object(ptr);
    } else if (c == '[') {
      array(ptr);
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    }
  }

  LineMap take() { return std::move(lines_); }

 private:
  static bool is_delim(char c) { return c == ',' || c == '}' || c == ']' || std::isspace(static_cast<unsigned char>(c)); }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  void object(const std::string& ptr) {
    ++pos_;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == '}') break;
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      const int key_line = line_;
      const std::string key = string();
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ':') ++pos_;
      const std::string child = ptr + "/" + escape(key);
      value(child);
      lines_[child] = key_line;  // report the key's line, not the value's
    }
    ++pos_;
  }

  void array(const std::string& ptr) {
    ++pos_;
    int index = 0;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == ']') break;
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      value(ptr + "/" + std::to_string(index++));
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  LineMap lines_;
};

}  // namespace

LineMap locate_values(std::string_view text) {
  Scanner s(text);
  s.value("");
  return s.take();
}

std::pair<int, int> line_column(std::string_view text, std::size_t offset) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace netgrad::cli
