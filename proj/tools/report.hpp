#pragma once

// JSON access with path diagnostics, and report serialization with a fixed
// number format: 17 significant digits, non-finite values as strings.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wolffcli {

using json = nlohmann::ordered_json;

// Parse failures and schema violations; the message names the location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// A JSON value together with its path from the document root.
class Node {
 public:
  Node(const json& value, std::string path) : v_(&value), path_(std::move(path)) {}

  const json& value() const { return *v_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_ + ": " + message); }

  bool has(const std::string& key) const { return v_->is_object() && v_->contains(key); }

  Node at(const std::string& key) const {
    if (!v_->is_object()) fail("expected an object");
    const auto it = v_->find(key);
    if (it == v_->end()) throw ConfigError(path_ + "." + key + ": required field is missing");
    return Node(*it, path_ + "." + key);
  }

  Node operator[](std::size_t i) const { return Node((*v_)[i], path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!v_->is_array()) fail("expected an array");
    return v_->size();
  }

  double number() const {
    if (!v_->is_number()) fail("expected a number");
    return v_->get<double>();
  }

  double positive() const {
    const double x = number();
    if (!(x > 0.0) || !std::isfinite(x)) fail("expected a finite positive number");
    return x;
  }

  int integer() const {
    if (!v_->is_number_integer()) fail("expected an integer");
    return v_->get<int>();
  }

  std::uint64_t unsigned_integer() const {
    if (!v_->is_number_integer() || v_->get<std::int64_t>() < 0) fail("expected a nonnegative integer");
    return v_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!v_->is_boolean()) fail("expected true or false");
    return v_->get<bool>();
  }

  std::string str() const {
    if (!v_->is_string()) fail("expected a string");
    return v_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].number());
    return out;
  }

  std::vector<int> integers() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].integer());
    return out;
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }
  int integer_or(const std::string& key, int fallback) const {
    return has(key) ? at(key).integer() : fallback;
  }
  bool boolean_or(const std::string& key, bool fallback) const {
    return has(key) ? at(key).boolean() : fallback;
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).str() : fallback;
  }

 private:
  const json* v_;
  std::string path_;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void dump(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "\"" + format_number(x) + "\"";
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace detail

// Stable serialization: insertion-ordered keys, two-space indent, trailing newline.
inline std::string serialize(const json& j) {
  std::string out;
  detail::dump(j, 0, out);
  out += "\n";
  return out;
}

}  // namespace wolffcli
