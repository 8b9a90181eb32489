#include "toml.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "coopmag/errors.hpp"
#include "coopmag/io.hpp"

namespace coopmag::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigValidation("config line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Drop a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      return false;
  return true;
}

Value parse_scalar(const std::string& raw, int line) {
  const std::string t = strip(raw);
  if (t.empty()) fail(line, "empty value");
  Value v;
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') fail(line, "unterminated string");
    v.kind = Value::Kind::String;
    v.s = t.substr(1, t.size() - 2);
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = Value::Kind::Bool;
    v.b = (t == "true");
    return v;
  }
  // Integer if it parses fully without '.', 'e', 'inf', 'nan'.
  const bool looks_float = t.find_first_of(".eEni") != std::string::npos;
  errno = 0;
  char* end = nullptr;
  if (!looks_float) {
    const long long i = std::strtoll(t.c_str(), &end, 10);
    if (end && *end == '\0' && errno == 0) {
      v.kind = Value::Kind::Int;
      v.i = i;
      v.f = static_cast<double>(i);
      return v;
    }
  }
  errno = 0;
  const double f = std::strtod(t.c_str(), &end);
  if (!end || *end != '\0' || errno != 0) fail(line, "cannot parse value '" + t + "'");
  v.kind = Value::Kind::Float;
  v.f = f;
  return v;
}

Value parse_value(const std::string& raw, int line) {
  const std::string t = strip(raw);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') fail(line, "unterminated array");
    Value v;
    v.kind = Value::Kind::Array;
    const std::string inner = t.substr(1, t.size() - 2);
    std::string item;
    bool in_str = false;
    for (char c : inner) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!strip(item).empty()) v.arr.push_back(parse_scalar(item, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!strip(item).empty()) v.arr.push_back(parse_scalar(item, line));
    return v;
  }
  return parse_scalar(raw, line);
}

}  // namespace

double Value::as_double() const {
  if (kind == Kind::Float) return f;
  if (kind == Kind::Int) return static_cast<double>(i);
  throw ConfigValidation("expected a number");
}

long long Value::as_int() const {
  if (kind == Kind::Int) return i;
  throw ConfigValidation("expected an integer");
}

bool Value::as_bool() const {
  if (kind == Kind::Bool) return b;
  throw ConfigValidation("expected a boolean");
}

const std::string& Value::as_string() const {
  if (kind == Kind::String) return s;
  throw ConfigValidation("expected a string");
}

std::vector<double> Value::as_double_array() const {
  if (kind != Kind::Array) throw ConfigValidation("expected an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const Value& v : arr) out.push_back(v.as_double());
  return out;
}

Table parse(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = strip(line.substr(1, line.size() - 2));
      if (!valid_key(section) &&
          section.find('.') == std::string::npos)
        fail(line_no, "invalid section name '" + section + "'");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (!valid_key(key)) fail(line_no, "invalid key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.count(full)) fail(line_no, "duplicate key '" + full + "'");
    table[full] = parse_value(line.substr(eq + 1), line_no);
  }
  return table;
}

std::string serialize(const Table& table) {
  // Group by section; std::map already sorts keys.
  std::ostringstream out;
  std::string current_section;
  bool first = true;
  auto emit_value = [&out](const Value& v) {
    switch (v.kind) {
      case Value::Kind::Bool:
        out << (v.b ? "true" : "false");
        break;
      case Value::Kind::Int:
        out << v.i;
        break;
      case Value::Kind::Float:
        out << format_double(v.f);
        break;
      case Value::Kind::String:
        out << '"' << v.s << '"';
        break;
      case Value::Kind::Array:
        out << '[';
        for (size_t i = 0; i < v.arr.size(); ++i) {
          if (i) out << ", ";
          out << format_double(v.arr[i].kind == Value::Kind::Int
                                   ? static_cast<double>(v.arr[i].i)
                                   : v.arr[i].f);
        }
        out << ']';
        break;
    }
  };
  for (const auto& [full, value] : table) {
    const size_t dot = full.rfind('.');
    const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
    const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
    if (section != current_section) {
      if (!first) out << "\n";
      out << "[" << section << "]\n";
      current_section = section;
    }
    first = false;
    out << key << " = ";
    emit_value(value);
    out << "\n";
  }
  return out.str();
}

Value make_bool(bool v) {
  Value x;
  x.kind = Value::Kind::Bool;
  x.b = v;
  return x;
}
Value make_int(long long v) {
  Value x;
  x.kind = Value::Kind::Int;
  x.i = v;
  x.f = static_cast<double>(v);
  return x;
}
Value make_double(double v) {
  Value x;
  x.kind = Value::Kind::Float;
  x.f = v;
  return x;
}
Value make_string(std::string v) {
  Value x;
  x.kind = Value::Kind::String;
  x.s = std::move(v);
  return x;
}
Value make_double_array(const std::vector<double>& v) {
  Value x;
  x.kind = Value::Kind::Array;
  for (double d : v) x.arr.push_back(make_double(d));
  return x;
}

}  // namespace coopmag::toml
