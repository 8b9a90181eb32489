#pragma once

// Minimal TOML subset used for run configuration: [section] headers,
// key = value with strings, booleans, integers, floats and flat arrays,
// '#' comments. Keys are exposed flattened as "section.key".

#include <map>
#include <string>
#include <vector>

namespace coopmag::toml {

struct Value {
  enum class Kind { Bool, Int, Float, String, Array };
  Kind kind = Kind::String;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> arr;

  double as_double() const;
  long long as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  std::vector<double> as_double_array() const;
};

using Table = std::map<std::string, Value>;

// Throws ConfigValidation with a line number on malformed input.
Table parse(const std::string& text);

// Canonical serialization: sections and keys sorted; floats via %.17g.
std::string serialize(const Table& table);

Value make_bool(bool v);
Value make_int(long long v);
Value make_double(double v);
Value make_string(std::string v);
Value make_double_array(const std::vector<double>& v);

}  // namespace coopmag::toml
