#pragma once

// JSON helpers shared by the document parsers. Internal to the library.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cournot/error.hpp"
#include "cournot/problem.hpp"

namespace cournot::detail {

inline void check_keys(const nlohmann::json& j, const std::string& where,
                       std::initializer_list<const char*> allowed,
                       std::initializer_list<const char*> required) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw SchemaError(where + ": unknown key '" + it.key() + "'");
  }
  for (const char* k : required) {
    if (!j.contains(k)) throw SchemaError(where + ": missing key '" + std::string(k) + "'");
  }
}

inline double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + " must be a number");
  return j.get<double>();
}

/// A number, or the string "inf" for +infinity.
inline double number_or_inf(const nlohmann::json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return number(j, where);
}

/// An array of numbers; a bare number is read as a one-element vector.
inline std::vector<double> vector(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw SchemaError(where + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(what + " is not valid JSON: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json real_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Trajectory trajectory_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json trajectory_to_json(const Trajectory& tr);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const GridSpec& g);
ProblemSpec problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemSpec& p);

}  // namespace cournot::detail
