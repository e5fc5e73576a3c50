#pragma once

// Machine-readable run reports (JSON and CSV).

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecc/hypergraph.hpp"

namespace ecc {

struct RunReport {
  std::string problem;
  std::string algorithm;
  // "ok" or "infeasible"; infeasible reports carry no coloring.
  std::string status = "ok";
  std::optional<double> p;
  std::optional<std::size_t> protected_color;  // 1-based
  std::optional<double> budget;
  std::optional<double> objective;
  std::optional<double> protected_unsatisfied;
  ColorErrorVector color_error_vector;
  std::optional<double> relaxation_bound;
  std::optional<double> approx_ratio_upper_bound;
  std::vector<std::size_t> coloring;  // 1-based
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> trials;
  std::optional<double> wall_time;
  // Free-form solver notes, e.g. a fallback that fired.
  std::vector<std::string> notes;

  bool operator==(const RunReport&) const = default;
};

// objective / bound when minimizing, bound / objective when maximizing.
// Absent when the quotient is undefined or infinite.
inline std::optional<double> approx_ratio(double objective_value, double bound, bool minimizes) {
  const double num = minimizes ? objective_value : bound;
  const double den = minimizes ? bound : objective_value;
  if (den > 0.0) return num / den;
  return std::nullopt;
}

namespace detail {

// JSON has no infinity; p = inf is written as the string "inf".
inline nlohmann::json p_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

inline double p_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw Error("bad p value in report");
  }
  return j.get<double>();
}

template <typename T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

inline std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace detail

inline std::string to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["problem"] = r.problem;
  j["algorithm"] = r.algorithm;
  j["status"] = r.status;
  if (r.p) j["p"] = detail::p_to_json(*r.p);
  detail::put_optional(j, "protected_color", r.protected_color);
  detail::put_optional(j, "budget", r.budget);
  detail::put_optional(j, "objective", r.objective);
  detail::put_optional(j, "protected_unsatisfied", r.protected_unsatisfied);
  j["color_error_vector"] = r.color_error_vector;
  detail::put_optional(j, "relaxation_bound", r.relaxation_bound);
  detail::put_optional(j, "approx_ratio_upper_bound", r.approx_ratio_upper_bound);
  j["coloring"] = r.coloring;
  j["master_seed"] = r.master_seed;
  detail::put_optional(j, "trials", r.trials);
  detail::put_optional(j, "wall_time", r.wall_time);
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

inline RunReport report_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    RunReport r;
    r.problem = j.at("problem").get<std::string>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.status = j.at("status").get<std::string>();
    if (j.contains("p")) r.p = detail::p_from_json(j.at("p"));
    detail::get_optional(j, "protected_color", r.protected_color);
    detail::get_optional(j, "budget", r.budget);
    detail::get_optional(j, "objective", r.objective);
    detail::get_optional(j, "protected_unsatisfied", r.protected_unsatisfied);
    r.color_error_vector = j.at("color_error_vector").get<ColorErrorVector>();
    detail::get_optional(j, "relaxation_bound", r.relaxation_bound);
    detail::get_optional(j, "approx_ratio_upper_bound", r.approx_ratio_upper_bound);
    r.coloring = j.at("coloring").get<std::vector<std::size_t>>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    detail::get_optional(j, "trials", r.trials);
    detail::get_optional(j, "wall_time", r.wall_time);
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

// One header line and one data row; list fields are ';'-joined.
inline std::string to_csv(const RunReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? detail::fmt17(*v) : std::string(); };
  std::ostringstream os;
  os << "problem,algorithm,status,p,protected_color,budget,objective,protected_unsatisfied,color_error_vector,"
        "relaxation_bound,approx_ratio_upper_bound,coloring,master_seed,trials,wall_time\n";
  os << r.problem << ',' << r.algorithm << ',' << r.status << ',' << opt(r.p) << ',';
  if (r.protected_color) os << *r.protected_color;
  os << ',' << opt(r.budget) << ',' << opt(r.objective) << ',' << opt(r.protected_unsatisfied) << ',';
  for (std::size_t i = 0; i < r.color_error_vector.size(); ++i)
    os << (i ? ";" : "") << detail::fmt17(r.color_error_vector[i]);
  os << ',' << opt(r.relaxation_bound) << ',' << opt(r.approx_ratio_upper_bound) << ',';
  for (std::size_t i = 0; i < r.coloring.size(); ++i) os << (i ? ";" : "") << r.coloring[i];
  os << ',' << r.master_seed << ',';
  if (r.trials) os << *r.trials;
  os << ',' << opt(r.wall_time) << '\n';
  return os.str();
}

}  // namespace ecc
