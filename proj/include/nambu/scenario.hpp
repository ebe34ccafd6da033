#pragma once

// Scenario files: flat key/value text, one scenario per file.
//
//   # latitude field on the round sphere
//   domain: sphere2
//   resolution: 256 512
//   f: z + 0.5
//   eps: 0.1 0.05 0.025
//
// Optional keys: theta, h, eps, delta_t_factor, weight_quantum, tol_volume,
// out_dir. Unknown keys are rejected; every expression is parsed up front so
// validation errors carry the offending field and line.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/expr.hpp"

namespace nambu {

struct Scenario {
  DomainKind domain = DomainKind::sphere2;
  std::vector<int> resolution;
  std::string f_text;
  std::optional<std::string> theta_text;
  std::optional<std::string> h_text;
  std::vector<double> eps;  // empty: derived from the field scale at run time
  double delta_t_factor = 1e-4;
  double weight_quantum = 1e-3;  // relative to the largest edge weight
  double tol_volume = 1e-2;
  std::string out_dir;
  std::string source_path;
  std::map<std::string, int> key_lines;

  int line_of(const std::string& key) const {
    auto it = key_lines.find(key);
    return it == key_lines.end() ? 0 : it->second;
  }
};

namespace scenario_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& s, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("scenario field '" + key + "' (line " + std::to_string(line) +
                          "): '" + s + "' is not a number");
  }
}

inline int parse_int(const std::string& s, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("scenario field '" + key + "' (line " + std::to_string(line) +
                          "): '" + s + "' is not an integer");
  }
}

}  // namespace scenario_detail

inline std::vector<int> default_resolution(DomainKind kind) {
  switch (kind) {
    case DomainKind::sphere2: return {256, 512};
    case DomainKind::torus2: return {256, 256};
    case DomainKind::torus3: return {64, 64, 64};
  }
  return {};
}

inline Scenario parse_scenario(std::istream& in, const std::string& source_name) {
  Scenario sc;
  sc.source_path = source_name;
  std::string line;
  int lineno = 0;
  bool have_domain = false, have_f = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = scenario_detail::trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::size_t colon = body.find(':');
    if (colon == std::string::npos)
      throw ValidationError("scenario line " + std::to_string(lineno) +
                            " is not 'key: value'");
    std::string key = scenario_detail::trim(body.substr(0, colon));
    std::string value = scenario_detail::trim(body.substr(colon + 1));
    if (sc.key_lines.count(key))
      throw ValidationError("scenario field '" + key + "' repeated (line " +
                            std::to_string(lineno) + ")");
    sc.key_lines[key] = lineno;
    if (value.empty())
      throw ValidationError("scenario field '" + key + "' (line " +
                            std::to_string(lineno) + ") has no value");

    if (key == "domain") {
      if (value == "sphere2") sc.domain = DomainKind::sphere2;
      else if (value == "torus2") sc.domain = DomainKind::torus2;
      else if (value == "torus3") sc.domain = DomainKind::torus3;
      else
        throw ValidationError("scenario field 'domain' (line " + std::to_string(lineno) +
                              "): '" + value + "' is not sphere2, torus2, or torus3");
      have_domain = true;
    } else if (key == "resolution") {
      for (const std::string& tok : scenario_detail::split_ws(value))
        sc.resolution.push_back(scenario_detail::parse_int(tok, key, lineno));
    } else if (key == "f") {
      sc.f_text = value;
      have_f = true;
    } else if (key == "theta") {
      sc.theta_text = value;
    } else if (key == "h") {
      sc.h_text = value;
    } else if (key == "eps") {
      for (const std::string& tok : scenario_detail::split_ws(value))
        sc.eps.push_back(scenario_detail::parse_double(tok, key, lineno));
    } else if (key == "delta_t_factor") {
      sc.delta_t_factor = scenario_detail::parse_double(value, key, lineno);
    } else if (key == "weight_quantum") {
      sc.weight_quantum = scenario_detail::parse_double(value, key, lineno);
    } else if (key == "tol_volume") {
      sc.tol_volume = scenario_detail::parse_double(value, key, lineno);
    } else if (key == "out_dir") {
      sc.out_dir = value;
    } else {
      throw ValidationError("scenario field '" + key + "' (line " +
                            std::to_string(lineno) + ") is not a known key");
    }
  }
  if (!have_domain) throw ValidationError("scenario is missing the 'domain' field");
  if (!have_f) throw ValidationError("scenario is missing the 'f' field");
  if (sc.resolution.empty()) sc.resolution = default_resolution(sc.domain);

  auto check_expr = [&](const std::string& text, const std::string& key) {
    try {
      (void)parse(text, sc.domain);
    } catch (const Error& e) {
      throw ValidationError("scenario field '" + key + "' (line " +
                            std::to_string(sc.line_of(key)) + "): " + e.what());
    }
  };
  check_expr(sc.f_text, "f");
  if (sc.theta_text) check_expr(*sc.theta_text, "theta");
  if (sc.h_text) check_expr(*sc.h_text, "h");

  if (!sc.eps.empty()) {
    for (std::size_t i = 0; i < sc.eps.size(); ++i) {
      bool bad = sc.eps[i] <= 0 || (i > 0 && sc.eps[i] >= sc.eps[i - 1]);
      if (bad)
        throw ValidationError("scenario field 'eps' (line " +
                              std::to_string(sc.line_of("eps")) +
                              ") must be a strictly decreasing list of positive values");
    }
    if (sc.eps.size() < 2)
      throw ValidationError("scenario field 'eps' (line " +
                            std::to_string(sc.line_of("eps")) +
                            ") needs at least two entries");
  }
  if (sc.delta_t_factor <= 0)
    throw ValidationError("scenario field 'delta_t_factor' must be positive");
  if (sc.weight_quantum <= 0)
    throw ValidationError("scenario field 'weight_quantum' must be positive");
  if (sc.tol_volume <= 0)
    throw ValidationError("scenario field 'tol_volume' must be positive");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

}  // namespace nambu
