#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dirot/constraints.hpp"
#include "dirot/coupling.hpp"
#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/rational.hpp"
#include "dirot/transport_map.hpp"

namespace dirot {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

/// Non-empty, non-comment lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> content_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip(line);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(number, line);
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

inline std::string at_line(std::size_t n) { return "line " + std::to_string(n) + ": "; }

}  // namespace detail

/// Measure file: header "location,mass" for a discrete measure or
/// "location,cdf" for a piecewise-linear cdf given at its breakpoints.
inline Marginal read_measure(std::istream& in) {
  const auto lines = detail::content_lines(in);
  if (lines.empty()) throw ParseError("empty measure file");
  const auto header = detail::split_fields(lines.front().second);
  if (header.size() != 2 || detail::strip(header[0]) != "location") {
    throw ParseError(detail::at_line(lines.front().first) + "expected header 'location,mass' or 'location,cdf'");
  }
  const std::string kind = detail::strip(header[1]);
  if (kind != "mass" && kind != "cdf") {
    throw ParseError(detail::at_line(lines.front().first) + "unknown column '" + kind + "'");
  }
  std::vector<Atom> atoms;
  std::vector<Knot> knots;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, text] = lines[i];
    const auto fields = detail::split_fields(text);
    if (fields.size() != 2) throw ParseError(detail::at_line(number) + "expected two fields");
    try {
      if (kind == "mass") {
        atoms.push_back({parse_double(fields[0]), parse_rational(fields[1])});
      } else {
        knots.push_back({parse_rational(fields[0]), parse_rational(fields[1])});
      }
    } catch (const ParseError& e) {
      throw ParseError(detail::at_line(number) + e.what());
    }
  }
  try {
    if (kind == "mass") return DiscreteMeasure(std::move(atoms));
    return PLMeasure(std::move(knots));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid measure: ") + e.what());
  }
}

inline Marginal read_measure_file(const std::string& path) {
  auto in = detail::open_input(path);
  try {
    return read_measure(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// One real per line.
inline std::vector<double> read_samples(std::istream& in) {
  std::vector<double> out;
  for (const auto& [number, text] : detail::content_lines(in)) {
    try {
      out.push_back(parse_double(text));
    } catch (const ParseError& e) {
      throw ParseError(detail::at_line(number) + e.what());
    }
  }
  if (out.empty()) throw ParseError("sample file has no values");
  return out;
}

inline std::vector<double> read_samples_file(const std::string& path) {
  auto in = detail::open_input(path);
  try {
    return read_samples(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Displacement file with header "location,displacement".
inline ConeConstraint read_displacement(std::istream& in) {
  const auto lines = detail::content_lines(in);
  if (lines.empty()) throw ParseError("empty displacement file");
  const auto header = detail::split_fields(lines.front().second);
  if (header.size() != 2 || detail::strip(header[0]) != "location" || detail::strip(header[1]) != "displacement") {
    throw ParseError(detail::at_line(lines.front().first) + "expected header 'location,displacement'");
  }
  std::vector<std::pair<Rational, Rational>> pts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = detail::split_fields(lines[i].second);
    if (fields.size() != 2) throw ParseError(detail::at_line(lines[i].first) + "expected two fields");
    try {
      pts.emplace_back(parse_rational(fields[0]), parse_rational(fields[1]));
    } catch (const ParseError& e) {
      throw ParseError(detail::at_line(lines[i].first) + e.what());
    }
  }
  if (pts.empty()) throw ParseError("displacement file has no breakpoints");
  return ConeConstraint(std::move(pts));
}

inline ConeConstraint read_displacement_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_displacement(in);
}

// ---------------------------------------------------------------------------
// Coupling serialization

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Coupling& p) {
  ordered_json pts = ordered_json::array();
  for (const SupportPoint& s : p.points()) {
    ordered_json e;
    e["x"] = s.x;
    e["y"] = s.y;
    e["mass"] = to_string(s.mass);
    pts.push_back(std::move(e));
  }
  ordered_json out;
  out["points"] = std::move(pts);
  return out;
}

inline std::string coupling_json(const Coupling& p) { return to_json(p).dump() + "\n"; }

inline Coupling coupling_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("coupling JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array()) {
    throw ParseError("coupling JSON: missing 'points' array");
  }
  std::vector<SupportPoint> pts;
  for (const auto& e : doc["points"]) {
    if (!e.is_object() || !e.contains("x") || !e.contains("y") || !e.contains("mass") || !e["x"].is_number() ||
        !e["y"].is_number() || !e["mass"].is_string()) {
      throw ParseError("coupling JSON: each point needs numeric x, y and a string mass");
    }
    pts.push_back({e["x"].get<double>(), e["y"].get<double>(), parse_rational(e["mass"].get<std::string>())});
  }
  try {
    return Coupling(std::move(pts));
  } catch (const DomainError& e) {
    throw ParseError(std::string("coupling JSON: ") + e.what());
  }
}

inline std::string coupling_csv(const Coupling& p, char sep = ',') {
  std::string out = std::string("x") + sep + "y" + sep + "mass\n";
  for (const SupportPoint& s : p.points()) {
    out += format_double(s.x) + sep + format_double(s.y) + sep + to_string(s.mass) + "\n";
  }
  return out;
}

inline ordered_json to_json(const MixedMeasure& m) {
  ordered_json atoms = ordered_json::array();
  for (const PointMass& a : m.atoms()) atoms.push_back({{"at", to_string(a.at)}, {"mass", to_string(a.mass)}});
  ordered_json segs = ordered_json::array();
  for (const Segment& s : m.continuous().segments()) {
    segs.push_back({{"lo", to_string(s.lo)}, {"hi", to_string(s.hi)}, {"density", to_string(s.density)}});
  }
  ordered_json out;
  out["atoms"] = std::move(atoms);
  out["segments"] = std::move(segs);
  return out;
}

/// Exact rationals are written as strings.
inline ordered_json to_json(const KernelCoupling& k) {
  ordered_json map = ordered_json::array();
  for (const MapPiece& p : k.map) {
    ordered_json e;
    e["lo"] = to_string(p.lo);
    e["hi"] = to_string(p.hi);
    e["density"] = to_string(p.density);
    e["intercept"] = to_string(p.intercept);
    e["slope"] = to_string(p.slope);
    map.push_back(std::move(e));
  }
  ordered_json rows = ordered_json::array();
  for (const AtomRow& r : k.atom_rows) {
    ordered_json e;
    e["origin"] = to_string(r.origin);
    e["mass"] = to_string(r.mass);
    e["destination"] = to_json(r.destination);
    rows.push_back(std::move(e));
  }
  ordered_json out;
  out["identity"] = to_json(k.identity);
  out["map"] = std::move(map);
  out["atoms"] = std::move(rows);
  return out;
}

inline std::string kernel_json(const KernelCoupling& k) { return to_json(k).dump() + "\n"; }

}  // namespace dirot
