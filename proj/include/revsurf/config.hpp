#pragma once

// Surface config files: one `key = value` per line, `#` starts a comment.
//
//   kind    curvature | warping
//   expr    closed form in t            (or)
//   samples path to a CSV with columns t,value, relative to the config
//   tmax    horizon (default: 10, or the last sample)
//   tail    C,beta meaning |G(t)| <= C t^(-beta) beyond the horizon
//   ode_tol, quad_tol, root_tol, grid_n, max_turnings

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "revsurf/csv.hpp"
#include "revsurf/error.hpp"
#include "revsurf/model_surface.hpp"

namespace revsurf {

struct SurfaceConfig {
  RadialProfile::Kind kind = RadialProfile::Kind::kCurvature;
  std::optional<std::string> expr;
  std::optional<std::filesystem::path> samples;
  std::optional<double> tmax;
  std::optional<TailBound> tail;
  Tolerances tolerances;
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& v, int line) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) throw ParseError(key + " needs a number, got '" + v + "'", line);
  return x;
}

inline int parse_int(const std::string& key, const std::string& v, int line) {
  const double x = parse_number(key, v, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ParseError(key + " needs an integer, got '" + v + "'", line);
  return static_cast<int>(x);
}

}  // namespace detail

/// Parses config text. Relative sample paths resolve against `base_dir`.
inline SurfaceConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  SurfaceConfig cfg;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line);
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (value.empty()) throw ParseError("empty value for " + key, line);
    if (seen.count(key)) throw ParseError("duplicate key " + key + " (first on line " + std::to_string(seen[key]) + ")", line);
    seen[key] = line;
    if (key == "kind") {
      if (value == "curvature") cfg.kind = RadialProfile::Kind::kCurvature;
      else if (value == "warping") cfg.kind = RadialProfile::Kind::kWarping;
      else throw ParseError("kind must be curvature or warping, got '" + value + "'", line);
    } else if (key == "expr") {
      try {
        Expression::parse(value);
      } catch (const ValidationFailure& e) {
        throw ParseError(std::string("bad expression: ") + e.what(), line);
      }
      cfg.expr = value;
    } else if (key == "samples") {
      std::filesystem::path p(value);
      cfg.samples = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (key == "tmax") {
      cfg.tmax = detail::parse_number(key, value, line);
    } else if (key == "tail") {
      const auto comma = value.find(',');
      if (comma == std::string::npos) throw ParseError("tail needs C,beta", line);
      cfg.tail = TailBound{detail::parse_number(key, detail::trim(value.substr(0, comma)), line),
                           detail::parse_number(key, detail::trim(value.substr(comma + 1)), line)};
    } else if (key == "ode_tol") {
      cfg.tolerances.ode_tol = detail::parse_number(key, value, line);
    } else if (key == "quad_tol") {
      cfg.tolerances.quad_tol = detail::parse_number(key, value, line);
    } else if (key == "root_tol") {
      cfg.tolerances.root_tol = detail::parse_number(key, value, line);
    } else if (key == "grid_n") {
      cfg.tolerances.grid_n = detail::parse_int(key, value, line);
    } else if (key == "max_turnings") {
      cfg.tolerances.max_turnings = detail::parse_int(key, value, line);
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }
  if (!seen.count("kind")) throw ParseError("missing key kind", 0);
  if (cfg.expr.has_value() == cfg.samples.has_value()) throw ParseError("exactly one of expr and samples is required", 0);
  if (cfg.tail && !(cfg.tail->C >= 0.0)) throw ValidationError("tail constant C must be non-negative");
  if (cfg.tmax && !(*cfg.tmax > 0.0)) throw ValidationError("tmax must be positive");
  cfg.tolerances.validate();
  return cfg;
}

inline SurfaceConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

/// Builds the profile a config describes.
inline RadialProfile build_surface(const SurfaceConfig& cfg) {
  constexpr double kDefaultHorizon = 10.0;
  if (cfg.expr) {
    const double T = cfg.tmax.value_or(kDefaultHorizon);
    const auto fn = RadialFunction::parse(*cfg.expr);
    return cfg.kind == RadialProfile::Kind::kCurvature ? from_curvature(fn, T, cfg.tolerances, cfg.tail)
                                                       : from_warping(fn, T, cfg.tolerances, cfg.tail);
  }
  std::ifstream in(*cfg.samples);
  if (!in) throw ValidationError("cannot read samples " + cfg.samples->string());
  const auto table = read_numeric_csv(in);
  if (table.header.size() != 2) throw ParseError("samples need two columns t,value", 1);
  const auto& t = table.columns[0];
  const auto& v = table.columns[1];
  if (t.size() < 4) throw ValidationError("samples need at least 4 rows");
  const double T = cfg.tmax.value_or(t.back());
  if (T > t.back()) throw ValidationError("tmax exceeds the last sample");
  if (cfg.kind == RadialProfile::Kind::kWarping) return from_warping_samples(t, v, T, cfg.tolerances, cfg.tail);
  return from_curvature(RadialFunction(MonotoneCubic(t, v)), T, cfg.tolerances, cfg.tail);
}

inline RadialProfile load_surface(const std::filesystem::path& path) { return build_surface(read_config(path)); }

}  // namespace revsurf
