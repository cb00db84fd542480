// Command-line front end. Angles are radians, lengths dimensionless.
// Exit status: 0 success, 1 invalid input or violated precondition,
// 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revsurf/revsurf.hpp"

using namespace revsurf;

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& what, std::size_t expect = 0) {
  std::vector<double> out;
  for (const auto& field : detail::split_fields(text)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size() || !std::isfinite(v))
      throw ValidationError(what + ": not a number '" + field + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(what + ": empty list");
  if (expect && out.size() != expect)
    throw ValidationError(what + ": expected " + std::to_string(expect) + " comma-separated values");
  return out;
}

SurfacePoint parse_point(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what, 2);
  if (!(v[0] >= 0.0)) throw ValidationError(what + ": radial coordinate must be >= 0");
  return {v[0], v[1]};
}

struct Common {
  std::vector<std::string> tol_overrides;
  std::string out;
};

Tolerances with_overrides(Tolerances tol, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--tol expects key=value, got '" + kv + "'");
    const std::string key = detail::trim(kv.substr(0, eq)), value = detail::trim(kv.substr(eq + 1));
    if (key == "ode_tol") tol.ode_tol = detail::parse_number(key, value, 0);
    else if (key == "quad_tol") tol.quad_tol = detail::parse_number(key, value, 0);
    else if (key == "root_tol") tol.root_tol = detail::parse_number(key, value, 0);
    else if (key == "grid_n") tol.grid_n = detail::parse_int(key, value, 0);
    else if (key == "max_turnings") tol.max_turnings = detail::parse_int(key, value, 0);
    else throw ValidationError("--tol accepts only tolerance keys, got '" + key + "'");
  }
  tol.validate();
  return tol;
}

RadialProfile load(const std::string& path, const Common& c) {
  SurfaceConfig cfg = read_config(path);
  cfg.tolerances = with_overrides(cfg.tolerances, c.tol_overrides);
  return build_surface(cfg);
}

void emit(const std::string& text, const Common& c) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << text;
}

void write_triangle(std::ostream& os, const TriangleRealization& t) {
  os << "sides a=" << t.a << " b=" << t.b << " c=" << t.c << '\n';
  os << "x=(" << t.x.t << ',' << t.x.theta << ") y=(" << t.y.t << ',' << t.y.theta << ")\n";
  os << "angle_p=" << t.angle_p << " angle_x=" << t.angle_x << " angle_y=" << t.angle_y << '\n';
  os << "angle_sum=" << t.angle_sum() << " ambiguous=" << (t.ambiguous ? "true" : "false") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesics, cut loci and comparison triangles on surfaces of revolution.\n"
               "Angles are in radians; points are given as t,theta. REVSURF_THREADS caps parallelism."};
  app.require_subcommand(1, 1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", common.tol_overrides, "tolerance override key=value (ode_tol, quad_tol, ...)");
    sub->add_option("--out,-o", common.out, "write the artifact here instead of stdout");
  };

  std::string surface, m_path, mt_path, from, to, base, x_str, y_str, sides_str, deltas_str, radii_str,
      fractions_str, field_path, tail_str, decay_str;
  double psi = 0, length = 0, spacing = 0, s_max = 0, delta0 = kPi, field_tmax = 10;
  int orientation = 1, dirs = 32, grid = 2048;
  std::vector<std::string> exprs;

  auto* s_surface = app.add_subcommand("surface", "profile summary: classes, total curvature, growth");
  s_surface->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  add_common(s_surface);

  auto* s_trace = app.add_subcommand("trace", "trace a geodesic; CSV s,t,theta,branch");
  s_trace->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_trace->add_option("--from", from, "start point t,theta")->required();
  s_trace->add_option("--psi", psi, "launch angle to the outward meridian, in [0, pi]")->required();
  s_trace->add_option("--length", length, "arclength to trace")->required();
  s_trace->add_option("--spacing", spacing, "sample spacing (0: solver steps)");
  s_trace->add_option("--orientation", orientation, "+1 for increasing theta, -1 otherwise");
  add_common(s_trace);

  auto* s_dist = app.add_subcommand("dist", "geodesic distance between two points");
  s_dist->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_dist->add_option("--from", from, "point t,theta")->required();
  s_dist->add_option("--to", to, "point t,theta")->required();
  add_common(s_dist);

  auto* s_cut = app.add_subcommand("cutlocus", "cut times per launch angle; CSV");
  s_cut->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_cut->add_option("--base", base, "base point t,theta")->required();
  s_cut->add_option("--dirs", dirs, "launch angles k*pi/dirs, k = 1..dirs (>= 8)");
  s_cut->add_option("--smax", s_max, "search horizon in arclength (default: tmax)");
  add_common(s_cut);

  auto* s_sector = app.add_subcommand("sector", "look for cut pairs inside sectors 0 < theta < delta");
  s_sector->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_sector->add_option("--deltas", deltas_str, "sector angles, comma-separated, each in (0, pi)")->required();
  s_sector->add_option("--radii", radii_str, "sample radii (default: tmax/8, tmax/4)");
  s_sector->add_option("--fractions", fractions_str, "angle fractions in (0, 1) (default: 0.25,0.5,0.75)");
  s_sector->add_option("--dirs", dirs, "launch angles per radius");
  s_sector->add_option("--smax", s_max, "cut search horizon (default: tmax/2)");
  add_common(s_sector);

  auto* s_tri = app.add_subcommand("triangle", "triangle with a vertex at the pole");
  s_tri->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_tri->add_option("--x", x_str, "vertex t,theta");
  s_tri->add_option("--y", y_str, "vertex t,theta");
  s_tri->add_option("--sides", sides_str, "a,b,c: embed by side lengths instead");
  add_common(s_tri);

  auto* s_tct = app.add_subcommand("tct", "compare the angles of a triangle of M with its model triangle");
  s_tct->add_option("--m", m_path, "surface M")->required()->check(CLI::ExistingFile);
  s_tct->add_option("--mtilde", mt_path, "model surface")->required()->check(CLI::ExistingFile);
  s_tct->add_option("--triangle", sides_str, "sides a,b,c of the triangle in M");
  s_tct->add_option("--x", x_str, "vertex t,theta (with --y, instead of --triangle)");
  s_tct->add_option("--y", y_str, "vertex t,theta");
  s_tct->add_option("--delta0", delta0, "sector angle bound in (0, pi]");
  add_common(s_tct);

  auto* s_gb = app.add_subcommand("gb-audit", "curvature integral against angle excess");
  s_gb->add_option("--surface", surface, "surface config")->required()->check(CLI::ExistingFile);
  s_gb->add_option("--x", x_str, "vertex t,theta");
  s_gb->add_option("--y", y_str, "vertex t,theta");
  s_gb->add_option("--sides", sides_str, "a,b,c instead of vertices");
  add_common(s_gb);

  auto* s_milnor = app.add_subcommand("milnor", "finiteness of total curvature from a curvature field");
  s_milnor->add_option("--field", field_path, "CSV t,K_1,...,K_k")->check(CLI::ExistingFile);
  s_milnor->add_option("--expr", exprs, "closed-form direction curvature (repeatable)");
  s_milnor->add_option("--tmax", field_tmax, "horizon for --expr fields");
  s_milnor->add_option("--grid", grid, "cells for --expr fields");
  s_milnor->add_option("--tail", tail_str, "C,beta: |G*| <= C t^-beta beyond the horizon");
  s_milnor->add_option("--decay", decay_str, "alpha,N: test liminf t^(2+alpha) K > N");
  add_common(s_milnor);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::ostringstream os;
    os.precision(12);
    auto sides = [&] { return parse_list(sides_str, "--sides", 3); };
    auto need_pair = [&](const char* what) {
      if (x_str.empty() != y_str.empty()) throw ValidationError(std::string(what) + ": give both --x and --y");
      if (x_str.empty() == sides_str.empty())
        throw ValidationError(std::string(what) + ": give either --x/--y or side lengths");
    };

    if (s_surface->parsed()) {
      const auto s = load(surface, common);
      const auto cls = classify(s);
      const auto tc = total_curvature(s);
      os << "description=" << s.description() << '\n';
      os << "tmax=" << s.horizon() << '\n';
      os << "von_mangoldt_from=";
      if (cls.von_mangoldt_from) os << *cls.von_mangoldt_from; else os << "none";
      os << "\ncartan_hadamard_from=";
      if (cls.cartan_hadamard_from) os << *cls.cartan_hadamard_from; else os << "none";
      os << "\nf_prime_tmax=" << tc.f_prime_horizon << '\n';
      os << "total_curvature=" << tc.value << " (" << to_string(tc.verdict) << ") error_bound=" << tc.error_bound
         << '\n';
      if (s.horizon() > 1.0) {
        const auto g = growth_diagnostics(s);
        os << "reciprocal_square_integral=" << g.reciprocal_square_integral << " ("
           << to_string(g.classification) << ")\n";
      }
    } else if (s_trace->parsed()) {
      const SurfacePoint p = parse_point(from, "--from");
      if (!(length > 0.0)) throw ValidationError("--length must be positive");
      if (!(psi >= 0.0 && psi <= kPi)) throw ValidationError("--psi must lie in [0, pi]");
      if (orientation != 1 && orientation != -1) throw ValidationError("--orientation must be 1 or -1");
      if (spacing < 0.0) throw ValidationError("--spacing must be >= 0");
      const auto s = load(surface, common);
      write_csv(os, trace(s, launch(s, p, psi, orientation), length, spacing));
    } else if (s_dist->parsed()) {
      const SurfacePoint a = parse_point(from, "--from"), b = parse_point(to, "--to");
      const auto s = load(surface, common);
      os << distance(s, a, b) << '\n';
    } else if (s_cut->parsed()) {
      const SurfacePoint p = parse_point(base, "--base");
      if (!(p.t > 0.0)) throw ValidationError("--base must lie off the pole");
      if (dirs < 8) throw ValidationError("--dirs must be at least 8");
      const auto s = load(surface, common);
      write_csv(os, cut_locus(s, p, dirs, s_max > 0.0 ? s_max : s.horizon()));
    } else if (s_sector->parsed()) {
      const auto deltas = parse_list(deltas_str, "--deltas");
      for (double d : deltas)
        if (!(d > 0.0 && d < kPi)) throw ValidationError("--deltas must lie in (0, pi)");
      const auto s = load(surface, common);
      SectorSamples samples;
      samples.radii = radii_str.empty() ? std::vector<double>{s.horizon() / 8, s.horizon() / 4}
                                        : parse_list(radii_str, "--radii");
      samples.angle_fractions =
          fractions_str.empty() ? std::vector<double>{0.25, 0.5, 0.75} : parse_list(fractions_str, "--fractions");
      write_summary(os, sector_scan(s, deltas, samples, s_max > 0.0 ? s_max : s.horizon() / 2, dirs));
    } else if (s_tri->parsed() || s_gb->parsed()) {
      need_pair(s_tri->parsed() ? "triangle" : "gb-audit");
      std::optional<SurfacePoint> x, y;
      std::vector<double> abc;
      if (!x_str.empty()) {
        x = parse_point(x_str, "--x");
        y = parse_point(y_str, "--y");
      } else {
        abc = sides();
      }
      const auto s = load(surface, common);
      const auto tri = x ? make_triangle(s, *x, *y) : embed_triangle(s, abc[0], abc[1], abc[2]);
      if (s_tri->parsed()) {
        write_triangle(os, tri);
      } else {
        os << "curvature_integral=" << tri.angle_sum() - kPi << '\n';
        os << "residual=" << gauss_bonnet_audit(s, tri) << '\n';
      }
    } else if (s_tct->parsed()) {
      need_pair("tct");
      std::optional<SurfacePoint> x, y;
      std::vector<double> abc;
      if (!x_str.empty()) {
        x = parse_point(x_str, "--x");
        y = parse_point(y_str, "--y");
      } else {
        abc = sides();
      }
      if (!(delta0 > 0.0 && delta0 <= kPi)) throw ValidationError("--delta0 must lie in (0, pi]");
      const auto m = load(m_path, common);
      const auto mt = load(mt_path, common);
      const auto tri = x ? make_triangle(m, *x, *y) : embed_triangle(m, abc[0], abc[1], abc[2]);
      const auto r = tct_verify(m, mt, tri, delta0);
      os << "triangle in M\n";
      write_triangle(os, tri);
      os << "model triangle\n";
      write_triangle(os, r.model);
      os << "in_sector=" << (r.in_sector ? "true" : "false") << '\n';
      write_csv(os, std::vector<ComparisonReport>{r});
    } else if (s_milnor->parsed()) {
      if (field_path.empty() == exprs.empty()) throw ValidationError("milnor: give either --field or --expr");
      std::optional<TailBound> tail;
      if (!tail_str.empty()) {
        const auto v = parse_list(tail_str, "--tail", 2);
        if (!(v[0] >= 0.0)) throw ValidationError("--tail: C must be non-negative");
        tail = TailBound{v[0], v[1]};
      }
      std::optional<DecayHypothesis> decay;
      if (!decay_str.empty()) {
        const auto v = parse_list(decay_str, "--decay", 2);
        if (!(v[0] > 0.0 && v[1] <= 0.0)) throw ValidationError("--decay needs alpha > 0 and N <= 0");
        decay = DecayHypothesis{v[0], v[1]};
      }
      const Tolerances tol = with_overrides(Tolerances{}, common.tol_overrides);
      CurvatureField field;
      if (!field_path.empty()) {
        std::ifstream in(field_path);
        field = read_field_csv(in);
      } else {
        if (!(field_tmax > 0.0)) throw ValidationError("--tmax must be positive");
        field = CurvatureField::from_expressions(exprs, field_tmax, grid);
      }
      write_report(os, milnor_verdict(field, tail, decay, tol));
    }
    emit(os.str(), common);
    return 0;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}
