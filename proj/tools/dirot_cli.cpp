// Command-line front end for directional couplings.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "dirot/dirot.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 2;
constexpr int kParse = 64;
constexpr int kMismatch = 70;

struct Inputs {
  std::string mu_path;
  std::string nu_path;
  bool samples = false;
};

struct Output {
  std::string path;
  std::string format;
};

struct GridSpec {
  dirot::Rational lo;
  dirot::Rational hi;
  long steps = 0;
};

GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw dirot::ParseError("grid must look like min:max:steps");
  GridSpec g;
  g.lo = dirot::parse_rational(text.substr(0, a));
  g.hi = dirot::parse_rational(text.substr(a + 1, b - a - 1));
  const dirot::Rational steps = dirot::parse_rational(text.substr(b + 1));
  if (steps.get_den() != 1 || steps < 1 || steps > 100000) throw dirot::ParseError("grid steps must be an integer in [1, 100000]");
  if (g.hi < g.lo) throw dirot::ParseError("grid max is below grid min");
  g.steps = steps.get_num().get_si();
  return g;
}

std::vector<double> grid_points(const GridSpec& g) {
  std::vector<double> out;
  for (long i = 0; i <= g.steps; ++i) out.push_back(dirot::to_double(g.lo + (g.hi - g.lo) * i / g.steps));
  return out;
}

std::pair<dirot::Marginal, dirot::Marginal> load(const Inputs& in) {
  if (in.samples) {
    return {dirot::DiscreteMeasure::from_samples(dirot::read_samples_file(in.mu_path)),
            dirot::DiscreteMeasure::from_samples(dirot::read_samples_file(in.nu_path))};
  }
  return {dirot::read_measure_file(in.mu_path), dirot::read_measure_file(in.nu_path)};
}

const dirot::DiscreteMeasure* as_discrete(const dirot::Marginal& m) { return std::get_if<dirot::DiscreteMeasure>(&m); }

void emit(const Output& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw dirot::ParseError("cannot write '" + out.path + "'");
  f << text;
}

std::string num(const dirot::Rational& q) { return dirot::format_double(dirot::to_double(q)); }

std::string transport_blocks(const dirot::KernelCoupling& k) {
  // one line per block: origins [x_lo, x_hi] sent monotonically onto [y_lo, y_hi]
  std::ostringstream s;
  s << "kind\tx_lo\tx_hi\tmass\ty_lo\ty_hi\n";
  auto line = [&](const char* kind, const dirot::Rational& xl, const dirot::Rational& xh, const dirot::Rational& m,
                  const dirot::Rational& yl, const dirot::Rational& yh) {
    s << kind << '\t' << num(xl) << '\t' << num(xh) << '\t' << dirot::to_string(m) << '\t' << num(yl) << '\t' << num(yh)
      << '\n';
  };
  for (const auto& a : k.identity.atoms()) line("identity", a.at, a.at, a.mass, a.at, a.at);
  for (const auto& seg : k.identity.continuous().segments()) {
    line("identity", seg.lo, seg.hi, seg.density * (seg.hi - seg.lo), seg.lo, seg.hi);
  }
  for (const auto& p : k.map) line("map", p.lo, p.hi, p.mass(), p.at(p.lo), p.at(p.hi));
  for (const auto& r : k.atom_rows) {
    for (const auto& d : r.destination.atoms()) line("atom", r.origin, r.origin, d.mass, d.at, d.at);
    for (const auto& seg : r.destination.continuous().segments()) {
      line("spread", r.origin, r.origin, seg.density * (seg.hi - seg.lo), seg.lo, seg.hi);
    }
  }
  return s.str();
}

int cmd_check(const Inputs& in) {
  const auto [mu, nu] = load(in);
  const dirot::MixedMeasure m = dirot::to_mixed(mu), n = dirot::to_mixed(nu);
  if (m.total_mass() != n.total_mass()) {
    std::cout << "NOT DOMINATED: total masses differ (" << dirot::to_string(m.total_mass()) << " vs "
              << dirot::to_string(n.total_mass()) << ")\n";
    return kInfeasible;
  }
  try {
    dirot::MarginalPair pair(m, n);
  } catch (const dirot::DominanceError& e) {
    std::cout << "NOT DOMINATED: first violation at " << dirot::format_double(e.location()) << "\n";
    return kInfeasible;
  }
  std::cout << "DOMINATED\n";
  return kOk;
}

int cmd_couple(const Inputs& in, const Output& out) {
  const auto [mu, nu] = load(in);
  const auto* a = as_discrete(mu);
  const auto* b = as_discrete(nu);
  if (a && b) {
    const dirot::Coupling p = dirot::couple(*a, *b);
    if (out.format == "json") {
      emit(out, dirot::coupling_json(p));
    } else {
      emit(out, dirot::coupling_csv(p, out.format == "tsv" ? '\t' : ','));
    }
    return kOk;
  }
  const dirot::KernelCoupling k = dirot::couple_general(mu, nu);
  emit(out, out.format == "json" ? dirot::kernel_json(k) : transport_blocks(k));
  return kOk;
}

int cmd_cdf(const Inputs& in, const Output& out, const std::optional<std::string>& grid,
            const std::vector<std::string>& at) {
  const auto [mu, nu] = load(in);
  const dirot::MarginalPair pair(dirot::to_mixed(mu), dirot::to_mixed(nu));
  std::vector<std::pair<double, double>> pts;
  for (const std::string& p : at) {
    const auto comma = p.find(',');
    if (comma == std::string::npos) throw dirot::ParseError("--at expects x,y");
    pts.emplace_back(dirot::parse_double(p.substr(0, comma)), dirot::parse_double(p.substr(comma + 1)));
  }
  if (grid) {
    const auto g = grid_points(parse_grid(*grid));
    for (double x : g) {
      for (double y : g) pts.emplace_back(x, y);
    }
  }
  if (pts.empty()) throw dirot::ParseError("cdf needs --grid or --at");
  if (out.format == "json") {
    dirot::ordered_json arr = dirot::ordered_json::array();
    for (const auto& [x, y] : pts) {
      arr.push_back({{"x", x}, {"y", y}, {"cdf", dirot::to_string(dirot::p_star_cdf(pair, x, y))}});
    }
    emit(out, dirot::ordered_json{{"points", arr}}.dump() + "\n");
    return kOk;
  }
  const char sep = out.format == "csv" ? ',' : '\t';
  std::string text = std::string("x") + sep + "y" + sep + "cdf\n";
  for (const auto& [x, y] : pts) {
    text += dirot::format_double(x) + sep + dirot::format_double(y) + sep + num(dirot::p_star_cdf(pair, x, y)) + "\n";
  }
  emit(out, text);
  return kOk;
}

int cmd_bounds(const Inputs& in, const Output& out) {
  const auto [mu, nu] = load(in);
  const dirot::VarianceBounds b = dirot::variance_bounds(mu, nu);
  if (out.format == "json") {
    dirot::ordered_json j;
    j["mean_gap"] = dirot::to_string(b.mean_gap);
    j["var_lower"] = dirot::to_string(b.lower);
    j["var_upper"] = dirot::to_string(b.upper);
    emit(out, j.dump() + "\n");
    return kOk;
  }
  const char sep = out.format == "csv" ? ',' : '\t';
  std::string text = std::string("quantity") + sep + "exact" + sep + "value\n";
  auto row = [&](const char* name, const dirot::Rational& q) {
    text += std::string(name) + sep + dirot::to_string(q) + sep + num(q) + "\n";
  };
  row("mean_gap", b.mean_gap);
  row("var_lower", b.lower);
  row("var_upper", b.upper);
  emit(out, text);
  return kOk;
}

int cmd_map(const Inputs& in, const Output& out) {
  const auto [mu, nu] = load(in);
  const dirot::KernelCoupling k = dirot::couple_general(mu, nu);
  emit(out, out.format == "json" ? dirot::kernel_json(k) : transport_blocks(k));
  return kOk;
}

int cmd_decompose(const Inputs& in, const Output& out) {
  const auto [mu, nu] = load(in);
  const dirot::AntitoneDecomposition d = dirot::decompose(dirot::to_mixed(mu), dirot::to_mixed(nu));
  if (out.format == "json") {
    dirot::ordered_json layers = dirot::ordered_json::array();
    for (const auto& l : d.layers) {
      dirot::ordered_json knots = dirot::ordered_json::array();
      for (const auto& k : l.layer.knots()) knots.push_back({dirot::to_string(k.z), dirot::to_string(k.value)});
      layers.push_back({{"peak", dirot::to_string(l.peak)}, {"mass", dirot::to_string(l.mu.total_mass())}, {"knots", knots}});
    }
    dirot::ordered_json j;
    j["identity"] = dirot::to_json(d.identity);
    j["layers"] = std::move(layers);
    j["coupling"] = dirot::to_json(d.total());
    emit(out, j.dump() + "\n");
    return kOk;
  }
  const char sep = out.format == "csv" ? ',' : '\t';
  std::string text = std::string("layer") + sep + "z" + sep + "F\n";
  for (std::size_t i = 0; i < d.layers.size(); ++i) {
    for (const auto& k : d.layers[i].layer.knots()) {
      text += std::to_string(i + 1) + sep + num(k.z) + sep + num(k.value) + "\n";
    }
  }
  emit(out, text);
  return kOk;
}

int cmd_cone(const Inputs& in, const Output& out, const std::optional<std::string>& min_gain,
             const std::optional<std::string>& displacement) {
  if (min_gain.has_value() == displacement.has_value()) {
    throw dirot::ParseError("cone needs exactly one of --min-gain or --displacement");
  }
  const dirot::ConeConstraint c = min_gain ? dirot::ConeConstraint::constant(dirot::parse_rational(*min_gain))
                                           : dirot::read_displacement_file(*displacement);
  const auto [mu, nu] = load(in);
  const auto* a = as_discrete(mu);
  const auto* b = as_discrete(nu);
  if (a && b) {
    const dirot::Coupling p = dirot::couple_cone(*a, *b, c);
    emit(out, out.format == "json" ? dirot::coupling_json(p) : dirot::coupling_csv(p, out.format == "tsv" ? '\t' : ','));
    return kOk;
  }
  const dirot::KernelCoupling k = dirot::couple_cone(dirot::to_mixed(mu), dirot::to_mixed(nu), c);
  emit(out, out.format == "json" ? dirot::kernel_json(k) : transport_blocks(k));
  return kOk;
}

int cmd_verify(std::uint64_t seed, std::size_t count) {
  return dirot::run_verification(seed, count, std::cout) == 0 ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal couplings of two distributions under Y >= X"};
  app.require_subcommand(1);

  Inputs in;
  Output out;
  std::optional<std::string> grid, min_gain, displacement;
  std::vector<std::string> at;
  std::uint64_t seed = 0;
  std::size_t count = 200;

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--mu", in.mu_path, "first marginal (CSV) or sample file")->required();
    sub->add_option("--nu", in.nu_path, "second marginal (CSV) or sample file")->required();
    sub->add_flag("--samples", in.samples, "inputs are raw samples, one value per line");
    sub->add_option("--out", out.path, "write output here instead of stdout");
  };
  auto* check = app.add_subcommand("check", "test stochastic order of the inputs");
  add_inputs(check);
  auto* couple = app.add_subcommand("couple", "optimal directional coupling");
  add_inputs(couple);
  couple->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  auto* cdf = app.add_subcommand("cdf", "joint cdf of the optimal coupling");
  add_inputs(cdf);
  cdf->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  cdf->add_option("--grid", grid, "min:max:steps, evaluated on the square grid");
  cdf->add_option("--at", at, "single point x,y (repeatable)");
  auto* bounds = app.add_subcommand("bounds", "sharp variance bounds for Y - X");
  add_inputs(bounds);
  bounds->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  auto* map = app.add_subcommand("map", "transport map blocks of the optimal coupling");
  add_inputs(map);
  map->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  auto* decomp = app.add_subcommand("decompose", "layered antitone decomposition");
  add_inputs(decomp);
  decomp->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  auto* cone = app.add_subcommand("cone", "optimal coupling under Y >= X + D(X)");
  add_inputs(cone);
  cone->add_option("--format", out.format, "json, csv or tsv")->check(CLI::IsMember({"json", "csv", "tsv"}));
  cone->add_option("--min-gain", min_gain, "constant displacement d");
  cone->add_option("--displacement", displacement, "CSV of D breakpoints (location,displacement)");
  auto* verify = app.add_subcommand("verify", "randomized oracle suite");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--count", count, "number of instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (out.format.empty()) {
      out.format = *couple || *cone ? "json" : "tsv";
    }
    if (*check) return cmd_check(in);
    if (*couple) return cmd_couple(in, out);
    if (*cdf) return cmd_cdf(in, out, grid, at);
    if (*bounds) return cmd_bounds(in, out);
    if (*map) return cmd_map(in, out);
    if (*decomp) return cmd_decompose(in, out);
    if (*cone) return cmd_cone(in, out, min_gain, displacement);
    if (*verify) return cmd_verify(seed, count);
  } catch (const dirot::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const dirot::DominanceError& e) {
    std::cerr << "infeasible: " << e.what() << " (at " << dirot::format_double(e.location()) << ")\n";
    return kInfeasible;
  } catch (const dirot::DomainError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kMismatch;
  }
  return kOk;
}
