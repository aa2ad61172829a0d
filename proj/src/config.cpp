#include "nlskt/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace {

using Defaults = std::map<std::string, std::string>;

void add_solver(Defaults& d) {
  const SolverConfig s;
  d["solver.tolerance"] = "1e-10";
  d["solver.max_iterations"] = std::to_string(s.max_iterations);
  d["solver.max_dt_halvings"] = std::to_string(s.max_dt_halvings);
  d["solver.linear_solver"] = "auto";
  d["solver.dense_max_unknowns"] = std::to_string(s.dense_max_unknowns);
  d["solver.krylov_restart"] = std::to_string(s.krylov_restart);
  d["solver.krylov_tol"] = "1e-13";
  d["solver.krylov_max_iterations"] = std::to_string(s.krylov_max_iterations);
  d["solver.preconditioner"] = s.preconditioner;
  d["solver.precond_max_age"] = std::to_string(s.precond_max_age);
}

void add_output(Defaults& d, const std::string& name) {
  d["output.dir"] = "out/" + name;
  d["output.name"] = name;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + what + ", got '" + text + "'");
  }
}

Defaults defaults_for(const std::string& sub) {
  Defaults d;
  add_solver(d);
  add_output(d, sub);
  if (sub == "simulate") {
    d["grid.dimension"] = "1";
    d["grid.cells"] = "128";
    d["grid.length"] = "25";
    d["grid.cells_y"] = "64";
    d["grid.length_y"] = "25";
    d["time.t_final"] = "5";
    d["time.dt"] = "0.3125";
    d["coefficients.d1"] = "0";
    d["coefficients.d2"] = "0";
    d["coefficients.d11"] = "0";
    d["coefficients.d22"] = "0";
    d["coefficients.d12"] = "1";
    d["coefficients.d21"] = "2";
    d["kernels.sigma1"] = "dirac";
    d["kernels.sigma2"] = "dirac";
    d["kernels.rho1"] = "smooth";
    d["kernels.rho2"] = "smooth";
    d["reaction.type"] = "zero";
    d["reaction.coefficients"] = "";
    d["initial.preset"] = "smooth";
    d["initial.u1"] = "";
    d["initial.u2"] = "";
    d["output.snapshots"] = "5";
    d["output.dissipation"] = "auto";
    d["output.entropy_check"] = "true";
  } else if (sub == "converge") {
    d["study.kernel"] = "smooth";
    d["study.ic"] = "indicator";
    d["study.length"] = "25";
    d["study.t_final"] = "5";
    d["study.levels"] = "6";
    d["study.base_cells"] = "32";
    d["study.base_dt"] = "5";
    d["study.d12"] = "1";
    d["study.d21"] = "2";
    d["study.d1"] = "0";
    d["study.d2"] = "0";
    d["study.fit_levels"] = "5";
    d["study.aggregation"] = "max";
  } else if (sub == "localize") {
    d["study.ic"] = "smooth";
    d["study.length"] = "25";
    d["study.t_final"] = "1";
    d["study.cells"] = "1024";
    d["study.dt"] = "0.01";
    d["study.ratios"] = "1,0.5,0.4,0.3,0.2,0.1,0.05,0.04,0.03,0.02,0.01,0.005,0.003";
    d["study.fit_max_ratio"] = "0.05";
    d["study.d12"] = "1";
    d["study.d21"] = "2";
  } else if (sub == "turing1d") {
    d["study.case"] = "linear";
    d["study.cells"] = "500";
    d["study.length"] = "25";
    d["study.radius_factor"] = "0.20408163265306123";
    d["study.t_final"] = "500";
    d["study.dt"] = "0.1";
    d["study.epsilon"] = "0.01";
    d["study.stationary_steps"] = "10";
    d["study.d1"] = "";
    d["study.d2"] = "";
    d["study.d21"] = "";
    d["output.snapshots"] = "0,500";
  } else if (sub == "turing2d") {
    d["study.case"] = "sym";
    d["study.nx"] = "133";
    d["study.ny"] = "100";
    d["study.lx"] = "4";
    d["study.ly"] = "3";
    d["study.t_final"] = "20";
    d["study.dt"] = "0.01";
    d["study.epsilon"] = "0.01";
    d["study.stationary_steps"] = "10";
    d["study.d1"] = "";
    d["study.d2"] = "";
    d["study.d21"] = "";
    d["output.snapshots"] = "0,20";
  } else if (sub == "kolmogorov-check") {
    d["kolmogorov.cells"] = "64";
    d["kolmogorov.length"] = "1";
    d["kolmogorov.steps"] = "20";
    d["kolmogorov.dt"] = "0.001";
    d["kolmogorov.mu_amplitude"] = "0.5";
    d["kolmogorov.mu_speed"] = "5";
    d["kolmogorov.z_amplitude"] = "0.5";
  } else if (sub == "bounded-entropy") {
    d["bounded.cells"] = "32";
    d["bounded.steps"] = "20";
    d["bounded.dt"] = "0.001";
    d["bounded.d1"] = "0.1";
    d["bounded.d2"] = "0.1";
    d["bounded.d12"] = "1";
    d["bounded.d21"] = "1";
    d["bounded.amplitude1"] = "0.5";
    d["bounded.amplitude2"] = "0.3";
  } else {
    throw ConfigError("unknown subcommand '" + sub + "'");
  }
  return d;
}

}  // namespace

const std::vector<std::string>& RunConfig::subcommands() {
  static const std::vector<std::string> names{"simulate",  "converge",         "localize",       "turing1d",
                                              "turing2d", "kolmogorov-check", "bounded-entropy"};
  return names;
}

RunConfig RunConfig::defaults(const std::string& subcommand) {
  RunConfig c;
  c.subcommand_ = subcommand;
  c.values_ = defaults_for(subcommand);
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "' for " + subcommand_);
  it->second = trim(value);
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load_string(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      set(section, body.data());
      continue;
    }
    for (const auto& [key, node] : body) set(section + "." + key, node.data());
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_string(ss.str());
}

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  os << "; " << subcommand_ << "\n";
  std::string section;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << "\n";
      os << "[" << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << value << "\n";
  }
  return os.str();
}

std::string RunConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing configuration key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const { return to_double(get_string(key), key); }

int RunConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer for " + key);
  return static_cast<int>(v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean for " + key + ", got '" + v + "'");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  const std::string v = get_string(key);
  if (v.empty()) return out;
  for (const auto& part : split(v, ',')) out.push_back(to_double(part, key));
  return out;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.tolerance = cfg.get_double("solver.tolerance");
  s.max_iterations = cfg.get_int("solver.max_iterations");
  s.max_dt_halvings = cfg.get_int("solver.max_dt_halvings");
  s.linear_solver = linear_solver_from_string(cfg.get_string("solver.linear_solver"));
  s.dense_max_unknowns = cfg.get_int("solver.dense_max_unknowns");
  s.krylov_restart = cfg.get_int("solver.krylov_restart");
  s.krylov_tol = cfg.get_double("solver.krylov_tol");
  s.krylov_max_iterations = cfg.get_int("solver.krylov_max_iterations");
  s.preconditioner = cfg.get_string("solver.preconditioner");
  s.precond_max_age = cfg.get_int("solver.precond_max_age");
  s.validate();
  return s;
}

KernelSpec parse_kernel(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& name = parts.at(0);
  auto arg = [&](const char* what) {
    if (parts.size() != 2) throw ConfigError("kernel '" + name + "' needs one parameter (" + what + ")");
    return to_double(parts[1], std::string("kernel ") + what);
  };
  if (name == "dirac" && parts.size() == 1) return DiracKernel{};
  if (name == "smooth" && parts.size() == 1) return SmoothCosKernel{};
  if (name == "indicator") return IndicatorKernel{arg("width")};
  if (name == "hunting") return HuntingKernel{arg("radius")};
  if (name == "annulus" && parts.size() == 1) return AnnulusKernel{};
  if (name == "annulus-quadrant" && parts.size() == 1) return AnnulusKernel{3.0 / 8.0, 0.5, true};
  throw ConfigError("unknown kernel '" + text +
                    "' (dirac, smooth, indicator:<width>, hunting:<radius>, annulus, annulus-quadrant)");
}

ReactionSpec parse_reaction(const std::string& type, const std::string& coefficients) {
  std::vector<double> c;
  if (!trim(coefficients).empty()) {
    for (const auto& p : split(coefficients, ',')) c.push_back(to_double(p, "reaction coefficient"));
  }
  auto need = [&](std::size_t n) {
    if (!c.empty() && c.size() != n) {
      throw ConfigError("reaction '" + type + "' takes " + std::to_string(n) + " coefficients");
    }
    return !c.empty();
  };
  if (type == "zero") {
    need(0);
    return ZeroReaction{};
  }
  if (type == "lotka-volterra") {
    LotkaVolterra lv;
    if (need(6)) {
      lv.a1 = {c[0], c[1], c[2]};
      lv.a2 = {c[3], c[4], c[5]};
    }
    return lv;
  }
  if (type == "segel-levin") {
    SegelLevin s;
    if (need(5)) s = SegelLevin{c[0], c[1], c[2], c[3], c[4]};
    return s;
  }
  if (type == "mny") {
    MimuraNishiuraYamaguti m;
    if (need(7)) m = MimuraNishiuraYamaguti{c[0], c[1], c[2], c[3], c[4], c[5], c[6]};
    return m;
  }
  throw ConfigError("unknown reaction '" + type + "' (zero, lotka-volterra, segel-levin, mny)");
}

Profile parse_profile(const std::string& text) {
  Profile p;
  for (const auto& term : split(text, '+')) {
    if (term.empty()) continue;
    const auto parts = split(term, ':');
    std::vector<double> v;
    for (std::size_t i = 1; i < parts.size(); ++i) v.push_back(to_double(parts[i], "profile term '" + term + "'"));
    if (parts[0] == "const" && v.size() == 1) {
      p.push_back(ConstantTerm{v[0]});
    } else if (parts[0] == "box" && (v.size() == 3 || v.size() == 5)) {
      BoxTerm b{v[0], v[1], v[2]};
      if (v.size() == 5) {
        b.y0 = v[3];
        b.y1 = v[4];
      }
      p.push_back(b);
    } else if (parts[0] == "cos" && (v.size() == 1 || v.size() == 2)) {
      p.push_back(HarmonicTerm{v[0], v.size() == 2 ? v[1] : 0.0});
    } else {
      throw ConfigError("bad profile term '" + term + "' (const:c, box:h:x0:x1[:y0:y1], cos:a[:phase])");
    }
  }
  if (p.empty()) throw ConfigError("empty initial profile");
  return p;
}

}  // namespace nlskt
