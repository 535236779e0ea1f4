#include "splx/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "splx/errors.hpp"
#include "splx/io.hpp"
#include "splx/scenarios.hpp"

namespace splx {

namespace {

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "none";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Schema = std::map<std::string, std::map<std::string, Field>>;

template <typename M>
Field dbl(M RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = to_double("", v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Field dbl_opt(double RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) {
            c.*m = v == "none" ? std::numeric_limits<double>::quiet_NaN() : to_double("", v);
          },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Field lng(long RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = to_long("", v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field str(std::string RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return c.*m; }};
}

Field arc_d(double ArctanData::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.arctan.*m = to_double("", v); },
          [m](const RunConfig& c) { return fmt(c.arctan.*m); }};
}

const Schema& schema() {
  static const Schema s = [] {
    Schema s;
    s["run"]["out"] = str(&RunConfig::out);
    s["run"]["workers"] = lng(&RunConfig::workers);
    s["run"]["seed"] = {[](RunConfig& c, const std::string& v) {
                          c.seed = static_cast<std::uint64_t>(to_long("seed", v));
                        },
                        [](const RunConfig& c) { return std::to_string(c.seed); }};
    s["run"]["scenario"] = {[](RunConfig& c, const std::string& v) {
                              scenario(v);  // validates the name
                              c.scenario = v;
                            },
                            [](const RunConfig& c) { return c.scenario; }};
    s["lattice"]["n"] = lng(&RunConfig::n);
    s["lattice"]["kappa"] = dbl(&RunConfig::kappa);
    s["lattice"]["tau_fin"] = dbl(&RunConfig::tau_fin);
    s["lattice"]["dt"] = dbl(&RunConfig::dt);
    s["lattice"]["bc"] = {[](RunConfig& c, const std::string& v) {
                            if (v != "neumann" && v != "padded") throw ConfigError("bc must be neumann or padded");
                            c.bc = v;
                          },
                          [](const RunConfig& c) { return c.bc; }};
    s["lattice"]["pad"] = lng(&RunConfig::pad);
    s["lattice"]["snapshot_stride"] = lng(&RunConfig::snapshot_stride);
    s["lattice"]["init"] = {[](RunConfig& c, const std::string& v) {
                              if (v != "macroscopic" && v != "arctan")
                                throw ConfigError("init must be macroscopic or arctan");
                              c.init = v;
                            },
                            [](const RunConfig& c) { return c.init; }};
    s["profile"]["xi_ini"] = dbl_opt(&RunConfig::xi_ini);
    s["profile"]["trace"] = dbl_opt(&RunConfig::trace);
    s["profile"]["slope_left"] = dbl_opt(&RunConfig::slope_left);
    s["profile"]["slope_right"] = dbl_opt(&RunConfig::slope_right);
    s["profile"]["bumps"] = str(&RunConfig::bumps);
    s["profile"]["ramps"] = str(&RunConfig::ramps);
    s["arctan"]["c_plus"] = arc_d(&ArctanData::c_plus);
    s["arctan"]["d_plus"] = arc_d(&ArctanData::d_plus);
    s["arctan"]["e_plus"] = arc_d(&ArctanData::e_plus);
    s["arctan"]["c_minus"] = arc_d(&ArctanData::c_minus);
    s["arctan"]["d_minus"] = arc_d(&ArctanData::d_minus);
    s["arctan"]["e_minus"] = arc_d(&ArctanData::e_minus);
    s["arctan"]["j_star"] = {[](RunConfig& c, const std::string& v) { c.arctan.j_star = to_long("j_star", v); },
                             [](const RunConfig& c) { return std::to_string(c.arctan.j_star); }};
    s["fluct"]["d_window"] = dbl(&RunConfig::d_window);
    s["fluct"]["max_times"] = lng(&RunConfig::max_times);
    s["fluct"]["quad_rel_tol"] = dbl(&RunConfig::quad_rel_tol);
    s["sweep"]["n"] = {[](RunConfig& c, const std::string& v) {
                         c.sweep_n.clear();
                         std::istringstream is(v);
                         std::string item;
                         while (std::getline(is, item, ',')) c.sweep_n.push_back(to_long("sweep.n", trim(item)));
                         if (c.sweep_n.empty()) throw ConfigError("sweep.n must list at least one N");
                       },
                       [](const RunConfig& c) {
                         std::string out;
                         for (std::size_t i = 0; i < c.sweep_n.size(); ++i)
                           out += (i ? "," : "") + std::to_string(c.sweep_n[i]);
                         return out;
                       }};
    s["stefan"]["cells"] = lng(&RunConfig::stefan_cells);
    s["stefan"]["cfl"] = dbl(&RunConfig::stefan_cfl);
    s["toy"]["kappa"] = dbl(&RunConfig::toy_kappa);
    s["toy"]["f_const"] = dbl(&RunConfig::toy_f_const);
    s["toy"]["t_fin"] = dbl(&RunConfig::toy_t_fin);
    s["toy"]["dt"] = dbl(&RunConfig::toy_dt);
    s["toy"]["window"] = lng(&RunConfig::toy_window);
    s["toy"]["stride"] = lng(&RunConfig::toy_stride);
    return s;
  }();
  return s;
}

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(to_double(what, trim(item)));
  return out;
}

}  // namespace

void set_option(RunConfig& cfg, const std::string& section, const std::string& key,
                const std::string& value) {
  const auto& s = schema();
  const auto sec = s.find(section);
  if (sec == s.end()) throw ConfigError("unknown section [" + section + "]");
  const auto f = sec->second.find(key);
  if (f == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  try {
    f->second.set(cfg, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree pt;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, v] : body) set_option(cfg, section, key, v.data());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) { return parse_config(read_text(file)); }

std::string RunConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [section, fields] : schema()) {
    os << "[" << section << "]\n";
    for (const auto& [key, f] : fields) os << key << "=" << f.get(*this) << "\n";
  }
  return os.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::uint64_t RunConfig::data_hash() const {
  if (init == "arctan") {
    std::ostringstream os;
    os << std::setprecision(17) << "arctan;" << kappa << ";" << arctan.c_plus << "," << arctan.d_plus << ","
       << arctan.e_plus << "," << arctan.c_minus << "," << arctan.d_minus << "," << arctan.e_minus << ","
       << arctan.j_star;
    return fnv1a(os.str());
  }
  return fnv1a(describe(profile(), kappa));
}

MacroProfile RunConfig::profile() const {
  MacroProfile p = splx::scenario(this->scenario).profile;
  if (!std::isnan(xi_ini)) p.xi_ini = xi_ini;
  if (!std::isnan(slope_left)) p.slope_left = slope_left;
  if (!std::isnan(slope_right)) p.slope_right = slope_right;
  auto triples = [](const std::string& text, const std::string& what) {
    std::vector<std::vector<double>> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ';')) {
      if (trim(item).empty()) continue;
      auto v = split_numbers(item, ':', what);
      if (v.size() != 3) throw ConfigError(what + " entries must be amplitude:center:width");
      out.push_back(v);
    }
    return out;
  };
  if (!bumps.empty()) {
    p.bumps.clear();
    for (const auto& v : triples(bumps, "bumps")) p.bumps.push_back({v[0], v[1], v[2]});
  }
  if (!ramps.empty()) {
    p.ramps.clear();
    for (const auto& v : triples(ramps, "ramps")) p.ramps.push_back({v[0], v[1], v[2]});
  }
  if (!std::isnan(trace)) set_trace(p, trace);
  return p;
}

double RunConfig::effective_tau_fin() const {
  return tau_fin > 0.0 ? tau_fin : splx::scenario(this->scenario).tau_fin;
}

LatticeConfig RunConfig::lattice() const {
  LatticeConfig c;
  c.n_particles = n;
  c.kappa = kappa;
  c.dt = dt;
  c.bc = bc == "padded" ? BoundaryMode::padded : BoundaryMode::neumann;
  c.pad = pad;
  c.tau_fin = effective_tau_fin();
  c.snapshot_stride = snapshot_stride;
  validate(c);
  return c;
}

InitialDataSpec RunConfig::initial_data() const {
  InitialDataSpec s;
  if (init == "arctan") {
    s.variant = InitVariant::arctan;
    s.arctan = arctan;
  } else {
    s.variant = InitVariant::macroscopic;
    s.macro = profile();
  }
  return s;
}

StefanGrid RunConfig::stefan_grid() const {
  StefanGrid g;
  g.cells = stefan_cells;
  g.cfl = stefan_cfl;
  return g;
}

long RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("SPLX_WORKERS")) {
    try {
      const long w = std::stol(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
      throw ConfigError("SPLX_WORKERS must be a positive integer");
    }
    throw ConfigError("SPLX_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace splx
