#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splx/config.hpp"
#include "splx/errors.hpp"
#include "splx/fluctuations.hpp"
#include "splx/interface.hpp"
#include "splx/io.hpp"
#include "splx/macro.hpp"
#include "splx/pipeline.hpp"
#include "splx/scenarios.hpp"
#include "splx/spinodal.hpp"
#include "splx/stefan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace splx;

namespace {

struct Common {
  std::string config_file;
  std::string out;
  std::vector<std::string> sets;
  long workers = 0;
  // lattice flags
  long n = 0;
  double kappa = 0.0, tau_fin = 0.0, dt = -1.0;
  std::string bc, init;
  // toy flags
  double f_const = std::nan(""), toy_t_fin = 0.0, toy_dt = -1.0;
  long window = 0;
  std::string n_list;
};

RunConfig build_config(const Common& c, bool toy = false) {
  RunConfig cfg = c.config_file.empty() ? RunConfig{} : load_config(c.config_file);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    const auto dot = s.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + s + "'");
    set_option(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
  }
  if (!c.out.empty()) cfg.out = c.out;
  if (c.workers > 0) cfg.workers = c.workers;
  if (toy) {
    if (c.kappa > 0.0) cfg.toy_kappa = c.kappa;
  } else if (c.kappa > 0.0) {
    cfg.kappa = c.kappa;
  }
  if (c.n > 0) cfg.n = c.n;
  if (c.tau_fin > 0.0) cfg.tau_fin = c.tau_fin;
  if (c.dt >= 0.0) cfg.dt = c.dt;
  if (!c.bc.empty()) set_option(cfg, "lattice", "bc", c.bc);
  if (!c.init.empty()) {
    if (c.init == "arctan" || c.init == "macroscopic")
      cfg.init = c.init;
    else
      set_option(cfg, "run", "scenario", c.init);
  }
  if (!std::isnan(c.f_const)) cfg.toy_f_const = c.f_const;
  if (c.toy_t_fin > 0.0) cfg.toy_t_fin = c.toy_t_fin;
  if (c.toy_dt >= 0.0) cfg.toy_dt = c.toy_dt;
  if (c.window > 0) cfg.toy_window = c.window;
  if (!c.n_list.empty()) set_option(cfg, "sweep", "n", c.n_list);
  return cfg;
}

Stamp stamp_of(const RunConfig& cfg) {
  Stamp s;
  s.config_hash = hex64(cfg.hash());
  return s;
}

std::string csv_header(const Stamp& s) {
  return "# suite_version=" + s.suite_version + " config_hash=" + s.config_hash + "\n";
}

void write_config_copy(const fs::path& out, const RunConfig& cfg) {
  write_text(out / "run.cfg", cfg.canonical());
}

void add_manifest(const fs::path& out, const Stamp& stamp, const std::string& file,
                  const std::vector<std::string>& columns, const std::string& description) {
  const auto path = out / "reports" / "manifest.json";
  json m;
  if (fs::exists(path)) m = json::parse(read_text(path));
  m["suite_version"] = stamp.suite_version;
  m["config_hash"] = stamp.config_hash;
  m["files"][file] = {{"columns", columns}, {"description", description}};
  write_text(path, m.dump(2));
}

int cmd_simulate(const RunConfig& cfg) {
  const auto stamp = stamp_of(cfg);
  const fs::path out = cfg.out;
  const auto run = simulate(cfg.lattice(), cfg.initial_data());
  save_run(out, run, stamp, cfg.data_hash());
  write_config_copy(out, cfg);
  add_manifest(out, stamp, "snapshots/snapshots.bin", {"t", "u[lo..hi]"},
               "per record: SPLX, u32 version, u32 sites, f64 t, f64 values");
  std::cout << "simulate: N=" << run.trajectory.n_particles << " transitions=" << run.log.K_eps
            << " snapshots=" << run.trajectory.snapshots.size() << " -> " << out.string() << "\n";
  return 0;
}

int cmd_toy(const RunConfig& cfg) {
  const auto stamp = stamp_of(cfg);
  const fs::path out = cfg.out;
  std::vector<double> z0(static_cast<std::size_t>(2 * cfg.toy_window + 1), 0.0);
  ToyOptions o;
  o.dt = cfg.toy_dt;
  o.stride = cfg.toy_stride;
  const double f = cfg.toy_f_const;
  const auto tr = simulate_toy(z0, cfg.toy_kappa, [f](double) { return f; }, cfg.toy_t_fin, o);
  const auto b = slow_bound_check(tr);
  std::ostringstream csv;
  csv.precision(12);
  csv << csv_header(stamp) << "t,z0,zeta1,slow_l1,ratio,running_max\n";
  for (std::size_t n = 0; n < tr.z.size(); ++n) {
    const auto s = split_slow_fast(tr.z[n], tr.kappa);
    double slow = 0.0;
    for (double x : s.z_slow) slow += std::abs(x);
    csv << tr.times[n] << "," << tr.at(n, 0) << "," << s.zeta[0] << "," << slow << "," << b.ratio[n] << ","
        << b.running_max[n] << "\n";
  }
  write_text(out / "reports" / "toy.csv", csv.str());
  add_manifest(out, stamp, "reports/toy.csv", {"t", "z0", "zeta1", "slow_l1", "ratio", "running_max"},
               "prototypical spinodal problem with constant forcing");
  json j = {{"suite_version", stamp.suite_version}, {"config_hash", stamp.config_hash},
            {"overflow", tr.overflow},             {"max_ratio", b.max_ratio},
            {"late_growth", b.late_growth},        {"fast_growth", b.fast_growth}};
  write_text(out / "reports" / "toy.json", j.dump(2));
  std::cout << "toy: max slow ratio " << b.max_ratio << ", z growth " << b.fast_growth << "\n";
  return 0;
}

int cmd_fluct(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  const auto run = load_run(out);
  const Stamp stamp = run.stamp;
  FluctuationOptions fo;
  fo.d_window = cfg.d_window;
  fo.max_times = cfg.max_times;
  fo.quad_rel_tol = cfg.quad_rel_tol;
  fo.seed = cfg.seed;
  FluctuationEngine eng(run.trajectory, run.log, fo);
  const auto sums = eng.summaries();
  const auto sp = eng.superposition_check();
  const auto rr = eng.regularity_report();
  json j;
  j["suite_version"] = stamp.suite_version;
  j["config_hash"] = stamp.config_hash;
  j["d_window"] = eng.d_window();
  j["superposition_max"] = sp.max_residual;
  j["regularity"] = {{"sum_d_sqrt_eps", rr.sum_d_sqrt_eps},
                     {"neg_l1_sqrt_eps", rr.neg_l1_sqrt_eps},
                     {"reg_grad_l2_over_eps", rr.reg_grad_l2_over_eps},
                     {"holder_quotient", rr.holder_quotient},
                     {"res_l1", rr.res_l1},
                     {"sup_reg", rr.sup_reg},
                     {"sup_neg", rr.sup_neg},
                     {"sup_res", rr.sup_res}};
  j["transitions"] = json::parse(summaries_to_json(sums, run.trajectory.epsilon));
  write_text(out / "reports" / "fluctuations.json", j.dump(2));
  auto log = run.log;
  fill_forcing_integrals(eng, log);
  write_text(out / "logs" / "transitions.json", log_to_json(log, stamp));
  // aggregated fields at the analysis times in the binary column format
  std::vector<BinaryRecord> reg, neg, res;
  for (std::size_t n : eng.analysis_snapshots()) {
    const auto a = eng.aggregates(n);
    reg.push_back({a.t, a.R_reg});
    neg.push_back({a.t, a.R_neg});
    res.push_back({a.t, a.R_res});
  }
  write_records_bin(out / "reports" / "R_reg.bin", reg);
  write_records_bin(out / "reports" / "R_neg.bin", neg);
  write_records_bin(out / "reports" / "R_res.bin", res);
  std::cout << "fluct: " << sums.size() << " transitions, superposition residual " << sp.max_residual << "\n";
  return 0;
}

fs::path sweep_dir(const fs::path& out, long n) { return out / "sweep" / ("N" + std::to_string(n)); }

int cmd_sweep(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  const auto stamp = stamp_of(cfg);
  const auto runs = run_sweep(cfg, cfg.effective_workers());
  std::vector<WaitingSample> samples;
  const auto params = derive_params(cfg.kappa);
  json j;
  j["suite_version"] = stamp.suite_version;
  j["config_hash"] = stamp.config_hash;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    save_run(sweep_dir(out, cfg.sweep_n[i]), runs[i], stamp, cfg.data_hash());
    samples.push_back({runs[i].trajectory.epsilon, runs[i].certificates.beta, params.p_star, runs[i].log});
    FluctuationEngine eng(runs[i].trajectory, runs[i].log);
    const auto rr = eng.regularity_report();
    j["runs"].push_back({{"N", cfg.sweep_n[i]},
                         {"transitions", runs[i].log.K_eps},
                         {"min_waiting", runs[i].log.min_waiting},
                         {"sum_d_sqrt_eps", rr.sum_d_sqrt_eps},
                         {"neg_l1_sqrt_eps", rr.neg_l1_sqrt_eps},
                         {"reg_grad_l2_over_eps", rr.reg_grad_l2_over_eps},
                         {"holder_quotient", rr.holder_quotient},
                         {"res_l1", rr.res_l1}});
  }
  const auto w = waiting_scaling_report(samples);
  j["waiting_slope"] = w.slope;
  j["c_emp"] = w.c_emp;
  j["warnings"] = w.warnings;
  write_text(out / "reports" / "sweep.json", j.dump(2));
  write_config_copy(out, cfg);
  std::cout << "sweep: " << runs.size() << " runs, waiting-time slope " << w.slope << "\n";
  return 0;
}

StefanSolution solve_reference(const RunConfig& cfg) {
  if (cfg.init != "macroscopic") throw ConfigError("the reference solver needs macroscopic data");
  const auto p = cfg.profile();
  return solve_stefan([&p](double x) { return p(x); }, p.xi_ini, cfg.kappa, cfg.effective_tau_fin(),
                      cfg.stefan_grid());
}

int cmd_stefan(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  const auto stamp = stamp_of(cfg);
  const auto st = solve_reference(cfg);
  std::ostringstream curve;
  curve.precision(12);
  curve << csv_header(stamp) << "tau,Xi,regime\n";
  for (std::size_t i = 0; i < st.curve_tau.size(); ++i)
    curve << st.curve_tau[i] << "," << st.curve_Xi[i] << ","
          << (st.curve_regime[i] == Regime::moving ? "moving" : "pinned") << "\n";
  write_text(out / "reports" / "stefan_curve.csv", curve.str());
  std::ostringstream field;
  field.precision(12);
  field << csv_header(stamp) << "xi,P_final\n";
  for (std::size_t i = 0; i < st.xi.size(); ++i) field << st.xi[i] << "," << st.P.back()[i] << "\n";
  write_text(out / "reports" / "stefan_field.csv", field.str());
  add_manifest(out, stamp, "reports/stefan_curve.csv", {"tau", "Xi", "regime"}, "reference interface");
  add_manifest(out, stamp, "reports/stefan_field.csv", {"xi", "P_final"}, "reference field at tau_fin");
  json j = {{"suite_version", stamp.suite_version}, {"config_hash", stamp.config_hash},
            {"data_hash", hex64(cfg.data_hash())},  {"Xi_final", st.Xi.back()},
            {"truncated", st.truncated},            {"h", st.h},
            {"dtau", st.dtau}};
  write_text(out / "reports" / "stefan.json", j.dump(2));
  std::cout << "stefan: Xi(tau_fin) = " << st.Xi.back() << "\n";
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  const auto stamp = stamp_of(cfg);
  const auto st = solve_reference(cfg);
  std::vector<std::unique_ptr<LoadedRun>> runs;
  std::vector<std::unique_ptr<FluctuationEngine>> engines;
  std::vector<std::unique_ptr<MacroFields>> fields;
  std::vector<CompareInput> in;
  for (long n : cfg.sweep_n) {
    runs.push_back(std::make_unique<LoadedRun>(load_run(sweep_dir(out, n))));
    auto& r = *runs.back();
    engines.push_back(std::make_unique<FluctuationEngine>(r.trajectory, r.log));
    fields.push_back(std::make_unique<MacroFields>(rescale(r.trajectory, r.log, engines.back().get())));
    in.push_back({&r.trajectory, &r.log, fields.back().get(), r.data_hash});
  }
  const auto rep = compare(in, st, cfg.data_hash());
  auto j = json::parse(rep.to_json());
  j["suite_version"] = stamp.suite_version;
  j["config_hash"] = stamp.config_hash;
  write_text(out / "reports" / "convergence.json", j.dump(2));
  write_text(out / "reports" / "interface_curves.csv", csv_header(stamp) + rep.curves_csv);
  add_manifest(out, stamp, "reports/interface_curves.csv", {"run", "N", "tau", "Xi_stefan", "Xi_star"},
               "lattice and reference interface curves");
  std::cout << "compare: interface errors";
  for (const auto& e : rep.entries) std::cout << " " << e.interface_error;
  std::cout << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  const auto stamp = stamp_of(cfg);
  const auto rep = verify_run(cfg);
  write_text(out / "reports" / "verify.json", rep.to_json(stamp));
  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splx: forward-backward lattice diffusion and its hysteretic limit"};
  app.require_subcommand(1);
  Common c;
  auto common = [&c](CLI::App* s) {
    s->add_option("--config", c.config_file, "run.cfg file")->check(CLI::ExistingFile);
    s->add_option("--out", c.out, "output directory");
    s->add_option("--set", c.sets, "section.key=value override");
    s->add_option("--workers", c.workers, "worker threads");
  };
  auto lattice = [&c](CLI::App* s) {
    s->add_option("--n", c.n, "particles");
    s->add_option("--kappa", c.kappa, "spinodal slope");
    s->add_option("--tau-fin", c.tau_fin, "macroscopic final time");
    s->add_option("--dt", c.dt, "time step (0: stability bound)");
    s->add_option("--bc", c.bc, "neumann | padded");
    s->add_option("--init", c.init, "scenario name, macroscopic or arctan");
  };
  auto* sim = app.add_subcommand("simulate", "one lattice run with logs");
  common(sim);
  lattice(sim);
  auto* toy = app.add_subcommand("toy", "prototypical spinodal problem");
  common(toy);
  toy->add_option("--kappa", c.kappa, "spinodal slope");
  toy->add_option("--f-const", c.f_const, "constant forcing");
  toy->add_option("--t-fin", c.toy_t_fin, "final time");
  toy->add_option("--dt", c.toy_dt, "time step (0: stability bound)");
  toy->add_option("--window", c.window, "half window in sites");
  auto* fl = app.add_subcommand("fluct", "fluctuation decomposition of a stored run");
  common(fl);
  auto* sw = app.add_subcommand("sweep", "family of runs over N");
  common(sw);
  lattice(sw);
  sw->add_option("--n-list", c.n_list, "comma separated N values");
  auto* ste = app.add_subcommand("stefan", "reference free boundary solve");
  common(ste);
  lattice(ste);
  auto* cmp = app.add_subcommand("compare", "convergence report of a stored sweep");
  common(cmp);
  lattice(cmp);
  cmp->add_option("--n-list", c.n_list, "comma separated N values");
  auto* ver = app.add_subcommand("verify", "invariant suite on one run");
  common(ver);
  lattice(ver);

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(build_config(c));
    if (toy->parsed()) return cmd_toy(build_config(c, true));
    if (fl->parsed()) return cmd_fluct(build_config(c));
    if (sw->parsed()) return cmd_sweep(build_config(c));
    if (ste->parsed()) return cmd_stefan(build_config(c));
    if (cmp->parsed()) return cmd_compare(build_config(c));
    if (ver->parsed()) return cmd_verify(build_config(c));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
