#include "splx/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "splx/entropy.hpp"
#include "splx/errors.hpp"
#include "splx/kernel.hpp"

namespace splx {

using nlohmann::json;

void save_run(const std::filesystem::path& dir, const SimulationResult& run, const Stamp& stamp,
              std::uint64_t data_hash) {
  write_snapshots_jsonl(dir / "snapshots" / "snapshots.jsonl", run.trajectory, stamp);
  write_snapshots_bin(dir / "snapshots" / "snapshots.bin", run.trajectory);
  write_text(dir / "logs" / "transitions.json", log_to_json(run.log, stamp));
  write_text(dir / "logs" / "events.jsonl", events_to_jsonl(run.events));
  json s = {{"suite_version", stamp.suite_version},
            {"config_hash", stamp.config_hash},
            {"data_hash", hex64(data_hash)},
            {"n_particles", run.trajectory.n_particles},
            {"epsilon", run.trajectory.epsilon},
            {"dt", run.trajectory.dt},
            {"steps", run.steps},
            {"snapshots", run.trajectory.snapshots.size()},
            {"transitions", run.log.K_eps},
            {"mass_drift", run.mass_drift},
            {"certificates",
             {{"alpha", run.certificates.alpha},
              {"beta", run.certificates.beta},
              {"b", run.certificates.b},
              {"k0", run.certificates.k0}}}};
  write_text(dir / "reports" / "run.json", s.dump(2));
}

LoadedRun load_run(const std::filesystem::path& dir) {
  const auto snap = dir / "snapshots" / "snapshots.jsonl";
  const auto logf = dir / "logs" / "transitions.json";
  if (!std::filesystem::exists(snap)) throw IoError("missing trajectory " + snap.string());
  if (!std::filesystem::exists(logf)) throw IoError("missing transition log " + logf.string());
  LoadedRun r;
  r.trajectory = read_snapshots_jsonl(snap, &r.stamp);
  r.log = log_from_json(read_text(logf));
  const auto runf = dir / "reports" / "run.json";
  if (std::filesystem::exists(runf)) {
    const auto j = json::parse(read_text(runf));
    r.data_hash = std::stoull(j.at("data_hash").get<std::string>(), nullptr, 16);
  }
  return r;
}

void parallel_for(std::size_t count, long workers, const std::function<void(std::size_t)>& task) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1L, workers))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < w; ++i) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SimulationResult> run_sweep(const RunConfig& cfg, long workers) {
  std::vector<SimulationResult> out(cfg.sweep_n.size());
  const auto spec = cfg.initial_data();
  parallel_for(cfg.sweep_n.size(), workers, [&](std::size_t i) {
    RunConfig c = cfg;
    c.n = cfg.sweep_n[i];
    out[i] = simulate(c.lattice(), spec);
  });
  return out;
}

bool VerifyReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

std::string VerifyReport::to_json(const Stamp& stamp) const {
  json j;
  j["suite_version"] = stamp.suite_version;
  j["config_hash"] = stamp.config_hash;
  j["passed"] = passed();
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j.dump(2);
}

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

}  // namespace

VerifyReport verify_run(const RunConfig& cfg) {
  VerifyReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const auto params = derive_params(cfg.kappa);
  add("potential continuity",
      phi_prime(-params.u_star, params) == params.p_star && phi_prime(params.u_star, params) == -params.p_star,
      "Phi' at -u*, +u*");
  {
    const auto rho = impact_profile(cfg.kappa);
    add("impact profile mass", std::abs(rho.mass() - 2.0) < 1e-12, sci(std::abs(rho.mass() - 2.0)));
  }
  {
    const auto k = kernel_eval(10.0, 1e-12);
    double s = 0.0;
    for (double v : k.values) s += v;
    add("kernel mass", std::abs(s + k.tail_bound - 1.0) < 1e-10, sci(std::abs(s - 1.0)));
  }

  const auto lc = cfg.lattice();
  const auto spec = cfg.initial_data();
  const std::size_t m = static_cast<std::size_t>(lc.hi() - lc.lo() + 1);
  std::mt19937_64 rng(cfg.seed);
  std::vector<EntropyMonitor::Test> tests;
  const double centre = spec.variant == InitVariant::macroscopic ? spec.macro.xi_ini * lc.n_particles
                                                                  : static_cast<double>(spec.arctan.j_star);
  const std::vector<std::vector<double>> psis = {
      gaussian_weight(lc.lo(), m, centre, std::max(3.0, 0.05 * lc.n_particles)),
      hat_weight(lc.lo(), m, centre - 0.1 * lc.n_particles, std::max(3.0, 0.15 * lc.n_particles))};
  for (int i = 0; i < 3; ++i) {
    auto pair = std::make_shared<EntropyPair>(make_pair(random_monotone_mu(rng), params));
    for (std::size_t k = 0; k < psis.size(); ++k)
      tests.push_back({"mu" + std::to_string(i) + "_psi" + std::to_string(k), pair, psis[k]});
  }
  EntropyMonitor mon(lc, tests);
  SimulationResult run;
  try {
    run = simulate(lc, spec, {mon.observer()});
  } catch (const InvariantViolation& e) {
    add("simulation", false, std::string(e.what()) + " at site " + std::to_string(e.site()));
    return rep;
  }
  add("simulation", true, std::to_string(run.steps) + " steps");
  add("mass conservation", run.mass_drift < 1e-9 * static_cast<double>(lc.n_particles), sci(run.mass_drift));
  const auto st = verify_structure(run);
  add("structural invariants", st.total() == 0, std::to_string(st.total()) + " violations");

  const auto er = mon.report(run.log);
  double worst = -kNever, min_diss = kNever;
  for (const auto& p : er.pairs) {
    worst = std::max(worst, p.max_residual);
    min_diss = std::min(min_diss, p.min_dissipation);
  }
  const double tol = 10.0 * er.dt;
  add("entropy balance", worst <= tol, "max residual " + sci(worst));
  add("dissipation pairing", min_diss >= 0.0, "min " + sci(min_diss));
  add("energy law", er.energy_law_max <= 0.1 * er.dt + 1e-12, "max " + sci(er.energy_law_max));
  add("energy monotone", er.energy_increase_max <= 1e-12, "max increase " + sci(er.energy_increase_max));

  FluctuationOptions fo;
  fo.d_window = cfg.d_window;
  fo.max_times = cfg.max_times;
  fo.quad_rel_tol = cfg.quad_rel_tol;
  FluctuationEngine eng(run.trajectory, run.log, fo);
  const auto sp = eng.superposition_check();
  add("superposition", sp.max_residual < 0.5 * lc.step_size() + 1e-10, "max " + sci(sp.max_residual));
  const auto rr = eng.regularity_report();
  add("residual mass", rr.res_l1 <= 2.0 + 1e-6, "sup " + sci(rr.res_l1));
  add("essential mass", rr.ess_mass_error < 1e-9, sci(rr.ess_mass_error));
  add("interface region", run.log.interface_region_measure() <= lc.eps() * lc.tau_fin,
      sci(run.log.interface_region_measure()));
  return rep;
}

}  // namespace splx
