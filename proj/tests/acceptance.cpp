// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "splx/config.hpp"
#include "splx/entropy.hpp"
#include "splx/fluctuations.hpp"
#include "splx/interface.hpp"
#include "splx/kernel.hpp"
#include "splx/lattice.hpp"
#include "splx/macro.hpp"
#include "splx/pipeline.hpp"
#include "splx/potential.hpp"
#include "splx/scenarios.hpp"
#include "splx/spinodal.hpp"
#include "splx/stefan.hpp"

using namespace splx;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %2d %-28s %s [%.1fs]\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class F>
void criterion(int id, const char* name, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, name, ok, detail, s);
}

long workers() {
  RunConfig c;
  return c.effective_workers();
}

RunConfig base(const std::string& scen, long n) {
  RunConfig c;
  c.scenario = scen;
  c.n = n;
  return c;
}

// dg/dt = Delta g by classical RK4 on |j| <= 60
std::vector<double> rk4_kernel(double t_end, double dt) {
  const int w = 60, m = 2 * w + 1;
  std::vector<double> g(m, 0.0), k1(m), k2(m), k3(m), k4(m), tmp(m);
  g[w] = 1.0;
  auto lap = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < m; ++i)
      out[i] = (i > 0 ? v[i - 1] : 0.0) + (i < m - 1 ? v[i + 1] : 0.0) - 2.0 * v[i];
  };
  const long steps = std::lround(t_end / dt);
  for (long s = 0; s < steps; ++s) {
    lap(g, k1);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + 0.5 * dt * k1[i];
    lap(tmp, k2);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + 0.5 * dt * k2[i];
    lap(tmp, k3);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + dt * k3[i];
    lap(tmp, k4);
    for (int i = 0; i < m; ++i) g[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return g;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo <= 0.0) return *hi <= 0.0 ? 1.0 : kNever;
  return *hi / *lo;
}

}  // namespace

int main() {
  criterion(1, "parameter formulas", [](std::string& d) {
    bool ok = true;
    double worst = 0.0;
    for (double k : {0.5, 1.0, 2.0, 10.0}) {
      const auto p = derive_params(k);
      worst = std::max({worst, std::abs(p.u_star - 1.0 / (1.0 + k)), std::abs(p.p_star - k / (1.0 + k)),
                        std::abs(p.u_star_star - (1.0 + 2.0 * k) / (1.0 + k))});
      ok = ok && phi_prime(-p.u_star, p) == p.p_star && phi_prime(p.u_star, p) == -p.p_star;
      // both branches meet at the thresholds
      ok = ok && std::abs((-p.u_star + 1.0) - p.p_star) <= 1e-15 && std::abs((p.u_star - 1.0) + p.p_star) <= 1e-15;
      for (double u = -3.0; u <= 3.0; u += 1e-3) ok = ok && std::abs(phi_prime(u, p)) <= std::max(p.p_star, std::abs(u) - 1.0) + 1e-15;
    }
    ok = ok && worst <= 4e-16;
    d = fmt("max formula error %.1e", worst);
    return ok;
  });

  criterion(2, "heat kernel oracle", [](std::string& d) {
    double err = 0.0, mass = 0.0;
    for (double t : {0.1, 1.0, 10.0}) {
      const auto g = rk4_kernel(t, 1e-4);
      for (int j = -20; j <= 20; ++j) err = std::max(err, std::abs(heat_kernel(j, t) - g[60 + j]));
      const auto k = kernel_eval(t, 1e-12);
      double s = 0.0;
      for (double v : k.values) s += v;
      mass = std::max(mass, std::abs(s + k.tail_bound - 1.0));
    }
    d = fmt("max |g - rk4| %.1e", err) + fmt(", mass error %.1e", mass);
    return err < 1e-8 && mass < 1e-10;
  });

  criterion(3, "impact profile mass", [](std::string& d) {
    double worst = 0.0;
    for (double k : {0.1, 1.0, 10.0, 1e3}) worst = std::max(worst, std::abs(impact_profile(k).mass() - 2.0));
    const auto big = impact_profile(1e3);
    const double ps = derive_params(1e3).p_star;
    double dev = std::abs(big.at(0) - 2.0 * ps);
    for (long j = 1; j <= big.radius; ++j) dev += 2.0 * std::abs(big.at(j));
    d = fmt("mass error %.1e", worst) + fmt(", l1 distance to 2p* delta %.1e", dev);
    return worst < 1e-12 && dev < 1e-2;
  });

  criterion(4, "slow-fast representation", [](std::string& d) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double rep = 0.0;
    long mism = 0;
    for (double k : {0.5, 1.0, 2.0}) {
      for (int r = 0; r < 100; ++r) {
        std::vector<double> z(61);
        for (int j = 0; j <= 30; ++j) z[30 + j] = z[30 - j] = u(rng);
        rep = std::max(rep, representation_residual(z, k));
        mism += split_slow_fast(z, k).bitwise_mismatches;
      }
    }
    std::vector<double> z0(161, 0.0);
    for (long j = -80; j <= 80; ++j) z0[j + 80] = 0.1 * std::exp(-0.05 * j * j);
    auto f = [](double t) { return 0.02 * std::cos(t); };
    std::vector<double> res;
    for (double dt : {0.02, 0.01, 0.005}) {
      ToyOptions o;
      o.dt = dt;
      const auto r = slow_dynamics_residual(simulate_toy(z0, 1.0, f, 2.0, o));
      res.push_back(std::max({r.z0, r.zeta1, r.zeta_n}));
    }
    bool halves = true;
    for (std::size_t i = 1; i < res.size(); ++i) halves = halves && std::abs(res[i] / res[i - 1] - 0.5) <= 0.1;
    d = fmt("representation %.1e", rep) + fmt(", identity ratios %.3f", res[1] / res[0]) +
        fmt(" %.3f", res[2] / res[1]);
    return rep < 1e-12 && mism == 0 && halves;
  });

  criterion(5, "superposition identity", [](std::string& d) {
    std::vector<double> res(2);
    const double dts[2] = {0.004, 0.002};
    parallel_for(2, workers(), [&](std::size_t i) {
      auto c = base("hot_left", 200);
      c.dt = dts[i];
      const auto run = simulate(c.lattice(), c.initial_data());
      FluctuationEngine eng(run.trajectory, run.log);
      res[i] = eng.superposition_check().max_residual;
    });
    const double reduction = 1.0 - res[1] / res[0];
    d = fmt("residual %.2e", res[0]) + fmt(" -> %.2e", res[1]) + fmt(", reduction %.0f%%", 100 * reduction);
    return res[0] < 1e-3 && res[1] < 1e-3 && reduction >= 0.4;
  });

  // shared N=200 run for criteria 6 and 7
  const auto c200 = base("hot_left", 200);
  const auto lc = c200.lattice();
  const auto spec = c200.initial_data();
  const auto params = derive_params(c200.kappa);
  std::vector<EntropyMonitor::Test> tests;
  {
    std::mt19937_64 rng(7);
    const std::size_t m = static_cast<std::size_t>(lc.hi() - lc.lo() + 1);
    const double centre = spec.macro.xi_ini * lc.n_particles;
    const std::vector<std::vector<double>> psis = {gaussian_weight(lc.lo(), m, centre, 10.0),
                                                   gaussian_weight(lc.lo(), m, centre + 20.0, 25.0),
                                                   hat_weight(lc.lo(), m, centre - 20.0, 30.0)};
    for (int i = 0; i < 5; ++i) {
      auto pair = std::make_shared<EntropyPair>(make_pair(random_monotone_mu(rng), params));
      for (std::size_t k = 0; k < psis.size(); ++k)
        tests.push_back({"mu" + std::to_string(i) + "psi" + std::to_string(k), pair, psis[k]});
    }
  }
  EntropyMonitor monitor(lc, tests);
  std::unique_ptr<SimulationResult> run200;
  try {
    run200 = std::make_unique<SimulationResult>(simulate(lc, spec, {monitor.observer()}));
  } catch (const std::exception& e) {
    std::printf("N=200 run failed: %s\n", e.what());
  }

  criterion(6, "structural invariants", [&](std::string& d) {
    if (!run200) return false;
    const auto s = verify_structure(*run200);
    d = std::to_string(s.snapshots) + " snapshots, " + std::to_string(run200->log.K_eps) + " transitions, " +
        std::to_string(s.total()) + " violations";
    return s.total() == 0 && s.snapshots > 0;
  });

  criterion(7, "entropy suite", [&](std::string& d) {
    if (!run200) return false;
    const auto r = monitor.report(run200->log);
    double worst = -kNever, diss = kNever;
    for (const auto& p : r.pairs) {
      worst = std::max(worst, p.max_residual);
      diss = std::min(diss, p.min_dissipation);
    }
    bool peaks = !r.peaks.empty();
    double pmin = kNever, pmax = 0.0;
    for (const auto& p : r.peaks) {
      peaks = peaks && p.in_range;
      pmin = std::min(pmin, p.peak);
      pmax = std::max(pmax, p.peak);
    }
    d = std::to_string(r.pairs.size()) + " pairs" + fmt(", max residual %.1e", worst) +
        fmt(", min pairing %.1e", diss) + fmt(", |dE/dt+eps^2 D| %.1e", r.energy_law_max) +
        fmt(" (dt %.3g)", r.dt) + fmt(", peaks %.0f", pmin) + fmt("..%.0f", pmax);
    return r.pairs.size() == 15 && worst <= 10.0 * r.dt && diss >= 0.0 && r.energy_law_max <= 0.1 * r.dt &&
           peaks;
  });
  run200.reset();

  // hot_left sweep for criteria 8 and 9
  auto sweep_cfg = base("hot_left", 200);
  sweep_cfg.sweep_n = {100, 200, 400};
  std::vector<SimulationResult> sweep;
  std::vector<RegularityReport> regs(3);
  try {
    sweep = run_sweep(sweep_cfg, workers());
    parallel_for(sweep.size(), workers(), [&](std::size_t i) {
      FluctuationEngine eng(sweep[i].trajectory, sweep[i].log);
      regs[i] = eng.regularity_report();
    });
  } catch (const std::exception& e) {
    std::printf("sweep failed: %s\n", e.what());
  }

  criterion(8, "waiting-time scaling", [&](std::string& d) {
    if (sweep.size() != 3) return false;
    std::vector<WaitingSample> s;
    for (const auto& r : sweep) s.push_back({r.trajectory.epsilon, r.certificates.beta, params.p_star, r.log});
    const auto w = waiting_scaling_report(s);
    bool bound = true;
    long applicable = 0;
    for (const auto& e : w.entries) {
      bound = bound && e.k_bound_holds;
      applicable += e.applicable;
    }
    d = fmt("slope %.3f", w.slope) + fmt(", c_emp %.3g", w.c_emp) + ", K bound " + (bound ? "holds" : "violated");
    return applicable == 3 && w.slope >= -1.3 && w.slope <= -0.7 && bound && w.all_above_bound;
  });

  criterion(9, "fluctuation constants", [&](std::string& d) {
    if (sweep.size() != 3) return false;
    std::vector<double> dsum, neg, grad, hold, res;
    for (const auto& r : regs) {
      dsum.push_back(r.sum_d_sqrt_eps);
      neg.push_back(r.neg_l1_sqrt_eps);
      grad.push_back(r.reg_grad_l2_over_eps);
      hold.push_back(r.holder_quotient);
      res.push_back(r.res_l1);
    }
    const double sd = spread(dsum), sn = spread(neg), sg = spread(grad), sh = spread(hold), sr = spread(res);
    const double rmax = *std::max_element(res.begin(), res.end());
    d = fmt("spreads D %.2f", sd) + fmt(" neg %.2f", sn) + fmt(" grad %.2f", sg) + fmt(" holder %.2f", sh) +
        fmt(" res %.2f", sr) + fmt(", sup res %.9f", rmax);
    return sd < 3 && sn < 3 && sg < 3 && sh < 3 && sr < 3 && rmax <= 2.0 + 1e-6;
  });
  sweep.clear();

  criterion(10, "macroscopic convergence", [&](std::string& d) {
    auto cfg = base("front_pinning", 800);
    cfg.sweep_n = {100, 200, 400, 800};
    const auto runs = run_sweep(cfg, workers());
    const auto prof = cfg.profile();
    const double tau_fin = cfg.effective_tau_fin();
    const auto st = solve_stefan([&prof](double x) { return prof(x); }, prof.xi_ini, cfg.kappa, tau_fin,
                                 cfg.stefan_grid());
    std::vector<std::unique_ptr<FluctuationEngine>> engines(runs.size());
    std::vector<std::unique_ptr<MacroFields>> fields(runs.size());
    parallel_for(runs.size(), workers(), [&](std::size_t i) {
      engines[i] = std::make_unique<FluctuationEngine>(runs[i].trajectory, runs[i].log);
      fields[i] = std::make_unique<MacroFields>(rescale(runs[i].trajectory, runs[i].log, engines[i].get()));
    });
    std::vector<CompareInput> in;
    for (std::size_t i = 0; i < runs.size(); ++i)
      in.push_back({&runs[i].trajectory, &runs[i].log, fields[i].get(), cfg.data_hash()});
    const auto rep = compare(in, st, cfg.data_hash());
    const auto& fin = rep.entries.back();
    bool gamma = true;
    for (const auto& e : rep.entries) gamma = gamma && e.gamma_bound;
    const auto reg = detect_regimes(runs.back().log, tau_fin);
    const auto fr = flow_rule_report(*fields.back(), reg);
    const double margin = 0.005;
    d = fmt("interface %.4f", rep.entries[0].interface_error) + fmt("->%.4f", fin.interface_error) +
        fmt(", field %.4f", rep.entries[0].field_error) + fmt("->%.4f", fin.field_error) +
        fmt(", moving trace dev %.3f", fr.moving_dev_reg) + fmt(" (raw %.3f)", fr.moving_dev_raw) +
        fmt(", pinned trace max %.4f", fr.pinned_max_reg) + ", gamma " + (gamma ? "ok" : "violated");
    return rep.interface_monotone && rep.field_monotone && fin.interface_error < 0.02 && fin.field_error < 0.05 &&
           fr.moving_samples > 0 && fr.moving_dev_reg < 0.05 && fr.pinned_samples > 0 && fr.pinned_constant &&
           fr.pinned_max_reg < params.p_star - margin && gamma;
  });

  criterion(11, "pinning and depinning", [&](std::string& d) {
    std::vector<RegimeSummary> r(2);
    const char* names[2] = {"front_pinning", "front_depinning"};
    parallel_for(2, workers(), [&](std::size_t i) {
      const auto c = base(names[i], 500);
      const auto run = simulate(c.lattice(), c.initial_data());
      r[i] = detect_regimes(run.log, c.effective_tau_fin());
    });
    d = fmt("pinned from tau %.3f", r[0].pin_time) + fmt(", depinned at tau %.3f", r[1].depin_time);
    return r[0].advance_then_pin && r[1].depinning;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
