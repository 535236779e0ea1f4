#include "splx/spinodal.hpp"

#include <algorithm>
#include <cmath>

#include "splx/errors.hpp"
#include "splx/kernel.hpp"

namespace splx {

ToyTrajectory simulate_toy(const std::vector<double>& z0, double kappa, const Forcing& f,
                           double t_fin, const ToyOptions& options) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (z0.size() % 2 == 0 || z0.size() < 3) throw DomainError("window must have odd length >= 3");
  if (!(t_fin >= 0.0)) throw DomainError("t_fin must be nonnegative");
  const long w = static_cast<long>(z0.size() / 2);
  const long need = truncation_radius(t_fin, options.boundary_tol);
  if (w < need) throw WindowTooSmall("toy window below kernel truncation radius", 2 * need + 1);
  const double dt_max = 0.4 / (4.0 * std::max(1.0, kappa));
  double dt = options.dt > 0.0 ? options.dt : dt_max;
  if (dt > dt_max * (1.0 + 1e-12)) throw ConfigError("dt above the stability bound");
  const long steps = t_fin > 0.0 ? static_cast<long>(std::ceil(t_fin / dt - 1e-9)) : 0;
  if (steps > 0) dt = t_fin / static_cast<double>(steps);
  const long stride = std::max(1L, options.stride);

  ToyTrajectory tr;
  tr.kappa = kappa;
  tr.window = w;
  tr.dt = dt;
  tr.stride = stride;
  std::vector<double> z = z0, dz(z.size());
  const std::size_t n = z.size(), c = static_cast<std::size_t>(w);
  double fl1 = 0.0;
  double f_prev = f ? f(0.0) : 0.0;
  auto store = [&](double t, double fv) {
    tr.times.push_back(t);
    tr.z.push_back(z);
    tr.forcing.push_back(fv);
    tr.forcing_l1.push_back(fl1);
  };
  store(0.0, f_prev);
  for (long s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s - 1) * dt;
    for (std::size_t j = 0; j < n; ++j) {
      const double l = j == 0 ? z[0] : z[j - 1];
      const double r = j + 1 == n ? z[n - 1] : z[j + 1];
      dz[j] = l + r - 2.0 * z[j];
    }
    const double fv = f ? f(t) : 0.0;
    for (std::size_t j = 0; j < n; ++j) z[j] += dt * dz[j];
    z[c] += dt * ((-kappa - 1.0) * dz[c] + (1.0 + kappa) * fv);
    const double t1 = static_cast<double>(s) * dt;
    const double f1 = f ? f(t1) : 0.0;
    fl1 += 0.5 * dt * (std::abs(fv) + std::abs(f1));
    if (!std::isfinite(z[c]) || std::abs(z[c]) > options.cap) {
      tr.overflow = true;
      tr.overflow_time = t1;
      break;
    }
    if (s % stride == 0 || s == steps) store(t1, f1);
  }
  return tr;
}

std::vector<double> even_part(const std::vector<double>& z) {
  const std::size_t w = z.size() / 2;
  std::vector<double> e(w + 1);
  for (std::size_t j = 0; j <= w; ++j) e[j] = 0.5 * (z[w + j] + z[w - j]);
  return e;
}

std::vector<double> slow_variables(const std::vector<double>& z, double kappa) {
  const auto e = even_part(z);
  const double a = (1.0 + 2.0 * kappa) / (2.0 * kappa), b = 1.0 / (2.0 * kappa);
  std::vector<double> zeta(e.size() - 1);
  for (std::size_t n = 1; n < e.size(); ++n) zeta[n - 1] = a * e[n] - b * e[n - 1];
  return zeta;
}

SlowFastSplit split_slow_fast(const std::vector<double>& z, double kappa) {
  const long w = static_cast<long>(z.size() / 2);
  const double z0 = z[static_cast<std::size_t>(w)];
  const double q = 1.0 + 2.0 * kappa;
  SlowFastSplit s;
  s.z_fast.resize(z.size());
  s.z_slow.resize(z.size());
  double fj = z0;
  for (long a = 0; a <= w; ++a) {
    for (long j : {w + a, w - a}) {
      const auto i = static_cast<std::size_t>(j);
      s.z_slow[i] = z[i] - fj;
      s.z_fast[i] = z[i] - s.z_slow[i];
      s.max_fast_adjust = std::max(s.max_fast_adjust, std::abs(s.z_fast[i] - fj));
      if (a == 0) break;
    }
    fj /= q;
  }
  for (std::size_t i = 0; i < z.size(); ++i)
    if (s.z_fast[i] + s.z_slow[i] != z[i]) ++s.bitwise_mismatches;
  s.zeta = slow_variables(z, kappa);
  return s;
}

double representation_residual(const std::vector<double>& z, double kappa) {
  const auto e = even_part(z);
  const auto zeta = slow_variables(z, kappa);
  const double q = 1.0 + 2.0 * kappa;
  double a = e[0], diff = 0.0, scale = std::abs(e[0]);
  for (std::size_t j = 1; j < e.size(); ++j) {
    a = (a + 2.0 * kappa * zeta[j - 1]) / q;
    diff = std::max(diff, std::abs(a - e[j]));
    scale = std::max(scale, std::abs(e[j]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

SlowDynamicsResidual slow_dynamics_residual(const ToyTrajectory& tr) {
  SlowDynamicsResidual r;
  const double k = tr.kappa;
  const double h = tr.dt * static_cast<double>(tr.stride);
  std::vector<std::vector<double>> zeta, ev;
  for (const auto& z : tr.z) {
    zeta.push_back(slow_variables(z, k));
    ev.push_back(even_part(z));
  }
  const std::size_t w = static_cast<std::size_t>(tr.window);
  for (std::size_t n = 1; n + 1 < tr.z.size(); ++n) {
    if (tr.times[n + 1] - tr.times[n] != tr.times[n] - tr.times[n - 1] &&
        std::abs((tr.times[n + 1] - tr.times[n]) - h) > 1e-9 * h)
      continue;
    const double dz0 = (ev[n + 1][0] - ev[n - 1][0]) / (2.0 * h);
    const double rhs0 = 4.0 * k * k / (1.0 + 2.0 * k) * (ev[n][0] - zeta[n][0]) + (1.0 + k) * tr.forcing[n];
    r.z0 = std::max(r.z0, std::abs(dz0 - rhs0));
    const double dzeta1 = (zeta[n + 1][0] - zeta[n - 1][0]) / (2.0 * h);
    const double rhs1 = zeta[n][1] - zeta[n][0] - (1.0 + k) / (2.0 * k) * tr.forcing[n];
    r.zeta1 = std::max(r.zeta1, std::abs(dzeta1 - rhs1));
    for (std::size_t m = 1; m + 2 < w; ++m) {
      const double d = (zeta[n + 1][m] - zeta[n - 1][m]) / (2.0 * h);
      const double lap = zeta[n][m + 1] + zeta[n][m - 1] - 2.0 * zeta[n][m];
      r.zeta_n = std::max(r.zeta_n, std::abs(d - lap));
    }
    r.scale = std::max(r.scale, std::abs(ev[n][0]));
  }
  return r;
}

SlowBoundReport slow_bound_check(const ToyTrajectory& tr) {
  SlowBoundReport rep;
  if (tr.z.empty()) return rep;
  double l1_0 = 0.0;
  for (double x : tr.z.front()) l1_0 += std::abs(x);
  double run = 0.0;
  for (std::size_t n = 0; n < tr.z.size(); ++n) {
    const auto s = split_slow_fast(tr.z[n], tr.kappa);
    double slow = 0.0, fast = 0.0;
    for (std::size_t i = 0; i < s.z_slow.size(); ++i) {
      slow += std::abs(s.z_slow[i]);
      fast += std::abs(s.z_fast[i]);
    }
    const double den = l1_0 + tr.forcing_l1[n];
    const double ratio = den > 0.0 ? slow / den : 0.0;
    run = std::max(run, ratio);
    rep.times.push_back(tr.times[n]);
    rep.ratio.push_back(ratio);
    rep.running_max.push_back(run);
    rep.fast_l1_end = fast;
  }
  rep.max_ratio = run;
  const double t_half = 0.5 * tr.times.back();
  double half_max = 0.0;
  for (std::size_t n = 0; n < rep.times.size() && rep.times[n] <= t_half; ++n) half_max = rep.running_max[n];
  rep.late_growth = half_max > 0.0 ? run / half_max - 1.0 : 0.0;
  auto sup = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  const std::size_t first = tr.z.size() > 1 ? 1 : 0;
  rep.fast_growth = sup(tr.z.back()) / std::max(sup(tr.z[first]), 1e-300);
  return rep;
}

}  // namespace splx
