#include "splx/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "splx/errors.hpp"
#include "splx/potential.hpp"

namespace splx {

double ImpactProfile::at(long j) const {
  if (j < -radius || j > radius) return 0.0;
  return values[static_cast<std::size_t>(j + radius)];
}

double ImpactProfile::mass() const {
  double s = values.empty() ? 0.0 : 0.0;
  const long n = static_cast<long>(values.size());
  // tails first
  for (long a = 0, b = n - 1; a < b; ++a, --b) s += values[a] + values[b];
  if (n % 2 == 1) s += values[static_cast<std::size_t>(n / 2)];
  return s;
}

ImpactProfile impact_profile(double kappa, double tol) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const PotentialParams pp = derive_params(kappa);
  const double q = 1.0 + 2.0 * kappa;
  ImpactProfile r;
  r.kappa = kappa;
  r.radius = std::max(0L, static_cast<long>(std::ceil(std::log(2.0 * pp.p_star / tol) / std::log(q))));
  r.values.assign(static_cast<std::size_t>(2 * r.radius + 1), 0.0);
  for (long j = 0; j <= r.radius; ++j) {
    const double v = 2.0 * pp.p_star * std::pow(q, -static_cast<double>(j));
    r.values[static_cast<std::size_t>(r.radius + j)] = v;
    r.values[static_cast<std::size_t>(r.radius - j)] = v;
  }
  return r;
}

std::vector<double> fold_profile(const ImpactProfile& rho, long center, long lo, std::size_t m) {
  std::vector<double> out(m, 0.0);
  const long two_m = 2 * static_cast<long>(m);
  for (long n = -rho.radius; n <= rho.radius; ++n) {
    long y = (center + n - lo) % two_m;
    if (y < 0) y += two_m;
    if (y >= static_cast<long>(m)) y = two_m - 1 - y;
    out[static_cast<std::size_t>(y)] += rho.at(n);
  }
  return out;
}

namespace {

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

std::vector<double> scaled(std::vector<double> c, const std::vector<double>& lam, double t) {
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= std::exp(lam[m] * t);
  return c;
}

}  // namespace

FluctuationEngine::FluctuationEngine(const Trajectory& traj, const TransitionLog& log,
                                     FluctuationOptions options)
    : traj_(traj), log_(log), opt_(options) {
  if (traj_.snapshots.empty()) throw DomainError("empty trajectory");
  epsilon_ = traj_.epsilon;
  const PotentialParams pp = derive_params(traj_.kappa);
  p_star_ = pp.p_star;
  d_window_ = opt_.d_window >= 0.0 ? opt_.d_window : log_.d_emp() / epsilon_;
  if (!std::isfinite(d_window_)) d_window_ = traj_.t_fin;
  rho_ = impact_profile(traj_.kappa);
  const std::size_t m = traj_.sites();
  flow_ = std::make_unique<NeumannFlow>(m);
  p0_hat_ = flow_->forward(traj_.p_of(traj_.snapshots.front()));
  for (const auto& rec : log_.records) {
    PerRecord pr;
    pr.rec = rec;
    pr.idx = static_cast<std::size_t>(rec.k - traj_.lo);
    if (rec.k < traj_.lo || pr.idx >= m) throw DomainError("transition site outside window");
    const auto& sh = traj_.exact(rec.t_hash);
    pr.q_hat = flow_->forward(traj_.p_of(sh));
    pr.rho_fold = fold_profile(rho_, rec.k, traj_.lo, m);
    if (std::isfinite(rec.t_star)) {
      pr.has_star = true;
      const auto& ss = traj_.exact(rec.t_star);
      std::vector<double> qs = flow_->inverse(scaled(pr.q_hat, flow_->eigenvalues(),
                                                     rec.t_star - rec.t_hash));
      const auto ps = traj_.p_of(ss);
      pr.r_star.resize(m);
      for (std::size_t i = 0; i < m; ++i) pr.r_star[i] = qs[i] - ps[i];
      pr.r_hat = flow_->forward(pr.r_star);
      pr.ess_hat = flow_->forward(pr.rho_fold);
      pr.neg_hat.resize(m);
      std::vector<double> neg0(m);
      for (std::size_t i = 0; i < m; ++i) neg0[i] = pr.r_star[i] - pr.rho_fold[i];
      pr.neg_hat = flow_->forward(neg0);
    }
    recs_.push_back(std::move(pr));
  }
}

FluctuationEngine::~FluctuationEngine() = default;

const TransitionRecord& FluctuationEngine::record(std::size_t i) const { return recs_.at(i).rec; }

std::vector<double> FluctuationEngine::q(std::size_t i, double t) const {
  const auto& pr = recs_.at(i);
  if (t < pr.rec.t_hash) return std::vector<double>(traj_.sites(), 0.0);
  return flow_->inverse(scaled(pr.q_hat, flow_->eigenvalues(), t - pr.rec.t_hash));
}

FluctuationParts FluctuationEngine::parts(std::size_t i, std::size_t snapshot,
                                          bool left_limit) const {
  const auto& pr = recs_.at(i);
  const auto& s = traj_.snapshots.at(snapshot);
  const std::size_t m = traj_.sites();
  FluctuationParts out;
  const std::vector<double> zero(m, 0.0);
  out.r = out.ess = out.neg = out.reg = out.res = zero;
  const double t = s.t;
  if (t <= pr.rec.t_hash) return out;
  if (!pr.has_star || t < pr.rec.t_star || (left_limit && t == pr.rec.t_star)) {
    const auto qv = q(i, t);
    const auto pv = traj_.p_of(s);
    for (std::size_t j = 0; j < m; ++j) out.r[j] = qv[j] - pv[j];
    out.neg = out.r;
    return out;
  }
  const double age = t - pr.rec.t_star;
  out.ess = flow_->inverse(scaled(pr.ess_hat, flow_->eigenvalues(), age));
  out.neg = flow_->inverse(scaled(pr.neg_hat, flow_->eigenvalues(), age));
  for (std::size_t j = 0; j < m; ++j) out.r[j] = out.ess[j] + out.neg[j];
  if (age < d_window_)
    out.res = out.ess;
  else
    out.reg = out.ess;
  return out;
}

double FluctuationEngine::compute_D(std::size_t i, bool* flagged) const {
  const auto& pr = recs_.at(i);
  if (flagged) *flagged = false;
  if (!pr.has_star) return 0.0;
  const double L = pr.rec.t_star - pr.rec.t_hash;
  if (!(L > 0.0)) return 0.0;
  const auto& lam = flow_->eigenvalues();
  const auto row = flow_->basis_row(pr.idx);
  const double mm = static_cast<double>(traj_.sites());
  std::vector<double> w(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) w[k] = pr.q_hat[k] * lam[k] * row[k] / mm;
  // |Delta q_k(sigma)|, sigma = L x^2
  auto g = [&](double x) {
    const double sigma = L * x * x;
    double acc = 0.0;
    for (std::size_t k = 1; k < w.size(); ++k) acc += w[k] * std::exp(lam[k] * sigma);
    return std::abs(acc) * 2.0 * L * x;
  };
  long n = 32;
  std::vector<double> fx(static_cast<std::size_t>(n + 1));
  for (long j = 0; j <= n; ++j) fx[static_cast<std::size_t>(j)] = g(static_cast<double>(j) / n);
  auto trap = [&](const std::vector<double>& f) {
    const double hh = 1.0 / static_cast<double>(f.size() - 1);
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
    return s * hh;
  };
  double prev = trap(fx);
  while (true) {
    const long n2 = 2 * n;
    std::vector<double> f2(static_cast<std::size_t>(n2 + 1));
    for (long j = 0; j <= n; ++j) f2[static_cast<std::size_t>(2 * j)] = fx[static_cast<std::size_t>(j)];
    for (long j = 0; j < n; ++j)
      f2[static_cast<std::size_t>(2 * j + 1)] = g((2.0 * j + 1.0) / static_cast<double>(n2));
    const double cur = trap(f2);
    fx.swap(f2);
    n = n2;
    if (std::abs(cur - prev) <= opt_.quad_rel_tol * std::abs(cur) + 1e-300) return cur;
    if (n >= opt_.quad_max_intervals) {
      if (flagged) *flagged = true;
      return cur;
    }
    prev = cur;
  }
}

FluctuationSummary FluctuationEngine::summary(std::size_t i) const {
  const auto& pr = recs_.at(i);
  FluctuationSummary s;
  s.k = pr.rec.k;
  s.t_hash = pr.rec.t_hash;
  s.t_flat = pr.rec.t_flat;
  s.t_star = pr.rec.t_star;
  s.d_k = compute_D(i, &s.d_k_flagged);
  const std::size_t m = traj_.sites();
  if (std::isfinite(pr.rec.t_flat)) {
    const auto& sf = traj_.exact(pr.rec.t_flat);
    const auto qv = q(i, sf.t);
    const auto pv = traj_.p_of(sf);
    double a = 0.0;
    for (std::size_t j = 0; j < m; ++j) a += std::abs(qv[j] - pv[j]);
    s.l1_at_flat = a;
  }
  if (pr.has_star) {
    double a = 0.0;
    for (std::size_t j = 0; j < m; ++j) a += std::abs(pr.r_star[j] - pr.rho_fold[j]);
    s.l1_profile_error = a;
    s.q_gap = std::abs(flow_->value_at(pr.q_hat, pr.idx, pr.rec.t_star - pr.rec.t_hash) - p_star_);
  }
  const double t_end = std::isfinite(pr.rec.t_flat) ? pr.rec.t_flat : traj_.t_fin;
  for (std::size_t n = 0; n < traj_.snapshots.size(); ++n) {
    const double t = traj_.snapshots[n].t;
    if (t < pr.rec.t_hash) continue;
    const auto fp = parts(i, n);
    s.sup_abs = std::max(s.sup_abs, sup_abs(fp.r));
    if (t <= t_end) s.excursion_sup_l1 = std::max(s.excursion_sup_l1, l1(fp.r));
    if (pr.has_star && t > pr.rec.t_star + 4.0 * d_window_ + 1.0) break;
  }
  return s;
}

std::vector<FluctuationSummary> FluctuationEngine::summaries() const {
  std::vector<FluctuationSummary> out;
  for (std::size_t i = 0; i < recs_.size(); ++i) out.push_back(summary(i));
  return out;
}

double FluctuationEngine::recursion_error(std::size_t i) const {
  const auto& pr = recs_.at(i);
  const auto& lam = flow_->eigenvalues();
  const double t = pr.rec.t_hash;
  std::vector<double> c = scaled(p0_hat_, lam, t);
  for (std::size_t l = 0; l < i; ++l) {
    const auto& o = recs_[l];
    if (!o.has_star || o.rec.t_star > t) continue;
    const auto rl = scaled(o.r_hat, lam, t - o.rec.t_star);
    for (std::size_t m = 0; m < c.size(); ++m) c[m] -= rl[m];
  }
  const auto rhs = flow_->inverse(c);
  const auto lhs = flow_->inverse(pr.q_hat);
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    diff = std::max(diff, std::abs(lhs[j] - rhs[j]));
    scale = std::max(scale, std::abs(lhs[j]));
  }
  return diff / std::max(scale, 1e-300);
}

std::vector<double> FluctuationEngine::initial_flow(double t) const {
  return flow_->inverse(scaled(p0_hat_, flow_->eigenvalues(), t));
}

std::vector<double> FluctuationEngine::images_flow(const std::vector<double>& v, double t,
                                                   long radius) const {
  const long m = static_cast<long>(v.size());
  if (t <= 0.0) return v;
  std::vector<double> g(static_cast<std::size_t>(radius + 1));
  const auto row = scaled_bessel_row(static_cast<std::size_t>(radius), 2.0 * t);
  for (long n = 0; n <= radius; ++n) g[static_cast<std::size_t>(n)] = row[static_cast<std::size_t>(n)];
  std::vector<double> out(v.size(), 0.0);
  const long two_m = 2 * m;
  for (long i = 0; i < m; ++i) {
    const double vi = v[static_cast<std::size_t>(i)];
    if (vi == 0.0) continue;
    for (long n = -radius; n <= radius; ++n) {
      long y = (i + n) % two_m;
      if (y < 0) y += two_m;
      if (y >= m) y = two_m - 1 - y;
      out[static_cast<std::size_t>(y)] += vi * g[static_cast<std::size_t>(std::abs(n))];
    }
  }
  return out;
}

std::vector<double> FluctuationEngine::superposition_field(std::size_t snapshot,
                                                           SemigroupBackend backend,
                                                           long images_radius) const {
  const auto& s = traj_.snapshots.at(snapshot);
  const double t = s.t;
  const std::size_t m = traj_.sites();
  const auto pv = traj_.p_of(s);
  const auto& lam = flow_->eigenvalues();
  if (backend == SemigroupBackend::spectral) {
    std::vector<double> c = scaled(p0_hat_, lam, t);
    for (auto& x : c) x = -x;
    long open = 0;
    for (const auto& pr : recs_) {
      if (t < pr.rec.t_hash) continue;
      if (pr.has_star && t >= pr.rec.t_star) {
        const auto rl = scaled(pr.r_hat, lam, t - pr.rec.t_star);
        for (std::size_t k = 0; k < m; ++k) c[k] += rl[k];
      } else {
        const auto ql = scaled(pr.q_hat, lam, t - pr.rec.t_hash);
        for (std::size_t k = 0; k < m; ++k) c[k] += ql[k];
        ++open;
      }
    }
    auto out = flow_->inverse(c);
    const double w = static_cast<double>(1 - open);
    for (std::size_t j = 0; j < m; ++j) out[j] += w * pv[j];
    return out;
  }
  auto radius_for = [&](double age) {
    return images_radius > 0 ? images_radius : truncation_radius(age, 1e-10);
  };
  std::vector<double> out = pv;
  const auto p0 = traj_.p_of(traj_.snapshots.front());
  const auto Q = images_flow(p0, t, radius_for(t));
  for (std::size_t j = 0; j < m; ++j) out[j] -= Q[j];
  for (const auto& pr : recs_) {
    if (t < pr.rec.t_hash) continue;
    if (pr.has_star && t >= pr.rec.t_star) {
      const double age = t - pr.rec.t_star;
      const auto rl = images_flow(pr.r_star, age, radius_for(age));
      for (std::size_t j = 0; j < m; ++j) out[j] += rl[j];
    } else {
      const double age = t - pr.rec.t_hash;
      const auto ph = traj_.p_of(traj_.exact(pr.rec.t_hash));
      const auto ql = images_flow(ph, age, radius_for(age));
      for (std::size_t j = 0; j < m; ++j) out[j] += ql[j] - pv[j];
    }
  }
  return out;
}

SuperpositionReport FluctuationEngine::superposition_check(SemigroupBackend backend,
                                                           long images_radius,
                                                           long stride) const {
  SuperpositionReport rep;
  stride = std::max(1L, stride);
  for (std::size_t n = 0; n < traj_.snapshots.size(); n += static_cast<std::size_t>(stride)) {
    const double r = sup_abs(superposition_field(n, backend, images_radius));
    rep.times.push_back(traj_.snapshots[n].t);
    rep.residuals.push_back(r);
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.time_of_max = traj_.snapshots[n].t;
    }
  }
  return rep;
}

std::vector<std::size_t> FluctuationEngine::analysis_snapshots() const {
  const auto reg = traj_.regular_indices();
  const long cap = std::max(2L, opt_.max_times);
  std::vector<std::size_t> out;
  if (static_cast<long>(reg.size()) <= cap) {
    out = reg;
  } else {
    const double step = static_cast<double>(reg.size() - 1) / static_cast<double>(cap - 1);
    for (long i = 0; i < cap; ++i) {
      const auto j = static_cast<std::size_t>(std::llround(step * static_cast<double>(i)));
      if (out.empty() || out.back() != reg[j]) out.push_back(reg[j]);
    }
  }
  for (std::size_t n = 0; n < traj_.snapshots.size(); ++n)
    if (traj_.snapshots[n].kind == SnapshotKind::event) out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FluctuationEngine::Aggregates FluctuationEngine::aggregates(std::size_t snapshot,
                                                           bool left_limit) const {
  const std::size_t m = traj_.sites();
  Aggregates a;
  a.t = traj_.snapshots.at(snapshot).t;
  a.Q = initial_flow(a.t);
  a.R_ess = a.R_neg = a.R_reg = a.R_res = std::vector<double>(m, 0.0);
  for (std::size_t i = 0; i < recs_.size(); ++i) {
    if (a.t <= recs_[i].rec.t_hash) continue;
    const auto fp = parts(i, snapshot, left_limit);
    for (std::size_t j = 0; j < m; ++j) {
      a.R_ess[j] += fp.ess[j];
      a.R_neg[j] += fp.neg[j];
      a.R_reg[j] += fp.reg[j];
      a.R_res[j] += fp.res[j];
      a.neg_abs_l1 += std::abs(fp.neg[j]);
      a.res_abs_l1 += std::abs(fp.res[j]);
      a.ess_mass += fp.ess[j];
    }
    if (recs_[i].has_star && a.t >= recs_[i].rec.t_star && !(left_limit && a.t == recs_[i].rec.t_star))
      ++a.completed;
  }
  return a;
}

RegularityReport FluctuationEngine::regularity_report() const {
  RegularityReport rep;
  const double se = std::sqrt(epsilon_);
  for (std::size_t i = 0; i < recs_.size(); ++i) {
    if (!recs_[i].has_star) continue;
    ++rep.transitions;
    rep.sum_d_sqrt_eps += compute_D(i) * se;
  }
  const auto idx = analysis_snapshots();
  rep.times = static_cast<long>(idx.size());
  std::vector<std::vector<double>> regs;
  std::vector<double> ts;
  for (std::size_t n : idx) {
    const auto a = aggregates(n);
    rep.neg_l1_sqrt_eps = std::max(rep.neg_l1_sqrt_eps, a.neg_abs_l1 * se);
    rep.res_l1 = std::max(rep.res_l1, a.res_abs_l1);
    double g2 = 0.0;
    for (std::size_t j = 0; j + 1 < a.R_reg.size(); ++j) {
      const double d = a.R_reg[j + 1] - a.R_reg[j];
      g2 += d * d;
    }
    rep.reg_grad_l2_over_eps = std::max(rep.reg_grad_l2_over_eps, g2 / epsilon_);
    rep.sup_reg = std::max(rep.sup_reg, sup_abs(a.R_reg));
    rep.sup_neg = std::max(rep.sup_neg, sup_abs(a.R_neg));
    rep.sup_res = std::max(rep.sup_res, sup_abs(a.R_res));
    rep.ess_mass_error =
        std::max(rep.ess_mass_error, std::abs(a.ess_mass - 2.0 * static_cast<double>(a.completed)));
    regs.push_back(a.R_reg);
    ts.push_back(a.t);
    if (traj_.snapshots[n].kind == SnapshotKind::event) {
      const auto b = aggregates(n, true);
      rep.neg_l1_sqrt_eps = std::max(rep.neg_l1_sqrt_eps, b.neg_abs_l1 * se);
      rep.sup_neg = std::max(rep.sup_neg, sup_abs(b.R_neg));
    }
  }
  // Hoelder quotient on dyadic and random pairs
  auto quotient = [&](std::size_t a, long ja, std::size_t b, long jb) {
    const double dr = std::abs(regs[a][static_cast<std::size_t>(ja)] - regs[b][static_cast<std::size_t>(jb)]);
    const double dt = std::abs(ts[a] - ts[b]);
    const double dj = std::abs(static_cast<double>(ja - jb));
    return dr / (se * (std::pow(dt, 0.25) + std::sqrt(dj)) + se);
  };
  const long m = static_cast<long>(traj_.sites());
  double hq = 0.0;
  for (std::size_t a = 0; a < regs.size(); ++a) {
    for (long dj = 1; dj < m; dj *= 2)
      for (long j = 0; j + dj < m; j += std::max(1L, dj / 2))
        hq = std::max(hq, quotient(a, j, a, j + dj));
    for (std::size_t db = 1; a + db < regs.size(); db *= 2)
      for (long j = 0; j < m; j += std::max(1L, m / 64)) hq = std::max(hq, quotient(a, j, a + db, j));
  }
  if (!regs.empty()) {
    std::mt19937_64 rng(opt_.seed);
    std::uniform_int_distribution<std::size_t> pick_t(0, regs.size() - 1);
    std::uniform_int_distribution<long> pick_j(0, m - 1);
    for (long n = 0; n < opt_.holder_random_pairs; ++n)
      hq = std::max(hq, quotient(pick_t(rng), pick_j(rng), pick_t(rng), pick_j(rng)));
  }
  rep.holder_quotient = hq;
  return rep;
}

void fill_forcing_integrals(const FluctuationEngine& engine, TransitionLog& log) {
  for (std::size_t i = 0; i < engine.size() && i < log.records.size(); ++i)
    log.records[i].d_k = engine.compute_D(i);
}

std::string summaries_to_json(const std::vector<FluctuationSummary>& s, double epsilon) {
  nlohmann::json arr = nlohmann::json::array();
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  for (const auto& e : s) {
    arr.push_back({{"k", e.k},
                   {"t_hash", num(e.t_hash)},
                   {"t_flat", num(e.t_flat)},
                   {"t_star", num(e.t_star)},
                   {"D_k", e.d_k},
                   {"D_k_flagged", e.d_k_flagged},
                   {"D_k_sqrt_eps", e.d_k * std::sqrt(epsilon)},
                   {"l1_at_flat", e.l1_at_flat},
                   {"l1_profile_error", e.l1_profile_error},
                   {"excursion_sup_l1", e.excursion_sup_l1},
                   {"sup_abs", e.sup_abs},
                   {"q_gap", e.q_gap}});
  }
  return arr.dump(2);
}

}  // namespace splx
