#include "splx/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "splx/errors.hpp"

namespace splx {

double PiecewiseLinearMu::operator()(double p) const {
  if (x.empty()) return 0.0;
  if (p <= x.front()) return y.front();
  if (p >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double s = (p - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + s * (y[i] - y[i - 1]);
}

PiecewiseLinearMu random_monotone_mu(std::mt19937_64& rng, int knots, double span) {
  std::uniform_real_distribution<double> pos(-span, span), inc(0.0, 1.0);
  PiecewiseLinearMu mu;
  for (int i = 0; i < knots; ++i) mu.x.push_back(pos(rng));
  std::sort(mu.x.begin(), mu.x.end());
  mu.x.erase(std::unique(mu.x.begin(), mu.x.end()), mu.x.end());
  double v = inc(rng) - 0.5;
  for (std::size_t i = 0; i < mu.x.size(); ++i) {
    mu.y.push_back(v);
    v += inc(rng);
  }
  return mu;
}

PiecewiseLinearMu smoothed_step_mu(double p_tilde, double width) {
  PiecewiseLinearMu mu;
  mu.x = {p_tilde - 0.5 * width, p_tilde + 0.5 * width};
  mu.y = {0.0, 1.0};
  return mu;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

EntropyPair::EntropyPair(MuFunction mu, const PotentialParams& params, double range,
                         double spacing)
    : mu_(std::move(mu)), params_(params) {
  anchor_ = -params_.u_star_star;
  range = std::max(range, params_.u_star_star + 1.0);
  const long n = static_cast<long>(std::ceil(2.0 * range / spacing));
  lo_ = -range;
  h_ = 2.0 * range / static_cast<double>(n);
  table_.assign(static_cast<std::size_t>(n + 1), 0.0);
  for (long i = 1; i <= n; ++i)
    table_[static_cast<std::size_t>(i)] =
        table_[static_cast<std::size_t>(i - 1)] +
        integrate(lo_ + static_cast<double>(i - 1) * h_, lo_ + static_cast<double>(i) * h_);
  const double shift = eta(anchor_);
  for (double& v : table_) v -= shift;
}

double EntropyPair::integrate(double a, double b) const {
  auto f = [this](double v) { return mu_(phi_prime(v, params_)); };
  return adaptive_simpson(f, a, b, 1e-14);
}

double EntropyPair::eta(double u) const {
  const double s = (u - lo_) / h_;
  long i = static_cast<long>(std::llround(s));
  i = std::clamp(i, 0L, static_cast<long>(table_.size()) - 1);
  const double node = lo_ + static_cast<double>(i) * h_;
  return table_[static_cast<std::size_t>(i)] + integrate(node, u);
}

EntropyPair make_pair(MuFunction mu, const PotentialParams& params, double range, double spacing,
                      double grid) {
  double prev = mu(-grid);
  for (int i = 1; i < 1000; ++i) {
    const double v = mu(-grid + 2.0 * grid * i / 999.0);
    if (v < prev) throw DomainError("mu must be nondecreasing");
    prev = v;
  }
  return EntropyPair(std::move(mu), params, range, spacing);
}

BalanceTerms balance_terms(const std::vector<double>& u, const std::vector<double>& p,
                           const std::vector<double>& psi, const EntropyPair& pair) {
  BalanceTerms b;
  const std::size_t m = u.size();
  std::vector<double> mu(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (psi[j] != 0.0) b.entropy += pair.eta(u[j]) * psi[j];
    mu[j] = pair.mu(p[j]);
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double gp = p[j + 1] - p[j];
    b.flux += mu[j] * (psi[j + 1] - psi[j]) * gp;
    b.dissipation += psi[j + 1] * (mu[j + 1] - mu[j]) * gp;
  }
  return b;
}

EnergyDissipation energy_and_dissipation(const std::vector<double>& u, const std::vector<double>& p,
                                         long n, const PotentialParams& params) {
  EnergyDissipation r;
  const double nn = static_cast<double>(n);
  for (double x : u) r.E += phi(x, params);
  r.E /= nn;
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    const double d = p[j + 1] - p[j];
    r.D += d * d;
  }
  r.D *= nn;
  return r;
}

std::vector<double> gaussian_weight(long lo, std::size_t m, double center, double width) {
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = (static_cast<double>(lo) + static_cast<double>(i) - center) / width;
    if (std::abs(x) <= 4.0) w[i] = std::exp(-x * x);
  }
  return w;
}

std::vector<double> hat_weight(long lo, std::size_t m, double center, double width) {
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::abs(static_cast<double>(lo) + static_cast<double>(i) - center) / width;
    w[i] = std::max(0.0, 1.0 - x);
  }
  return w;
}

EntropyMonitor::EntropyMonitor(const LatticeConfig& config, std::vector<Test> tests, long every)
    : config_(config),
      params_(derive_params(config.kappa)),
      tests_(std::move(tests)),
      every_(std::max(1L, every)),
      rows_(std::make_shared<std::vector<Row>>()) {
  const std::size_t m = static_cast<std::size_t>(config_.hi() - config_.lo() + 1);
  for (const auto& t : tests_) {
    if (t.psi.size() != m) throw DomainError("weight length does not match the window");
    for (double x : t.psi)
      if (x < 0.0 || !std::isfinite(x)) throw DomainError("weights must be nonnegative");
  }
  psi_energy_ = tests_.empty() ? std::vector<double>(m, 1.0) : tests_.front().psi;
}

StepObserver EntropyMonitor::observer() {
  StepObserver o;
  o.every = every_;
  auto rows = rows_;
  const auto tests = tests_;
  const auto psi_e = psi_energy_;
  const auto params = params_;
  const long n = config_.n_particles;
  o.fn = [rows, tests, psi_e, params, n](const LatticeState& s) {
    Row r;
    r.t = s.t;
    const auto ed = energy_and_dissipation(s.u, s.p, n, params);
    r.E = ed.E;
    r.D = ed.D;
    for (std::size_t j = 0; j < s.u.size(); ++j) r.energy_weighted += phi(s.u[j], params) * psi_e[j];
    for (std::size_t j = 0; j + 1 < s.u.size(); ++j) {
      const double gp = s.p[j + 1] - s.p[j];
      r.energy_flux += s.p[j] * (psi_e[j + 1] - psi_e[j]) * gp;
      r.energy_diss += psi_e[j + 1] * gp * gp;
    }
    for (const auto& t : tests) r.terms.push_back(balance_terms(s.u, s.p, t.psi, *t.pair));
    rows->push_back(std::move(r));
  };
  return o;
}

EntropyReport EntropyMonitor::report(const TransitionLog& log) const {
  const auto& rows = *rows_;
  EntropyReport rep;
  rep.steps = static_cast<long>(rows.size());
  if (rows.size() < 3) return rep;
  const double h = rows[1].t - rows[0].t;
  rep.dt = h / static_cast<double>(every_);
  const double eps = config_.eps();
  for (std::size_t k = 0; k < tests_.size(); ++k) {
    PairResult pr;
    pr.label = tests_[k].label;
    pr.max_residual = -kNever;
    pr.min_dissipation = kNever;
    for (std::size_t n = 1; n + 1 < rows.size(); ++n) {
      const double dS = (rows[n + 1].terms[k].entropy - rows[n - 1].terms[k].entropy) /
                        (rows[n + 1].t - rows[n - 1].t);
      const double res = dS + rows[n].terms[k].flux;
      pr.residual.push_back(res);
      pr.max_residual = std::max(pr.max_residual, res);
      pr.max_identity_error =
          std::max(pr.max_identity_error, std::abs(res + rows[n].terms[k].dissipation));
    }
    for (const auto& r : rows) pr.min_dissipation = std::min(pr.min_dissipation, r.terms[k].dissipation);
    rep.pairs.push_back(std::move(pr));
  }
  for (std::size_t n = 0; n + 1 < rows.size(); ++n) {
    const double dt = rows[n + 1].t - rows[n].t;
    rep.energy_law_max =
        std::max(rep.energy_law_max, std::abs((rows[n + 1].E - rows[n].E) / dt + eps * eps * rows[n].D));
    rep.energy_increase_max = std::max(rep.energy_increase_max, rows[n + 1].E - rows[n].E);
  }
  const double nn = static_cast<double>(config_.n_particles);
  for (const auto& rec : log.records) {
    if (!rec.complete()) continue;
    DissipationPeak pk;
    pk.k = rec.k;
    pk.t_star = rec.t_star;
    for (const auto& r : rows)
      if (r.t >= rec.t_star && r.t <= rec.t_star + 10.0) pk.peak = std::max(pk.peak, r.D);
    pk.in_range = pk.peak >= 0.1 * nn && pk.peak <= 10.0 * nn;
    rep.peaks.push_back(pk);
  }
  double flux_int = 0.0, diss_int = 0.0;
  rep.balance_slack_min = rows[0].energy_weighted;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const double dt = rows[n].t - rows[n - 1].t;
    flux_int += 0.5 * dt * (rows[n].energy_flux + rows[n - 1].energy_flux);
    diss_int += 0.5 * dt * (rows[n].energy_diss + rows[n - 1].energy_diss);
    rep.balance_slack_min = std::min(rep.balance_slack_min, rows[0].energy_weighted - flux_int - diss_int);
  }
  for (const auto& r : rows) {
    rep.times.push_back(r.t);
    rep.E.push_back(r.E);
    rep.D.push_back(r.D);
  }
  return rep;
}

std::string entropy_csv(const EntropyReport& r, double epsilon) {
  std::ostringstream os;
  os.precision(12);
  os << "t,tau,E,D";
  for (const auto& p : r.pairs) os << ",residual_" << p.label;
  os << "\n";
  for (std::size_t n = 0; n < r.times.size(); ++n) {
    os << r.times[n] << "," << r.times[n] * epsilon * epsilon << "," << r.E[n] << "," << r.D[n];
    for (const auto& p : r.pairs) {
      os << ",";
      if (n >= 1 && n - 1 < p.residual.size()) os << p.residual[n - 1];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace splx
