#include "splx/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splx/errors.hpp"
#include "splx/potential.hpp"

namespace splx {

namespace {

// d/dx at x0 of the quadratic through (x0,f0), (x1,f1), (x2,f2).
double quad_slope(double x0, double f0, double x1, double f1, double x2, double f2) {
  const double l0 = (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (x0 - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * l0 + f1 * l1 + f2 * l2;
}

double quad_value(double x, double x0, double f0, double x1, double f1, double x2, double f2) {
  const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * l0 + f1 * l1 + f2 * l2;
}

class FrontTracker {
 public:
  FrontTracker(std::vector<double> p, double xi, double h, double dtau, double p_star)
      : p_(std::move(p)), next_(p_.size()), xi_(xi), h_(h), dtau_(dtau), ps_(p_star) {}

  double interface() const { return xi_; }
  Regime regime() const { return regime_; }
  const std::vector<double>& field() const { return p_; }
  bool truncated() const { return truncated_; }

  void step() {
    if (truncated_) return;
    if (regime_ == Regime::pinned) {
      heat_step();
      if (trace(next_) > ps_) {
        regime_ = Regime::moving;
        if (!moving_step()) {
          regime_ = Regime::pinned;
          p_.swap(next_);
        }
      } else {
        p_.swap(next_);
      }
    } else if (!moving_step()) {
      regime_ = Regime::pinned;
      heat_step();
      p_.swap(next_);
    }
  }

 private:
  long cell_of(double x) const {  // x_m < x <= x_{m+1}
    return static_cast<long>(std::ceil(x / h_)) - 1;
  }
  double node(long i) const { return h_ * static_cast<double>(i); }

  double trace(const std::vector<double>& v) const {
    const long m = cell_of(xi_);
    const double th = (xi_ - node(m)) / h_;
    return (1.0 - th) * v[static_cast<std::size_t>(m)] + th * v[static_cast<std::size_t>(m + 1)];
  }

  void heat_step() {
    const std::size_t n = p_.size();
    const double r = dtau_ / (h_ * h_);
    next_[0] = p_[0] + 2.0 * r * (p_[1] - p_[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      next_[i] = p_[i] + r * (p_[i + 1] + p_[i - 1] - 2.0 * p_[i]);
    }
    next_[n - 1] = p_[n - 1] + 2.0 * r * (p_[n - 2] - p_[n - 1]);
  }

  // Returns false (state untouched) when the Stefan speed is not positive.
  bool moving_step() {
    const long last = static_cast<long>(p_.size()) - 1;
    const long m = cell_of(xi_);
    if (m - 2 < 0 || m + 3 > last) {
      truncated_ = true;
      return true;
    }
    const double a_l = xi_ - node(m - 1);
    const double a_r = node(m + 2) - xi_;
    auto P = [&](long i) { return p_[static_cast<std::size_t>(i)]; };
    const double d_left = quad_slope(xi_, ps_, node(m - 1), P(m - 1), node(m - 2), P(m - 2));
    const double d_right = quad_slope(xi_, ps_, node(m + 2), P(m + 2), node(m + 3), P(m + 3));
    const double speed = 0.5 * (d_right - d_left);
    if (!(speed > 0.0)) return false;

    const double r = dtau_ / (h_ * h_);
    next_ = p_;
    next_[0] = P(0) + 2.0 * r * (P(1) - P(0));
    for (long i = 1; i <= m - 2; ++i) {
      next_[static_cast<std::size_t>(i)] = P(i) + r * (P(i + 1) + P(i - 1) - 2.0 * P(i));
    }
    next_[static_cast<std::size_t>(m - 1)] =
        P(m - 1) + dtau_ * 2.0 *
                       (P(m - 2) / (h_ * (h_ + a_l)) + ps_ / (a_l * (h_ + a_l)) -
                        P(m - 1) / (h_ * a_l));
    next_[static_cast<std::size_t>(m + 2)] =
        P(m + 2) + dtau_ * 2.0 *
                       (P(m + 3) / (h_ * (h_ + a_r)) + ps_ / (a_r * (h_ + a_r)) -
                        P(m + 2) / (h_ * a_r));
    for (long i = m + 3; i < last; ++i) {
      next_[static_cast<std::size_t>(i)] = P(i) + r * (P(i + 1) + P(i - 1) - 2.0 * P(i));
    }
    next_[static_cast<std::size_t>(last)] = P(last) + 2.0 * r * (P(last - 1) - P(last));

    const long m_old = m;
    xi_ += speed * dtau_;
    const long mn = cell_of(xi_);
    // Nodes that changed side keep their values; the two nodes nearest the
    // interface are slaved to the Dirichlet trace.
    if (mn - 2 < 0 || mn + 3 > last) {
      truncated_ = true;
      p_.swap(next_);
      return true;
    }
    auto Q = [&](long i) { return next_[static_cast<std::size_t>(i)]; };
    (void)m_old;
    next_[static_cast<std::size_t>(mn)] =
        quad_value(node(mn), xi_, ps_, node(mn - 1), Q(mn - 1), node(mn - 2), Q(mn - 2));
    next_[static_cast<std::size_t>(mn + 1)] =
        quad_value(node(mn + 1), xi_, ps_, node(mn + 2), Q(mn + 2), node(mn + 3), Q(mn + 3));
    p_.swap(next_);
    return true;
  }

  std::vector<double> p_;
  std::vector<double> next_;
  double xi_;
  double h_;
  double dtau_;
  double ps_;
  Regime regime_ = Regime::pinned;
  bool truncated_ = false;
};

}  // namespace

double StefanSolution::interface_at(double t) const {
  if (curve_tau.empty()) throw DomainError("empty Stefan solution");
  if (t <= curve_tau.front()) return curve_Xi.front();
  if (t >= curve_tau.back()) return curve_Xi.back();
  const auto it = std::upper_bound(curve_tau.begin(), curve_tau.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - curve_tau.begin());
  const double w = (t - curve_tau[i - 1]) / (curve_tau[i] - curve_tau[i - 1]);
  return (1.0 - w) * curve_Xi[i - 1] + w * curve_Xi[i];
}

double StefanSolution::field_at(std::size_t sample, double x) const {
  const auto& v = P.at(sample);
  const double s = std::clamp(x / h, 0.0, static_cast<double>(v.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(s), v.size() - 2);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

StefanSolution solve_stefan(const std::function<double(double)>& p_ini, double xi_ini,
                            double kappa, double tau_fin, const StefanGrid& grid) {
  if (grid.cells < 16) throw ConfigError("stefan.cells must be at least 16");
  if (!(grid.cfl > 0.0 && grid.cfl <= 0.4)) {
    throw ConfigError("stefan.cfl must lie in (0, 0.4] for the explicit scheme");
  }
  if (!(tau_fin > 0.0)) throw ConfigError("stefan.tau_fin must be positive");
  if (!(xi_ini > 0.0 && xi_ini < 1.0)) throw DomainError("interface must lie inside (0,1)");
  const auto params = derive_params(kappa);
  const double ps = params.p_star;

  StefanSolution sol;
  sol.p_star = ps;
  sol.tau_fin = tau_fin;
  sol.h = 1.0 / static_cast<double>(grid.cells);
  const long steps = static_cast<long>(std::ceil(tau_fin / (grid.cfl * sol.h * sol.h)));
  sol.dtau = tau_fin / static_cast<double>(steps);

  std::vector<double> p(static_cast<std::size_t>(grid.cells + 1));
  for (long i = 0; i <= grid.cells; ++i) {
    const double x = sol.h * static_cast<double>(i);
    sol.xi.push_back(x);
    const double v = p_ini(x);
    if (!std::isfinite(v)) throw DomainError("non-finite initial field");
    if (x < xi_ini && !(v > -ps)) {
      throw DomainError("initial field must exceed -p* left of the interface (xi=" +
                        std::to_string(x) + ")");
    }
    if (x > xi_ini && !(v > -ps && v <= ps)) {
      throw DomainError("initial field must lie in (-p*, p*] right of the interface (xi=" +
                        std::to_string(x) + ")");
    }
    p[static_cast<std::size_t>(i)] = v;
  }

  FrontTracker ft(std::move(p), xi_ini, sol.h, sol.dtau, ps);
  const long sample_every = std::max<long>(1, steps / std::max<long>(1, grid.samples));
  const long curve_every = std::max<long>(1, steps / std::max<long>(1, grid.curve_points));
  auto record = [&](long n, bool sample, bool curve) {
    const double t = static_cast<double>(n) * sol.dtau;
    if (sample) {
      sol.tau.push_back(t);
      sol.P.push_back(ft.field());
      sol.Xi.push_back(ft.interface());
      sol.regime.push_back(ft.regime());
    }
    if (curve) {
      sol.curve_tau.push_back(t);
      sol.curve_Xi.push_back(ft.interface());
      sol.curve_regime.push_back(ft.regime());
    }
  };
  record(0, true, true);
  for (long n = 1; n <= steps; ++n) {
    ft.step();
    record(n, n % sample_every == 0 || n == steps, n % curve_every == 0 || n == steps);
    if (ft.truncated()) break;
  }
  sol.truncated = ft.truncated();
  return sol;
}

}  // namespace splx
