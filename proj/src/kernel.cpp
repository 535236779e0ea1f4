#include "splx/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "splx/errors.hpp"

namespace splx {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

long reflect_index(long x, long m) {
  const long period = 2 * m;
  long y = x % period;
  if (y < 0) y += period;
  return y < m ? y : period - 1 - y;
}

// Least-squares slope and rms residual of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (icpt + slope * x[i]);
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

}  // namespace

std::vector<double> scaled_bessel_row(std::size_t n_max, double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError("scaled_bessel_row: argument must be finite and >= 0");
  }
  std::vector<double> row(n_max + 1, 0.0);
  if (x == 0.0) {
    row[0] = 1.0;
    return row;
  }
  // I_n(x)/I_0(x) ~ exp(-n^2 / 2x) for large x; exp(-45) is far below
  // double resolution relative to the normalisation sum.
  const auto start = static_cast<std::size_t>(
      std::max<double>(static_cast<double>(n_max), std::sqrt(90.0 * x)) + 40.0);
  std::vector<double> v(start + 2, 0.0);
  v[start + 1] = 0.0;
  v[start] = 1e-280;
  constexpr double kBig = 1e200;
  for (std::size_t n = start; n >= 1; --n) {
    v[n - 1] = v[n + 1] + (2.0 * static_cast<double>(n) / x) * v[n];
    if (std::abs(v[n - 1]) > kBig) {
      for (std::size_t i = n - 1; i <= start; ++i) v[i] /= kBig;
    }
  }
  // Sum from the small tail upward so that the dominant terms come last.
  double total = 0.0;
  for (std::size_t n = start; n >= 1; --n) total += 2.0 * v[n];
  total += v[0];
  for (std::size_t n = 0; n <= n_max; ++n) row[n] = v[n] / total;
  return row;
}

double heat_kernel(long j, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("heat_kernel: time must be finite and >= 0");
  }
  const auto n = static_cast<std::size_t>(j < 0 ? -j : j);
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  return scaled_bessel_row(n, 2.0 * t)[n];
}

long truncation_radius(double t, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tolerance must lie in (0,1)");
  if (!std::isfinite(t) || t < 0.0) throw DomainError("time must be finite and >= 0");
  return static_cast<long>(std::ceil(2.0 * std::sqrt(t * std::log(1.0 / tol)))) + 10;
}

double KernelEval::at(long j) const {
  const long i = j + radius;
  if (i < 0 || i >= static_cast<long>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(i)];
}

KernelEval kernel_eval(double t, double tol) {
  KernelEval out;
  out.t = t;
  out.radius = truncation_radius(t, tol);
  const auto r = static_cast<std::size_t>(out.radius);
  // Extra rows so that the tail sum is explicit.
  const std::size_t extra = r + 64 + static_cast<std::size_t>(std::sqrt(90.0 * 2.0 * t));
  const auto row = t == 0.0 ? std::vector<double>(extra + 1, 0.0)
                            : scaled_bessel_row(extra, 2.0 * t);
  out.values.assign(2 * r + 1, 0.0);
  if (t == 0.0) {
    out.values[r] = 1.0;
    out.tail_bound = 0.0;
    return out;
  }
  for (std::size_t n = 0; n <= r; ++n) {
    out.values[r + n] = row[n];
    out.values[r - n] = row[n];
  }
  double tail = 0.0;
  for (std::size_t n = extra; n > r; --n) tail += 2.0 * row[n];
  out.tail_bound = tail + 1e-15;
  return out;
}

double WindowedField::at(long j) const {
  if (j < lo || j > hi()) return 0.0;
  return values[static_cast<std::size_t>(j - lo)];
}

std::vector<double> neumann_images_apply(const std::vector<double>& v, double t,
                                         double tol) {
  const long m = static_cast<long>(v.size());
  if (m == 0 || t == 0.0) return v;
  const KernelEval g = kernel_eval(t, tol);
  std::vector<double> out(v.size(), 0.0);
  for (long i = 0; i < m; ++i) {
    double acc = 0.0;
    for (long n = -g.radius; n <= g.radius; ++n) {
      acc += g.values[static_cast<std::size_t>(n + g.radius)] *
             v[static_cast<std::size_t>(reflect_index(i - n, m))];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

WindowedField semigroup_apply(const WindowedField& field, double t, Boundary bc,
                              double tol) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("semigroup_apply: t must be >= 0");
  for (double x : field.values) {
    if (!std::isfinite(x)) throw DomainError("semigroup_apply: non-finite field value");
  }
  if (t == 0.0 || field.values.empty()) return field;

  if (bc == Boundary::neumann) {
    const long radius = truncation_radius(t, tol);
    WindowedField out{field.lo, {}};
    const auto m = static_cast<long>(field.values.size());
    if (radius <= 4 * m) {
      out.values = neumann_images_apply(field.values, t, tol);
    } else {
      out.values = NeumannFlow(field.values.size()).apply(field.values, t);
    }
    return out;
  }

  long s_lo = field.hi() + 1, s_hi = field.lo - 1;
  for (long j = field.lo; j <= field.hi(); ++j) {
    if (field.at(j) != 0.0) {
      s_lo = std::min(s_lo, j);
      s_hi = std::max(s_hi, j);
    }
  }
  if (s_lo > s_hi) return field;
  const KernelEval g = kernel_eval(t, tol);
  if (s_lo - g.radius < field.lo || s_hi + g.radius > field.hi()) {
    const auto need = static_cast<std::size_t>(s_hi - s_lo + 1 + 2 * g.radius);
    throw WindowTooSmall("semigroup_apply: window of " +
                             std::to_string(field.values.size()) +
                             " sites too small, need " + std::to_string(need),
                         need);
  }
  WindowedField out{field.lo, std::vector<double>(field.values.size(), 0.0)};
  for (long j = s_lo - g.radius; j <= s_hi + g.radius; ++j) {
    double acc = 0.0;
    const long n_lo = std::max(s_lo, j - g.radius);
    const long n_hi = std::min(s_hi, j + g.radius);
    for (long n = n_lo; n <= n_hi; ++n) acc += g.at(j - n) * field.at(n);
    out.values[static_cast<std::size_t>(j - field.lo)] = acc;
  }
  return out;
}

struct NeumannFlow::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

NeumannFlow::NeumannFlow(std::size_t m) : m_(m), lambda_(m), plans_(new Plans) {
  if (m == 0) throw DomainError("NeumannFlow: empty lattice");
  for (std::size_t k = 0; k < m; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k) /
                              (2.0 * static_cast<double>(m)));
    lambda_[k] = -4.0 * s * s;
  }
  std::vector<double> a(m), b(m);
  const int n = static_cast<int>(m);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT10, flags);
  plans_->inverse = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT01, flags);
}

NeumannFlow::~NeumannFlow() = default;
NeumannFlow::NeumannFlow(NeumannFlow&&) noexcept = default;
NeumannFlow& NeumannFlow::operator=(NeumannFlow&&) noexcept = default;

std::vector<double> NeumannFlow::forward(const std::vector<double>& v) const {
  if (v.size() != m_) throw DomainError("NeumannFlow: size mismatch");
  std::vector<double> in(v), out(m_);
  fftw_execute_r2r(plans_->forward, in.data(), out.data());
  return out;
}

std::vector<double> NeumannFlow::inverse(const std::vector<double>& coeffs) const {
  if (coeffs.size() != m_) throw DomainError("NeumannFlow: size mismatch");
  std::vector<double> in(coeffs), out(m_);
  fftw_execute_r2r(plans_->inverse, in.data(), out.data());
  const double scale = 1.0 / (2.0 * static_cast<double>(m_));
  for (double& x : out) x *= scale;
  return out;
}

void NeumannFlow::propagate(std::vector<double>& coeffs, double t) const {
  for (std::size_t k = 1; k < m_; ++k) coeffs[k] *= std::exp(lambda_[k] * t);
}

std::vector<double> NeumannFlow::apply(const std::vector<double>& v, double t) const {
  if (t == 0.0) return v;
  auto c = forward(v);
  propagate(c, t);
  return inverse(c);
}

std::vector<double> NeumannFlow::basis_row(std::size_t i) const {
  std::vector<double> row(m_);
  const double base = std::numbers::pi * (static_cast<double>(i) + 0.5) /
                      static_cast<double>(m_);
  for (std::size_t k = 0; k < m_; ++k) row[k] = std::cos(base * static_cast<double>(k));
  return row;
}

double NeumannFlow::value_at(const std::vector<double>& coeffs, std::size_t i,
                             double t) const {
  const auto row = basis_row(i);
  double acc = 0.0;
  for (std::size_t k = m_; k-- > 1;) acc += coeffs[k] * std::exp(lambda_[k] * t) * row[k];
  return (coeffs[0] + 2.0 * acc) / (2.0 * static_cast<double>(m_));
}

double NeumannFlow::laplacian_at(const std::vector<double>& coeffs, std::size_t i,
                                 double t) const {
  const auto row = basis_row(i);
  double acc = 0.0;
  for (std::size_t k = m_; k-- > 1;) {
    acc += coeffs[k] * lambda_[k] * std::exp(lambda_[k] * t) * row[k];
  }
  return acc / static_cast<double>(m_);
}

DecayReport kernel_decay_constants() {
  DecayReport rep;
  std::vector<double> times{0.0};
  for (int i = 0; i <= 60; ++i) times.push_back(std::pow(10.0, -2.0 + 6.0 * i / 60.0));
  std::vector<double> lx, ly_sup, ly_grad;
  double prev_sup = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const KernelEval g = kernel_eval(t, 1e-14);
    const long r = g.radius;
    double mass = 0.0, grad2 = 0.0, rate_max = 0.0;
    for (long j = -r; j <= r; ++j) {
      mass += g.at(j);
      grad2 += (g.at(j + 1) - g.at(j)) * (g.at(j + 1) - g.at(j));
      rate_max = std::max(rate_max, std::abs(g.at(j + 1) + g.at(j - 1) - 2.0 * g.at(j)));
    }
    const double sup = g.at(0);
    const double rate0 = -2.0 * (g.at(1) - g.at(0));
    rep.max_mass_error = std::max(rep.max_mass_error, std::abs(mass + g.tail_bound - 1.0));
    rep.c_sup = std::max(rep.c_sup, sup * std::sqrt(1.0 + t));
    rep.c_grad_l2 = std::max(rep.c_grad_l2, grad2 * std::pow(1.0 + t, 1.5));
    if (rate0 > 0.0) rep.max_rate_ratio = std::max(rep.max_rate_ratio, rate_max / rate0);
    if (t >= 1.0) {
      const double scaled = sup * std::sqrt(1.0 + t);
      if (scaled > prev_sup * (1.0 + 1e-12)) rep.sup_trend_nonincreasing = false;
      prev_sup = scaled;
      lx.push_back(std::log(1.0 + t));
      ly_sup.push_back(std::log(sup));
      ly_grad.push_back(std::log(grad2));
    }
  }
  std::tie(rep.slope_sup, rep.fit_residual_sup) = fit_line(lx, ly_sup);
  std::tie(rep.slope_grad_l2, rep.fit_residual_grad_l2) = fit_line(lx, ly_grad);
  return rep;
}

}  // namespace splx
