#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace splx {

/// e^{-x} I_n(x) for n = 0..n_max (modified Bessel functions of the first
/// kind).  Downward Miller recurrence normalised by sum_n e^{-x} I_n(x) = 1.
std::vector<double> scaled_bessel_row(std::size_t n_max, double x);

/// Lattice heat kernel g_j(t) = e^{-2t} I_|j|(2t), the solution of
/// dg/dt = Delta g on Z with g(0) = delta_0.
double heat_kernel(long j, double t);

/// ceil(2 sqrt(t ln(1/tol))) + 10.
long truncation_radius(double t, double tol);

struct KernelEval {
  double t = 0.0;
  long radius = 0;
  std::vector<double> values;  // values[j + radius] = g_j(t)
  double tail_bound = 0.0;     // mass outside |j| <= radius

  double at(long j) const;
};

KernelEval kernel_eval(double t, double tol = 1e-10);

/// Field on the contiguous index window [lo, lo + values.size()).
struct WindowedField {
  long lo = 0;
  std::vector<double> values;

  long hi() const { return lo + static_cast<long>(values.size()) - 1; }
  double at(long j) const;
};

enum class Boundary {
  free,     // field on Z, zero outside the window
  neumann,  // reflecting ends just outside lo and hi
};

/// Heat semigroup S(t) applied to the field.  In free mode the window must
/// contain the support plus the truncation radius; otherwise WindowTooSmall
/// carries the window length that would suffice.
WindowedField semigroup_apply(const WindowedField& field, double t,
                              Boundary bc = Boundary::free,
                              double tol = 1e-10);

/// Neumann flow on M sites by the method of images with the Bessel kernel.
std::vector<double> neumann_images_apply(const std::vector<double>& v, double t,
                                         double tol = 1e-10);

/// Exact heat flow on M sites with reflecting ends, diagonalised by the
/// cosine transform.  Coefficients use the unnormalised DCT-II convention
/// c_m = 2 sum_i v_i cos(pi m (i + 1/2) / M).
class NeumannFlow {
 public:
  explicit NeumannFlow(std::size_t m);
  ~NeumannFlow();
  NeumannFlow(const NeumannFlow&) = delete;
  NeumannFlow& operator=(const NeumannFlow&) = delete;
  NeumannFlow(NeumannFlow&&) noexcept;
  NeumannFlow& operator=(NeumannFlow&&) noexcept;

  std::size_t size() const { return m_; }
  /// lambda_m = -4 sin^2(pi m / 2M), eigenvalues of the Neumann Laplacian.
  const std::vector<double>& eigenvalues() const { return lambda_; }

  std::vector<double> forward(const std::vector<double>& v) const;
  std::vector<double> inverse(const std::vector<double>& coeffs) const;

  /// coeffs <- e^{lambda t} coeffs
  void propagate(std::vector<double>& coeffs, double t) const;
  std::vector<double> apply(const std::vector<double>& v, double t) const;

  /// Single-site evaluation of S(t) and Delta S(t) from coefficients.
  double value_at(const std::vector<double>& coeffs, std::size_t i,
                  double t) const;
  double laplacian_at(const std::vector<double>& coeffs, std::size_t i,
                      double t) const;

  /// cos(pi m (i + 1/2) / M) for all m.
  std::vector<double> basis_row(std::size_t i) const;

 private:
  struct Plans;
  std::size_t m_;
  std::vector<double> lambda_;
  std::unique_ptr<Plans> plans_;
};

struct DecayReport {
  double c_sup = 0.0;             // max_t sup_j g_j(t) (1+t)^{1/2}
  double c_grad_l2 = 0.0;         // max_t sum_j (g_{j+1}-g_j)^2 (1+t)^{3/2}
  double max_rate_ratio = 0.0;    // max_t ||dg/dt||_inf / (-dg_0/dt), <= 1
  double slope_sup = 0.0;         // fitted exponent for t >= 1, about -1/2
  double slope_grad_l2 = 0.0;     // fitted exponent for t >= 1, about -3/2
  double fit_residual_sup = 0.0;  // rms residual of the log-log fits
  double fit_residual_grad_l2 = 0.0;
  double max_mass_error = 0.0;
  bool sup_trend_nonincreasing = true;  // g_0(t) (1+t)^{1/2} on t >= 1
};

/// Empirical constants of the kernel decay laws on t in [0, 1e4].
DecayReport kernel_decay_constants();

}  // namespace splx
