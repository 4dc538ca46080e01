#pragma once
// Fractional-calculus numerics: Gamma helpers, Mittag–Leffler evaluation,
// Grünwald–Letnikov / product-integration time stepping, and weakly-singular
// convolution quadrature.
//
// Conventions used throughout:
//   * Derivatives are Caputo-type with order alpha in (0, 1]; the derivative
//     of a constant is zero, so steppers integrate x - x0.
//   * E_{a,b}(nu) = sum_{k>=0} nu^k / Gamma(a k + b).
//   * The decay kernel is K(t) = t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha),
//     whose exact antiderivative is F(u) = u^alpha E_{alpha,alpha+1}(-lambda u^alpha).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsim {

// Raised when an iterative numeric routine cannot reach its accuracy target.
// Carries the best value computed so far and an estimate of its error.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial, double bound)
      : std::runtime_error(what), partial_value(partial), error_bound(bound) {}
  double partial_value;
  double error_bound;
};

// Differentiation order; validates (0, 1].  alpha == 1 is allowed so
// integer-order regressions run through the same code paths.
struct FracOrder {
  double alpha;
  explicit FracOrder(double a) : alpha(a) {
    if (!(a > 0.0) || !(a <= 1.0))
      throw std::domain_error("FracOrder: alpha must lie in (0, 1]");
  }
};

struct MLParams {
  double a;
  double b;
};

// sin(pi x) and cos(pi x) with exact argument reduction: exact zeros at the
// integer (resp. half-integer) lattice, accurate for large |x|.
double sinpi(double x);
double cospi(double x);

// Gamma(x).  Throws std::domain_error at the poles x = 0, -1, -2, ...
double gamma_fn(double x);

// 1 / Gamma(x), finite for every real x (exactly zero at the poles).
double rgamma(double x);

// Grünwald–Letnikov weights w_0..w_n:  w_0 = 1, w_k = w_{k-1} (1 - (alpha+1)/k).
std::vector<double> gl_weights(double alpha, std::size_t n);

// Product-rectangle weights B_0..B_n for the Volterra form of D^alpha x = f:
//   B_m = dt^alpha ((m+1)^alpha - m^alpha) / Gamma(alpha + 1).
std::vector<double> pi_weights(double alpha, double dt, std::size_t n);

// Two-parameter Mittag–Leffler function at a real argument.  Covers
// a in (0, 2]; absolute accuracy target 1e-10 for nu in [-1e6, ~40].
// Representation (power series in double or quad precision, or the
// negative-axis asymptotic expansion) is chosen by a-priori error estimates.
double mittag_leffler(MLParams p, double nu);

// t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha); t must be > 0.
double ml_kernel(double alpha, double lambda, double t);

// F(u) = u^alpha E_{alpha,alpha+1}(-lambda u^alpha):
// the exact integral of ml_kernel over [0, u]; F(0) = 0.
double ml_kernel_primitive(double alpha, double lambda, double u);

// Caputo derivative of sin(omega t), closed form:
//   omega t^{1-alpha} E_{2,2-alpha}(-omega^2 t^2);   0 at t = 0.
double caputo_deriv_sin(double alpha, double omega, double t);

// Fitted envelope constant for the decay bound |E_{a,b}(nu)| <= sigma/(1+|nu|)
// on nu in [-100, 0]: the maximum of |E| (1+|nu|) over a dense grid plus a 2%
// safety margin.  Requires a in (0, 2) exclusive.
double lemma3_sigma(double a, double b);

// Uniform-grid sample store for one fractionally-integrated state.
struct MemoryBuffer {
  double x0;
  double dt;
  std::vector<double> samples;  // samples[0] == x0
  MemoryBuffer(double x0_, double dt_) : x0(x0_), dt(dt_), samples{x0_} {
    if (!(dt_ > 0.0)) throw std::domain_error("MemoryBuffer: dt must be > 0");
  }
};

// One explicit Grünwald–Letnikov step for D^alpha x = rhs:
//   x_{n+1} = -sum_{k=1}^{n+1} w_k (x_{n+1-k} - x0) + dt^alpha rhs + x0.
// Appends x_{n+1} to buf and returns it.  At alpha = 1 this is forward Euler.
double frac_step(double alpha, MemoryBuffer& buf, double rhs_value, double dt);

struct ConvResult {
  double value;
  double err_est;  // bound-style estimate from per-cell variation of v
};

// integral_0^t v(s) (t-s)^{alpha-1} E_{alpha,alpha}(-lambda (t-s)^alpha) ds
// with t = (values.size()-1) * dt.  v is treated as piecewise constant per
// cell (left sample); the singular kernel factor is integrated exactly per
// cell via ml_kernel_primitive.
ConvResult singular_convolve(double alpha, double lambda, std::span<const double> values,
                             double dt);

}  // namespace fracsim
