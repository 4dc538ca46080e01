#include "fracsim/fracnum.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double sinpi(double x) {
  double r = x - std::round(x);  // r in [-0.5, 0.5]
  double s = std::sin(kPi * r);
  long long k = static_cast<long long>(std::llround(x - r));
  return (k % 2 == 0) ? s : -s;
}

double cospi(double x) { return sinpi(0.5 - x); }

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x))
    throw std::domain_error("gamma_fn: pole at non-positive integer argument");
  return std::tgamma(x);
}

double rgamma(double x) {
  if (x >= 0.5) return 1.0 / std::tgamma(x);
  if (x <= 0.0 && x == std::floor(x)) return 0.0;  // exact zero at the poles
  // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
  return sinpi(x) * std::tgamma(1.0 - x) / kPi;
}

std::vector<double> gl_weights(double alpha, std::size_t n) {
  std::vector<double> w(n + 1);
  w[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k)
    w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(k));
  return w;
}

std::vector<double> pi_weights(double alpha, double dt, std::size_t n) {
  if (!(dt > 0.0)) throw std::domain_error("pi_weights: dt must be > 0");
  std::vector<double> B(n + 1);
  const double scale = std::pow(dt, alpha) * rgamma(alpha + 1.0);
  for (std::size_t m = 0; m <= n; ++m) {
    double dm = static_cast<double>(m);
    B[m] = scale * (std::pow(dm + 1.0, alpha) - std::pow(dm, alpha));
  }
  return B;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler evaluation
// ---------------------------------------------------------------------------
namespace {

struct MlEval {
  double value;
  double err;  // absolute error estimate
};

// Power series in plain double precision.  Reliable while the cancellation
// scale exp(a |nu|^{1/a}) stays small (caller gates on that).
MlEval ml_series_double(double a, double b, double nu) {
  double sum = rgamma(b);
  double max_mag = std::abs(sum);
  const double lnu = std::log(std::abs(nu));
  double last_mag = std::abs(sum);
  double prev_mag = kInf;
  bool past_peak = false;
  int small_in_a_row = 0;
  int k = 1;
  for (; k <= 500; ++k) {
    const double g = a * k + b;
    double term;
    if (g >= 0.5) {
      double e = k * lnu - std::lgamma(g);
      if (e > 700.0)
        throw NumericError("mittag_leffler: series overflow", sum, std::abs(sum));
      term = std::exp(e);
      if (nu < 0.0 && (k & 1)) term = -term;
    } else {
      term = std::pow(nu, k) * rgamma(g);
    }
    sum += term;
    const double mag = std::abs(term);
    last_mag = mag;
    max_mag = std::max(max_mag, std::max(mag, std::abs(sum)));
    if (mag < prev_mag) past_peak = true;
    if (past_peak && mag <= 1e-17 * std::max(1.0, std::abs(sum))) {
      if (++small_in_a_row >= 2) break;
    } else {
      small_in_a_row = 0;
    }
    prev_mag = mag;
  }
  const double tail = (k > 500) ? max_mag : 2.0 * last_mag;
  return {sum, max_mag * 1.2e-16 * (k + 2) + tail};
}

// Power series accumulated in __float128 (epsilon ~ 1.9e-34): survives the
// alternating-series cancellation out to a |nu|^{1/a} of roughly 55.
MlEval ml_series_quad(double a, double b, double nu) {
  const __float128 qa = a, qb = b;
  __float128 sum = __float128(1.0) / tgammaq(qb);
  __float128 max_mag = fabsq(sum);
  const __float128 lnu = logq(fabsq(__float128(nu)));
  __float128 prev_mag = HUGE_VALQ;
  __float128 last_mag = fabsq(sum);
  bool past_peak = false;
  int small_in_a_row = 0;
  int k = 1;
  for (; k <= 2000; ++k) {
    const __float128 g = qa * k + qb;
    __float128 term = expq(k * lnu - lgammaq(g));
    if (nu < 0.0 && (k & 1)) term = -term;
    sum += term;
    const __float128 mag = fabsq(term);
    last_mag = mag;
    if (mag > max_mag) max_mag = mag;
    if (fabsq(sum) > max_mag) max_mag = fabsq(sum);
    if (mag < prev_mag) past_peak = true;
    if (past_peak &&
        mag <= __float128(1e-36) * (fabsq(sum) > __float128(1.0) ? fabsq(sum) : __float128(1.0))) {
      if (++small_in_a_row >= 2) break;
    } else {
      small_in_a_row = 0;
    }
    prev_mag = mag;
  }
  const double value = static_cast<double>(sum);
  const double tail = (k > 2000) ? static_cast<double>(max_mag) : 2.0 * static_cast<double>(last_mag);
  return {value, static_cast<double>(max_mag) * 2.0e-34 * (k + 2) + tail +
                     std::abs(value) * 1.2e-16};
}

// Truncated algebraic expansion -sum_{k>=1} nu^{-k} / Gamma(b - a k) on the
// negative axis.  Truncation point chosen on the smooth magnitude envelope
// r^{-k} Gamma(1 + a k - b) / pi (the |sin| reflection factor oscillates, so
// raw term magnitudes are not monotone).  trunc is the envelope at the break.
struct AsymAlg {
  double sum;
  double trunc;
};

AsymAlg asym_algebraic(double a, double b, double nu) {
  const double r = -nu;
  const double lr = std::log(r);
  double sum = 0.0;
  double env_min = kInf;
  double trunc = kInf;
  for (int k = 1; k <= 400; ++k) {
    const double g = b - a * k;
    double env, term;
    if (g >= 0.5) {
      const double rg = 1.0 / std::tgamma(g);
      env = std::exp(-k * lr) * std::abs(rg);
      term = -std::exp(-k * lr) * rg;
    } else {
      env = std::exp(-k * lr + std::lgamma(1.0 + a * k - b)) / kPi;
      term = -std::exp(-k * lr) * (sinpi(g) * std::tgamma(1.0 - g) / kPi);
    }
    if (k & 1) term = -term;  // nu^{-k} = (-1)^k r^{-k}
    if (env > env_min) {      // past the envelope minimum: stop before this term
      trunc = env_min;
      break;
    }
    sum += term;
    env_min = env;
    if (env < 1e-18 * std::max(1.0, std::abs(sum))) {
      trunc = env;
      break;
    }
  }
  if (!std::isfinite(trunc)) trunc = env_min;
  return {sum, trunc};
}

// Negative-axis asymptotics: algebraic expansion plus, for a in (1,2], the
// conjugate saddle pair
//   (2/a) r^{(1-b)/a} exp(r^{1/a} cos(pi/a)) cos(r^{1/a} sin(pi/a) + (1-b) pi/a);
// a == 1 sits on the Stokes line where the single real term
//   exp(-r) r^{1-b} cos((1-b) pi)
// contributes; for a < 1 no exponential term exists on this ray.
MlEval ml_asym_neg(double a, double b, double nu) {
  const AsymAlg alg = asym_algebraic(a, b, nu);
  const double r = -nu;
  const double r1a = std::pow(r, 1.0 / a);
  double exp_term = 0.0, exp_err = 0.0;
  if (a > 1.0) {
    const double amp =
        (2.0 / a) * std::pow(r, (1.0 - b) / a) * std::exp(r1a * std::cos(kPi / a));
    exp_term = amp * std::cos(r1a * std::sin(kPi / a) + (1.0 - b) * kPi / a);
    exp_err = std::abs(amp) * (r1a * 1.2e-16 + 1e-15);
  } else if (a == 1.0) {
    exp_term = std::exp(-r) * std::pow(r, 1.0 - b) * std::cos((1.0 - b) * kPi);
    exp_err = std::abs(exp_term) * 1e-14;
  }
  return {alg.sum + exp_term, alg.trunc + exp_err + std::abs(alg.sum) * 1e-15};
}

// A-priori error scale of the quad-precision series.
double quad_series_est(double a, double nu) {
  const double s = (nu < 0.0) ? a * std::pow(-nu, 1.0 / a) : 0.0;
  if (s > 690.0) return kInf;
  return 2.0e-34 * 100.0 * std::exp(s);
}

// A-priori error scale of the asymptotic branch.
double asym_est(double a, double b, double nu) {
  if (!(-nu > 1.0)) return kInf;
  return asym_algebraic(a, b, nu).trunc;
}

}  // namespace

double mittag_leffler(MLParams p, double nu) {
  if (!(p.a > 0.0) || !(p.a <= 2.0))
    throw std::domain_error("mittag_leffler: a must lie in (0, 2]");
  if (!std::isfinite(p.b) || !std::isfinite(nu))
    throw std::domain_error("mittag_leffler: non-finite parameter");
  if (nu == 0.0) return rgamma(p.b);
  if (p.a == 1.0 && p.b == 1.0) return std::exp(nu);  // closed form

  if (nu > 0.0) {
    MlEval e = ml_series_double(p.a, p.b, nu);
    if (e.err > 1e-9 * std::max(1.0, std::abs(e.value)))
      throw NumericError("mittag_leffler: positive-argument series inaccurate", e.value, e.err);
    return e.value;
  }

  // negative argument: pick the representation with the smaller a-priori error
  const double s_cancel = p.a * std::pow(-nu, 1.0 / p.a);
  if (s_cancel <= 7.5) return ml_series_double(p.a, p.b, nu).value;

  const double est_q = quad_series_est(p.a, nu);
  const double est_a = asym_est(p.a, p.b, nu);
  MlEval e = (est_a < est_q) ? ml_asym_neg(p.a, p.b, nu) : ml_series_quad(p.a, p.b, nu);
  if (e.err > 1e-9) {
    MlEval other = (est_a < est_q) ? ml_series_quad(p.a, p.b, nu) : ml_asym_neg(p.a, p.b, nu);
    if (other.err < e.err) e = other;
    if (e.err > 1e-9)
      throw NumericError("mittag_leffler: no representation reaches target accuracy", e.value,
                         e.err);
  }
  return e.value;
}

double ml_kernel(double alpha, double lambda, double t) {
  FracOrder ord(alpha);
  if (!(t > 0.0)) throw std::domain_error("ml_kernel: t must be > 0");
  if (lambda < 0.0) throw std::domain_error("ml_kernel: lambda must be >= 0");
  return std::pow(t, alpha - 1.0) * mittag_leffler({alpha, alpha}, -lambda * std::pow(t, alpha));
}

double ml_kernel_primitive(double alpha, double lambda, double u) {
  FracOrder ord(alpha);
  if (u < 0.0) throw std::domain_error("ml_kernel_primitive: u must be >= 0");
  if (u == 0.0) return 0.0;
  return std::pow(u, alpha) * mittag_leffler({alpha, alpha + 1.0}, -lambda * std::pow(u, alpha));
}

double caputo_deriv_sin(double alpha, double omega, double t) {
  FracOrder ord(alpha);
  if (t == 0.0 || omega == 0.0) return 0.0;
  const double w2t2 = omega * omega * t * t;
  return omega * std::pow(t, 1.0 - alpha) * mittag_leffler({2.0, 2.0 - alpha}, -w2t2);
}

double lemma3_sigma(double a, double b) {
  if (!(a > 0.0) || !(a < 2.0))
    throw std::domain_error("lemma3_sigma: a must lie in (0, 2) exclusive");
  double sigma = 0.0;
  constexpr int kPoints = 201;
  for (int i = 0; i < kPoints; ++i) {
    const double nu = -100.0 * i / (kPoints - 1);
    const double e = std::abs(mittag_leffler({a, b}, nu));
    sigma = std::max(sigma, e * (1.0 + std::abs(nu)));
  }
  return sigma * 1.02;
}

// ---------------------------------------------------------------------------
// Time stepping and convolution
// ---------------------------------------------------------------------------

double frac_step(double alpha, MemoryBuffer& buf, double rhs_value, double dt) {
  FracOrder ord(alpha);
  if (std::abs(dt - buf.dt) > 1e-12 * std::max(dt, buf.dt))
    throw std::invalid_argument("frac_step: dt does not match the buffer grid");
  const std::size_t n = buf.samples.size() - 1;
  const std::vector<double> w = gl_weights(alpha, n + 1);
  double sum = 0.0;
  for (std::size_t k = 1; k <= n + 1; ++k) sum += w[k] * (buf.samples[n + 1 - k] - buf.x0);
  const double next = -sum + std::pow(dt, alpha) * rhs_value + buf.x0;
  buf.samples.push_back(next);
  return next;
}

ConvResult singular_convolve(double alpha, double lambda, std::span<const double> values,
                             double dt) {
  FracOrder ord(alpha);
  if (values.empty()) throw std::domain_error("singular_convolve: empty sample sequence");
  if (!(dt > 0.0)) throw std::domain_error("singular_convolve: dt must be > 0");
  if (lambda < 0.0) throw std::domain_error("singular_convolve: lambda must be >= 0");
  const std::size_t m = values.size() - 1;  // number of cells
  if (m == 0) return {0.0, 0.0};
  // Exact kernel mass over a cell at lag index j: dF_j = F((j+1) dt) - F(j dt).
  std::vector<double> dF(m);
  double f_prev = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double f_next = ml_kernel_primitive(alpha, lambda, static_cast<double>(j + 1) * dt);
    dF[j] = f_next - f_prev;
    f_prev = f_next;
  }
  // Cell k spans [k dt, (k+1) dt) carrying sample v_k; its lag index is m-1-k.
  double value = 0.0, err = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    value += values[k] * dF[m - 1 - k];
    err += std::abs(values[k + 1] - values[k]) * std::abs(dF[m - 1 - k]);
  }
  return {value, err};
}

}  // namespace fracsim
