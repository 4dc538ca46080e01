#include "fracsim/nussbaum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fracsim/fracnum.hpp"
#include "fracsim/kernels.hpp"

namespace fracsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phase_factor(NussbaumPhase phase, double delta) {
  // sin(pi delta / 2) resp. cos(pi delta / 2), exact on the integer lattice
  return phase == NussbaumPhase::sin ? sinpi(0.5 * delta) : cospi(0.5 * delta);
}

// Recursive adaptive Simpson refinement.
double adaptive_simpson(NussbaumKind kind, double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = nussbaum(kind, lm), frm = nussbaum(kind, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps || (b - a) < 1e-12)
    return left + right + delta / 15.0;
  if (depth > 40)
    throw NumericError("nussbaum_integral: adaptive quadrature did not converge",
                       left + right, std::abs(delta));
  return adaptive_simpson(kind, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         adaptive_simpson(kind, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

}  // namespace

double nussbaum(NussbaumKind kind, double delta) {
  if (!std::isfinite(delta)) throw std::domain_error("nussbaum: non-finite argument");
  if (kind.growth == NussbaumGrowth::exponential) {
    const double d2 = delta * delta;
    if (d2 > 709.0) {
      const double sign = phase_factor(kind.phase, delta) >= 0.0 ? 1.0 : -1.0;
      throw NumericError("nussbaum: exponential kind overflows double range at |delta| = " +
                             std::to_string(std::abs(delta)),
                         sign * std::numeric_limits<double>::max(), kInf);
    }
    return std::exp(d2) * phase_factor(kind.phase, delta);
  }
  return delta * delta * phase_factor(kind.phase, delta);
}

double nussbaum_integral(NussbaumKind kind, double d0, double d1) {
  if (!(d0 <= d1)) throw std::invalid_argument("nussbaum_integral: requires d0 <= d1");
  if (d0 == d1) return 0.0;
  const double fa = nussbaum(kind, d0), fb = nussbaum(kind, d1);
  const double m = 0.5 * (d0 + d1);
  const double fm = nussbaum(kind, m);
  const double whole = (d1 - d0) / 6.0 * (fa + 4.0 * fm + fb);
  // Two-stage tolerance: a coarse pass sizes the integral, the final pass
  // targets 1e-9 relative to that size (comfortably under the 1e-8 contract).
  const double coarse = adaptive_simpson(kind, d0, d1, fa, fm, fb, whole,
                                         1e-6 * std::max(1.0, std::abs(whole)), 0);
  const double eps = 1e-9 * std::max(1.0, std::abs(coarse));
  return adaptive_simpson(kind, d0, d1, fa, fm, fb, whole, eps, 0);
}

NussbaumWitnesses check_nussbaum_property(NussbaumKind kind, double threshold,
                                          double search_limit) {
  if (!(threshold >= 0.0))
    throw std::invalid_argument("check_nussbaum_property: threshold must be >= 0");
  NussbaumWitnesses w;
  const double h = 1.0 / 1024.0;
  double running = 0.0;
  double a = 0.0;
  double fa = nussbaum(kind, 0.0);
  while (a < search_limit && !(w.sup_found && w.inf_found)) {
    const double b = std::min(a + h, search_limit);
    const double fb = nussbaum(kind, b);
    const double fm = nussbaum(kind, 0.5 * (a + b));
    running += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if (!w.sup_found && running > threshold) {
      w.sup_found = true;
      w.sup_witness = b;
    }
    if (!w.inf_found && running < -threshold) {
      w.inf_found = true;
      w.inf_witness = b;
    }
    a = b;
    fa = fb;
  }
  return w;
}

void BoundReport::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("BoundReport::write_csv: cannot open " + path);
  std::fputs("t,V,rhs,slack\n", f);
  for (std::size_t i = 0; i < t.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", t[i], v_traj[i], rhs_traj[i], slack[i]);
  if (std::fclose(f) != 0) throw std::runtime_error("BoundReport::write_csv: write failed");
}

BoundReport theorem1_bound(double alpha, double lambda, double zeta, double v0,
                           const std::vector<std::vector<double>>& g,
                           const std::vector<std::vector<double>>& delta, NussbaumKind kind,
                           double dt, std::span<const double> v_traj) {
  FracOrder ord(alpha);
  if (!(lambda > 0.0) || !(zeta > 0.0))
    throw std::domain_error("theorem1_bound: lambda and zeta must be > 0");
  if (!(dt > 0.0)) throw std::domain_error("theorem1_bound: dt must be > 0");
  if (g.size() != delta.size())
    throw std::invalid_argument("theorem1_bound: gain/delta channel count mismatch");
  const std::size_t len = v_traj.size();
  if (len < 2) throw std::invalid_argument("theorem1_bound: need at least two samples");
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g[c].size() != len || delta[c].size() != len)
      throw std::invalid_argument("theorem1_bound: trajectory grids do not match");

  const std::size_t n_cells = len - 1;

  // Nussbaum flux f(t) = sum_c (g_c N(delta_c) + 1) * ddelta_c/dt, with the
  // delta rate reconstructed by central differences (one-sided at the ends).
  std::vector<double> f(len, 0.0);
  double fd_scale = 0.0;  // accumulated finite-difference error transfer
  for (std::size_t c = 0; c < g.size(); ++c) {
    const std::vector<double>& d = delta[c];
    double max_w = 0.0;   // max |g N(delta) + 1| on the channel
    double max_d3 = 0.0;  // max third difference of delta (ddot error scale)
    for (std::size_t k = 0; k < len; ++k) {
      double ddot;
      if (k == 0)
        ddot = (d[1] - d[0]) / dt;
      else if (k == len - 1)
        ddot = (d[k] - d[k - 1]) / dt;
      else
        ddot = (d[k + 1] - d[k - 1]) / (2.0 * dt);
      const double weight = g[c][k] * nussbaum(kind, d[k]) + 1.0;
      f[k] += weight * ddot;
      max_w = std::max(max_w, std::abs(weight));
      if (k + 3 < len)
        max_d3 = std::max(max_d3,
                          std::abs(d[k + 3] - 3.0 * d[k + 2] + 3.0 * d[k + 1] - d[k]));
    }
    // |ddot error| ~ max|delta'''| dt^2 / 6 = max_d3 / (6 dt); the convolution
    // kernel has unit-bounded mass 1/lambda.
    fd_scale += max_w * max_d3 / (6.0 * dt) / lambda;
  }

  // Exact kernel cell masses dF[m] = F((m+1)dt) - F(m dt).
  std::vector<double> dF(n_cells);
  double f_prev = 0.0;
  for (std::size_t m = 0; m < n_cells; ++m) {
    const double f_next = ml_kernel_primitive(alpha, lambda, static_cast<double>(m + 1) * dt);
    dF[m] = f_next - f_prev;
    f_prev = f_next;
  }
  // Reversed copy so every convolution prefix is a contiguous dot product.
  std::vector<double> dF_rev(n_cells);
  for (std::size_t m = 0; m < n_cells; ++m) dF_rev[n_cells - 1 - m] = dF[m];

  const double sigma = lemma3_sigma(alpha, alpha);
  const double h_const = zeta * sigma / lambda;

  BoundReport rep;
  rep.sigma = sigma;
  rep.t.resize(len);
  rep.v_traj.assign(v_traj.begin(), v_traj.end());
  rep.rhs_traj.resize(len);
  rep.slack.resize(len);

  double tv_f = 0.0;
  for (std::size_t k = 0; k + 1 < len; ++k) tv_f += std::abs(f[k + 1] - f[k]);

  for (std::size_t n = 0; n < len; ++n) {
    rep.t[n] = static_cast<double>(n) * dt;
    const double e1 =
        (n == 0) ? 1.0
                 : mittag_leffler({alpha, 1.0}, -lambda * std::pow(rep.t[n], alpha));
    double conv = 0.0;
    if (n > 0) conv = kern::dot(f.data(), dF_rev.data() + (n_cells - n), n);
    rep.rhs_traj[n] = conv + e1 * v0 + h_const;
    rep.slack[n] = rep.rhs_traj[n] - v_traj[n];
  }
  rep.max_violation = -*std::min_element(rep.slack.begin(), rep.slack.end());

  // Quadrature part: piecewise-constant sampling error <= TV(f) * max cell
  // mass; finite-difference part accumulated per channel above.
  const double quad_scale = tv_f * (n_cells ? dF[0] : 0.0);
  double max_abs_h = std::abs(v0) + h_const;
  rep.tolerance = quad_scale + fd_scale + 1e-12 * max_abs_h;
  return rep;
}

}  // namespace fracsim
