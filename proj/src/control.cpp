#include "fracsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracsim/fracnum.hpp"
#include "fracsim/kernels.hpp"

namespace fracsim {

namespace {

constexpr double kSplitMargin = 1e-3;  // required clearance of c over 1/4

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

ControllerGains ControllerGains::from_cbar(std::span<const double> cbar, double varpi, double rho,
                                           double gamma1, double gamma2, double lambda_scale) {
  if (cbar.empty()) throw std::invalid_argument("from_cbar: empty gain list");
  ControllerGains g;
  g.varpi = varpi;
  g.gamma1 = gamma1;
  g.gamma2 = gamma2;
  const std::size_t n = cbar.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double cb = cbar[j];
    check_positive(cb, "combined gain");
    const bool last = (j + 1 == n);
    double c, k, l, b = 0.0;
    if (!last) {
      c = cb - 0.5;
      k = l = 0.25;
      if (!(c > 0.25 + kSplitMargin)) {
        c = 0.6 * cb;
        k = l = 0.2 * cb;
      }
    } else {
      b = std::min(0.25, cb / 4.0);
      c = cb - 0.5 - b;
      k = l = 0.25;
      if (!(c > 0.25 + kSplitMargin)) {
        c = 0.55 * cb;
        k = l = b = 0.15 * cb;
      }
      g.b = b;
    }
    if (!(c > 0.25)) {
      throw std::domain_error("from_cbar: combined gain too small to keep c > 1/4");
    }
    g.c.push_back(c);
    g.k.push_back(k);
    g.l.push_back(l);
    g.lambda_scale.push_back(lambda_scale);
    g.rho.push_back(rho);
  }
  g.validate(n);
  return g;
}

void ControllerGains::validate(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("controller gains: n must be >= 1");
  if (c.size() != n || k.size() != n || l.size() != n || lambda_scale.size() != n ||
      rho.size() != n) {
    throw std::invalid_argument("controller gains: per-step vectors must have length n");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(c[j] > 0.25) || !std::isfinite(c[j])) {
      throw std::domain_error("controller gains: every c_j must exceed 1/4");
    }
    check_positive(k[j], "k gain");
    check_positive(l[j], "l gain");
    check_positive(lambda_scale[j], "adaptation gain");
    check_positive(rho[j], "leakage rate");
  }
  check_positive(b, "disturbance gain b");
  check_positive(varpi, "smoothing constant");
  check_positive(gamma1, "gamma1");
  check_positive(gamma2, "gamma2");
}

double ControllerGains::cbar(std::size_t j, std::size_t n) const {
  const StepGains g = step(j, n);
  return g.c + g.k + g.l + g.b;
}

StepGains ControllerGains::step(std::size_t j, std::size_t n) const {
  if (j >= n || n > c.size()) throw std::out_of_range("gain step index");
  StepGains g{c[j], k[j], l[j], 0.0};
  if (j + 1 == n) g.b = b;
  return g;
}

double h_function(double z1, double varpi, double psi_sq_sum) {
  if (!(varpi > 0.0)) throw std::domain_error("h_function: varpi must be positive");
  return 2.0 * z1 / (z1 * z1 + varpi) * psi_sq_sum;
}

std::vector<double> coordinate_change(std::span<const double> x_i, double y_ri,
                                      std::span<const double> tau) {
  if (x_i.empty()) throw std::invalid_argument("coordinate_change: empty state");
  if (tau.size() + 1 < x_i.size()) {
    throw std::invalid_argument("coordinate_change: need n-1 virtual controls");
  }
  std::vector<double> z(x_i.size());
  z[0] = x_i[0] - y_ri;
  for (std::size_t j = 1; j < x_i.size(); ++j) z[j] = x_i[j] - tau[j - 1];
  return z;
}

VirtualControl step1_control(double z1, double fls_out, double mu_hat, double h,
                             double d_alpha_yr, const StepGains& g, NussbaumKind kind,
                             double delta1) {
  VirtualControl out;
  out.eta = (g.c + g.k + g.l) * z1 + fls_out + mu_hat * h - d_alpha_yr;
  out.tau = nussbaum(kind, delta1) * out.eta;
  out.delta_dot = z1 * out.eta;
  return out;
}

VirtualControl stepj_control(double zj, double fls_out, const StepGains& g, NussbaumKind kind,
                             double deltaj) {
  VirtualControl out;
  out.eta = (g.c + g.k + g.l) * zj + fls_out;
  out.tau = nussbaum(kind, deltaj) * out.eta;
  out.delta_dot = zj * out.eta;
  return out;
}

VirtualControl final_control(double zn, double fls_out, const StepGains& g, NussbaumKind kind,
                             double deltan) {
  VirtualControl out;
  out.eta = (g.c + g.k + g.l + g.b) * zn + fls_out;
  out.tau = nussbaum(kind, deltan) * out.eta;
  out.delta_dot = zn * out.eta;
  return out;
}

std::vector<double> theta_rate(const Eigen::MatrixXd& Lambda, std::span<const double> phi,
                               double z, double rho, std::span<const double> theta) {
  const auto r = static_cast<Eigen::Index>(phi.size());
  if (Lambda.rows() != r || Lambda.cols() != r || theta.size() != phi.size()) {
    throw std::invalid_argument("theta_rate: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> phi_v(phi.data(), r);
  Eigen::Map<const Eigen::VectorXd> theta_v(theta.data(), r);
  Eigen::VectorXd rate = Lambda * phi_v * z - rho * theta_v;
  return {rate.data(), rate.data() + rate.size()};
}

double mu_rate(double gamma1, double z1, double h, double gamma2, double mu_hat) {
  return gamma1 * z1 * h - gamma2 * mu_hat;
}

std::vector<MembershipGrid> default_regressor_grids(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_regressor_grids: n must be >= 1");
  const std::vector<double> state_centers{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::vector<double> aux_centers{-2.0, 0.0, 2.0};
  std::vector<MembershipGrid> grids;
  grids.reserve(n);
  grids.emplace_back(state_centers, 1.0, 1);
  for (std::size_t j = 2; j <= n; ++j) {
    std::vector<GridAxis> axes;
    for (std::size_t d = 0; d < j; ++d) axes.push_back({state_centers, 1.0});
    axes.push_back({aux_centers, 2.0});  // z_j
    axes.push_back({aux_centers, 2.0});  // tau_{j-1}
    grids.emplace_back(axes);
  }
  return grids;
}

AdaptiveState::AdaptiveState(const SubControllerSpec& spec, double dt_in,
                             std::size_t capacity_steps, std::size_t mem_trunc)
    : dt(dt_in), alpha(spec.alpha), memory_truncation(mem_trunc) {
  if (spec.n == 0 || spec.grids.size() != spec.n) {
    throw std::invalid_argument("adaptive state: need one regressor grid per step");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("adaptive state: dt must be positive");
  (void)FracOrder{alpha};  // validates alpha in (0, 1]
  spec.gains.validate(spec.n);
  std::size_t max_reg = 0;
  for (std::size_t j = 0; j < spec.n; ++j) {
    off.push_back(width);
    width += spec.grids[j].rules();
    max_reg = std::max(max_reg, spec.grids[j].input_dim());
  }
  const std::size_t phi_width = width;
  width += 1;  // mu_hat channel
  const std::size_t rows_cap = capacity_steps + 2;
  hist.assign(rows_cap * width, 0.0);
  rows = 1;  // row 0 = initial values (all zero)
  delta.assign(spec.n, 0.0);
  tau_prev.assign(spec.n, 0.0);
  glw.assign(1, 1.0);
  phi_scratch.assign(phi_width, 0.0);
  rate_scratch.assign(width, 0.0);
  sum_scratch.assign(width, 0.0);
  reg_scratch.assign(max_reg, 0.0);
}

std::span<const double> AdaptiveState::theta(std::size_t j) const {
  if (j >= off.size()) throw std::out_of_range("theta block index");
  return current().subspan(off[j], theta_size(j));
}

std::size_t AdaptiveState::theta_size(std::size_t j) const {
  const std::size_t end = (j + 1 < off.size()) ? off[j + 1] : width - 1;
  return end - off[j];
}

double AdaptiveState::theta_norm(std::size_t j) const {
  double s = 0.0;
  for (double v : theta(j)) s += v * v;
  return std::sqrt(s);
}

namespace {

// Appends one GL sample: new = dt^alpha * rate - sum_{k=1}^{m+1} w_k * x_{m+1-k}
// (zero initial values).  The history sum walks rows newest-coefficient-last
// in blocks of four so each sweep touches every channel column once.
void gl_advance(AdaptiveState& st, std::span<const double> rate) {
  const std::size_t m = st.rows - 1;
  const std::size_t w = st.width;
  if ((m + 2) * w > st.hist.size()) throw std::length_error("adaptive state capacity exceeded");
  while (st.glw.size() < m + 2) {
    const double kk = static_cast<double>(st.glw.size());
    st.glw.push_back(st.glw.back() * (1.0 - (st.alpha + 1.0) / kk));
  }
  std::size_t low = 0;
  if (st.memory_truncation != 0 && m + 1 > st.memory_truncation) {
    low = m + 1 - st.memory_truncation;
  }
  double* sum = st.sum_scratch.data();
  std::fill(sum, sum + w, 0.0);
  const double* hist = st.hist.data();
  const double* glw = st.glw.data();
  std::size_t r = low;
  for (; r + 4 <= m + 1; r += 4) {
    kern::axpy4(sum, hist + r * w, hist + (r + 1) * w, hist + (r + 2) * w, hist + (r + 3) * w,
                glw[m + 1 - r], glw[m - r], glw[m - 1 - r], glw[m - 2 - r], w);
  }
  for (; r <= m; ++r) kern::axpy(sum, hist + r * w, glw[m + 1 - r], w);
  const double scale = std::pow(st.dt, st.alpha);
  double* next = st.hist.data() + (m + 1) * w;
  for (std::size_t c = 0; c < w; ++c) next[c] = scale * rate[c] - sum[c];
  st.rows = m + 2;
}

}  // namespace

StepOutput controller_step(const SubControllerSpec& spec, AdaptiveState& st,
                           std::span<const double> x_i, std::span<const double> y_all,
                           std::size_t sub_index, double t, bool advance) {
  const std::size_t n = spec.n;
  if (x_i.size() != n) throw std::invalid_argument("controller_step: state length != n");
  if (sub_index >= y_all.size()) throw std::out_of_range("controller_step: subsystem index");
  const double y_i = y_all[sub_index];
  const double yr = spec.y_ref ? spec.y_ref(t) : 0.0;
  const double dyr =
      (spec.ref_omega != 0.0) ? caputo_deriv_sin(spec.alpha, spec.ref_omega, t) : 0.0;

  StepOutput out;
  out.z.resize(n);
  out.eta.resize(n);
  out.tau.resize(n);
  out.delta_dot.resize(n);
  out.theta_rates.resize(n);

  const std::span<const double> cur = st.current();
  const double mu = cur[st.width - 1];
  const double h = h_function(x_i[0] - yr, spec.gains.varpi, spec.psi_sq(y_i));

  for (std::size_t j = 0; j < n; ++j) {
    out.z[j] = (j == 0) ? x_i[0] - yr : x_i[j] - out.tau[j - 1];
    // Regressor: step 1 reads x1 alone; later steps read (x1..xj, z_j, tau_{j-1}).
    const MembershipGrid& grid = spec.grids[j];
    double* reg = st.reg_scratch.data();
    std::size_t dim;
    if (j == 0) {
      reg[0] = x_i[0];
      dim = 1;
    } else {
      for (std::size_t d = 0; d <= j; ++d) reg[d] = x_i[d];
      reg[j + 1] = out.z[j];
      reg[j + 2] = out.tau[j - 1];
      dim = j + 3;
    }
    if (dim != grid.input_dim()) {
      throw std::invalid_argument("controller_step: regressor grid dimension mismatch");
    }
    double* phi = st.phi_scratch.data() + st.off[j];
    const std::size_t rules = st.theta_size(j);
    basis_into(grid, {reg, dim}, {phi, rules});
    const double fls = kern::dot(cur.data() + st.off[j], phi, rules);

    StepGains g = spec.gains.step(j, n);
    VirtualControl vc;
    if (j == 0 && n == 1) {
      // Single-step subsystem: the tracking step is also the input step, so
      // fold b into the damping sum of the tracking form.
      g.l += g.b;
      g.b = 0.0;
      vc = step1_control(out.z[0], fls, mu, h, dyr, g, spec.kind, st.delta[0]);
    } else if (j == 0) {
      vc = step1_control(out.z[0], fls, mu, h, dyr, g, spec.kind, st.delta[0]);
    } else if (j + 1 == n) {
      vc = final_control(out.z[j], fls, g, spec.kind, st.delta[j]);
    } else {
      vc = stepj_control(out.z[j], fls, g, spec.kind, st.delta[j]);
    }
    out.eta[j] = vc.eta;
    out.tau[j] = vc.tau;
    out.delta_dot[j] = vc.delta_dot;

    // theta rate: Lambda phi z - rho theta (diagonal Lambda).
    const double lam = spec.gains.lambda_scale[j];
    const double rho = spec.gains.rho[j];
    auto& tr = out.theta_rates[j];
    tr.resize(rules);
    const double* th = cur.data() + st.off[j];
    for (std::size_t r = 0; r < rules; ++r) tr[r] = lam * phi[r] * out.z[j] - rho * th[r];
  }
  out.u = out.tau[n - 1];
  out.mu_rate = mu_rate(spec.gains.gamma1, out.z[0], h, spec.gains.gamma2, mu);

  if (advance) {
    double* rate = st.rate_scratch.data();
    for (std::size_t j = 0; j < n; ++j) {
      std::copy(out.theta_rates[j].begin(), out.theta_rates[j].end(), rate + st.off[j]);
    }
    rate[st.width - 1] = out.mu_rate;
    gl_advance(st, {rate, st.width});
    for (std::size_t j = 0; j < n; ++j) st.delta[j] += st.dt * out.delta_dot[j];
    std::copy(out.tau.begin(), out.tau.end(), st.tau_prev.begin());
  }
  return out;
}

}  // namespace fracsim
