#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracsim/fuzzy.hpp"
#include "fracsim/nussbaum.hpp"
#include "fracsim/plant.hpp"

namespace fracsim {

// Damping split used by one backstepping step; b participates only in the
// final (input) step of a subsystem.
struct StepGains {
  double c = 0.0;
  double k = 0.0;
  double l = 0.0;
  double b = 0.0;
};

// Full gain set of one subsystem's controller.
struct ControllerGains {
  std::vector<double> c, k, l;       // per backstepping step, c_j > 1/4
  double b = 0.25;                   // disturbance gain of the final step
  double varpi = 0.1;                // smoothing constant of the compensator h
  std::vector<double> lambda_scale;  // adaptation gain Lambda_j = scale * I
  std::vector<double> rho;           // leakage rates
  double gamma1 = 1.0;
  double gamma2 = 2.0;

  // Splits published combined gains cbar_j = c+k+l (+b on the final step)
  // into components: c = cbar - 0.5 with k = l = 0.25 (final step reserves
  // b = min(0.25, cbar/4) first); when that would leave c <= 1/4 the split
  // falls back to proportional shares.  Throws if no valid split exists.
  static ControllerGains from_cbar(std::span<const double> cbar, double varpi, double rho,
                                   double gamma1, double gamma2, double lambda_scale = 1.0);

  void validate(std::size_t n) const;
  double cbar(std::size_t j, std::size_t n) const;  // c+k+l (+b on the final step)
  StepGains step(std::size_t j, std::size_t n) const;
};

// Smooth interaction compensator h = (2 z1 / (z1^2 + varpi)) * psi_sq_sum.
double h_function(double z1, double varpi, double psi_sq_sum);

// z1 = x1 - y_r;  z_j = x_j - tau_{j-1} for j >= 2.
std::vector<double> coordinate_change(std::span<const double> x_i, double y_ri,
                                      std::span<const double> tau);

struct VirtualControl {
  double tau = 0.0;  // the control input u when produced by the final step
  double eta = 0.0;
  double delta_dot = 0.0;
};

// eta1 = (c+k+l) z1 + fls_out + mu_hat h - d_alpha_yr;  tau1 = N(delta1) eta1.
VirtualControl step1_control(double z1, double fls_out, double mu_hat, double h,
                             double d_alpha_yr, const StepGains& g, NussbaumKind kind,
                             double delta1);

// eta_j = (c+k+l) z_j + fls_out;  tau_j = N(delta_j) eta_j.
VirtualControl stepj_control(double zj, double fls_out, const StepGains& g, NussbaumKind kind,
                             double deltaj);

// eta_n = (c+k+l+b) z_n + fls_out;  u = N(delta_n) eta_n.
VirtualControl final_control(double zn, double fls_out, const StepGains& g, NussbaumKind kind,
                             double deltan);

// Adaptation right sides (advanced externally through the fractional stepper).
std::vector<double> theta_rate(const Eigen::MatrixXd& Lambda, std::span<const double> phi,
                               double z, double rho, std::span<const double> theta);
double mu_rate(double gamma1, double z1, double h, double gamma2, double mu_hat);

// Everything constant about one subsystem's controller.
struct SubControllerSpec {
  std::size_t n = 0;
  std::vector<MembershipGrid> grids;  // regressor grid per step
  ControllerGains gains;
  NussbaumKind kind;
  double alpha = 0.8;
  TimeFn y_ref;
  double ref_omega = 0.0;                  // y_ref = sin(ref_omega t); 0 = constant 0
  std::function<double(double)> psi_sq;    // local compensator weight S_i(y_i)
};

// Default regressor grids: step 1 reads x1 on a five-center unit-width grid;
// step j >= 2 reads (x1..xj, z_j, tau_{j-1}) with the error/virtual-control
// dimensions on a coarser three-center grid.
std::vector<MembershipGrid> default_regressor_grids(std::size_t n);

// Adaptive memory of one subsystem: fractional (GL full-history) states for
// every theta block and mu_hat, integer-order delta, previous virtual
// controls, plus scratch buffers for the per-step evaluation.
struct AdaptiveState {
  AdaptiveState(const SubControllerSpec& spec, double dt, std::size_t capacity_steps,
                std::size_t memory_truncation = 0);  // 0 = full memory

  std::size_t width = 0;            // total GL-integrated channels (thetas + mu)
  std::vector<std::size_t> off;     // theta block offset per step
  std::vector<double> hist;         // (capacity+1) x width, row-major sample store
  std::size_t rows = 0;             // appended samples; row r holds values at t_r
  std::vector<double> delta;        // Nussbaum arguments, one per step
  std::vector<double> tau_prev;     // previous virtual controls
  std::vector<double> glw;          // GL weights, grown as the run advances
  double dt = 0.0;
  double alpha = 0.8;
  std::size_t memory_truncation = 0;

  std::span<const double> current() const { return {hist.data() + (rows - 1) * width, width}; }
  std::span<const double> theta(std::size_t j) const;
  double theta_norm(std::size_t j) const;
  double mu_hat() const { return current()[width - 1]; }
  std::size_t theta_size(std::size_t j) const;

  // scratch (sized once, reused every step)
  std::vector<double> phi_scratch;   // concatenated basis blocks, width-1 entries
  std::vector<double> rate_scratch;  // GL right sides for the pending advance
  std::vector<double> sum_scratch;   // GL history sum
  std::vector<double> reg_scratch;   // largest regressor
};

struct StepOutput {
  double u = 0.0;
  std::vector<double> z, eta, tau, delta_dot;
  std::vector<std::vector<double>> theta_rates;
  double mu_rate = 0.0;
};

// One controller evaluation at time t (= state.rows-1 steps after start):
// computes errors, virtual controls, the input u and all adaptation rates;
// when advance is set, integrates theta/mu_hat one GL step and delta one
// explicit Euler step.  Reads only the local state x_i and the output y_i.
StepOutput controller_step(const SubControllerSpec& spec, AdaptiveState& state,
                           std::span<const double> x_i, std::span<const double> y_all,
                           std::size_t sub_index, double t, bool advance = true);

}  // namespace fracsim
