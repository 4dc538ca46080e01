#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracsim {

using TimeFn = std::function<double(double)>;
// Local-nonlinearity channel: own state vector x plus the cross-state
// snapshot xs (all subsystems' states), used by couplings that read another
// subsystem's internal state.
using StateFn =
    std::function<double(std::span<const double> x, const std::vector<std::vector<double>>& xs)>;
// Interaction channel: full output vector y plus the same cross-state snapshot.
using OutputFn =
    std::function<double(std::span<const double> y, const std::vector<std::vector<double>>& xs)>;

// One term beta * |psi(y_target)| of an interaction-bound certificate
//   |f_{i,j}(y)| <= sum_channels beta * |psi(y_target)|.
struct BoundChannel {
  std::size_t target;                  // output index psi reads
  double beta;                         // positive coefficient
  std::function<double(double)> psi;   // smooth bound shape
};

// One subsystem of the interconnected plant
//   D^alpha x_j = g_j(t) x_{j+1} + phi_j(x) + f_j(y)            (j < n)
//   D^alpha x_n = g_n(t) u + phi_n(x) + f_n(y) + d(t).
struct SubsystemSpec {
  std::size_t n = 0;
  std::vector<TimeFn> gains;                            // g_j(t), one fixed sign each
  std::vector<std::pair<double, double>> gain_bounds;   // declared [lo, hi] per channel
  std::vector<StateFn> phis;
  std::vector<OutputFn> interactions;
  TimeFn disturbance;
  double dist_bound = 0.0;
  std::vector<std::vector<BoundChannel>> bound_table;   // per row: bound channels
  // Non-output state coordinates (sub, state index) that interactions read;
  // the assumption check sweeps these over the same box as the outputs.
  std::vector<std::pair<std::size_t, std::size_t>> extra_sweep_dims;
  std::vector<double> x0;
  TimeFn y_ref;
  double ref_omega = 0.0;  // y_ref = sin(ref_omega t); 0 means y_ref constant
  std::vector<double> cbar;  // combined backstepping gains per step
};

struct Scenario {
  std::string name;
  double alpha = 0.8;
  std::vector<SubsystemSpec> subs;
  // Sum of squared bound shapes psi(y_i)^2 over every bound channel (any
  // subsystem, any row) whose target is output i: the interaction
  // compensator's local weight S_i(y_i).
  double psi_sq_sum(std::size_t i, double y_i) const;
};

// Right side of one subsystem's dynamics at time t.  xs carries every
// subsystem's state vector for cross-state couplings; pass {} when the
// spec's channels read none.
std::vector<double> plant_rhs(const SubsystemSpec& spec, double t, std::span<const double> x_i,
                              double u_i, std::span<const double> y_all,
                              const std::vector<std::vector<double>>& xs);

// Four interconnected second-order subsystems with mixed time-varying input
// gains; gain_scale scales every gain channel (e.g. -1 flips all control
// directions while keeping each sign constant in time).
Scenario scenario_example_a(double gain_scale = 1.0);

// Motor scenario: subsystem 1 = (speed, q-axis current) driven by u_q,
// subsystem 2 = d-axis current driven by u_d, coupled through bilinear
// interaction terms.
Scenario scenario_pmsm(double kappa = 2.0, double nu = 3.0, double g1 = 3.0, double g2 = 3.0,
                       double alpha = 0.9, double gain_scale = 1.0);

// Interaction-bound verification on a sampled output box.
struct A2Entry {
  std::size_t sub = 0;
  std::size_t row = 0;
  double max_ratio = 0.0;             // worst |f| / bound over the grid
  std::vector<double> worst_point;    // outputs (then extra swept states)
  bool violated = false;
};

struct A2Report {
  std::vector<A2Entry> entries;
  bool pass = true;
  double box_halfwidth = 0.0;
  std::size_t grid_per_dim = 0;
};

// Verifies |f_{i,j}(y)| <= beta_scale * sum beta |psi(y_q)| for every
// interaction row on a uniform grid over [-box, box]^dims; beta_scale < 1
// deliberately weakens the certificate (negative testing).
A2Report check_assumption2(const Scenario& sc, std::size_t grid_per_dim = 13, double box = 3.0,
                           double beta_scale = 1.0);

}  // namespace fracsim
