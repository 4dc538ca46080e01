#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fracsim {

// The four supported Nussbaum function shapes:
//   exponential growth:  e^{delta^2} * (sin|cos)(pi delta / 2)
//   quadratic growth:    delta^2    * (sin|cos)(pi delta / 2)
enum class NussbaumGrowth { exponential, quadratic };
enum class NussbaumPhase { sin, cos };

struct NussbaumKind {
  NussbaumGrowth growth = NussbaumGrowth::quadratic;
  NussbaumPhase phase = NussbaumPhase::sin;
};

inline constexpr NussbaumKind kQuadSin{NussbaumGrowth::quadratic, NussbaumPhase::sin};
inline constexpr NussbaumKind kQuadCos{NussbaumGrowth::quadratic, NussbaumPhase::cos};
inline constexpr NussbaumKind kExpSin{NussbaumGrowth::exponential, NussbaumPhase::sin};
inline constexpr NussbaumKind kExpCos{NussbaumGrowth::exponential, NussbaumPhase::cos};

// N(delta).  The exponential kinds overflow double range at |delta| > ~26.6;
// that raises NumericError (diagnostic) rather than returning infinity.
double nussbaum(NussbaumKind kind, double delta);

// Adaptive-quadrature value of the running integral of N over [d0, d1]
// (relative error <= 1e-8).  Throws NumericError on non-convergence.
double nussbaum_integral(NussbaumKind kind, double d0, double d1);

// Result of the oscillation-property search: the first delta >= 0 at which
// the running integral from 0 exceeds +threshold, and the first at which it
// falls below -threshold, if found within [0, search_limit].
struct NussbaumWitnesses {
  bool sup_found = false;
  bool inf_found = false;
  double sup_witness = 0.0;
  double inf_witness = 0.0;
};

NussbaumWitnesses check_nussbaum_property(NussbaumKind kind, double threshold,
                                          double search_limit);

// Trajectory-level verification report for the closed-loop energy bound
//   V(t) <= conv(t) + E_{alpha,1}(-lambda t^alpha) V(0) + zeta sigma / lambda
// where conv is the singular-kernel convolution of the Nussbaum flux
// sum_i (g_i N(delta_i) + 1) ddelta_i/dt.
struct BoundReport {
  std::vector<double> t;
  std::vector<double> v_traj;
  std::vector<double> rhs_traj;
  std::vector<double> slack;   // rhs - V per grid point
  double max_violation = 0.0;  // max over the grid of (V - rhs) = -min slack
  double sigma = 0.0;          // fitted envelope constant used inside H
  double tolerance = 0.0;      // combined quadrature + finite-difference error scale
  void write_csv(const std::string& path) const;  // columns: t,V,rhs,slack
};

// Evaluates the bound's right side along a simulated trajectory and reports
// the slack against the supplied V trajectory.  g and delta hold one
// trajectory per Nussbaum channel, all sampled on the same uniform dt grid
// as v_traj; ddelta/dt is reconstructed by central differences.
BoundReport theorem1_bound(double alpha, double lambda, double zeta, double v0,
                           const std::vector<std::vector<double>>& g,
                           const std::vector<std::vector<double>>& delta, NussbaumKind kind,
                           double dt, std::span<const double> v_traj);

}  // namespace fracsim
