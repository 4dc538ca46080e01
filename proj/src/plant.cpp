#include "fracsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

const auto kIdentity = [](double v) { return v; };

void validate_spec(const SubsystemSpec& s) {
  if (s.n == 0) throw std::invalid_argument("SubsystemSpec: n must be >= 1");
  if (s.gains.size() != s.n || s.phis.size() != s.n || s.interactions.size() != s.n ||
      s.x0.size() != s.n || s.cbar.size() != s.n)
    throw std::invalid_argument("SubsystemSpec: per-row sequences must have length n");
}

}  // namespace

double Scenario::psi_sq_sum(std::size_t i, double y_i) const {
  double acc = 0.0;
  for (const SubsystemSpec& s : subs)
    for (const auto& row : s.bound_table)
      for (const BoundChannel& ch : row)
        if (ch.target == i) {
          const double p = ch.psi(y_i);
          acc += p * p;
        }
  return acc;
}

std::vector<double> plant_rhs(const SubsystemSpec& spec, double t, std::span<const double> x_i,
                              double u_i, std::span<const double> y_all,
                              const std::vector<std::vector<double>>& xs) {
  validate_spec(spec);
  if (x_i.size() != spec.n) throw std::invalid_argument("plant_rhs: state dimension mismatch");
  std::vector<double> rhs(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) {
    double v = spec.phis[j](x_i, xs) + spec.interactions[j](y_all, xs);
    if (j + 1 < spec.n)
      v += spec.gains[j](t) * x_i[j + 1];
    else
      v += spec.gains[j](t) * u_i + spec.disturbance(t);
    rhs[j] = v;
  }
  return rhs;
}

Scenario scenario_example_a(double gain_scale) {
  if (gain_scale == 0.0) throw std::domain_error("scenario_example_a: gain_scale must be nonzero");
  Scenario sc;
  sc.name = "example_a";
  sc.alpha = 0.8;

  const double gs = gain_scale;
  std::vector<TimeFn> g2 = {
      [gs](double t) { return gs * (2.0 + std::sin(t)); },
      [gs](double) { return gs * 2.0; },
      [gs](double t) { return gs * (3.0 - std::cos(t)); },
      [gs](double) { return gs * 3.0; },
  };
  std::vector<std::pair<double, double>> g2_bounds = {{1.0, 3.0}, {2.0, 2.0}, {2.0, 4.0}, {3.0, 3.0}};

  std::vector<StateFn> phi1 = {
      [](std::span<const double> x, const auto&) { return 0.6 * x[0] * x[0]; },
      [](std::span<const double> x, const auto&) { return 0.5 * std::exp(-x[0] * x[0]); },
      [](std::span<const double> x, const auto&) { return x[0] * x[0]; },
      [](std::span<const double>, const auto&) { return 0.0; },
  };
  std::vector<StateFn> phi2 = {
      [](std::span<const double> x, const auto&) { return x[1] / (1.0 + x[0] * x[0]); },
      [](std::span<const double> x, const auto&) {
        return std::exp(-x[1] * x[1]) * std::sin(x[0]);
      },
      // Reads subsystem 1's second state through the cross-state channel.
      [](std::span<const double> x, const std::vector<std::vector<double>>& xs) {
        return (1.0 - x[0] * x[0]) * xs[0][1];
      },
      [](std::span<const double> x, const auto&) { return x[0] * x[1] * x[1]; },
  };
  std::vector<OutputFn> f2 = {
      [](std::span<const double> y, const auto&) {
        return 0.5 * y[1] + y[2] + std::sin(y[3]);
      },
      [](std::span<const double> y, const auto&) { return y[0] + 0.6 * y[2] + 0.7 * y[3]; },
      [](std::span<const double> y, const auto&) { return y[0] + std::sin(y[1]) + y[3]; },
      [](std::span<const double> y, const auto&) { return y[0] + std::sin(y[1]) + 0.6 * y[2]; },
  };
  std::vector<TimeFn> dist = {
      [](double t) { return 0.3 * std::cos(kPi * t); },
      [](double t) { return 0.3 * std::cos(kPi * t); },
      [](double t) { return 0.4 * std::sin(kPi * t); },
      [](double t) { return 0.4 * std::sin(kPi * t); },
  };
  const double dbound[4] = {0.3, 0.3, 0.4, 0.4};
  // Bound certificates for the interaction rows (|sin v| <= |v| throughout).
  std::vector<std::vector<BoundChannel>> tables = {
      {{1, 0.5, kIdentity}, {2, 1.0, kIdentity}, {3, 1.0, kIdentity}},
      {{0, 1.0, kIdentity}, {2, 0.6, kIdentity}, {3, 0.7, kIdentity}},
      {{0, 1.0, kIdentity}, {1, 1.0, kIdentity}, {3, 1.0, kIdentity}},
      {{0, 1.0, kIdentity}, {1, 1.0, kIdentity}, {2, 0.6, kIdentity}},
  };
  const double cbar1[4] = {3.0, 5.0, 4.0, 3.0};

  for (std::size_t i = 0; i < 4; ++i) {
    SubsystemSpec s;
    s.n = 2;
    s.gains = {[gs](double) { return gs * 1.0; }, g2[i]};
    s.gain_bounds = {{1.0, 1.0}, g2_bounds[i]};
    if (gs < 0.0)
      for (auto& b : s.gain_bounds) b = {gs * b.second, gs * b.first};
    s.phis = {phi1[i], phi2[i]};
    s.interactions = {[](std::span<const double>, const auto&) { return 0.0; }, f2[i]};
    s.disturbance = dist[i];
    s.dist_bound = dbound[i];
    s.bound_table = {{}, tables[i]};
    s.x0 = {0.1, 0.1};
    s.y_ref = [](double t) { return std::sin(2.0 * t); };
    s.ref_omega = 2.0;
    s.cbar = {cbar1[i], 1.0};
    sc.subs.push_back(std::move(s));
  }
  return sc;
}

Scenario scenario_pmsm(double kappa, double nu, double g1, double g2, double alpha,
                       double gain_scale) {
  if (kappa == 0.0 || g1 == 0.0 || g2 == 0.0 || gain_scale == 0.0)
    throw std::domain_error("scenario_pmsm: gain parameters must be nonzero");
  Scenario sc;
  sc.name = "pmsm";
  sc.alpha = alpha;
  const double gs = gain_scale;

  SubsystemSpec s1;
  s1.n = 2;
  s1.gains = {[gs, kappa](double) { return gs * kappa; }, [gs, g1](double) { return gs * g1; }};
  s1.gain_bounds = {{gs * kappa, gs * kappa}, {gs * g1, gs * g1}};
  s1.phis = {
      [kappa](std::span<const double> x, const auto&) { return -kappa * x[0]; },
      [nu](std::span<const double> x, const auto&) { return -x[1] + nu * x[0]; },
  };
  s1.interactions = {
      [](std::span<const double>, const auto&) { return 0.0; },
      [](std::span<const double> y, const auto&) { return -y[0] * y[1]; },
  };
  s1.disturbance = [](double) { return 0.0; };
  s1.dist_bound = 0.0;
  // |y1 y2| <= 1.5 |y1| + 1.5 |y2| on the [-3,3] operating box (tight at corners).
  s1.bound_table = {{}, {{0, 1.5, kIdentity}, {1, 1.5, kIdentity}}};
  s1.x0 = {0.1, 0.1};
  s1.y_ref = [](double t) { return std::sin(2.0 * t); };
  s1.ref_omega = 2.0;
  s1.cbar = {10.0, 3.0};

  SubsystemSpec s2;
  s2.n = 1;
  s2.gains = {[gs, g2](double) { return gs * g2; }};
  s2.gain_bounds = {{gs * g2, gs * g2}};
  s2.phis = {[](std::span<const double> x, const auto&) { return -x[0]; }};
  // speed times q-axis current: reads subsystem 1's second (non-output) state.
  s2.interactions = {[](std::span<const double> y, const std::vector<std::vector<double>>& xs) {
    return y[0] * xs[0][1];
  }};
  s2.disturbance = [](double) { return 0.0; };
  s2.dist_bound = 0.0;
  // |y1 x_{1,2}| <= 3 |y1| with x_{1,2} swept over the same box.
  s2.bound_table = {{{0, 3.0, kIdentity}}};
  s2.extra_sweep_dims = {{0, 1}};
  s2.x0 = {0.1};
  s2.y_ref = [](double) { return 0.0; };
  s2.ref_omega = 0.0;
  s2.cbar = {3.0};

  if (gs < 0.0)
    for (SubsystemSpec* s : {&s1, &s2})
      for (auto& b : s->gain_bounds) b = {std::min(b.first, b.second), std::max(b.first, b.second)};

  sc.subs = {std::move(s1), std::move(s2)};
  return sc;
}

A2Report check_assumption2(const Scenario& sc, std::size_t grid_per_dim, double box,
                           double beta_scale) {
  if (grid_per_dim < 2) throw std::invalid_argument("check_assumption2: need >= 2 grid points");
  A2Report rep;
  rep.box_halfwidth = box;
  rep.grid_per_dim = grid_per_dim;

  const std::size_t n_out = sc.subs.size();

  for (std::size_t i = 0; i < sc.subs.size(); ++i) {
    const SubsystemSpec& s = sc.subs[i];
    const auto& extra = s.extra_sweep_dims;
    const std::size_t dims = n_out + extra.size();

    for (std::size_t j = 0; j < s.n; ++j) {
      A2Entry entry;
      entry.sub = i;
      entry.row = j;
      static const std::vector<BoundChannel> kNoChannels;
      const auto& channels = j < s.bound_table.size() ? s.bound_table[j] : kNoChannels;

      // Walk the full grid via an odometer over `dims` coordinates.
      std::vector<std::size_t> idx(dims, 0);
      std::vector<double> y(n_out, 0.0);
      std::vector<std::vector<double>> xs(sc.subs.size());
      for (std::size_t q = 0; q < sc.subs.size(); ++q) xs[q].assign(sc.subs[q].n, 0.0);
      bool done = false;
      while (!done) {
        for (std::size_t d = 0; d < dims; ++d) {
          const double v = -box + 2.0 * box * static_cast<double>(idx[d]) /
                                      static_cast<double>(grid_per_dim - 1);
          if (d < n_out) {
            y[d] = v;
            xs[d][0] = v;
          } else {
            const auto [sq, sx] = extra[d - n_out];
            xs[sq][sx] = v;
          }
        }
        const double fval = std::abs(s.interactions[j](y, xs));
        double bound = 0.0;
        for (const BoundChannel& ch : channels)
          bound += beta_scale * ch.beta * std::abs(ch.psi(y[ch.target]));
        double ratio;
        if (bound > 0.0)
          ratio = fval / bound;
        else
          ratio = (fval <= 1e-12) ? 0.0 : std::numeric_limits<double>::infinity();
        if (ratio > entry.max_ratio) {
          entry.max_ratio = ratio;
          entry.worst_point = y;
          for (std::size_t d = n_out; d < dims; ++d) {
            const auto [sq, sx] = extra[d - n_out];
            entry.worst_point.push_back(xs[sq][sx]);
          }
        }
        // odometer increment
        done = true;
        for (std::size_t d = 0; d < dims; ++d) {
          if (++idx[d] < grid_per_dim) {
            done = false;
            break;
          }
          idx[d] = 0;
        }
      }
      entry.violated = entry.max_ratio > 1.0 + 1e-12;
      if (entry.violated) rep.pass = false;
      rep.entries.push_back(std::move(entry));
    }
  }
  return rep;
}

}  // namespace fracsim
