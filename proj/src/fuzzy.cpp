#include "fracsim/fuzzy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracsim/fracnum.hpp"

namespace fracsim {

namespace {

void validate_axes(const std::vector<GridAxis>& axes) {
  if (axes.empty()) throw std::invalid_argument("MembershipGrid: needs at least one dimension");
  for (const GridAxis& ax : axes) {
    if (ax.centers.size() < 2)
      throw std::invalid_argument("MembershipGrid: at least 2 centers per dimension");
    if (!(ax.width > 0.0)) throw std::invalid_argument("MembershipGrid: width must be > 0");
    for (double c : ax.centers)
      if (!std::isfinite(c)) throw std::invalid_argument("MembershipGrid: non-finite center");
  }
}

std::size_t rule_count(const std::vector<GridAxis>& axes) {
  std::size_t r = 1;
  for (const GridAxis& ax : axes) r *= ax.centers.size();
  return r;
}

}  // namespace

MembershipGrid::MembershipGrid(std::vector<double> centers, double width, std::size_t input_dim)
    : MembershipGrid(std::vector<GridAxis>(input_dim, GridAxis{std::move(centers), width})) {}

MembershipGrid::MembershipGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  validate_axes(axes_);
  rules_ = rule_count(axes_);
}

void basis_into(const MembershipGrid& grid, std::span<const double> x, std::span<double> out) {
  const auto& axes = grid.axes();
  if (x.size() != axes.size())
    throw std::invalid_argument("basis: input dimension does not match grid");
  if (out.size() != grid.rules())
    throw std::invalid_argument("basis: output size does not match rule count");

  // Accumulate log-memberships over the tensor grid, last dimension fastest.
  out[0] = 0.0;
  std::size_t filled = 1;
  for (std::size_t dim = 0; dim < axes.size(); ++dim) {
    const GridAxis& ax = axes[dim];
    const std::size_t nc = ax.centers.size();
    const double xi = x[dim];
    // Expand in place from the back so each prefix value fans out over nc slots.
    for (std::size_t i = filled; i-- > 0;) {
      const double base = out[i];
      for (std::size_t c = nc; c-- > 0;) {
        const double d = (xi - ax.centers[c]) / ax.width;
        out[i * nc + c] = base - 0.5 * d * d;
      }
    }
    filled *= nc;
  }

  const double m = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - m);
    sum += v;
  }
  if (!(sum > 0.0)) throw std::domain_error("basis: all memberships vanished");
  for (double& v : out) v /= sum;
}

std::vector<double> basis(const MembershipGrid& grid, std::span<const double> x) {
  std::vector<double> out(grid.rules());
  basis_into(grid, x, out);
  return out;
}

double fls_eval(const FlsParams& params, std::span<const double> phi) {
  if (params.theta.size() != phi.size())
    throw std::invalid_argument("fls_eval: theta/basis dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) acc += params.theta[i] * phi[i];
  return acc;
}

FlsParams fit_offline(const std::function<double(std::span<const double>)>& target,
                      const MembershipGrid& grid,
                      const std::vector<std::vector<double>>& samples) {
  const std::size_t R = grid.rules();
  if (samples.size() < R)
    throw std::invalid_argument("fit_offline: need at least as many samples as rules");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(R));
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  std::vector<double> phi(R);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    basis_into(grid, samples[s], phi);
    for (std::size_t k = 0; k < R; ++k) design(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = phi[k];
    y(static_cast<Eigen::Index>(s)) = target(samples[s]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  if (rank < static_cast<Eigen::Index>(R))
    throw NumericError("fit_offline: rank-deficient design matrix (rank " + std::to_string(rank) +
                           " of " + std::to_string(R) + ") - supply denser samples",
                       static_cast<double>(rank), static_cast<double>(R) - static_cast<double>(rank));
  Eigen::VectorXd theta = qr.solve(y);
  return FlsParams{std::vector<double>(theta.data(), theta.data() + theta.size())};
}

}  // namespace fracsim
