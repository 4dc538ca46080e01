#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fracsim {

// One input dimension of a tensor-product membership grid: Gaussian
// memberships exp(-0.5 ((x - c)/width)^2) centered at each entry of
// `centers`, all sharing one width.
struct GridAxis {
  std::vector<double> centers;
  double width = 1.0;
};

// Tensor-product grid of Gaussian memberships.  Rule k corresponds to one
// combination of per-dimension centers; the last dimension varies fastest.
class MembershipGrid {
 public:
  // Uniform grid: the same centers/width on every input dimension.
  MembershipGrid(std::vector<double> centers, double width, std::size_t input_dim);
  // General grid: independent centers/width per input dimension.
  explicit MembershipGrid(std::vector<GridAxis> axes);

  std::size_t input_dim() const { return axes_.size(); }
  std::size_t rules() const { return rules_; }
  const std::vector<GridAxis>& axes() const { return axes_; }

 private:
  std::vector<GridAxis> axes_;
  std::size_t rules_ = 0;
};

// Linear FLS parameters: one weight per rule.
struct FlsParams {
  std::vector<double> theta;
};

// Normalized basis phi(x): phi_k = prod_i mu_ik(x_i) / sum_k prod_i mu_ik(x_i).
// Entries are in [0,1] and sum to 1; evaluated in log space so the
// normalization survives arbitrarily far from the grid.
std::vector<double> basis(const MembershipGrid& grid, std::span<const double> x);

// Writes the basis into `out` (size grid.rules()) without allocating.
void basis_into(const MembershipGrid& grid, std::span<const double> x, std::span<double> out);

// theta . phi
double fls_eval(const FlsParams& params, std::span<const double> phi);

// Least-squares fit of theta so that theta . phi(x) approximates target(x)
// over the sample set.  Throws NumericError when the design matrix is
// rank-deficient (supply more or better-spread samples).
FlsParams fit_offline(const std::function<double(std::span<const double>)>& target,
                      const MembershipGrid& grid,
                      const std::vector<std::vector<double>>& samples);

}  // namespace fracsim
