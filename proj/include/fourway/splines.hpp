#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fourway {

// Restricted (natural) cubic spline basis with knots t_1 < ... < t_m.
// Produces m-1 columns: x itself and m-2 truncated-power terms constrained to
// be linear beyond the boundary knots, each scaled by (t_m - t_1)^2.
// With two knots the basis is just the linear term.
class SplineBasis {
 public:
  SplineBasis() = default;
  explicit SplineBasis(std::vector<double> knots);

  const std::vector<double>& knots() const { return knots_; }
  std::size_t columns() const { return knots_.empty() ? 0 : knots_.size() - 1; }

  std::vector<double> row(double x) const;
  // Writes columns() values into out.
  void row(double x, std::span<double> out) const;

 private:
  std::vector<double> knots_;
};

// df+1 knots at equally spaced quantiles (linear interpolation between order
// statistics) of the distinct values, including their minimum and maximum.
// Requires at least df+1 distinct values.
std::vector<double> make_knots(std::span<const double> values, int df);

}  // namespace fourway
