#include "fourway/splines.hpp"

#include <algorithm>
#include <cmath>

#include "fourway/error.hpp"

namespace fourway {

SplineBasis::SplineBasis(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ValidationError("spline basis needs at least two knots");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw ValidationError("spline knots must be strictly increasing");
  }
}

std::vector<double> SplineBasis::row(double x) const {
  std::vector<double> out(columns());
  row(x, out);
  return out;
}

void SplineBasis::row(double x, std::span<double> out) const {
  const std::size_t m = knots_.size();
  out[0] = x;
  if (m < 3) return;
  const double first = knots_.front();
  const double last = knots_[m - 1];
  const double penultimate = knots_[m - 2];
  const double norm = (last - first) * (last - first);
  const double span_tail = last - penultimate;
  auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  const double tail_pen = cube_plus(x - penultimate);
  const double tail_last = cube_plus(x - last);
  for (std::size_t j = 0; j + 2 < m; ++j) {
    const double t = knots_[j];
    const double term = cube_plus(x - t) - tail_pen * (last - t) / span_tail +
                        tail_last * (penultimate - t) / span_tail;
    out[j + 1] = term / norm;
  }
}

std::vector<double> make_knots(std::span<const double> values, int df) {
  if (df < 1) throw ValidationError("spline df must be at least 1");
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  if (static_cast<int>(u.size()) < df + 1) {
    throw ValidationError("too few distinct values for spline df " + std::to_string(df) + ": " +
                          std::to_string(u.size()) + " distinct, need " + std::to_string(df + 1));
  }
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(df) + 1);
  const double n1 = static_cast<double>(u.size() - 1);
  for (int q = 0; q <= df; ++q) {
    const double h = n1 * q / df;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, u.size() - 1);
    knots.push_back(u[lo] + (h - static_cast<double>(lo)) * (u[hi] - u[lo]));
  }
  knots.front() = u.front();
  knots.back() = u.back();
  return knots;
}

}  // namespace fourway
