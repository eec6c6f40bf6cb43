#include "maxhedge/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxhedge/errors.hpp"
#include "maxhedge/kernels.hpp"

namespace maxhedge {

namespace {

constexpr double kBracketWidth = 1e-13;
constexpr double kResidualTol = 1e-12;
constexpr int kMaxIterations = 400;

}  // namespace

Projection project_onto_feasible(std::span<const double> y, std::span<const double> z) {
  if (y.size() != z.size()) throw DimensionError("projection: y and z differ in length");
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidInputError("projection: non-finite input coordinate");
  }

  Projection out;
  out.x.resize(y.size());
  kernels::shift_clamp(y, z, 0.0, out.x);
  if (kernels::dot(out.x, z) <= 1.0) return out;

  // At lambda_hi every coordinate with z_i > 0 clamps to zero, so the budget holds there.
  double hi = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i] > 0.0) hi = std::max(hi, y[i] / z[i]);
  }
  double lo = 0.0;
  while (out.iterations < kMaxIterations) {
    ++out.iterations;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double used = kernels::clamped_dot(y, z, mid);
    if (used <= 1.0) {
      hi = mid;
      if (1.0 - used <= kResidualTol) break;
    } else {
      lo = mid;
    }
    if (hi - lo <= kBracketWidth * std::max(1.0, hi)) break;
  }
  kernels::shift_clamp(y, z, hi, out.x);
  // The reduction order of clamped_dot and dot may differ; nudge lambda up until dot agrees.
  while (kernels::dot(out.x, z) > 1.0) {
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity()) * (1.0 + 1e-15);
    kernels::shift_clamp(y, z, hi, out.x);
  }
  out.multiplier = hi;
  return out;
}

bool is_feasible(std::span<const double> x, std::span<const double> z, double tol) {
  if (x.size() != z.size()) return false;
  for (double v : x) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
  }
  return kernels::dot(x, z) <= 1.0 + tol;
}

}  // namespace maxhedge
