#pragma once

#include <span>
#include <vector>

namespace maxhedge {

// Result of projecting onto C = { x in [0,1]^n : <x, z> <= 1 }.
struct Projection {
  std::vector<double> x;
  // KKT multiplier of the budget constraint (0 when the box clamp is already feasible).
  double multiplier = 0.0;
  int iterations = 0;
};

// Euclidean projection onto C. The minimiser has the form x_i = clamp(y_i - lambda * z_i, 0, 1)
// for the smallest lambda >= 0 that satisfies the budget, found by bisection; the returned point is
// taken from the feasible end of the bracket so <x, z> <= 1 holds exactly in floating point.
// Throws InvalidInputError for non-finite y and DimensionError when the lengths differ.
Projection project_onto_feasible(std::span<const double> y, std::span<const double> z);

// All coordinates in [-tol, 1 + tol] and <x, z> <= 1 + tol.
bool is_feasible(std::span<const double> x, std::span<const double> z, double tol);

}  // namespace maxhedge
