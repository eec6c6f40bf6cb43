#include <algorithm>

#include "kernels_impl.hpp"

namespace maxhedge::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

double clamped_dot_scalar(const double* y, const double* z, double lambda, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double shifted = y[i] - lambda * z[i];
    sum += z[i] * std::min(std::max(shifted, 0.0), 1.0);
  }
  return sum;
}

void shift_clamp_scalar(const double* y, const double* z, double lambda, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double shifted = y[i] - lambda * z[i];
    out[i] = std::min(std::max(shifted, 0.0), 1.0);
  }
}

void axpy_scalar(double a, const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

}  // namespace maxhedge::kernels::detail
