#pragma once

#include <cstddef>

namespace maxhedge::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
double clamped_dot_scalar(const double* y, const double* z, double lambda, std::size_t n);
void shift_clamp_scalar(const double* y, const double* z, double lambda, double* out, std::size_t n);
void axpy_scalar(double a, const double* x, const double* y, double* out, std::size_t n);

#if defined(MAXHEDGE_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
double clamped_dot_avx2(const double* y, const double* z, double lambda, std::size_t n);
void shift_clamp_avx2(const double* y, const double* z, double lambda, double* out, std::size_t n);
void axpy_avx2(double a, const double* x, const double* y, double* out, std::size_t n);
#endif

}  // namespace maxhedge::kernels::detail
