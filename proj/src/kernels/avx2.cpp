// Compiled with -mavx2 -mfma. Only reached after a CPUID check in dispatch.cpp.
#include <immintrin.h>

#include <algorithm>

#include "kernels_impl.hpp"

namespace maxhedge::kernels::detail {

namespace {

inline double reduce_add(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// clamp(y - lambda * z, 0, 1) with a separate multiply and subtract so the result matches the
// scalar kernel bit for bit.
inline __m256d shifted_clamp(__m256d y, __m256d z, __m256d lambda) {
  const __m256d shifted = _mm256_sub_pd(y, _mm256_mul_pd(lambda, z));
  return _mm256_min_pd(_mm256_max_pd(shifted, _mm256_setzero_pd()), _mm256_set1_pd(1.0));
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double sum = reduce_add(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

double clamped_dot_avx2(const double* y, const double* z, double lambda, std::size_t n) {
  const __m256d lam = _mm256_set1_pd(lambda);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zv = _mm256_loadu_pd(z + i);
    acc = _mm256_fmadd_pd(zv, shifted_clamp(_mm256_loadu_pd(y + i), zv, lam), acc);
  }
  double sum = reduce_add(acc);
  for (; i < n; ++i) {
    const double shifted = y[i] - lambda * z[i];
    sum += z[i] * std::min(std::max(shifted, 0.0), 1.0);
  }
  return sum;
}

void shift_clamp_avx2(const double* y, const double* z, double lambda, double* out, std::size_t n) {
  const __m256d lam = _mm256_set1_pd(lambda);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, shifted_clamp(_mm256_loadu_pd(y + i), _mm256_loadu_pd(z + i), lam));
  }
  for (; i < n; ++i) {
    const double shifted = y[i] - lambda * z[i];
    out[i] = std::min(std::max(shifted, 0.0), 1.0);
  }
}

void axpy_avx2(double a, const double* x, const double* y, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), scaled));
  }
  for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

}  // namespace maxhedge::kernels::detail
