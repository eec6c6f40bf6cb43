#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision loops used on the per-trial hot path. Each entry has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime from CPUID. Elementwise kernels
// are bit-identical across variants; reductions agree to rounding (lane-wise partial sums).
namespace maxhedge::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
// Parses "scalar", "avx2" or "auto" (best supported). Throws InvalidInputError otherwise.
Isa parse_isa(std::string_view name);

struct KernelTable {
  Isa isa;
  // sum_i x_i * y_i
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i z_i * clamp(y_i - lambda * z_i, 0, 1)
  double (*clamped_dot)(const double* y, const double* z, double lambda, std::size_t n);
  // out_i = clamp(y_i - lambda * z_i, 0, 1)
  void (*shift_clamp)(const double* y, const double* z, double lambda, double* out, std::size_t n);
  // out_i = y_i + a * x_i
  void (*axpy)(double a, const double* x, const double* y, double* out, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks the instructions.
const KernelTable* avx2_table();

bool supported(Isa isa);
Isa best_supported();

// The table used by the convenience wrappers below. Defaults to best_supported().
const KernelTable& active();
// Throws InvalidInputError when the requested variant is unavailable.
void select(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double clamped_dot(std::span<const double> y, std::span<const double> z, double lambda) {
  return active().clamped_dot(y.data(), z.data(), lambda, y.size());
}
inline void shift_clamp(std::span<const double> y, std::span<const double> z, double lambda,
                        std::span<double> out) {
  active().shift_clamp(y.data(), z.data(), lambda, out.data(), y.size());
}
inline void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out) {
  active().axpy(a, x.data(), y.data(), out.data(), x.size());
}

}  // namespace maxhedge::kernels
