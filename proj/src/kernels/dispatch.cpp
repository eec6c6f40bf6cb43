#include <atomic>
#include <string>

#include "kernels_impl.hpp"
#include "maxhedge/errors.hpp"
#include "maxhedge/kernels.hpp"

namespace maxhedge::kernels {

namespace {

const KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::clamped_dot_scalar,
                          detail::shift_clamp_scalar, detail::axpy_scalar};

#if defined(MAXHEDGE_HAVE_AVX2)
const KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::clamped_dot_avx2,
                        detail::shift_clamp_avx2, detail::axpy_avx2};

bool cpu_has_avx2() {
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
}
#endif

const KernelTable* initial_table() {
#if defined(MAXHEDGE_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "auto") return best_supported();
  throw InvalidInputError("unknown kernel variant '" + std::string(name) + "'");
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(MAXHEDGE_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return nullptr;
}

bool supported(Isa isa) { return isa == Isa::scalar || avx2_table() != nullptr; }

Isa best_supported() { return avx2_table() ? Isa::avx2 : Isa::scalar; }

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* table = isa == Isa::scalar ? &kScalar : avx2_table();
  if (table == nullptr) {
    throw InvalidInputError("kernel variant '" + std::string(isa_name(isa)) +
                            "' is not available on this CPU");
  }
  active_slot().store(table, std::memory_order_release);
}

}  // namespace maxhedge::kernels
