#include <cstdlib>
#include <string>

#include "mechtomo/error.hpp"
#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::simd {

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(MECHTOMO_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) {
    throw ContractError(ErrorKind::contract, "simd",
                        "instruction set " + std::string(to_string(isa)) + " not available");
  }
#if defined(MECHTOMO_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

Isa select_isa() {
  if (const char* env = std::getenv("MECHTOMO_SIMD")) {
    const std::string_view requested(env);
    if (requested == "scalar") return Isa::scalar;
    if (requested == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels(active_isa());
  return table;
}

}  // namespace mechtomo::simd
