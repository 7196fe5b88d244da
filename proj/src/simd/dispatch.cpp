#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace barfi::simd {

namespace {

constexpr KernelTable kScalar{scalar::dot, scalar::axpy, scalar::scale, scalar::sum_squares,
                              scalar::add_scaled};

#if BARFI_HAVE_AVX2
constexpr KernelTable kAvx2{avx2::dot, avx2::axpy, avx2::scale, avx2::sum_squares, avx2::add_scaled};
#endif

Isa select_isa() {
    if (const char* forced = std::getenv("BARFI_SIMD")) {
        if (std::string(forced) == "scalar") return Isa::Scalar;
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

bool cpu_has_avx2() {
#if BARFI_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& table_for(Isa isa) {
    if (isa == Isa::Scalar) return kScalar;
#if BARFI_HAVE_AVX2
    if (cpu_has_avx2()) return kAvx2;
#endif
    throw UsageError("AVX2 kernels requested but not available on this CPU");
}

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

const KernelTable& active() {
    static const KernelTable& table = table_for(active_isa());
    return table;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace barfi::simd
