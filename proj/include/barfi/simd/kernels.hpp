#pragma once

// Dense double-precision vector kernels with a scalar reference path and an
// AVX2+FMA path. The active implementation is chosen once at startup from
// CPUID; BARFI_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace barfi::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    // out[i] = a[i] + alpha * b[i]
    void (*add_scaled)(const double* a, double alpha, const double* b, double* out, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void add_scaled(const double* a, double alpha, const double* b, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void add_scaled(const double* a, double alpha, const double* b, double* out, std::size_t n);
}  // namespace avx2

bool cpu_has_avx2();

/// Kernel table for a specific ISA. Throws UsageError if the CPU cannot run it.
const KernelTable& table_for(Isa isa);

/// The table selected for this process.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

}  // namespace barfi::simd
