#pragma once

// Inner-loop arithmetic for the dense stages (Gram matvec, Lanczos
// projection, triangulation, neighbor search, residual variance).
//
// Each kernel has a portable scalar reference and, where the target
// supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from the running CPU; SIMMAP_KERNELS=scalar|avx2|neon
// in the environment overrides the choice. Vector variants reassociate
// sums, so they agree with the scalar reference to rounding, not bitwise.
// A given ISA is bitwise deterministic regardless of thread count.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace simmap::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
};

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

/// Table for a specific ISA; throws ContractError if it is not available.
const KernelTable& table_for(Isa isa);

Isa active_isa();
/// Switches the process-wide dispatch. Not thread-safe against concurrent
/// kernel calls; meant for tests and CLI startup.
void set_active_isa(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active().squared_distance(a.data(), b.data(), a.size());
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
bool cpu_has_avx2();
}  // namespace detail

}  // namespace simmap::kernels
