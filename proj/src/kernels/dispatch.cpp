#include "simmap/error.hpp"
#include "simmap/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace simmap::kernels {

namespace detail {
#if !SIMMAP_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
bool cpu_has_avx2() { return false; }
#endif
#if !SIMMAP_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

Isa best_available() {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

Isa initial_isa() {
    if (const char* env = std::getenv("SIMMAP_KERNELS")) {
        const std::string want(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == isa_name(isa) && isa_available(isa)) return isa;
        }
    }
    return best_available();
}

std::atomic<const KernelTable*>& active_table() {
    static std::atomic<const KernelTable*> table{&table_for(initial_isa())};
    return table;
}

std::atomic<Isa>& active_tag() {
    static std::atomic<Isa> tag{initial_isa()};
    return tag;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return detail::avx2_table() != nullptr && detail::cpu_has_avx2();
        case Isa::neon: return detail::neon_table() != nullptr;
    }
    return false;
}

const KernelTable& table_for(Isa isa) {
    if (!isa_available(isa)) {
        throw ContractError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    }
    switch (isa) {
        case Isa::avx2: return *detail::avx2_table();
        case Isa::neon: return *detail::neon_table();
        case Isa::scalar: break;
    }
    return detail::scalar_table();
}

Isa active_isa() { return active_tag().load(); }

void set_active_isa(Isa isa) {
    active_table().store(&table_for(isa));
    active_tag().store(isa);
}

const KernelTable& active() { return *active_table().load(std::memory_order_relaxed); }

}  // namespace simmap::kernels
