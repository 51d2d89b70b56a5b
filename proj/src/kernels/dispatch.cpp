#include "caspr/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "caspr/error.hpp"

namespace caspr::kernels {

namespace {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Kind best_supported() {
#if defined(__aarch64__)
    return Kind::Neon;
#else
    return avx2_supported() ? Kind::Avx2 : Kind::Scalar;
#endif
}

bool kind_available(Kind kind) {
    switch (kind) {
        case Kind::Auto:
        case Kind::Scalar:
            return true;
        case Kind::Avx2:
            return avx2_supported();
        case Kind::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Kind initial_kind() {
    if (const char* env = std::getenv("CASPR_KERNEL")) {
        const Kind requested = parse_kind(env);
        if (requested != Kind::Auto && kind_available(requested)) return requested;
        return best_supported();
    }
    return best_supported();
}

std::atomic<Kind>& active_slot() {
    static std::atomic<Kind> slot{initial_kind()};
    return slot;
}

}  // namespace

std::vector<Kind> available_kinds() {
    std::vector<Kind> kinds{Kind::Scalar};
    if (avx2_supported()) kinds.push_back(Kind::Avx2);
#if defined(__aarch64__)
    kinds.push_back(Kind::Neon);
#endif
    return kinds;
}

void force_kind(Kind kind) {
    if (kind == Kind::Auto) {
        active_slot().store(best_supported());
        return;
    }
    if (!kind_available(kind)) {
        throw Error("kernel variant not available on this machine: " +
                    std::string(kind_name(kind)));
    }
    active_slot().store(kind);
}

Kind active_kind() { return active_slot().load(); }

std::string_view kind_name(Kind kind) {
    switch (kind) {
        case Kind::Auto: return "auto";
        case Kind::Scalar: return "scalar";
        case Kind::Avx2: return "avx2";
        case Kind::Neon: return "neon";
    }
    return "unknown";
}

Kind parse_kind(std::string_view name) {
    if (name == "auto") return Kind::Auto;
    if (name == "scalar") return Kind::Scalar;
    if (name == "avx2") return Kind::Avx2;
    if (name == "neon") return Kind::Neon;
    throw Error("unknown kernel variant: " + std::string(name) +
                " (expected auto|scalar|avx2|neon)");
}

Bm25AccumulateFn bm25_accumulate_for(Kind kind) {
    switch (kind) {
        case Kind::Auto:
            return bm25_accumulate_for(best_supported());
        case Kind::Scalar:
            return &bm25_accumulate_scalar;
        case Kind::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (avx2_supported()) return &bm25_accumulate_avx2;
#endif
            throw Error("kernel variant not available on this machine: avx2");
        case Kind::Neon:
#if defined(__aarch64__)
            return &bm25_accumulate_neon;
#else
            throw Error("kernel variant not available on this machine: neon");
#endif
    }
    return &bm25_accumulate_scalar;
}

Bm25AccumulateFn bm25_accumulate() { return bm25_accumulate_for(active_kind()); }

}  // namespace caspr::kernels
