#pragma once
// BM25 accumulation kernels: a scalar reference implementation plus SIMD
// variants selected at runtime. All variants are elementwise-identical
// (same operation order per posting), so kernel choice never changes scores.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace caspr::kernels {

// Adds one term's BM25 contributions into a dense accumulator array:
//
//   acc[ords[i]] += weight * tfs[i] / (tfs[i] + norms[ords[i]])
//
// for i in [0, count). `weight` folds idf * (k1 + 1); `norms[d]` is the
// per-document length normalizer k1 * (1 - b + b * len[d] / avg_len).
// Within one term each document appears at most once, so accumulation
// order across lanes does not matter.
using Bm25AccumulateFn = void (*)(const std::uint32_t* ords, const std::uint32_t* tfs,
                                  std::size_t count, const double* norms, double weight,
                                  double* acc);

enum class Kind {
    Auto,    // pick the best supported variant
    Scalar,
    Avx2,
    Neon,
};

void bm25_accumulate_scalar(const std::uint32_t* ords, const std::uint32_t* tfs,
                            std::size_t count, const double* norms, double weight,
                            double* acc);

#if defined(__x86_64__) || defined(_M_X64)
void bm25_accumulate_avx2(const std::uint32_t* ords, const std::uint32_t* tfs,
                          std::size_t count, const double* norms, double weight,
                          double* acc);
#endif

#if defined(__aarch64__)
void bm25_accumulate_neon(const std::uint32_t* ords, const std::uint32_t* tfs,
                          std::size_t count, const double* norms, double weight,
                          double* acc);
#endif

// Variants usable on this machine (always includes Scalar).
std::vector<Kind> available_kinds();

// Force a specific variant; Kind::Auto restores detection. Throws if the
// requested variant is not available on this machine. The CASPR_KERNEL
// environment variable (scalar|avx2|neon|auto) provides the initial value.
void force_kind(Kind kind);

Kind active_kind();
std::string_view kind_name(Kind kind);
Kind parse_kind(std::string_view name);

// The accumulate function for the active variant.
Bm25AccumulateFn bm25_accumulate();

// Resolve a specific variant (for equivalence tests).
Bm25AccumulateFn bm25_accumulate_for(Kind kind);

}  // namespace caspr::kernels
