// AVX2 variant of the BM25 accumulation kernel. This translation unit is
// compiled with -mavx2; callers must check availability via the dispatcher.

#include "caspr/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace caspr::kernels {

void bm25_accumulate_avx2(const std::uint32_t* ords, const std::uint32_t* tfs,
                          std::size_t count, const double* norms, double weight,
                          double* acc) {
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t i = 0;

    for (; i + 4 <= count; i += 4) {
        const __m128i ord4 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ords + i));
        const __m128i tf4i = _mm_loadu_si128(reinterpret_cast<const __m128i*>(tfs + i));

        const __m256d tf4 = _mm256_cvtepi32_pd(tf4i);
        const __m256d norm4 = _mm256_i32gather_pd(norms, ord4, 8);

        // (weight * tf) / (tf + norm), same order as the scalar kernel
        const __m256d contrib = _mm256_div_pd(_mm256_mul_pd(w, tf4), _mm256_add_pd(tf4, norm4));

        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, contrib);

        // AVX2 has no scatter; the accumulate step stays scalar.
        acc[ords[i + 0]] += lanes[0];
        acc[ords[i + 1]] += lanes[1];
        acc[ords[i + 2]] += lanes[2];
        acc[ords[i + 3]] += lanes[3];
    }

    for (; i < count; ++i) {
        const std::uint32_t ord = ords[i];
        const double tf = static_cast<double>(tfs[i]);
        acc[ord] += (weight * tf) / (tf + norms[ord]);
    }
}

}  // namespace caspr::kernels

#endif  // x86_64
