// NEON variant of the BM25 accumulation kernel (aarch64 only; NEON is
// baseline there, no runtime probe needed).

#include "caspr/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace caspr::kernels {

void bm25_accumulate_neon(const std::uint32_t* ords, const std::uint32_t* tfs,
                          std::size_t count, const double* norms, double weight,
                          double* acc) {
    const float64x2_t w = vdupq_n_f64(weight);
    std::size_t i = 0;

    for (; i + 2 <= count; i += 2) {
        const std::uint32_t o0 = ords[i + 0];
        const std::uint32_t o1 = ords[i + 1];

        const float64x2_t tf2 = {static_cast<double>(tfs[i + 0]),
                                 static_cast<double>(tfs[i + 1])};
        const float64x2_t norm2 = {norms[o0], norms[o1]};

        // (weight * tf) / (tf + norm), same order as the scalar kernel
        const float64x2_t contrib = vdivq_f64(vmulq_f64(w, tf2), vaddq_f64(tf2, norm2));

        acc[o0] += vgetq_lane_f64(contrib, 0);
        acc[o1] += vgetq_lane_f64(contrib, 1);
    }

    for (; i < count; ++i) {
        const std::uint32_t ord = ords[i];
        const double tf = static_cast<double>(tfs[i]);
        acc[ord] += (weight * tf) / (tf + norms[ord]);
    }
}

}  // namespace caspr::kernels

#endif  // aarch64
