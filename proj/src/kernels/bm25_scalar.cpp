#include "caspr/kernels.hpp"

namespace caspr::kernels {

// Reference kernel. The SIMD variants replicate this exact operation order
// per element (mul, add, div, accumulate), so results are bit-identical.
void bm25_accumulate_scalar(const std::uint32_t* ords, const std::uint32_t* tfs,
                            std::size_t count, const double* norms, double weight,
                            double* acc) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t ord = ords[i];
        const double tf = static_cast<double>(tfs[i]);
        acc[ord] += (weight * tf) / (tf + norms[ord]);
    }
}

}  // namespace caspr::kernels
