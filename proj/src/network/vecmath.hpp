#pragma once

// Elementwise transcendental functions over contiguous arrays. Uses glibc's
// vector math library when it is available, scalar libm otherwise.

#include <cmath>
#include <cstddef>

#if defined(LOSSBAL_HAVE_MVEC) && (defined(__AVX512F__) || defined(__AVX2__))
#include <immintrin.h>
#define LOSSBAL_VECMATH 1
extern "C" {
#if defined(__AVX512F__)
__m512d _ZGVeN8v_sin(__m512d);
__m512d _ZGVeN8v_cos(__m512d);
__m512d _ZGVeN8v_tanh(__m512d);
__m512d _ZGVeN8v_exp(__m512d);
#else
__m256d _ZGVdN4v_sin(__m256d);
__m256d _ZGVdN4v_cos(__m256d);
__m256d _ZGVdN4v_tanh(__m256d);
__m256d _ZGVdN4v_exp(__m256d);
#endif
}
#endif

namespace lossbal::nn::vecmath {

#if defined(LOSSBAL_VECMATH) && defined(__AVX512F__)
#define LOSSBAL_VEC_LOOP(name, scalar)                                                    \
    inline void name(const double* in, double* out, std::size_t n) {                      \
        std::size_t i = 0;                                                                \
        for (; i + 8 <= n; i += 8) _mm512_storeu_pd(out + i, _ZGVeN8v_##scalar(_mm512_loadu_pd(in + i))); \
        for (; i < n; ++i) out[i] = std::scalar(in[i]);                                   \
    }
#elif defined(LOSSBAL_VECMATH)
#define LOSSBAL_VEC_LOOP(name, scalar)                                                    \
    inline void name(const double* in, double* out, std::size_t n) {                      \
        std::size_t i = 0;                                                                \
        for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _ZGVdN4v_##scalar(_mm256_loadu_pd(in + i))); \
        for (; i < n; ++i) out[i] = std::scalar(in[i]);                                   \
    }
#else
#define LOSSBAL_VEC_LOOP(name, scalar)                                                    \
    inline void name(const double* in, double* out, std::size_t n) {                      \
        for (std::size_t i = 0; i < n; ++i) out[i] = std::scalar(in[i]);                  \
    }
#endif

LOSSBAL_VEC_LOOP(sin, sin)
LOSSBAL_VEC_LOOP(cos, cos)
LOSSBAL_VEC_LOOP(tanh, tanh)
LOSSBAL_VEC_LOOP(exp, exp)

#undef LOSSBAL_VEC_LOOP

}  // namespace lossbal::nn::vecmath
