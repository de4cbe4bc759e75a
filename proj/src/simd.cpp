#include "polarq/simd.hpp"

#include <atomic>
#include <cmath>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define POLARQ_HAVE_AVX2_TARGET 1
#include <immintrin.h>
#elif defined(__aarch64__)
#define POLARQ_HAVE_NEON 1
#include <arm_neon.h>
#endif

namespace polarq::simd {

namespace scalar {

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double sum_sqrt_prod(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

void axpy(double* dst, double c, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += c * src[i];
}

void scale(double* dst, double c, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = c * src[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace scalar

#ifdef POLARQ_HAVE_AVX2_TARGET
namespace avx2 {

__attribute__((target("avx2,fma")))
static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sw = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

__attribute__((target("avx2,fma")))
double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

__attribute__((target("avx2,fma")))
double sum_sqrt_prod(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(p));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

__attribute__((target("avx2,fma")))
void axpy(double* dst, double c, const double* src, std::size_t n) {
    __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        d = _mm256_fmadd_pd(vc, _mm256_loadu_pd(src + i), d);
        _mm256_storeu_pd(dst + i, d);
    }
    for (; i < n; ++i) dst[i] += c * src[i];
}

__attribute__((target("avx2,fma")))
void scale(double* dst, double c, const double* src, std::size_t n) {
    __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(vc, _mm256_loadu_pd(src + i)));
    for (; i < n; ++i) dst[i] = c * src[i];
}

__attribute__((target("avx2,fma")))
double max_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(signmask, d));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > m) m = lanes[k];
    for (; i < n; ++i) {
        double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace avx2
#endif

#ifdef POLARQ_HAVE_NEON
namespace neon {

double sum(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double sum_sqrt_prod(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vsqrtq_f64(vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

void axpy(double* dst, double c, const double* src, std::size_t n) {
    float64x2_t vc = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(dst + i, vfmaq_f64(vld1q_f64(dst + i), vc, vld1q_f64(src + i)));
    for (; i < n; ++i) dst[i] += c * src[i];
}

void scale(double* dst, double c, const double* src, std::size_t n) {
    float64x2_t vc = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(dst + i, vmulq_f64(vc, vld1q_f64(src + i)));
    for (; i < n; ++i) dst[i] = c * src[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vmaxq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) {
        double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace neon
#endif

namespace {

struct Dispatch {
    double (*sum)(const double*, std::size_t);
    double (*sum_sqrt_prod)(const double*, const double*, std::size_t);
    void (*axpy)(double*, double, const double*, std::size_t);
    void (*scale)(double*, double, const double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
    bool vectorized;
};

constexpr Dispatch kScalar{scalar::sum, scalar::sum_sqrt_prod, scalar::axpy,
                           scalar::scale, scalar::max_abs_diff, false};

std::atomic<bool> g_force_scalar{false};

Dispatch resolve() {
    if (g_force_scalar.load(std::memory_order_relaxed)) return kScalar;
#ifdef POLARQ_HAVE_AVX2_TARGET
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Dispatch{avx2::sum, avx2::sum_sqrt_prod, avx2::axpy,
                        avx2::scale, avx2::max_abs_diff, true};
#endif
#ifdef POLARQ_HAVE_NEON
    return Dispatch{neon::sum, neon::sum_sqrt_prod, neon::axpy,
                    neon::scale, neon::max_abs_diff, true};
#endif
    return kScalar;
}

const Dispatch& table() {
    // resolved per call site visit; cheap enough and honors set_force_scalar
    static thread_local Dispatch d = resolve();
    static thread_local bool forced = g_force_scalar.load(std::memory_order_relaxed);
    bool now = g_force_scalar.load(std::memory_order_relaxed);
    if (now != forced) {
        d = resolve();
        forced = now;
    }
    return d;
}

} // namespace

double sum(const double* a, std::size_t n) { return table().sum(a, n); }

double sum_sqrt_prod(const double* a, const double* b, std::size_t n) {
    return table().sum_sqrt_prod(a, b, n);
}

void axpy(double* dst, double c, const double* src, std::size_t n) {
    table().axpy(dst, c, src, n);
}

void scale(double* dst, double c, const double* src, std::size_t n) {
    table().scale(dst, c, src, n);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    return table().max_abs_diff(a, b, n);
}

void set_force_scalar(bool v) { g_force_scalar.store(v, std::memory_order_relaxed); }

bool vector_path_active() { return table().vectorized; }

} // namespace polarq::simd
