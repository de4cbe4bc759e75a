#pragma once

#include <cstddef>

// Small arithmetic kernels behind the channel math. Each has a scalar
// reference implementation and (on x86-64) an AVX2+FMA variant selected
// once at runtime from CPUID. The scalar versions stay visible so the
// two paths can be equivalence-tested against each other.
namespace polarq::simd {

// sum of a[i]
double sum(const double* a, std::size_t n);

// sum of sqrt(a[i] * b[i]); inputs must be nonnegative
double sum_sqrt_prod(const double* a, const double* b, std::size_t n);

// dst[i] += c * src[i]
void axpy(double* dst, double c, const double* src, std::size_t n);

// dst[i] = c * src[i]
void scale(double* dst, double c, const double* src, std::size_t n);

// max over i of |a[i] - b[i]|
double max_abs_diff(const double* a, const double* b, std::size_t n);

namespace scalar {
double sum(const double* a, std::size_t n);
double sum_sqrt_prod(const double* a, const double* b, std::size_t n);
void axpy(double* dst, double c, const double* src, std::size_t n);
void scale(double* dst, double c, const double* src, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
} // namespace scalar

// Force the scalar path (for testing); takes effect on the next call.
void set_force_scalar(bool v);

// True when the dispatched kernels are the vector variants.
bool vector_path_active();

} // namespace polarq::simd
