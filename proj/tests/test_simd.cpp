#include "polarq/rng.hpp"
#include "polarq/simd.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace polarq;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
    Rng rng = Rng::stream(42, stream);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform();
    return v;
}

} // namespace

TEST_CASE("simd kernels: basic values") {
    double a[4] = {1.0, 2.0, 3.0, 4.0};
    double b[4] = {4.0, 2.0, 3.0, 1.0};
    CHECK(simd::sum(a, 4) == doctest::Approx(10.0));
    CHECK(simd::sum_sqrt_prod(a, b, 4) == doctest::Approx(2.0 + 2.0 + 3.0 + 2.0));
    double dst[4] = {1.0, 1.0, 1.0, 1.0};
    simd::axpy(dst, 2.0, a, 4);
    CHECK(dst[3] == doctest::Approx(9.0));
    simd::scale(dst, 0.5, a, 4);
    CHECK(dst[0] == doctest::Approx(0.5));
    CHECK(simd::max_abs_diff(a, b, 4) == doctest::Approx(3.0));
    CHECK(simd::sum(a, 0) == 0.0);
}

TEST_CASE("simd kernels: vector path matches scalar reference") {
    // odd lengths exercise the remainder loops
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 1000u}) {
        auto a = random_vec(n, n);
        auto b = random_vec(n, n + 100);

        simd::set_force_scalar(true);
        double s_sum = simd::sum(a.data(), n);
        double s_sp = simd::sum_sqrt_prod(a.data(), b.data(), n);
        double s_mad = simd::max_abs_diff(a.data(), b.data(), n);
        auto s_axpy = b;
        simd::axpy(s_axpy.data(), 1.7, a.data(), n);
        std::vector<double> s_scale(n);
        simd::scale(s_scale.data(), 0.3, a.data(), n);

        simd::set_force_scalar(false);
        CHECK(simd::sum(a.data(), n) == doctest::Approx(s_sum).epsilon(1e-13));
        CHECK(simd::sum_sqrt_prod(a.data(), b.data(), n) ==
              doctest::Approx(s_sp).epsilon(1e-13));
        CHECK(simd::max_abs_diff(a.data(), b.data(), n) == s_mad);
        auto v_axpy = b;
        simd::axpy(v_axpy.data(), 1.7, a.data(), n);
        std::vector<double> v_scale(n);
        simd::scale(v_scale.data(), 0.3, a.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(v_axpy[i] == doctest::Approx(s_axpy[i]).epsilon(1e-13));
            CHECK(v_scale[i] == s_scale[i]);
        }
    }
}
