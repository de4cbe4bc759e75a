#include "polarq/algebra.hpp"
#include "polarq/errors.hpp"

#include <doctest.h>

#include <algorithm>

using namespace polarq;

TEST_CASE("cyclic groups") {
    GroupTable g2 = cyclic_group(2);
    CHECK(g2.add(0, 0) == 0);
    CHECK(g2.add(1, 1) == 0);
    CHECK(g2.add(0, 1) == 1);

    GroupTable g3 = cyclic_group(3);
    CHECK(g3.add(2, 2) == 1);
    CHECK(g3.neg(1) == 2);

    GroupTable g4 = cyclic_group(4);
    CHECK(g4.add(3, 1) == 0);
}

TEST_CASE("prime and prime-power detection") {
    CHECK(is_prime(2));
    CHECK(is_prime(5));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(9));
    int p = 0, k = 0;
    CHECK(is_prime_power(8, &p, &k));
    CHECK(p == 2);
    CHECK(k == 3);
    CHECK(is_prime_power(9, &p, &k));
    CHECK(p == 3);
    CHECK(k == 2);
    CHECK_FALSE(is_prime_power(6));
    CHECK_FALSE(is_prime_power(12));
}

TEST_CASE("finite fields") {
    FieldTable f5 = finite_field(5);
    CHECK(f5.mul(2, 3) == 1);
    CHECK(f5.p == 5);
    CHECK(f5.k == 1);

    // characteristic-2 addition is XOR of the coefficient encodings
    FieldTable f4 = finite_field(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(f4.add(a, b) == (a ^ b));

    CHECK_THROWS_AS(finite_field(6), NotPrimePower);

    // prime field addition coincides with the cyclic group
    GroupTable g5 = cyclic_group(5);
    CHECK(f5.add_table == g5.add_table);

    FieldTable f9 = finite_field(9);
    CHECK(f9.p == 3);
    // multiplicative group: every nonzero element has an inverse
    for (int a = 1; a < 9; ++a) {
        bool inv = false;
        for (int b = 1; b < 9; ++b) inv |= f9.mul(a, b) == 1;
        CHECK(inv);
    }
}

TEST_CASE("permutation sets") {
    auto full3 = permutation_set(3, false);
    CHECK(full3.size() == 6);
    auto fix3 = permutation_set(3, true);
    CHECK(fix3.size() == 2);
    for (const auto& pi : fix3) CHECK(pi(0) == 0);
    CHECK_THROWS_AS(permutation_set(8, false), EnumerationTooLarge);

    // lexicographic order: identity first
    CHECK(full3[0].is_identity());

    // all distinct bijections
    for (const auto& pi : full3) {
        std::vector<int> img = pi.image;
        std::sort(img.begin(), img.end());
        CHECK(img == std::vector<int>{0, 1, 2});
    }
}

TEST_CASE("half multiplier sets") {
    FieldTable f5 = finite_field(5);
    CHECK(half_multiplier_set(f5) == std::vector<int>{1, 2});
    FieldTable f3 = finite_field(3);
    CHECK(half_multiplier_set(f3) == std::vector<int>{1});
    FieldTable f4 = finite_field(4);
    CHECK_THROWS_AS(half_multiplier_set(f4), EvenCharacteristic);

    // S and -S partition the nonzero elements
    FieldTable f9 = finite_field(9);
    auto s9 = half_multiplier_set(f9);
    CHECK(s9.size() == 4);
    for (int r : s9)
        CHECK(std::find(s9.begin(), s9.end(), f9.neg(r)) == s9.end());
}
