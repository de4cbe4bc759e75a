#pragma once

#include <vector>

namespace polarq {

// Z_q addition. Tables are verified against the group axioms at
// construction for q <= 64.
struct GroupTable {
    int q = 0;
    std::vector<int> add_table; // q*q
    std::vector<int> neg_table; // q

    int add(int a, int b) const { return add_table[a * q + b]; }
    int neg(int a) const { return neg_table[a]; }
};

// GF(p^k) with the lexicographically-first irreducible monic modulus.
// Element i encodes the polynomial whose coefficients are the base-p
// digits of i (least significant digit = constant term).
struct FieldTable {
    int q = 0;
    int p = 0; // characteristic
    int k = 0; // extension degree
    std::vector<int> add_table; // q*q
    std::vector<int> mul_table; // q*q
    std::vector<int> neg_table; // q
    std::vector<int> modulus;   // k+1 coefficients, constant term first

    int add(int a, int b) const { return add_table[a * q + b]; }
    int mul(int a, int b) const { return mul_table[a * q + b]; }
    int neg(int a) const { return neg_table[a]; }

    GroupTable additive_group() const;
};

struct Permutation {
    std::vector<int> image;

    int size() const { return static_cast<int>(image.size()); }
    int operator()(int x) const { return image[x]; }
    bool is_identity() const;

    static Permutation identity(int q);
};

GroupTable cyclic_group(int q);

bool is_prime(int n);
bool is_prime_power(int n, int* p_out = nullptr, int* k_out = nullptr);

FieldTable finite_field(int q);

// All q! permutations of {0..q-1} in lexicographic order, or the (q-1)!
// permutations fixing 0. Guarded: q <= 6 full, q <= 7 with fix_zero.
std::vector<Permutation> permutation_set(int q, bool fix_zero);

// For odd characteristic: one representative from each {r, -r} pair of
// nonzero elements (the smaller encoding), so the set has size (q-1)/2.
std::vector<int> half_multiplier_set(const FieldTable& F);

} // namespace polarq
