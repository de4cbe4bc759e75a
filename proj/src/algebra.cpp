#include "polarq/algebra.hpp"

#include "polarq/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace polarq {

namespace {

void verify_group(const GroupTable& G) {
    const int q = G.q;
    if (q > 64) return; // exhaustive checks only at small order
    for (int a = 0; a < q; ++a) {
        if (G.add(a, 0) != a || G.add(0, a) != a)
            throw Error("group identity law violated");
        if (G.add(a, G.neg(a)) != 0)
            throw Error("group inverse law violated");
        for (int b = 0; b < q; ++b)
            for (int c = 0; c < q; ++c)
                if (G.add(G.add(a, b), c) != G.add(a, G.add(b, c)))
                    throw Error("group associativity violated");
    }
}

// polynomial helpers over GF(p), coefficient vectors with constant term first

std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
    const int dm = static_cast<int>(m.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= dm) {
        int da = static_cast<int>(a.size()) - 1;
        if (a[da] == 0) {
            a.pop_back();
            continue;
        }
        // m is monic; subtract a[da] * x^(da-dm) * m
        int c = a[da];
        for (int i = 0; i <= dm; ++i) {
            int& t = a[da - dm + i];
            t = ((t - c * m[i]) % p + p) % p;
        }
        while (!a.empty() && a.back() == 0) a.pop_back();
        if (a.empty()) break;
    }
    return a;
}

std::vector<int> poly_mul_mod(const std::vector<int>& a, const std::vector<int>& b,
                              const std::vector<int>& m, int p) {
    std::vector<int> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(r), m, p);
}

bool divides(const std::vector<int>& d, const std::vector<int>& f, int p) {
    return poly_mod(f, d, p).empty();
}

// f monic of degree k; irreducible iff no monic divisor of degree 1..k/2
bool irreducible(const std::vector<int>& f, int p) {
    const int k = static_cast<int>(f.size()) - 1;
    for (int dd = 1; dd <= k / 2; ++dd) {
        int count = 1;
        for (int i = 0; i < dd; ++i) count *= p;
        for (int enc = 0; enc < count; ++enc) {
            std::vector<int> d(dd + 1, 0);
            int e = enc;
            for (int i = 0; i < dd; ++i) {
                d[i] = e % p;
                e /= p;
            }
            d[dd] = 1;
            if (divides(d, f, p)) return false;
        }
    }
    return true;
}

std::vector<int> digits_of(int v, int p, int k) {
    std::vector<int> d(k, 0);
    for (int i = 0; i < k; ++i) {
        d[i] = v % p;
        v /= p;
    }
    return d;
}

int encode_digits(const std::vector<int>& d, int p) {
    int v = 0;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) v = v * p + d[i];
    return v;
}

void verify_field(const FieldTable& F) {
    const int q = F.q;
    if (q > 64) return;
    for (int a = 0; a < q; ++a) {
        if (F.mul(a, 1) != a || F.mul(1, a) != a)
            throw Error("field multiplicative identity violated");
        for (int b = 0; b < q; ++b) {
            if (F.mul(a, b) != F.mul(b, a))
                throw Error("field commutativity violated");
            for (int c = 0; c < q; ++c) {
                if (F.mul(F.mul(a, b), c) != F.mul(a, F.mul(b, c)))
                    throw Error("field multiplicative associativity violated");
                if (F.mul(a, F.add(b, c)) != F.add(F.mul(a, b), F.mul(a, c)))
                    throw Error("field distributivity violated");
            }
        }
    }
    // nonzero elements form a group: each has an inverse
    for (int a = 1; a < q; ++a) {
        bool inv = false;
        for (int b = 1; b < q; ++b)
            if (F.mul(a, b) == 1) inv = true;
        if (!inv) throw Error("field element without inverse");
    }
}

} // namespace

GroupTable FieldTable::additive_group() const {
    GroupTable G;
    G.q = q;
    G.add_table = add_table;
    G.neg_table = neg_table;
    return G;
}

bool Permutation::is_identity() const {
    for (int i = 0; i < size(); ++i)
        if (image[i] != i) return false;
    return true;
}

Permutation Permutation::identity(int q) {
    Permutation p;
    p.image.resize(q);
    std::iota(p.image.begin(), p.image.end(), 0);
    return p;
}

GroupTable cyclic_group(int q) {
    if (q < 2) throw Error("cyclic_group: order must be >= 2");
    GroupTable G;
    G.q = q;
    G.add_table.resize(q * q);
    G.neg_table.resize(q);
    for (int a = 0; a < q; ++a) {
        G.neg_table[a] = (q - a) % q;
        for (int b = 0; b < q; ++b) G.add_table[a * q + b] = (a + b) % q;
    }
    verify_group(G);
    return G;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool is_prime_power(int n, int* p_out, int* k_out) {
    if (n < 2) return false;
    for (int p = 2; p <= n; ++p) {
        if (!is_prime(p)) continue;
        if (n % p) continue;
        int k = 0, m = n;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        if (m == 1) {
            if (p_out) *p_out = p;
            if (k_out) *k_out = k;
            return true;
        }
        return false;
    }
    return false;
}

FieldTable finite_field(int q) {
    int p = 0, k = 0;
    if (q > 256 || !is_prime_power(q, &p, &k))
        throw NotPrimePower("q = " + std::to_string(q));

    FieldTable F;
    F.q = q;
    F.p = p;
    F.k = k;
    F.add_table.resize(q * q);
    F.mul_table.resize(q * q);
    F.neg_table.resize(q);

    if (k == 1) {
        F.modulus = {0, 1}; // x - 0 placeholder; arithmetic is plain mod p
        for (int a = 0; a < q; ++a) {
            F.neg_table[a] = (q - a) % q;
            for (int b = 0; b < q; ++b) {
                F.add_table[a * q + b] = (a + b) % q;
                F.mul_table[a * q + b] = (a * b) % q;
            }
        }
    } else {
        // smallest encoding of the non-leading coefficients wins
        std::vector<int> mod;
        int count = 1;
        for (int i = 0; i < k; ++i) count *= p;
        for (int enc = 0; enc < count; ++enc) {
            std::vector<int> f = digits_of(enc, p, k);
            f.push_back(1);
            if (irreducible(f, p)) {
                mod = f;
                break;
            }
        }
        F.modulus = mod;
        for (int a = 0; a < q; ++a) {
            auto da = digits_of(a, p, k);
            std::vector<int> na(k);
            for (int i = 0; i < k; ++i) na[i] = (p - da[i]) % p;
            F.neg_table[a] = encode_digits(na, p);
            for (int b = 0; b < q; ++b) {
                auto db = digits_of(b, p, k);
                std::vector<int> s(k);
                for (int i = 0; i < k; ++i) s[i] = (da[i] + db[i]) % p;
                F.add_table[a * q + b] = encode_digits(s, p);
                auto prod = poly_mul_mod(da, db, mod, p);
                prod.resize(k, 0);
                F.mul_table[a * q + b] = encode_digits(prod, p);
            }
        }
    }
    verify_group(F.additive_group());
    verify_field(F);
    return F;
}

std::vector<Permutation> permutation_set(int q, bool fix_zero) {
    if (q < 2) throw Error("permutation_set: q must be >= 2");
    if ((!fix_zero && q > 6) || (fix_zero && q > 7))
        throw EnumerationTooLarge("q = " + std::to_string(q) +
                                  (fix_zero ? " with fix_zero" : ""));
    std::vector<Permutation> out;
    Permutation p = Permutation::identity(q);
    do {
        if (!fix_zero || p.image[0] == 0) out.push_back(p);
    } while (std::next_permutation(p.image.begin(), p.image.end()));
    return out;
}

std::vector<int> half_multiplier_set(const FieldTable& F) {
    if (F.p == 2) throw EvenCharacteristic("q = " + std::to_string(F.q));
    std::vector<int> s;
    for (int r = 1; r < F.q; ++r)
        if (r <= F.neg(r)) s.push_back(r);
    return s;
}

} // namespace polarq
