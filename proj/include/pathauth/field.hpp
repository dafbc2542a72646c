#pragma once

// Prime-field arithmetic and path polynomials.

#include <cstdint>
#include <random>
#include <vector>

#include "pathauth/errors.hpp"

namespace pathauth {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
inline u64 addmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) + b) % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Safe prime p = 2q + 1 backing the default group; q is the default field modulus.
inline constexpr u64 kGroupPrime = 2305843009213691579ULL;
inline constexpr u64 kFieldPrime = 1152921504606845789ULL;

class FieldElement {
public:
    FieldElement() = default;
    FieldElement(u64 value, u64 modulus) : value_(value % modulus), modulus_(modulus) {
        if (modulus < 2) throw UsageError("field modulus must be at least 2");
    }

    static FieldElement random(std::mt19937_64& rng, u64 modulus) {
        return {std::uniform_int_distribution<u64>(0, modulus - 1)(rng), modulus};
    }
    static FieldElement random_nonzero(std::mt19937_64& rng, u64 modulus) {
        return {std::uniform_int_distribution<u64>(1, modulus - 1)(rng), modulus};
    }

    u64 value() const noexcept { return value_; }
    u64 modulus() const noexcept { return modulus_; }

    friend FieldElement operator+(FieldElement a, FieldElement b) {
        same(a, b);
        return {addmod(a.value_, b.value_, a.modulus_), a.modulus_};
    }
    friend FieldElement operator*(FieldElement a, FieldElement b) {
        same(a, b);
        return {mulmod(a.value_, b.value_, a.modulus_), a.modulus_};
    }
    FieldElement pow(u64 e) const { return {powmod(value_, e, modulus_), modulus_}; }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

private:
    static void same(const FieldElement& a, const FieldElement& b) {
        if (a.modulus_ != b.modulus_) throw UsageError("field elements from different moduli");
    }
    u64 value_ = 0;
    u64 modulus_ = kFieldPrime;
};

/// Coefficients (a_0, ..., a_l); degree equals the path length l.
struct PathPolynomial {
    std::vector<FieldElement> coefficients;

    std::size_t degree() const {
        if (coefficients.empty()) throw UsageError("path polynomial without coefficients");
        return coefficients.size() - 1;
    }

    static PathPolynomial random(std::mt19937_64& rng, std::size_t length, u64 modulus) {
        PathPolynomial p;
        for (std::size_t i = 0; i <= length; ++i) p.coefficients.push_back(FieldElement::random_nonzero(rng, modulus));
        return p;
    }
};

/// a_0 * x0^l + sum_{i=1..l} a_i * x0^(l-i), each power computed directly.
inline FieldElement poly_eval(const PathPolynomial& p, const FieldElement& x0) {
    const std::size_t l = p.degree();
    const u64 q = x0.modulus();
    FieldElement acc(0, q);
    for (std::size_t i = 0; i <= l; ++i) acc = acc + p.coefficients[i] * x0.pow(l - i);
    return acc;
}

} // namespace pathauth
