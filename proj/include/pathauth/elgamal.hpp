#pragma once

// Multiplicative ElGamal over the order-q subgroup of Z_p^*, plus a hybrid
// public-key encryption built on it.

#include <cstdint>
#include <optional>
#include <random>

#include "pathauth/crypto.hpp"
#include "pathauth/field.hpp"

namespace pathauth {

struct Group {
    u64 p = kGroupPrime;
    u64 q = kFieldPrime;
    u64 g = 4;

    u64 pow(u64 base, u64 exponent) const { return powmod(base, exponent, p); }
    u64 mul(u64 a, u64 b) const { return mulmod(a, b, p); }
    u64 inv(u64 a) const { return powmod(a, p - 2, p); }
    u64 random_exponent(Rng& rng) const { return std::uniform_int_distribution<u64>(1, q - 1)(rng); }
    /// Maps bytes into the subgroup as g^(H(data) mod q).
    u64 hash_to_group(std::span<const std::uint8_t> data) const { return pow(g, hash_to_exponent(data)); }
    u64 hash_to_exponent(std::span<const std::uint8_t> data) const { return read_u64(hash(data), 0) % q; }

    friend bool operator==(const Group&, const Group&) = default;
};

inline u64 group_pow(const Group& grp, u64 base, u64 exponent) { return grp.pow(base, exponent); }

struct ElGamalPublicKey {
    Group group;
    u64 h = 0;
    friend bool operator==(const ElGamalPublicKey&, const ElGamalPublicKey&) = default;
};

struct ElGamalSecretKey {
    Group group;
    u64 x = 0;
    ElGamalPublicKey public_key() const { return {group, group.pow(group.g, x)}; }
};

struct ElGamalKeyPair {
    ElGamalPublicKey pk;
    ElGamalSecretKey sk;
};

struct ElGamalCiphertext {
    u64 c1 = 0;
    u64 c2 = 0;
    ElGamalPublicKey pk;
    /// Randomizer used by the most recent encryption or re-randomization.
    u64 randomizer = 0;

    Bytes serialize() const {
        Bytes out;
        append_u64(out, c1);
        append_u64(out, c2);
        return out;
    }
    friend bool operator==(const ElGamalCiphertext& a, const ElGamalCiphertext& b) {
        return a.c1 == b.c1 && a.c2 == b.c2 && a.pk == b.pk;
    }
};

inline ElGamalKeyPair elgamal_keygen(Rng& rng, const Group& grp = {}) {
    ElGamalSecretKey sk{grp, grp.random_exponent(rng)};
    return {sk.public_key(), sk};
}

inline ElGamalCiphertext elgamal_enc(const ElGamalPublicKey& pk, u64 m, u64 r) {
    const auto& G = pk.group;
    if (m == 0 || m >= G.p) throw UsageError("ElGamal plaintext must lie in [1, p)");
    return {G.pow(G.g, r), G.mul(m, G.pow(pk.h, r)), pk, r};
}

inline ElGamalCiphertext elgamal_enc(const ElGamalPublicKey& pk, u64 m, Rng& rng) {
    return elgamal_enc(pk, m, pk.group.random_exponent(rng));
}

inline u64 elgamal_dec(const ElGamalSecretKey& sk, const ElGamalCiphertext& c) {
    const auto& G = sk.group;
    return G.mul(c.c2, G.inv(G.pow(c.c1, sk.x)));
}

inline ElGamalCiphertext hom_mul(const ElGamalCiphertext& a, const ElGamalCiphertext& b) {
    if (!(a.pk == b.pk)) throw UsageError("homomorphic operation on ciphertexts under different public keys");
    const auto& G = a.pk.group;
    return {G.mul(a.c1, b.c1), G.mul(a.c2, b.c2), a.pk, addmod(a.randomizer, b.randomizer, G.q)};
}

/// Encryption of m^e from an encryption of m.
inline ElGamalCiphertext hom_pow(const ElGamalCiphertext& c, u64 e) {
    const auto& G = c.pk.group;
    return {G.pow(c.c1, e), G.pow(c.c2, e), c.pk, mulmod(c.randomizer, e, G.q)};
}

inline ElGamalCiphertext rerandomize(const ElGamalCiphertext& c, Rng& rng) {
    return hom_mul(c, elgamal_enc(c.pk, 1, rng));
}

// Hybrid public-key encryption: g^r || sym_enc(H(h^r), m).

inline Bytes pk_enc(const ElGamalPublicKey& pk, std::span<const std::uint8_t> m, Rng& rng) {
    const auto& G = pk.group;
    const u64 r = G.random_exponent(rng);
    Bytes out;
    append_u64(out, G.pow(G.g, r));
    const auto key = hash(be64(G.pow(pk.h, r)));
    const auto body = sym_enc(key, m);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

/// Throws AuthenticationError when `ct` was not produced for this key.
inline Bytes pk_dec(const ElGamalSecretKey& sk, std::span<const std::uint8_t> ct) {
    if (ct.size() < 8) throw AuthenticationError("pk ciphertext too short");
    const u64 c1 = read_u64(ct, 0);
    const auto key = hash(be64(sk.group.pow(c1, sk.x)));
    return sym_dec(key, ct.subspan(8));
}

inline std::optional<Bytes> try_pk_dec(const ElGamalSecretKey& sk, std::span<const std::uint8_t> ct) {
    try {
        return pk_dec(sk, ct);
    } catch (const AuthenticationError&) {
        return std::nullopt;
    }
}

} // namespace pathauth
