#pragma once

// Desk-scale symmetric primitives: SHA-256 and HMAC (OpenSSL), deterministic
// authenticated encryption, key-identified signatures with appendix, PRF/PUF.
// These model protocol logic; they are not hardened implementations.

#ifndef OPENSSL_SUPPRESS_DEPRECATED
#define OPENSSL_SUPPRESS_DEPRECATED
#endif

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathauth/errors.hpp"

namespace pathauth {

using Bytes = std::vector<std::uint8_t>;
using Rng = std::mt19937_64;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline Bytes cat(std::initializer_list<std::span<const std::uint8_t>> parts) {
    Bytes out;
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline void append_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t read_u64(std::span<const std::uint8_t> in, std::size_t at) {
    if (at + 8 > in.size()) throw UsageError("read_u64 past end");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[at + i];
    return v;
}

inline Bytes be64(std::uint64_t v) {
    Bytes out;
    append_u64(out, v);
    return out;
}

inline std::string to_hex(std::span<const std::uint8_t> b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (auto x : b) {
        out.push_back(digits[x >> 4]);
        out.push_back(digits[x & 15]);
    }
    return out;
}

inline Bytes from_hex(std::string_view s) {
    if (s.size() % 2) throw UsageError("odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw UsageError(std::string("bad hex digit '") + c + "'");
    };
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(s[2 * i]) << 4 | nibble(s[2 * i + 1]));
    return out;
}

inline Bytes random_bytes(Rng& rng, std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

inline constexpr std::size_t kDigestSize = 32;

inline Bytes hash(std::span<const std::uint8_t> data) {
    Bytes out(kDigestSize);
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
    return out;
}

inline Bytes mac(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
    Bytes out(kDigestSize);
    unsigned int len = 0;
    HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len);
    return out;
}

/// Keyed pseudorandom function; always 32 bytes.
inline Bytes prf(std::span<const std::uint8_t> key, std::span<const std::uint8_t> input) { return mac(key, input); }

inline Bytes xor_bytes(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw UsageError("xor of unequal lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

/// How composite hash inputs such as ID||f||pwd||r are encoded.
enum class ConcatMode {
    Raw,            // plain byte concatenation
    LengthPrefixed, // each field preceded by its 8-byte length
};

inline Bytes encode_fields(ConcatMode mode, const std::vector<Bytes>& fields) {
    Bytes out;
    for (const auto& f : fields) {
        if (mode == ConcatMode::LengthPrefixed) append_u64(out, f.size());
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

/// Splits a length-prefixed encoding into exactly `count` fields; nullopt if malformed.
inline std::optional<std::vector<Bytes>> decode_fields(std::span<const std::uint8_t> enc, std::size_t count) {
    std::vector<Bytes> out;
    std::size_t at = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (at + 8 > enc.size()) return std::nullopt;
        const auto len = read_u64(enc, at);
        at += 8;
        if (len > enc.size() - at) return std::nullopt;
        out.emplace_back(enc.begin() + static_cast<std::ptrdiff_t>(at),
                         enc.begin() + static_cast<std::ptrdiff_t>(at + len));
        at += len;
    }
    if (at != enc.size()) return std::nullopt;
    return out;
}

/// Splits a length-prefixed encoding into however many fields it holds; nullopt if malformed.
inline std::optional<std::vector<Bytes>> decode_record(std::span<const std::uint8_t> enc) {
    std::vector<Bytes> out;
    std::size_t at = 0;
    while (at < enc.size()) {
        if (at + 8 > enc.size()) return std::nullopt;
        const auto len = read_u64(enc, at);
        at += 8;
        if (len > enc.size() - at) return std::nullopt;
        out.emplace_back(enc.begin() + static_cast<std::ptrdiff_t>(at),
                         enc.begin() + static_cast<std::ptrdiff_t>(at + len));
        at += len;
    }
    return out;
}

inline Bytes encode_record(const std::vector<Bytes>& fields) { return encode_fields(ConcatMode::LengthPrefixed, fields); }

/// SHA-256 padding appended to a message of `message_len` bytes.
inline Bytes sha256_padding(std::uint64_t message_len) {
    Bytes pad{0x80};
    while ((message_len + pad.size()) % 64 != 56) pad.push_back(0);
    append_u64(pad, message_len * 8);
    return pad;
}

/// Continues SHA-256 from a published digest of an unknown message of known
/// length: returns H(message || padding(message) || suffix) without the message.
inline Bytes sha256_extend(std::span<const std::uint8_t> digest, std::uint64_t message_len,
                           std::span<const std::uint8_t> suffix) {
    if (digest.size() != kDigestSize) throw UsageError("sha256_extend needs a 32-byte digest");
    SHA256_CTX ctx;
    SHA256_Init(&ctx);
    for (int i = 0; i < 8; ++i)
        ctx.h[i] = (static_cast<SHA_LONG>(digest[4 * i]) << 24) | (static_cast<SHA_LONG>(digest[4 * i + 1]) << 16) |
                   (static_cast<SHA_LONG>(digest[4 * i + 2]) << 8) | static_cast<SHA_LONG>(digest[4 * i + 3]);
    const std::uint64_t consumed_bits = (message_len + sha256_padding(message_len).size()) * 8;
    ctx.Nl = static_cast<SHA_LONG>(consumed_bits & 0xffffffffu);
    ctx.Nh = static_cast<SHA_LONG>(consumed_bits >> 32);
    ctx.num = 0;
    SHA256_Update(&ctx, suffix.data(), suffix.size());
    Bytes out(kDigestSize);
    SHA256_Final(out.data(), &ctx);
    return out;
}

struct ExtensionProbeResult {
    Bytes forged_message; // encoding || padding || suffix
    Bytes forged_digest;  // computed from the digest alone
    bool digest_matches = false;  // forged_digest == hash(forged_message)
    bool message_accepted = false; // forged_message decodes as a field tuple of the same arity
};

/// Attempts a length extension of hash(encode_fields(mode, fields)) knowing
/// only the digest and the encoding length. Raw encodings have no framing, so
/// any tail is absorbed into the last field.
inline ExtensionProbeResult probe_length_extension(ConcatMode mode, const std::vector<Bytes>& fields,
                                                   std::span<const std::uint8_t> suffix) {
    const auto encoded = encode_fields(mode, fields);
    const auto digest = hash(encoded);
    ExtensionProbeResult r;
    r.forged_digest = sha256_extend(digest, encoded.size(), suffix);
    r.forged_message = encoded;
    const auto pad = sha256_padding(encoded.size());
    r.forged_message.insert(r.forged_message.end(), pad.begin(), pad.end());
    r.forged_message.insert(r.forged_message.end(), suffix.begin(), suffix.end());
    r.digest_matches = hash(r.forged_message) == r.forged_digest;
    r.message_accepted = mode == ConcatMode::Raw || decode_fields(r.forged_message, fields.size()).has_value();
    return r;
}

// ---------------------------------------------------------------------------
// Deterministic authenticated encryption (SIV construction over HMAC-SHA256).
// ct = iv(16) || m XOR AES-256-CTR(HMAC(key, "ctr"), iv); iv = HMAC(key, "siv" || m)[0..16).
// Equal (key, message) pairs give equal ciphertexts.

inline constexpr std::size_t kSivSize = 16;

namespace detail {

inline Bytes keystream(std::span<const std::uint8_t> key, std::span<const std::uint8_t> iv, std::size_t n) {
    const Bytes k = mac(key, to_bytes("ctr"));
    Bytes out(n, 0);
    if (n == 0) return out;
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
    int len = 0;
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, k.data(), iv.data()) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, out.data(), static_cast<int>(n)) != 1)
        throw std::runtime_error("AES-CTR keystream failed");
    return out;
}

inline Bytes siv(std::span<const std::uint8_t> key, std::span<const std::uint8_t> m) {
    Bytes in = to_bytes("siv");
    in.insert(in.end(), m.begin(), m.end());
    auto t = mac(key, in);
    t.resize(kSivSize);
    return t;
}

} // namespace detail

inline Bytes sym_enc(std::span<const std::uint8_t> key, std::span<const std::uint8_t> m) {
    auto iv = detail::siv(key, m);
    auto ks = detail::keystream(key, iv, m.size());
    Bytes out = iv;
    for (std::size_t i = 0; i < m.size(); ++i) out.push_back(m[i] ^ ks[i]);
    return out;
}

/// Throws AuthenticationError when the ciphertext was not produced under `key`.
inline Bytes sym_dec(std::span<const std::uint8_t> key, std::span<const std::uint8_t> ct) {
    if (ct.size() < kSivSize) throw AuthenticationError("ciphertext shorter than its IV");
    auto iv = ct.first(kSivSize);
    auto body = ct.subspan(kSivSize);
    auto ks = detail::keystream(key, iv, body.size());
    Bytes m(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) m[i] = body[i] ^ ks[i];
    if (detail::siv(key, m) != Bytes(iv.begin(), iv.end())) throw AuthenticationError("sym_dec: tag mismatch");
    return m;
}

inline std::optional<Bytes> try_sym_dec(std::span<const std::uint8_t> key, std::span<const std::uint8_t> ct) {
    try {
        return sym_dec(key, ct);
    } catch (const AuthenticationError&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Signatures with appendix, simulated as key-identified MACs. The message
// travels in the clear next to the tag, so anyone can strip the signature.

class VerifyKey;

class SigningKey {
public:
    SigningKey() = default;
    SigningKey(std::string id, Bytes secret) : id_(std::move(id)), secret_(std::move(secret)) {}
    static SigningKey generate(std::string id, Rng& rng) { return {std::move(id), random_bytes(rng, 32)}; }

    const std::string& id() const noexcept { return id_; }
    const Bytes& secret() const noexcept { return secret_; }
    VerifyKey verify_key() const;

private:
    std::string id_;
    Bytes secret_;
};

/// Public verification handle. It embeds the MAC secret so verification can be
/// simulated; protocol and adversary code only ever call verify() on it.
class VerifyKey {
public:
    VerifyKey() = default;
    const std::string& id() const noexcept { return id_; }

private:
    friend class SigningKey;
    friend bool verify(const VerifyKey&, std::span<const std::uint8_t>, const struct SignatureWithAppendix&);
    VerifyKey(std::string id, Bytes secret) : id_(std::move(id)), secret_(std::move(secret)) {}
    std::string id_;
    Bytes secret_;
};

inline VerifyKey SigningKey::verify_key() const { return VerifyKey(id_, secret_); }

struct SignatureWithAppendix {
    Bytes message;
    Bytes tag;
    std::string signer;

    friend bool operator==(const SignatureWithAppendix&, const SignatureWithAppendix&) = default;

    Bytes serialize() const {
        Bytes out = to_bytes("SIG1");
        append_u64(out, signer.size());
        out.insert(out.end(), signer.begin(), signer.end());
        append_u64(out, message.size());
        out.insert(out.end(), message.begin(), message.end());
        out.insert(out.end(), tag.begin(), tag.end());
        return out;
    }

    static std::optional<SignatureWithAppendix> parse(std::span<const std::uint8_t> in) {
        if (in.size() < 4 + 8 || !std::equal(in.begin(), in.begin() + 4, "SIG1")) return std::nullopt;
        std::size_t at = 4;
        const auto slen = read_u64(in, at);
        at += 8;
        if (slen > in.size() - at) return std::nullopt;
        SignatureWithAppendix s;
        s.signer.assign(in.begin() + static_cast<std::ptrdiff_t>(at), in.begin() + static_cast<std::ptrdiff_t>(at + slen));
        at += slen;
        if (at + 8 > in.size()) return std::nullopt;
        const auto mlen = read_u64(in, at);
        at += 8;
        if (mlen > in.size() - at || in.size() - at - mlen != kDigestSize) return std::nullopt;
        s.message.assign(in.begin() + static_cast<std::ptrdiff_t>(at), in.begin() + static_cast<std::ptrdiff_t>(at + mlen));
        s.tag.assign(in.begin() + static_cast<std::ptrdiff_t>(at + mlen), in.end());
        return s;
    }
};

inline SignatureWithAppendix sign(const SigningKey& sk, std::span<const std::uint8_t> m) {
    Bytes in = to_bytes(sk.id());
    in.push_back(0);
    in.insert(in.end(), m.begin(), m.end());
    return {Bytes(m.begin(), m.end()), mac(sk.secret(), in), sk.id()};
}

inline bool verify(const VerifyKey& pk, std::span<const std::uint8_t> m, const SignatureWithAppendix& sig) {
    if (sig.signer != pk.id_ || !std::equal(m.begin(), m.end(), sig.message.begin(), sig.message.end())) return false;
    Bytes in = to_bytes(pk.id_);
    in.push_back(0);
    in.insert(in.end(), m.begin(), m.end());
    return mac(pk.secret_, in) == sig.tag;
}

// ---------------------------------------------------------------------------

/// Physically unclonable function modelled as a PRF under a hidden per-device key.
class Puf {
public:
    Puf(std::string_view device_id, std::span<const std::uint8_t> fabrication_seed) {
        Bytes in = to_bytes("puf-device:");
        in.insert(in.end(), device_id.begin(), device_id.end());
        hidden_key_ = mac(fabrication_seed, in);
    }
    Bytes operator()(std::span<const std::uint8_t> challenge) const { return prf(hidden_key_, challenge); }

private:
    Bytes hidden_key_;
};

inline Puf puf(std::string_view device_id, std::span<const std::uint8_t> fabrication_seed) {
    return Puf(device_id, fabrication_seed);
}

} // namespace pathauth
