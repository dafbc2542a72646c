#pragma once

// Nested hybrid encryption of a static path. Layer i is (m_i, Sig_M(m_i)) with
// m_i = pk_enc(pk_i, k_i) || sym_enc(k_i, (i, i+1, layer_{i+1})); the last
// layer wraps a path identifier. Each reader peels exactly one layer.

#include <map>

#include "pathauth/elgamal.hpp"
#include "pathauth/protocol.hpp"

namespace pathauth {

class StepAuthModel : public ProtocolModel {
public:
    // Deployed primitive sizes used for storage accounting.
    static constexpr std::size_t kSignatureBits = 512;
    static constexpr std::size_t kSessionKeyCipherBits = 384;
    static constexpr std::size_t kLayerBits = kSignatureBits + kSessionKeyCipherBits;
    static constexpr std::size_t kPathIdBits = 128;

    /// Storage for a secret with `layers` remaining layers.
    static constexpr std::size_t secret_bits(std::size_t layers) { return layers * kLayerBits + kPathIdBits; }

    std::string name() const override { return "stepauth"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::Checkpoint; }
    Architecture architecture() const override { return Architecture::Offline; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        manager_key_ = SigningKey::generate("stepauth-manager", env.rng);
        manager_vk_ = manager_key_.verify_key();
        for (const auto& r : config.readers) keys_[r] = elgamal_keygen(env.rng);
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            const auto& path = static_path(config, spec.id);
            for (const auto& r : path)
                if (!keys_.count(r)) throw UsageError("stepauth path reader " + r.value + " is not registered");
            auto path_id = random_bytes(env.rng, kPathIdBits / 8);
            path_ids_[path_id] = path;
            env.tag(spec.id).write(build(path, path_id, env.rng), {}, secret_bits(path.size()));
            env.trace.valid_path(spec.id, path);
        }
    }

    /// Claims are emitted by the final reader on arrival; this returns the latest one made by `verifier`.
    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(is_registered(verifier), name(), verifier);
        std::optional<std::size_t> last;
        for (auto idx : env.trace.claim_indices()) {
            const auto& c = std::get<PathClaim>(env.trace[idx].body);
            if (c.tag == t && c.claimant == verifier) last = idx;
        }
        return last;
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        if (auto it = keys_.find(r); it != keys_.end()) s.elgamal.push_back(it->second.sk);
        return s;
    }

    /// Layered secret for `path`; exposed for size checks.
    Bytes build(const ReaderSeq& path, const Bytes& path_id, Rng& rng) const {
        Bytes inner = path_id;
        for (std::size_t i = path.size(); i-- > 0;) {
            const auto session = random_bytes(rng, 32);
            Bytes body;
            append_u64(body, i + 1);
            append_u64(body, i + 2);
            body.insert(body.end(), inner.begin(), inner.end());
            const Bytes m = encode_record({pk_enc(keys_.at(path[i]).pk, session, rng), sym_enc(session, body)});
            inner = encode_record({m, sign(manager_key_, m).serialize()});
        }
        return inner;
    }

    const VerifyKey& manager_verify_key() const noexcept { return manager_vk_; }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto raw = read_tag(env, r, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        auto layer = decode_record(*raw);
        if (!layer || layer->size() != 2) return fail(detail, StepStatus::Rejected, "malformed secret");
        const auto& m = (*layer)[0];
        auto sig = SignatureWithAppendix::parse((*layer)[1]);
        if (!sig || !verify(manager_vk_, m, *sig)) return fail(detail, StepStatus::Rejected, "manager signature invalid");
        auto parts = decode_record(m);
        if (!parts || parts->size() != 2) return fail(detail, StepStatus::Rejected, "malformed layer");
        auto session = try_pk_dec(keys_.at(r).sk, (*parts)[0]);
        if (!session) return fail(detail, StepStatus::Rejected, "cannot decrypt layer");
        auto body = try_sym_dec(*session, (*parts)[1]);
        if (!body || body->size() < 16) return fail(detail, StepStatus::Rejected, "layer body invalid");
        const Bytes inner(body->begin() + 16, body->end());

        const auto pid = path_ids_.find(inner);
        const bool last = pid != path_ids_.end();
        const auto remaining = layers_for_size(inner.size());
        if (!remaining) return fail(detail, StepStatus::Rejected, "inner secret has unexpected size");
        if (!write_tag(env, r, t, inner, secret_bits(*remaining)))
            return fail(detail, StepStatus::Timeout, "tag write withheld");
        if (last && !offline()) env.trace.claim(t, pid->second, r);
        return StepStatus::Accepted;
    }

public:
    /// Encoded byte length of a secret with `layers` layers, mirroring build().
    static std::size_t encoded_size(std::size_t layers) {
        constexpr std::size_t signer = sizeof("stepauth-manager") - 1;
        constexpr std::size_t pk_cipher = 8 + kSivSize + 32;
        std::size_t size = kPathIdBits / 8;
        for (std::size_t k = 0; k < layers; ++k) {
            const std::size_t m = 8 + pk_cipher + 8 + kSivSize + 16 + size;
            const std::size_t sig = 4 + 8 + signer + 8 + m + kDigestSize;
            size = 8 + m + 8 + sig;
        }
        return size;
    }

    /// Layer count of an encoded secret, from its length.
    static std::optional<std::size_t> layers_for_size(std::size_t bytes) {
        for (std::size_t k = 0; encoded_size(k) <= bytes; ++k)
            if (encoded_size(k) == bytes) return k;
        return std::nullopt;
    }

private:
    SigningKey manager_key_;
    VerifyKey manager_vk_;
    std::map<Identifier, ElGamalKeyPair> keys_;
    std::map<Bytes, ReaderSeq> path_ids_;
};

} // namespace pathauth
