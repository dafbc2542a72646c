#pragma once

// Offline signature chain on the tag plus masked records on a shared ledger.
//   a_0 = H(ID || f || pwd || r),  a_i = Sig_{v_i}(a_{i-1})
//   h_i = ID || f || pwd || r || i,  b_i = cv(a_{i-1}) xor H(h_i)
//   record_i = (sym_enc(H(h_i), ID), b_i)
// cv() is the 32-byte chain value: a_0 itself, or the signature tag of a_i.
// The patched variant derives the pseudo-identity key from PRF(pwd, h_i)
// instead of reusing H(h_i).

#include <map>

#include "pathauth/protocol.hpp"

namespace pathauth {

class RfChainModel : public ProtocolModel {
public:
    struct TagContent {
        Bytes id, flag, nonce, a;
    };

    std::string name() const override { return "rfchain"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::Backend; }
    Architecture architecture() const override { return Architecture::Online; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        backend_ = backend(config.option("backend", "B"));
        patched_ = config.option("patched", "0") == "1";
        mode_ = config.option("concat", "raw") == "raw" ? ConcatMode::Raw : ConcatMode::LengthPrefixed;
        pwd_ = random_bytes(env.rng, 16);
        flag_ = to_bytes("F");
        for (const auto& r : config.readers) {
            auto sk = SigningKey::generate(r.value, env.rng);
            verify_keys_.emplace(r.value, sk.verify_key());
            signing_keys_.emplace(r, std::move(sk));
        }
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            TagContent c{id_bytes(spec.id), flag_, random_bytes(env.rng, 16), {}};
            c.a = a0(c);
            env.tag(spec.id).write(serialize(c), {}, serialize(c).size() * 8);
        }
    }

    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(verifier == backend_, name(), verifier);
        auto raw = read_tag(env, verifier, t);
        if (!raw) {
            env.anomalies.push_back("rfchain: no reply from " + t.value);
            return std::nullopt;
        }
        auto c = parse(*raw);
        std::string why;
        auto signers = c ? verify_chain(*c, why) : std::nullopt;
        if (!signers) {
            env.anomalies.push_back("rfchain: chain of " + t.value + " rejected: " + (c ? why : "malformed"));
            return std::nullopt;
        }
        for (std::size_t i = 1; i <= signers->size(); ++i) {
            const auto expected = record_for(*c, i, chain_value(prefix_value(*c, i - 1)));
            bool found = false;
            for (const auto& rec : env.ledger.records()) found = found || rec == expected;
            if (!found) {
                env.anomalies.push_back("rfchain: ledger record " + std::to_string(i) + " missing for " + t.value);
                return std::nullopt;
            }
        }
        return env.trace.claim(t, *signers, verifier);
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        if (auto it = signing_keys_.find(r); it != signing_keys_.end()) {
            s.named["rfchain.pwd"] = pwd_;
            s.named["rfchain.sk." + r.value] = it->second.secret();
        }
        return s;
    }

    // Definitions exposed for recomputation in tests and attacks.

    Bytes a0(const TagContent& c) const { return hash(encode_fields(mode_, {c.id, c.flag, pwd_, c.nonce})); }

    Bytes h(const TagContent& c, std::size_t i) const { return h_with(c, i, pwd_); }
    Bytes h_with(const TagContent& c, std::size_t i, const Bytes& pwd) const {
        return encode_fields(mode_, {c.id, c.flag, pwd, c.nonce, be64(i)});
    }

    Bytes pseudo_id_key(const TagContent& c, std::size_t i) const {
        return patched_ ? prf(pwd_, h(c, i)) : hash(h(c, i));
    }

    /// 32-byte chain value of a chain element.
    static Bytes chain_value(const Bytes& a) {
        if (auto sig = SignatureWithAppendix::parse(a)) return sig->tag;
        return a;
    }

    SharedLedger::Record record_for(const TagContent& c, std::size_t i, const Bytes& prev_chain_value) const {
        return {sym_enc(pseudo_id_key(c, i), c.id), xor_bytes(prev_chain_value, hash(h(c, i)))};
    }

    /// Chain element i, obtained by stripping signatures from the current one.
    static Bytes prefix_value(const TagContent& c, std::size_t i) {
        std::vector<Bytes> chain{c.a};
        while (auto sig = SignatureWithAppendix::parse(chain.back())) chain.push_back(sig->message);
        if (i >= chain.size()) throw UsageError("chain shorter than requested element");
        return chain[chain.size() - 1 - i];
    }

    static std::optional<TagContent> parse(const Bytes& raw) {
        auto f = decode_record(raw);
        if (!f || f->size() != 4) return std::nullopt;
        return TagContent{(*f)[0], (*f)[1], (*f)[2], (*f)[3]};
    }
    static Bytes serialize(const TagContent& c) { return encode_record({c.id, c.flag, c.nonce, c.a}); }

    bool patched() const noexcept { return patched_; }
    ConcatMode concat_mode() const noexcept { return mode_; }
    const Bytes& password() const noexcept { return pwd_; }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto raw = read_tag(env, r, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        auto c = parse(*raw);
        if (!c) return fail(detail, StepStatus::Rejected, "malformed tag content");
        std::string why;
        auto signers = verify_chain(*c, why);
        if (!signers) {
            env.anomalies.push_back("rfchain: " + r.value + " rejected chain on " + t.value + ": " + why);
            return fail(detail, StepStatus::Rejected, "chain verification failed: " + why);
        }
        const std::size_t i = signers->size() + 1;
        const auto rec = record_for(*c, i, chain_value(c->a));
        auto posted = send(env, r, backend_, encode_record({rec.pseudo_id, rec.payload}));
        if (!posted) return fail(detail, StepStatus::Timeout, "ledger write withheld");
        auto fields = decode_record(*posted);
        if (!fields || fields->size() != 2) return fail(detail, StepStatus::Rejected, "ledger rejected record");
        env.ledger.append((*fields)[0], (*fields)[1]);
        c->a = sign(signing_keys_.at(r), c->a).serialize();
        const auto out = serialize(*c);
        if (!write_tag(env, r, t, out, out.size() * 8)) return fail(detail, StepStatus::Timeout, "tag write withheld");
        return StepStatus::Accepted;
    }

private:
    /// Signers of the chain in signing order, or nullopt if any link fails.
    std::optional<ReaderSeq> verify_chain(const TagContent& c, std::string& why) const {
        auto reject = [&why](std::string w) -> std::optional<ReaderSeq> {
            why = std::move(w);
            return std::nullopt;
        };
        ReaderSeq signers;
        Bytes cur = c.a;
        while (auto sig = SignatureWithAppendix::parse(cur)) {
            auto vk = verify_keys_.find(sig->signer);
            if (vk == verify_keys_.end()) return reject("unknown signer " + sig->signer);
            if (!verify(vk->second, sig->message, *sig)) return reject("bad signature by " + sig->signer);
            signers.insert(signers.begin(), reader(sig->signer));
            cur = sig->message;
        }
        if (cur != a0(c)) return reject("a_0 mismatch");
        return signers;
    }

    Identifier backend_ = backend("B");
    bool patched_ = false;
    ConcatMode mode_ = ConcatMode::Raw;
    Bytes pwd_, flag_;
    std::map<Identifier, SigningKey> signing_keys_;
    std::map<std::string, VerifyKey> verify_keys_;
};

} // namespace pathauth
