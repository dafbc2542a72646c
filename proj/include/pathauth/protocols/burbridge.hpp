#pragma once

// Policy-routed shipments authenticated by proxy re-signatures. The supply
// chain controller (SCC) signs the tag identifier, and each receiver checks its
// receiving policy, verifies the previous participant's signature and
// re-signs it into its own with rk_{prev->self}. Re-signing keys exist either
// once per policy edge (shared) or once per edge and tag (per-tag).

#include <map>
#include <set>

#include "pathauth/protocol.hpp"

namespace pathauth {

/// Shipping and receiving rules per participant, keyed by tag class.
class PolicyTable {
public:
    using Class = std::string;

    void allow(const Identifier& from, const Identifier& to, const Class& cls) {
        shipping_[from][cls].insert(to);
        receiving_[to][cls].insert(from);
    }
    bool may_ship(const Identifier& from, const Identifier& to, const Class& cls) const {
        return contains(shipping_, from, cls, to);
    }
    bool may_receive(const Identifier& to, const Identifier& from, const Class& cls) const {
        return contains(receiving_, to, cls, from);
    }
    std::set<Identifier> next(const Identifier& from, const Class& cls) const {
        auto it = shipping_.find(from);
        if (it == shipping_.end()) return {};
        auto c = it->second.find(cls);
        return c == it->second.end() ? std::set<Identifier>{} : c->second;
    }

private:
    using Rules = std::map<Identifier, std::map<Class, std::set<Identifier>>>;
    static bool contains(const Rules& rules, const Identifier& who, const Class& cls, const Identifier& other) {
        auto it = rules.find(who);
        if (it == rules.end()) return false;
        auto c = it->second.find(cls);
        return c != it->second.end() && c->second.count(other) > 0;
    }
    Rules shipping_, receiving_;
};

class BurbridgeModel : public ProtocolModel {
public:
    enum class KeyMode { Shared, PerTag };

    std::string name() const override { return "burbridge"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::Backend; }
    Architecture architecture() const override { return Architecture::Offline; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        scc_ = backend(config.option("scc", "SCC"));
        mode_ = config.option("keys", "shared") == "per_tag" ? KeyMode::PerTag : KeyMode::Shared;
        keys_.emplace(scc_, SigningKey::generate(scc_.value, env.rng));
        for (const auto& r : config.readers) keys_.emplace(r, SigningKey::generate(r.value, env.rng));
        for (const auto& [who, sk] : keys_) verify_keys_.emplace(who.value, sk.verify_key());

        for (const auto& spec : config.tags) {
            for (const auto& p : spec.valid_paths) {
                Identifier prev = scc_;
                for (const auto& r : p) {
                    policies_.allow(prev, r, class_of(spec.id));
                    rk_.emplace(rk_slot(prev, r, spec.id), random_bytes(env.rng, 32));
                    prev = r;
                }
                env.trace.valid_path(spec.id, p);
            }
            init_tag(env, spec.id);
            const Bytes id = id_bytes(spec.id);
            const Bytes content = encode_record({id, to_bytes(class_of(spec.id)), sign(keys_.at(scc_), id).serialize()});
            env.tag(spec.id).write(content, {}, nominal_bits());
        }
    }

    /// The SCC assembles acceptance records; once a participant with no onward
    /// shipping rule has accepted the tag, it claims the tag's registered path.
    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(verifier == scc_, name(), verifier);
        auto it = accepted_.find(t);
        if (it == accepted_.end() || it->second.empty() || !policies_.next(it->second.back(), class_of(t)).empty()) {
            env.anomalies.push_back("burbridge: " + t.value + " has not reached a final participant");
            return std::nullopt;
        }
        return env.trace.claim(t, static_path(config(), t), verifier);
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        if (auto it = keys_.find(r); it != keys_.end() && r != scc_) {
            s.named["burbridge.sk." + r.value] = it->second.secret();
            for (const auto& [slot, rk] : rk_)
                if (std::get<1>(slot) == r) s.named["burbridge.rk." + std::get<0>(slot).value + ">" + r.value] = rk;
        }
        return s;
    }

    /// Proxy re-signature as an ideal transform: Sig_from(m) becomes Sig_to(m)
    /// only when the matching re-signing key for (from, to[, t]) was issued.
    std::optional<SignatureWithAppendix> resign(const Identifier& to, const Identifier& t,
                                                const SignatureWithAppendix& sig) const {
        const auto from = sig.signer == scc_.value ? scc_ : reader(sig.signer);
        if (!rk_.count(rk_slot(from, to, t))) return std::nullopt;
        auto vk = verify_keys_.find(sig.signer);
        if (vk == verify_keys_.end() || !verify(vk->second, sig.message, sig)) return std::nullopt;
        return sign(keys_.at(to), sig.message);
    }

    KeyMode key_mode() const noexcept { return mode_; }
    const PolicyTable& policies() const noexcept { return policies_; }
    const Identifier& scc() const noexcept { return scc_; }
    const std::vector<Identifier>& accepted_by(const Identifier& t) const {
        static const std::vector<Identifier> none;
        auto it = accepted_.find(t);
        return it == accepted_.end() ? none : it->second;
    }

    /// Tag class used for policy lookup; one class per tag.
    static std::string class_of(const Identifier& t) { return t.value; }
    /// EPC identifier plus a re-signature of two 160-bit group elements.
    static std::size_t nominal_bits() { return 96 + 2 * 160; }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto raw = read_tag(env, r, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        auto f = decode_record(*raw);
        if (!f || f->size() != 3) return fail(detail, StepStatus::Rejected, "malformed tag content");
        const std::string cls((*f)[1].begin(), (*f)[1].end());
        auto sig = SignatureWithAppendix::parse((*f)[2]);
        if (!sig || sig->message != (*f)[0]) return fail(detail, StepStatus::Rejected, "malformed signature");
        const auto prev = sig->signer == scc_.value ? scc_ : reader(sig->signer);

        // A dishonest participant ignores its own receiving policy.
        if (!env.adversary.controls(r) && !policies_.may_receive(r, prev, cls))
            return fail(detail, StepStatus::Rejected, "receiving policy forbids " + prev.value);
        auto next = resign(r, t, *sig);
        if (!next) return fail(detail, StepStatus::Rejected, "no re-signing key from " + prev.value);

        const Bytes out = encode_record({(*f)[0], (*f)[1], next->serialize()});
        if (!write_tag(env, r, t, out, nominal_bits())) return fail(detail, StepStatus::Timeout, "tag write withheld");
        if (!send(env, r, scc_, encode_record({(*f)[0], id_bytes(r)})))
            return fail(detail, StepStatus::Timeout, "acceptance record withheld");
        accepted_[t].push_back(r);
        return StepStatus::Accepted;
    }

private:
    using RkSlot = std::tuple<Identifier, Identifier, std::string>;
    RkSlot rk_slot(const Identifier& from, const Identifier& to, const Identifier& t) const {
        return {from, to, mode_ == KeyMode::PerTag ? t.value : std::string()};
    }

    Identifier scc_ = backend("SCC");
    KeyMode mode_ = KeyMode::Shared;
    PolicyTable policies_;
    std::map<Identifier, SigningKey> keys_;
    std::map<std::string, VerifyKey> verify_keys_;
    std::map<RkSlot, Bytes> rk_;
    std::map<Identifier, std::vector<Identifier>> accepted_;
};

} // namespace pathauth
