#pragma once

// Polynomial path encoding under homomorphic ElGamal. Readers evaluate the
// path polynomial in the exponent by Horner steps; only the manager decrypts
// and matches against precomputed evaluations of the valid paths.

#include <map>

#include "pathauth/elgamal.hpp"
#include "pathauth/field.hpp"
#include "pathauth/protocol.hpp"

namespace pathauth {

class TrackerModel : public ProtocolModel {
public:
    std::string name() const override { return "tracker"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::ManagerOnly; }
    Architecture architecture() const override { return Architecture::Offline; }

    struct TagState {
        ElGamalCiphertext id, mac, phi;
    };

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        manager_ = reader(config.option("manager", "M"));
        keys_ = elgamal_keygen(env.rng, group_);
        mac_key_ = random_bytes(env.rng, 32);
        x0_ = group_.random_exponent(env.rng);
        a0_ = group_.random_exponent(env.rng);
        for (const auto& r : config.readers) coeff_[r] = group_.random_exponent(env.rng);
        if (config.option("equal_coefficients", "") != "") {
            // Test hook: the listed readers share one coefficient.
            const u64 shared = group_.random_exponent(env.rng);
            std::string list = config.option("equal_coefficients", "");
            for (std::size_t at = 0; at <= list.size();) {
                auto comma = list.find(',', at);
                if (comma == std::string::npos) comma = list.size();
                coeff_[reader(list.substr(at, comma - at))] = shared;
                at = comma + 1;
            }
        }
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            const u64 m = mac_exponent(spec.id);
            TagState s{elgamal_enc(keys_.pk, id_element(spec.id), env.rng),
                       elgamal_enc(keys_.pk, group_.pow(group_.g, m), env.rng),
                       elgamal_enc(keys_.pk, group_.pow(group_.g, mulmod(m, a0_, group_.q)), env.rng)};
            env.tag(spec.id).write(serialize(s), {}, kNominalBits);
            for (const auto& p : spec.valid_paths) env.trace.valid_path(spec.id, p);
        }
    }

    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(verifier == manager_, name(), verifier);
        auto raw = read_tag(env, verifier, t);
        if (!raw) {
            env.anomalies.push_back("tracker: no reply from " + t.value);
            return std::nullopt;
        }
        auto s = parse(*raw);
        if (!s) {
            env.anomalies.push_back("tracker: malformed state on " + t.value);
            return std::nullopt;
        }
        const u64 id = elgamal_dec(keys_.sk, s->id);
        const TagSpec* spec = nullptr;
        for (const auto& ts : config().tags)
            if (id_element(ts.id) == id) spec = &ts;
        if (!spec) {
            env.anomalies.push_back("tracker: unknown tag identity");
            return std::nullopt;
        }
        const u64 phi = elgamal_dec(keys_.sk, s->phi);
        const u64 m = mac_exponent(spec->id);
        for (const auto& p : spec->valid_paths)
            if (group_.pow(group_.g, mulmod(m, evaluate(p), group_.q)) == phi)
                return env.trace.claim(spec->id, p, verifier);
        env.anomalies.push_back("tracker: " + spec->id.value + " followed a path outside its valid set");
        return std::nullopt;
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        if (r == manager_) {
            s.named["tracker.mac_key"] = mac_key_;
            for (const auto& [rd, a] : coeff_) s.named["tracker.a." + rd.value] = be64(a);
            s.elgamal.push_back(keys_.sk);
        } else if (auto it = coeff_.find(r); it != coeff_.end()) {
            s.named["tracker.a." + r.value] = be64(it->second);
        }
        return s;
    }

    /// Q_P(x0) mod q with a_0 followed by the path's reader coefficients.
    u64 evaluate(const ReaderSeq& path) const {
        PathPolynomial p;
        p.coefficients.emplace_back(a0_, group_.q);
        for (const auto& r : path) p.coefficients.emplace_back(coeff_.at(r), group_.q);
        return poly_eval(p, FieldElement(x0_, group_.q)).value();
    }

    u64 x0() const noexcept { return x0_; }
    u64 a0() const noexcept { return a0_; }
    u64 coefficient(const Identifier& r) const { return coeff_.at(r); }
    const Group& group() const noexcept { return group_; }
    const ElGamalPublicKey& public_key() const noexcept { return keys_.pk; }
    const Identifier& manager() const noexcept { return manager_; }
    u64 mac_exponent(const Identifier& t) const { return group_.hash_to_exponent(mac(mac_key_, id_bytes(t))); }
    u64 id_element(const Identifier& t) const { return group_.hash_to_group(id_bytes(t)); }

    std::optional<TagState> parse(const Bytes& raw) const {
        auto f = decode_record(raw);
        if (!f || f->size() != 3) return std::nullopt;
        TagState s;
        ElGamalCiphertext* cs[] = {&s.id, &s.mac, &s.phi};
        for (int i = 0; i < 3; ++i) {
            if ((*f)[i].size() != 16) return std::nullopt;
            *cs[i] = ElGamalCiphertext{read_u64((*f)[i], 0), read_u64((*f)[i], 8), keys_.pk, 0};
        }
        return s;
    }

    static constexpr std::size_t kNominalBits = 3 * 2 * 64;

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto raw = read_tag(env, r, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        auto s = parse(*raw);
        if (!s) return fail(detail, StepStatus::Rejected, "malformed tag state");
        auto it = coeff_.find(r);
        if (it == coeff_.end()) return fail(detail, StepStatus::Rejected, "reader has no coefficient");
        // phi -> phi * x0 + a_r, in the exponent of g^(mac * phi).
        s->phi = hom_mul(hom_pow(s->phi, x0_), hom_pow(s->mac, it->second));
        s->id = rerandomize(s->id, env.rng);
        s->mac = rerandomize(s->mac, env.rng);
        s->phi = rerandomize(s->phi, env.rng);
        if (!write_tag(env, r, t, serialize(*s), kNominalBits)) return fail(detail, StepStatus::Timeout, "tag write withheld");
        return StepStatus::Accepted;
    }

private:
    static Bytes serialize(const TagState& s) { return encode_record({s.id.serialize(), s.mac.serialize(), s.phi.serialize()}); }

    Group group_;
    ElGamalKeyPair keys_;
    Bytes mac_key_;
    u64 x0_ = 0, a0_ = 0;
    std::map<Identifier, u64> coeff_;
    Identifier manager_ = reader("M");
};

} // namespace pathauth
