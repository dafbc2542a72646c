#pragma once

// Per-reader path verification. The tag carries (Enc(H(ID)), Enc(sigma)) for
// each candidate next reader, with sigma = H(ID)^Q_p(x0) built up by Horner
// steps. A reader decrypts, advances sigma with its coefficient, matches it
// against the keys of the valid paths ending at itself, claims the matched
// prefix and re-encrypts for the successors.

#include <map>
#include <set>

#include "pathauth/elgamal.hpp"
#include "pathauth/field.hpp"
#include "pathauth/protocol.hpp"

namespace pathauth {

class CheckerModel : public ProtocolModel {
public:
    std::string name() const override { return "checker"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::AnyReader; }
    Architecture architecture() const override { return Architecture::Offline; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        x0_ = group_.random_exponent(env.rng);
        a0_ = group_.random_exponent(env.rng);
        for (const auto& r : config.readers) {
            coeff_[r] = group_.random_exponent(env.rng);
            keys_[r] = elgamal_keygen(env.rng, group_);
        }
        // Every prefix of a valid path is a path ending at its last reader.
        for (const auto& spec : config.tags)
            for (const auto& p : spec.valid_paths)
                for (std::size_t n = 1; n <= p.size(); ++n) {
                    ReaderSeq prefix(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
                    auto& list = paths_[prefix.back()];
                    if (std::find(list.begin(), list.end(), prefix) == list.end()) list.push_back(prefix);
                }
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            const u64 h = id_element(spec.id);
            const u64 sigma = group_.pow(h, a0_);
            const auto first = successors(spec.id, {});
            env.tag(spec.id).write(encrypt_for(first, h, sigma, env.rng), {}, nominal_bits(first.size()));
            for (const auto& p : spec.valid_paths) env.trace.valid_path(spec.id, p);
        }
    }

    /// Claims are emitted by each reader on arrival; this returns the latest one made by `verifier`.
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
        if (auto it = coeff_.find(r); it != coeff_.end()) {
            s.named["checker.a." + r.value] = be64(it->second);
            s.elgamal.push_back(keys_.at(r).sk);
            for (const auto& p : path_list(r)) s.named["checker.K." + join(p)] = be64(key_of(p));
        }
        return s;
    }

    /// Exponent K_p = Q_p(x0) for a path.
    u64 key_of(const ReaderSeq& p) const {
        PathPolynomial poly;
        poly.coefficients.emplace_back(a0_, group_.q);
        for (const auto& r : p) poly.coefficients.emplace_back(coeff_.at(r), group_.q);
        return poly_eval(poly, FieldElement(x0_, group_.q)).value();
    }

    std::vector<ReaderSeq> path_list(const Identifier& r) const {
        auto it = paths_.find(r);
        return it == paths_.end() ? std::vector<ReaderSeq>{} : it->second;
    }

    u64 id_element(const Identifier& t) const { return group_.hash_to_group(id_bytes(t)); }
    u64 x0() const noexcept { return x0_; }
    u64 a0() const noexcept { return a0_; }
    u64 coefficient(const Identifier& r) const { return coeff_.at(r); }
    const Group& group() const noexcept { return group_; }
    const ElGamalSecretKey& secret_key(const Identifier& r) const { return keys_.at(r).sk; }

    /// Decrypts every pair with `r`'s key; returns (h, sigma) pairs.
    std::vector<std::pair<u64, u64>> open(const Identifier& r, const Bytes& raw) const {
        std::vector<std::pair<u64, u64>> out;
        auto f = decode_record(raw);
        if (!f || f->size() % 2) return out;
        const auto& kp = keys_.at(r);
        for (std::size_t i = 0; i < f->size(); i += 2) {
            if ((*f)[i].size() != 16 || (*f)[i + 1].size() != 16) continue;
            ElGamalCiphertext ch{read_u64((*f)[i], 0), read_u64((*f)[i], 8), kp.pk, 0};
            ElGamalCiphertext cs{read_u64((*f)[i + 1], 0), read_u64((*f)[i + 1], 8), kp.pk, 0};
            out.emplace_back(elgamal_dec(kp.sk, ch), elgamal_dec(kp.sk, cs));
        }
        return out;
    }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto raw = read_tag(env, r, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        const auto a = coeff_.at(r);
        for (const auto& [h, sigma] : open(r, *raw)) {
            const u64 next = group_.mul(group_.pow(sigma, x0_), group_.pow(h, a));
            for (const auto& p : path_list(r)) {
                if (group_.pow(h, key_of(p)) != next) continue;
                const Identifier* who = tag_for(h);
                if (!who) continue;
                const auto succ = successors(*who, p);
                if (!write_tag(env, r, t, encrypt_for(succ, h, next, env.rng), nominal_bits(succ.size())))
                    return fail(detail, StepStatus::Timeout, "tag write withheld");
                if (!offline()) env.trace.claim(*who, p, r);
                return StepStatus::Accepted;
            }
        }
        env.anomalies.push_back("checker: " + r.value + " found no matching path key for " + t.value);
        return fail(detail, StepStatus::Rejected, "no path key matches");
    }

private:
    static std::string join(const ReaderSeq& p) {
        std::string s;
        for (const auto& r : p) s += (s.empty() ? "" : "-") + r.value;
        return s;
    }

    static std::size_t nominal_bits(std::size_t pairs) { return std::max<std::size_t>(pairs, 1) * 2 * 2 * 64; }

    const Identifier* tag_for(u64 h) const {
        for (const auto& s : config().tags)
            if (id_element(s.id) == h) return &s.id;
        return nullptr;
    }

    /// Readers that may follow `prefix` on one of the tag's valid paths.
    ReaderSeq successors(const Identifier& t, const ReaderSeq& prefix) const {
        std::set<Identifier> next;
        for (const auto& p : config().tag_spec(t).valid_paths)
            if (p.size() > prefix.size() && seq::is_prefix(prefix, p)) next.insert(p[prefix.size()]);
        return {next.begin(), next.end()};
    }

    Bytes encrypt_for(const ReaderSeq& next, u64 h, u64 sigma, Rng& rng) const {
        std::vector<Bytes> fields;
        for (const auto& r : next) {
            const auto& pk = keys_.at(r).pk;
            fields.push_back(elgamal_enc(pk, h, rng).serialize());
            fields.push_back(elgamal_enc(pk, sigma, rng).serialize());
        }
        if (fields.empty()) {
            // End of path: keep an unreadable placeholder of the same shape.
            auto dummy = elgamal_keygen(rng, group_);
            fields.push_back(elgamal_enc(dummy.pk, h, rng).serialize());
            fields.push_back(elgamal_enc(dummy.pk, sigma, rng).serialize());
        }
        return encode_record(fields);
    }

    Group group_;
    u64 x0_ = 0, a0_ = 0;
    std::map<Identifier, u64> coeff_;
    std::map<Identifier, ElGamalKeyPair> keys_;
    std::map<Identifier, std::vector<ReaderSeq>> paths_;
};

} // namespace pathauth
