#pragma once

// Participant-specific challenges on a PUF tag.
//   PC = h(PID_1 xor ... xor PID_n),  c = h(PC xor RID_CO),  c_i = c xor PID_i
// The PRF variant adds PRF(n) to every c_i. The tag accepts any unconsumed
// challenge, in any order, and answers with its PUF response.

#include <map>

#include "pathauth/protocol.hpp"

namespace pathauth {

class RayModel : public ProtocolModel {
public:
    enum class ClaimOrder { Intended, Consumption };

    std::string name() const override { return "ray"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::Checkpoint; }
    Architecture architecture() const override { return Architecture::Offline; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        checkpoint_ = reader(config.option("checkpoint", "CP"));
        prf_variant_ = config.option("prf", "0") == "1";
        order_ = config.option("claim_order", "intended") == "consumption" ? ClaimOrder::Consumption
                                                                            : ClaimOrder::Intended;
        owner_ = hash(to_bytes("RID:" + config.option("owner", "CO")));
        prf_key_ = random_bytes(env.rng, 32);
        fab_seed_ = random_bytes(env.rng, 32);
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            const auto& path = static_path(config, spec.id);
            std::vector<Bytes> challenges;
            for (std::size_t i = 0; i < path.size(); ++i) {
                challenges.push_back(challenge(path, i));
                issued_[{spec.id, path[i]}] = challenges.back();
            }
            store(env.tag(spec.id), {challenges, {}});
            env.trace.valid_path(spec.id, path);
        }
    }

    /// Checkpoint verification: every challenge must have been consumed.
    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(verifier == checkpoint_, name(), verifier);
        auto raw = read_tag(env, verifier, t);
        if (!raw) return std::nullopt;
        auto st = parse(*raw);
        const auto& path = static_path(config(), t);
        if (!st || st->consumed.size() != path.size()) {
            env.anomalies.push_back("ray: " + t.value + " has unconsumed challenges");
            return std::nullopt;
        }
        if (order_ == ClaimOrder::Intended) return env.trace.claim(t, path, verifier);
        ReaderSeq order;
        for (auto i : st->consumed) order.push_back(path.at(i));
        return env.trace.claim(t, order, verifier);
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        for (const auto& [key, c] : issued_)
            if (key.second == r) s.named["ray.c." + key.first.value + "." + r.value] = c;
        if (prf_variant_ && is_registered(r)) s.named["ray.prf_key"] = prf_key_;
        return s;
    }

    /// Public participant identifier.
    static Bytes pid(const Identifier& r) { return hash(to_bytes("PID:" + r.value)); }

    Bytes base_challenge(const ReaderSeq& path) const {
        Bytes acc(kDigestSize, 0);
        for (const auto& r : path) acc = xor_bytes(acc, pid(r));
        return hash(xor_bytes(hash(acc), owner_));
    }

    Bytes prf_term(std::size_t n) const { return prf(prf_key_, be64(n)); }

    Bytes challenge(const ReaderSeq& path, std::size_t i) const {
        Bytes c = xor_bytes(base_challenge(path), pid(path[i]));
        return prf_variant_ ? xor_bytes(c, prf_term(path.size())) : c;
    }

    /// Tag-side handling of a challenge delivered over the air, however it got there.
    /// Returns the PUF response if the challenge was pending.
    std::optional<Bytes> tag_receive(Environment& env, const Identifier& t, const Bytes& value) {
        auto& mem = env.tag(t);
        auto st = parse(mem.public_region());
        if (!st) return std::nullopt;
        for (std::size_t i = 0; i < st->challenges.size(); ++i) {
            if (st->challenges[i] != value) continue;
            if (std::find(st->consumed.begin(), st->consumed.end(), i) != st->consumed.end()) return std::nullopt;
            st->consumed.push_back(i);
            store(mem, *st);
            return device(t)(value);
        }
        return std::nullopt;
    }

    bool prf_variant() const noexcept { return prf_variant_; }
    const Identifier& checkpoint() const noexcept { return checkpoint_; }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        auto it = issued_.find({t, r});
        if (it == issued_.end()) return fail(detail, StepStatus::Rejected, "reader holds no challenge for this tag");
        auto sent = send(env, r, t, it->second);
        if (!sent) return fail(detail, StepStatus::Timeout, "challenge withheld");
        auto response = tag_receive(env, t, *sent);
        if (!response) return fail(detail, StepStatus::Rejected, "tag refused challenge");
        auto back = send(env, t, r, *response);
        if (!back) return fail(detail, StepStatus::Timeout, "response withheld");
        if (*back != device(t)(it->second)) return fail(detail, StepStatus::Rejected, "PUF response mismatch");
        return StepStatus::Accepted;
    }

private:
    struct State {
        std::vector<Bytes> challenges;
        std::vector<std::size_t> consumed;
    };

    Puf device(const Identifier& t) const { return puf(t.value, fab_seed_); }

    static void store(TagMemory& mem, const State& s) {
        std::vector<Bytes> fields{be64(s.challenges.size())};
        for (const auto& c : s.challenges) fields.push_back(c);
        Bytes consumed;
        for (auto i : s.consumed) append_u64(consumed, i);
        fields.push_back(consumed);
        mem.write(encode_record(fields), {}, s.challenges.size() * 256 + 32);
    }

    static std::optional<State> parse(const Bytes& raw) {
        auto f = decode_record(raw);
        if (!f || f->empty() || (*f)[0].size() != 8) return std::nullopt;
        const auto n = read_u64((*f)[0], 0);
        if (f->size() != n + 2) return std::nullopt;
        State s;
        s.challenges.assign(f->begin() + 1, f->begin() + 1 + static_cast<std::ptrdiff_t>(n));
        const auto& consumed = f->back();
        if (consumed.size() % 8) return std::nullopt;
        for (std::size_t at = 0; at < consumed.size(); at += 8) s.consumed.push_back(read_u64(consumed, at));
        return s;
    }

    Identifier checkpoint_ = reader("CP");
    bool prf_variant_ = false;
    ClaimOrder order_ = ClaimOrder::Intended;
    Bytes owner_, prf_key_, fab_seed_;
    std::map<std::pair<Identifier, Identifier>, Bytes> issued_;
};

} // namespace pathauth
