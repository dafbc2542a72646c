#pragma once

// Message transport under a scriptable Dolev-Yao adversary: adversary models,
// knowledge with bounded deduction, delivery strategies and tag memory.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pathauth/crypto.hpp"
#include "pathauth/elgamal.hpp"
#include "pathauth/errors.hpp"
#include "pathauth/trace.hpp"

namespace pathauth {

enum class Model { AdvT, AdvR };

inline const char* to_string(Model m) { return m == Model::AdvT ? "AdvT" : "AdvR"; }

inline Model parse_model(const std::string& s) {
    if (s == "AdvT") return Model::AdvT;
    if (s == "AdvR") return Model::AdvR;
    throw UsageError("unknown adversary model '" + s + "'");
}

struct AdversaryModel {
    Model model = Model::AdvT;
    std::set<Identifier> compromised_readers;
};

/// What the adversary has seen or been handed, plus a bounded deduction closure:
/// strip signatures, decrypt under known keys, hash and xor known terms.
class Knowledge {
public:
    void observe(Bytes term) {
        if (!term.empty()) terms_.insert(std::move(term));
    }
    void learn_key(Bytes key) {
        observe(key);
        keys_.insert(std::move(key));
    }
    void learn_secret(const std::string& name, Bytes value) {
        learn_key(value);
        secrets_[name] = std::move(value);
    }
    void learn_elgamal(const ElGamalSecretKey& sk) {
        elgamal_.push_back(sk);
        observe(be64(sk.x));
    }

    bool knows(const Bytes& term) const { return terms_.count(term) > 0; }
    std::optional<Bytes> secret(const std::string& name) const {
        auto it = secrets_.find(name);
        if (it == secrets_.end()) return std::nullopt;
        return it->second;
    }
    const std::map<std::string, Bytes>& secrets() const noexcept { return secrets_; }
    const std::set<Bytes>& terms() const noexcept { return terms_; }
    const std::set<Bytes>& keys() const noexcept { return keys_; }
    const std::vector<ElGamalSecretKey>& elgamal_keys() const noexcept { return elgamal_; }

    /// Item count; never decreases during a run.
    std::size_t size() const noexcept { return terms_.size() + secrets_.size() + elgamal_.size(); }

    /// Terms reachable by stripping and decrypting, iterated `rounds` times.
    std::set<Bytes> closure(int rounds = 2) const {
        std::set<Bytes> c = terms_;
        for (int round = 0; round < rounds; ++round) {
            std::vector<Bytes> fresh;
            for (const auto& t : c) {
                if (auto sig = SignatureWithAppendix::parse(t)) {
                    fresh.push_back(sig->message);
                    fresh.push_back(sig->tag);
                }
                for (const auto& k : keys_)
                    if (auto m = try_sym_dec(k, t)) fresh.push_back(std::move(*m));
                for (const auto& sk : elgamal_)
                    if (auto m = try_pk_dec(sk, t)) fresh.push_back(std::move(*m));
                if (auto fields = decode_record(t); fields && fields->size() > 1)
                    for (auto& f : *fields) fresh.push_back(std::move(f));
            }
            const auto before = c.size();
            for (auto& f : fresh)
                if (!f.empty()) c.insert(std::move(f));
            if (c.size() == before) break;
        }
        return c;
    }

    /// Whether `target` is in the closure, is the hash of a closure term, or
    /// is the xor of two equal-length closure terms.
    bool can_derive(const Bytes& target) const {
        const auto c = closure();
        if (c.count(target)) return true;
        for (const auto& t : c)
            if (hash(t) == target) return true;
        for (auto a = c.begin(); a != c.end(); ++a) {
            if (a->size() != target.size()) continue;
            for (auto b = std::next(a); b != c.end(); ++b)
                if (b->size() == target.size() && xor_bytes(*a, *b) == target) return true;
        }
        return false;
    }

    std::string dump() const {
        std::string out;
        for (const auto& t : terms_) out += "term " + to_hex(t) + "\n";
        for (const auto& [k, v] : secrets_) out += "secret " + k + " " + to_hex(v) + "\n";
        for (const auto& sk : elgamal_) out += "elgamal " + std::to_string(sk.x) + "\n";
        return out;
    }

private:
    std::set<Bytes> terms_;
    std::set<Bytes> keys_;
    std::map<std::string, Bytes> secrets_;
    std::vector<ElGamalSecretKey> elgamal_;
};

class Adversary {
public:
    explicit Adversary(Model m = Model::AdvT) { model_.model = m; }

    Model model() const noexcept { return model_.model; }
    const std::set<Identifier>& compromised() const noexcept { return model_.compromised_readers; }
    bool controls(const Identifier& r) const { return model_.compromised_readers.count(r) > 0; }
    Knowledge& knowledge() noexcept { return knowledge_; }
    const Knowledge& knowledge() const noexcept { return knowledge_; }

    /// Hands reader `r`'s secrets to the adversary. Requires AdvR.
    void compromise(const Identifier& r, const std::map<std::string, Bytes>& secrets,
                    const std::vector<ElGamalSecretKey>& elgamal = {}) {
        if (model_.model != Model::AdvR)
            throw CapabilityError("compromising reader " + r.value + " requires AdvR");
        model_.compromised_readers.insert(r);
        for (const auto& [name, value] : secrets) knowledge_.learn_secret(name, value);
        for (const auto& sk : elgamal) knowledge_.learn_elgamal(sk);
    }

private:
    AdversaryModel model_;
    Knowledge knowledge_;
};

struct Envelope {
    std::uint64_t seq = 0;
    Identifier sender;
    Identifier receiver;
    Bytes payload;
};

enum class Action { Deliver, Modify, Drop, Store, Replay, Inject, Trusted };

inline const char* to_string(Action a) {
    switch (a) {
    case Action::Deliver: return "deliver";
    case Action::Modify: return "modify";
    case Action::Drop: return "drop";
    case Action::Store: return "store";
    case Action::Replay: return "replay";
    case Action::Inject: return "inject";
    case Action::Trusted: return "trusted";
    }
    return "?";
}

/// Decides the fate of an envelope; may rewrite its payload in place.
using Strategy = std::function<Action(Envelope&)>;

struct StrategySpec {
    std::string name = "passthrough";
    std::optional<std::string> target; // restricts the strategy to envelopes to/from this identifier
};

inline bool strategy_applies(const StrategySpec& s, const Envelope& e) {
    return !s.target || e.sender.value == *s.target || e.receiver.value == *s.target;
}

inline Strategy make_strategy(const StrategySpec& spec) {
    if (spec.name == "passthrough") return [](Envelope&) { return Action::Deliver; };
    if (spec.name == "drop")
        return [spec](Envelope& e) { return strategy_applies(spec, e) ? Action::Drop : Action::Deliver; };
    if (spec.name == "replay")
        return [spec](Envelope& e) { return strategy_applies(spec, e) ? Action::Store : Action::Deliver; };
    if (spec.name == "tamper")
        return [spec](Envelope& e) {
            if (!strategy_applies(spec, e) || e.payload.empty()) return Action::Deliver;
            e.payload.back() ^= 0x01;
            return Action::Modify;
        };
    throw UsageError("unknown strategy '" + spec.name + "'");
}

struct TranscriptEntry {
    Envelope envelope;
    Action action = Action::Deliver;
};

/// Single logical channel; every non-trusted payload is observed by the adversary.
class Network {
public:
    explicit Network(Adversary& adv, Strategy strategy = make_strategy({})) : adv_(adv), strategy_(std::move(strategy)) {}

    void set_strategy(Strategy s) { strategy_ = std::move(s); }

    /// Returns the delivered envelope, or nullopt when the adversary withheld it.
    std::optional<Envelope> transmit(const Identifier& sender, const Identifier& receiver, Bytes payload,
                                     bool trusted = false) {
        Envelope e{next_seq_++, sender, receiver, std::move(payload)};
        if (trusted) {
            log_.push_back({e, Action::Trusted});
            return e;
        }
        adv_.knowledge().observe(e.payload);
        const Action a = strategy_(e);
        log_.push_back({e, a});
        if (a == Action::Modify) adv_.knowledge().observe(e.payload);
        if (a == Action::Store) stored_.push_back(e);
        if (a == Action::Drop || a == Action::Store) return std::nullopt;
        return e;
    }

    /// Adversary-originated message.
    Envelope inject(const Identifier& sender, const Identifier& receiver, Bytes payload) {
        Envelope e{next_seq_++, sender, receiver, std::move(payload)};
        log_.push_back({e, Action::Inject});
        return e;
    }

    /// Re-delivers a stored envelope under a fresh sequence number.
    std::optional<Envelope> replay(std::size_t stored_index) {
        if (stored_index >= stored_.size()) return std::nullopt;
        Envelope e = stored_[stored_index];
        e.seq = next_seq_++;
        log_.push_back({e, Action::Replay});
        return e;
    }

    const std::vector<Envelope>& stored() const noexcept { return stored_; }
    const std::vector<TranscriptEntry>& transcript() const noexcept { return log_; }

    /// One line per envelope: seq, direction, hex payload, action.
    std::string dump() const {
        std::string out;
        for (const auto& t : log_)
            out += std::to_string(t.envelope.seq) + " " + t.envelope.sender.value + "->" + t.envelope.receiver.value +
                   " " + (t.envelope.payload.empty() ? "-" : to_hex(t.envelope.payload)) + " " + to_string(t.action) +
                   "\n";
        return out;
    }

private:
    Adversary& adv_;
    Strategy strategy_;
    std::uint64_t next_seq_ = 0;
    std::vector<TranscriptEntry> log_;
    std::vector<Envelope> stored_;
};

inline constexpr std::size_t kDefaultTagCapacityBits = 512;

/// Tag memory with a freely readable public region and a region that only
/// authenticated readers can read. Capacity is charged in nominal bits, the
/// size the stored fields would occupy with deployed primitive sizes.
class TagMemory {
public:
    explicit TagMemory(std::size_t capacity_bits = kDefaultTagCapacityBits) : capacity_bits_(capacity_bits) {}

    std::size_t capacity_bits() const noexcept { return capacity_bits_; }
    std::size_t nominal_bits() const noexcept { return nominal_bits_; }
    const Bytes& public_region() const noexcept { return public_; }
    const Bytes& protected_region() const noexcept { return protected_; }
    bool empty() const noexcept { return public_.empty() && protected_.empty(); }

    /// Throws CapacityError and leaves memory unchanged if `nominal_bits` exceeds capacity.
    void write(Bytes pub, Bytes prot, std::size_t nominal_bits) {
        if (nominal_bits > capacity_bits_)
            throw CapacityError("tag write of " + std::to_string(nominal_bits) + " bits exceeds capacity of " +
                                std::to_string(capacity_bits_) + " bits");
        public_ = std::move(pub);
        protected_ = std::move(prot);
        nominal_bits_ = nominal_bits;
    }
    void write_public(Bytes pub, std::size_t nominal_bits) { write(std::move(pub), protected_, nominal_bits); }

private:
    std::size_t capacity_bits_;
    std::size_t nominal_bits_ = 0;
    Bytes public_;
    Bytes protected_;
};

struct TagSnapshot {
    Bytes public_region;
    Bytes protected_region; // empty unless the reader authenticated to the tag
};

/// Reads a tag as the adversary. The protected region is returned only when the
/// adversary controls a reader whose credentials the tag accepts.
inline TagSnapshot adversary_read_tag(Adversary& adv, const TagMemory& mem, bool holds_reader_credential) {
    TagSnapshot s{mem.public_region(), {}};
    if (holds_reader_credential && !adv.compromised().empty()) s.protected_region = mem.protected_region();
    adv.knowledge().observe(s.public_region);
    adv.knowledge().observe(s.protected_region);
    return s;
}

/// Replaces the tag's public region; charged at the written length.
inline void adversary_write_tag(TagMemory& mem, Bytes bytes) {
    const auto bits = bytes.size() * 8;
    mem.write_public(std::move(bytes), bits);
}

} // namespace pathauth
