#pragma once

// Shared lifecycle for protocol models: run environment, configuration and the
// arrival/claim contract every model implements.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pathauth/crypto.hpp"
#include "pathauth/errors.hpp"
#include "pathauth/network.hpp"
#include "pathauth/trace.hpp"

namespace pathauth {

enum class VerifierPolicy { ManagerOnly, AnyReader, Checkpoint, Backend };
enum class Architecture { Online, Offline };

inline const char* to_string(VerifierPolicy v) {
    switch (v) {
    case VerifierPolicy::ManagerOnly: return "ManagerOnly";
    case VerifierPolicy::AnyReader: return "AnyReader";
    case VerifierPolicy::Checkpoint: return "Checkpoint";
    case VerifierPolicy::Backend: return "Backend";
    }
    return "?";
}

inline const char* to_string(Architecture a) { return a == Architecture::Online ? "Online" : "Offline"; }

/// Append-only record store shared by participants.
class SharedLedger {
public:
    struct Record {
        Bytes pseudo_id;
        Bytes payload;
        friend bool operator==(const Record&, const Record&) = default;
    };

    std::size_t append(Bytes pseudo_id, Bytes payload) {
        records_.push_back({std::move(pseudo_id), std::move(payload)});
        return records_.size() - 1;
    }
    const std::vector<Record>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

private:
    std::vector<Record> records_;
};

struct TagSpec {
    Identifier id;
    std::vector<ReaderSeq> valid_paths;
};

struct ProtocolConfig {
    ReaderSeq readers;
    std::vector<TagSpec> tags;
    std::map<std::string, std::string> options;
    std::size_t capacity_bits = kDefaultTagCapacityBits;

    std::string option(const std::string& key, const std::string& fallback) const {
        auto it = options.find(key);
        return it == options.end() ? fallback : it->second;
    }
    const TagSpec& tag_spec(const Identifier& t) const {
        for (const auto& s : tags)
            if (s.id == t) return s;
        throw UsageError("unknown tag " + t.value);
    }
};

enum class StepStatus { Accepted, Rejected, Timeout, Rogue };

inline const char* to_string(StepStatus s) {
    switch (s) {
    case StepStatus::Accepted: return "accepted";
    case StepStatus::Rejected: return "rejected";
    case StepStatus::Timeout: return "timeout";
    case StepStatus::Rogue: return "rogue";
    }
    return "?";
}

struct StepRecord {
    Identifier reader;
    Identifier tag;
    StepStatus status;
    bool offline = false;
    std::string detail;
};

/// Everything one protocol run touches. Not copyable: the network refers to the adversary.
class Environment {
public:
    Environment(std::uint64_t seed, Model model, const StrategySpec& strategy = {})
        : adversary(model), network(adversary, make_strategy(strategy)), rng(seed) {}
    Environment(const Environment&) = delete;
    Environment& operator=(const Environment&) = delete;

    Trace trace;
    Adversary adversary;
    Network network;
    SharedLedger ledger;
    Rng rng;
    std::map<Identifier, TagMemory> tags;
    std::vector<StepRecord> steps;
    std::vector<std::string> anomalies;

    TagMemory& tag(const Identifier& t) {
        auto it = tags.find(t);
        if (it == tags.end()) throw UsageError("tag " + t.value + " not initialized");
        return it->second;
    }
};

/// Secrets a reader holds; handed to the adversary on compromise.
struct ReaderSecrets {
    std::map<std::string, Bytes> named;
    std::vector<ElGamalSecretKey> elgamal;
};

class ProtocolModel {
public:
    virtual ~ProtocolModel() = default;

    virtual std::string name() const = 0;
    virtual VerifierPolicy verifier_policy() const = 0;
    virtual Architecture architecture() const = 0;

    /// Issues keys, initializes tags and emits ValidPath events where the model declares paths.
    virtual void setup(Environment& env, const ProtocolConfig& config) = 0;

    /// Verification by `verifier`; emits and returns a PathClaim index on success.
    virtual std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) = 0;

    virtual ReaderSecrets reader_secrets(const Identifier& r) const = 0;

    /// Physical arrival: always emits Move, then runs the reader's processing.
    /// Unregistered readers only read the tag on the adversary's behalf.
    StepStatus on_arrival(Environment& env, const Identifier& r, const Identifier& t) {
        env.trace.move(t, r);
        if (!is_registered(r)) {
            adversary_read_tag(env.adversary, env.tag(t), false);
            env.steps.push_back({r, t, StepStatus::Rogue, false, "unregistered reader"});
            return StepStatus::Rogue;
        }
        offline_ = false;
        std::string detail;
        const auto status = process(env, r, t, detail);
        env.steps.push_back({r, t, status, false, detail});
        return status;
    }

    /// A compromised reader processes the tag's memory without the tag being
    /// physically present: no Move is emitted.
    StepStatus adversary_step(Environment& env, const Identifier& r, const Identifier& t) {
        if (!env.adversary.controls(r)) throw CapabilityError("adversary does not control reader " + r.value);
        offline_ = true;
        std::string detail;
        StepStatus status;
        try {
            status = process(env, r, t, detail);
        } catch (...) {
            offline_ = false;
            throw;
        }
        offline_ = false;
        env.steps.push_back({r, t, status, true, detail});
        return status;
    }

    /// Compromises `r` under the environment's adversary model.
    void compromise(Environment& env, const Identifier& r) const {
        const auto s = reader_secrets(r);
        env.adversary.compromise(r, s.named, s.elgamal);
    }

    bool is_registered(const Identifier& r) const {
        for (const auto& x : config_.readers)
            if (x == r) return true;
        return false;
    }
    const ProtocolConfig& config() const noexcept { return config_; }

protected:
    virtual StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) = 0;

    void store_config(const ProtocolConfig& c) { config_ = c; }

    void init_tag(Environment& env, const Identifier& t) {
        env.tags.insert_or_assign(t, TagMemory(config_.capacity_bits));
    }

    /// Tag-to-reader transfer of the public region. Offline steps read memory directly.
    std::optional<Bytes> read_tag(Environment& env, const Identifier& r, const Identifier& t) {
        auto& mem = env.tag(t);
        if (offline_) return adversary_read_tag(env.adversary, mem, true).public_region;
        auto e = env.network.transmit(t, r, mem.public_region());
        if (!e) return std::nullopt;
        return e->payload;
    }

    /// Reader-to-tag write of the public region; false if the adversary withheld it.
    bool write_tag(Environment& env, const Identifier& r, const Identifier& t, Bytes pub, std::size_t nominal_bits) {
        auto& mem = env.tag(t);
        if (offline_) {
            mem.write_public(std::move(pub), nominal_bits);
            return true;
        }
        auto e = env.network.transmit(r, t, std::move(pub));
        if (!e) return false;
        mem.write_public(std::move(e->payload), nominal_bits);
        return true;
    }

    /// Reader-to-backend (or peer) message; delivered payload or nullopt.
    std::optional<Bytes> send(Environment& env, const Identifier& from, const Identifier& to, Bytes payload,
                              bool trusted = false) {
        if (offline_) {
            env.adversary.knowledge().observe(payload);
            return payload;
        }
        auto e = env.network.transmit(from, to, std::move(payload), trusted);
        if (!e) return std::nullopt;
        return e->payload;
    }

    bool offline() const noexcept { return offline_; }

    static StepStatus fail(std::string& detail, StepStatus status, std::string why) {
        detail = std::move(why);
        return status;
    }

    static void require_verifier(bool ok, const std::string& protocol, const Identifier& who) {
        if (!ok) throw VerifierPolicyError(protocol + ": " + who.value + " is not permitted to verify");
    }

private:
    ProtocolConfig config_;
    bool offline_ = false;
};

/// Static path of a single-path model: the tag's first valid path.
inline const ReaderSeq& static_path(const ProtocolConfig& c, const Identifier& t) {
    const auto& spec = c.tag_spec(t);
    if (spec.valid_paths.empty()) throw UsageError("tag " + t.value + " has no path");
    return spec.valid_paths.front();
}

inline std::optional<std::size_t> position_in(const ReaderSeq& path, const Identifier& r) {
    for (std::size_t i = 0; i < path.size(); ++i)
        if (path[i] == r) return i;
    return std::nullopt;
}

inline Bytes id_bytes(const Identifier& id) { return to_bytes(id.value); }

} // namespace pathauth
