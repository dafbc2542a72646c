#pragma once

// Session-key tags for IoT supply chains. The tag holds TID, the path P and
// one slot (sig_i, index_i, ts_i) per step in its public region; the session
// keys k_i = sym_enc(k_{r_i}, TID) sit in the protected region. A step is an
// HMAC challenge-response under k_i in both directions followed by the reader
// filling its slot. The backend claims P once every slot verifies.

#include <functional>
#include <map>

#include "pathauth/protocol.hpp"

namespace pathauth {

class ReScModel : public ProtocolModel {
public:
    // Deployed field sizes in bits, used for storage accounting.
    static constexpr std::size_t kSessionKeyBits = 128;
    static constexpr std::size_t kIndexBits = 20;
    static constexpr std::size_t kTimestampBits = 23;
    static constexpr std::size_t kSignatureBits = 512;
    static constexpr std::size_t kSlotBits = kSessionKeyBits + kIndexBits + kTimestampBits + kSignatureBits;

    /// Per-path storage for n steps, excluding TID and path pointer.
    static constexpr std::size_t storage_bits(std::size_t n) { return n * kSlotBits; }

    struct Slot {
        Bytes sig, index, ts;
        bool filled() const { return !sig.empty(); }
    };
    struct TagContent {
        Bytes tid;
        ReaderSeq path;
        std::vector<Slot> slots;
    };

    std::string name() const override { return "resc"; }
    VerifierPolicy verifier_policy() const override { return VerifierPolicy::Backend; }
    Architecture architecture() const override { return Architecture::Online; }

    void setup(Environment& env, const ProtocolConfig& config) override {
        store_config(config);
        backend_ = backend(config.option("backend", "B"));
        fab_seed_ = random_bytes(env.rng, 32);
        for (const auto& r : config.readers) reader_keys_[r] = random_bytes(env.rng, 32);
        for (const auto& spec : config.tags) {
            init_tag(env, spec.id);
            const Bytes ccid = puf("iot:" + spec.id.value, fab_seed_)(to_bytes("enroll"));
            // Registration travels over a trusted link.
            send(env, reader(config.option("registrar", "IoT")), backend_, encode_record({ccid, id_bytes(spec.id)}), true);
            const Bytes digest = hash(cat({ccid, id_bytes(spec.id)}));
            TagContent c{Bytes(digest.begin(), digest.begin() + 16), static_path(config, spec.id), {}};
            std::vector<Bytes> keys;
            for (const auto& r : c.path) {
                if (!reader_keys_.count(r)) throw UsageError("resc path reader " + r.value + " is not registered");
                keys.push_back(session_key(r, c.tid));
            }
            c.slots.resize(c.path.size());
            tids_[c.tid] = spec.id;
            env.tag(spec.id).write(serialize(c), encode_record(keys), storage_bits(c.path.size()));
            env.trace.valid_path(spec.id, c.path);
        }
    }

    std::optional<std::size_t> claim(Environment& env, const Identifier& t, const Identifier& verifier) override {
        require_verifier(verifier == backend_, name(), verifier);
        auto raw = read_tag(env, verifier, t);
        auto c = raw ? parse(*raw) : std::nullopt;
        if (!c || !tids_.count(c->tid) || tids_.at(c->tid) != t) {
            env.anomalies.push_back("resc: unreadable or unknown tag " + t.value);
            return std::nullopt;
        }
        for (std::size_t i = 0; i < c->path.size(); ++i) {
            const auto& s = c->slots[i];
            if (!s.filled() || s.sig != signature(session_key(c->path[i], c->tid), c->tid, s.index, s.ts)) {
                env.anomalies.push_back("resc: signature " + std::to_string(i + 1) + " missing or invalid on " + t.value);
                return std::nullopt;
            }
        }
        return env.trace.claim(t, c->path, verifier);
    }

    ReaderSecrets reader_secrets(const Identifier& r) const override {
        ReaderSecrets s;
        if (auto it = reader_keys_.find(r); it != reader_keys_.end()) s.named["resc.k." + r.value] = it->second;
        return s;
    }

    Bytes session_key(const Identifier& r, const Bytes& tid) const { return sym_enc(reader_keys_.at(r), tid); }

    static Bytes signature(const Bytes& key, const Bytes& tid, const Bytes& index, const Bytes& ts) {
        return mac(key, encode_record({to_bytes("sig"), tid, index, ts}));
    }

    /// One step performed by `device`; `key_for` maps the tag's TID to the
    /// session key the device uses. Honest readers derive it from k_r, anyone
    /// who extracted a key from the tag can pass it in directly.
    StepStatus run_step(Environment& env, const Identifier& device, const Identifier& t,
                        const std::function<Bytes(const Bytes&)>& key_for, std::string& detail) {
        auto raw = read_tag(env, device, t);
        if (!raw) return fail(detail, StepStatus::Timeout, "tag reply withheld");
        auto c = parse(*raw);
        if (!c) return fail(detail, StepStatus::Rejected, "malformed tag content");
        const Bytes key = key_for(c->tid);
        const auto keys = decode_record(env.tag(t).protected_region());
        if (!keys || keys->size() != c->path.size()) return fail(detail, StepStatus::Rejected, "tag key store corrupt");

        // The tag answers for the first slot whose key matches the reader's proof.
        const Bytes reader_nonce = random_bytes(env.rng, 16);
        auto challenge = send(env, device, t, reader_nonce);
        if (!challenge) return fail(detail, StepStatus::Timeout, "challenge withheld");
        std::optional<std::size_t> slot;
        for (std::size_t i = 0; i < keys->size() && !slot; ++i)
            if (!c->slots[i].filled() && (*keys)[i] == key) slot = i;
        if (!slot) return fail(detail, StepStatus::Rejected, "no open slot for this key");
        const Bytes tag_nonce = random_bytes(env.rng, 16);
        auto tag_proof = send(env, t, device, cat({tag_nonce, mac((*keys)[*slot], cat({to_bytes("T"), *challenge, tag_nonce}))}));
        if (!tag_proof) return fail(detail, StepStatus::Timeout, "tag proof withheld");
        if (tag_proof->size() != 16 + kDigestSize) return fail(detail, StepStatus::Rejected, "malformed tag proof");
        const Bytes nt(tag_proof->begin(), tag_proof->begin() + 16);
        const Bytes proof(tag_proof->begin() + 16, tag_proof->end());
        if (proof != mac(key, cat({to_bytes("T"), reader_nonce, nt}))) return fail(detail, StepStatus::Rejected, "tag failed authentication");
        auto reader_proof = send(env, device, t, mac(key, cat({to_bytes("R"), nt})));
        if (!reader_proof) return fail(detail, StepStatus::Timeout, "reader proof withheld");
        if (*reader_proof != mac((*keys)[*slot], cat({to_bytes("R"), tag_nonce})))
            return fail(detail, StepStatus::Rejected, "reader failed authentication");

        auto& s = c->slots[*slot];
        s.index = be64(*slot + 1);
        s.ts = be64(env.steps.size() + 1);
        s.sig = signature(key, c->tid, s.index, s.ts);
        if (!write_tag(env, device, t, serialize(*c), storage_bits(c->path.size())))
            return fail(detail, StepStatus::Timeout, "tag write withheld");
        return StepStatus::Accepted;
    }

    static std::optional<TagContent> parse(const Bytes& raw) {
        auto f = decode_record(raw);
        if (!f || f->size() < 2 || ((*f).size() - 2) % 3) return std::nullopt;
        TagContent c{(*f)[0], {}, {}};
        auto names = decode_record((*f)[1]);
        if (!names) return std::nullopt;
        for (const auto& n : *names) c.path.push_back(reader(std::string(n.begin(), n.end())));
        if (f->size() - 2 != 3 * c.path.size()) return std::nullopt;
        for (std::size_t i = 2; i < f->size(); i += 3) c.slots.push_back({(*f)[i], (*f)[i + 1], (*f)[i + 2]});
        return c;
    }

    static Bytes serialize(const TagContent& c) {
        std::vector<Bytes> names;
        for (const auto& r : c.path) names.push_back(id_bytes(r));
        std::vector<Bytes> fields{c.tid, encode_record(names)};
        for (const auto& s : c.slots) {
            fields.push_back(s.sig);
            fields.push_back(s.index);
            fields.push_back(s.ts);
        }
        return encode_record(fields);
    }

    const Identifier& backend_id() const noexcept { return backend_; }

protected:
    StepStatus process(Environment& env, const Identifier& r, const Identifier& t, std::string& detail) override {
        return run_step(env, r, t, [&](const Bytes& tid) { return session_key(r, tid); }, detail);
    }

private:
    Identifier backend_ = backend("B");
    Bytes fab_seed_;
    std::map<Identifier, Bytes> reader_keys_;
    std::map<Bytes, Identifier> tids_;
};

} // namespace pathauth
