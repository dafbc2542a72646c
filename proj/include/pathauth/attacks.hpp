#pragma once

// Scripted attacks. Each builds its own seeded environment, drives the honest
// parties and the adversary, and returns an outcome whose evidence can be
// re-checked independently of the attack code.

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "pathauth/protocols.hpp"
#include "pathauth/stats.hpp"
#include "pathauth/trace_io.hpp"

namespace pathauth {

/// A ledger record attributed to a tag, with the key that proves it.
struct LinkEvidence {
    std::size_t record = 0;
    Bytes key;
    Bytes pseudo_id;
    Bytes id;
};

struct AttackOutcome {
    std::string name;
    bool succeeded = false;
    std::string violated_property; // sound, complete, sorted, authorized, privacy; empty if none
    Trace trace;
    std::set<AttackLabel> labels;
    std::vector<std::string> knowledge_used;
    std::vector<LinkEvidence> links;
    std::optional<std::pair<Bytes, Bytes>> forged_digest; // message and the digest computed without its prefix
    std::vector<std::string> notes;

    std::string report() const {
        std::ostringstream out;
        out << "attack " << name << "\n"
            << "succeeded " << (succeeded ? "true" : "false") << "\n"
            << "violated " << (violated_property.empty() ? "none" : violated_property) << "\n";
        out << "labels";
        for (auto l : labels) out << ' ' << to_string(l);
        out << "\n";
        for (const auto& k : knowledge_used) out << "knowledge " << k << "\n";
        for (const auto& l : links) out << "link " << l.record << ' ' << to_hex(l.key) << "\n";
        if (forged_digest) out << "forged " << to_hex(forged_digest->second) << "\n";
        for (const auto& n : notes) out << "note " << n << "\n";
        out << "trace\n" << dump_trace(trace);
        return out.str();
    }
};

namespace attack_detail {

inline bool property_violated(const Verdict& v, const std::string& property) {
    if (property == "sound") return !v.sound;
    if (property == "complete") return !v.complete;
    if (property == "sorted") return !v.sorted;
    if (property == "authorized") return !v.authorized;
    return false;
}

/// Labels every claim in the trace against the tag's physical path and declared valid paths.
inline std::set<AttackLabel> label_claims(const Trace& trace) {
    std::set<AttackLabel> out;
    for (auto idx : trace.claim_indices()) {
        const auto& c = std::get<PathClaim>(trace[idx].body);
        std::vector<ReaderSeq> valid;
        for (std::size_t j = 0; j < idx; ++j)
            if (const auto* vp = std::get_if<ValidPath>(&trace[j].body); vp && vp->tag == c.tag) valid.push_back(vp->readers);
        auto labels = classify(physical_path(trace, c.tag, idx), c.readers,
                               valid.empty() ? std::nullopt : std::optional(valid));
        out.insert(labels.begin(), labels.end());
    }
    return out;
}

/// Marks the outcome succeeded iff some claim in its trace violates `property`.
inline void conclude_from_trace(AttackOutcome& o, const std::string& property) {
    o.violated_property = property;
    o.succeeded = false;
    for (const auto& v : evaluate_trace(o.trace)) o.succeeded = o.succeeded || property_violated(v, property);
    o.labels = label_claims(o.trace);
    if (!o.succeeded) o.violated_property.clear();
}

inline ReaderSeq numbered(const std::string& prefix, std::size_t n) {
    ReaderSeq out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(reader(prefix + std::to_string(i)));
    return out;
}

} // namespace attack_detail

/// Re-checks an outcome from its serialized evidence alone.
inline bool reverify(const AttackOutcome& o) {
    if (!o.succeeded) return false;
    if (o.violated_property == "privacy") {
        if (o.links.empty()) return false;
        return std::all_of(o.links.begin(), o.links.end(),
                           [](const LinkEvidence& l) { return sym_enc(l.key, l.id) == l.pseudo_id; });
    }
    if (o.forged_digest) return hash(o.forged_digest->first) == o.forged_digest->second;
    const Trace replayed = parse_trace(dump_trace(o.trace));
    for (const auto& v : evaluate_trace(replayed))
        if (attack_detail::property_violated(v, o.violated_property)) return true;
    return false;
}

// ---------------------------------------------------------------- RF-Chain

/// Links ledger records to the tag whose content was read: walks the chain
/// downwards and, for each element's chain value, tries every record's
/// b_j as a mask of H(h_x).
inline std::vector<LinkEvidence> link_rfchain_records(const RfChainModel::TagContent& content,
                                                      const SharedLedger& ledger) {
    std::vector<Bytes> chain{content.a};
    while (auto sig = SignatureWithAppendix::parse(chain.back())) chain.push_back(sig->message);
    std::vector<LinkEvidence> out;
    std::set<std::size_t> seen;
    for (const auto& element : chain) {
        const Bytes cv = RfChainModel::chain_value(element);
        for (std::size_t j = 0; j < ledger.size(); ++j) {
            const auto& rec = ledger.records()[j];
            if (seen.count(j) || rec.payload.size() != cv.size()) continue;
            const Bytes key = xor_bytes(cv, rec.payload);
            if (sym_enc(key, content.id) == rec.pseudo_id) {
                out.push_back({j, key, rec.pseudo_id, content.id});
                seen.insert(j);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.record < b.record; });
    return out;
}

struct RfChainLinkingParams {
    std::size_t steps = 3;
    std::size_t decoys = 0;
    bool patched = false;
};

inline AttackOutcome attack_rfchain_linking(std::uint64_t seed, const RfChainLinkingParams& p = {}) {
    AttackOutcome o;
    o.name = "rfchain_linking";
    Environment env(seed, Model::AdvT);
    RfChainModel model;
    ProtocolConfig cfg;
    cfg.readers = attack_detail::numbered("r", std::max<std::size_t>(p.steps, 5));
    cfg.capacity_bits = 1u << 20;
    cfg.options["patched"] = p.patched ? "1" : "0";
    const Identifier target = tag("t1");
    cfg.tags.push_back({target, {ReaderSeq(cfg.readers.begin(), cfg.readers.begin() + static_cast<std::ptrdiff_t>(p.steps))}});
    Rng pick(mix_seed(seed, 0xdec0));
    for (std::size_t d = 1; d <= p.decoys; ++d) {
        ReaderSeq path = cfg.readers;
        std::shuffle(path.begin(), path.end(), pick);
        path.resize(p.steps);
        cfg.tags.push_back({tag("d" + std::to_string(d)), {path}});
    }
    model.setup(env, cfg);

    // Interleave every tag's steps so the target's records are scattered.
    std::set<std::size_t> truth;
    for (std::size_t step = 0; step < p.steps; ++step)
        for (const auto& spec : cfg.tags) {
            const auto before = env.ledger.size();
            model.on_arrival(env, spec.valid_paths.front()[step], spec.id);
            if (spec.id == target)
                for (auto i = before; i < env.ledger.size(); ++i) truth.insert(i);
        }

    const auto snap = adversary_read_tag(env.adversary, env.tag(target), false);
    const auto content = RfChainModel::parse(snap.public_region);
    o.knowledge_used.push_back("tag content of " + target.value + " read once");
    o.trace = env.trace;
    if (!content) return o;
    o.links = link_rfchain_records(*content, env.ledger);

    std::set<std::size_t> linked;
    for (const auto& l : o.links) linked.insert(l.record);
    std::size_t false_positives = 0;
    for (auto i : linked) false_positives += truth.count(i) ? 0 : 1;
    o.notes.push_back("linked " + std::to_string(linked.size() - false_positives) + "/" + std::to_string(truth.size()) +
                      " target records, " + std::to_string(false_positives) + " false positives, ledger size " +
                      std::to_string(env.ledger.size()));
    o.succeeded = !truth.empty() && linked == truth;
    o.violated_property = o.succeeded ? "privacy" : "";
    if (!o.succeeded) o.links.clear();
    return o;
}

/// Length extension against the hash that seeds the chain.
inline AttackOutcome attack_rfchain_length_extension(ConcatMode mode) {
    AttackOutcome o;
    o.name = "rfchain_length_extension";
    const auto r = probe_length_extension(mode, {to_bytes("ID-0042"), to_bytes("F"), to_bytes("pwd"), to_bytes("nonce")},
                                          to_bytes("|i=9"));
    o.knowledge_used.push_back("digest a_0 and the encoded input length");
    o.notes.push_back(std::string("encoding ") + (mode == ConcatMode::Raw ? "raw" : "length-prefixed") +
                      ", digest_matches " + (r.digest_matches ? "true" : "false") + ", message_accepted " +
                      (r.message_accepted ? "true" : "false"));
    o.succeeded = r.digest_matches && r.message_accepted;
    if (o.succeeded) o.forged_digest.emplace(r.forged_message, r.forged_digest);
    o.violated_property = o.succeeded ? "sound" : "";
    return o;
}

// ---------------------------------------------------------------- Ray

/// Visits a Ray path in `visit` order; succeeds if every step is accepted and
/// the checkpoint's claim is not sorted with respect to the physical order.
inline AttackOutcome attack_ray_out_of_order(std::uint64_t seed, const ReaderSeq& intended, const ReaderSeq& visit) {
    AttackOutcome o;
    o.name = "ray_out_of_order";
    Environment env(seed, Model::AdvT);
    RayModel model;
    ProtocolConfig cfg;
    cfg.readers = intended;
    cfg.tags.push_back({tag("t1"), {intended}});
    cfg.capacity_bits = 1u << 20;
    model.setup(env, cfg);
    bool all_accepted = true;
    for (const auto& r : visit) all_accepted = model.on_arrival(env, r, tag("t1")) == StepStatus::Accepted && all_accepted;
    model.claim(env, tag("t1"), model.checkpoint());
    o.trace = env.trace;
    attack_detail::conclude_from_trace(o, "sorted");
    o.succeeded = o.succeeded && all_accepted;
    if (!o.succeeded) o.violated_property.clear();
    return o;
}

struct PermutationSweep {
    std::size_t permutations = 0;
    std::size_t accepted = 0;   // every step accepted and a claim issued
    std::size_t unsorted = 0;   // accepted and the claim fails the sorted check
};

/// Runs every visit order of a path of `length` readers.
inline PermutationSweep ray_permutation_sweep(std::uint64_t seed, std::size_t length) {
    PermutationSweep s;
    const ReaderSeq intended = attack_detail::numbered("r", length);
    ReaderSeq visit = intended;
    std::sort(visit.begin(), visit.end());
    do {
        ++s.permutations;
        Environment env(seed, Model::AdvT);
        RayModel model;
        ProtocolConfig cfg;
        cfg.readers = intended;
        cfg.tags.push_back({tag("t1"), {intended}});
        cfg.capacity_bits = 1u << 20;
        model.setup(env, cfg);
        bool ok = true;
        for (const auto& r : visit) ok = model.on_arrival(env, r, tag("t1")) == StepStatus::Accepted && ok;
        auto claim = model.claim(env, tag("t1"), model.checkpoint());
        if (ok && claim) {
            ++s.accepted;
            if (!evaluate_claim(env.trace, *claim).sorted) ++s.unsorted;
        }
    } while (std::next_permutation(visit.begin(), visit.end()));
    return s;
}

struct RayImpersonationParams {
    std::size_t length = 4;
    std::size_t observed = 2; // 1-based position of the honest step the adversary eavesdrops
    bool prf_variant = false;
    bool observe = true;
};

/// Derives every other challenge from one observed challenge and the public
/// identifiers, then presents them from a rogue device.
inline AttackOutcome attack_ray_impersonation(std::uint64_t seed, const RayImpersonationParams& p = {}) {
    AttackOutcome o;
    o.name = "ray_impersonation";
    Environment env(seed, Model::AdvT);
    RayModel model;
    ProtocolConfig cfg;
    const ReaderSeq path = attack_detail::numbered("r", p.length);
    cfg.readers = path;
    cfg.tags.push_back({tag("t1"), {path}});
    cfg.capacity_bits = 1u << 20;
    if (p.prf_variant) cfg.options["prf"] = "1";
    model.setup(env, cfg);
    const Identifier t = tag("t1");
    const Identifier& honest = path.at(p.observed - 1);
    if (p.observe) model.on_arrival(env, honest, t);

    std::optional<Bytes> observed;
    for (const auto& e : env.network.transcript())
        if (e.envelope.sender == honest && e.envelope.receiver == t && env.adversary.knowledge().knows(e.envelope.payload))
            observed = e.envelope.payload;
    if (!observed) {
        o.notes.push_back("no challenge observed");
        o.trace = env.trace;
        return o;
    }
    o.knowledge_used.push_back("challenge of " + honest.value + " " + to_hex(*observed));
    o.knowledge_used.push_back("public participant identifiers");

    const Identifier rogue = reader("rx");
    bool all = true;
    for (const auto& r : path) {
        if (r == honest) continue;
        // c_j = c_i xor PID_i xor PID_j; any per-path PRF term cancels.
        const Bytes cj = xor_bytes(*observed, xor_bytes(RayModel::pid(honest), RayModel::pid(r)));
        model.on_arrival(env, rogue, t);
        const auto e = env.network.inject(rogue, t, cj);
        const bool accepted = model.tag_receive(env, t, e.payload).has_value();
        o.notes.push_back("impersonated " + r.value + (accepted ? " accepted" : " refused"));
        all = all && accepted;
    }
    model.claim(env, t, model.checkpoint());
    o.trace = env.trace;
    attack_detail::conclude_from_trace(o, "sound");
    o.succeeded = o.succeeded && all;
    if (!o.succeeded) o.violated_property.clear();
    return o;
}

// ---------------------------------------------------------------- Burbridge

/// Colluding participants route t1 along t2's path, skipping rc.
/// Throws CapabilityError under AdvT.
inline AttackOutcome attack_burbridge_bypass(std::uint64_t seed, Model model_kind = Model::AdvR,
                                             BurbridgeModel::KeyMode mode = BurbridgeModel::KeyMode::Shared) {
    AttackOutcome o;
    o.name = "burbridge_bypass";
    Environment env(seed, model_kind);
    BurbridgeModel model;
    ProtocolConfig cfg;
    cfg.readers = readers({"ra", "rb", "rc", "rd", "re"});
    cfg.tags.push_back({tag("t1"), {readers({"ra", "rb", "rc", "rd", "re"})}});
    cfg.tags.push_back({tag("t2"), {readers({"ra", "rb", "rd", "re"})}});
    cfg.options["keys"] = mode == BurbridgeModel::KeyMode::PerTag ? "per_tag" : "shared";
    model.setup(env, cfg);
    model.compromise(env, reader("rb"));
    model.compromise(env, reader("rd"));
    o.knowledge_used.push_back("secrets of rb and rd");
    bool all = true;
    for (const auto& r : readers({"ra", "rb", "rd", "re"}))
        all = model.on_arrival(env, r, tag("t1")) == StepStatus::Accepted && all;
    const auto claim = model.claim(env, tag("t1"), model.scc());
    o.trace = env.trace;
    attack_detail::conclude_from_trace(o, "sound");
    if (claim) {
        const auto v = evaluate_claim(env.trace, *claim);
        o.notes.push_back(std::string("claim authorized ") + (v.authorized ? "true" : "false") + ", sound " +
                          (v.sound ? "true" : "false"));
        o.succeeded = o.succeeded && v.authorized && all;
    } else {
        o.notes.push_back("no claim: shipment rejected");
        o.succeeded = false;
    }
    if (!o.succeeded) o.violated_property.clear();
    return o;
}

// ---------------------------------------------------------------- ReSC

struct ReScDisclosureParams {
    std::size_t length = 4;
    std::size_t read_after = 1;  // honest steps completed before the tag is read
    std::size_t impersonate = 3; // 1-based reader position to impersonate
};

/// Reads the session keys through a compromised reader, then fills a later
/// reader's slot from a rogue device while the tag never visits that reader.
inline AttackOutcome attack_resc_key_disclosure(std::uint64_t seed, const ReScDisclosureParams& p = {}) {
    AttackOutcome o;
    o.name = "resc_key_disclosure";
    Environment env(seed, Model::AdvR);
    ReScModel model;
    ProtocolConfig cfg;
    const ReaderSeq path = attack_detail::numbered("r", p.length);
    cfg.readers = path;
    cfg.tags.push_back({tag("t1"), {path}});
    cfg.capacity_bits = 1u << 16;
    model.setup(env, cfg);
    const Identifier t = tag("t1");
    model.compromise(env, path.front());

    std::size_t done = 0;
    for (; done < p.read_after && done < path.size(); ++done) model.on_arrival(env, path[done], t);
    const auto snap = adversary_read_tag(env.adversary, env.tag(t), true);
    const auto keys = decode_record(snap.protected_region);
    o.knowledge_used.push_back("protected region read via " + path.front().value);

    const std::size_t victim = p.impersonate - 1;
    bool forged = false;
    for (std::size_t i = done; i < path.size(); ++i) {
        if (i == victim && keys && victim < keys->size() && victim >= done) {
            std::string detail;
            const Bytes key = (*keys)[victim];
            o.knowledge_used.push_back("session key of " + path[victim].value);
            forged = model.run_step(env, reader("rx"), t, [&](const Bytes&) { return key; }, detail) ==
                     StepStatus::Accepted;
            o.notes.push_back("impersonated " + path[victim].value + (forged ? " accepted" : " refused: " + detail));
            continue;
        }
        model.on_arrival(env, path[i], t);
    }
    if (victim < done) o.notes.push_back("no future key left for " + path.at(victim).value);
    model.claim(env, t, model.backend_id());
    o.trace = env.trace;
    attack_detail::conclude_from_trace(o, "sound");
    o.succeeded = o.succeeded && forged;
    if (!o.succeeded) o.violated_property.clear();
    return o;
}

// ---------------------------------------------------------------- Tracker

struct OrderSearchParams {
    u64 q = 1009;
    std::size_t readers = 3;
    std::size_t length = 3;
    std::size_t assignments = 100; // random coefficient assignments searched
    bool equal_pair = false;       // force a_1 = a_2
};

struct OrderSearchResult {
    std::uint64_t comparisons = 0;
    std::uint64_t collisions = 0;
    double rate = 0;
    Interval ci;
    AttackOutcome outcome;
};

/// Searches visit-order permutations of every valid path over a small field
/// for evaluations equal to the valid path's (i.e. accepted by the manager).
inline OrderSearchResult attack_tracker_order_search(std::uint64_t seed, const OrderSearchParams& p = {}) {
    if (p.q > 1009 || !is_prime(p.q)) throw BoundedSearchError("field order must be a prime no larger than 1009");
    if (p.readers > 4 || p.readers == 0) throw BoundedSearchError("reader set must have 1..4 readers");
    if (p.length > 4 || p.length == 0 || p.length > p.readers) throw BoundedSearchError("path length must be 1..4 and fit the reader set");

    OrderSearchResult res;
    res.outcome.name = "tracker_order_search";
    const ReaderSeq all = attack_detail::numbered("r", p.readers);
    Rng rng(seed);
    std::optional<std::pair<ReaderSeq, ReaderSeq>> witness;

    for (std::size_t a = 0; a < p.assignments; ++a) {
        const FieldElement x0 = FieldElement::random_nonzero(rng, p.q);
        const FieldElement a0 = FieldElement::random_nonzero(rng, p.q);
        std::map<Identifier, FieldElement> coeff;
        for (const auto& r : all) coeff.emplace(r, FieldElement::random_nonzero(rng, p.q));
        if (p.equal_pair && p.readers >= 2) coeff.at(all[1]) = coeff.at(all[0]);
        auto eval = [&](const ReaderSeq& path) {
            PathPolynomial poly;
            poly.coefficients.push_back(a0);
            for (const auto& r : path) poly.coefficients.push_back(coeff.at(r));
            return poly_eval(poly, x0).value();
        };

        // Every ordered selection of `length` readers is a candidate valid path.
        std::vector<std::size_t> idx(p.readers);
        std::iota(idx.begin(), idx.end(), 0);
        std::set<ReaderSeq> valid_paths;
        do {
            ReaderSeq v;
            for (std::size_t i = 0; i < p.length; ++i) v.push_back(all[idx[i]]);
            valid_paths.insert(v);
        } while (std::next_permutation(idx.begin(), idx.end()));

        for (const auto& valid : valid_paths) {
            const u64 target = eval(valid);
            ReaderSeq visit = valid;
            std::sort(visit.begin(), visit.end());
            do {
                if (visit == valid) continue;
                ++res.comparisons;
                if (eval(visit) == target) {
                    ++res.collisions;
                    if (!witness) witness.emplace(valid, visit);
                }
            } while (std::next_permutation(visit.begin(), visit.end()));
        }
    }

    res.rate = res.comparisons ? static_cast<double>(res.collisions) / static_cast<double>(res.comparisons) : 0;
    res.ci = wilson_interval(res.collisions, res.comparisons);
    auto& o = res.outcome;
    std::ostringstream note;
    note << "q " << p.q << ", comparisons " << res.comparisons << ", collisions " << res.collisions;
    o.notes.push_back(note.str());
    if (witness) {
        // The manager accepts the permuted visit and claims the valid path.
        const Identifier t = tag("t1");
        o.trace.valid_path(t, witness->first);
        for (const auto& r : witness->second) o.trace.move(t, r);
        o.trace.claim(t, witness->first, reader("M"));
        o.knowledge_used.push_back("coefficient assignment with colliding evaluations");
    }
    attack_detail::conclude_from_trace(o, "sorted");
    return res;
}

/// Frequency with which two random distinct paths evaluate equally at a random x0.
struct CollisionProbe {
    std::uint64_t pairs = 0;
    std::uint64_t collisions = 0;
    double rate = 0;
};

inline CollisionProbe tracker_collision_probe(std::uint64_t seed, u64 q, std::uint64_t pairs, std::size_t length = 3,
                                              std::size_t reader_count = 8) {
    CollisionProbe res;
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, reader_count - 1);
    std::vector<FieldElement> coeff;
    while (res.pairs < pairs) {
        coeff.clear();
        for (std::size_t r = 0; r < reader_count; ++r) coeff.push_back(FieldElement::random_nonzero(rng, q));
        const FieldElement a0 = FieldElement::random_nonzero(rng, q);
        const FieldElement x0 = FieldElement::random_nonzero(rng, q);
        std::vector<std::size_t> p1(length), p2(length);
        for (auto& r : p1) r = pick(rng);
        for (auto& r : p2) r = pick(rng);
        if (p1 == p2) continue;
        auto eval = [&](const std::vector<std::size_t>& path) {
            PathPolynomial poly;
            poly.coefficients.push_back(a0);
            for (auto r : path) poly.coefficients.push_back(coeff[r]);
            return poly_eval(poly, x0).value();
        };
        ++res.pairs;
        if (eval(p1) == eval(p2)) ++res.collisions;
    }
    res.rate = static_cast<double>(res.collisions) / static_cast<double>(res.pairs);
    return res;
}

// ---------------------------------------------------------------- registry

inline const std::vector<std::string>& attack_names() {
    static const std::vector<std::string> names{"rfchain_linking", "rfchain_length_extension", "ray_out_of_order",
                                                "ray_impersonation", "burbridge_bypass",
                                                "resc_key_disclosure", "tracker_order_search"};
    return names;
}

struct AttackInfo {
    std::string protocol;
    Model model; // weakest adversary model the attack needs
};

inline AttackInfo attack_info(const std::string& name) {
    static const std::map<std::string, AttackInfo> info{
        {"rfchain_linking", {"rfchain", Model::AdvT}},     {"rfchain_length_extension", {"rfchain", Model::AdvT}},
        {"ray_out_of_order", {"ray", Model::AdvT}},        {"ray_impersonation", {"ray", Model::AdvT}},
        {"burbridge_bypass", {"burbridge", Model::AdvR}},  {"resc_key_disclosure", {"resc", Model::AdvR}},
        {"tracker_order_search", {"tracker", Model::AdvT}}};
    auto it = info.find(name);
    if (it == info.end()) throw UsageError("unknown attack '" + name + "'");
    return it->second;
}

/// Runs an attack by name with its reference parameters.
inline AttackOutcome run_attack(const std::string& name, std::uint64_t seed) {
    if (name == "rfchain_linking") return attack_rfchain_linking(seed, {3, 10, false});
    if (name == "rfchain_length_extension") return attack_rfchain_length_extension(ConcatMode::Raw);
    if (name == "ray_out_of_order") return attack_ray_out_of_order(seed, readers({"r1", "r2", "r3"}), readers({"r2", "r1", "r3"}));
    if (name == "ray_impersonation") return attack_ray_impersonation(seed);
    if (name == "burbridge_bypass") return attack_burbridge_bypass(seed);
    if (name == "resc_key_disclosure") return attack_resc_key_disclosure(seed);
    if (name == "tracker_order_search") return attack_tracker_order_search(seed, {1009, 3, 3, 100, true}).outcome;
    throw UsageError("unknown attack '" + name + "'");
}

/// As above, refusing attacks that need more than `available`.
inline AttackOutcome run_attack(const std::string& name, std::uint64_t seed, Model available) {
    const auto info = attack_info(name);
    if (info.model == Model::AdvR && available == Model::AdvT)
        throw CapabilityError("attack " + name + " requires AdvR");
    return run_attack(name, seed);
}

} // namespace pathauth
