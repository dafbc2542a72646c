#pragma once

// Left-right unlinkability experiments.
//
// Tag game: tags A and B each run a path of 2L+1 steps. The adversary sees
// A's first L steps, then the last L steps of A (bit = same) or B (bit =
// different). Step L+1 is never observed, so plain adjacency (the state
// written at one step is read at the next) does not decide the game.
//
// Step game: tags X and Y run paths of equal length that either share one
// reader or are disjoint; the adversary sees both complete transcripts.
//
// In both games a third tag C supplies a reference observation of an
// unrelated tag.

#include <array>
#include <cstring>
#include <functional>
#include <set>
#include <unordered_set>

#include "pathauth/attacks.hpp"
#include "pathauth/protocols.hpp"
#include "pathauth/stats.hpp"

namespace pathauth {

enum class GameKind { TagUnlinkability, StepUnlinkability };

inline const char* to_string(GameKind k) { return k == GameKind::TagUnlinkability ? "tag" : "step"; }

inline GameKind parse_game(const std::string& s) {
    if (s == "tag" || s == "tag_unlinkability") return GameKind::TagUnlinkability;
    if (s == "step" || s == "step_unlinkability") return GameKind::StepUnlinkability;
    throw UsageError("unknown privacy game '" + s + "'");
}

/// Which traffic an observation contains.
enum class View { Tag, Ledger, Both };

inline const char* to_string(View v) { return v == View::Tag ? "tag" : v == View::Ledger ? "ledger" : "both"; }

inline View parse_view(const std::string& s) {
    if (s == "tag") return View::Tag;
    if (s == "ledger") return View::Ledger;
    if (s == "both") return View::Both;
    throw UsageError("unknown view '" + s + "'");
}

struct Observation {
    std::vector<Bytes> messages;
    std::vector<SharedLedger::Record> records;
};

struct GameChallenge {
    Observation first, second, reference;
    const Knowledge* knowledge = nullptr;
    ReaderSeq universe; // public reader identifiers
};

/// Returns true for "same tag" (tag game) or "paths share a reader" (step game).
using Distinguisher = std::function<bool(const GameChallenge&, Rng&)>;

struct PrivacyGame {
    GameKind kind = GameKind::TagUnlinkability;
    std::string protocol;
    std::string adversary = "random_guess";
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    Model model = Model::AdvT;
    ReaderSeq compromised;        // handed to the adversary before the run; off-path unless the tracker manager
    View first_view = View::Tag;
    View second_view = View::Tag;
};

struct GameResult {
    std::string protocol, game, adversary;
    std::size_t trials = 0;
    std::size_t wins = 0;
    double advantage = 0;
    Interval ci; // on the advantage

    std::string record() const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %s %s trials=%zu wins=%zu advantage=%.4f ci=[%.4f,%.4f]", protocol.c_str(),
                      game.c_str(), adversary.c_str(), trials, wins, advantage, ci.low, ci.high);
        return buf;
    }
};

inline GameResult summarize(std::size_t wins, std::size_t trials) {
    GameResult r;
    r.trials = trials;
    r.wins = wins;
    if (trials == 0) return r;
    const double rate = static_cast<double>(wins) / static_cast<double>(trials);
    r.advantage = std::abs(rate - 0.5) * 2;
    const auto w = wilson_interval(wins, trials);
    const double far = std::max(std::abs(w.low - 0.5), std::abs(w.high - 0.5)) * 2;
    const double near = w.contains(0.5) ? 0.0 : std::min(std::abs(w.low - 0.5), std::abs(w.high - 0.5)) * 2;
    r.ci = {near, std::min(1.0, far)};
    return r;
}

// ------------------------------------------------------------------ adversaries

namespace privacy_detail {

constexpr std::size_t kWindow = 12;

using Window = std::array<std::uint8_t, kWindow>;

struct WindowHash {
    std::size_t operator()(const Window& w) const noexcept {
        u64 lo = 0;
        std::uint32_t hi = 0;
        std::memcpy(&lo, w.data(), 8);
        std::memcpy(&hi, w.data() + 8, 4);
        return std::hash<u64>{}(lo * 0x9e3779b97f4a7c15ULL ^ hi);
    }
};

using WindowSet = std::unordered_set<Window, WindowHash>;

template <typename F>
void for_each_window(const Observation& o, F&& f) {
    auto scan = [&f](const Bytes& b) {
        Window w;
        for (std::size_t i = 0; i + kWindow <= b.size(); ++i) {
            std::memcpy(w.data(), b.data() + i, kWindow);
            f(w);
        }
    };
    for (const auto& m : o.messages) scan(m);
    for (const auto& r : o.records) {
        scan(r.pseudo_id);
        scan(r.payload);
    }
}

inline WindowSet windows(const Observation& o) {
    WindowSet out;
    for_each_window(o, [&out](const Window& w) { out.insert(w); });
    return out;
}

/// True when `a` and `b` share a byte window that `reference` does not contain.
inline bool shares_window_beyond(const Observation& a, const Observation& b, const Observation& reference) {
    const auto left = windows(a);
    WindowSet common;
    for_each_window(b, [&](const Window& w) {
        if (left.count(w)) common.insert(w);
    });
    if (common.empty()) return false;
    for_each_window(reference, [&common](const Window& w) { common.erase(w); });
    return !common.empty();
}

/// ElGamal plaintexts of every 16-byte field under every known key.
inline std::set<u64> plaintexts(const Observation& o, const Knowledge& k) {
    std::set<u64> out;
    for (const auto& m : o.messages) {
        auto fields = decode_record(m);
        if (!fields) continue;
        for (const auto& f : *fields) {
            if (f.size() != 16) continue;
            for (const auto& sk : k.elgamal_keys())
                out.insert(elgamal_dec(sk, ElGamalCiphertext{read_u64(f, 0), read_u64(f, 8), sk.public_key(), 0}));
        }
    }
    return out;
}

template <typename T>
bool shares_beyond(const std::set<T>& a, const std::set<T>& b, const std::set<T>& reference) {
    for (const auto& x : a)
        if (b.count(x) && !reference.count(x)) return true;
    return false;
}

/// Readers whose PID pairs explain the xor of two messages of one observation.
inline std::set<Identifier> ray_readers(const Observation& o, const ReaderSeq& universe) {
    std::map<Bytes, std::pair<Identifier, Identifier>> pairs;
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = i + 1; j < universe.size(); ++j)
            pairs.emplace(xor_bytes(RayModel::pid(universe[i]), RayModel::pid(universe[j])), std::pair(universe[i], universe[j]));
    std::set<Identifier> out;
    for (std::size_t i = 0; i < o.messages.size(); ++i)
        for (std::size_t j = i + 1; j < o.messages.size(); ++j) {
            if (o.messages[i].size() != kDigestSize || o.messages[j].size() != kDigestSize) continue;
            if (auto it = pairs.find(xor_bytes(o.messages[i], o.messages[j])); it != pairs.end()) {
                out.insert(it->second.first);
                out.insert(it->second.second);
            }
        }
    return out;
}

inline bool ray_related(const Observation& a, const Observation& b, const ReaderSeq& universe) {
    std::set<Bytes> pairs;
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = i + 1; j < universe.size(); ++j)
            pairs.insert(xor_bytes(RayModel::pid(universe[i]), RayModel::pid(universe[j])));
    for (const auto& x : a.messages)
        for (const auto& y : b.messages)
            if (x.size() == kDigestSize && y.size() == kDigestSize && pairs.count(xor_bytes(x, y))) return true;
    return false;
}

inline bool rfchain_linked(const Observation& tag_side, const Observation& ledger_side) {
    SharedLedger ledger;
    for (const auto& r : ledger_side.records) ledger.append(r.pseudo_id, r.payload);
    for (const auto& m : tag_side.messages)
        if (auto content = RfChainModel::parse(m); content && !link_rfchain_records(*content, ledger).empty()) return true;
    return false;
}

} // namespace privacy_detail

inline const std::vector<std::string>& distinguisher_names() {
    static const std::vector<std::string> names{"random_guess", "full_transcript", "key_decrypt", "rfchain_linker", "ray_xor"};
    return names;
}

/// Distinguisher by name, checked against the protocol and game it is used with.
inline Distinguisher make_distinguisher(const std::string& name, const std::string& protocol, GameKind kind) {
    using namespace privacy_detail;
    if (name == "random_guess") return [](const GameChallenge&, Rng& rng) { return (rng() & 1) == 1; };
    if (name == "full_transcript")
        return [](const GameChallenge& c, Rng&) { return shares_window_beyond(c.first, c.second, c.reference); };
    if (name == "key_decrypt")
        return [](const GameChallenge& c, Rng&) {
            return shares_beyond(plaintexts(c.first, *c.knowledge), plaintexts(c.second, *c.knowledge),
                                 plaintexts(c.reference, *c.knowledge));
        };
    if (name == "rfchain_linker") {
        if (protocol != "rfchain" || kind != GameKind::TagUnlinkability)
            throw UnsupportedGameError("rfchain_linker needs the rfchain tag game");
        return [](const GameChallenge& c, Rng&) { return rfchain_linked(c.second, c.first) || rfchain_linked(c.first, c.second); };
    }
    if (name == "ray_xor") {
        if (protocol != "ray") throw UnsupportedGameError("ray_xor needs the ray protocol");
        if (kind == GameKind::TagUnlinkability)
            return [](const GameChallenge& c, Rng&) { return ray_related(c.first, c.second, c.universe); };
        return [](const GameChallenge& c, Rng&) {
            const auto a = ray_readers(c.first, c.universe), b = ray_readers(c.second, c.universe);
            return std::any_of(a.begin(), a.end(), [&](const Identifier& r) { return b.count(r) > 0; });
        };
    }
    throw UsageError("unknown distinguisher '" + name + "'");
}

// ------------------------------------------------------------------ challenger

namespace privacy_detail {

constexpr std::size_t kHalf = 2;
constexpr std::size_t kUniverse = 8;

struct StepLog {
    Identifier tag;
    std::size_t step = 0;
    std::size_t msg_begin = 0, msg_end = 0, rec_begin = 0, rec_end = 0;
};

inline Observation observe(const Environment& env, const std::vector<StepLog>& logs, const Identifier& t,
                           std::size_t first_step, std::size_t last_step, View view) {
    Observation o;
    for (const auto& l : logs) {
        if (l.tag != t || l.step < first_step || l.step > last_step) continue;
        if (view != View::Ledger)
            for (auto i = l.msg_begin; i < l.msg_end; ++i) {
                const auto& e = env.network.transcript()[i];
                if (e.action == Action::Trusted) continue;
                if (e.envelope.sender == t || e.envelope.receiver == t) o.messages.push_back(e.envelope.payload);
            }
        if (view != View::Tag)
            for (auto i = l.rec_begin; i < l.rec_end; ++i) o.records.push_back(env.ledger.records()[i]);
    }
    return o;
}

inline ReaderSeq sample_path(Rng& rng, const ReaderSeq& pool, std::size_t n) {
    ReaderSeq p = pool;
    std::shuffle(p.begin(), p.end(), rng);
    p.resize(n);
    return p;
}

/// One trial; returns whether the distinguisher guessed the hidden bit.
inline bool play_trial(const PrivacyGame& g, const Distinguisher& adv, std::uint64_t trial_seed) {
    Rng rng(trial_seed);
    const bool bit = (rng() & 1) == 1;
    const ReaderSeq universe = attack_detail::numbered("r", kUniverse);

    Identifier A = tag("tA"), B = tag("tB"), C = tag("tC");
    std::map<Identifier, ReaderSeq> paths;
    if (g.kind == GameKind::TagUnlinkability) {
        for (const auto& t : {A, B, C}) paths[t] = sample_path(rng, universe, 2 * kHalf + 1);
    } else {
        constexpr std::size_t n = 3;
        ReaderSeq shuffled = sample_path(rng, universe, universe.size());
        paths[A] = ReaderSeq(shuffled.begin(), shuffled.begin() + n);
        ReaderSeq y(shuffled.begin() + n, shuffled.begin() + 2 * n);
        if (bit) {
            const auto slot = rng() % n;
            y[slot] = paths[A][rng() % n];
        }
        paths[B] = y;
        paths[C] = sample_path(rng, universe, n);
    }

    Environment env(rng(), g.model);
    auto model = make_protocol(g.protocol);
    ProtocolConfig cfg;
    cfg.readers = universe;
    for (const auto& r : g.compromised)
        if (std::find(cfg.readers.begin(), cfg.readers.end(), r) == cfg.readers.end() &&
            !(g.protocol == "tracker" && r == reader("M")))
            cfg.readers.push_back(r);
    for (const auto& [t, p] : paths) cfg.tags.push_back({t, {p}});
    cfg.capacity_bits = 1u << 20;
    model->setup(env, cfg);
    for (const auto& r : g.compromised) model->compromise(env, r);

    // Round-robin schedule so the tags' traffic interleaves.
    std::vector<StepLog> logs;
    const std::size_t steps = paths.begin()->second.size();
    for (std::size_t s = 0; s < steps; ++s)
        for (const auto& [t, p] : paths) {
            StepLog l{t, s, env.network.transcript().size(), 0, env.ledger.size(), 0};
            model->on_arrival(env, p[s], t);
            l.msg_end = env.network.transcript().size();
            l.rec_end = env.ledger.size();
            logs.push_back(l);
        }

    GameChallenge ch;
    ch.knowledge = &env.adversary.knowledge();
    ch.universe = universe;
    if (g.kind == GameKind::TagUnlinkability) {
        ch.first = observe(env, logs, A, 0, kHalf - 1, g.first_view);
        ch.second = observe(env, logs, bit ? A : B, kHalf + 1, 2 * kHalf, g.second_view);
        ch.reference = observe(env, logs, C, 0, 2 * kHalf, View::Both);
    } else {
        ch.first = observe(env, logs, A, 0, steps - 1, g.first_view);
        ch.second = observe(env, logs, B, 0, steps - 1, g.second_view);
        ch.reference = observe(env, logs, C, 0, steps - 1, View::Both);
    }
    return adv(ch, rng) == bit;
}

} // namespace privacy_detail

inline GameResult run_game(const PrivacyGame& g) {
    if (g.trials == 0) throw UsageError("privacy game needs at least one trial");
    make_protocol(g.protocol); // validates the name
    const auto adv = make_distinguisher(g.adversary, g.protocol, g.kind);
    std::size_t wins = 0;
    for (std::size_t i = 0; i < g.trials; ++i) wins += privacy_detail::play_trial(g, adv, mix_seed(g.seed, i)) ? 1 : 0;
    auto r = summarize(wins, g.trials);
    r.protocol = g.protocol;
    r.game = to_string(g.kind);
    r.adversary = g.adversary;
    return r;
}

inline GameResult run_tag_unlinkability(PrivacyGame g) {
    g.kind = GameKind::TagUnlinkability;
    return run_game(g);
}

inline GameResult run_step_unlinkability(PrivacyGame g) {
    g.kind = GameKind::StepUnlinkability;
    return run_game(g);
}

} // namespace pathauth
