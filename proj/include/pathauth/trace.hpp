#pragma once

// Trace semantics: events, physical paths, path-based property checkers and
// the attack classifier.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pathauth/errors.hpp"

namespace pathauth {

enum class IdKind { Reader, Tag, Participant, Backend };

struct Identifier {
    IdKind kind = IdKind::Reader;
    std::string value;

    friend bool operator==(const Identifier&, const Identifier&) = default;
    friend auto operator<=>(const Identifier&, const Identifier&) = default;
};

inline Identifier reader(std::string v) { return {IdKind::Reader, std::move(v)}; }
inline Identifier tag(std::string v) { return {IdKind::Tag, std::move(v)}; }
inline Identifier backend(std::string v) { return {IdKind::Backend, std::move(v)}; }
inline Identifier participant(std::string v) { return {IdKind::Participant, std::move(v)}; }

using ReaderSeq = std::vector<Identifier>;

inline ReaderSeq readers(std::initializer_list<const char*> names) {
    ReaderSeq out;
    for (const char* n : names) out.push_back(reader(n));
    return out;
}

struct Move {
    Identifier tag;
    Identifier reader;
    friend bool operator==(const Move&, const Move&) = default;
};

struct ValidPath {
    Identifier tag;
    ReaderSeq readers;
    friend bool operator==(const ValidPath&, const ValidPath&) = default;
};

struct PathClaim {
    Identifier tag;
    ReaderSeq readers;
    Identifier claimant;
    friend bool operator==(const PathClaim&, const PathClaim&) = default;
};

using EventBody = std::variant<Move, ValidPath, PathClaim>;

struct Event {
    std::size_t index = 0;
    EventBody body;

    const Identifier& subject() const {
        return std::visit([](const auto& e) -> const Identifier& { return e.tag; }, body);
    }
    friend bool operator==(const Event&, const Event&) = default;
};

/// Append-only event sequence; indices are dense from zero.
class Trace {
public:
    std::size_t append(EventBody body) {
        const std::size_t idx = events_.size();
        events_.push_back(Event{idx, std::move(body)});
        return idx;
    }
    std::size_t move(const Identifier& t, const Identifier& r) { return append(Move{t, r}); }
    std::size_t valid_path(const Identifier& t, ReaderSeq rs) { return append(ValidPath{t, std::move(rs)}); }
    std::size_t claim(const Identifier& t, ReaderSeq rs, const Identifier& by) {
        return append(PathClaim{t, std::move(rs), by});
    }

    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const Event& operator[](std::size_t i) const { return events_.at(i); }

    /// Indices of every PathClaim, in order.
    std::vector<std::size_t> claim_indices() const {
        std::vector<std::size_t> out;
        for (const auto& e : events_)
            if (std::holds_alternative<PathClaim>(e.body)) out.push_back(e.index);
        return out;
    }

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    std::vector<Event> events_;
};

/// Reader sequence of a tag with consecutive repeats collapsed (cycles kept, loops dropped).
struct PhysicalPath {
    ReaderSeq readers;
    friend bool operator==(const PhysicalPath&, const PhysicalPath&) = default;
};

/// Physical path of `t` over the first `limit` events of `trace`.
inline PhysicalPath physical_path(const Trace& trace, const Identifier& t, std::size_t limit) {
    PhysicalPath out;
    limit = std::min(limit, trace.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const auto* mv = std::get_if<Move>(&trace[i].body);
        if (!mv || mv->tag != t) continue;
        if (out.readers.empty() || out.readers.back() != mv->reader) out.readers.push_back(mv->reader);
    }
    return out;
}

inline PhysicalPath physical_path(const Trace& trace, const Identifier& t) {
    return physical_path(trace, t, trace.size());
}

/// Outcome of one property check. `witness` explains a failure.
struct Check {
    bool holds = true;
    std::optional<std::string> witness;
    explicit operator bool() const noexcept { return holds; }
};

// Pure sequence-level predicates shared by the trace checkers and the classifier.
namespace seq {

inline std::set<Identifier> as_set(const ReaderSeq& s) { return {s.begin(), s.end()}; }

inline Check subset(const ReaderSeq& claimed, const ReaderSeq& physical) {
    const auto visited = as_set(physical);
    for (const auto& r : claimed)
        if (!visited.count(r)) return {false, "claimed but never visited: " + r.value};
    return {};
}

inline Check same_set(const ReaderSeq& claimed, const ReaderSeq& physical) {
    if (auto s = subset(claimed, physical); !s) return s;
    const auto claimed_set = as_set(claimed);
    for (const auto& r : physical)
        if (!claimed_set.count(r)) return {false, "visited but not claimed: " + r.value};
    return {};
}

inline Check subsequence(const ReaderSeq& claimed, const ReaderSeq& physical) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < claimed.size(); ++i) {
        while (j < physical.size() && physical[j] != claimed[i]) ++j;
        if (j == physical.size())
            return {false, "cannot match in order: " + claimed[i].value + " (claim position " +
                               std::to_string(i) + ")"};
        ++j;
    }
    return {};
}

inline bool is_prefix(const ReaderSeq& prefix, const ReaderSeq& full) {
    return prefix.size() <= full.size() && std::equal(prefix.begin(), prefix.end(), full.begin());
}

} // namespace seq

namespace detail {

inline const PathClaim& claim_at(const Trace& trace, std::size_t claim_index) {
    if (claim_index >= trace.size())
        throw UsageError("claim index " + std::to_string(claim_index) + " out of range");
    const auto* c = std::get_if<PathClaim>(&trace[claim_index].body);
    if (!c) throw UsageError("event " + std::to_string(claim_index) + " is not a PathClaim");
    return *c;
}

inline ReaderSeq prior_path(const Trace& trace, std::size_t claim_index) {
    return physical_path(trace, claim_at(trace, claim_index).tag, claim_index).readers;
}

} // namespace detail

/// Claimed readers form a subset (or equal set) of the readers visited before the claim.
inline Check check_sound(const Trace& trace, std::size_t claim_index) {
    const auto& c = detail::claim_at(trace, claim_index);
    return seq::subset(c.readers, detail::prior_path(trace, claim_index));
}

inline Check check_complete(const Trace& trace, std::size_t claim_index) {
    const auto& c = detail::claim_at(trace, claim_index);
    return seq::same_set(c.readers, detail::prior_path(trace, claim_index));
}

inline Check check_sorted(const Trace& trace, std::size_t claim_index) {
    const auto& c = detail::claim_at(trace, claim_index);
    return seq::subsequence(c.readers, detail::prior_path(trace, claim_index));
}

/// Some strictly earlier ValidPath for the same tag has the claim as a prefix.
inline Check check_authorized(const Trace& trace, std::size_t claim_index) {
    const auto& c = detail::claim_at(trace, claim_index);
    std::string examined;
    for (std::size_t j = 0; j < claim_index; ++j) {
        const auto* vp = std::get_if<ValidPath>(&trace[j].body);
        if (!vp || vp->tag != c.tag) continue;
        if (seq::is_prefix(c.readers, vp->readers)) return {};
        examined += (examined.empty() ? "" : ",") + std::to_string(j);
    }
    if (examined.empty()) return {false, "no prior ValidPath for " + c.tag.value};
    return {false, "no examined ValidPath has the claim as prefix: events [" + examined + "]"};
}

struct Verdict {
    std::size_t claim_index = 0;
    bool sound = true;
    bool complete = true;
    bool sorted = true;
    bool authorized = true;
    std::optional<std::string> witness;
};

inline Verdict evaluate_claim(const Trace& trace, std::size_t claim_index) {
    Verdict v;
    v.claim_index = claim_index;
    const Check checks[] = {check_sound(trace, claim_index), check_complete(trace, claim_index),
                            check_sorted(trace, claim_index), check_authorized(trace, claim_index)};
    v.sound = checks[0].holds;
    v.complete = checks[1].holds;
    v.sorted = checks[2].holds;
    v.authorized = checks[3].holds;
    for (const auto& c : checks)
        if (!c.holds) {
            v.witness = c.witness;
            break;
        }
    return v;
}

inline std::vector<Verdict> evaluate_trace(const Trace& trace) {
    std::vector<Verdict> out;
    for (auto idx : trace.claim_indices()) out.push_back(evaluate_claim(trace, idx));
    return out;
}

/// System-level verdict: a property holds iff it holds for every claim of every trace.
struct SystemVerdict {
    struct Counterexample {
        std::size_t trace = 0;
        std::size_t claim_index = 0;
        std::optional<std::string> witness;
    };
    bool sound = true, complete = true, sorted = true, authorized = true;
    std::optional<Counterexample> sound_cex, complete_cex, sorted_cex, authorized_cex;
    std::size_t claims = 0;
};

inline SystemVerdict evaluate_system(const std::vector<Trace>& traces) {
    SystemVerdict out;
    auto note = [](bool& flag, std::optional<SystemVerdict::Counterexample>& cex, const Check& c,
                   std::size_t t, std::size_t idx) {
        if (c.holds || !flag) return;
        flag = false;
        cex = SystemVerdict::Counterexample{t, idx, c.witness};
    };
    for (std::size_t t = 0; t < traces.size(); ++t) {
        for (auto idx : traces[t].claim_indices()) {
            ++out.claims;
            note(out.sound, out.sound_cex, check_sound(traces[t], idx), t, idx);
            note(out.complete, out.complete_cex, check_complete(traces[t], idx), t, idx);
            note(out.sorted, out.sorted_cex, check_sorted(traces[t], idx), t, idx);
            note(out.authorized, out.authorized_cex, check_authorized(traces[t], idx), t, idx);
        }
    }
    return out;
}

enum class AttackLabel { OutOfOrder, SkipStep, Reroute, GhostStep, UnauthorizedPath, None };

inline const char* to_string(AttackLabel l) {
    switch (l) {
    case AttackLabel::OutOfOrder: return "OutOfOrder";
    case AttackLabel::SkipStep: return "SkipStep";
    case AttackLabel::Reroute: return "Reroute";
    case AttackLabel::GhostStep: return "GhostStep";
    case AttackLabel::UnauthorizedPath: return "UnauthorizedPath";
    case AttackLabel::None: return "None";
    }
    return "?";
}

/// Labels the anomalies of a (physical, claimed, valid-set) triple. An empty
/// result means no anomaly. When `valid_set` is absent authorization is not
/// assessed and omitted readers are attributed to skipping.
inline std::set<AttackLabel> classify(const PhysicalPath& physical, const ReaderSeq& claimed,
                                      const std::optional<std::vector<ReaderSeq>>& valid_set) {
    std::set<AttackLabel> labels;
    const bool sound = seq::subset(claimed, physical.readers).holds;
    if (!sound) labels.insert(AttackLabel::GhostStep);
    if (sound && !seq::subsequence(claimed, physical.readers).holds) labels.insert(AttackLabel::OutOfOrder);

    if (sound) {
        const auto claimed_set = seq::as_set(claimed);
        std::set<Identifier> omitted;
        for (const auto& r : physical.readers)
            if (!claimed_set.count(r)) omitted.insert(r);
        if (!omitted.empty()) {
            bool rerouted = false;
            if (valid_set) {
                for (const auto& r : omitted) {
                    const bool expected = std::any_of(valid_set->begin(), valid_set->end(), [&](const ReaderSeq& v) {
                        return std::find(v.begin(), v.end(), r) != v.end();
                    });
                    if (!expected) rerouted = true;
                }
            }
            labels.insert(rerouted ? AttackLabel::Reroute : AttackLabel::SkipStep);
        }
    }

    if (valid_set && std::none_of(valid_set->begin(), valid_set->end(),
                                  [&](const ReaderSeq& v) { return seq::is_prefix(claimed, v); }))
        labels.insert(AttackLabel::UnauthorizedPath);
    return labels;
}

} // namespace pathauth
