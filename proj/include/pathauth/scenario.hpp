#pragma once

// Scenario files: one directive per line, '#' starts a comment.
//
//   name <id>                  protocol <name>            model AdvT|AdvR
//   seed <n>                   network <strategy> [target]
//   option <key>=<value>       capacity <bits>            readers <r>...
//   tag <t> <r>...             (repeat a tag line to declare another valid path)
//
// Actions run in file order:
//   compromise <r>             move <r> <t>               offline <r> <t>
//   claim <t> <verifier>       attack <name>
//   privacy <tag|step> <distinguisher> trials=<n> [first=<view>] [second=<view>] [compromise=<r>,...]
//
// Expectations (exit 0 iff all hold):
//   expect holds|fails <sound|sorted|complete|authorized|sound_sorted|route>
//   expect label <label>       expect claims <n>          expect status <r> <t> <status>
//   expect attack succeeded|failed                        expect advantage <=|>= <x>
//
// Matrix declarations, checked like expectations:
//   evidence <property>        refute <property>          finding <property> attack|weakness|single_path
// with <property> one of sound_sorted, complete, authorized, privacy.

#include <fstream>
#include <sstream>

#include "pathauth/attacks.hpp"
#include "pathauth/privacy.hpp"
#include "pathauth/trace_io.hpp"

namespace pathauth {

/// Largest advantage still counted as "no advantage".
inline constexpr double kPrivacyTolerance = 0.1;

enum class Property { SoundSorted, Complete, Authorized, Privacy };

inline const std::vector<Property>& all_properties() {
    static const std::vector<Property> p{Property::SoundSorted, Property::Complete, Property::Authorized, Property::Privacy};
    return p;
}

inline const char* to_string(Property p) {
    switch (p) {
    case Property::SoundSorted: return "sound_sorted";
    case Property::Complete: return "complete";
    case Property::Authorized: return "authorized";
    case Property::Privacy: return "privacy";
    }
    return "?";
}

inline std::optional<Property> parse_property(const std::string& s) {
    for (auto p : all_properties())
        if (s == to_string(p)) return p;
    return std::nullopt;
}

/// Footnote numbers used in the matrix.
enum class FindingKind { Attack = 1, Weakness = 2, SinglePath = 4 };

inline std::optional<FindingKind> parse_finding_kind(const std::string& s) {
    if (s == "attack") return FindingKind::Attack;
    if (s == "weakness") return FindingKind::Weakness;
    if (s == "single_path") return FindingKind::SinglePath;
    return std::nullopt;
}

inline const char* to_string(FindingKind k) {
    switch (k) {
    case FindingKind::Attack: return "attack";
    case FindingKind::Weakness: return "weakness";
    case FindingKind::SinglePath: return "single_path";
    }
    return "?";
}

struct ScenarioAction {
    enum class Kind { Compromise, Move, Offline, Claim, Attack, Privacy } kind;
    std::size_t line = 0;
    std::string a, b; // reader/tag, tag/verifier, or attack name
    PrivacyGame game; // Privacy only; protocol, model and seed are filled in at run time
};

struct Expectation {
    enum class Kind { Holds, Fails, Label, Claims, Status, Attack, AdvantageAtMost, AdvantageAtLeast } kind;
    std::size_t line = 0;
    std::string text;
    std::string subject;
    Identifier reader_id, tag_id;
    double threshold = 0;
    std::size_t count = 0;
};

struct Declaration {
    enum class Role { Evidence, Refute, Finding } role;
    std::size_t line = 0;
    Property property = Property::SoundSorted;
    std::optional<FindingKind> kind;
};

inline const char* to_string(Declaration::Role r) {
    switch (r) {
    case Declaration::Role::Evidence: return "evidence";
    case Declaration::Role::Refute: return "refute";
    case Declaration::Role::Finding: return "finding";
    }
    return "?";
}

struct Scenario {
    std::string source;
    std::string name;
    std::string protocol;
    Model model = Model::AdvT;
    std::uint64_t seed = 1;
    StrategySpec strategy;
    ProtocolConfig config;
    std::vector<ScenarioAction> actions;
    std::vector<Expectation> expectations;
    std::vector<Declaration> declarations;
};

namespace scenario_detail {

inline const std::set<std::string>& claim_properties() {
    static const std::set<std::string> p{"sound", "sorted", "complete", "authorized", "sound_sorted", "route"};
    return p;
}

inline std::optional<AttackLabel> parse_label(const std::string& s) {
    for (auto l : {AttackLabel::OutOfOrder, AttackLabel::SkipStep, AttackLabel::Reroute, AttackLabel::GhostStep,
                   AttackLabel::UnauthorizedPath, AttackLabel::None})
        if (s == to_string(l)) return l;
    return std::nullopt;
}

inline std::optional<StepStatus> parse_status(const std::string& s) {
    for (auto st : {StepStatus::Accepted, StepStatus::Rejected, StepStatus::Timeout, StepStatus::Rogue})
        if (s == to_string(st)) return st;
    return std::nullopt;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line, const std::string& what) {
    std::istringstream in(s);
    T v{};
    if (!(in >> v) || !in.eof()) throw ParseError(line, "expected a number for " + what + ", got '" + s + "'");
    return v;
}

inline std::string join(const std::vector<std::string>& words, std::size_t from) {
    std::string out;
    for (std::size_t i = from; i < words.size(); ++i) out += (i > from ? " " : "") + words[i];
    return out;
}

inline PrivacyGame parse_privacy(const std::vector<std::string>& w, std::size_t line) {
    if (w.size() < 3) throw ParseError(line, "privacy needs a game and a distinguisher");
    PrivacyGame g;
    try {
        g.kind = parse_game(w[1]);
    } catch (const UsageError& e) {
        throw ParseError(line, e.what());
    }
    g.adversary = w[2];
    if (std::find(distinguisher_names().begin(), distinguisher_names().end(), g.adversary) == distinguisher_names().end())
        throw ParseError(line, "unknown distinguisher '" + g.adversary + "'");
    bool have_trials = false;
    for (std::size_t i = 3; i < w.size(); ++i) {
        const auto eq = w[i].find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key=value, got '" + w[i] + "'");
        const auto key = w[i].substr(0, eq), value = w[i].substr(eq + 1);
        try {
            if (key == "trials") {
                g.trials = parse_number<std::size_t>(value, line, "trials");
                have_trials = true;
            } else if (key == "first") {
                g.first_view = parse_view(value);
            } else if (key == "second") {
                g.second_view = parse_view(value);
            } else if (key == "compromise") {
                std::istringstream names(value);
                for (std::string r; std::getline(names, r, ',');)
                    if (!r.empty()) g.compromised.push_back(reader(r));
            } else {
                throw ParseError(line, "unknown privacy option '" + key + "'");
            }
        } catch (const UsageError& e) {
            throw ParseError(line, e.what());
        }
    }
    if (!have_trials || g.trials == 0) throw ParseError(line, "privacy needs trials=<n> with n > 0");
    return g;
}

inline Expectation parse_expectation(const std::vector<std::string>& w, std::size_t line) {
    Expectation e;
    e.line = line;
    e.text = join(w, 1);
    auto need = [&](std::size_t n) {
        if (w.size() != n) throw ParseError(line, "malformed expectation '" + e.text + "'");
    };
    if (w.size() < 2) throw ParseError(line, "empty expectation");
    const auto& what = w[1];
    if (what == "holds" || what == "fails") {
        need(3);
        if (!claim_properties().count(w[2])) throw ParseError(line, "unknown claim property '" + w[2] + "'");
        e.kind = what == "holds" ? Expectation::Kind::Holds : Expectation::Kind::Fails;
        e.subject = w[2];
    } else if (what == "label") {
        need(3);
        if (!parse_label(w[2])) throw ParseError(line, "unknown label '" + w[2] + "'");
        e.kind = Expectation::Kind::Label;
        e.subject = w[2];
    } else if (what == "claims") {
        need(3);
        e.kind = Expectation::Kind::Claims;
        e.count = parse_number<std::size_t>(w[2], line, "claims");
    } else if (what == "status") {
        need(5);
        if (!parse_status(w[4])) throw ParseError(line, "unknown step status '" + w[4] + "'");
        e.kind = Expectation::Kind::Status;
        e.reader_id = reader(w[2]);
        e.tag_id = tag(w[3]);
        e.subject = w[4];
    } else if (what == "attack") {
        need(3);
        if (w[2] != "succeeded" && w[2] != "failed") throw ParseError(line, "expect attack succeeded|failed");
        e.kind = Expectation::Kind::Attack;
        e.subject = w[2];
    } else if (what == "advantage") {
        need(4);
        if (w[2] == "<=") e.kind = Expectation::Kind::AdvantageAtMost;
        else if (w[2] == ">=") e.kind = Expectation::Kind::AdvantageAtLeast;
        else throw ParseError(line, "expect advantage <=|>= <x>");
        e.threshold = parse_number<double>(w[3], line, "advantage");
    } else {
        throw ParseError(line, "unknown expectation '" + what + "'");
    }
    return e;
}

} // namespace scenario_detail

/// Parses a scenario; throws ParseError with the offending line number.
inline Scenario parse_scenario(std::istream& in, const std::string& source = "<input>") {
    using namespace scenario_detail;
    Scenario s;
    s.source = source;
    std::set<Identifier> declared_tags;
    std::map<Identifier, std::size_t> tag_slot;
    bool have_protocol = false, have_model = false, have_attack = false, have_privacy = false, have_run = false;
    std::size_t line_no = 0;

    auto require_tag = [&](const std::string& t, std::size_t line) {
        if (!declared_tags.count(tag(t))) throw ParseError(line, "tag '" + t + "' is not declared");
    };

    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        if (auto hash_pos = raw.find('#'); hash_pos != std::string::npos) raw.erase(hash_pos);
        const auto w = detail::split_ws(raw);
        if (w.empty()) continue;
        const auto& d = w[0];
        try {
            for (const auto& tok : w) detail::check_token(tok);
        } catch (const UsageError& e) {
            throw ParseError(line_no, e.what());
        }
        auto arity = [&](std::size_t n) {
            if (w.size() != n) throw ParseError(line_no, "'" + d + "' takes " + std::to_string(n - 1) + " argument(s)");
        };

        if (d == "name") {
            arity(2);
            s.name = w[1];
        } else if (d == "protocol") {
            arity(2);
            const auto& names = protocol_names();
            if (std::find(names.begin(), names.end(), w[1]) == names.end())
                throw ParseError(line_no, "unknown protocol '" + w[1] + "'");
            s.protocol = w[1];
            have_protocol = true;
        } else if (d == "model") {
            arity(2);
            try {
                s.model = parse_model(w[1]);
            } catch (const UsageError& e) {
                throw ParseError(line_no, e.what());
            }
            have_model = true;
        } else if (d == "seed") {
            arity(2);
            s.seed = parse_number<std::uint64_t>(w[1], line_no, "seed");
        } else if (d == "network") {
            if (w.size() != 2 && w.size() != 3) throw ParseError(line_no, "'network' takes a strategy and an optional target");
            s.strategy.name = w[1];
            if (w.size() == 3) s.strategy.target = w[2];
            try {
                make_strategy(s.strategy);
            } catch (const UsageError& e) {
                throw ParseError(line_no, e.what());
            }
        } else if (d == "option") {
            arity(2);
            const auto eq = w[1].find('=');
            if (eq == std::string::npos || eq == 0) throw ParseError(line_no, "option needs key=value");
            s.config.options[w[1].substr(0, eq)] = w[1].substr(eq + 1);
        } else if (d == "capacity") {
            arity(2);
            s.config.capacity_bits = parse_number<std::size_t>(w[1], line_no, "capacity");
        } else if (d == "readers") {
            if (w.size() < 2) throw ParseError(line_no, "'readers' needs at least one reader");
            for (std::size_t i = 1; i < w.size(); ++i) s.config.readers.push_back(reader(w[i]));
        } else if (d == "tag") {
            if (w.size() < 3) throw ParseError(line_no, "'tag' needs an identifier and a path");
            ReaderSeq path;
            for (std::size_t i = 2; i < w.size(); ++i) path.push_back(reader(w[i]));
            const auto t = tag(w[1]);
            if (auto it = tag_slot.find(t); it != tag_slot.end()) {
                s.config.tags[it->second].valid_paths.push_back(path);
            } else {
                tag_slot[t] = s.config.tags.size();
                s.config.tags.push_back({t, {path}});
                declared_tags.insert(t);
            }
        } else if (d == "compromise") {
            arity(2);
            s.actions.push_back({ScenarioAction::Kind::Compromise, line_no, w[1], "", {}});
        } else if (d == "move" || d == "offline") {
            arity(3);
            require_tag(w[2], line_no);
            s.actions.push_back({d == "move" ? ScenarioAction::Kind::Move : ScenarioAction::Kind::Offline, line_no, w[1], w[2], {}});
            have_run = true;
        } else if (d == "claim") {
            arity(3);
            require_tag(w[1], line_no);
            s.actions.push_back({ScenarioAction::Kind::Claim, line_no, w[1], w[2], {}});
            have_run = true;
        } else if (d == "attack") {
            arity(2);
            if (have_attack) throw ParseError(line_no, "only one attack per scenario");
            AttackInfo info;
            try {
                info = attack_info(w[1]);
            } catch (const UsageError& e) {
                throw ParseError(line_no, e.what());
            }
            if (have_protocol && info.protocol != s.protocol)
                throw ParseError(line_no, "attack " + w[1] + " targets " + info.protocol + ", not " + s.protocol);
            s.actions.push_back({ScenarioAction::Kind::Attack, line_no, w[1], "", {}});
            have_attack = true;
        } else if (d == "privacy") {
            if (have_privacy) throw ParseError(line_no, "only one privacy game per scenario");
            s.actions.push_back({ScenarioAction::Kind::Privacy, line_no, "", "", parse_privacy(w, line_no)});
            have_privacy = true;
        } else if (d == "expect") {
            s.expectations.push_back(parse_expectation(w, line_no));
        } else if (d == "evidence" || d == "refute" || d == "finding") {
            Declaration decl;
            decl.line = line_no;
            decl.role = d == "evidence" ? Declaration::Role::Evidence
                        : d == "refute" ? Declaration::Role::Refute
                                        : Declaration::Role::Finding;
            if (decl.role == Declaration::Role::Finding) {
                arity(3);
                decl.kind = parse_finding_kind(w[2]);
                if (!decl.kind) throw ParseError(line_no, "finding kind must be attack, weakness or single_path");
            } else {
                arity(2);
            }
            auto p = parse_property(w[1]);
            if (!p) throw ParseError(line_no, "unknown matrix property '" + w[1] + "'");
            decl.property = *p;
            s.declarations.push_back(decl);
        } else {
            throw ParseError(line_no, "unknown directive '" + d + "'");
        }
    }

    const std::size_t end = line_no + 1;
    if (!have_protocol) throw ParseError(end, "missing 'protocol'");
    if (!have_model) throw ParseError(end, "missing 'model'");
    if (s.name.empty()) throw ParseError(end, "missing 'name'");
    if (have_attack && have_run) throw ParseError(end, "an attack scenario cannot also list moves or claims");
    for (const auto& a : s.actions)
        if (a.kind == ScenarioAction::Kind::Attack && attack_info(a.a).protocol != s.protocol)
            throw ParseError(a.line, "attack " + a.a + " does not target " + s.protocol);
    return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return parse_scenario(in, path);
}

// ------------------------------------------------------------------ running

struct ClaimReport {
    std::size_t index = 0;
    PathClaim claim;
    Verdict verdict;
    bool route_authorized = true; // the tag's route among path participants is a prefix of one of its valid paths
    std::set<AttackLabel> labels;
};

struct DeclarationOutcome {
    Declaration declaration;
    bool demonstrated = false;
};

struct ScenarioResult {
    std::string source, name, protocol;
    Model model = Model::AdvT;
    std::uint64_t seed = 0;
    Architecture architecture = Architecture::Offline;
    int exit_code = 0;
    std::string error;
    Trace trace;
    std::vector<StepRecord> steps;
    std::vector<ClaimReport> claims;
    std::optional<AttackOutcome> attack;
    bool attack_reverified = false;
    std::optional<GameResult> privacy;
    std::vector<std::pair<Expectation, bool>> expectations;
    std::vector<DeclarationOutcome> declarations;

    /// One key=value record per line.
    std::string report() const;
    std::string trace_dump() const { return dump_trace(trace); }
};

namespace scenario_detail {

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline std::string join_readers(const ReaderSeq& rs) {
    std::string out;
    for (const auto& r : rs) out += (out.empty() ? "" : ",") + r.value;
    return out.empty() ? "-" : out;
}

inline const char* flag(bool b) { return b ? "true" : "false"; }

inline std::vector<ClaimReport> report_claims(const Trace& trace) {
    std::vector<ClaimReport> out;
    for (auto idx : trace.claim_indices()) {
        ClaimReport c;
        c.index = idx;
        c.claim = std::get<PathClaim>(trace[idx].body);
        c.verdict = evaluate_claim(trace, idx);
        std::vector<ReaderSeq> valid;
        std::set<Identifier> participants;
        for (std::size_t j = 0; j < idx; ++j)
            if (const auto* vp = std::get_if<ValidPath>(&trace[j].body)) {
                participants.insert(vp->readers.begin(), vp->readers.end());
                if (vp->tag == c.claim.tag) valid.push_back(vp->readers);
            }
        const auto physical = physical_path(trace, c.claim.tag, idx);
        ReaderSeq route;
        for (const auto& r : physical.readers)
            if (participants.count(r) && (route.empty() || route.back() != r)) route.push_back(r);
        c.route_authorized = std::any_of(valid.begin(), valid.end(),
                                         [&](const ReaderSeq& v) { return seq::is_prefix(route, v); });
        c.labels = classify(physical, c.claim.readers, valid.empty() ? std::nullopt : std::optional(valid));
        out.push_back(std::move(c));
    }
    return out;
}

inline bool claim_has(const ClaimReport& c, const std::string& property) {
    const auto& v = c.verdict;
    if (property == "sound") return v.sound;
    if (property == "sorted") return v.sorted;
    if (property == "complete") return v.complete;
    if (property == "authorized") return v.authorized;
    if (property == "sound_sorted") return v.sound && v.sorted;
    if (property == "route") return c.route_authorized;
    return false;
}

inline bool all_hold(const ScenarioResult& r, const std::string& property) {
    return !r.claims.empty() &&
           std::all_of(r.claims.begin(), r.claims.end(), [&](const ClaimReport& c) { return claim_has(c, property); });
}

inline bool some_fail(const ScenarioResult& r, const std::string& property) {
    return std::any_of(r.claims.begin(), r.claims.end(), [&](const ClaimReport& c) { return !claim_has(c, property); });
}

inline bool attack_broke(const ScenarioResult& r, std::initializer_list<const char*> properties) {
    if (!r.attack || !r.attack_reverified) return false;
    for (const char* p : properties)
        if (r.attack->violated_property == p) return true;
    return false;
}

inline bool check(const ScenarioResult& r, const Expectation& e) {
    switch (e.kind) {
    case Expectation::Kind::Holds: return all_hold(r, e.subject);
    case Expectation::Kind::Fails: return some_fail(r, e.subject);
    case Expectation::Kind::Label: {
        const auto l = *parse_label(e.subject);
        return std::any_of(r.claims.begin(), r.claims.end(), [&](const ClaimReport& c) { return c.labels.count(l) > 0; });
    }
    case Expectation::Kind::Claims: return r.claims.size() == e.count;
    case Expectation::Kind::Status:
        for (auto it = r.steps.rbegin(); it != r.steps.rend(); ++it)
            if (it->reader == e.reader_id && it->tag == e.tag_id) return e.subject == to_string(it->status);
        return false;
    case Expectation::Kind::Attack:
        if (!r.attack) return false;
        return e.subject == "succeeded" ? r.attack->succeeded && r.attack_reverified : !r.attack->succeeded;
    case Expectation::Kind::AdvantageAtMost: return r.privacy && r.privacy->advantage <= e.threshold;
    case Expectation::Kind::AdvantageAtLeast: return r.privacy && r.privacy->advantage >= e.threshold;
    }
    return false;
}

/// Whether the run shows `p` failing under the scenario's model.
inline bool violated(const ScenarioResult& r, Property p) {
    switch (p) {
    case Property::SoundSorted: return some_fail(r, "sound_sorted") || attack_broke(r, {"sound", "sorted"});
    case Property::Complete: return some_fail(r, "complete") || attack_broke(r, {"complete"});
    case Property::Authorized:
        return some_fail(r, "authorized") || some_fail(r, "route") || attack_broke(r, {"authorized"});
    case Property::Privacy:
        return (r.privacy && r.privacy->ci.low > kPrivacyTolerance) || attack_broke(r, {"privacy"});
    }
    return false;
}

inline bool supported(const ScenarioResult& r, Property p) {
    switch (p) {
    case Property::SoundSorted: return all_hold(r, "sound_sorted");
    case Property::Complete: return all_hold(r, "complete");
    case Property::Authorized: return all_hold(r, "authorized");
    case Property::Privacy: return r.privacy && r.privacy->advantage <= kPrivacyTolerance;
    }
    return false;
}

inline bool demonstrated(const ScenarioResult& r, const Declaration& d) {
    return d.role == Declaration::Role::Evidence ? supported(r, d.property) : violated(r, d.property);
}

} // namespace scenario_detail

inline std::string ScenarioResult::report() const {
    using namespace scenario_detail;
    std::ostringstream out;
    out << "scenario name=" << name << " protocol=" << protocol << " model=" << to_string(model) << " seed=" << seed
        << " architecture=" << to_string(architecture) << " source=" << quoted(source) << "\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        out << "step index=" << i << " reader=" << s.reader.value << " tag=" << s.tag.value
            << " status=" << to_string(s.status) << " offline=" << flag(s.offline) << " detail=" << quoted(s.detail)
            << "\n";
    }
    for (const auto& c : claims) {
        out << "claim index=" << c.index << " tag=" << c.claim.tag.value << " claimant=" << c.claim.claimant.value
            << " readers=" << join_readers(c.claim.readers) << " sound=" << flag(c.verdict.sound)
            << " sorted=" << flag(c.verdict.sorted) << " complete=" << flag(c.verdict.complete)
            << " authorized=" << flag(c.verdict.authorized) << " route=" << flag(c.route_authorized) << " labels=";
        std::string labels;
        for (auto l : c.labels) labels += (labels.empty() ? "" : ",") + std::string(to_string(l));
        out << (labels.empty() ? "-" : labels) << "\n";
    }
    if (attack)
        out << "attack name=" << attack->name << " succeeded=" << flag(attack->succeeded)
            << " reverified=" << flag(attack_reverified)
            << " violated=" << (attack->violated_property.empty() ? "-" : attack->violated_property) << "\n";
    if (privacy) {
        char buf[160];
        std::snprintf(buf, sizeof buf, " trials=%zu wins=%zu advantage=%.4f ci_low=%.4f ci_high=%.4f", privacy->trials,
                      privacy->wins, privacy->advantage, privacy->ci.low, privacy->ci.high);
        out << "privacy game=" << privacy->game << " adversary=" << privacy->adversary << buf << "\n";
    }
    for (const auto& [e, ok] : expectations)
        out << "expect line=" << e.line << " result=" << (ok ? "pass" : "fail") << " text=" << quoted(e.text) << "\n";
    for (const auto& d : declarations)
        out << "declare line=" << d.declaration.line << " role=" << to_string(d.declaration.role)
            << " property=" << to_string(d.declaration.property) << " model=" << to_string(model)
            << " kind=" << (d.declaration.kind ? to_string(*d.declaration.kind) : "-")
            << " demonstrated=" << flag(d.demonstrated) << "\n";
    if (!error.empty()) out << "error message=" << quoted(error) << "\n";
    out << "result exit=" << exit_code << "\n";
    return out.str();
}

/// Executes a parsed scenario. Exit codes: 0 all expectations hold, 1 some
/// expectation fails or the run aborted, 3 a step needed a capability the
/// adversary model does not grant.
inline ScenarioResult run_scenario(const Scenario& s) {
    using namespace scenario_detail;
    ScenarioResult r;
    r.source = s.source;
    r.name = s.name;
    r.protocol = s.protocol;
    r.model = s.model;
    r.seed = s.seed;

    auto model = make_protocol(s.protocol);
    r.architecture = model->architecture();
    Environment env(s.seed, s.model, s.strategy);
    auto verifier = [&](const std::string& name) {
        return model->verifier_policy() == VerifierPolicy::Backend ? backend(name) : reader(name);
    };

    std::size_t line = 0;
    auto where = [&line] { return line == 0 ? std::string("setup: ") : "line " + std::to_string(line) + ": "; };
    try {
        model->setup(env, s.config);
        for (const auto& a : s.actions) {
            line = a.line;
            switch (a.kind) {
            case ScenarioAction::Kind::Compromise: model->compromise(env, reader(a.a)); break;
            case ScenarioAction::Kind::Move: model->on_arrival(env, reader(a.a), tag(a.b)); break;
            case ScenarioAction::Kind::Offline: model->adversary_step(env, reader(a.a), tag(a.b)); break;
            case ScenarioAction::Kind::Claim: model->claim(env, tag(a.a), verifier(a.b)); break;
            case ScenarioAction::Kind::Attack:
                r.attack = run_attack(a.a, s.seed, s.model);
                r.attack_reverified = r.attack->succeeded && reverify(*r.attack);
                break;
            case ScenarioAction::Kind::Privacy: {
                auto g = a.game;
                g.protocol = s.protocol;
                g.model = s.model;
                g.seed = s.seed;
                r.privacy = run_game(g);
                break;
            }
            }
        }
    } catch (const CapabilityError& e) {
        r.exit_code = 3;
        r.error = where() + e.what();
    } catch (const VerifierPolicyError& e) {
        r.exit_code = 3;
        r.error = where() + e.what();
    } catch (const UnsupportedGameError& e) {
        r.exit_code = 2;
        r.error = where() + e.what();
    } catch (const UsageError& e) {
        r.exit_code = 2;
        r.error = where() + e.what();
    } catch (const std::runtime_error& e) {
        r.exit_code = 1;
        r.error = where() + "run aborted: " + e.what();
    }

    r.trace = r.attack ? r.attack->trace : env.trace;
    r.steps = env.steps;
    r.claims = report_claims(r.trace);
    if (r.exit_code != 0) return r;

    bool ok = true;
    for (const auto& e : s.expectations) {
        const bool pass = check(r, e);
        r.expectations.emplace_back(e, pass);
        ok = ok && pass;
    }
    for (const auto& d : s.declarations) {
        const bool shown = demonstrated(r, d);
        r.declarations.push_back({d, shown});
        ok = ok && shown;
    }
    r.exit_code = ok ? 0 : 1;
    return r;
}

/// Parses and runs a file; parse errors yield exit code 2 with the diagnostic in `error`.
inline ScenarioResult run_scenario_file(const std::string& path) {
    try {
        return run_scenario(parse_scenario_file(path));
    } catch (const ParseError& e) {
        ScenarioResult r;
        r.source = path;
        r.exit_code = 2;
        r.error = path + ": " + e.what();
        return r;
    }
}

} // namespace pathauth
