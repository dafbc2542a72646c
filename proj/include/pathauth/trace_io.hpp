#pragma once

// Line-oriented trace dump:
//   MOVE <tag> <reader>
//   VALIDPATH <tag> <r1> <r2> ...
//   CLAIM <tag> <claimant> <r1> ...
// Identifier kinds are implied by position; claimants are read back as readers.

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "pathauth/errors.hpp"
#include "pathauth/trace.hpp"

namespace pathauth {

namespace detail {

inline void check_token(const std::string& tok) {
    if (tok.empty()) throw UsageError("empty identifier");
    for (unsigned char ch : tok)
        if (ch <= 0x20 || ch >= 0x7f) throw UsageError("identifier is not a printable ASCII token: " + tok);
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

} // namespace detail

inline std::string format_event(const Event& e) {
    std::string out;
    auto put = [&out](const Identifier& id) {
        detail::check_token(id.value);
        out += ' ';
        out += id.value;
    };
    if (const auto* m = std::get_if<Move>(&e.body)) {
        out = "MOVE";
        put(m->tag);
        put(m->reader);
    } else if (const auto* v = std::get_if<ValidPath>(&e.body)) {
        out = "VALIDPATH";
        put(v->tag);
        for (const auto& r : v->readers) put(r);
    } else {
        const auto& c = std::get<PathClaim>(e.body);
        out = "CLAIM";
        put(c.tag);
        put(c.claimant);
        for (const auto& r : c.readers) put(r);
    }
    return out;
}

inline std::string dump_trace(const Trace& trace) {
    std::string out;
    for (const auto& e : trace.events()) {
        out += format_event(e);
        out += '\n';
    }
    return out;
}

/// Parses a trace dump. Blank lines and lines starting with '#' are skipped.
inline Trace parse_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        const auto& kw = toks[0];
        auto rs = [&](std::size_t from) {
            ReaderSeq out;
            for (std::size_t i = from; i < toks.size(); ++i) out.push_back(reader(toks[i]));
            return out;
        };
        if (kw == "MOVE") {
            if (toks.size() != 3) throw ParseError(lineno, "MOVE takes <tag> <reader>");
            trace.move(tag(toks[1]), reader(toks[2]));
        } else if (kw == "VALIDPATH") {
            if (toks.size() < 2) throw ParseError(lineno, "VALIDPATH takes <tag> <readers...>");
            trace.valid_path(tag(toks[1]), rs(2));
        } else if (kw == "CLAIM") {
            if (toks.size() < 3) throw ParseError(lineno, "CLAIM takes <tag> <claimant> <readers...>");
            trace.claim(tag(toks[1]), rs(3), reader(toks[2]));
        } else {
            throw ParseError(lineno, "unknown event keyword '" + kw + "'");
        }
    }
    return trace;
}

inline Trace parse_trace(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

} // namespace pathauth
