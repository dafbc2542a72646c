#pragma once

// Derives the protocol/property matrix from scenario runs.
//
// A property holds under a model when some demonstrated `evidence` comes from
// a scenario at that model or a stronger one, and no demonstrated `refute`
// comes from that model or a weaker one. The cell is the strongest model that
// holds, or X. Demonstrated `finding`s add footnotes without changing cells.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <thread>

#include "pathauth/scenario.hpp"

namespace pathauth {

enum class Cell { X, AdvT, AdvR };

inline const char* to_string(Cell c) { return c == Cell::AdvR ? "AdvR" : c == Cell::AdvT ? "AdvT" : "X"; }

struct MatrixRow {
    std::string protocol;
    Architecture architecture = Architecture::Offline;
    std::map<Property, Cell> cells;
    std::map<Property, std::set<int>> footnotes;

    /// Cell text with footnotes, e.g. "AdvT^1,2".
    std::string cell_text(Property p) const {
        std::string out = to_string(cells.at(p));
        const auto& notes = footnotes.at(p);
        for (auto it = notes.begin(); it != notes.end(); ++it) out += (it == notes.begin() ? "^" : ",") + std::to_string(*it);
        return out;
    }
};

struct MatrixReport {
    std::vector<ScenarioResult> results; // in file-name order
    std::vector<MatrixRow> rows;         // in protocol registry order
    std::vector<std::string> records;    // one per protocol x property x model
    std::vector<std::string> warnings;

    int exit_code() const { return warnings.empty() ? 0 : 1; }
    std::string table() const;
    std::string record_stream() const;
    const MatrixRow& row(const std::string& protocol) const {
        for (const auto& r : rows)
            if (r.protocol == protocol) return r;
        throw UsageError("no matrix row for " + protocol);
    }
};

inline MatrixReport build_matrix(std::vector<ScenarioResult> results) {
    MatrixReport m;
    m.results = std::move(results);

    for (const auto& r : m.results)
        if (r.exit_code != 0)
            m.warnings.push_back("scenario " + (r.name.empty() ? r.source : r.name) + " exited " +
                                 std::to_string(r.exit_code) + (r.error.empty() ? "" : ": " + r.error));

    for (const auto& protocol : protocol_names()) {
        MatrixRow row;
        row.protocol = protocol;
        row.architecture = make_protocol(protocol)->architecture();
        std::set<Model> seen;
        for (const auto& r : m.results)
            if (r.protocol == protocol) seen.insert(r.model);
        for (auto model : {Model::AdvT, Model::AdvR})
            if (!seen.count(model))
                m.warnings.push_back(std::string("incomplete matrix: no ") + to_string(model) + " scenario for " + protocol);

        for (auto p : all_properties()) {
            std::map<Model, std::size_t> evidence, refuted;
            std::set<int> notes;
            for (const auto& r : m.results) {
                if (r.protocol != protocol) continue;
                for (const auto& d : r.declarations) {
                    if (d.declaration.property != p || !d.demonstrated) continue;
                    switch (d.declaration.role) {
                    case Declaration::Role::Evidence: ++evidence[r.model]; break;
                    case Declaration::Role::Refute: ++refuted[r.model]; break;
                    case Declaration::Role::Finding: notes.insert(static_cast<int>(*d.declaration.kind)); break;
                    }
                }
            }
            // Evidence against AdvR also covers AdvT; a refutation under AdvT also rules out AdvR.
            const bool holds_r = evidence[Model::AdvR] > 0 && refuted[Model::AdvR] == 0 && refuted[Model::AdvT] == 0;
            const bool holds_t = evidence[Model::AdvT] + evidence[Model::AdvR] > 0 && refuted[Model::AdvT] == 0;
            row.cells[p] = holds_r ? Cell::AdvR : holds_t ? Cell::AdvT : Cell::X;
            row.footnotes[p] = notes;
            for (auto model : {Model::AdvT, Model::AdvR}) {
                const bool holds = model == Model::AdvR ? holds_r : holds_t;
                m.records.push_back("cell protocol=" + protocol + " property=" + to_string(p) + " model=" +
                                    to_string(model) + " evidence=" + std::to_string(evidence[model]) +
                                    " refuted=" + std::to_string(refuted[model]) + " holds=" + (holds ? "true" : "false"));
            }
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

inline std::string MatrixReport::table() const {
    const std::vector<std::string> head{"Protocol", "Architecture", "Sound+Sorted", "Complete", "Authorized", "Privacy"};
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows) {
        std::vector<std::string> line{r.protocol, to_string(r.architecture)};
        for (auto p : all_properties()) line.push_back(r.cell_text(p));
        body.push_back(std::move(line));
    }
    std::vector<std::size_t> width(head.size());
    for (std::size_t i = 0; i < head.size(); ++i) {
        width[i] = head[i].size();
        for (const auto& line : body) width[i] = std::max(width[i], line[i].size());
    }
    std::ostringstream out;
    auto put = [&](const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out << cols[i];
            if (i + 1 < cols.size()) out << std::string(width[i] - cols[i].size() + 2, ' ');
        }
        out << "\n";
    };
    put(head);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out << std::string(total - 2, '-') << "\n";
    for (const auto& line : body) put(line);
    out << "\n^1 attack found  ^2 weakness found  ^4 holds only with a single valid path\n";
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

inline std::string MatrixReport::record_stream() const {
    std::ostringstream out;
    for (const auto& r : results)
        out << "run scenario=" << (r.name.empty() ? "-" : r.name) << " protocol=" << (r.protocol.empty() ? "-" : r.protocol)
            << " model=" << to_string(r.model) << " exit=" << r.exit_code << "\n";
    for (const auto& rec : records) out << rec << "\n";
    for (const auto& r : rows) {
        out << "row protocol=" << r.protocol << " architecture=" << to_string(r.architecture);
        for (auto p : all_properties()) out << ' ' << to_string(p) << '=' << r.cell_text(p);
        out << "\n";
    }
    for (const auto& w : warnings) out << "warning message=\"" << w << "\"\n";
    return out.str();
}

/// Scenario files (*.scn) in `dir`, sorted by name.
inline std::vector<std::string> corpus_files(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw UsageError("corpus directory " + dir + " does not exist");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".scn") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

/// Runs every file on a worker pool; results keep the input order.
inline std::vector<ScenarioResult> run_scenarios(const std::vector<std::string>& files, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1)));
    std::vector<ScenarioResult> results(files.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < files.size(); k = next++) results[k] = run_scenario_file(files[k]);
        });
    for (auto& t : pool) t.join();
    return results;
}

inline MatrixReport run_corpus(const std::string& dir, unsigned threads = 0) {
    auto report = build_matrix(run_scenarios(corpus_files(dir), threads));
    if (report.results.empty()) report.warnings.push_back("incomplete matrix: corpus " + dir + " has no scenarios");
    return report;
}

} // namespace pathauth
