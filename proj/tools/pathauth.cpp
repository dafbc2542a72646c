#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pathauth/matrix.hpp"

using namespace pathauth;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string artifact_stem(const ScenarioResult& r) {
    return r.name.empty() ? fs::path(r.source).stem().string() : r.name;
}

void write_scenario_artifacts(const fs::path& dir, const ScenarioResult& r) {
    write_file(dir / (artifact_stem(r) + ".trace"), r.trace_dump());
    write_file(dir / (artifact_stem(r) + ".report"), r.report());
}

int cmd_run(const std::string& file, const std::string& out) {
    const auto r = run_scenario_file(file);
    std::cout << r.report();
    if (!r.error.empty()) std::cerr << r.error << "\n";
    if (!out.empty()) write_scenario_artifacts(out, r);
    return r.exit_code;
}

int cmd_matrix(const std::string& dir, const std::string& out, unsigned threads) {
    const auto m = run_corpus(dir, threads);
    std::cout << m.table();
    if (!out.empty()) {
        write_file(fs::path(out) / "matrix.txt", m.table());
        write_file(fs::path(out) / "matrix.records", m.record_stream());
        for (const auto& r : m.results) write_scenario_artifacts(fs::path(out) / "scenarios", r);
    }
    return m.exit_code();
}

int cmd_attack(const std::string& name, std::uint64_t seed, const std::string& out) {
    const auto o = run_attack(name, seed);
    const bool confirmed = o.succeeded && reverify(o);
    const std::string text = o.report() + "reverified " + (confirmed ? "true" : "false") + "\n";
    std::cout << text;
    if (!out.empty()) write_file(out, text);
    return confirmed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path authentication protocol simulator"};
    app.require_subcommand(1);

    std::string file, dir, out, name, protocol, game, adversary = "random_guess", model = "AdvT", first = "tag",
                                                      second = "tag";
    std::vector<std::string> compromise;
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "Run one scenario file");
    run->add_option("file", file, "Scenario file")->required();
    run->add_option("--out", out, "Directory for the trace dump and report");

    auto* matrix = app.add_subcommand("matrix", "Run a scenario corpus and print the protocol matrix");
    matrix->add_option("dir", dir, "Corpus directory")->required();
    matrix->add_option("--out", out, "Directory for the table, records and per-scenario artifacts");
    matrix->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    auto* attack = app.add_subcommand("attack", "Run a registered attack with its reference parameters");
    attack->add_option("name", name, "Attack name")->required()->check(CLI::IsMember(attack_names()));
    attack->add_option("--seed", seed, "Seed");
    attack->add_option("--out", out, "File for the attack report");

    auto* privacy = app.add_subcommand("privacy", "Play a privacy game");
    privacy->add_option("protocol", protocol, "Protocol")->required()->check(CLI::IsMember(protocol_names()));
    privacy->add_option("game", game, "tag or step")->required()->check(CLI::IsMember({"tag", "step"}));
    privacy->add_option("--adversary", adversary, "Distinguisher")->check(CLI::IsMember(distinguisher_names()));
    privacy->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    privacy->add_option("--seed", seed, "Seed");
    privacy->add_option("--model", model, "AdvT or AdvR")->check(CLI::IsMember({"AdvT", "AdvR"}));
    privacy->add_option("--compromise", compromise, "Readers handed to the adversary");
    privacy->add_option("--first", first, "View of the first observation")->check(CLI::IsMember({"tag", "ledger", "both"}));
    privacy->add_option("--second", second, "View of the second observation")->check(CLI::IsMember({"tag", "ledger", "both"}));
    privacy->add_option("--out", out, "File for the result record");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(file, out);
        if (*matrix) return cmd_matrix(dir, out, threads);
        if (*attack) return cmd_attack(name, seed, out);
        PrivacyGame g;
        g.kind = parse_game(game);
        g.protocol = protocol;
        g.adversary = adversary;
        g.trials = trials;
        g.seed = seed;
        g.model = parse_model(model);
        for (const auto& r : compromise) g.compromised.push_back(reader(r));
        g.first_view = parse_view(first);
        g.second_view = parse_view(second);
        const auto record = run_game(g).record() + "\n";
        std::cout << record;
        if (!out.empty()) write_file(out, record);
        return 0;
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedGameError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
