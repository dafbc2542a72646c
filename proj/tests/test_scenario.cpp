#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pathauth/matrix.hpp"

using namespace pathauth;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "inline");
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

const std::string kHeader = "name s\nprotocol tracker\nmodel AdvT\nreaders r1 r2 r3\ntag t1 r1 r2 r3\n";
const std::string kHonest = kHeader + "move r1 t1\nmove r2 t1\nmove r3 t1\nclaim t1 M\n";

ScenarioResult run(const std::string& text) { return run_scenario(parse(text)); }

ScenarioResult synthetic(const std::string& protocol, Model model,
                         std::vector<std::tuple<Declaration::Role, Property, bool, std::optional<FindingKind>>> decls) {
    ScenarioResult r;
    r.name = protocol + "_" + to_string(model);
    r.protocol = protocol;
    r.model = model;
    for (const auto& [role, prop, shown, kind] : decls) {
        Declaration d;
        d.role = role;
        d.property = prop;
        d.kind = kind;
        r.declarations.push_back({d, shown});
    }
    return r;
}

// Every protocol gets an empty scenario per model so the matrix is complete.
std::vector<ScenarioResult> baseline() {
    std::vector<ScenarioResult> out;
    for (const auto& p : protocol_names())
        for (auto m : {Model::AdvT, Model::AdvR}) out.push_back(synthetic(p, m, {}));
    return out;
}

constexpr auto E = Declaration::Role::Evidence;
constexpr auto R = Declaration::Role::Refute;
constexpr auto F = Declaration::Role::Finding;

} // namespace

// Parsing

TEST(ScenarioParse, ReadsDirectivesAndComments) {
    const auto s = parse("# header\n" + kHonest + "option k=v # trailing\nseed 9\nnetwork drop r2\nexpect holds sound\n"
                         "evidence sound_sorted\nfinding privacy attack\n");
    EXPECT_EQ(s.name, "s");
    EXPECT_EQ(s.protocol, "tracker");
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.strategy.name, "drop");
    EXPECT_EQ(s.strategy.target, "r2");
    EXPECT_EQ(s.config.options.at("k"), "v");
    EXPECT_EQ(s.actions.size(), 4u);
    ASSERT_EQ(s.expectations.size(), 1u);
    EXPECT_EQ(s.expectations[0].line, 14u);
    ASSERT_EQ(s.declarations.size(), 2u);
    EXPECT_EQ(s.declarations[1].kind, FindingKind::Attack);
}

TEST(ScenarioParse, RepeatedTagLinesAddValidPaths) {
    const auto s = parse(kHeader + "tag t1 r1 r3\n");
    ASSERT_EQ(s.config.tags.size(), 1u);
    EXPECT_EQ(s.config.tags[0].valid_paths.size(), 2u);
}

TEST(ScenarioParse, ErrorsCarryTheOffendingLine) {
    EXPECT_EQ(parse_error_line(kHeader + "teleport r1 t1\n"), 6u);
    EXPECT_EQ(parse_error_line("name s\nprotocol supauth\n"), 2u);
    EXPECT_EQ(parse_error_line(kHeader + "move r1 t9\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "seed abc\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "expect holds happiness\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "expect label Teleport\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "evidence speed\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "finding privacy rumour\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "privacy tag random_guess\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "privacy tag mind_reader trials=3\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "network jam\n"), 6u);
    EXPECT_EQ(parse_error_line(kHeader + "attack ray_out_of_order\n"), 6u);
    // Missing directives are reported one past the last line.
    EXPECT_EQ(parse_error_line("name s\nmodel AdvT\n"), 3u);
    EXPECT_EQ(parse_error_line("name s\nprotocol ray\n"), 3u);
    EXPECT_EQ(parse_error_line("protocol ray\nmodel AdvT\n"), 3u);
}

TEST(ScenarioParse, AttackScenariosCannotAlsoMoveTags) {
    EXPECT_THROW(parse("name s\nprotocol ray\nmodel AdvT\nreaders r1\ntag t1 r1\nmove r1 t1\nattack ray_out_of_order\n"),
                 ParseError);
}

// Running

TEST(ScenarioRun, HonestRunMeetsExpectations) {
    const auto r = run(kHonest + "expect claims 1\nexpect holds sound_sorted\nexpect holds route\n"
                                 "expect status r2 t1 accepted\nevidence sound_sorted\n");
    EXPECT_EQ(r.exit_code, 0) << r.report();
    ASSERT_EQ(r.claims.size(), 1u);
    EXPECT_TRUE(r.claims[0].verdict.sound);
    ASSERT_EQ(r.declarations.size(), 1u);
    EXPECT_TRUE(r.declarations[0].demonstrated);
}

TEST(ScenarioRun, MismatchedExpectationExitsOne) {
    const auto r = run(kHonest + "expect fails sound\n");
    EXPECT_EQ(r.exit_code, 1);
    ASSERT_EQ(r.expectations.size(), 1u);
    EXPECT_FALSE(r.expectations[0].second);
}

TEST(ScenarioRun, UndemonstratedDeclarationExitsOne) {
    EXPECT_EQ(run(kHonest + "refute sound_sorted\n").exit_code, 1);
    EXPECT_EQ(run(kHeader + "evidence sound_sorted\n").exit_code, 1); // no claim, no evidence
}

TEST(ScenarioRun, MissingCapabilityExitsThree) {
    EXPECT_EQ(run(kHeader + "compromise r2\n").exit_code, 3);
    EXPECT_EQ(run("name s\nprotocol tracker\nmodel AdvR\nreaders r1 r2\ntag t1 r1 r2\noffline r2 t1\n").exit_code, 3);
    EXPECT_EQ(run(kHonest + "claim t1 r3\n").exit_code, 3); // not the tracker manager
    EXPECT_EQ(run("name s\nprotocol burbridge\nmodel AdvT\nattack burbridge_bypass\n").exit_code, 3);
    const auto r = run(kHeader + "compromise r2\n");
    EXPECT_NE(r.error.find("line 6"), std::string::npos) << r.error;
}

TEST(ScenarioRun, SetupFailureAbortsTheRun) {
    const auto r = run("name s\nprotocol ray\nmodel AdvT\nreaders r1 r2 r3\ntag t1 r1 r2 r3\n");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_EQ(r.error.rfind("setup:", 0), 0u) << r.error;
}

TEST(ScenarioRun, UnreadableFileIsAParseError) {
    const auto r = run_scenario_file("/nonexistent/none.scn");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(r.error.empty());
}

TEST(ScenarioRun, AttackAndPrivacyDirectives) {
    const auto a = run("name s\nprotocol ray\nmodel AdvT\nattack ray_out_of_order\nexpect attack succeeded\n"
                       "expect label OutOfOrder\nfinding sound_sorted attack\n");
    EXPECT_EQ(a.exit_code, 0) << a.report();
    EXPECT_TRUE(a.attack_reverified);
    EXPECT_FALSE(a.trace.empty());

    const auto p = run("name s\nprotocol tracker\nmodel AdvT\nprivacy tag random_guess trials=50\n"
                       "expect advantage <= 1\n");
    EXPECT_EQ(p.exit_code, 0);
    ASSERT_TRUE(p.privacy);
    EXPECT_EQ(p.privacy->trials, 50u);

    EXPECT_EQ(run("name s\nprotocol tracker\nmodel AdvT\nprivacy tag rfchain_linker trials=5\n").exit_code, 2);
}

TEST(ScenarioRun, RouteCheckIgnoresUnregisteredDetours) {
    const auto detour = run(kHeader + "move r1 t1\nmove rx t1\nmove r2 t1\nmove r3 t1\nclaim t1 M\n");
    ASSERT_EQ(detour.claims.size(), 1u);
    EXPECT_TRUE(detour.claims[0].route_authorized);
    EXPECT_FALSE(detour.claims[0].verdict.complete);

    const auto swapped = run(kHeader + "option equal_coefficients=r1,r2\nmove r2 t1\nmove r1 t1\nmove r3 t1\nclaim t1 M\n");
    ASSERT_EQ(swapped.claims.size(), 1u);
    EXPECT_FALSE(swapped.claims[0].route_authorized);
}

TEST(ScenarioRun, ReportIsDeterministicKeyValueLines) {
    const auto text = kHonest + "expect holds sound\n";
    const auto a = run(text).report(), b = run(text).report();
    EXPECT_EQ(a, b);
    std::istringstream in(a);
    for (std::string line; std::getline(in, line);) {
        const auto words = detail::split_ws(line.substr(0, line.find('"')));
        ASSERT_GE(words.size(), 2u) << line;
        for (std::size_t i = 1; i < words.size(); ++i) EXPECT_NE(words[i].find('='), std::string::npos) << line;
    }
    EXPECT_NE(a.find("result exit=0"), std::string::npos);
}

// Matrix derivation

TEST(Matrix, EvidenceAtAdvRCoversAdvT) {
    auto rs = baseline();
    rs.push_back(synthetic("ray", Model::AdvR, {{E, Property::Privacy, true, {}}}));
    const auto m = build_matrix(rs);
    EXPECT_EQ(m.row("ray").cells.at(Property::Privacy), Cell::AdvR);
    EXPECT_EQ(m.exit_code(), 0);
}

TEST(Matrix, RefutationUnderAdvRLeavesAdvT) {
    auto rs = baseline();
    rs.push_back(synthetic("ray", Model::AdvT, {{E, Property::SoundSorted, true, {}}}));
    rs.push_back(synthetic("ray", Model::AdvR, {{R, Property::SoundSorted, true, {}}}));
    EXPECT_EQ(build_matrix(rs).row("ray").cells.at(Property::SoundSorted), Cell::AdvT);
}

TEST(Matrix, RefutationUnderAdvTRulesOutBoth) {
    auto rs = baseline();
    rs.push_back(synthetic("ray", Model::AdvR, {{E, Property::Authorized, true, {}}}));
    rs.push_back(synthetic("ray", Model::AdvT, {{R, Property::Authorized, true, {}}}));
    EXPECT_EQ(build_matrix(rs).row("ray").cells.at(Property::Authorized), Cell::X);
}

TEST(Matrix, UndemonstratedDeclarationsAreIgnored) {
    auto rs = baseline();
    rs.push_back(synthetic("ray", Model::AdvT, {{E, Property::Complete, false, {}}, {F, Property::Complete, false, FindingKind::Attack}}));
    const auto row = build_matrix(rs).row("ray");
    EXPECT_EQ(row.cells.at(Property::Complete), Cell::X);
    EXPECT_TRUE(row.footnotes.at(Property::Complete).empty());
}

TEST(Matrix, FindingsAddFootnotesWithoutChangingCells) {
    auto rs = baseline();
    rs.push_back(synthetic("tracker", Model::AdvT, {{E, Property::SoundSorted, true, {}}}));
    const auto before = build_matrix(rs).row("tracker").cells.at(Property::SoundSorted);
    rs.push_back(synthetic("tracker", Model::AdvT,
                           {{F, Property::SoundSorted, true, FindingKind::SinglePath}, {F, Property::SoundSorted, true, FindingKind::Attack}}));
    const auto row = build_matrix(rs).row("tracker");
    EXPECT_EQ(row.cells.at(Property::SoundSorted), before);
    EXPECT_EQ(row.cell_text(Property::SoundSorted), "AdvT^1,4");
}

TEST(Matrix, IncompleteCorpusWarnsAndFails) {
    auto rs = baseline();
    rs.erase(std::remove_if(rs.begin(), rs.end(), [](const ScenarioResult& r) { return r.protocol == "resc" && r.model == Model::AdvR; }),
             rs.end());
    const auto m = build_matrix(rs);
    EXPECT_EQ(m.exit_code(), 1);
    ASSERT_EQ(m.warnings.size(), 1u);
    EXPECT_NE(m.warnings[0].find("resc"), std::string::npos);
    EXPECT_NE(m.table().find("warning:"), std::string::npos);
}

TEST(Matrix, FailedScenarioWarns) {
    auto rs = baseline();
    rs[0].exit_code = 1;
    EXPECT_EQ(build_matrix(rs).exit_code(), 1);
}

TEST(Matrix, OneRecordPerProtocolPropertyAndModel) {
    const auto m = build_matrix(baseline());
    EXPECT_EQ(m.rows.size(), protocol_names().size());
    EXPECT_EQ(m.records.size(), protocol_names().size() * all_properties().size() * 2);
}

// Adding a demonstrated refutation never raises a cell; adding evidence never lowers one.
TEST(Matrix, CellsAreMonotoneInDeclarations) {
    std::mt19937_64 rng(5);
    const std::vector<Property> props = all_properties();
    for (int round = 0; round < 300; ++round) {
        auto rs = baseline();
        const int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i)
            rs.push_back(synthetic("checker", rng() % 2 ? Model::AdvR : Model::AdvT,
                                   {{rng() % 2 ? E : R, props[rng() % props.size()], rng() % 4 != 0, {}}}));
        const auto base = build_matrix(rs).row("checker");
        const auto model = rng() % 2 ? Model::AdvR : Model::AdvT;
        const auto prop = props[rng() % props.size()];

        auto more_refuted = rs;
        more_refuted.push_back(synthetic("checker", model, {{R, prop, true, {}}}));
        auto more_evidence = rs;
        more_evidence.push_back(synthetic("checker", model, {{E, prop, true, {}}}));
        for (auto p : props) {
            EXPECT_LE(build_matrix(more_refuted).row("checker").cells.at(p), base.cells.at(p));
            EXPECT_GE(build_matrix(more_evidence).row("checker").cells.at(p), base.cells.at(p));
        }
    }
}

// Bundled corpus

TEST(Corpus, EveryScenarioPasses) {
    const auto m = run_corpus(PATHAUTH_CORPUS_DIR);
    for (const auto& r : m.results) EXPECT_EQ(r.exit_code, 0) << r.source << "\n" << r.report();
    EXPECT_TRUE(m.warnings.empty());
}

TEST(Corpus, DroppingTheHonestRunRemovesTheEvidence) {
    const fs::path tmp = fs::temp_directory_path() / "pathauth_corpus_subset";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    for (const auto& f : corpus_files(PATHAUTH_CORPUS_DIR))
        if (fs::path(f).filename() != "tracker_honest.scn") fs::copy_file(f, tmp / fs::path(f).filename());
    const auto a = run_corpus(tmp.string()), b = run_corpus(tmp.string());
    EXPECT_EQ(a.record_stream(), b.record_stream());
    EXPECT_EQ(a.row("tracker").cells.at(Property::SoundSorted), Cell::X);
    EXPECT_EQ(a.row("tracker").cells.at(Property::Privacy), Cell::AdvT);
    fs::remove_all(tmp);
}

TEST(Corpus, MissingDirectoryIsAUsageError) { EXPECT_THROW(run_corpus("/nonexistent/corpus"), UsageError); }
