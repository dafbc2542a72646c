#include <gtest/gtest.h>

#include <algorithm>

#include "pathauth/protocols.hpp"

using namespace pathauth;

namespace {

constexpr std::size_t kRoomy = 1u << 20;

ProtocolConfig single_path(const ReaderSeq& path, std::size_t capacity = kRoomy, const ReaderSeq& extra = {}) {
    ProtocolConfig c;
    c.readers = path;
    c.readers.insert(c.readers.end(), extra.begin(), extra.end());
    c.tags.push_back({tag("t1"), {path}});
    c.capacity_bits = capacity;
    return c;
}

Identifier verifier_for(const std::string& protocol, const ReaderSeq& path) {
    if (protocol == "tracker") return reader("M");
    if (protocol == "ray") return reader("CP");
    if (protocol == "rfchain") return backend("B");
    if (protocol == "resc") return backend("B");
    if (protocol == "burbridge") return backend("SCC");
    return path.back();
}

struct Run {
    std::unique_ptr<Environment> env;
    std::unique_ptr<ProtocolModel> model;
    std::vector<StepStatus> statuses;
    std::optional<std::size_t> claim;
};

Run honest(const std::string& protocol, const ReaderSeq& path, std::uint64_t seed = 7, Model model = Model::AdvT,
           const StrategySpec& strategy = {}) {
    Run run{std::make_unique<Environment>(seed, model, strategy), make_protocol(protocol), {}, {}};
    run.model->setup(*run.env, single_path(path));
    for (const auto& r : path) run.statuses.push_back(run.model->on_arrival(*run.env, r, tag("t1")));
    run.claim = run.model->claim(*run.env, tag("t1"), verifier_for(protocol, path));
    return run;
}

const ReaderSeq kPath3 = readers({"r1", "r2", "r3"});

const PathClaim& claim_at(const Trace& trace, std::size_t idx) { return std::get<PathClaim>(trace[idx].body); }

} // namespace

TEST(ProtocolRegistry, KnowsAllSevenAndRejectsOthers) {
    EXPECT_EQ(protocol_names().size(), 7u);
    for (const auto& n : protocol_names()) EXPECT_EQ(make_protocol(n)->name(), n);
    EXPECT_THROW(make_protocol("supauth"), UsageError);
}

TEST(ProtocolLifecycle, ArrivalAlwaysEmitsMove) {
    for (const auto& n : protocol_names()) {
        auto run = honest(n, kPath3);
        EXPECT_EQ(physical_path(run.env->trace, tag("t1")).readers, kPath3) << n;
        // A reader outside the configuration still leaves a Move.
        run.model->on_arrival(*run.env, reader("rogue"), tag("t1"));
        EXPECT_EQ(physical_path(run.env->trace, tag("t1")).readers.back(), reader("rogue")) << n;
        EXPECT_EQ(run.env->steps.back().status, StepStatus::Rogue) << n;
    }
}

TEST(ProtocolLifecycle, HonestRunsAreSoundAndSorted) {
    for (const auto& n : protocol_names()) {
        auto run = honest(n, kPath3);
        for (auto s : run.statuses) EXPECT_EQ(s, StepStatus::Accepted) << n;
        ASSERT_TRUE(run.claim) << n;
        const auto v = evaluate_claim(run.env->trace, *run.claim);
        EXPECT_TRUE(v.sound) << n;
        EXPECT_TRUE(v.sorted) << n;
        EXPECT_TRUE(v.complete) << n;
        EXPECT_EQ(v.authorized, n != "rfchain") << n;
    }
}

TEST(ProtocolLifecycle, DroppedTrafficTimesOut) {
    for (const auto& n : protocol_names()) {
        auto run = honest(n, kPath3, 7, Model::AdvT, {"drop", std::nullopt});
        EXPECT_EQ(run.statuses.front(), StepStatus::Timeout) << n;
        EXPECT_FALSE(run.claim) << n;
    }
}

TEST(ProtocolLifecycle, SameSeedGivesIdenticalTranscriptAndKnowledge) {
    for (const auto& n : protocol_names()) {
        auto a = honest(n, kPath3, 99);
        auto b = honest(n, kPath3, 99);
        EXPECT_EQ(a.env->network.dump(), b.env->network.dump()) << n;
        EXPECT_EQ(a.env->adversary.knowledge().dump(), b.env->adversary.knowledge().dump()) << n;
        auto c = honest(n, kPath3, 100);
        EXPECT_NE(a.env->network.dump(), c.env->network.dump()) << n;
    }
}

TEST(ProtocolLifecycle, AdversaryStepNeedsControlledReader) {
    auto run = honest("tracker", kPath3, 1, Model::AdvR);
    EXPECT_THROW(run.model->adversary_step(*run.env, reader("r1"), tag("t1")), CapabilityError);
}

// Tracker

TEST(Tracker, SingleReaderEvaluationIsLinear) {
    TrackerModel m;
    Environment env(3, Model::AdvT);
    m.setup(env, single_path(readers({"r1"})));
    const auto q = m.group().q;
    EXPECT_EQ(m.evaluate(readers({"r1"})), addmod(mulmod(m.a0(), m.x0(), q), m.coefficient(reader("r1")), q));
}

TEST(Tracker, OffPathVisitIsAnAnomalyNotAClaim) {
    TrackerModel m;
    Environment env(4, Model::AdvT);
    ProtocolConfig c = single_path(kPath3, kRoomy, readers({"r4"}));
    m.setup(env, c);
    for (const auto& r : readers({"r1", "r4", "r3"})) m.on_arrival(env, r, tag("t1"));
    EXPECT_FALSE(m.claim(env, tag("t1"), reader("M")));
    ASSERT_FALSE(env.anomalies.empty());
    EXPECT_NE(env.anomalies.back().find("outside its valid set"), std::string::npos);
}

TEST(Tracker, OnlyTheManagerVerifies) {
    auto run = honest("tracker", kPath3);
    EXPECT_THROW(run.model->claim(*run.env, tag("t1"), reader("r3")), VerifierPolicyError);
}

TEST(Tracker, CiphertextsChangeAtEveryStep) {
    TrackerModel m;
    Environment env(5, Model::AdvT);
    m.setup(env, single_path(kPath3));
    Bytes before = env.tag(tag("t1")).public_region();
    for (const auto& r : kPath3) {
        m.on_arrival(env, r, tag("t1"));
        const auto& now = env.tag(tag("t1")).public_region();
        EXPECT_NE(now, before);
        before = now;
    }
}

// Checker

TEST(Checker, EveryReaderClaimsItsPrefix) {
    auto run = honest("checker", kPath3);
    const auto claims = run.env->trace.claim_indices();
    ASSERT_EQ(claims.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& c = claim_at(run.env->trace, claims[i]);
        EXPECT_EQ(c.readers, ReaderSeq(kPath3.begin(), kPath3.begin() + static_cast<std::ptrdiff_t>(i + 1)));
        EXPECT_EQ(c.claimant, kPath3[i]);
    }
}

TEST(Checker, PermutedOrderIsRejected) {
    CheckerModel m;
    Environment env(6, Model::AdvT);
    m.setup(env, single_path(kPath3));
    EXPECT_EQ(m.on_arrival(env, reader("r2"), tag("t1")), StepStatus::Rejected);
    EXPECT_TRUE(env.trace.claim_indices().empty());
}

TEST(Checker, FirstStepSigmaIsLinearInTheExponent) {
    CheckerModel m;
    Environment env(8, Model::AdvT);
    m.setup(env, single_path(readers({"r1", "r2"})));
    m.on_arrival(env, reader("r1"), tag("t1"));
    const auto pairs = m.open(reader("r2"), env.tag(tag("t1")).public_region());
    ASSERT_EQ(pairs.size(), 1u);
    const auto& g = m.group();
    const u64 h = m.id_element(tag("t1"));
    EXPECT_EQ(pairs[0].first, h);
    const u64 exponent = addmod(mulmod(m.a0(), m.x0(), g.q), m.coefficient(reader("r1")), g.q);
    EXPECT_EQ(pairs[0].second, g.pow(h, exponent));
}

// StepAuth

TEST(StepAuth, SecretSizeFollowsLayerCount) {
    for (std::size_t l = 1; l <= 10; ++l) EXPECT_EQ(StepAuthModel::secret_bits(l), 1024 + 896 * (l - 1)) << l;
}

TEST(StepAuth, EncodedSizeMatchesBuiltSecret) {
    for (std::size_t l = 1; l <= 6; ++l) {
        ReaderSeq path;
        for (std::size_t i = 1; i <= l; ++i) path.push_back(reader("r" + std::to_string(i)));
        StepAuthModel m;
        Environment env(l, Model::AdvT);
        m.setup(env, single_path(path));
        const auto built = m.build(path, Bytes(16, 0xab), env.rng);
        EXPECT_EQ(built.size(), StepAuthModel::encoded_size(l)) << l;
        EXPECT_EQ(StepAuthModel::layers_for_size(built.size()), l);
    }
}

TEST(StepAuth, WrongReaderLeavesTagUntouched) {
    StepAuthModel m;
    Environment env(9, Model::AdvT);
    m.setup(env, single_path(kPath3));
    const Bytes before = env.tag(tag("t1")).public_region();
    EXPECT_EQ(m.on_arrival(env, reader("r2"), tag("t1")), StepStatus::Rejected);
    EXPECT_EQ(env.tag(tag("t1")).public_region(), before);
}

TEST(StepAuth, DefaultTagCapacityCannotHoldASecret) {
    StepAuthModel m;
    Environment env(10, Model::AdvT);
    EXPECT_THROW(m.setup(env, single_path(readers({"r1"}), kDefaultTagCapacityBits)), CapacityError);
}

TEST(StepAuth, OnlyFinalReaderClaims) {
    auto run = honest("stepauth", kPath3);
    ASSERT_EQ(run.env->trace.claim_indices().size(), 1u);
    EXPECT_EQ(claim_at(run.env->trace, *run.claim).claimant, reader("r3"));
}

// RF-Chain

TEST(RfChain, EachStepPostsOneLedgerRecord) {
    RfChainModel m;
    Environment env(11, Model::AdvT);
    m.setup(env, single_path(kPath3));
    for (const auto& r : kPath3) m.on_arrival(env, r, tag("t1"));
    ASSERT_EQ(env.ledger.size(), 3u);

    const auto content = RfChainModel::parse(env.tag(tag("t1")).public_region());
    ASSERT_TRUE(content);
    // b_1 = a_0 xor H(h_1)
    const Bytes b1 = xor_bytes(m.a0(*content), hash(m.h(*content, 1)));
    EXPECT_EQ(env.ledger.records()[0].payload, b1);
    EXPECT_EQ(env.ledger.records()[0].pseudo_id, sym_enc(hash(m.h(*content, 1)), id_bytes(tag("t1"))));
    EXPECT_TRUE(m.claim(env, tag("t1"), backend("B")));
}

TEST(RfChain, TamperedChainIsRejected) {
    RfChainModel m;
    Environment env(12, Model::AdvT);
    m.setup(env, single_path(kPath3));
    m.on_arrival(env, reader("r1"), tag("t1"));
    auto content = *RfChainModel::parse(env.tag(tag("t1")).public_region());
    content.a.back() ^= 1;
    adversary_write_tag(env.tag(tag("t1")), RfChainModel::serialize(content));
    EXPECT_EQ(m.on_arrival(env, reader("r2"), tag("t1")), StepStatus::Rejected);
    EXPECT_FALSE(m.claim(env, tag("t1"), backend("B")));
}

TEST(RfChain, ClaimListsSignersAndEmitsNoValidPath) {
    auto run = honest("rfchain", kPath3);
    ASSERT_TRUE(run.claim);
    EXPECT_EQ(claim_at(run.env->trace, *run.claim).readers, kPath3);
    for (std::size_t i = 0; i < run.env->trace.size(); ++i)
        EXPECT_FALSE(std::holds_alternative<ValidPath>(run.env->trace[i].body));
}

// Ray

TEST(Ray, ChallengesAreAcceptedInAnyOrder) {
    RayModel m;
    Environment env(13, Model::AdvT);
    ProtocolConfig c = single_path(kPath3);
    c.options["claim_order"] = "consumption";
    m.setup(env, c);
    for (const auto& r : readers({"r2", "r1", "r3"})) EXPECT_EQ(m.on_arrival(env, r, tag("t1")), StepStatus::Accepted);
    auto claim = m.claim(env, tag("t1"), reader("CP"));
    ASSERT_TRUE(claim);
    EXPECT_EQ(claim_at(env.trace, *claim).readers, readers({"r2", "r1", "r3"}));
}

TEST(Ray, SingleReaderPath) {
    auto run = honest("ray", readers({"r1"}));
    ASSERT_TRUE(run.claim);
    EXPECT_EQ(claim_at(run.env->trace, *run.claim).readers, readers({"r1"}));
}

TEST(Ray, ChallengeIsSingleUse) {
    RayModel m;
    Environment env(14, Model::AdvT);
    m.setup(env, single_path(kPath3));
    EXPECT_EQ(m.on_arrival(env, reader("r1"), tag("t1")), StepStatus::Accepted);
    EXPECT_EQ(m.on_arrival(env, reader("r1"), tag("t1")), StepStatus::Rejected);
    EXPECT_FALSE(m.claim(env, tag("t1"), reader("CP")));
}

TEST(Ray, ChallengesDifferByParticipantIdentifier) {
    for (const char* prf : {"0", "1"}) {
        RayModel m;
        Environment env(15, Model::AdvT);
        ProtocolConfig c = single_path(kPath3);
        c.options["prf"] = prf;
        m.setup(env, c);
        const Bytes d = xor_bytes(m.challenge(kPath3, 0), m.challenge(kPath3, 2));
        EXPECT_EQ(d, xor_bytes(RayModel::pid(reader("r1")), RayModel::pid(reader("r3")))) << prf;
    }
}

// ReSC

TEST(ReSC, StorageIsSlotSizeTimesPathLength) {
    EXPECT_EQ(ReScModel::kSlotBits, 683u);
    for (std::size_t n = 0; n <= 8; ++n) EXPECT_EQ(ReScModel::storage_bits(n), n * 683);
    ReScModel m;
    Environment env(16, Model::AdvT);
    m.setup(env, single_path(readers({"r1", "r2", "r3", "r4"})));
    EXPECT_EQ(env.tag(tag("t1")).nominal_bits(), 4u * 683);
}

TEST(ReSC, MissingSignatureBlocksClaim) {
    ReScModel m;
    Environment env(17, Model::AdvT);
    m.setup(env, single_path(kPath3));
    m.on_arrival(env, reader("r1"), tag("t1"));
    m.on_arrival(env, reader("r3"), tag("t1"));
    EXPECT_FALSE(m.claim(env, tag("t1"), backend("B")));
}

TEST(ReSC, KeysAreReadableOnlyWithAReaderCredential) {
    auto run = honest("resc", kPath3, 18, Model::AdvR);
    auto& mem = run.env->tag(tag("t1"));
    EXPECT_TRUE(adversary_read_tag(run.env->adversary, mem, true).protected_region.empty());
    run.model->compromise(*run.env, reader("r1"));
    const auto snap = adversary_read_tag(run.env->adversary, mem, true);
    const auto keys = decode_record(snap.protected_region);
    ASSERT_TRUE(keys);
    EXPECT_EQ(keys->size(), 3u);
}

TEST(ReSC, OffPathReaderHasNoSlot) {
    ReScModel m;
    Environment env(19, Model::AdvT);
    m.setup(env, single_path(kPath3, kRoomy, readers({"r9"})));
    EXPECT_EQ(m.on_arrival(env, reader("r9"), tag("t1")), StepStatus::Rejected);
}

// Burbridge

namespace {

ProtocolConfig two_tag_policy(const std::string& keys) {
    ProtocolConfig c;
    c.readers = readers({"ra", "rb", "rc", "rd", "re"});
    c.tags.push_back({tag("t1"), {readers({"ra", "rb", "rc", "rd", "re"})}});
    c.tags.push_back({tag("t2"), {readers({"ra", "rb", "rd", "re"})}});
    c.options["keys"] = keys;
    return c;
}

} // namespace

TEST(Burbridge, HonestShipmentAcceptedAtEveryHop) {
    BurbridgeModel m;
    Environment env(20, Model::AdvT);
    m.setup(env, two_tag_policy("shared"));
    for (const auto& r : readers({"ra", "rb", "rc", "rd", "re"}))
        EXPECT_EQ(m.on_arrival(env, r, tag("t1")), StepStatus::Accepted) << r.value;
    EXPECT_EQ(m.accepted_by(tag("t1")).size(), 5u);
    auto claim = m.claim(env, tag("t1"), backend("SCC"));
    ASSERT_TRUE(claim);
    EXPECT_TRUE(evaluate_claim(env.trace, *claim).sound);
}

TEST(Burbridge, HonestReceiverEnforcesPolicy) {
    BurbridgeModel m;
    Environment env(21, Model::AdvT);
    m.setup(env, two_tag_policy("shared"));
    m.on_arrival(env, reader("ra"), tag("t1"));
    m.on_arrival(env, reader("rb"), tag("t1"));
    EXPECT_EQ(m.on_arrival(env, reader("rd"), tag("t1")), StepStatus::Rejected);
}

TEST(Burbridge, CollusionBypassDependsOnKeyMode) {
    for (const std::string keys : {"shared", "per_tag"}) {
        BurbridgeModel m;
        Environment env(22, Model::AdvR);
        m.setup(env, two_tag_policy(keys));
        m.compromise(env, reader("rb"));
        m.compromise(env, reader("rd"));
        std::vector<StepStatus> st;
        for (const auto& r : readers({"ra", "rb", "rd", "re"})) st.push_back(m.on_arrival(env, r, tag("t1")));
        if (keys == "shared") {
            EXPECT_TRUE(std::all_of(st.begin(), st.end(), [](auto s) { return s == StepStatus::Accepted; }));
            auto claim = m.claim(env, tag("t1"), backend("SCC"));
            ASSERT_TRUE(claim);
            const auto v = evaluate_claim(env.trace, *claim);
            EXPECT_TRUE(v.authorized);
            EXPECT_FALSE(v.sound);
        } else {
            EXPECT_EQ(st[2], StepStatus::Rejected);
            EXPECT_FALSE(m.claim(env, tag("t1"), backend("SCC")));
        }
    }
}
