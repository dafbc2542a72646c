#include <gtest/gtest.h>

#include "pathauth/network.hpp"

using namespace pathauth;

TEST(Knowledge, DeductionRules) {
    Rng rng(1);
    Knowledge k;
    auto sk = SigningKey::generate("r1", rng);
    auto inner = to_bytes("a_prev");
    k.observe(sign(sk, inner).serialize());
    EXPECT_TRUE(k.can_derive(inner)); // strip
    EXPECT_TRUE(k.can_derive(hash(inner)));

    auto x = random_bytes(rng, 32), y = random_bytes(rng, 32);
    k.observe(x);
    k.observe(y);
    EXPECT_TRUE(k.can_derive(xor_bytes(x, y)));
    EXPECT_FALSE(k.can_derive(random_bytes(rng, 32)));

    auto key = random_bytes(rng, 32);
    auto ct = sym_enc(key, to_bytes("hidden"));
    k.observe(ct);
    EXPECT_FALSE(k.can_derive(to_bytes("hidden")));
    k.learn_key(key);
    EXPECT_TRUE(k.can_derive(to_bytes("hidden")));
}

TEST(Knowledge, PublicKeyDecryptionWithCompromisedKey) {
    Rng rng(2);
    auto kp = elgamal_keygen(rng);
    Knowledge k;
    k.observe(pk_enc(kp.pk, to_bytes("session"), rng));
    EXPECT_FALSE(k.can_derive(to_bytes("session")));
    k.learn_elgamal(kp.sk);
    EXPECT_TRUE(k.can_derive(to_bytes("session")));
}

TEST(Knowledge, MonotoneUnderObservation) {
    Rng rng(3);
    Knowledge k;
    std::size_t last = 0;
    for (int i = 0; i < 200; ++i) {
        k.observe(random_bytes(rng, rng() % 4)); // includes empty and repeated short terms
        ASSERT_GE(k.size(), last);
        last = k.size();
    }
}

TEST(Adversary, CompromiseGatedByModel) {
    Adversary t(Model::AdvT);
    EXPECT_THROW(t.compromise(reader("r1"), {{"k", to_bytes("x")}}), CapabilityError);
    EXPECT_TRUE(t.compromised().empty());

    Adversary r(Model::AdvR);
    r.compromise(reader("r1"), {{"r1.key", to_bytes("secret")}});
    EXPECT_TRUE(r.controls(reader("r1")));
    EXPECT_EQ(r.knowledge().secret("r1.key"), to_bytes("secret"));
}

TEST(Network, PassthroughDeliversUnchangedAndObserves) {
    Adversary adv;
    Network net(adv);
    auto e = net.transmit(reader("r1"), tag("t1"), to_bytes("hello"));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->payload, to_bytes("hello"));
    EXPECT_TRUE(adv.knowledge().knows(to_bytes("hello")));
    EXPECT_EQ(net.dump(), "0 r1->t1 68656c6c6f deliver\n");
}

TEST(Network, TrustedLinkIsNotObserved) {
    Adversary adv;
    Network net(adv);
    net.transmit(tag("t1"), backend("B"), to_bytes("ccid"), true);
    EXPECT_FALSE(adv.knowledge().knows(to_bytes("ccid")));
    EXPECT_EQ(net.transcript().back().action, Action::Trusted);
}

TEST(Network, DropTamperAndReplay) {
    Adversary adv;
    Network net(adv, make_strategy({"drop", "r2"}));
    EXPECT_TRUE(net.transmit(reader("r1"), tag("t"), to_bytes("a")));
    EXPECT_FALSE(net.transmit(reader("r2"), tag("t"), to_bytes("b")));

    net.set_strategy(make_strategy({"tamper", std::nullopt}));
    auto m = net.transmit(reader("r1"), tag("t"), Bytes{0x10});
    ASSERT_TRUE(m);
    EXPECT_EQ(m->payload, Bytes{0x11});

    net.set_strategy(make_strategy({"replay", "t"}));
    EXPECT_FALSE(net.transmit(reader("r3"), tag("t"), to_bytes("c3")));
    ASSERT_EQ(net.stored().size(), 1u);
    auto again = net.replay(0);
    ASSERT_TRUE(again);
    EXPECT_EQ(again->payload, to_bytes("c3"));
    EXPECT_GT(again->seq, net.stored()[0].seq);
    EXPECT_FALSE(net.replay(5));
    EXPECT_THROW(make_strategy({"nonsense", std::nullopt}), UsageError);
}

TEST(Network, SequenceNumbersUnique) {
    Adversary adv;
    Network net(adv, make_strategy({"replay", std::nullopt}));
    for (int i = 0; i < 5; ++i) net.transmit(reader("r"), tag("t"), to_bytes("x"));
    net.replay(0);
    net.inject(reader("rx"), tag("t"), to_bytes("y"));
    std::set<std::uint64_t> seqs;
    for (const auto& e : net.transcript()) seqs.insert(e.envelope.seq);
    EXPECT_EQ(seqs.size(), net.transcript().size());
}

TEST(TagMemory, CapacityEnforcedWithoutTruncation) {
    TagMemory mem;
    EXPECT_EQ(mem.capacity_bits(), 512u);
    mem.write(to_bytes("ok"), {}, 512);
    EXPECT_THROW(mem.write(to_bytes("too big"), {}, 513), CapacityError);
    EXPECT_EQ(mem.public_region(), to_bytes("ok"));
    EXPECT_THROW(adversary_write_tag(mem, Bytes(65, 0)), CapacityError);
    adversary_write_tag(mem, Bytes(64, 1));
    EXPECT_EQ(mem.public_region(), Bytes(64, 1));
}

TEST(TagMemory, AdversaryReadRespectsProtectedRegion) {
    TagMemory mem(4096);
    EXPECT_TRUE(adversary_read_tag(*std::make_unique<Adversary>(), mem, false).public_region.empty());
    mem.write(to_bytes("pub"), to_bytes("keys"), 100);
    Adversary t(Model::AdvT);
    auto s = adversary_read_tag(t, mem, true);
    EXPECT_EQ(s.public_region, to_bytes("pub"));
    EXPECT_TRUE(s.protected_region.empty());

    Adversary r(Model::AdvR);
    r.compromise(reader("r1"), {});
    auto s2 = adversary_read_tag(r, mem, true);
    EXPECT_EQ(s2.protected_region, to_bytes("keys"));
    EXPECT_TRUE(r.knowledge().knows(to_bytes("keys")));
}
