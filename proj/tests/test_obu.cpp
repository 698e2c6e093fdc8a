// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/obu.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "doctest.h"

using namespace saltv;
using namespace saltv::obu;

namespace {

struct Rig {
    crypto::SigningKeyPair ta;
    Sender sender;

    static Rig make(SenderConfig cfg, size_t batch_size = 8, uint64_t seed = 77) {
        crypto::Drbg rng(seed);
        crypto::SigningKeyPair ta = crypto::generate_keypair(rng);
        auto batch = crypto::issue_pseudonym_batch(batch_size, ta, {0, 1'000'000}, rng);
        std::array<uint8_t, 32> sender_seed{};
        rng.fill(sender_seed);
        Sender s(sender_seed, std::move(batch), cfg);
        wire::Sigma sigma{};
        sigma.fill(0x5a);
        s.adopt_epoch(0, sigma);
        return Rig{ta, std::move(s)};
    }
};

Bytes payload(size_t n = 32) { return Bytes(n, 0x42); }

}  // namespace

TEST_CASE("slot tick derives material, resets counter, rejects non-monotonic") {
    auto rig = Rig::make({});
    rig.sender.on_slot_tick(5);
    CHECK(rig.sender.slot_counter() == 0);
    auto b1 = rig.sender.send_message(payload());
    CHECK(b1.data->meta.counter == 0);
    CHECK(rig.sender.slot_counter() == 1);

    rig.sender.on_slot_tick(6);
    CHECK(rig.sender.slot_counter() == 0);
    CHECK_THROWS_AS(rig.sender.on_slot_tick(6), std::logic_error);
    CHECK_THROWS_AS(rig.sender.on_slot_tick(4), std::logic_error);
}

TEST_CASE("per-slot counters are gapless within a slot") {
    auto rig = Rig::make({});
    rig.sender.on_slot_tick(0);
    for (uint32_t i = 0; i < 5; ++i) {
        auto b = rig.sender.send_message(payload());
        CHECK(b.data->meta.counter == i);
    }
    rig.sender.on_slot_tick(1);
    CHECK(rig.sender.send_message(payload()).data->meta.counter == 0);
}

TEST_CASE("reveal timing: first tick reveals nothing; d-old keys become due") {
    SenderConfig cfg;
    cfg.disclosure_delay = 2;
    cfg.reveal_window = 3;
    auto rig = Rig::make(cfg);

    rig.sender.on_slot_tick(0);
    CHECK_FALSE(rig.sender.collect_reveal().has_value());

    // traffic every slot; each send drains whatever just became due
    std::map<uint32_t, crypto::MacKey> sent_keys;
    sent_keys[0] = rig.sender.slot_material().key;
    CHECK_FALSE(rig.sender.send_message(payload()).reveal.has_value());
    for (uint32_t s = 1; s <= 5; ++s) {
        rig.sender.on_slot_tick(s);
        sent_keys[s] = rig.sender.slot_material().key;
        auto b = rig.sender.send_message(payload());
        if (s < 2) {
            CHECK_FALSE(b.reveal.has_value());
        } else {
            REQUIRE(b.reveal.has_value());
            CHECK(b.reveal->oldest_slot == s - 2);
            REQUIRE(b.reveal->keys.size() == 1);
            CHECK(b.reveal->keys[0] == sent_keys[s - 2]);
        }
    }

    // tick from 5 to 6 makes the slot-4 key revealable
    rig.sender.on_slot_tick(6);
    auto reveal = rig.sender.collect_reveal();
    REQUIRE(reveal.has_value());
    CHECK(reveal->oldest_slot == 4);
    REQUIRE(reveal->keys.size() == 1);
    CHECK(reveal->keys[0] == sent_keys[4]);
    CHECK_FALSE(rig.sender.collect_reveal().has_value());  // drained
}

TEST_CASE("missed reveal opportunities bundle up to w consecutive keys") {
    SenderConfig cfg;
    cfg.disclosure_delay = 3;
    cfg.reveal_window = 3;
    auto rig = Rig::make(cfg);

    // traffic in slots 0..2; nothing is due while sending (d = 3)
    std::map<uint32_t, crypto::MacKey> keys;
    for (uint32_t s = 0; s <= 2; ++s) {
        rig.sender.on_slot_tick(s);
        keys[s] = rig.sender.slot_material().key;
        CHECK_FALSE(rig.sender.send_message(payload()).reveal.has_value());
    }
    // the reveal opportunities at slots 3..5 are all missed
    rig.sender.on_slot_tick(6);
    auto r = rig.sender.collect_reveal();
    REQUIRE(r.has_value());
    CHECK(r->oldest_slot == 0);
    REQUIRE(r->keys.size() == 3);
    for (uint32_t s = 0; s <= 2; ++s) CHECK(r->keys[s] == keys[s]);
    CHECK(rig.sender.dropped_key_count() == 0);
}

TEST_CASE("keys beyond the bundling window are dropped, newest run wins") {
    SenderConfig cfg;
    cfg.disclosure_delay = 5;
    cfg.reveal_window = 3;
    auto rig = Rig::make(cfg);

    std::map<uint32_t, crypto::MacKey> keys;
    for (uint32_t s = 0; s <= 4; ++s) {
        rig.sender.on_slot_tick(s);
        keys[s] = rig.sender.slot_material().key;
        CHECK_FALSE(rig.sender.send_message(payload()).reveal.has_value());
    }
    rig.sender.on_slot_tick(20);  // all five keys due; window keeps {2,3,4}
    auto r = rig.sender.collect_reveal();
    REQUIRE(r.has_value());
    CHECK(r->oldest_slot == 2);
    REQUIRE(r->keys.size() == 3);
    for (uint32_t i = 0; i < 3; ++i) CHECK(r->keys[i] == keys[2 + i]);
    CHECK(rig.sender.dropped_key_count() == 2);
}

TEST_CASE("boot cadence: r-th messages and emergencies carry BOOT") {
    SenderConfig cfg;
    cfg.boot_period = 10;
    auto rig = Rig::make(cfg);
    int boots = 0;
    for (uint32_t m = 0; m < 20; ++m) {
        rig.sender.on_slot_tick(m);
        auto b = rig.sender.send_message(payload());
        bool has_boot = b.boot.has_value();
        CHECK(has_boot == (m % 10 == 0));
        boots += has_boot;
        if (has_boot) {
            // BOOT binds the companion DATA frame byte-for-byte
            auto& d = *b.data;
            CHECK(b.boot->digest == wire::boot_digest(d.payload, d.commitment, d.tag, d.iv));
            CHECK(crypto::verify(b.boot->cert.pk_p, b.boot->digest, b.boot->signature));
            CHECK(crypto::verify_cert(b.boot->cert, rig.ta.public_point));
        }
    }
    CHECK(boots == 2);

    rig.sender.on_slot_tick(100);
    auto b = rig.sender.send_message(payload(), /*emergency=*/true);
    CHECK(b.boot.has_value());
    // emergency does not reset the periodic cadence
    for (uint32_t m = 0; m < 9; ++m) {
        rig.sender.on_slot_tick(101 + m);
        CHECK_FALSE(rig.sender.send_message(payload()).boot.has_value());
    }
    rig.sender.on_slot_tick(200);
    CHECK(rig.sender.send_message(payload()).boot.has_value());
}

TEST_CASE("boot fraction over 1000 messages is r-exact") {
    SenderConfig cfg;
    cfg.boot_period = 10;
    cfg.rotation_period_us = 1ull << 62;
    auto rig = Rig::make(cfg);
    int boots = 0;
    for (uint32_t m = 0; m < 1000; ++m) {
        rig.sender.on_slot_tick(m * 10);
        boots += rig.sender.send_message(payload()).boot.has_value();
    }
    CHECK(boots >= 99);
    CHECK(boots <= 101);
}

TEST_CASE("disclosure correctness: every traffic slot key revealed exactly once") {
    SenderConfig cfg;
    cfg.disclosure_delay = 2;
    cfg.reveal_window = 3;
    auto rig = Rig::make(cfg);
    std::map<uint32_t, crypto::MacKey> sent;
    std::map<uint32_t, int> revealed;

    for (uint32_t m = 0; m < 100; ++m) {
        uint32_t slot = m * 10;  // 10 Hz traffic over 10 ms slots
        rig.sender.on_slot_tick(slot);
        auto b = rig.sender.send_message(payload());
        sent[slot] = rig.sender.slot_material().key;
        CHECK_FALSE(b.reveal.has_value());  // nothing due at send time

        // due-time wakeup d slots later; the window ends exactly at the
        // traffic slot and backfills up to w-1 silent-slot keys before it
        rig.sender.on_slot_tick(slot + cfg.disclosure_delay);
        auto r = rig.sender.collect_reveal();
        REQUIRE(r.has_value());
        uint32_t newest = r->oldest_slot + static_cast<uint32_t>(r->keys.size()) - 1;
        CHECK(newest == slot);
        CHECK(r->keys.back() == sent[slot]);
        CHECK(r->keys.size() <= cfg.reveal_window);
        for (size_t i = 0; i < r->keys.size(); ++i) {
            revealed[r->oldest_slot + static_cast<uint32_t>(i)]++;
        }
    }
    // every traffic key disclosed exactly once; no slot disclosed twice
    for (const auto& [slot, key] : sent) CHECK(revealed.count(slot) == 1);
    for (const auto& [slot, count] : revealed) CHECK(count == 1);
    CHECK(rig.sender.dropped_key_count() == 0);
}

TEST_CASE("iv uniqueness per slot key across an epoch of traffic") {
    auto rig = Rig::make({});
    std::set<std::pair<crypto::MacKey, crypto::Iv>> seen;
    uint32_t slot = 0;
    for (int m = 0; m < 10'000; ++m) {
        if (m % 4 == 0) rig.sender.on_slot_tick(slot += 1 + (m % 3));
        auto b = rig.sender.send_message(payload(8));
        CHECK(seen.insert({rig.sender.slot_material().key, b.data->iv}).second);
    }
}

TEST_CASE("pseudonym rotation changes est and exhausts cleanly") {
    auto rig = Rig::make({}, /*batch=*/3);
    rig.sender.on_slot_tick(1);
    wire::Est before = rig.sender.est();
    rig.sender.rotate_pseudonym();
    CHECK(rig.sender.est() != before);
    CHECK(rig.sender.pseudonym_index() == 1);
    rig.sender.rotate_pseudonym();
    CHECK_THROWS_AS(rig.sender.rotate_pseudonym(), std::runtime_error);
}

TEST_CASE("payload limits and preconditions") {
    auto rig = Rig::make({});
    CHECK_THROWS_AS(rig.sender.send_message(payload()), std::logic_error);  // no tick yet
    rig.sender.on_slot_tick(0);
    CHECK_THROWS_AS(rig.sender.send_message(Bytes(3000, 0)), std::invalid_argument);
    CHECK_NOTHROW(rig.sender.send_message(Bytes(2048, 0)));
}

TEST_CASE("est values across 10^3 rotations are pairwise distinct") {
    auto rig = Rig::make({}, /*batch=*/1000, /*seed=*/91);
    rig.sender.on_slot_tick(1);
    std::set<wire::Est> seen{rig.sender.est()};
    for (int rot = 0; rot < 999; ++rot) {
        wire::Est before = rig.sender.est();
        rig.sender.rotate_pseudonym();
        CHECK(rig.sender.est() != before);
        seen.insert(rig.sender.est());
    }
    CHECK(seen.size() == 1000);  // no deterministic carryover across rotations
}
