// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/rsu.hpp"

#include <cmath>

#include "doctest.h"

using namespace saltv;
using namespace saltv::rsu;

TEST_CASE("slot_of: floor semantics and drift offsets") {
    TimeModel tm;  // T_s = 10 ms
    CHECK(tm.slot_of(0) == 0);
    CHECK(tm.slot_of(25'000) == 2);
    CHECK(tm.slot_of(9'999) == 0);
    CHECK(tm.slot_of(10'000) == 1);

    // +10 ms drift at t = 95 ms lands in slot 10 while an undrifted clock says 9
    CHECK(tm.slot_of(95'000, 10) == 10);
    CHECK(tm.slot_of(95'000, 0) == 9);

    // drift beyond the sync bound is clamped
    CHECK(tm.slot_of(95'000, 50) == tm.slot_of(95'000, 10));
    CHECK(tm.slot_of(5'000, -10) == 0);  // negative time clamps at zero
}

TEST_CASE("slot disagreement between in-sync parties is bounded") {
    TimeModel tm;
    uint32_t bound = tm.max_slot_disagreement();
    CHECK(bound == 2);  // ceil(2 * 10ms / 10ms)

    for (uint64_t t = 0; t < 2'000'000; t += 1'700) {
        for (int32_t da = -10; da <= 10; da += 5) {
            for (int32_t db = -10; db <= 10; db += 5) {
                uint32_t sa = tm.slot_of(t, da);
                uint32_t sb = tm.slot_of(t, db);
                uint32_t diff = sa > sb ? sa - sb : sb - sa;
                CHECK(diff <= bound);
            }
        }
    }

    // the receiver cache window (d + w + 1 slots) exceeds the bound under defaults
    CHECK(2u + 3u + 1u > bound);
}

TEST_CASE("epoch_of rolls hourly") {
    TimeModel tm;
    CHECK(tm.epoch_of(0) == 0);
    CHECK(tm.epoch_of(3599ull * 1'000'000) == 0);
    CHECK(tm.epoch_of(3600ull * 1'000'000) == 1);
    CHECK(tm.epoch_of(7250ull * 1'000'000) == 2);
}

TEST_CASE("anchor: signed, codec round-trips, sigma rotation invalidates rids") {
    crypto::Drbg rng(55);
    crypto::SigningKeyPair ta = crypto::generate_keypair(rng);
    Rsu rsu(ta, {0, 1ull << 40}, rng);
    CHECK(crypto::verify_cert(rsu.cert(), ta.public_point));

    revocation::RevocationFilter filter(10, 0.01);
    crypto::Point revoked_pk = rng.take<33>();
    revoked_pk[0] = 0x02;

    AnchorParams params;
    params.sigma = rng.take<16>();
    filter.insert(revocation::derive_rid(revoked_pk, params.sigma));

    wire::AnchorFrame anchor = rsu.build_anchor(filter, params, 5'000'000);
    CHECK(anchor.validity_start_us == 5'000'000);
    CHECK(anchor.validity_end_us == 7'000'000);
    CHECK(crypto::verify(rsu.cert().pk_p, wire::anchor_signing_bytes(anchor),
                         anchor.rsu_signature));

    auto decoded = wire::decode(wire::encode(anchor));
    REQUIRE(decoded.has_value());
    CHECK(std::get<wire::AnchorFrame>(*decoded) == anchor);

    // rid derived under a fresh epoch salt no longer matches the filter
    auto filter2 = revocation::RevocationFilter::deserialize(anchor.filter_bytes);
    REQUIRE(filter2.has_value());
    CHECK(filter2->contains(revocation::derive_rid(revoked_pk, params.sigma)));
    wire::Sigma sigma2 = params.sigma;
    sigma2[3] ^= 0x40;
    CHECK_FALSE(filter2->contains(revocation::derive_rid(revoked_pk, sigma2)));
}

TEST_CASE("consecutive anchors at 1 Hz with 2 s validity overlap") {
    crypto::Drbg rng(56);
    crypto::SigningKeyPair ta = crypto::generate_keypair(rng);
    Rsu rsu(ta, {0, 1ull << 40}, rng);
    revocation::RevocationFilter filter(1, 0.5);
    AnchorParams params;

    uint64_t prev_end = 0;
    for (int i = 0; i < 10; ++i) {
        uint64_t now = static_cast<uint64_t>(i) * 1'000'000;
        wire::AnchorFrame a = rsu.build_anchor(filter, params, now);
        if (i > 0) CHECK(a.validity_start_us < prev_end);  // no coverage gap
        prev_end = a.validity_end_us;
    }
}
