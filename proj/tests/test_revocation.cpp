// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/revocation.hpp"

#include <set>
#include <stdexcept>

#include "doctest.h"

using namespace saltv;
using namespace saltv::revocation;

namespace {

RevocationId random_rid(crypto::Drbg& rng) { return rng.take<16>(); }

crypto::Point fake_point(crypto::Drbg& rng) {
    // syntactic 33-byte value; rid derivation hashes it without curve checks
    auto p = rng.take<33>();
    p[0] = 0x02;
    return p;
}

}  // namespace

TEST_CASE("optimal sizing follows the analytic formula") {
    CHECK(optimal_params(1000, 0.01) == FilterParams{9586, 7});
    CHECK(optimal_params(1, 0.5) == FilterParams{2, 1});
    // one million revocations at 0.1%: ~1.80 MB, not the often-quoted 3.6
    FilterParams big = optimal_params(1'000'000, 0.001);
    CHECK(big.bit_count == 14'377'588);
    CHECK(big.hash_count == 10);

    CHECK_THROWS_AS(optimal_params(0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(optimal_params(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_params(10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_params(10, -0.5), std::invalid_argument);
}

TEST_CASE("rid derivation: deterministic, salt and key sensitive") {
    crypto::Drbg rng(31);
    crypto::Point pk = fake_point(rng);
    std::array<uint8_t, 16> sigma{};
    sigma.fill(0xee);

    // golden value frozen from hashlib over the same byte layout
    crypto::Point fixed{};
    fixed[0] = 0x02;
    for (size_t i = 1; i < fixed.size(); ++i) fixed[i] = static_cast<uint8_t>(i - 1);
    CHECK(to_hex(derive_rid(fixed, sigma)) == "5c0d9b65f534c37fac5e7906db048ea5");

    RevocationId r1 = derive_rid(pk, sigma);
    CHECK(derive_rid(pk, sigma) == r1);

    std::array<uint8_t, 16> sigma2 = sigma;
    sigma2[0] ^= 1;
    CHECK(derive_rid(pk, sigma2) != r1);

    std::set<RevocationId> rids;
    for (int i = 0; i < 100'000; ++i) rids.insert(derive_rid(fake_point(rng), sigma));
    CHECK(rids.size() == 100'000);
}

TEST_CASE("membership: no false negatives, empty filter answers false") {
    crypto::Drbg rng(32);
    RevocationFilter filter(10'000, 0.01);
    CHECK_FALSE(filter.contains(random_rid(rng)));

    std::vector<RevocationId> members;
    for (int i = 0; i < 10'000; ++i) members.push_back(random_rid(rng));
    for (const auto& r : members) filter.insert(r);
    CHECK(filter.entry_count() == 10'000);
    for (const auto& r : members) CHECK(filter.contains(r));
}

TEST_CASE("measured false-positive rate stays near the target") {
    crypto::Drbg rng(33);
    for (auto [n, p] : {std::pair<uint64_t, double>{1000, 0.01},
                        {1000, 0.001},
                        {10'000, 0.01},
                        {10'000, 0.001}}) {
        RevocationFilter filter(n, p);
        for (uint64_t i = 0; i < n; ++i) filter.insert(random_rid(rng));
        int probes = 40'000, hits = 0;
        for (int i = 0; i < probes; ++i) {
            if (filter.contains(random_rid(rng))) ++hits;  // fresh rids: ~never members
        }
        double fpr = static_cast<double>(hits) / probes;
        CAPTURE(n);
        CAPTURE(p);
        CHECK(fpr >= p / 2);
        CHECK(fpr <= p * 2);
    }
}

TEST_CASE("serialization: header layout and identical answers after round-trip") {
    crypto::Drbg rng(34);
    RevocationFilter filter(1000, 0.01);
    for (int i = 0; i < 1000; ++i) filter.insert(random_rid(rng));

    Bytes blob = filter.serialize();
    CHECK(blob.size() == filter.serialized_size());
    CHECK(blob.size() == 22 + (9586 + 7) / 8);
    CHECK(std::string(blob.begin(), blob.begin() + 4) == "SVBF");
    CHECK(blob[4] == 1);  // version

    auto parsed = RevocationFilter::deserialize(blob);
    REQUIRE(parsed.has_value());
    CHECK(parsed->bit_count() == filter.bit_count());
    CHECK(parsed->hash_count() == filter.hash_count());
    CHECK(parsed->entry_count() == filter.entry_count());
    for (int i = 0; i < 10'000; ++i) {
        RevocationId r = random_rid(rng);
        CHECK(parsed->contains(r) == filter.contains(r));
    }

    // malformed inputs
    CHECK_FALSE(RevocationFilter::deserialize({}).has_value());
    Bytes bad = blob;
    bad[0] = 'X';
    CHECK_FALSE(RevocationFilter::deserialize(bad).has_value());
    Bytes truncated(blob.begin(), blob.end() - 1);
    CHECK_FALSE(RevocationFilter::deserialize(truncated).has_value());
    Bytes trailing = blob;
    trailing.push_back(0);
    CHECK_FALSE(RevocationFilter::deserialize(trailing).has_value());
}
