// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "saltv/revocation.hpp"

namespace saltv::bench {

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn in batches until `iterations` calls have been timed; returns the
// per-call cost distribution summarized as median and p95. Batching keeps
// timer overhead negligible for sub-microsecond operations.
template <typename Fn>
OpCost time_op(uint64_t iterations, size_t batch, Fn&& fn) {
    std::vector<double> samples;
    samples.reserve(iterations / batch + 1);
    uint64_t done = 0;
    while (done < iterations) {
        auto t0 = Clock::now();
        for (size_t i = 0; i < batch; ++i) fn(done + i);
        auto t1 = Clock::now();
        done += batch;
        double us = std::chrono::duration<double, std::micro>(t1 - t0).count() /
                    static_cast<double>(batch);
        samples.push_back(us);
    }
    std::sort(samples.begin(), samples.end());
    OpCost cost;
    cost.median_us = samples[samples.size() / 2];
    cost.p95_us = samples[std::min(samples.size() - 1,
                                   static_cast<size_t>(samples.size() * 0.95))];
    return cost;
}

}  // namespace

const OpCost& BenchTable::at(const std::string& name) const {
    auto it = ops.find(name);
    if (it == ops.end()) throw std::invalid_argument("bench table missing op: " + name);
    return it->second;
}

BenchTable builtin_reference() {
    BenchTable t;
    t.source = "builtin_reference";
    t.ops["sign"] = {80.0, 95.0};
    t.ops["verify"] = {110.0, 130.0};
    t.ops["gmac"] = {2.0, 2.5};
    t.ops["sha256"] = {0.5, 0.7};
    t.ops["hkdf"] = {3.0, 3.8};
    t.ops["bloom_query_1k"] = {0.45, 0.6};
    t.ops["bloom_query_1m"] = {0.55, 0.8};
    return t;
}

BenchTable measure(uint64_t iterations) {
    if (iterations < 100) iterations = 100;
    BenchTable t;
    t.source = "measured";
    crypto::Drbg rng(0xbe7c4);

    // representative inputs: 300-byte payloads, 26-byte AAD, 64-byte digests
    crypto::SigningKeyPair kp = crypto::generate_keypair(rng);
    std::vector<Bytes> msgs(256);
    for (auto& m : msgs) {
        m.resize(64);
        rng.fill(m);
    }
    t.ops["sign"] = time_op(iterations, 1, [&](uint64_t i) {
        (void)crypto::sign(kp.secret_scalar, msgs[i % msgs.size()]);
    });

    std::vector<crypto::Signature> sigs(msgs.size());
    for (size_t i = 0; i < msgs.size(); ++i) sigs[i] = crypto::sign(kp.secret_scalar, msgs[i]);
    t.ops["verify"] = time_op(iterations, 1, [&](uint64_t i) {
        (void)crypto::verify(kp.public_point, msgs[i % msgs.size()], sigs[i % msgs.size()]);
    });

    crypto::MacKey key = rng.take<16>();
    crypto::Iv iv = rng.take<12>();
    Bytes aad(26);
    rng.fill(aad);
    Bytes payload(300);
    rng.fill(payload);
    t.ops["gmac"] = time_op(iterations, 16, [&](uint64_t) {
        (void)crypto::gmac(key, iv, aad, payload);
    });

    t.ops["sha256"] = time_op(iterations, 32, [&](uint64_t i) {
        (void)crypto::sha256(msgs[i % msgs.size()]);
    });

    std::array<uint8_t, 32> secret = rng.take<32>();
    t.ops["hkdf"] = time_op(iterations, 16, [&](uint64_t i) {
        ByteWriter info;
        info.u32(static_cast<uint32_t>(i));
        (void)crypto::hkdf16(secret, info.bytes());
    });

    std::vector<revocation::RevocationId> probes(512);
    for (auto& p : probes) p = rng.take<16>();
    for (auto [name, n] : {std::pair<const char*, uint64_t>{"bloom_query_1k", 1'000},
                           {"bloom_query_1m", 1'000'000}}) {
        revocation::RevocationFilter filter(n, 0.01);
        for (uint64_t i = 0; i < n; ++i) filter.insert(rng.take<16>());
        t.ops[name] = time_op(iterations, 32, [&](uint64_t i) {
            (void)filter.contains(probes[i % probes.size()]);
        });
    }
    return t;
}

double modeled_cost_ms(const verifier::OpCounts& counts, const BenchTable& table,
                       uint64_t messages) {
    if (messages == 0) return 0.0;
    double total_us = static_cast<double>(counts.sig_verify) * table.at("verify").median_us +
                      static_cast<double>(counts.cert_verify) * table.at("verify").median_us +
                      static_cast<double>(counts.gmac) * table.at("gmac").median_us +
                      static_cast<double>(counts.sha256) * table.at("sha256").median_us +
                      static_cast<double>(counts.bloom_query) * table.at("bloom_query_1k").median_us;
    return total_us / static_cast<double>(messages) / 1000.0;
}

nlohmann::ordered_json to_json(const BenchTable& table) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["source"] = table.source;
    nlohmann::ordered_json ops;
    for (const auto& [name, cost] : table.ops) {
        ops[name] = {{"median_us", cost.median_us}, {"p95_us", cost.p95_us}};
    }
    j["ops"] = ops;
    return j;
}

std::optional<BenchTable> table_from_json(const nlohmann::json& j) {
    BenchTable t;
    if (!j.is_object() || !j.contains("ops") || !j["ops"].is_object()) return std::nullopt;
    t.source = j.value("source", "measured");
    for (const auto& [name, cost] : j["ops"].items()) {
        if (!cost.contains("median_us") || !cost.contains("p95_us")) return std::nullopt;
        t.ops[name] = OpCost{cost["median_us"].get<double>(), cost["p95_us"].get<double>()};
    }
    for (const char* required :
         {"sign", "verify", "gmac", "sha256", "hkdf", "bloom_query_1k", "bloom_query_1m"}) {
        if (!t.ops.count(required)) return std::nullopt;
    }
    return t;
}

}  // namespace saltv::bench
