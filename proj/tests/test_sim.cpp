// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/sim.hpp"

#include <stdexcept>

#include "doctest.h"

using namespace saltv;
using namespace saltv::sim;

namespace {

ScenarioConfig base_config(Scheme scheme, uint32_t vehicles = 10, double duration = 5.0) {
    ScenarioConfig cfg;
    cfg.scheme = scheme;
    cfg.vehicles = vehicles;
    cfg.duration_s = duration;
    cfg.rng_seed = 42;
    cfg.rng_seed_set = true;
    return cfg;
}

uint64_t total_rejects(const SchemeMetrics& m) {
    uint64_t n = 0;
    for (const auto& [k, v] : m.rejects_by_reason) n += v;
    return n;
}

bool metrics_equal(const SchemeMetrics& a, const SchemeMetrics& b) {
    return a.frames_data == b.frames_data && a.frames_boot == b.frames_boot &&
           a.frames_reveal == b.frames_reveal && a.frames_anchor == b.frames_anchor &&
           a.frames_signed == b.frames_signed && a.bytes_data == b.bytes_data &&
           a.deliveries_data == b.deliveries_data && a.dropped_by_loss == b.dropped_by_loss &&
           a.immediate_final == b.immediate_final && a.strong_final == b.strong_final &&
           a.rejects_by_reason == b.rejects_by_reason &&
           a.immediate_ratio == b.immediate_ratio &&
           a.avg_auth_delay_ms == b.avg_auth_delay_ms &&
           a.avg_computation_ms == b.avg_computation_ms &&
           a.op_counts.sig_verify == b.op_counts.sig_verify &&
           a.op_counts.gmac == b.op_counts.gmac;
}

const bench::BenchTable& costs() {
    static bench::BenchTable t = bench::builtin_reference();
    return t;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
    ScenarioConfig cfg = base_config(Scheme::Saltv);
    CHECK_FALSE(validate(cfg).has_value());

    cfg.loss_rate = 1.5;
    auto err = validate(cfg);
    REQUIRE(err.has_value());
    CHECK(err->find("loss_rate") != std::string::npos);

    cfg = base_config(Scheme::Saltv);
    cfg.rng_seed_set = false;
    err = validate(cfg);
    REQUIRE(err.has_value());
    CHECK(err->find("rng_seed") != std::string::npos);

    cfg = base_config(Scheme::Saltv);
    cfg.w = 9;
    err = validate(cfg);
    REQUIRE(err.has_value());
    CHECK(err->find("w") == 0);
}

TEST_CASE("identical config and seed give identical reports") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 8, 3.0);
    cfg.loss_rate = 0.1;
    SchemeMetrics a = run(cfg, costs());
    SchemeMetrics b = run(cfg, costs());
    CHECK(metrics_equal(a, b));

    cfg.rng_seed = 43;
    SchemeMetrics c = run(cfg, costs());
    CHECK_FALSE(metrics_equal(a, c));  // seed actually steers the run
}

TEST_CASE("conservation: every delivered frame reaches exactly one terminal status") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 5, 3.0);
    SchemeMetrics m = run(cfg, costs());

    // lossless full mesh: every data broadcast reaches all other vehicles
    CHECK(m.dropped_by_loss == 0);
    CHECK(m.deliveries_data == m.frames_data * (cfg.vehicles - 1));
    CHECK(m.strong_final + m.immediate_unconfirmed + total_rejects(m) == m.deliveries_data);

    ScenarioConfig lossy = cfg;
    lossy.loss_rate = 0.2;
    SchemeMetrics lm = run(lossy, costs());
    CHECK(lm.dropped_by_loss > 0);
    CHECK(lm.strong_final + lm.immediate_unconfirmed + total_rejects(lm) == lm.deliveries_data);
}

TEST_CASE("hybrid scheme: near-total immediate authentication, zero retroactives") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 10, 5.0);
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.immediate_ratio >= 0.99);
    CHECK(m.retroactive_rejections == 0);
    CHECK(m.avg_auth_delay_ms <= 1.0);
    CHECK(m.boots_accepted_full > 0);
    CHECK(m.boots_refreshed > 0);
    CHECK(m.frames_boot * 10 == m.frames_data);  // r = 10 cadence
    CHECK(m.high_water_whitelist <= cfg.vehicles);
    CHECK(m.avg_computation_ms > 0);
}

TEST_CASE("tesla baseline: zero immediate, disclosure-delay latency") {
    ScenarioConfig cfg = base_config(Scheme::Tesla, 10, 5.0);
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.immediate_ratio == 0.0);
    CHECK(m.avg_auth_delay_ms >= 20.0);
    CHECK(m.avg_auth_delay_ms <= 25.0);
    CHECK(m.mean_disclosure_wait_ms == 20.0);
    CHECK(m.frames_boot == 0);
    CHECK(m.frames_signed == 0);
}

TEST_CASE("ecdsa baseline: all immediate, signature-heavy") {
    ScenarioConfig cfg = base_config(Scheme::Ecdsa, 6, 3.0);
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.immediate_ratio == 1.0);
    CHECK(m.avg_auth_delay_ms == 0.0);
    CHECK(m.frames_signed > 0);
    CHECK(m.frames_data == 0);
    CHECK(m.op_counts.sig_verify == m.deliveries_data);
    CHECK(m.op_counts.cert_verify == m.deliveries_data);
}

TEST_CASE("vast baseline: immediate ratio equals the signing fraction") {
    ScenarioConfig cfg = base_config(Scheme::Vast, 10, 5.0);
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.immediate_ratio >= 0.09);
    CHECK(m.immediate_ratio <= 0.11);
    CHECK(m.avg_auth_delay_ms >= 15.0);  // 0.9 * 20 ms mix, minus edge effects
    CHECK(m.avg_auth_delay_ms <= 20.0);
    CHECK(!m.notes.empty());
}

TEST_CASE("scheme cost ordering under the reference table") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 8, 4.0);
    SchemeMetrics hybrid = run(cfg, costs());
    cfg.scheme = Scheme::Ecdsa;
    SchemeMetrics ecdsa = run(cfg, costs());
    cfg.scheme = Scheme::Tesla;
    SchemeMetrics tesla = run(cfg, costs());

    CHECK(ecdsa.avg_computation_ms > 5 * hybrid.avg_computation_ms);
    CHECK(hybrid.avg_computation_ms < 2.5 * tesla.avg_computation_ms);
    // message size ordering: ecdsa > hybrid > vast > tesla per message
    cfg.scheme = Scheme::Vast;
    SchemeMetrics vast = run(cfg, costs());
    CHECK(ecdsa.per_message_bytes > hybrid.per_message_bytes);
    CHECK(hybrid.per_message_bytes > vast.per_message_bytes);
    CHECK(vast.per_message_bytes > tesla.per_message_bytes);
}

TEST_CASE("replay adversary: zero accepted, cross-cell observer included") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 6, 3.0);
    cfg.adversary = AdversaryKind::Replay;
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.attack_frames_injected >= 100);
    CHECK(m.attack_frames_accepted == 0);
    CHECK(m.rejects_by_reason.count("replay_counter"));
    // honest traffic still flows
    CHECK(m.immediate_ratio >= 0.99);
}

TEST_CASE("tamper adversary: zero accepted") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 6, 3.0);
    cfg.adversary = AdversaryKind::Tamper;
    SchemeMetrics m = run(cfg, costs());
    CHECK(m.attack_frames_injected >= 100);
    CHECK(m.attack_frames_accepted == 0);
}

TEST_CASE("forged-key adversary: commitment checks hold the line") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 6, 3.0);
    cfg.adversary = AdversaryKind::ForgeKey;
    SchemeMetrics m = run(cfg, costs());
    CHECK(m.attack_frames_injected >= 100);
    CHECK(m.attack_frames_accepted == 0);
    CHECK(m.commitment_mismatches >= 100);
    CHECK(m.retroactive_rejections == 0);
    CHECK(m.immediate_ratio >= 0.99);  // honest frames unharmed
}

TEST_CASE("revoked senders never authenticate immediately") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 6, 3.0);
    cfg.adversary = AdversaryKind::RevokedSender;
    cfg.revoked_count = 2;
    SchemeMetrics m = run(cfg, costs());

    CHECK(m.revoked_sender_deliveries > 0);
    CHECK(m.revoked_sender_immediate == 0);
    CHECK(m.boots_rejected > 0);
    CHECK(m.rejects_by_reason.count("expired"));  // their frames die pending
}

TEST_CASE("monitor sampling keeps metrics meaningful") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 12, 3.0);
    cfg.monitors = 3;
    SchemeMetrics m = run(cfg, costs());
    CHECK(m.monitors_used == 3);
    CHECK(m.deliveries_data == m.frames_data * 3 - /* own frames skipped */ 3 * 10 * 3);
    CHECK(m.immediate_ratio >= 0.99);
}

TEST_CASE("strict policy in simulation") {
    ScenarioConfig cfg = base_config(Scheme::Saltv, 6, 3.0);
    cfg.policy = wire::Policy::Strict;
    cfg.loss_rate = 0.0;
    SchemeMetrics m = run(cfg, costs());
    // all boots arrive lossless, so strict changes nothing
    CHECK(m.immediate_ratio >= 0.99);
    CHECK(m.rejects_by_reason.count("strict_no_boot") == 0);
}
