// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic discrete-event simulator: N vehicles broadcasting BSMs at a
// fixed rate in one shared broadcast domain with i.i.d. per-(frame,receiver)
// loss, an RSU anchor source for the hybrid scheme, pluggable scheme
// adapters, and a metrics collector. Identical (config, seed) pairs produce
// identical reports; there is no ambient randomness anywhere.

#ifndef SALTV_SIM_HPP
#define SALTV_SIM_HPP

#include <map>
#include <optional>
#include <string>

#include "saltv/bench.hpp"
#include "saltv/verifier.hpp"

namespace saltv::sim {

enum class Scheme : uint8_t { Saltv, Ecdsa, Tesla, Vast };
enum class AdversaryKind : uint8_t { None, Replay, Tamper, ForgeKey, RevokedSender };

const char* to_string(Scheme s);
std::optional<Scheme> scheme_from_string(const std::string& s);
const char* to_string(AdversaryKind a);
std::optional<AdversaryKind> adversary_from_string(const std::string& s);

struct ScenarioConfig {
    Scheme scheme = Scheme::Saltv;
    uint32_t vehicles = 100;
    double rate_hz = 10.0;
    uint32_t payload_bytes = 300;
    double duration_s = 10.0;
    double loss_rate = 0.0;
    uint8_t d = 2;   // disclosure delay, slots
    uint32_t r = 10; // BOOT / signature period, messages
    uint8_t w = 3;   // reveal bundling window
    uint16_t slot_ms = 10;
    uint32_t tw_ms = 2000;
    wire::Policy policy = wire::Policy::Normal;
    double anchor_hz = 1.0;
    uint64_t rng_seed = 0;
    bool rng_seed_set = false;
    uint32_t revoked_count = 0;
    double bloom_fpr = 0.01;
    uint32_t monitors = 0;  // receivers instrumented; 0 = every vehicle
    AdversaryKind adversary = AdversaryKind::None;
    double warmup_s = 1.0;
};

// Returns an error naming the offending field, or nullopt when valid.
std::optional<std::string> validate(const ScenarioConfig& cfg);

struct SchemeMetrics {
    // traffic accounting (frames broadcast once, delivered per monitor)
    uint64_t frames_data = 0, frames_boot = 0, frames_reveal = 0, frames_anchor = 0,
             frames_signed = 0;
    uint64_t bytes_data = 0, bytes_boot = 0, bytes_reveal = 0, bytes_anchor = 0,
             bytes_signed = 0;
    uint64_t deliveries_data = 0, dropped_by_loss = 0;
    uint64_t monitors_used = 0;

    // verdict accounting over delivered honest DATA frames
    uint64_t immediate_final = 0;       // confirmed or standing immediate auth
    uint64_t strong_final = 0;          // any strong auth (includes confirmed immediate)
    uint64_t immediate_unconfirmed = 0; // immediate, key never disclosed
    uint64_t retroactive_rejections = 0;
    uint64_t commitment_mismatches = 0;
    std::map<std::string, uint64_t> rejects_by_reason;

    uint64_t boots_accepted_full = 0, boots_refreshed = 0, boots_rejected = 0;

    // adversary accounting
    uint64_t attack_frames_injected = 0;
    uint64_t attack_frames_accepted = 0;  // attack frames ending authenticated
    uint64_t revoked_sender_deliveries = 0;
    uint64_t revoked_sender_immediate = 0;

    // derived metrics (post-warmup where applicable)
    double immediate_ratio = 0.0;
    double avg_auth_delay_ms = 0.0;
    double mean_disclosure_wait_ms = 0.0;  // analytic d * T_s
    double avg_frame_bytes = 0.0;          // all frames incl. infrastructure
    double per_message_bytes = 0.0;        // traffic bytes per payload message
    double avg_computation_ms = 0.0;       // benchmark-weighted model
    double per_receiver_cost_mean_us = 0.0;
    double per_receiver_cost_p95_us = 0.0;
    double f_boot_full = 0.0;  // fraction of messages paying the signature path
    verifier::OpCounts op_counts;

    size_t high_water_cache = 0, high_water_whitelist = 0, high_water_ledger = 0;

    std::vector<std::string> notes;
};

SchemeMetrics run(const ScenarioConfig& cfg, const bench::BenchTable& costs);

}  // namespace saltv::sim

#endif  // SALTV_SIM_HPP
