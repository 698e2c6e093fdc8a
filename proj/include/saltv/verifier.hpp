// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Receiver pipeline: ANCHOR adoption, BOOT verification (certificate ->
// revocation filter -> signature, in that order) feeding the EST whitelist,
// DATA buffering with replay defenses and immediate whitelist auth, and
// REVEAL processing that upgrades cached frames to strong authentication.
//
// Every delivered DATA frame produces exactly one terminal VerdictEvent:
// at rejection, at REVEAL audit, at gc expiry, or at finalize(). Frames
// marked immediately authenticated are still audited when their key is
// disclosed; a failed audit is a retroactive rejection.

#ifndef SALTV_VERIFIER_HPP
#define SALTV_VERIFIER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "saltv/revocation.hpp"
#include "saltv/wire.hpp"

namespace saltv::verifier {

enum class DataStatus : uint8_t { Pending, ImmediateAuth, StrongAuth, StrictHold, Rejected };

enum class Reason : uint8_t {
    None,
    NoAnchor,
    WrongCell,
    WrongEpoch,
    StaleSlot,
    FutureSlot,
    ReplayCounter,
    TagMismatch,
    Expired,
    StrictNoBoot,
    // baseline-scheme rejection reasons, sharing the same event vocabulary
    CertInvalid,
    SigInvalid,
    Revoked,
};

enum class BootVerdict : uint8_t {
    Accepted,
    AcceptedRefresh,  // fresh whitelist entry + known cert: signature work skipped
    NoAnchor,
    NoCompanion,
    CertInvalid,
    Revoked,  // fail-closed, includes filter false positives
    SigInvalid,
    DigestMismatch,
};

enum class AnchorVerdict : uint8_t { Adopted, AnchorRejected, AnchorStale };

const char* to_string(DataStatus s);
const char* to_string(Reason r);
const char* to_string(BootVerdict v);

// Crypto primitive invocations, for the benchmark-weighted cost model.
struct OpCounts {
    uint64_t sig_verify = 0;
    uint64_t cert_verify = 0;
    uint64_t gmac = 0;
    uint64_t sha256 = 0;
    uint64_t bloom_query = 0;

    OpCounts& operator+=(const OpCounts& o) {
        sig_verify += o.sig_verify;
        cert_verify += o.cert_verify;
        gmac += o.gmac;
        sha256 += o.sha256;
        bloom_query += o.bloom_query;
        return *this;
    }
};

struct VerdictEvent {
    uint64_t frame_id = 0;
    uint64_t received_at_us = 0;
    uint64_t finalized_at_us = 0;
    DataStatus status = DataStatus::Pending;
    Reason reason = Reason::None;
    bool was_immediate = false;
    bool retroactive_reject = false;
};

using VrfHook = std::function<bool(const wire::RevealFrame&)>;

struct ReceiverConfig {
    uint16_t cell_id = 1;
    uint64_t whitelist_ttl_us = 2'000'000;  // T_w
    uint8_t reveal_window = 3;              // w; sizes the cache/ledger window
    VrfHook vrf_hook;                       // empty = accept (no VRF scheme plugged in)
};

struct HighWater {
    size_t whitelist = 0;
    size_t cache_frames = 0;
    size_t ledger = 0;
};

class Receiver {
public:
    Receiver(const crypto::Point& ta_public, ReceiverConfig cfg);

    AnchorVerdict on_anchor(const wire::AnchorFrame& anchor, uint64_t now_us);
    BootVerdict on_boot(const wire::BootFrame& boot, const wire::DataFrame* companion,
                        uint64_t now_us);
    DataStatus on_data(const wire::DataFrame& frame, uint64_t now_us, uint64_t frame_id = 0);
    void on_reveal(const wire::RevealFrame& reveal, uint64_t now_us);

    // Drops expired whitelist entries and finalizes cache entries that fell
    // out of the d+w+1 slot window.
    void gc(uint64_t now_us);
    // End-of-run flush: every cached frame reaches its terminal status.
    void finalize(uint64_t now_us);

    std::vector<VerdictEvent> drain_events();

    bool anchor_adopted() const { return adopted_; }
    uint32_t epoch() const { return epoch_; }
    const wire::Sigma& sigma() const { return sigma_; }
    wire::Policy policy() const { return policy_; }
    uint8_t disclosure_delay() const { return d_; }
    const OpCounts& op_counts() const { return ops_; }
    const HighWater& high_water() const { return high_water_; }
    uint64_t data_frames_seen() const { return data_frames_seen_; }
    uint64_t commitment_mismatches() const { return commitment_mismatches_; }
    size_t whitelist_size() const { return whitelist_.size(); }
    size_t cached_frames() const;
    bool whitelisted(const wire::Est& est, uint64_t now_us) const;

private:
    struct CacheEntry {
        wire::DataFrame frame;
        uint64_t frame_id = 0;
        uint64_t received_at_us = 0;
        DataStatus status = DataStatus::Pending;
    };

    struct WhitelistEntry {
        uint64_t valid_until_us = 0;
        uint32_t psid = 0;
    };

    static uint64_t est_key(const wire::Est& est);
    uint32_t slot_at(uint64_t now_us) const {
        return static_cast<uint32_t>(now_us / (static_cast<uint64_t>(slot_len_ms_) * 1000));
    }
    uint32_t drift_slack_slots() const {
        return (2u * drift_bound_ms_ + slot_len_ms_ - 1) / slot_len_ms_;
    }
    void reset_epoch_state(uint64_t now_us);
    void reject(uint64_t frame_id, uint64_t now_us, Reason reason);
    void finalize_entry(CacheEntry& entry, uint64_t now_us);
    void audit_slot(uint32_t slot, const crypto::MacKey& key, uint64_t now_us);

    crypto::Point ta_public_;
    ReceiverConfig cfg_;

    // anchor-adopted parameters
    bool adopted_ = false;
    uint32_t epoch_ = 0;
    uint16_t slot_len_ms_ = 10;
    uint8_t d_ = 2;
    uint16_t drift_bound_ms_ = 10;
    wire::Sigma sigma_{};
    wire::Policy policy_ = wire::Policy::Normal;
    std::shared_ptr<const revocation::RevocationFilter> filter_;

    std::unordered_map<uint64_t, WhitelistEntry> whitelist_;
    std::unordered_set<uint32_t> had_boot_;
    std::unordered_map<uint32_t, crypto::CertBytes> verified_certs_;
    std::unordered_map<uint64_t, std::unordered_set<uint32_t>> ledger_;  // (psid,slot) -> counters
    std::map<uint32_t, std::vector<CacheEntry>> cache_;                  // slot -> frames

    std::vector<VerdictEvent> events_;
    OpCounts ops_;
    HighWater high_water_;
    uint64_t data_frames_seen_ = 0;
    uint64_t commitment_mismatches_ = 0;
    uint32_t last_gc_slot_ = 0;
};

}  // namespace saltv::verifier

#endif  // SALTV_VERIFIER_HPP
