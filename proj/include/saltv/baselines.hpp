// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations of the three comparison schemes:
//   ECDSA — per-message certificate + signature, immediate verdicts;
//   TESLA — pure delayed authentication via slot keys and disclosure;
//   VAST  — TESLA plus a signature on every r-th message, with no trust
//           carry-over between signed messages (its defining difference
//           from the whitelist scheme).
// All adapters reuse this artifact's codec primitives and emit the same
// VerdictEvent vocabulary so the simulator's metrics are scheme-agnostic.
//
// Layout notes: the TESLA data frame is the SALT-V DATA layout minus est,
// counter, and the frame-type byte (13 bytes); the ECDSA message is a
// 9-byte header plus payload, certificate, and signature.

#ifndef SALTV_BASELINES_HPP
#define SALTV_BASELINES_HPP

#include <map>

#include "saltv/obu.hpp"
#include "saltv/verifier.hpp"

namespace saltv::baselines {

using keysched::Commitment;
using verifier::DataStatus;
using verifier::OpCounts;
using verifier::Reason;
using verifier::VerdictEvent;

// ---------------------------------------------------------------- frames

struct EcdsaFrame {
    uint32_t epoch = 0;
    uint32_t slot = 0;
    Bytes payload;
    crypto::PseudonymCert cert;
    crypto::Signature signature{};
    bool operator==(const EcdsaFrame&) const = default;
};

struct TeslaDataFrame {
    uint32_t epoch = 0;
    uint32_t slot = 0;
    uint16_t cell_id = 0;
    uint32_t psid = 0;
    Commitment commitment{};
    crypto::Iv iv{};
    crypto::MacTag tag{};
    Bytes payload;
    bool operator==(const TeslaDataFrame&) const = default;
};

struct TeslaRevealFrame {
    uint32_t epoch = 0;
    uint32_t oldest_slot = 0;
    std::vector<crypto::MacKey> keys;
    bool operator==(const TeslaRevealFrame&) const = default;
};

struct VastSignedFrame {
    TeslaDataFrame data;
    crypto::PseudonymCert cert;
    crypto::Signature signature{};
    bool operator==(const VastSignedFrame&) const = default;
};

Bytes encode(const EcdsaFrame& f);
Bytes encode(const TeslaDataFrame& f);
Bytes encode(const TeslaRevealFrame& f);
Bytes encode(const VastSignedFrame& f);
std::optional<EcdsaFrame> decode_ecdsa(std::span<const uint8_t> bytes);
std::optional<TeslaDataFrame> decode_tesla_data(std::span<const uint8_t> bytes);
std::optional<TeslaRevealFrame> decode_tesla_reveal(std::span<const uint8_t> bytes);
std::optional<VastSignedFrame> decode_vast_signed(std::span<const uint8_t> bytes);

crypto::Hash ecdsa_digest(uint32_t epoch, uint32_t slot, std::span<const uint8_t> payload);
crypto::Hash vast_digest(const TeslaDataFrame& data);

// ---------------------------------------------------------------- senders

struct TeslaSenderConfig {
    uint32_t domain_id = 1;
    uint16_t cell_id = 1;
    uint8_t disclosure_delay = 2;
    uint8_t reveal_window = 3;
};

class TeslaSender {
public:
    TeslaSender(const std::array<uint8_t, 32>& seed, TeslaSenderConfig cfg);

    void adopt_epoch(uint32_t epoch);
    void on_slot_tick(uint32_t slot);
    TeslaDataFrame make_data(std::span<const uint8_t> payload);
    std::optional<TeslaRevealFrame> collect_reveal();

    uint32_t psid() const { return psid_; }
    uint32_t current_slot() const { return current_slot_; }
    const keysched::SlotKeyMaterial& slot_material() const { return material_; }

private:
    std::array<uint8_t, 32> seed_;
    TeslaSenderConfig cfg_;
    Bytes context_;
    keysched::EpochKey epoch_key_{};
    uint32_t psid_ = 0;

    bool ticked_ = false;
    uint32_t current_slot_ = 0;
    uint32_t seq_in_slot_ = 0;
    bool slot_enqueued_ = false;
    keysched::SlotKeyMaterial material_{};
    obu::RevealQueue reveal_queue_;
};

class EcdsaSender {
public:
    EcdsaSender(crypto::PseudonymRecord identity) : identity_(std::move(identity)) {}
    EcdsaFrame make_message(uint32_t epoch, uint32_t slot, std::span<const uint8_t> payload) const;

private:
    crypto::PseudonymRecord identity_;
};

struct VastBundle {
    std::optional<TeslaDataFrame> data;          // unsigned messages
    std::optional<VastSignedFrame> signed_data;  // every r-th message
    std::optional<TeslaRevealFrame> reveal;
};

class VastSender {
public:
    VastSender(const std::array<uint8_t, 32>& seed, crypto::PseudonymRecord identity,
               uint32_t sign_period, TeslaSenderConfig cfg);

    void adopt_epoch(uint32_t epoch) { core_.adopt_epoch(epoch); }
    void on_slot_tick(uint32_t slot) { core_.on_slot_tick(slot); }
    VastBundle send_message(std::span<const uint8_t> payload);
    std::optional<TeslaRevealFrame> collect_reveal() { return core_.collect_reveal(); }

private:
    TeslaSender core_;
    crypto::PseudonymRecord identity_;
    uint32_t sign_period_;
    uint64_t message_index_ = 0;
};

// -------------------------------------------------------------- receivers

class EcdsaReceiver {
public:
    EcdsaReceiver(const crypto::Point& ta_public,
                  std::shared_ptr<const revocation::RevocationFilter> filter = nullptr,
                  wire::Sigma sigma = {});

    DataStatus receive(const EcdsaFrame& frame, uint64_t now_us, uint64_t frame_id);
    std::vector<VerdictEvent> drain_events();
    const OpCounts& op_counts() const { return ops_; }
    uint64_t data_frames_seen() const { return seen_; }

private:
    crypto::Point ta_public_;
    std::shared_ptr<const revocation::RevocationFilter> filter_;
    wire::Sigma sigma_{};
    OpCounts ops_;
    std::vector<VerdictEvent> events_;
    uint64_t seen_ = 0;
};

struct TeslaReceiverConfig {
    uint16_t cell_id = 1;
    uint8_t disclosure_delay = 2;
    uint8_t reveal_window = 3;
    uint16_t slot_len_ms = 10;
    uint32_t epoch = 0;
};

class TeslaReceiver {
public:
    explicit TeslaReceiver(TeslaReceiverConfig cfg) : cfg_(cfg) {}

    DataStatus on_data(const TeslaDataFrame& frame, uint64_t now_us, uint64_t frame_id);
    void on_reveal(const TeslaRevealFrame& reveal, uint64_t now_us);
    void gc(uint64_t now_us);
    void finalize(uint64_t now_us);

    std::vector<VerdictEvent> drain_events();
    const OpCounts& op_counts() const { return ops_; }
    uint64_t data_frames_seen() const { return seen_; }
    uint64_t commitment_mismatches() const { return commitment_mismatches_; }
    size_t cached_frames() const;
    size_t cache_high_water() const { return cache_high_water_; }

private:
    struct CacheEntry {
        TeslaDataFrame frame;
        uint64_t frame_id = 0;
        uint64_t received_at_us = 0;
    };

    uint32_t slot_at(uint64_t now_us) const {
        return static_cast<uint32_t>(now_us / (static_cast<uint64_t>(cfg_.slot_len_ms) * 1000));
    }

    TeslaReceiverConfig cfg_;
    std::map<uint32_t, std::vector<CacheEntry>> cache_;
    std::vector<VerdictEvent> events_;
    OpCounts ops_;
    uint64_t seen_ = 0;
    uint64_t commitment_mismatches_ = 0;
    size_t cache_high_water_ = 0;
};

class VastReceiver {
public:
    VastReceiver(const crypto::Point& ta_public, TeslaReceiverConfig cfg)
        : ta_public_(ta_public), core_(cfg) {}

    DataStatus on_data(const TeslaDataFrame& frame, uint64_t now_us, uint64_t frame_id) {
        return core_.on_data(frame, now_us, frame_id);
    }
    DataStatus on_signed(const VastSignedFrame& frame, uint64_t now_us, uint64_t frame_id);
    void on_reveal(const TeslaRevealFrame& reveal, uint64_t now_us) {
        core_.on_reveal(reveal, now_us);
    }
    void finalize(uint64_t now_us) { core_.finalize(now_us); }

    std::vector<VerdictEvent> drain_events();
    OpCounts op_counts() const {
        OpCounts total = core_.op_counts();
        total += ops_;
        return total;
    }
    uint64_t data_frames_seen() const { return core_.data_frames_seen() + signed_seen_; }

private:
    crypto::Point ta_public_;
    TeslaReceiver core_;
    OpCounts ops_;
    std::vector<VerdictEvent> events_;
    uint64_t signed_seen_ = 0;
};

}  // namespace saltv::baselines

#endif  // SALTV_BASELINES_HPP
