// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sender state machine: per-slot key material, DATA emission with per-slot
// counters, BOOT every r-th transmitted message (or on emergency), REVEAL
// of slot keys d slots after their slot with a bundling window of w, and
// periodic pseudonym rotation.
//
// One Sender per vehicle; callers own the state exclusively. Only slots
// that carried at least one DATA frame are queued for disclosure — a key
// for a silent slot authenticates nothing and is never requested.

#ifndef SALTV_OBU_HPP
#define SALTV_OBU_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include "saltv/wire.hpp"

namespace saltv::obu {

// Disclosure bookkeeping shared by the SALT-V sender and the TESLA-style
// baselines. Keys enter when their slot carries traffic; collect() emits
// the w consecutive keys ending at the newest due slot (deriving keys for
// silent slots on demand) and never discloses a slot twice.
class RevealQueue {
public:
    struct Window {
        uint32_t oldest_slot = 0;
        std::vector<crypto::MacKey> keys;
    };

    void push(uint32_t slot, const crypto::MacKey& key) { pending_.emplace_back(slot, key); }

    std::optional<Window> collect(uint32_t current_slot, uint32_t d, uint32_t w,
                                  const std::function<crypto::MacKey(uint32_t)>& derive);

    void clear() { pending_.clear(); }
    size_t pending_count() const { return pending_.size(); }
    uint64_t dropped_count() const { return dropped_; }

private:
    std::deque<std::pair<uint32_t, crypto::MacKey>> pending_;
    uint32_t last_revealed_ = 0;
    bool revealed_any_ = false;
    uint64_t dropped_ = 0;
};

struct SenderConfig {
    uint32_t domain_id = 1;
    uint16_t cell_id = 1;
    uint32_t boot_period = 10;     // r, counted in transmitted messages
    uint8_t disclosure_delay = 2;  // d, slots
    uint8_t reveal_window = 3;     // w, max keys per REVEAL
    uint16_t slot_len_ms = 10;
    uint64_t rotation_period_us = 600ull * 1'000'000;
    size_t max_payload = wire::kMaxPayload;
};

struct TxBundle {
    std::optional<wire::DataFrame> data;
    std::optional<wire::BootFrame> boot;
    std::optional<wire::RevealFrame> reveal;
};

class Sender {
public:
    Sender(const std::array<uint8_t, 32>& seed, std::vector<crypto::PseudonymRecord> batch,
           SenderConfig cfg);

    // Anchor-distributed parameters. A change of epoch re-derives the epoch
    // key and rotates the pseudonym.
    void adopt_epoch(uint32_t epoch, const wire::Sigma& sigma);

    // Advances to `slot` (strictly monotonic), deriving that slot's key
    // material and resetting the per-slot counter.
    void on_slot_tick(uint32_t slot);

    // Emits the DATA frame for the current slot, a BOOT when the cadence or
    // an emergency demands one, and any due REVEAL.
    TxBundle send_message(std::span<const uint8_t> payload, bool emergency = false);

    // Drains due slot keys (slot <= current - d) into a REVEAL frame.
    // Bundles at most w consecutive keys; keys that fell behind the window
    // are dropped and counted.
    std::optional<wire::RevealFrame> collect_reveal();

    void rotate_pseudonym();

    uint32_t current_slot() const { return current_slot_; }
    uint32_t slot_counter() const { return slot_counter_; }
    uint32_t epoch() const { return epoch_key_.epoch; }
    size_t pseudonym_index() const { return pseudonym_index_; }
    size_t pending_key_count() const { return reveal_queue_.pending_count(); }
    uint64_t dropped_key_count() const { return reveal_queue_.dropped_count(); }
    const wire::Est& est() const { return est_; }
    const crypto::PseudonymCert& cert() const { return batch_[pseudonym_index_].cert; }
    const keysched::SlotKeyMaterial& slot_material() const { return material_; }

private:
    void refresh_identity();
    uint64_t now_us() const {
        return static_cast<uint64_t>(current_slot_) * cfg_.slot_len_ms * 1000;
    }

    std::array<uint8_t, 32> seed_;
    std::vector<crypto::PseudonymRecord> batch_;
    SenderConfig cfg_;

    keysched::EpochKey epoch_key_{};
    wire::Sigma sigma_{};
    Bytes context_;
    bool epoch_adopted_ = false;

    size_t pseudonym_index_ = 0;
    wire::Est est_{};
    uint32_t psid_ = 0;
    uint64_t last_rotation_us_ = 0;

    bool ticked_ = false;
    uint32_t current_slot_ = 0;
    uint32_t slot_counter_ = 0;
    uint64_t message_index_ = 0;
    keysched::SlotKeyMaterial material_{};
    bool slot_enqueued_ = false;  // current slot already has a pending key

    RevealQueue reveal_queue_;
};

}  // namespace saltv::obu

#endif  // SALTV_OBU_HPP
