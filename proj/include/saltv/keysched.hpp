// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Epoch and slot key derivation plus the d-iterated hash commitments that
// bind disclosed MAC keys to previously broadcast frames. Intermediate
// chain values keep the full 32-byte digest; only the final commitment is
// truncated to 128 bits.

#ifndef SALTV_KEYSCHED_HPP
#define SALTV_KEYSCHED_HPP

#include <cstdint>
#include <span>

#include "saltv/crypto.hpp"

namespace saltv::keysched {

using crypto::MacKey;
using Commitment = std::array<uint8_t, 16>;

struct EpochKey {
    uint32_t epoch = 0;
    uint32_t domain_id = 0;
    MacKey key{};
    bool operator==(const EpochKey&) const = default;
};

// ek = HKDF(seed, "epoch" || e || domain_id), labels encoded verbatim,
// integers fixed-width big-endian.
EpochKey derive_epoch_key(std::span<const uint8_t, 32> seed, uint32_t epoch, uint32_t domain_id);

// Default slot-key context: cell_id || domain_id. Binding the key to the
// cell is what makes spatial replays fail the MAC check.
Bytes default_context(uint16_t cell_id, uint32_t domain_id);

// k_i = HKDF(ek, "slot" || i || context)
MacKey derive_slot_key(const EpochKey& ek, uint32_t slot, std::span<const uint8_t> context);

// c = Trunc128(H^(depth)(key)); depth >= 1
Commitment commit(const MacKey& key, unsigned depth);
bool verify_commitment(const MacKey& key, const Commitment& commitment, unsigned depth);

struct SlotKeyMaterial {
    uint32_t slot = 0;
    MacKey key{};
    Commitment commitment{};
    uint8_t depth = 0;
};

SlotKeyMaterial make_slot_material(const EpochKey& ek, uint32_t slot,
                                   std::span<const uint8_t> context, uint8_t depth);

}  // namespace saltv::keysched

#endif  // SALTV_KEYSCHED_HPP
