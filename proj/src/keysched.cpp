// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/keysched.hpp"

#include <cstring>
#include <stdexcept>

namespace saltv::keysched {

namespace {
const char kEpochLabel[] = {'e', 'p', 'o', 'c', 'h'};
const char kSlotLabel[] = {'s', 'l', 'o', 't'};
}  // namespace

EpochKey derive_epoch_key(std::span<const uint8_t, 32> seed, uint32_t epoch, uint32_t domain_id) {
    ByteWriter info;
    info.raw(reinterpret_cast<const uint8_t*>(kEpochLabel), sizeof(kEpochLabel));
    info.u32(epoch);
    info.u32(domain_id);
    return EpochKey{epoch, domain_id, crypto::hkdf16(seed, info.bytes())};
}

Bytes default_context(uint16_t cell_id, uint32_t domain_id) {
    ByteWriter w;
    w.u16(cell_id);
    w.u32(domain_id);
    return w.take();
}

MacKey derive_slot_key(const EpochKey& ek, uint32_t slot, std::span<const uint8_t> context) {
    ByteWriter info;
    info.raw(reinterpret_cast<const uint8_t*>(kSlotLabel), sizeof(kSlotLabel));
    info.u32(slot);
    info.raw(context);
    return crypto::hkdf16(ek.key, info.bytes());
}

Commitment commit(const MacKey& key, unsigned depth) {
    if (depth < 1) throw std::invalid_argument("commit: depth must be >= 1");
    crypto::Hash chain = crypto::sha256(key);
    for (unsigned i = 1; i < depth; ++i) chain = crypto::sha256(chain);
    Commitment out{};
    std::memcpy(out.data(), chain.data(), out.size());
    return out;
}

bool verify_commitment(const MacKey& key, const Commitment& commitment, unsigned depth) {
    return commit(key, depth) == commitment;
}

SlotKeyMaterial make_slot_material(const EpochKey& ek, uint32_t slot,
                                   std::span<const uint8_t> context, uint8_t depth) {
    SlotKeyMaterial m;
    m.slot = slot;
    m.key = derive_slot_key(ek, slot, context);
    m.commitment = commit(m.key, depth);
    m.depth = depth;
    return m;
}

}  // namespace saltv::keysched
