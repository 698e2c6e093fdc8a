// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Canonical byte layouts for the four broadcast frames. All integers are
// fixed-width big-endian; decode is total (any buffer either yields exactly
// one frame or nullopt) and rejects trailing bytes.
//
//   DATA   = 0x01 | meta(26) | commitment(16) | iv(12) | tag(12) | len u16 | payload
//   BOOT   = 0x02 | epoch u32 | slot u32 | digest(32) | cert(146) | sig(64)
//   REVEAL = 0x03 | epoch u32 | oldest u32 | w u8 | keys w*16 | vrf_len u16 | vrf
//   ANCHOR = 0x04 | ts u64 | epoch u32 | slot_ms u16 | d u8 | drift u16 | sigma(16)
//            | policy u8 | start u64 | end u64 | filter(SVBF..) | cert(146) | sig(64)

#ifndef SALTV_WIRE_HPP
#define SALTV_WIRE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "saltv/crypto.hpp"
#include "saltv/keysched.hpp"

namespace saltv::wire {

using crypto::Hash;
using crypto::Iv;
using crypto::MacKey;
using crypto::MacTag;
using crypto::Point;
using crypto::PseudonymCert;
using crypto::Signature;
using keysched::Commitment;

using Est = std::array<uint8_t, 8>;
using Sigma = std::array<uint8_t, 16>;

enum class FrameType : uint8_t { Data = 1, Boot = 2, Reveal = 3, Anchor = 4 };
enum class Policy : uint8_t { Normal = 0, Strict = 1 };

inline constexpr size_t kMetaLen = 26;
inline constexpr size_t kMaxPayload = 2048;
inline constexpr size_t kMaxRevealKeys = 8;
// DATA overhead beyond the plain TESLA layout: est(8) + counter(4) + type(1)
inline constexpr size_t kSaltvExtraBytes = 13;

struct Meta {
    uint32_t epoch = 0;
    uint32_t slot = 0;
    uint16_t cell_id = 0;
    uint32_t counter = 0;  // per-slot monotonic, starts at 0
    uint32_t psid = 0;     // Trunc32(H(cert)) pseudonym hint
    Est est{};
    bool operator==(const Meta&) const = default;
};

struct DataFrame {
    Meta meta;
    Commitment commitment{};
    Iv iv{};
    MacTag tag{};
    Bytes payload;
    bool operator==(const DataFrame&) const = default;
};

struct BootFrame {
    uint32_t epoch = 0;
    uint32_t slot = 0;  // slot of the companion DATA frame
    Hash digest{};      // L = H(payload || c_i || tag || iv)
    PseudonymCert cert;
    Signature signature{};
    bool operator==(const BootFrame&) const = default;
};

struct RevealFrame {
    uint32_t epoch = 0;
    uint32_t oldest_slot = 0;
    std::vector<MacKey> keys;  // slots oldest_slot .. oldest_slot + keys.size() - 1
    Bytes vrf_blob;            // opaque; empty unless a VRF scheme is plugged in
    bool operator==(const RevealFrame&) const = default;
};

struct AnchorFrame {
    uint64_t timestamp_us = 0;
    uint32_t epoch = 0;
    uint16_t slot_len_ms = 10;
    uint8_t disclosure_delay = 2;
    uint16_t drift_bound_ms = 10;
    Sigma sigma{};
    Policy policy = Policy::Normal;
    uint64_t validity_start_us = 0;
    uint64_t validity_end_us = 0;
    Bytes filter_bytes;  // serialized RevocationFilter
    PseudonymCert rsu_cert;
    Signature rsu_signature{};
    bool operator==(const AnchorFrame&) const = default;
};

using Frame = std::variant<DataFrame, BootFrame, RevealFrame, AnchorFrame>;

Bytes encode_meta(const Meta& meta);
Bytes encode(const DataFrame& f);
Bytes encode(const BootFrame& f);
Bytes encode(const RevealFrame& f);
Bytes encode(const AnchorFrame& f);
Bytes encode(const Frame& f);

std::optional<Frame> decode(std::span<const uint8_t> bytes);

// Bytes covered by the RSU signature: the whole encoding minus the
// trailing 64 signature bytes.
Bytes anchor_signing_bytes(const AnchorFrame& f);

// IV = Trunc96(H(e || i || counter || est))
Iv compute_iv(uint32_t epoch, uint32_t slot, uint32_t counter, const Est& est);
// est = Trunc64(H(pk_v || sigma || e))
Est compute_est(const Point& pk_v, const Sigma& sigma, uint32_t epoch);
// psid = Trunc32(H(encoded cert))
uint32_t compute_psid(const PseudonymCert& cert);
// L = H(payload || c_i || tag || iv)
Hash boot_digest(std::span<const uint8_t> payload, const Commitment& c, const MacTag& tag,
                 const Iv& iv);

}  // namespace saltv::wire

#endif  // SALTV_WIRE_HPP
