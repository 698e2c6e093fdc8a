// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Infrastructure side: the slotted time model with bounded per-vehicle
// drift, and periodic construction of signed ANCHOR frames carrying the
// epoch salt and the revocation filter.

#ifndef SALTV_RSU_HPP
#define SALTV_RSU_HPP

#include <cstdint>

#include "saltv/revocation.hpp"
#include "saltv/wire.hpp"

namespace saltv::rsu {

struct TimeModel {
    uint16_t slot_len_ms = 10;     // T_s
    uint32_t epoch_len_s = 3600;   // epochs rotate hourly
    uint16_t drift_bound_ms = 10;  // Delta_sync

    // slot(t) = floor((t + drift) / T_s); drift is clamped to the sync bound
    uint32_t slot_of(uint64_t wall_us, int32_t drift_ms = 0) const;
    uint32_t epoch_of(uint64_t wall_us) const;
    uint64_t slot_start_us(uint32_t slot) const {
        return static_cast<uint64_t>(slot) * slot_len_ms * 1000;
    }
    // worst-case slot-index disagreement between two in-sync parties
    uint32_t max_slot_disagreement() const {
        return (2u * drift_bound_ms + slot_len_ms - 1) / slot_len_ms;
    }
};

struct AnchorParams {
    TimeModel time;
    wire::Sigma sigma{};
    wire::Policy policy = wire::Policy::Normal;
    uint8_t disclosure_delay = 2;       // d
    uint64_t validity_len_us = 2'000'000;
};

class Rsu {
public:
    // Keys and certificate are issued against the TA at construction.
    Rsu(const crypto::SigningKeyPair& ta, crypto::Validity cert_validity, crypto::Drbg& rng);

    wire::AnchorFrame build_anchor(const revocation::RevocationFilter& filter,
                                   const AnchorParams& params, uint64_t now_us) const;

    const crypto::PseudonymCert& cert() const { return cert_; }

private:
    crypto::SigningKeyPair keys_;
    crypto::PseudonymCert cert_;
};

}  // namespace saltv::rsu

#endif  // SALTV_RSU_HPP
