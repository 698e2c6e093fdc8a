// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/rsu.hpp"

#include <algorithm>

namespace saltv::rsu {

uint32_t TimeModel::slot_of(uint64_t wall_us, int32_t drift_ms) const {
    int32_t bound = static_cast<int32_t>(drift_bound_ms);
    int64_t drift_us = static_cast<int64_t>(std::clamp(drift_ms, -bound, bound)) * 1000;
    int64_t t = static_cast<int64_t>(wall_us) + drift_us;
    if (t < 0) t = 0;
    return static_cast<uint32_t>(t / (static_cast<int64_t>(slot_len_ms) * 1000));
}

uint32_t TimeModel::epoch_of(uint64_t wall_us) const {
    return static_cast<uint32_t>(wall_us / (static_cast<uint64_t>(epoch_len_s) * 1'000'000));
}

Rsu::Rsu(const crypto::SigningKeyPair& ta, crypto::Validity cert_validity, crypto::Drbg& rng) {
    keys_ = crypto::generate_keypair(rng);
    crypto::SigningKeyPair secondary = crypto::generate_keypair(rng);
    cert_ = crypto::issue_cert(keys_.public_point, secondary.public_point, cert_validity,
                               ta.secret_scalar);
}

wire::AnchorFrame Rsu::build_anchor(const revocation::RevocationFilter& filter,
                                    const AnchorParams& params, uint64_t now_us) const {
    wire::AnchorFrame a;
    a.timestamp_us = now_us;
    a.epoch = params.time.epoch_of(now_us);
    a.slot_len_ms = params.time.slot_len_ms;
    a.disclosure_delay = params.disclosure_delay;
    a.drift_bound_ms = params.time.drift_bound_ms;
    a.sigma = params.sigma;
    a.policy = params.policy;
    a.validity_start_us = now_us;
    a.validity_end_us = now_us + params.validity_len_us;
    a.filter_bytes = filter.serialize();
    a.rsu_cert = cert_;
    a.rsu_signature = crypto::sign(keys_.secret_scalar, wire::anchor_signing_bytes(a));
    return a;
}

}  // namespace saltv::rsu
