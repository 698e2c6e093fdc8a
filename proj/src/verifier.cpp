// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/verifier.hpp"

#include <algorithm>
#include <cstring>

#include "saltv/keysched.hpp"

namespace saltv::verifier {

const char* to_string(DataStatus s) {
    switch (s) {
        case DataStatus::Pending: return "pending";
        case DataStatus::ImmediateAuth: return "immediate_auth";
        case DataStatus::StrongAuth: return "strong_auth";
        case DataStatus::StrictHold: return "strict_hold";
        case DataStatus::Rejected: return "rejected";
    }
    return "?";
}

const char* to_string(Reason r) {
    switch (r) {
        case Reason::None: return "none";
        case Reason::NoAnchor: return "no_anchor";
        case Reason::WrongCell: return "wrong_cell";
        case Reason::WrongEpoch: return "wrong_epoch";
        case Reason::StaleSlot: return "stale_slot";
        case Reason::FutureSlot: return "future_slot";
        case Reason::ReplayCounter: return "replay_counter";
        case Reason::TagMismatch: return "tag_mismatch";
        case Reason::Expired: return "expired";
        case Reason::StrictNoBoot: return "strict_no_boot";
        case Reason::CertInvalid: return "cert_invalid";
        case Reason::SigInvalid: return "sig_invalid";
        case Reason::Revoked: return "revoked";
    }
    return "?";
}

const char* to_string(BootVerdict v) {
    switch (v) {
        case BootVerdict::Accepted: return "accepted";
        case BootVerdict::AcceptedRefresh: return "accepted_refresh";
        case BootVerdict::NoAnchor: return "no_anchor";
        case BootVerdict::NoCompanion: return "no_companion";
        case BootVerdict::CertInvalid: return "cert_invalid";
        case BootVerdict::Revoked: return "revoked";
        case BootVerdict::SigInvalid: return "sig_invalid";
        case BootVerdict::DigestMismatch: return "digest_mismatch";
    }
    return "?";
}

Receiver::Receiver(const crypto::Point& ta_public, ReceiverConfig cfg)
    : ta_public_(ta_public), cfg_(cfg) {}

uint64_t Receiver::est_key(const wire::Est& est) {
    uint64_t k = 0;
    for (uint8_t b : est) k = k << 8 | b;
    return k;
}

size_t Receiver::cached_frames() const {
    size_t n = 0;
    for (const auto& [slot, entries] : cache_) n += entries.size();
    return n;
}

bool Receiver::whitelisted(const wire::Est& est, uint64_t now_us) const {
    auto it = whitelist_.find(est_key(est));
    return it != whitelist_.end() && now_us < it->second.valid_until_us;
}

void Receiver::reset_epoch_state(uint64_t now_us) {
    whitelist_.clear();
    had_boot_.clear();
    verified_certs_.clear();
    ledger_.clear();
    for (auto& [slot, entries] : cache_) {
        for (auto& e : entries) finalize_entry(e, now_us);
    }
    cache_.clear();
}

AnchorVerdict Receiver::on_anchor(const wire::AnchorFrame& anchor, uint64_t now_us) {
    auto filter = revocation::RevocationFilter::deserialize(anchor.filter_bytes);
    if (!filter) return AnchorVerdict::AnchorRejected;

    ++ops_.cert_verify;
    uint64_t now_s = now_us / 1'000'000;
    if (!crypto::verify_cert(anchor.rsu_cert, ta_public_) ||
        now_s < anchor.rsu_cert.validity.start || now_s >= anchor.rsu_cert.validity.end) {
        return AnchorVerdict::AnchorRejected;
    }
    ++ops_.sig_verify;
    ++ops_.sha256;
    if (!crypto::verify(anchor.rsu_cert.pk_p, wire::anchor_signing_bytes(anchor),
                        anchor.rsu_signature)) {
        return AnchorVerdict::AnchorRejected;
    }
    if (now_us < anchor.validity_start_us || now_us > anchor.validity_end_us) {
        return AnchorVerdict::AnchorStale;
    }

    bool context_changed = adopted_ && (anchor.epoch != epoch_ || anchor.sigma != sigma_);
    if (context_changed) reset_epoch_state(now_us);

    adopted_ = true;
    epoch_ = anchor.epoch;
    slot_len_ms_ = anchor.slot_len_ms == 0 ? 10 : anchor.slot_len_ms;
    d_ = anchor.disclosure_delay == 0 ? 1 : anchor.disclosure_delay;
    drift_bound_ms_ = anchor.drift_bound_ms;
    sigma_ = anchor.sigma;
    policy_ = anchor.policy;
    filter_ = std::make_shared<const revocation::RevocationFilter>(std::move(*filter));
    return AnchorVerdict::Adopted;
}

BootVerdict Receiver::on_boot(const wire::BootFrame& boot, const wire::DataFrame* companion,
                              uint64_t now_us) {
    if (!adopted_) return BootVerdict::NoAnchor;
    if (!companion) return BootVerdict::NoCompanion;

    uint32_t psid = wire::compute_psid(boot.cert);
    ++ops_.sha256;
    wire::Est est = wire::compute_est(boot.cert.pk_v, sigma_, epoch_);
    ++ops_.sha256;
    uint64_t wkey = est_key(est);
    crypto::CertBytes cert_bytes = crypto::encode_cert(boot.cert);
    uint64_t now_s = now_us / 1'000'000;
    bool cert_in_window =
        now_s >= boot.cert.validity.start && now_s < boot.cert.validity.end;

    // Fast refresh: a live whitelist entry whose certificate already passed
    // full verification only needs the revocation and binding checks. This
    // is what keeps steady-state per-message cost near the MAC-only floor.
    auto wit = whitelist_.find(wkey);
    bool fresh = wit != whitelist_.end() && now_us < wit->second.valid_until_us;
    auto vit = verified_certs_.find(psid);
    bool known_cert = vit != verified_certs_.end() &&
                      std::memcmp(vit->second.data(), cert_bytes.data(), cert_bytes.size()) == 0;

    if (!(fresh && known_cert && cert_in_window)) {
        ++ops_.cert_verify;
        if (!cert_in_window || !crypto::verify_cert(boot.cert, ta_public_)) {
            return BootVerdict::CertInvalid;
        }
    }

    ++ops_.sha256;
    ++ops_.bloom_query;
    revocation::RevocationId rid = revocation::derive_rid(boot.cert.pk_v, sigma_);
    if (filter_ && filter_->contains(rid)) {
        return BootVerdict::Revoked;  // fail-closed, signature never checked
    }

    bool refresh = fresh && known_cert && cert_in_window;
    if (!refresh) {
        ++ops_.sig_verify;
        ++ops_.sha256;
        if (!crypto::verify(boot.cert.pk_p, boot.digest, boot.signature)) {
            return BootVerdict::SigInvalid;
        }
    }

    ++ops_.sha256;
    crypto::Hash recomputed = wire::boot_digest(companion->payload, companion->commitment,
                                                companion->tag, companion->iv);
    if (recomputed != boot.digest) return BootVerdict::DigestMismatch;

    whitelist_[wkey] = WhitelistEntry{now_us + cfg_.whitelist_ttl_us, psid};
    had_boot_.insert(psid);
    verified_certs_[psid] = cert_bytes;
    high_water_.whitelist = std::max(high_water_.whitelist, whitelist_.size());
    return refresh ? BootVerdict::AcceptedRefresh : BootVerdict::Accepted;
}

void Receiver::reject(uint64_t frame_id, uint64_t now_us, Reason reason) {
    events_.push_back(VerdictEvent{frame_id, now_us, now_us, DataStatus::Rejected, reason,
                                   false, false});
}

DataStatus Receiver::on_data(const wire::DataFrame& frame, uint64_t now_us, uint64_t frame_id) {
    ++data_frames_seen_;
    if (!adopted_) {
        reject(frame_id, now_us, Reason::NoAnchor);
        return DataStatus::Rejected;
    }
    const wire::Meta& meta = frame.meta;
    if (meta.cell_id != cfg_.cell_id) {
        reject(frame_id, now_us, Reason::WrongCell);
        return DataStatus::Rejected;
    }
    if (meta.epoch != epoch_) {
        reject(frame_id, now_us, Reason::WrongEpoch);
        return DataStatus::Rejected;
    }
    uint64_t current = slot_at(now_us);
    if (static_cast<uint64_t>(meta.slot) > current + drift_slack_slots()) {
        reject(frame_id, now_us, Reason::FutureSlot);
        return DataStatus::Rejected;
    }
    // Claims older than w-1 slots can never be audited (reveal windows end
    // at the due slot and reach back w keys), so they are rejected outright;
    // this is also what stops cross-slot replays outside the ledger window.
    uint64_t accept_back = cfg_.reveal_window - 1;
    if (static_cast<uint64_t>(meta.slot) + accept_back < current) {
        reject(frame_id, now_us, Reason::StaleSlot);
        return DataStatus::Rejected;
    }
    // replay ledger before any whitelist work, so floods of duplicates are cheap
    uint64_t lkey = static_cast<uint64_t>(meta.psid) << 32 | meta.slot;
    auto& counters = ledger_[lkey];
    if (!counters.insert(meta.counter).second) {
        reject(frame_id, now_us, Reason::ReplayCounter);
        return DataStatus::Rejected;
    }
    high_water_.ledger = std::max(high_water_.ledger, ledger_.size());

    CacheEntry entry;
    entry.frame = frame;
    entry.frame_id = frame_id;
    entry.received_at_us = now_us;
    entry.status = whitelisted(meta.est, now_us) ? DataStatus::ImmediateAuth : DataStatus::Pending;
    DataStatus status = entry.status;
    cache_[meta.slot].push_back(std::move(entry));

    size_t cached = cached_frames();
    high_water_.cache_frames = std::max(high_water_.cache_frames, cached);
    gc(now_us);
    return status;
}

void Receiver::audit_slot(uint32_t slot, const crypto::MacKey& key, uint64_t now_us) {
    auto cit = cache_.find(slot);
    if (cit == cache_.end()) return;

    keysched::Commitment c = keysched::commit(key, d_);
    ops_.sha256 += d_;

    bool matched_any = false;
    auto& entries = cit->second;
    for (auto& e : entries) {
        if (e.status == DataStatus::Rejected || e.status == DataStatus::StrongAuth) continue;
        if (e.frame.commitment != c) continue;  // not this sender's frame
        matched_any = true;

        ++ops_.gmac;
        crypto::MacTag tag = crypto::gmac(key, e.frame.iv, wire::encode_meta(e.frame.meta),
                                          e.frame.payload);
        bool was_immediate = e.status == DataStatus::ImmediateAuth;
        if (tag != e.frame.tag) {
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::Rejected, Reason::TagMismatch,
                                           was_immediate, was_immediate});
            e.status = DataStatus::Rejected;
            continue;
        }
        if (policy_ == wire::Policy::Strict && !had_boot_.count(e.frame.meta.psid)) {
            e.status = DataStatus::StrictHold;  // authenticated but not finally accepted
            continue;
        }
        events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                       DataStatus::StrongAuth, Reason::None, was_immediate,
                                       false});
        e.status = DataStatus::StrongAuth;
    }
    if (!matched_any) ++commitment_mismatches_;

    std::erase_if(entries, [](const CacheEntry& e) {
        return e.status == DataStatus::Rejected || e.status == DataStatus::StrongAuth;
    });
    if (entries.empty()) cache_.erase(cit);
}

void Receiver::on_reveal(const wire::RevealFrame& reveal, uint64_t now_us) {
    if (!adopted_) return;
    if (reveal.epoch != epoch_) return;
    if (reveal.keys.empty() || reveal.keys.size() > wire::kMaxRevealKeys) return;
    if (!reveal.vrf_blob.empty() && cfg_.vrf_hook && !cfg_.vrf_hook(reveal)) return;

    for (size_t j = 0; j < reveal.keys.size(); ++j) {
        audit_slot(reveal.oldest_slot + static_cast<uint32_t>(j), reveal.keys[j], now_us);
    }
    gc(now_us);
}

void Receiver::finalize_entry(CacheEntry& e, uint64_t now_us) {
    switch (e.status) {
        case DataStatus::Pending:
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::Rejected, Reason::Expired, false, false});
            break;
        case DataStatus::StrictHold:
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::Rejected, Reason::StrictNoBoot, false,
                                           false});
            break;
        case DataStatus::ImmediateAuth:
            // no REVEAL ever confirmed it; stands as immediately authenticated
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::ImmediateAuth, Reason::None, true, false});
            break;
        default:
            break;
    }
    e.status = DataStatus::Rejected;  // entry is being evicted either way
}

void Receiver::gc(uint64_t now_us) {
    uint64_t current = slot_at(now_us);
    uint64_t window = static_cast<uint64_t>(d_) + cfg_.reveal_window + 1;

    // eastmost cache buckets age out first; this loop is amortized O(1)
    while (!cache_.empty()) {
        auto it = cache_.begin();
        if (it->first + window >= current) break;
        for (auto& e : it->second) finalize_entry(e, now_us);
        cache_.erase(it);
    }

    // full map sweeps only when the slot index advances
    if (current != last_gc_slot_) {
        last_gc_slot_ = static_cast<uint32_t>(current);
        std::erase_if(whitelist_,
                      [&](const auto& kv) { return kv.second.valid_until_us <= now_us; });
        std::erase_if(ledger_, [&](const auto& kv) {
            uint64_t slot = kv.first & 0xffffffffu;
            return slot + window < current;
        });
    }
}

void Receiver::finalize(uint64_t now_us) {
    for (auto& [slot, entries] : cache_) {
        for (auto& e : entries) finalize_entry(e, now_us);
    }
    cache_.clear();
}

std::vector<VerdictEvent> Receiver::drain_events() {
    std::vector<VerdictEvent> out;
    out.swap(events_);
    return out;
}

}  // namespace saltv::verifier
