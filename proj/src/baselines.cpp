// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/baselines.hpp"

namespace saltv::baselines {

namespace {

void write_tesla_header(ByteWriter& w, const TeslaDataFrame& f) {
    w.u32(f.epoch);
    w.u32(f.slot);
    w.u16(f.cell_id);
    w.u32(f.psid);
    w.raw(f.commitment);
    w.raw(f.iv);
    w.raw(f.tag);
    w.u16(static_cast<uint16_t>(f.payload.size()));
    w.raw(f.payload);
}

std::optional<TeslaDataFrame> read_tesla_data(ByteReader& r) {
    TeslaDataFrame f;
    f.epoch = r.u32();
    f.slot = r.u32();
    f.cell_id = r.u16();
    f.psid = r.u32();
    f.commitment = r.arr<16>();
    f.iv = r.arr<12>();
    f.tag = r.arr<12>();
    uint16_t len = r.u16();
    if (!r.ok() || len > wire::kMaxPayload) return std::nullopt;
    f.payload = r.bytes(len);
    if (!r.ok()) return std::nullopt;
    return f;
}

// the GMAC additional data binds epoch, slot, cell, and sender hint
Bytes tesla_aad(const TeslaDataFrame& f) {
    ByteWriter w;
    w.u32(f.epoch);
    w.u32(f.slot);
    w.u16(f.cell_id);
    w.u32(f.psid);
    return w.take();
}

}  // namespace

Bytes encode(const EcdsaFrame& f) {
    ByteWriter w;
    w.u8(0x11);
    w.u32(f.epoch);
    w.u32(f.slot);
    w.raw(f.payload);  // length implied by framing: total - header - cert - sig
    w.raw(crypto::encode_cert(f.cert));
    w.raw(f.signature);
    return w.take();
}

std::optional<EcdsaFrame> decode_ecdsa(std::span<const uint8_t> bytes) {
    constexpr size_t kFixed = 9 + crypto::kCertLen + crypto::kSigLen;
    if (bytes.size() < kFixed || bytes[0] != 0x11) return std::nullopt;
    ByteReader r(bytes);
    EcdsaFrame f;
    r.u8();
    f.epoch = r.u32();
    f.slot = r.u32();
    f.payload = r.bytes(bytes.size() - kFixed);
    auto cert = crypto::decode_cert(r.view(crypto::kCertLen));
    if (!r.ok() || !cert) return std::nullopt;
    f.cert = *cert;
    f.signature = r.arr<64>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return f;
}

Bytes encode(const TeslaDataFrame& f) {
    ByteWriter w;
    write_tesla_header(w, f);
    return w.take();
}

std::optional<TeslaDataFrame> decode_tesla_data(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    auto f = read_tesla_data(r);
    if (!f || r.remaining() != 0) return std::nullopt;
    return f;
}

Bytes encode(const TeslaRevealFrame& f) {
    ByteWriter w;
    w.u32(f.epoch);
    w.u32(f.oldest_slot);
    w.u8(static_cast<uint8_t>(f.keys.size()));
    for (const auto& k : f.keys) w.raw(k);
    return w.take();
}

std::optional<TeslaRevealFrame> decode_tesla_reveal(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    TeslaRevealFrame f;
    f.epoch = r.u32();
    f.oldest_slot = r.u32();
    uint8_t count = r.u8();
    if (!r.ok() || count < 1 || count > wire::kMaxRevealKeys) return std::nullopt;
    for (unsigned i = 0; i < count; ++i) f.keys.push_back(r.arr<16>());
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return f;
}

Bytes encode(const VastSignedFrame& f) {
    ByteWriter w;
    write_tesla_header(w, f.data);
    w.raw(crypto::encode_cert(f.cert));
    w.raw(f.signature);
    return w.take();
}

std::optional<VastSignedFrame> decode_vast_signed(std::span<const uint8_t> bytes) {
    if (bytes.size() < crypto::kCertLen + crypto::kSigLen) return std::nullopt;
    size_t split = bytes.size() - crypto::kCertLen - crypto::kSigLen;
    ByteReader r(bytes);
    VastSignedFrame f;
    auto data = read_tesla_data(r);
    if (!data || r.position() != split) return std::nullopt;
    f.data = std::move(*data);
    auto cert = crypto::decode_cert(r.view(crypto::kCertLen));
    if (!r.ok() || !cert) return std::nullopt;
    f.cert = *cert;
    f.signature = r.arr<64>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return f;
}

crypto::Hash ecdsa_digest(uint32_t epoch, uint32_t slot, std::span<const uint8_t> payload) {
    ByteWriter w;
    w.u32(epoch);
    w.u32(slot);
    crypto::Hash h1 = crypto::sha256_cat({w.bytes(), payload});
    return h1;
}

crypto::Hash vast_digest(const TeslaDataFrame& data) { return crypto::sha256(encode(data)); }

// ---------------------------------------------------------------- senders

TeslaSender::TeslaSender(const std::array<uint8_t, 32>& seed, TeslaSenderConfig cfg)
    : seed_(seed), cfg_(cfg) {
    context_ = keysched::default_context(cfg_.cell_id, cfg_.domain_id);
    crypto::Hash id = crypto::sha256(seed_);  // stable sender hint; TESLA has no certificates
    psid_ = static_cast<uint32_t>(id[0]) << 24 | static_cast<uint32_t>(id[1]) << 16 |
            static_cast<uint32_t>(id[2]) << 8 | static_cast<uint32_t>(id[3]);
}

void TeslaSender::adopt_epoch(uint32_t epoch) {
    epoch_key_ = keysched::derive_epoch_key(seed_, epoch, cfg_.domain_id);
}

void TeslaSender::on_slot_tick(uint32_t slot) {
    if (ticked_ && slot <= current_slot_) throw std::logic_error("tesla: non-monotonic slot");
    current_slot_ = slot;
    ticked_ = true;
    seq_in_slot_ = 0;
    slot_enqueued_ = false;
    material_ = keysched::make_slot_material(epoch_key_, slot, context_, cfg_.disclosure_delay);
}

TeslaDataFrame TeslaSender::make_data(std::span<const uint8_t> payload) {
    if (!ticked_) throw std::logic_error("tesla: send before first slot tick");
    TeslaDataFrame f;
    f.epoch = epoch_key_.epoch;
    f.slot = current_slot_;
    f.cell_id = cfg_.cell_id;
    f.psid = psid_;
    f.commitment = material_.commitment;
    ByteWriter ivw;
    ivw.u32(f.epoch);
    ivw.u32(f.slot);
    ivw.u32(seq_in_slot_++);
    ivw.u32(f.psid);
    crypto::Hash ih = crypto::sha256(ivw.bytes());
    std::copy_n(ih.begin(), f.iv.size(), f.iv.begin());
    f.payload.assign(payload.begin(), payload.end());
    f.tag = crypto::gmac(material_.key, f.iv, tesla_aad(f), payload);
    if (!slot_enqueued_) {
        reveal_queue_.push(current_slot_, material_.key);
        slot_enqueued_ = true;
    }
    return f;
}

std::optional<TeslaRevealFrame> TeslaSender::collect_reveal() {
    if (!ticked_) return std::nullopt;
    auto window = reveal_queue_.collect(
        current_slot_, cfg_.disclosure_delay, cfg_.reveal_window,
        [this](uint32_t s) { return keysched::derive_slot_key(epoch_key_, s, context_); });
    if (!window) return std::nullopt;
    TeslaRevealFrame f;
    f.epoch = epoch_key_.epoch;
    f.oldest_slot = window->oldest_slot;
    f.keys = std::move(window->keys);
    return f;
}

EcdsaFrame EcdsaSender::make_message(uint32_t epoch, uint32_t slot,
                                     std::span<const uint8_t> payload) const {
    EcdsaFrame f;
    f.epoch = epoch;
    f.slot = slot;
    f.payload.assign(payload.begin(), payload.end());
    f.cert = identity_.cert;
    f.signature = crypto::sign(identity_.sk_p, ecdsa_digest(epoch, slot, payload));
    return f;
}

VastSender::VastSender(const std::array<uint8_t, 32>& seed, crypto::PseudonymRecord identity,
                       uint32_t sign_period, TeslaSenderConfig cfg)
    : core_(seed, cfg), identity_(std::move(identity)), sign_period_(sign_period) {
    if (sign_period_ < 1) throw std::invalid_argument("vast: sign_period must be >= 1");
}

VastBundle VastSender::send_message(std::span<const uint8_t> payload) {
    VastBundle bundle;
    TeslaDataFrame data = core_.make_data(payload);
    bool sign_this = message_index_ % sign_period_ == 0;
    ++message_index_;
    if (sign_this) {
        VastSignedFrame sf;
        sf.cert = identity_.cert;
        sf.signature = crypto::sign(identity_.sk_p, vast_digest(data));
        sf.data = std::move(data);
        bundle.signed_data = std::move(sf);
    } else {
        bundle.data = std::move(data);
    }
    bundle.reveal = core_.collect_reveal();
    return bundle;
}

// -------------------------------------------------------------- receivers

EcdsaReceiver::EcdsaReceiver(const crypto::Point& ta_public,
                             std::shared_ptr<const revocation::RevocationFilter> filter,
                             wire::Sigma sigma)
    : ta_public_(ta_public), filter_(std::move(filter)), sigma_(sigma) {}

DataStatus EcdsaReceiver::receive(const EcdsaFrame& frame, uint64_t now_us, uint64_t frame_id) {
    ++seen_;
    auto emit = [&](DataStatus st, Reason reason, bool immediate) {
        events_.push_back(
            VerdictEvent{frame_id, now_us, now_us, st, reason, immediate, false});
        return st;
    };

    uint64_t now_s = now_us / 1'000'000;
    ++ops_.cert_verify;
    if (now_s < frame.cert.validity.start || now_s >= frame.cert.validity.end ||
        !crypto::verify_cert(frame.cert, ta_public_)) {
        return emit(DataStatus::Rejected, Reason::CertInvalid, false);
    }
    if (filter_) {
        ++ops_.sha256;
        ++ops_.bloom_query;
        if (filter_->contains(revocation::derive_rid(frame.cert.pk_v, sigma_))) {
            return emit(DataStatus::Rejected, Reason::Revoked, false);
        }
    }
    ++ops_.sig_verify;
    ++ops_.sha256;
    if (!crypto::verify(frame.cert.pk_p, ecdsa_digest(frame.epoch, frame.slot, frame.payload),
                        frame.signature)) {
        return emit(DataStatus::Rejected, Reason::SigInvalid, false);
    }
    return emit(DataStatus::StrongAuth, Reason::None, true);
}

std::vector<VerdictEvent> EcdsaReceiver::drain_events() {
    std::vector<VerdictEvent> out;
    out.swap(events_);
    return out;
}

DataStatus TeslaReceiver::on_data(const TeslaDataFrame& frame, uint64_t now_us,
                                  uint64_t frame_id) {
    ++seen_;
    uint64_t current = slot_at(now_us);
    auto reject = [&](Reason reason) {
        events_.push_back(VerdictEvent{frame_id, now_us, now_us, DataStatus::Rejected, reason,
                                       false, false});
        return DataStatus::Rejected;
    };
    if (frame.cell_id != cfg_.cell_id) return reject(Reason::WrongCell);
    if (frame.epoch != cfg_.epoch) return reject(Reason::WrongEpoch);
    if (static_cast<uint64_t>(frame.slot) > current) return reject(Reason::FutureSlot);
    uint64_t accept_back = cfg_.reveal_window - 1;
    if (static_cast<uint64_t>(frame.slot) + accept_back < current) {
        return reject(Reason::StaleSlot);
    }

    cache_[frame.slot].push_back(CacheEntry{frame, frame_id, now_us});
    size_t cached = cached_frames();
    cache_high_water_ = std::max(cache_high_water_, cached);
    gc(now_us);
    return DataStatus::Pending;
}

size_t TeslaReceiver::cached_frames() const {
    size_t n = 0;
    for (const auto& [slot, entries] : cache_) n += entries.size();
    return n;
}

void TeslaReceiver::on_reveal(const TeslaRevealFrame& reveal, uint64_t now_us) {
    if (reveal.epoch != cfg_.epoch) return;
    for (size_t j = 0; j < reveal.keys.size(); ++j) {
        uint32_t slot = reveal.oldest_slot + static_cast<uint32_t>(j);
        auto cit = cache_.find(slot);
        if (cit == cache_.end()) continue;
        const crypto::MacKey& key = reveal.keys[j];
        keysched::Commitment c = keysched::commit(key, cfg_.disclosure_delay);
        ops_.sha256 += cfg_.disclosure_delay;

        bool matched = false;
        auto& entries = cit->second;
        for (auto it = entries.begin(); it != entries.end();) {
            if (it->frame.commitment != c) {
                ++it;
                continue;
            }
            matched = true;
            ++ops_.gmac;
            ByteWriter aad;
            aad.u32(it->frame.epoch);
            aad.u32(it->frame.slot);
            aad.u16(it->frame.cell_id);
            aad.u32(it->frame.psid);
            crypto::MacTag tag = crypto::gmac(key, it->frame.iv, aad.bytes(), it->frame.payload);
            bool ok = tag == it->frame.tag;
            events_.push_back(VerdictEvent{it->frame_id, it->received_at_us, now_us,
                                           ok ? DataStatus::StrongAuth : DataStatus::Rejected,
                                           ok ? Reason::None : Reason::TagMismatch, false,
                                           false});
            it = entries.erase(it);
        }
        if (!matched) ++commitment_mismatches_;
        if (entries.empty()) cache_.erase(cit);
    }
    gc(now_us);
}

void TeslaReceiver::gc(uint64_t now_us) {
    uint64_t current = slot_at(now_us);
    uint64_t window = static_cast<uint64_t>(cfg_.disclosure_delay) + cfg_.reveal_window + 1;
    while (!cache_.empty()) {
        auto it = cache_.begin();
        if (it->first + window >= current) break;
        for (auto& e : it->second) {
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::Rejected, Reason::Expired, false, false});
        }
        cache_.erase(it);
    }
}

void TeslaReceiver::finalize(uint64_t now_us) {
    for (auto& [slot, entries] : cache_) {
        for (auto& e : entries) {
            events_.push_back(VerdictEvent{e.frame_id, e.received_at_us, now_us,
                                           DataStatus::Rejected, Reason::Expired, false, false});
        }
    }
    cache_.clear();
}

std::vector<VerdictEvent> TeslaReceiver::drain_events() {
    std::vector<VerdictEvent> out;
    out.swap(events_);
    return out;
}

DataStatus VastReceiver::on_signed(const VastSignedFrame& frame, uint64_t now_us,
                                   uint64_t frame_id) {
    ++signed_seen_;
    auto emit = [&](DataStatus st, Reason reason, bool immediate) {
        events_.push_back(VerdictEvent{frame_id, now_us, now_us, st, reason, immediate, false});
        return st;
    };
    uint64_t now_s = now_us / 1'000'000;
    ++ops_.cert_verify;
    if (now_s < frame.cert.validity.start || now_s >= frame.cert.validity.end ||
        !crypto::verify_cert(frame.cert, ta_public_)) {
        return emit(DataStatus::Rejected, Reason::CertInvalid, false);
    }
    ++ops_.sig_verify;
    ++ops_.sha256;
    if (!crypto::verify(frame.cert.pk_p, vast_digest(frame.data), frame.signature)) {
        return emit(DataStatus::Rejected, Reason::SigInvalid, false);
    }
    // trust does not carry over to neighbouring unsigned messages
    return emit(DataStatus::StrongAuth, Reason::None, true);
}

std::vector<VerdictEvent> VastReceiver::drain_events() {
    auto out = core_.drain_events();
    out.insert(out.end(), events_.begin(), events_.end());
    events_.clear();
    return out;
}

}  // namespace saltv::baselines
