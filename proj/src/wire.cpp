// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/wire.hpp"

#include <cstring>

#include "saltv/revocation.hpp"

namespace saltv::wire {

namespace {

Meta read_meta(ByteReader& r) {
    Meta m;
    m.epoch = r.u32();
    m.slot = r.u32();
    m.cell_id = r.u16();
    m.counter = r.u32();
    m.psid = r.u32();
    m.est = r.arr<8>();
    return m;
}

void write_cert(ByteWriter& w, const PseudonymCert& cert) {
    crypto::CertBytes enc = crypto::encode_cert(cert);
    w.raw(enc);
}

std::optional<PseudonymCert> read_cert(ByteReader& r) {
    auto view = r.view(crypto::kCertLen);
    if (!r.ok()) return std::nullopt;
    return crypto::decode_cert(view);
}

std::optional<Frame> decode_data(ByteReader& r) {
    DataFrame f;
    f.meta = read_meta(r);
    f.commitment = r.arr<16>();
    f.iv = r.arr<12>();
    f.tag = r.arr<12>();
    uint16_t len = r.u16();
    if (!r.ok() || len > kMaxPayload) return std::nullopt;
    f.payload = r.bytes(len);
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return Frame{std::move(f)};
}

std::optional<Frame> decode_boot(ByteReader& r) {
    BootFrame f;
    f.epoch = r.u32();
    f.slot = r.u32();
    f.digest = r.arr<32>();
    auto cert = read_cert(r);
    if (!cert) return std::nullopt;
    f.cert = *cert;
    f.signature = r.arr<64>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return Frame{std::move(f)};
}

std::optional<Frame> decode_reveal(ByteReader& r) {
    RevealFrame f;
    f.epoch = r.u32();
    f.oldest_slot = r.u32();
    uint8_t w = r.u8();
    if (!r.ok() || w < 1 || w > kMaxRevealKeys) return std::nullopt;
    f.keys.reserve(w);
    for (unsigned i = 0; i < w; ++i) f.keys.push_back(r.arr<16>());
    uint16_t vrf_len = r.u16();
    if (!r.ok()) return std::nullopt;
    f.vrf_blob = r.bytes(vrf_len);
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return Frame{std::move(f)};
}

std::optional<Frame> decode_anchor(ByteReader& r, std::span<const uint8_t> all) {
    AnchorFrame f;
    f.timestamp_us = r.u64();
    f.epoch = r.u32();
    f.slot_len_ms = r.u16();
    f.disclosure_delay = r.u8();
    f.drift_bound_ms = r.u16();
    f.sigma = r.arr<16>();
    uint8_t policy = r.u8();
    f.validity_start_us = r.u64();
    f.validity_end_us = r.u64();
    if (!r.ok() || policy > 1) return std::nullopt;
    f.policy = static_cast<Policy>(policy);

    // the filter is self-delimiting: its header carries the bit count
    auto filter = revocation::RevocationFilter::parse_prefix(all.subspan(r.position()));
    if (!filter) return std::nullopt;
    f.filter_bytes = r.bytes(filter->second);

    auto cert = read_cert(r);
    if (!cert) return std::nullopt;
    f.rsu_cert = *cert;
    f.rsu_signature = r.arr<64>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    return Frame{std::move(f)};
}

}  // namespace

Bytes encode_meta(const Meta& m) {
    ByteWriter w;
    w.u32(m.epoch);
    w.u32(m.slot);
    w.u16(m.cell_id);
    w.u32(m.counter);
    w.u32(m.psid);
    w.raw(m.est);
    return w.take();
}

Bytes encode(const DataFrame& f) {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(FrameType::Data));
    w.raw(encode_meta(f.meta));
    w.raw(f.commitment);
    w.raw(f.iv);
    w.raw(f.tag);
    w.u16(static_cast<uint16_t>(f.payload.size()));
    w.raw(f.payload);
    return w.take();
}

Bytes encode(const BootFrame& f) {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(FrameType::Boot));
    w.u32(f.epoch);
    w.u32(f.slot);
    w.raw(f.digest);
    write_cert(w, f.cert);
    w.raw(f.signature);
    return w.take();
}

Bytes encode(const RevealFrame& f) {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(FrameType::Reveal));
    w.u32(f.epoch);
    w.u32(f.oldest_slot);
    w.u8(static_cast<uint8_t>(f.keys.size()));
    for (const auto& k : f.keys) w.raw(k);
    w.u16(static_cast<uint16_t>(f.vrf_blob.size()));
    w.raw(f.vrf_blob);
    return w.take();
}

Bytes encode(const AnchorFrame& f) {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(FrameType::Anchor));
    w.u64(f.timestamp_us);
    w.u32(f.epoch);
    w.u16(f.slot_len_ms);
    w.u8(f.disclosure_delay);
    w.u16(f.drift_bound_ms);
    w.raw(f.sigma);
    w.u8(static_cast<uint8_t>(f.policy));
    w.u64(f.validity_start_us);
    w.u64(f.validity_end_us);
    w.raw(f.filter_bytes);
    write_cert(w, f.rsu_cert);
    w.raw(f.rsu_signature);
    return w.take();
}

Bytes encode(const Frame& f) {
    return std::visit([](const auto& frame) { return encode(frame); }, f);
}

std::optional<Frame> decode(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    uint8_t type = r.u8();
    if (!r.ok()) return std::nullopt;
    switch (type) {
        case static_cast<uint8_t>(FrameType::Data):
            return decode_data(r);
        case static_cast<uint8_t>(FrameType::Boot):
            return decode_boot(r);
        case static_cast<uint8_t>(FrameType::Reveal):
            return decode_reveal(r);
        case static_cast<uint8_t>(FrameType::Anchor):
            return decode_anchor(r, bytes);
        default:
            return std::nullopt;
    }
}

Bytes anchor_signing_bytes(const AnchorFrame& f) {
    Bytes enc = encode(f);
    enc.resize(enc.size() - crypto::kSigLen);
    return enc;
}

Iv compute_iv(uint32_t epoch, uint32_t slot, uint32_t counter, const Est& est) {
    ByteWriter w;
    w.u32(epoch);
    w.u32(slot);
    w.u32(counter);
    w.raw(est);
    crypto::Hash h = crypto::sha256(w.bytes());
    Iv iv{};
    std::memcpy(iv.data(), h.data(), iv.size());
    return iv;
}

Est compute_est(const Point& pk_v, const Sigma& sigma, uint32_t epoch) {
    ByteWriter w;
    w.raw(pk_v);
    w.raw(sigma);
    w.u32(epoch);
    crypto::Hash h = crypto::sha256(w.bytes());
    Est est{};
    std::memcpy(est.data(), h.data(), est.size());
    return est;
}

uint32_t compute_psid(const PseudonymCert& cert) {
    crypto::CertBytes enc = crypto::encode_cert(cert);
    crypto::Hash h = crypto::sha256(enc);
    return static_cast<uint32_t>(h[0]) << 24 | static_cast<uint32_t>(h[1]) << 16 |
           static_cast<uint32_t>(h[2]) << 8 | static_cast<uint32_t>(h[3]);
}

Hash boot_digest(std::span<const uint8_t> payload, const Commitment& c, const MacTag& tag,
                 const Iv& iv) {
    return crypto::sha256_cat({payload, c, tag, iv});
}

}  // namespace saltv::wire
