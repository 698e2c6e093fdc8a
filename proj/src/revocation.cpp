// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/revocation.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace saltv::revocation {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'B', 'F'};
constexpr uint8_t kVersion = 1;
constexpr size_t kHeaderLen = 4 + 1 + 8 + 1 + 8;

// Double hashing over the two leading 64-bit halves of SHA-256(rid):
// index_i = (h1 + i*h2) mod m, with wrap-around 64-bit arithmetic.
struct IndexStream {
    uint64_t h1, h2;
    explicit IndexStream(const RevocationId& rid) {
        crypto::Hash h = crypto::sha256(rid);
        h1 = h2 = 0;
        for (int i = 0; i < 8; ++i) h1 = h1 << 8 | h[i];
        for (int i = 8; i < 16; ++i) h2 = h2 << 8 | h[i];
    }
    uint64_t at(unsigned i, uint64_t m) const { return (h1 + i * h2) % m; }
};

}  // namespace

FilterParams optimal_params(uint64_t n, double p) {
    if (n < 1) throw std::invalid_argument("optimal_params: n must be >= 1");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("optimal_params: p must be in (0,1)");
    const double ln2 = std::log(2.0);
    double m_real = -(static_cast<double>(n) * std::log(p)) / (ln2 * ln2);
    uint64_t m = static_cast<uint64_t>(std::ceil(m_real));
    if (m < 1) m = 1;
    long k_real = std::lround(static_cast<double>(m) / static_cast<double>(n) * ln2);
    uint8_t k = static_cast<uint8_t>(std::clamp<long>(k_real, 1, 32));
    return {m, k};
}

RevocationId derive_rid(const crypto::Point& pk_v, std::span<const uint8_t, 16> sigma) {
    crypto::Hash h = crypto::sha256_cat({std::span<const uint8_t>(pk_v), sigma});
    RevocationId rid{};
    std::memcpy(rid.data(), h.data(), rid.size());
    return rid;
}

RevocationFilter::RevocationFilter(uint64_t expected_entries, double target_fpr) {
    FilterParams params = optimal_params(expected_entries, target_fpr);
    m_ = params.bit_count;
    k_ = params.hash_count;
    p_ = target_fpr;
    bits_.assign((m_ + 7) / 8, 0);
}

void RevocationFilter::insert(const RevocationId& rid) {
    IndexStream ix(rid);
    for (unsigned i = 0; i < k_; ++i) {
        uint64_t bit = ix.at(i, m_);
        bits_[bit >> 3] |= static_cast<uint8_t>(1u << (bit & 7));
    }
    ++n_;
}

bool RevocationFilter::contains(const RevocationId& rid) const {
    IndexStream ix(rid);
    for (unsigned i = 0; i < k_; ++i) {
        uint64_t bit = ix.at(i, m_);
        if (!(bits_[bit >> 3] & (1u << (bit & 7)))) return false;
    }
    return true;
}

size_t RevocationFilter::serialized_size() const { return kHeaderLen + bits_.size(); }

Bytes RevocationFilter::serialize() const {
    ByteWriter w;
    w.raw(reinterpret_cast<const uint8_t*>(kMagic), sizeof(kMagic));
    w.u8(kVersion);
    w.u64(m_);
    w.u8(k_);
    w.u64(n_);
    w.raw(bits_);
    return w.take();
}

std::optional<std::pair<RevocationFilter, size_t>> RevocationFilter::parse_prefix(
    std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.arr<4>();
    uint8_t version = r.u8();
    uint64_t m = r.u64();
    uint8_t k = r.u8();
    uint64_t n = r.u64();
    if (!r.ok() || std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0 || version != kVersion) {
        return std::nullopt;
    }
    if (m < 1 || k < 1 || k > 32) return std::nullopt;
    uint64_t byte_len = (m + 7) / 8;
    if (byte_len > r.remaining()) return std::nullopt;

    RevocationFilter f;
    f.m_ = m;
    f.k_ = k;
    f.n_ = n;
    // implied rate from the sizing formula; informational only
    f.p_ = n > 0 ? std::exp(-(static_cast<double>(m) / static_cast<double>(n)) *
                            std::log(2.0) * std::log(2.0))
                 : 0.0;
    auto view = r.view(byte_len);
    f.bits_.assign(view.begin(), view.end());
    return std::make_pair(std::move(f), r.position());
}

std::optional<RevocationFilter> RevocationFilter::deserialize(std::span<const uint8_t> bytes) {
    auto parsed = parse_prefix(bytes);
    if (!parsed || parsed->second != bytes.size()) return std::nullopt;
    return std::move(parsed->first);
}

}  // namespace saltv::revocation
