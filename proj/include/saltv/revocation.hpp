// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bloom-filter revocation: rid derivation, optimal sizing from the target
// false-positive rate, constant-time membership queries, and the fixed
// binary layout embedded in ANCHOR frames. False positives are fail-closed
// by policy: a positive answer rejects the sender.

#ifndef SALTV_REVOCATION_HPP
#define SALTV_REVOCATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "saltv/crypto.hpp"

namespace saltv::revocation {

using RevocationId = std::array<uint8_t, 16>;

struct FilterParams {
    uint64_t bit_count = 0;  // m
    uint8_t hash_count = 0;  // k
    bool operator==(const FilterParams&) const = default;
};

// m = ceil(-n ln p / (ln 2)^2), k = round(m/n * ln 2) clamped to >= 1.
// Throws std::invalid_argument for n < 1 or p outside (0, 1).
FilterParams optimal_params(uint64_t n, double p);

// rid = Trunc128(H(pk_v || sigma))
RevocationId derive_rid(const crypto::Point& pk_v, std::span<const uint8_t, 16> sigma);

class RevocationFilter {
public:
    // Sizes the filter for `expected_entries` at false-positive rate `target_fpr`.
    RevocationFilter(uint64_t expected_entries, double target_fpr);

    void insert(const RevocationId& rid);
    bool contains(const RevocationId& rid) const;

    uint64_t bit_count() const { return m_; }
    uint8_t hash_count() const { return k_; }
    uint64_t entry_count() const { return n_; }
    double target_fpr() const { return p_; }
    size_t serialized_size() const;

    // "SVBF" || version u8 || m u64 || k u8 || n u64 || bits, integers big-endian
    Bytes serialize() const;
    static std::optional<RevocationFilter> deserialize(std::span<const uint8_t> bytes);
    // Parses a filter from the front of `bytes`; returns the filter and the
    // number of bytes consumed. Used by the ANCHOR codec.
    static std::optional<std::pair<RevocationFilter, size_t>> parse_prefix(
        std::span<const uint8_t> bytes);

private:
    RevocationFilter() = default;

    uint64_t m_ = 1;
    uint8_t k_ = 1;
    uint64_t n_ = 0;
    double p_ = 0.0;
    std::vector<uint8_t> bits_;
};

}  // namespace saltv::revocation

#endif  // SALTV_REVOCATION_HPP
