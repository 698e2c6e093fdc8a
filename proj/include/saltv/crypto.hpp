// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Primitive layer: ECDSA over P-256 with deterministic (RFC 6979 style)
// nonces, AES-128 GMAC with 96-bit tags, SHA-256, HKDF-SHA256, and the
// minimal flat pseudonym certificate used by the broadcast protocol.
// Everything here is a pure function of its inputs; key generation takes
// an explicit deterministic RNG so test runs are reproducible.

#ifndef SALTV_CRYPTO_HPP
#define SALTV_CRYPTO_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "saltv/bytes.hpp"

namespace saltv::crypto {

inline constexpr size_t kHashLen = 32;
inline constexpr size_t kPointLen = 33;   // compressed SEC1 point
inline constexpr size_t kScalarLen = 32;
inline constexpr size_t kSigLen = 64;     // r || s, 32 bytes each
inline constexpr size_t kMacKeyLen = 16;
inline constexpr size_t kIvLen = 12;
inline constexpr size_t kTagLen = 12;     // 96-bit GMAC tag
inline constexpr size_t kCertLen = 146;   // 33 + 33 + 8 + 8 + 64

using Hash = std::array<uint8_t, kHashLen>;
using Point = std::array<uint8_t, kPointLen>;
using Scalar = std::array<uint8_t, kScalarLen>;
using Signature = std::array<uint8_t, kSigLen>;
using MacKey = std::array<uint8_t, kMacKeyLen>;
using Iv = std::array<uint8_t, kIvLen>;
using MacTag = std::array<uint8_t, kTagLen>;
using CertBytes = std::array<uint8_t, kCertLen>;

Hash sha256(std::span<const uint8_t> data);
Hash sha256_cat(std::initializer_list<std::span<const uint8_t>> parts);

// SHA-256 counter DRBG. Not a general-purpose CSPRNG; it exists so key
// material in tests and simulations is a deterministic function of a seed.
class Drbg {
public:
    explicit Drbg(std::span<const uint8_t> seed);
    explicit Drbg(uint64_t seed);

    void fill(std::span<uint8_t> out);
    template <size_t N>
    std::array<uint8_t, N> take() {
        std::array<uint8_t, N> out{};
        fill(out);
        return out;
    }
    uint64_t next_u64();

private:
    Hash state_{};
    Hash block_{};
    size_t avail_ = 0;
    uint64_t counter_ = 0;
};

struct SigningKeyPair {
    Scalar secret_scalar{};
    Point public_point{};
};

SigningKeyPair generate_keypair(Drbg& rng);
Point derive_public(const Scalar& secret);

// ECDSA-P256/SHA-256. The nonce is derived per RFC 6979 so identical
// (key, message) pairs always produce identical signatures.
Signature sign(const Scalar& secret, std::span<const uint8_t> message);
inline Signature sign(const SigningKeyPair& key, std::span<const uint8_t> message) {
    return sign(key.secret_scalar, message);
}
bool verify(const Point& public_point, std::span<const uint8_t> message, const Signature& sig);

// AES-128-GCM authentication-only: aad || payload is fed as GCM AAD over
// an empty plaintext and the 128-bit tag is truncated to 96 bits.
MacTag gmac(const MacKey& key, const Iv& iv, std::span<const uint8_t> aad,
            std::span<const uint8_t> payload);

// HKDF-SHA256 (extract-then-expand, empty salt), truncated to 16 bytes.
MacKey hkdf16(std::span<const uint8_t> secret, std::span<const uint8_t> info);

struct Validity {
    uint64_t start = 0;  // seconds since epoch 0
    uint64_t end = 0;
    bool operator==(const Validity&) const = default;
};

// Flat fixed-layout pseudonym certificate:
//   pk_p(33) || pk_v(33) || start(8) || end(8) || ta_signature(64)
// The TA signature covers the first 82 bytes.
struct PseudonymCert {
    Point pk_p{};
    Point pk_v{};
    Validity validity{};
    Signature ta_signature{};
    bool operator==(const PseudonymCert&) const = default;
};

CertBytes encode_cert(const PseudonymCert& cert);
std::optional<PseudonymCert> decode_cert(std::span<const uint8_t> bytes);
bool verify_cert(const PseudonymCert& cert, const Point& ta_public);
PseudonymCert issue_cert(const Point& pk_p, const Point& pk_v, Validity validity,
                         const Scalar& ta_secret);

struct PseudonymRecord {
    PseudonymCert cert;
    Scalar sk_p{};
    Scalar sk_v{};
};

std::vector<PseudonymRecord> issue_pseudonym_batch(size_t count, const SigningKeyPair& ta,
                                                   Validity validity, Drbg& rng);

}  // namespace saltv::crypto

#endif  // SALTV_CRYPTO_HPP
