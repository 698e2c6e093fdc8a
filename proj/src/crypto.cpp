// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/obj_mac.h>

#include <mutex>
#include <stdexcept>

namespace saltv::crypto {

namespace {

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("openssl: ") + what);
}

struct Curve {
    EC_GROUP* group;
    BIGNUM* order;
};

// Shared P-256 context. The group and order are immutable after setup.
const Curve& p256() {
    static Curve c = [] {
        Curve cv{};
        cv.group = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
        if (!cv.group) fail("EC_GROUP_new_by_curve_name");
        cv.order = BN_new();
        BN_CTX* ctx = BN_CTX_new();
        if (!EC_GROUP_get_order(cv.group, cv.order, ctx)) fail("EC_GROUP_get_order");
        BN_CTX_free(ctx);
        return cv;
    }();
    return c;
}

struct BnPtr {
    BIGNUM* p = BN_new();
    ~BnPtr() { BN_clear_free(p); }
    operator BIGNUM*() const { return p; }
};

struct PointPtr {
    EC_POINT* p;
    explicit PointPtr(const EC_GROUP* g) : p(EC_POINT_new(g)) {}
    ~PointPtr() { EC_POINT_free(p); }
    operator EC_POINT*() const { return p; }
};

struct CtxPtr {
    BN_CTX* p = BN_CTX_new();
    ~CtxPtr() { BN_CTX_free(p); }
    operator BN_CTX*() const { return p; }
};

Scalar bn_to_scalar(const BIGNUM* bn) {
    Scalar out{};
    if (BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) < 0) fail("BN_bn2binpad");
    return out;
}

Hash hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data) {
    static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    if (!mac) fail("EVP_MAC_fetch HMAC");
    EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
    if (!ctx) fail("EVP_MAC_CTX_new");
    char digest[] = "SHA256";
    OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string("digest", digest, 0),
                           OSSL_PARAM_construct_end()};
    Hash out{};
    size_t outl = 0;
    if (!EVP_MAC_init(ctx, key.data(), key.size(), params) ||
        !EVP_MAC_update(ctx, data.data(), data.size()) ||
        !EVP_MAC_final(ctx, out.data(), &outl, out.size()) || outl != out.size()) {
        EVP_MAC_CTX_free(ctx);
        fail("HMAC");
    }
    EVP_MAC_CTX_free(ctx);
    return out;
}

// RFC 6979 nonce derivation for qlen = hlen = 256. bits2int is the
// identity on 32-byte strings; bits2octets reduces mod n. next() yields
// successive candidates so the (practically unreachable) r = 0 / s = 0
// retries continue the same HMAC chain.
class NonceChain {
public:
    NonceChain(const Scalar& secret, const Hash& h1, const BIGNUM* n) : n_(n) {
        CtxPtr ctx;
        BnPtr z;
        if (!BN_bin2bn(h1.data(), static_cast<int>(h1.size()), z)) fail("BN_bin2bn");
        if (!BN_mod(z, z, n, ctx)) fail("BN_mod");
        Scalar z_oct = bn_to_scalar(z);
        v_.fill(0x01);
        k_.fill(0x00);
        feed(0x00, secret, z_oct);
        feed(0x01, secret, z_oct);
    }

    void next(BIGNUM* nonce) {
        for (;;) {
            v_ = hmac_sha256(k_, v_);
            if (!BN_bin2bn(v_.data(), static_cast<int>(v_.size()), nonce)) fail("BN_bin2bn");
            if (!BN_is_zero(nonce) && BN_cmp(nonce, n_) < 0) return;
            step();
        }
    }

    void step() {
        Bytes buf(v_.begin(), v_.end());
        buf.push_back(0x00);
        k_ = hmac_sha256(k_, buf);
        v_ = hmac_sha256(k_, v_);
    }

private:
    void feed(uint8_t sep, const Scalar& secret, const Scalar& z_oct) {
        Bytes buf(v_.begin(), v_.end());
        buf.push_back(sep);
        buf.insert(buf.end(), secret.begin(), secret.end());
        buf.insert(buf.end(), z_oct.begin(), z_oct.end());
        k_ = hmac_sha256(k_, buf);
        v_ = hmac_sha256(k_, v_);
    }

    const BIGNUM* n_;
    Hash v_{}, k_{};
};

}  // namespace

Hash sha256(std::span<const uint8_t> data) {
    thread_local EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    Hash out{};
    unsigned len = 0;
    if (!EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) ||
        !EVP_DigestUpdate(ctx, data.data(), data.size()) ||
        !EVP_DigestFinal_ex(ctx, out.data(), &len) || len != out.size()) {
        fail("sha256");
    }
    return out;
}

Hash sha256_cat(std::initializer_list<std::span<const uint8_t>> parts) {
    thread_local EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    Hash out{};
    unsigned len = 0;
    if (!EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr)) fail("sha256 init");
    for (const auto& p : parts) {
        if (!EVP_DigestUpdate(ctx, p.data(), p.size())) fail("sha256 update");
    }
    if (!EVP_DigestFinal_ex(ctx, out.data(), &len) || len != out.size()) fail("sha256 final");
    return out;
}

Drbg::Drbg(std::span<const uint8_t> seed) { state_ = sha256(seed); }

Drbg::Drbg(uint64_t seed) {
    std::array<uint8_t, 8> be{};
    for (int i = 0; i < 8; ++i) be[i] = static_cast<uint8_t>(seed >> (56 - 8 * i));
    state_ = sha256(be);
}

void Drbg::fill(std::span<uint8_t> out) {
    size_t off = 0;
    while (off < out.size()) {
        if (avail_ == 0) {
            std::array<uint8_t, kHashLen + 8> input{};
            std::memcpy(input.data(), state_.data(), kHashLen);
            for (int i = 0; i < 8; ++i)
                input[kHashLen + i] = static_cast<uint8_t>(counter_ >> (56 - 8 * i));
            ++counter_;
            block_ = sha256(input);
            avail_ = block_.size();
        }
        size_t n = std::min(avail_, out.size() - off);
        std::memcpy(out.data() + off, block_.data() + (block_.size() - avail_), n);
        avail_ -= n;
        off += n;
    }
}

uint64_t Drbg::next_u64() {
    auto b = take<8>();
    uint64_t v = 0;
    for (uint8_t x : b) v = v << 8 | x;
    return v;
}

Point derive_public(const Scalar& secret) {
    const Curve& c = p256();
    CtxPtr ctx;
    BnPtr d;
    if (!BN_bin2bn(secret.data(), static_cast<int>(secret.size()), d)) fail("BN_bin2bn");
    PointPtr pub(c.group);
    if (!EC_POINT_mul(c.group, pub, d, nullptr, nullptr, ctx)) fail("EC_POINT_mul");
    Point out{};
    if (EC_POINT_point2oct(c.group, pub, POINT_CONVERSION_COMPRESSED, out.data(), out.size(),
                           ctx) != out.size()) {
        fail("EC_POINT_point2oct");
    }
    return out;
}

SigningKeyPair generate_keypair(Drbg& rng) {
    const Curve& c = p256();
    BnPtr d;
    Scalar bytes{};
    for (;;) {
        rng.fill(bytes);
        if (!BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), d)) fail("BN_bin2bn");
        if (!BN_is_zero(d) && BN_cmp(d, c.order) < 0) break;
    }
    SigningKeyPair kp;
    kp.secret_scalar = bytes;
    kp.public_point = derive_public(bytes);
    return kp;
}

Signature sign(const Scalar& secret, std::span<const uint8_t> message) {
    const Curve& c = p256();
    CtxPtr ctx;
    Hash h1 = sha256(message);

    BnPtr d, z;
    if (!BN_bin2bn(secret.data(), static_cast<int>(secret.size()), d)) fail("BN_bin2bn");
    if (!BN_bin2bn(h1.data(), static_cast<int>(h1.size()), z)) fail("BN_bin2bn");
    if (!BN_mod(z, z, c.order, ctx)) fail("BN_mod");

    NonceChain chain(secret, h1, c.order);
    BnPtr r, s, k, tmp;
    for (;;) {
        chain.next(k);
        PointPtr kg(c.group);
        if (!EC_POINT_mul(c.group, kg, k, nullptr, nullptr, ctx)) fail("EC_POINT_mul");
        if (!EC_POINT_get_affine_coordinates(c.group, kg, r, nullptr, ctx)) {
            fail("EC_POINT_get_affine_coordinates");
        }
        if (!BN_mod(r, r, c.order, ctx)) fail("BN_mod");
        if (BN_is_zero(r)) {
            chain.step();
            continue;
        }
        // s = k^-1 (z + r d) mod n
        if (!BN_mod_mul(tmp, r, d, c.order, ctx)) fail("BN_mod_mul");
        if (!BN_mod_add(tmp, tmp, z, c.order, ctx)) fail("BN_mod_add");
        if (!BN_mod_inverse(s, k, c.order, ctx)) fail("BN_mod_inverse");
        if (!BN_mod_mul(s, s, tmp, c.order, ctx)) fail("BN_mod_mul");
        if (BN_is_zero(s)) {
            chain.step();
            continue;
        }
        Signature sig{};
        Scalar rb = bn_to_scalar(r), sb = bn_to_scalar(s);
        std::memcpy(sig.data(), rb.data(), 32);
        std::memcpy(sig.data() + 32, sb.data(), 32);
        return sig;
    }
}

bool verify(const Point& public_point, std::span<const uint8_t> message, const Signature& sig) {
    const Curve& c = p256();
    CtxPtr ctx;

    PointPtr q(c.group);
    if (!EC_POINT_oct2point(c.group, q, public_point.data(), public_point.size(), ctx)) {
        return false;  // not a valid curve point
    }

    BnPtr r, s;
    if (!BN_bin2bn(sig.data(), 32, r) || !BN_bin2bn(sig.data() + 32, 32, s)) return false;
    if (BN_is_zero(r) || BN_is_zero(s) || BN_cmp(r, c.order) >= 0 || BN_cmp(s, c.order) >= 0) {
        return false;
    }

    Hash h1 = sha256(message);
    BnPtr z;
    if (!BN_bin2bn(h1.data(), static_cast<int>(h1.size()), z)) return false;
    if (!BN_mod(z, z, c.order, ctx)) return false;

    BnPtr w, u1, u2;
    if (!BN_mod_inverse(w, s, c.order, ctx)) return false;
    if (!BN_mod_mul(u1, z, w, c.order, ctx)) return false;
    if (!BN_mod_mul(u2, r, w, c.order, ctx)) return false;

    PointPtr sum(c.group);  // u1*G + u2*Q
    if (!EC_POINT_mul(c.group, sum, u1, q, u2, ctx)) return false;
    if (EC_POINT_is_at_infinity(c.group, sum)) return false;

    BnPtr x;
    if (!EC_POINT_get_affine_coordinates(c.group, sum, x, nullptr, ctx)) return false;
    if (!BN_mod(x, x, c.order, ctx)) return false;
    return BN_cmp(x, r) == 0;
}

MacTag gmac(const MacKey& key, const Iv& iv, std::span<const uint8_t> aad,
            std::span<const uint8_t> payload) {
    thread_local EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    int len = 0;
    if (!EVP_EncryptInit_ex(ctx, EVP_aes_128_gcm(), nullptr, nullptr, nullptr) ||
        !EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(iv.size()), nullptr) ||
        !EVP_EncryptInit_ex(ctx, nullptr, nullptr, key.data(), iv.data())) {
        fail("gmac init");
    }
    if (!aad.empty() && !EVP_EncryptUpdate(ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size()))) {
        fail("gmac aad");
    }
    if (!payload.empty() &&
        !EVP_EncryptUpdate(ctx, nullptr, &len, payload.data(), static_cast<int>(payload.size()))) {
        fail("gmac payload");
    }
    uint8_t dummy[1];
    if (!EVP_EncryptFinal_ex(ctx, dummy, &len)) fail("gmac final");
    MacTag tag{};
    if (!EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, static_cast<int>(tag.size()), tag.data())) {
        fail("gmac tag");
    }
    return tag;
}

MacKey hkdf16(std::span<const uint8_t> secret, std::span<const uint8_t> info) {
    if (secret.empty()) throw std::invalid_argument("hkdf16: empty secret");
    thread_local EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr);
    static const uint8_t zero_salt[kHashLen] = {};
    if (EVP_PKEY_derive_init(ctx) <= 0 ||
        EVP_PKEY_CTX_set_hkdf_md(ctx, EVP_sha256()) <= 0 ||
        EVP_PKEY_CTX_set1_hkdf_salt(ctx, zero_salt, sizeof(zero_salt)) <= 0 ||
        EVP_PKEY_CTX_set1_hkdf_key(ctx, secret.data(), static_cast<int>(secret.size())) <= 0 ||
        EVP_PKEY_CTX_add1_hkdf_info(ctx, info.data(), static_cast<int>(info.size())) <= 0) {
        fail("hkdf setup");
    }
    MacKey out{};
    size_t outlen = out.size();
    if (EVP_PKEY_derive(ctx, out.data(), &outlen) <= 0 || outlen != out.size()) fail("hkdf derive");
    return out;
}

CertBytes encode_cert(const PseudonymCert& cert) {
    CertBytes out{};
    uint8_t* p = out.data();
    std::memcpy(p, cert.pk_p.data(), kPointLen);
    p += kPointLen;
    std::memcpy(p, cert.pk_v.data(), kPointLen);
    p += kPointLen;
    for (int i = 0; i < 8; ++i) *p++ = static_cast<uint8_t>(cert.validity.start >> (56 - 8 * i));
    for (int i = 0; i < 8; ++i) *p++ = static_cast<uint8_t>(cert.validity.end >> (56 - 8 * i));
    std::memcpy(p, cert.ta_signature.data(), kSigLen);
    return out;
}

std::optional<PseudonymCert> decode_cert(std::span<const uint8_t> bytes) {
    if (bytes.size() != kCertLen) return std::nullopt;
    ByteReader r(bytes);
    PseudonymCert cert;
    cert.pk_p = r.arr<kPointLen>();
    cert.pk_v = r.arr<kPointLen>();
    cert.validity.start = r.u64();
    cert.validity.end = r.u64();
    cert.ta_signature = r.arr<kSigLen>();
    if (!r.ok() || r.remaining() != 0) return std::nullopt;
    if (cert.validity.start >= cert.validity.end) return std::nullopt;
    return cert;
}

bool verify_cert(const PseudonymCert& cert, const Point& ta_public) {
    if (cert.validity.start >= cert.validity.end) return false;
    CertBytes enc = encode_cert(cert);
    return verify(ta_public, std::span(enc).first(kCertLen - kSigLen), cert.ta_signature);
}

PseudonymCert issue_cert(const Point& pk_p, const Point& pk_v, Validity validity,
                         const Scalar& ta_secret) {
    PseudonymCert cert;
    cert.pk_p = pk_p;
    cert.pk_v = pk_v;
    cert.validity = validity;
    CertBytes enc = encode_cert(cert);
    cert.ta_signature = sign(ta_secret, std::span(enc).first(kCertLen - kSigLen));
    return cert;
}

std::vector<PseudonymRecord> issue_pseudonym_batch(size_t count, const SigningKeyPair& ta,
                                                   Validity validity, Drbg& rng) {
    if (count < 1) throw std::invalid_argument("issue_pseudonym_batch: count must be >= 1");
    std::vector<PseudonymRecord> batch;
    batch.reserve(count);
    for (size_t j = 0; j < count; ++j) {
        SigningKeyPair p = generate_keypair(rng);
        SigningKeyPair v = generate_keypair(rng);
        PseudonymRecord rec;
        rec.sk_p = p.secret_scalar;
        rec.sk_v = v.secret_scalar;
        rec.cert = issue_cert(p.public_point, v.public_point, validity, ta.secret_scalar);
        batch.push_back(std::move(rec));
    }
    return batch;
}

}  // namespace saltv::crypto
