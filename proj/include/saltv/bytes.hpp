// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SALTV_BYTES_HPP
#define SALTV_BYTES_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace saltv {

using Bytes = std::vector<uint8_t>;

// Big-endian append-only encoder. All wire integers are fixed-width BE.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v));
    }
    void u32(uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }
    void u64(uint64_t v) {
        for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }
    void raw(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void raw(const uint8_t* data, size_t n) { buf_.insert(buf_.end(), data, data + n); }

    size_t size() const { return buf_.size(); }
    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

// Bounds-checked big-endian decoder. Underruns latch a failure flag and
// return zeroed values; callers check ok() (and remaining(), for codecs
// that reject trailing bytes) once at the end.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        if (!take(1)) return 0;
        return data_[pos_ - 1];
    }
    uint16_t u16() {
        if (!take(2)) return 0;
        return static_cast<uint16_t>(data_[pos_ - 2] << 8 | data_[pos_ - 1]);
    }
    uint32_t u32() {
        if (!take(4)) return 0;
        uint32_t v = 0;
        for (size_t i = pos_ - 4; i < pos_; ++i) v = v << 8 | data_[i];
        return v;
    }
    uint64_t u64() {
        if (!take(8)) return 0;
        uint64_t v = 0;
        for (size_t i = pos_ - 8; i < pos_; ++i) v = v << 8 | data_[i];
        return v;
    }
    template <size_t N>
    std::array<uint8_t, N> arr() {
        std::array<uint8_t, N> out{};
        if (take(N)) std::memcpy(out.data(), data_.data() + pos_ - N, N);
        return out;
    }
    Bytes bytes(size_t n) {
        if (!take(n)) return {};
        return Bytes(data_.begin() + static_cast<ptrdiff_t>(pos_ - n),
                     data_.begin() + static_cast<ptrdiff_t>(pos_));
    }
    std::span<const uint8_t> view(size_t n) {
        if (!take(n)) return {};
        return data_.subspan(pos_ - n, n);
    }

    bool ok() const { return !fail_; }
    size_t remaining() const { return data_.size() - pos_; }
    size_t position() const { return pos_; }

private:
    bool take(size_t n) {
        if (fail_ || data_.size() - pos_ < n) {
            fail_ = true;
            return false;
        }
        pos_ += n;
        return true;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
    bool fail_ = false;
};

inline std::string to_hex(std::span<const uint8_t> data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline std::optional<Bytes> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

template <size_t N>
std::optional<std::array<uint8_t, N>> arr_from_hex(std::string_view hex) {
    auto v = from_hex(hex);
    if (!v || v->size() != N) return std::nullopt;
    std::array<uint8_t, N> out{};
    std::memcpy(out.data(), v->data(), N);
    return out;
}

}  // namespace saltv

#endif  // SALTV_BYTES_HPP
