// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/obu.hpp"

#include <stdexcept>

namespace saltv::obu {

std::optional<RevealQueue::Window> RevealQueue::collect(
    uint32_t current_slot, uint32_t d, uint32_t w,
    const std::function<crypto::MacKey(uint32_t)>& derive) {
    if (pending_.empty() || current_slot < d) return std::nullopt;
    uint32_t due_cutoff = current_slot - d;
    if (pending_.front().first > due_cutoff) return std::nullopt;

    uint32_t newest_due = 0;
    for (const auto& [slot, key] : pending_) {
        if (slot <= due_cutoff) newest_due = slot;
    }

    uint32_t window_start = newest_due + 1 >= w ? newest_due + 1 - w : 0;
    if (revealed_any_ && last_revealed_ + 1 > window_start) window_start = last_revealed_ + 1;

    // traffic keys that fell behind the window are lost to the loss budget
    while (!pending_.empty() && pending_.front().first < window_start) {
        pending_.pop_front();
        ++dropped_;
    }

    Window win;
    win.oldest_slot = window_start;
    for (uint32_t s = window_start; s <= newest_due; ++s) {
        if (!pending_.empty() && pending_.front().first == s) {
            win.keys.push_back(pending_.front().second);
            pending_.pop_front();
        } else {
            win.keys.push_back(derive(s));
        }
    }
    last_revealed_ = newest_due;
    revealed_any_ = true;
    return win;
}

Sender::Sender(const std::array<uint8_t, 32>& seed, std::vector<crypto::PseudonymRecord> batch,
               SenderConfig cfg)
    : seed_(seed), batch_(std::move(batch)), cfg_(cfg) {
    if (batch_.empty()) throw std::invalid_argument("sender: empty pseudonym batch");
    if (cfg_.boot_period < 1) throw std::invalid_argument("sender: boot_period must be >= 1");
    if (cfg_.reveal_window < 1 || cfg_.reveal_window > wire::kMaxRevealKeys) {
        throw std::invalid_argument("sender: reveal_window out of range");
    }
    if (cfg_.disclosure_delay < 1) throw std::invalid_argument("sender: disclosure_delay must be >= 1");
    context_ = keysched::default_context(cfg_.cell_id, cfg_.domain_id);
}

void Sender::refresh_identity() {
    est_ = wire::compute_est(batch_[pseudonym_index_].cert.pk_v, sigma_, epoch_key_.epoch);
    psid_ = wire::compute_psid(batch_[pseudonym_index_].cert);
}

void Sender::adopt_epoch(uint32_t epoch, const wire::Sigma& sigma) {
    bool epoch_changed = epoch_adopted_ && epoch != epoch_key_.epoch;
    sigma_ = sigma;
    epoch_key_ = keysched::derive_epoch_key(seed_, epoch, cfg_.domain_id);
    if (epoch_changed) {
        rotate_pseudonym();      // unlinkability across epochs
        reveal_queue_.clear();   // old-epoch keys authenticate nothing anymore
    } else {
        refresh_identity();
    }
    epoch_adopted_ = true;
}

void Sender::on_slot_tick(uint32_t slot) {
    if (!epoch_adopted_) throw std::logic_error("sender: epoch parameters not adopted");
    if (ticked_ && slot <= current_slot_) {
        throw std::logic_error("sender: non-monotonic slot tick");
    }
    current_slot_ = slot;
    ticked_ = true;
    slot_counter_ = 0;
    slot_enqueued_ = false;
    material_ = keysched::make_slot_material(epoch_key_, slot, context_, cfg_.disclosure_delay);

    if (now_us() - last_rotation_us_ >= cfg_.rotation_period_us &&
        pseudonym_index_ + 1 < batch_.size()) {
        rotate_pseudonym();
    }
}

TxBundle Sender::send_message(std::span<const uint8_t> payload, bool emergency) {
    if (!ticked_) throw std::logic_error("sender: send before first slot tick");
    if (payload.size() > cfg_.max_payload) {
        throw std::invalid_argument("sender: payload exceeds maximum size");
    }

    TxBundle bundle;
    wire::DataFrame data;
    data.meta.epoch = epoch_key_.epoch;
    data.meta.slot = current_slot_;
    data.meta.cell_id = cfg_.cell_id;
    data.meta.counter = slot_counter_++;
    data.meta.psid = psid_;
    data.meta.est = est_;
    data.commitment = material_.commitment;
    data.iv = wire::compute_iv(data.meta.epoch, data.meta.slot, data.meta.counter, data.meta.est);
    data.payload.assign(payload.begin(), payload.end());
    data.tag = crypto::gmac(material_.key, data.iv, wire::encode_meta(data.meta), payload);

    if (!slot_enqueued_) {
        reveal_queue_.push(current_slot_, material_.key);
        slot_enqueued_ = true;
    }

    bool boot_due = (message_index_ % cfg_.boot_period == 0) || emergency;
    ++message_index_;
    if (boot_due) {
        wire::BootFrame boot;
        boot.epoch = epoch_key_.epoch;
        boot.slot = current_slot_;
        boot.digest = wire::boot_digest(data.payload, data.commitment, data.tag, data.iv);
        boot.cert = batch_[pseudonym_index_].cert;
        boot.signature = crypto::sign(batch_[pseudonym_index_].sk_p, boot.digest);
        bundle.boot = std::move(boot);
    }

    bundle.data = std::move(data);
    bundle.reveal = collect_reveal();
    return bundle;
}

std::optional<wire::RevealFrame> Sender::collect_reveal() {
    if (!ticked_) return std::nullopt;
    auto window = reveal_queue_.collect(
        current_slot_, cfg_.disclosure_delay, cfg_.reveal_window,
        [this](uint32_t s) { return keysched::derive_slot_key(epoch_key_, s, context_); });
    if (!window) return std::nullopt;

    wire::RevealFrame frame;
    frame.epoch = epoch_key_.epoch;
    frame.oldest_slot = window->oldest_slot;
    frame.keys = std::move(window->keys);
    return frame;
}

void Sender::rotate_pseudonym() {
    if (pseudonym_index_ + 1 >= batch_.size()) {
        throw std::runtime_error("sender: pseudonym batch exhausted");
    }
    ++pseudonym_index_;
    last_rotation_us_ = ticked_ ? now_us() : 0;
    refresh_identity();
}

}  // namespace saltv::obu
