// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "saltv/sim.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <unordered_set>

#include "saltv/baselines.hpp"
#include "saltv/obu.hpp"
#include "saltv/rsu.hpp"

namespace saltv::sim {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Saltv: return "saltv";
        case Scheme::Ecdsa: return "ecdsa";
        case Scheme::Tesla: return "tesla";
        case Scheme::Vast: return "vast";
    }
    return "?";
}

std::optional<Scheme> scheme_from_string(const std::string& s) {
    if (s == "saltv") return Scheme::Saltv;
    if (s == "ecdsa") return Scheme::Ecdsa;
    if (s == "tesla") return Scheme::Tesla;
    if (s == "vast") return Scheme::Vast;
    return std::nullopt;
}

const char* to_string(AdversaryKind a) {
    switch (a) {
        case AdversaryKind::None: return "none";
        case AdversaryKind::Replay: return "replay";
        case AdversaryKind::Tamper: return "tamper";
        case AdversaryKind::ForgeKey: return "forge_key";
        case AdversaryKind::RevokedSender: return "revoked_sender";
    }
    return "?";
}

std::optional<AdversaryKind> adversary_from_string(const std::string& s) {
    if (s == "none") return AdversaryKind::None;
    if (s == "replay") return AdversaryKind::Replay;
    if (s == "tamper") return AdversaryKind::Tamper;
    if (s == "forge_key") return AdversaryKind::ForgeKey;
    if (s == "revoked_sender") return AdversaryKind::RevokedSender;
    return std::nullopt;
}

std::optional<std::string> validate(const ScenarioConfig& cfg) {
    if (!cfg.rng_seed_set) return "rng_seed: required, no ambient randomness";
    if (cfg.vehicles < 2) return "vehicles: need at least 2 (a sender and a receiver)";
    if (cfg.rate_hz <= 0) return "rate_hz: must be positive";
    if (cfg.payload_bytes < 1 || cfg.payload_bytes > wire::kMaxPayload) {
        return "payload_bytes: must be in [1, 2048]";
    }
    if (cfg.duration_s <= 0 || cfg.duration_s > 3600) return "duration_s: must be in (0, 3600]";
    if (cfg.loss_rate < 0 || cfg.loss_rate >= 1) return "loss_rate: must be in [0, 1)";
    if (cfg.d < 1) return "d: disclosure delay must be >= 1";
    if (cfg.r < 1) return "r: boot period must be >= 1";
    if (cfg.w < 1 || cfg.w > wire::kMaxRevealKeys) return "w: reveal window must be in [1, 8]";
    if (cfg.slot_ms < 1) return "slot_ms: must be >= 1";
    if (cfg.tw_ms < 1) return "tw_ms: whitelist lifetime must be >= 1";
    if (cfg.anchor_hz <= 0 || cfg.anchor_hz > 5) return "anchor_hz: must be in (0, 5]";
    if (cfg.bloom_fpr <= 0 || cfg.bloom_fpr >= 1) return "bloom_fpr: must be in (0, 1)";
    if (cfg.revoked_count >= cfg.vehicles) return "revoked_count: must be < vehicles";
    if (cfg.warmup_s < 0 || cfg.warmup_s >= cfg.duration_s) {
        return "warmup_s: must be in [0, duration_s)";
    }
    double period_slots = 1000.0 / (cfg.rate_hz * cfg.slot_ms);
    if (period_slots < 1.0) return "rate_hz: more than one message per slot is not modeled";
    return std::nullopt;
}

namespace {

using baselines::TeslaDataFrame;
using baselines::TeslaRevealFrame;
using verifier::DataStatus;
using verifier::Reason;
using verifier::VerdictEvent;

enum class FrameKind : uint8_t {
    SaltvData,
    SaltvBoot,
    SaltvReveal,
    SaltvAnchor,
    EcdsaMsg,
    TeslaData,
    TeslaReveal,
    VastData,
    VastSigned,
    VastReveal,
};

struct ChannelFrame {
    FrameKind kind;
    uint64_t frame_id = 0;
    uint32_t sender = 0;
    bool attack = false;
    size_t wire_bytes = 0;
    // decoded-once payloads; the codec round-trip is exercised at build time
    std::shared_ptr<const wire::DataFrame> data;
    std::shared_ptr<const wire::BootFrame> boot;
    std::shared_ptr<const wire::RevealFrame> reveal;
    std::shared_ptr<const wire::AnchorFrame> anchor;
    std::shared_ptr<const baselines::EcdsaFrame> ecdsa;
    std::shared_ptr<const TeslaDataFrame> tesla_data;
    std::shared_ptr<const TeslaRevealFrame> tesla_reveal;
    std::shared_ptr<const baselines::VastSignedFrame> vast_signed;
};

struct Broadcast {
    std::vector<ChannelFrame> frames;
};

enum class EventKind : uint8_t { Anchor, Send, Reveal, Inject };

struct Event {
    uint64_t t_us;
    uint64_t seq;
    EventKind kind;
    uint32_t actor;   // vehicle index; unused for Anchor
    uint32_t inject;  // index into pending injections for Inject events
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        return a.t_us != b.t_us ? a.t_us > b.t_us : a.seq > b.seq;
    }
};

struct Vehicle {
    std::unique_ptr<obu::Sender> saltv;
    std::unique_ptr<baselines::EcdsaSender> ecdsa;
    std::unique_ptr<baselines::TeslaSender> tesla;
    std::unique_ptr<baselines::VastSender> vast;
    uint32_t epoch0_slot_phase = 0;
    uint64_t period_us = 100'000;
    bool revoked = false;
};

// A monitored receiver. The cell-2 observer used by the replay adversary
// hears attack traffic only and is excluded from scheme metrics.
struct Monitor {
    uint32_t vehicle = 0;
    bool attack_observer = false;
    std::unique_ptr<verifier::Receiver> saltv;
    std::unique_ptr<baselines::EcdsaReceiver> ecdsa;
    std::unique_ptr<baselines::TeslaReceiver> tesla;
    std::unique_ptr<baselines::VastReceiver> vast;
};

struct PerReceiverStats {
    uint64_t messages = 0;
    verifier::OpCounts ops;
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, const bench::BenchTable& costs)
        : cfg_(cfg), costs_(costs), setup_rng_(cfg.rng_seed),
          channel_rng_(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull) {}

    SchemeMetrics run();

private:
    uint64_t slot_us() const { return static_cast<uint64_t>(cfg_.slot_ms) * 1000; }
    uint32_t slot_at(uint64_t t) const { return static_cast<uint32_t>(t / slot_us()); }
    bool lost() {
        if (cfg_.loss_rate <= 0.0) return false;
        double u = static_cast<double>(channel_rng_() >> 11) * 0x1.0p-53;
        return u < cfg_.loss_rate;
    }

    void setup();
    void schedule(uint64_t t, EventKind kind, uint32_t actor, uint32_t inject = 0);
    void process_send(uint32_t v, uint64_t t);
    void process_reveal(uint32_t v, uint64_t t);
    void process_anchor(uint64_t t);
    void broadcast(const Broadcast& b, uint64_t t);
    void deliver(Monitor& mon, size_t mon_index, const std::vector<const ChannelFrame*>& frames,
                 uint64_t t);
    void fold_events(Monitor& mon, size_t mon_index, uint64_t t);
    void account_frame(const ChannelFrame& f);
    ChannelFrame make_channel_frame(FrameKind kind, uint32_t sender, Bytes bytes, bool attack);
    void maybe_inject(const Broadcast& b, uint64_t t);

    ScenarioConfig cfg_;
    const bench::BenchTable& costs_;
    crypto::Drbg setup_rng_;
    std::mt19937_64 channel_rng_;

    crypto::SigningKeyPair ta_;
    std::unique_ptr<rsu::Rsu> rsu_;
    std::unique_ptr<revocation::RevocationFilter> filter_;
    wire::Sigma sigma_{};
    rsu::AnchorParams anchor_params_;

    std::vector<Vehicle> vehicles_;
    std::vector<Monitor> monitors_;
    std::vector<PerReceiverStats> rx_stats_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    uint64_t seq_ = 0;
    uint64_t next_frame_id_ = 1;
    uint64_t end_us_ = 0;
    uint64_t warmup_us_ = 0;

    std::vector<Broadcast> injections_;
    uint64_t attack_budget_ = 1000;
    std::unordered_set<uint64_t> attack_ids_;
    std::unordered_set<uint64_t> revoked_frame_ids_;

    SchemeMetrics m_;
    uint64_t delay_samples_ = 0;
    double delay_sum_us_ = 0;
    uint64_t ratio_denominator_ = 0;
    uint64_t ratio_immediate_ = 0;
};

void Simulation::schedule(uint64_t t, EventKind kind, uint32_t actor, uint32_t inject) {
    queue_.push(Event{t, seq_++, kind, actor, inject});
}

ChannelFrame Simulation::make_channel_frame(FrameKind kind, uint32_t sender, Bytes bytes,
                                            bool attack) {
    // every frame crosses the codec once: encode at the sender, decode at
    // the channel boundary; the sim then shares the decoded form
    ChannelFrame f;
    f.kind = kind;
    f.frame_id = next_frame_id_++;
    f.sender = sender;
    f.attack = attack;
    f.wire_bytes = bytes.size();
    switch (kind) {
        case FrameKind::SaltvData:
        case FrameKind::SaltvBoot:
        case FrameKind::SaltvReveal:
        case FrameKind::SaltvAnchor: {
            auto decoded = wire::decode(bytes);
            if (!decoded) throw std::logic_error("sim: emitted frame failed to decode");
            if (auto* d = std::get_if<wire::DataFrame>(&*decoded)) {
                f.data = std::make_shared<wire::DataFrame>(std::move(*d));
            } else if (auto* b = std::get_if<wire::BootFrame>(&*decoded)) {
                f.boot = std::make_shared<wire::BootFrame>(std::move(*b));
            } else if (auto* r = std::get_if<wire::RevealFrame>(&*decoded)) {
                f.reveal = std::make_shared<wire::RevealFrame>(std::move(*r));
            } else if (auto* a = std::get_if<wire::AnchorFrame>(&*decoded)) {
                f.anchor = std::make_shared<wire::AnchorFrame>(std::move(*a));
            }
            break;
        }
        case FrameKind::EcdsaMsg: {
            auto decoded = baselines::decode_ecdsa(bytes);
            if (!decoded) throw std::logic_error("sim: ecdsa frame failed to decode");
            f.ecdsa = std::make_shared<baselines::EcdsaFrame>(std::move(*decoded));
            break;
        }
        case FrameKind::TeslaData:
        case FrameKind::VastData: {
            auto decoded = baselines::decode_tesla_data(bytes);
            if (!decoded) throw std::logic_error("sim: tesla frame failed to decode");
            f.tesla_data = std::make_shared<TeslaDataFrame>(std::move(*decoded));
            break;
        }
        case FrameKind::TeslaReveal:
        case FrameKind::VastReveal: {
            auto decoded = baselines::decode_tesla_reveal(bytes);
            if (!decoded) throw std::logic_error("sim: reveal frame failed to decode");
            f.tesla_reveal = std::make_shared<TeslaRevealFrame>(std::move(*decoded));
            break;
        }
        case FrameKind::VastSigned: {
            auto decoded = baselines::decode_vast_signed(bytes);
            if (!decoded) throw std::logic_error("sim: signed frame failed to decode");
            f.vast_signed = std::make_shared<baselines::VastSignedFrame>(std::move(*decoded));
            break;
        }
    }
    return f;
}

void Simulation::setup() {
    end_us_ = static_cast<uint64_t>(cfg_.duration_s * 1e6);
    warmup_us_ = static_cast<uint64_t>(cfg_.warmup_s * 1e6);

    ta_ = crypto::generate_keypair(setup_rng_);
    rsu_ = std::make_unique<rsu::Rsu>(ta_, crypto::Validity{0, 1ull << 40}, setup_rng_);
    sigma_ = setup_rng_.take<16>();

    filter_ = std::make_unique<revocation::RevocationFilter>(
        std::max<uint64_t>(cfg_.revoked_count, 1), cfg_.bloom_fpr);

    anchor_params_.time.slot_len_ms = cfg_.slot_ms;
    anchor_params_.time.drift_bound_ms = 0;  // the sim models synchronized clocks
    anchor_params_.sigma = sigma_;
    anchor_params_.policy = cfg_.policy;
    anchor_params_.disclosure_delay = cfg_.d;
    anchor_params_.validity_len_us = std::max<uint64_t>(
        2'000'000, static_cast<uint64_t>(2e6 / cfg_.anchor_hz));

    uint64_t period_us = static_cast<uint64_t>(1e6 / cfg_.rate_hz);
    uint32_t period_slots = std::max<uint32_t>(1, static_cast<uint32_t>(period_us / slot_us()));

    bool revoked_mode = cfg_.adversary == AdversaryKind::RevokedSender;
    uint32_t revoked_n = revoked_mode ? std::max<uint32_t>(cfg_.revoked_count, 1) : 0;

    vehicles_.resize(cfg_.vehicles);
    for (uint32_t v = 0; v < cfg_.vehicles; ++v) {
        Vehicle& veh = vehicles_[v];
        veh.period_us = period_us;
        veh.epoch0_slot_phase = static_cast<uint32_t>(setup_rng_.next_u64() % period_slots);
        veh.revoked = v < revoked_n;

        std::array<uint8_t, 32> seed = setup_rng_.take<32>();
        switch (cfg_.scheme) {
            case Scheme::Saltv: {
                auto batch = crypto::issue_pseudonym_batch(2, ta_, {0, 1ull << 40}, setup_rng_);
                if (veh.revoked) {
                    filter_->insert(revocation::derive_rid(batch[0].cert.pk_v, sigma_));
                }
                obu::SenderConfig scfg;
                scfg.cell_id = 1;
                scfg.boot_period = cfg_.r;
                scfg.disclosure_delay = cfg_.d;
                scfg.reveal_window = cfg_.w;
                scfg.slot_len_ms = cfg_.slot_ms;
                veh.saltv = std::make_unique<obu::Sender>(seed, std::move(batch), scfg);
                veh.saltv->adopt_epoch(0, sigma_);
                break;
            }
            case Scheme::Ecdsa: {
                auto batch = crypto::issue_pseudonym_batch(1, ta_, {0, 1ull << 40}, setup_rng_);
                if (veh.revoked) {
                    filter_->insert(revocation::derive_rid(batch[0].cert.pk_v, sigma_));
                }
                veh.ecdsa = std::make_unique<baselines::EcdsaSender>(std::move(batch[0]));
                break;
            }
            case Scheme::Tesla: {
                baselines::TeslaSenderConfig tcfg;
                tcfg.cell_id = 1;
                tcfg.disclosure_delay = cfg_.d;
                tcfg.reveal_window = cfg_.w;
                veh.tesla = std::make_unique<baselines::TeslaSender>(seed, tcfg);
                veh.tesla->adopt_epoch(0);
                break;
            }
            case Scheme::Vast: {
                auto batch = crypto::issue_pseudonym_batch(1, ta_, {0, 1ull << 40}, setup_rng_);
                baselines::TeslaSenderConfig tcfg;
                tcfg.cell_id = 1;
                tcfg.disclosure_delay = cfg_.d;
                tcfg.reveal_window = cfg_.w;
                veh.vast = std::make_unique<baselines::VastSender>(seed, std::move(batch[0]),
                                                                   cfg_.r, tcfg);
                veh.vast->adopt_epoch(0);
                break;
            }
        }
    }

    uint32_t monitor_count =
        cfg_.monitors == 0 ? cfg_.vehicles : std::min(cfg_.monitors, cfg_.vehicles);
    auto filter_shared = std::make_shared<const revocation::RevocationFilter>(*filter_);
    for (uint32_t i = 0; i < monitor_count; ++i) {
        Monitor mon;
        mon.vehicle = i;
        switch (cfg_.scheme) {
            case Scheme::Saltv: {
                verifier::ReceiverConfig rcfg;
                rcfg.cell_id = 1;
                rcfg.whitelist_ttl_us = static_cast<uint64_t>(cfg_.tw_ms) * 1000;
                rcfg.reveal_window = cfg_.w;
                mon.saltv = std::make_unique<verifier::Receiver>(ta_.public_point, rcfg);
                break;
            }
            case Scheme::Ecdsa:
                mon.ecdsa = std::make_unique<baselines::EcdsaReceiver>(ta_.public_point,
                                                                       filter_shared, sigma_);
                break;
            case Scheme::Tesla: {
                baselines::TeslaReceiverConfig tcfg;
                tcfg.cell_id = 1;
                tcfg.disclosure_delay = cfg_.d;
                tcfg.reveal_window = cfg_.w;
                tcfg.slot_len_ms = cfg_.slot_ms;
                mon.tesla = std::make_unique<baselines::TeslaReceiver>(tcfg);
                break;
            }
            case Scheme::Vast: {
                baselines::TeslaReceiverConfig tcfg;
                tcfg.cell_id = 1;
                tcfg.disclosure_delay = cfg_.d;
                tcfg.reveal_window = cfg_.w;
                tcfg.slot_len_ms = cfg_.slot_ms;
                mon.vast = std::make_unique<baselines::VastReceiver>(ta_.public_point, tcfg);
                break;
            }
        }
        monitors_.push_back(std::move(mon));
    }
    if (cfg_.adversary == AdversaryKind::Replay && cfg_.scheme == Scheme::Saltv) {
        Monitor observer;
        observer.vehicle = cfg_.vehicles;  // not a sender
        observer.attack_observer = true;
        verifier::ReceiverConfig rcfg;
        rcfg.cell_id = 2;  // spatial-replay detection
        rcfg.whitelist_ttl_us = static_cast<uint64_t>(cfg_.tw_ms) * 1000;
        rcfg.reveal_window = cfg_.w;
        observer.saltv = std::make_unique<verifier::Receiver>(ta_.public_point, rcfg);
        monitors_.push_back(std::move(observer));
    }
    rx_stats_.resize(monitors_.size());
    m_.monitors_used = monitor_count;

    // schedule the event horizon
    if (cfg_.scheme == Scheme::Saltv) {
        uint64_t anchor_period = static_cast<uint64_t>(1e6 / cfg_.anchor_hz);
        for (uint64_t t = 0; t <= end_us_; t += anchor_period) schedule(t, EventKind::Anchor, 0);
    }
    for (uint32_t v = 0; v < cfg_.vehicles; ++v) {
        schedule(static_cast<uint64_t>(vehicles_[v].epoch0_slot_phase) * slot_us(),
                 EventKind::Send, v);
    }
}

void Simulation::process_anchor(uint64_t t) {
    wire::AnchorFrame anchor = rsu_->build_anchor(*filter_, anchor_params_, t);
    Broadcast b;
    b.frames.push_back(make_channel_frame(FrameKind::SaltvAnchor, cfg_.vehicles,
                                          wire::encode(anchor), false));
    broadcast(b, t);
}

void Simulation::process_send(uint32_t v, uint64_t t) {
    if (t >= end_us_) return;
    Vehicle& veh = vehicles_[v];
    uint32_t slot = slot_at(t);
    Bytes payload(cfg_.payload_bytes, static_cast<uint8_t>(0x40 + (v & 0x3f)));

    Broadcast b;
    switch (cfg_.scheme) {
        case Scheme::Saltv: {
            veh.saltv->on_slot_tick(slot);
            obu::TxBundle bundle = veh.saltv->send_message(payload, false);
            b.frames.push_back(make_channel_frame(FrameKind::SaltvData, v,
                                                  wire::encode(*bundle.data), false));
            if (bundle.boot) {
                b.frames.push_back(make_channel_frame(FrameKind::SaltvBoot, v,
                                                      wire::encode(*bundle.boot), false));
            }
            if (bundle.reveal) {
                b.frames.push_back(make_channel_frame(FrameKind::SaltvReveal, v,
                                                      wire::encode(*bundle.reveal), false));
            }
            break;
        }
        case Scheme::Ecdsa: {
            auto frame = veh.ecdsa->make_message(0, slot, payload);
            b.frames.push_back(make_channel_frame(FrameKind::EcdsaMsg, v,
                                                  baselines::encode(frame), false));
            break;
        }
        case Scheme::Tesla: {
            veh.tesla->on_slot_tick(slot);
            auto frame = veh.tesla->make_data(payload);
            b.frames.push_back(make_channel_frame(FrameKind::TeslaData, v,
                                                  baselines::encode(frame), false));
            if (auto r = veh.tesla->collect_reveal()) {
                b.frames.push_back(make_channel_frame(FrameKind::TeslaReveal, v,
                                                      baselines::encode(*r), false));
            }
            break;
        }
        case Scheme::Vast: {
            veh.vast->on_slot_tick(slot);
            auto bundle = veh.vast->send_message(payload);
            if (bundle.signed_data) {
                b.frames.push_back(make_channel_frame(FrameKind::VastSigned, v,
                                                      baselines::encode(*bundle.signed_data),
                                                      false));
            }
            if (bundle.data) {
                b.frames.push_back(make_channel_frame(FrameKind::VastData, v,
                                                      baselines::encode(*bundle.data), false));
            }
            if (bundle.reveal) {
                b.frames.push_back(make_channel_frame(FrameKind::VastReveal, v,
                                                      baselines::encode(*bundle.reveal), false));
            }
            break;
        }
    }
    broadcast(b, t);
    maybe_inject(b, t);

    if (cfg_.scheme != Scheme::Ecdsa) {
        schedule((static_cast<uint64_t>(slot) + cfg_.d) * slot_us(), EventKind::Reveal, v);
    }
    schedule(t + veh.period_us, EventKind::Send, v);
}

void Simulation::process_reveal(uint32_t v, uint64_t t) {
    Vehicle& veh = vehicles_[v];
    uint32_t slot = slot_at(t);
    Broadcast b;
    switch (cfg_.scheme) {
        case Scheme::Saltv: {
            if (slot > veh.saltv->current_slot()) veh.saltv->on_slot_tick(slot);
            if (auto r = veh.saltv->collect_reveal()) {
                b.frames.push_back(make_channel_frame(FrameKind::SaltvReveal, v,
                                                      wire::encode(*r), false));
            }
            break;
        }
        case Scheme::Tesla: {
            if (auto r = veh.tesla->collect_reveal()) {
                b.frames.push_back(make_channel_frame(FrameKind::TeslaReveal, v,
                                                      baselines::encode(*r), false));
            }
            break;
        }
        case Scheme::Vast: {
            if (auto r = veh.vast->collect_reveal()) {
                b.frames.push_back(make_channel_frame(FrameKind::VastReveal, v,
                                                      baselines::encode(*r), false));
            }
            break;
        }
        case Scheme::Ecdsa:
            break;
    }
    if (!b.frames.empty()) {
        broadcast(b, t);
        maybe_inject(b, t);
    }
}

void Simulation::account_frame(const ChannelFrame& f) {
    if (f.attack) {
        ++m_.attack_frames_injected;
        return;  // attack traffic is not part of the scheme's byte budget
    }
    switch (f.kind) {
        case FrameKind::SaltvData:
            ++m_.frames_data;
            m_.bytes_data += f.wire_bytes;
            break;
        case FrameKind::SaltvBoot:
            ++m_.frames_boot;
            m_.bytes_boot += f.wire_bytes;
            break;
        case FrameKind::SaltvReveal:
        case FrameKind::TeslaReveal:
        case FrameKind::VastReveal:
            ++m_.frames_reveal;
            m_.bytes_reveal += f.wire_bytes;
            break;
        case FrameKind::SaltvAnchor:
            ++m_.frames_anchor;
            m_.bytes_anchor += f.wire_bytes;
            break;
        case FrameKind::EcdsaMsg:
        case FrameKind::VastSigned:
            ++m_.frames_signed;
            m_.bytes_signed += f.wire_bytes;
            break;
        case FrameKind::TeslaData:
        case FrameKind::VastData:
            ++m_.frames_data;
            m_.bytes_data += f.wire_bytes;
            break;
    }
}

void Simulation::broadcast(const Broadcast& b, uint64_t t) {
    for (const auto& f : b.frames) account_frame(f);

    bool attack_broadcast = !b.frames.empty() && b.frames.front().attack;
    bool has_anchor = !b.frames.empty() && b.frames.front().kind == FrameKind::SaltvAnchor;
    for (size_t mi = 0; mi < monitors_.size(); ++mi) {
        Monitor& mon = monitors_[mi];
        // the out-of-cell observer hears the attacker and the RSU only
        if (mon.attack_observer && !attack_broadcast && !has_anchor) continue;
        std::vector<const ChannelFrame*> delivered;
        for (const auto& f : b.frames) {
            if (!mon.attack_observer && f.sender == mon.vehicle) break;  // own transmission
            if (lost()) {
                ++m_.dropped_by_loss;
                continue;
            }
            delivered.push_back(&f);
        }
        if (!delivered.empty()) deliver(mon, mi, delivered, t);
    }
}

void Simulation::deliver(Monitor& mon, size_t mon_index,
                         const std::vector<const ChannelFrame*>& frames, uint64_t t) {
    switch (cfg_.scheme) {
        case Scheme::Saltv: {
            const ChannelFrame* data = nullptr;
            const ChannelFrame* boot = nullptr;
            for (const auto* f : frames) {
                if (f->kind == FrameKind::SaltvData) data = f;
                if (f->kind == FrameKind::SaltvBoot) boot = f;
            }
            for (const auto* f : frames) {
                if (f->kind == FrameKind::SaltvAnchor) mon.saltv->on_anchor(*f->anchor, t);
            }
            if (boot) {
                auto verdict = mon.saltv->on_boot(*boot->boot, data ? data->data.get() : nullptr,
                                                  t);
                if (!mon.attack_observer) {
                    switch (verdict) {
                        case verifier::BootVerdict::Accepted: ++m_.boots_accepted_full; break;
                        case verifier::BootVerdict::AcceptedRefresh: ++m_.boots_refreshed; break;
                        default: ++m_.boots_rejected; break;
                    }
                }
            }
            if (data) {
                if (!data->attack && !mon.attack_observer) ++m_.deliveries_data;
                ++rx_stats_[mon_index].messages;
                DataStatus st = mon.saltv->on_data(*data->data, t, data->frame_id);
                if (data->sender < vehicles_.size() && vehicles_[data->sender].revoked) {
                    ++m_.revoked_sender_deliveries;
                    if (st == DataStatus::ImmediateAuth) ++m_.revoked_sender_immediate;
                }
            }
            for (const auto* f : frames) {
                if (f->kind == FrameKind::SaltvReveal) mon.saltv->on_reveal(*f->reveal, t);
            }
            break;
        }
        case Scheme::Ecdsa: {
            for (const auto* f : frames) {
                if (!f->attack) ++m_.deliveries_data;
                ++rx_stats_[mon_index].messages;
                mon.ecdsa->receive(*f->ecdsa, t, f->frame_id);
            }
            break;
        }
        case Scheme::Tesla: {
            for (const auto* f : frames) {
                if (f->kind == FrameKind::TeslaData) {
                    if (!f->attack) ++m_.deliveries_data;
                    ++rx_stats_[mon_index].messages;
                    mon.tesla->on_data(*f->tesla_data, t, f->frame_id);
                } else if (f->kind == FrameKind::TeslaReveal) {
                    mon.tesla->on_reveal(*f->tesla_reveal, t);
                }
            }
            break;
        }
        case Scheme::Vast: {
            for (const auto* f : frames) {
                if (f->kind == FrameKind::VastData) {
                    if (!f->attack) ++m_.deliveries_data;
                    ++rx_stats_[mon_index].messages;
                    mon.vast->on_data(*f->tesla_data, t, f->frame_id);
                } else if (f->kind == FrameKind::VastSigned) {
                    if (!f->attack) ++m_.deliveries_data;
                    ++rx_stats_[mon_index].messages;
                    mon.vast->on_signed(*f->vast_signed, t, f->frame_id);
                } else if (f->kind == FrameKind::VastReveal) {
                    mon.vast->on_reveal(*f->tesla_reveal, t);
                }
            }
            break;
        }
    }
    fold_events(mon, mon_index, t);
}

void Simulation::fold_events(Monitor& mon, size_t mon_index, uint64_t t) {
    (void)mon_index;
    (void)t;
    std::vector<VerdictEvent> events;
    switch (cfg_.scheme) {
        case Scheme::Saltv: events = mon.saltv->drain_events(); break;
        case Scheme::Ecdsa: events = mon.ecdsa->drain_events(); break;
        case Scheme::Tesla: events = mon.tesla->drain_events(); break;
        case Scheme::Vast: events = mon.vast->drain_events(); break;
    }
    for (const auto& e : events) {
        bool attack = attack_ids_.count(e.frame_id) > 0;
        bool authenticated = e.status == DataStatus::StrongAuth ||
                             e.status == DataStatus::ImmediateAuth;
        if (attack || mon.attack_observer) {
            if (authenticated) ++m_.attack_frames_accepted;
            continue;
        }
        if (e.retroactive_reject) ++m_.retroactive_rejections;
        switch (e.status) {
            case DataStatus::StrongAuth:
                ++m_.strong_final;
                if (e.was_immediate) ++m_.immediate_final;
                break;
            case DataStatus::ImmediateAuth:
                ++m_.immediate_final;
                ++m_.immediate_unconfirmed;
                break;
            case DataStatus::Rejected:
                ++m_.rejects_by_reason[verifier::to_string(e.reason)];
                break;
            default:
                break;
        }
        if (e.received_at_us >= warmup_us_) {
            ++ratio_denominator_;
            if (e.was_immediate || e.status == DataStatus::ImmediateAuth) {
                ++ratio_immediate_;
                if (authenticated) {
                    ++delay_samples_;  // immediate: zero authentication delay
                }
            } else if (e.status == DataStatus::StrongAuth) {
                ++delay_samples_;
                delay_sum_us_ += static_cast<double>(e.finalized_at_us - e.received_at_us);
            }
        }
    }
}

void Simulation::maybe_inject(const Broadcast& b, uint64_t t) {
    if (cfg_.adversary == AdversaryKind::None ||
        cfg_.adversary == AdversaryKind::RevokedSender) {
        return;
    }
    if (m_.attack_frames_injected + injections_.size() >= attack_budget_) return;

    auto copy_as_attack = [&](const ChannelFrame& f) {
        ChannelFrame a = f;
        a.frame_id = next_frame_id_++;
        a.attack = true;
        attack_ids_.insert(a.frame_id);
        return a;
    };

    switch (cfg_.adversary) {
        case AdversaryKind::Replay: {
            for (const auto& f : b.frames) {
                if (f.kind != FrameKind::SaltvData && f.kind != FrameKind::TeslaData &&
                    f.kind != FrameKind::VastData) {
                    continue;
                }
                // intra-slot duplicate, and a stale copy five slots later
                Broadcast now_b{{copy_as_attack(f)}};
                injections_.push_back(std::move(now_b));
                schedule(t, EventKind::Inject, 0, static_cast<uint32_t>(injections_.size() - 1));
                Broadcast later_b{{copy_as_attack(f)}};
                injections_.push_back(std::move(later_b));
                schedule(t + 5 * slot_us(), EventKind::Inject, 0,
                         static_cast<uint32_t>(injections_.size() - 1));
            }
            break;
        }
        case AdversaryKind::Tamper: {
            for (const auto& f : b.frames) {
                if (f.kind != FrameKind::SaltvData && f.kind != FrameKind::TeslaData &&
                    f.kind != FrameKind::VastData && f.kind != FrameKind::EcdsaMsg) {
                    continue;
                }
                Bytes bytes;
                switch (f.kind) {
                    case FrameKind::SaltvData: bytes = wire::encode(*f.data); break;
                    case FrameKind::EcdsaMsg: bytes = baselines::encode(*f.ecdsa); break;
                    default: bytes = baselines::encode(*f.tesla_data); break;
                }
                size_t bit = channel_rng_() % (bytes.size() * 8);
                bytes[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
                // undecodable mutations are dead on arrival; count and skip
                ChannelFrame a;
                bool decodable = true;
                try {
                    a = make_channel_frame(f.kind, f.sender, bytes, true);
                } catch (const std::logic_error&) {
                    decodable = false;
                    ++m_.attack_frames_injected;
                }
                if (decodable) {
                    attack_ids_.insert(a.frame_id);
                    injections_.push_back(Broadcast{{std::move(a)}});
                    schedule(t, EventKind::Inject, 0,
                             static_cast<uint32_t>(injections_.size() - 1));
                }
            }
            break;
        }
        case AdversaryKind::ForgeKey: {
            for (const auto& f : b.frames) {
                // strike while the frames are still cached: claim the key for
                // a just-broadcast DATA slot before the honest disclosure
                if (f.kind == FrameKind::SaltvData) {
                    wire::RevealFrame forged;
                    forged.epoch = f.data->meta.epoch;
                    forged.oldest_slot = f.data->meta.slot;
                    crypto::MacKey fake{};
                    for (auto& byte : fake) byte = static_cast<uint8_t>(channel_rng_());
                    forged.keys = {fake};
                    ChannelFrame a = make_channel_frame(FrameKind::SaltvReveal, f.sender,
                                                        wire::encode(forged), true);
                    attack_ids_.insert(a.frame_id);
                    injections_.push_back(Broadcast{{std::move(a)}});
                    schedule(t, EventKind::Inject, 0,
                             static_cast<uint32_t>(injections_.size() - 1));
                } else if (f.kind == FrameKind::TeslaData || f.kind == FrameKind::VastData) {
                    TeslaRevealFrame forged;
                    forged.epoch = f.tesla_data->epoch;
                    forged.oldest_slot = f.tesla_data->slot;
                    crypto::MacKey fake{};
                    for (auto& byte : fake) byte = static_cast<uint8_t>(channel_rng_());
                    forged.keys = {fake};
                    ChannelFrame a = make_channel_frame(
                        f.kind == FrameKind::TeslaData ? FrameKind::TeslaReveal
                                                       : FrameKind::VastReveal,
                        f.sender, baselines::encode(forged), true);
                    attack_ids_.insert(a.frame_id);
                    injections_.push_back(Broadcast{{std::move(a)}});
                    schedule(t, EventKind::Inject, 0,
                             static_cast<uint32_t>(injections_.size() - 1));
                } else if (f.kind == FrameKind::SaltvReveal) {
                    wire::RevealFrame forged = *f.reveal;
                    for (auto& k : forged.keys) {
                        for (auto& byte : k) byte = static_cast<uint8_t>(channel_rng_());
                    }
                    ChannelFrame a = make_channel_frame(FrameKind::SaltvReveal, f.sender,
                                                        wire::encode(forged), true);
                    attack_ids_.insert(a.frame_id);
                    injections_.push_back(Broadcast{{std::move(a)}});
                    schedule(t, EventKind::Inject, 0,
                             static_cast<uint32_t>(injections_.size() - 1));
                } else if (f.kind == FrameKind::TeslaReveal || f.kind == FrameKind::VastReveal) {
                    TeslaRevealFrame forged = *f.tesla_reveal;
                    for (auto& k : forged.keys) {
                        for (auto& byte : k) byte = static_cast<uint8_t>(channel_rng_());
                    }
                    ChannelFrame a = make_channel_frame(f.kind, f.sender,
                                                        baselines::encode(forged), true);
                    attack_ids_.insert(a.frame_id);
                    injections_.push_back(Broadcast{{std::move(a)}});
                    schedule(t, EventKind::Inject, 0,
                             static_cast<uint32_t>(injections_.size() - 1));
                }
            }
            break;
        }
        default:
            break;
    }
}

SchemeMetrics Simulation::run() {
    setup();

    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        if (ev.t_us > end_us_) continue;
        switch (ev.kind) {
            case EventKind::Anchor: process_anchor(ev.t_us); break;
            case EventKind::Send: process_send(ev.actor, ev.t_us); break;
            case EventKind::Reveal: process_reveal(ev.actor, ev.t_us); break;
            case EventKind::Inject: broadcast(injections_[ev.inject], ev.t_us); break;
        }
    }

    // flush unresolved cache entries and drain the remaining events
    for (size_t mi = 0; mi < monitors_.size(); ++mi) {
        Monitor& mon = monitors_[mi];
        switch (cfg_.scheme) {
            case Scheme::Saltv: mon.saltv->finalize(end_us_); break;
            case Scheme::Tesla: mon.tesla->finalize(end_us_); break;
            case Scheme::Vast: mon.vast->finalize(end_us_); break;
            case Scheme::Ecdsa: break;
        }
        fold_events(mon, mi, end_us_);
    }

    // per-receiver modeled verification cost
    std::vector<double> per_rx_us;
    for (size_t mi = 0; mi < monitors_.size(); ++mi) {
        Monitor& mon = monitors_[mi];
        if (mon.attack_observer) continue;
        verifier::OpCounts ops;
        uint64_t commit_mismatch = 0;
        size_t hw_cache = 0, hw_whitelist = 0, hw_ledger = 0;
        switch (cfg_.scheme) {
            case Scheme::Saltv:
                ops = mon.saltv->op_counts();
                commit_mismatch = mon.saltv->commitment_mismatches();
                hw_cache = mon.saltv->high_water().cache_frames;
                hw_whitelist = mon.saltv->high_water().whitelist;
                hw_ledger = mon.saltv->high_water().ledger;
                break;
            case Scheme::Ecdsa: ops = mon.ecdsa->op_counts(); break;
            case Scheme::Tesla:
                ops = mon.tesla->op_counts();
                commit_mismatch = mon.tesla->commitment_mismatches();
                hw_cache = mon.tesla->cache_high_water();
                break;
            case Scheme::Vast: ops = mon.vast->op_counts(); break;
        }
        m_.op_counts += ops;
        m_.commitment_mismatches += commit_mismatch;
        m_.high_water_cache = std::max(m_.high_water_cache, hw_cache);
        m_.high_water_whitelist = std::max(m_.high_water_whitelist, hw_whitelist);
        m_.high_water_ledger = std::max(m_.high_water_ledger, hw_ledger);
        if (rx_stats_[mi].messages > 0) {
            per_rx_us.push_back(
                bench::modeled_cost_ms(ops, costs_, rx_stats_[mi].messages) * 1000.0);
        }
    }
    if (!per_rx_us.empty()) {
        std::sort(per_rx_us.begin(), per_rx_us.end());
        double sum = 0;
        for (double c : per_rx_us) sum += c;
        m_.per_receiver_cost_mean_us = sum / static_cast<double>(per_rx_us.size());
        m_.per_receiver_cost_p95_us =
            per_rx_us[std::min(per_rx_us.size() - 1,
                               static_cast<size_t>(per_rx_us.size() * 0.95))];
        m_.avg_computation_ms = m_.per_receiver_cost_mean_us / 1000.0;
    }

    if (ratio_denominator_ > 0) {
        m_.immediate_ratio =
            static_cast<double>(ratio_immediate_) / static_cast<double>(ratio_denominator_);
    }
    if (delay_samples_ > 0) {
        m_.avg_auth_delay_ms = delay_sum_us_ / static_cast<double>(delay_samples_) / 1000.0;
    }
    m_.mean_disclosure_wait_ms = static_cast<double>(cfg_.d) * cfg_.slot_ms;

    uint64_t total_frames = m_.frames_data + m_.frames_boot + m_.frames_reveal +
                            m_.frames_anchor + m_.frames_signed;
    uint64_t total_bytes = m_.bytes_data + m_.bytes_boot + m_.bytes_reveal + m_.bytes_anchor +
                           m_.bytes_signed;
    if (total_frames > 0) {
        m_.avg_frame_bytes = static_cast<double>(total_bytes) / static_cast<double>(total_frames);
    }
    uint64_t messages = m_.frames_data + m_.frames_signed;
    if (messages > 0) {
        m_.per_message_bytes =
            static_cast<double>(total_bytes - m_.bytes_anchor) / static_cast<double>(messages);
        m_.f_boot_full = static_cast<double>(m_.boots_accepted_full) /
                         static_cast<double>(std::max<uint64_t>(m_.deliveries_data, 1));
    }

    if (cfg_.scheme == Scheme::Vast) {
        m_.notes.push_back(
            "vast analytic delay mix (1-1/r)*d*T_s differs from commonly quoted 19.8 ms");
    }
    return m_;
}

}  // namespace

SchemeMetrics run(const ScenarioConfig& cfg, const bench::BenchTable& costs) {
    if (auto err = validate(cfg)) throw std::invalid_argument(*err);
    Simulation simulation(cfg, costs);
    return simulation.run();
}

}  // namespace saltv::sim
