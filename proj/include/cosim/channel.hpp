/*
 * Copyright 2026 The cosim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "cosim/ahb.hpp"
#include "cosim/pack.hpp"

namespace cosim {

// ---------------------------------------------------------------------------
// Cost model: every channel access pays a fixed startup plus a per-word
// payload cost that depends on direction. Startup dominates by two to three
// orders of magnitude, which is what makes batching worthwhile at all.
// ---------------------------------------------------------------------------

enum class Direction : uint8_t { S2A = 0, A2S = 1 };

inline const char* to_string(Direction d) { return d == Direction::S2A ? "s2a" : "a2s"; }

struct CostModel {
    double startup_s  = 12.2e-6;
    double s2a_word_s = 49.95e-9;
    double a2s_word_s = 75.73e-9;

    double word_cost(Direction d) const {
        return d == Direction::S2A ? s2a_word_s : a2s_word_s;
    }
};

/// Virtual seconds for one access carrying `words` payload words.
inline double transfer_time(const CostModel& cm, Direction d, double words) {
    return cm.startup_s + words * cm.word_cost(d);
}

// ---------------------------------------------------------------------------
// Packets
// ---------------------------------------------------------------------------

enum class PacketKind : uint8_t {
    ConvOut,         // conventional per-cycle exchange, simulator half
    ConvIn,          // conventional per-cycle exchange, accelerator half
    LobFlush,        // batched leader outputs + predictions
    LaggerResponse,  // lagger outputs for the final entry of a flush
    ReportAllOk,     // all predictions correct (carries LaggerResponse data)
    ReportFail,      // prediction failure report
    FailActual,      // actual lagger outputs piggybacked on a failure report
};

const char* to_string(PacketKind k);

/// One cycle of leader outputs plus, except on the final entry of a flush,
/// the predicted lagger response for the same cycle.
struct LobEntry {
    uint64_t cycle = 0;
    FieldSet leader_outputs;
    std::optional<FieldSet> prediction;

    bool operator==(const LobEntry&) const = default;
};

struct ChannelPacket {
    PacketKind kind = PacketKind::ConvOut;
    Direction direction = Direction::S2A;
    uint64_t cycle = 0;              // target-clock cycle the payload refers to
    std::vector<uint32_t> payload;   // wire image
    double accounted_words = 0.0;    // cost-model words (calibrated, see docs)
    uint64_t sender_committed = 0;   // cross-check counter for desync detection
    uint32_t fail_index = 0;         // ReportFail: 1-based failing entry index
};

// ---------------------------------------------------------------------------
// Flush codec. Layout: [count, {cycle_lo, cycle_hi, out_mask, out_words...,
// has_pred, [pred_mask, pred_words...]} x count]. Every entry but the last
// must carry a prediction and the last must not; violations throw
// MalformedFlush on both encode and decode.
// ---------------------------------------------------------------------------

ChannelPacket encode_lob_flush(const std::vector<LobEntry>& entries,
                               Direction direction, size_t sideband_count,
                               size_t lob_depth);

std::vector<LobEntry> decode_lob_flush(const ChannelPacket& packet,
                                       size_t sideband_count);

/// Payload encoding for conventional and response packets: [mask, words...].
std::vector<uint32_t> encode_fieldset(const FieldSet& fs);
FieldSet decode_fieldset(const std::vector<uint32_t>& words, size_t sideband_count);

// ---------------------------------------------------------------------------
// Ledger: per-access cost accounting. Accumulated time is exactly the sum of
// transfer_time over the recorded accesses.
// ---------------------------------------------------------------------------

struct LedgerEntry {
    uint64_t cycle = 0;
    PacketKind kind = PacketKind::ConvOut;
    Direction direction = Direction::S2A;
    double words = 0.0;
    double time_s = 0.0;
    double cumulative_s = 0.0;  // filled when rows are finalized in order
};

struct ChannelLedger {
    uint64_t access_count[2] = {0, 0};  // indexed by Direction
    double payload_words[2] = {0.0, 0.0};
    double accumulated_s = 0.0;
    std::vector<LedgerEntry> entries;

    double record(const CostModel& cm, const ChannelPacket& p) {
        double t = transfer_time(cm, p.direction, p.accounted_words);
        auto d = static_cast<int>(p.direction);
        access_count[d] += 1;
        payload_words[d] += p.accounted_words;
        accumulated_s += t;
        entries.push_back({p.cycle, p.kind, p.direction, p.accounted_words, t, 0.0});
        return t;
    }

    uint64_t total_accesses() const { return access_count[0] + access_count[1]; }
};

// ---------------------------------------------------------------------------
// In-process FIFO joining the two channel wrappers. Single producer, single
// consumer. In cooperative (single-threaded) mode pops never wait; in the
// two-thread mode they block on a condition variable.
// ---------------------------------------------------------------------------

class PacketQueue {
public:
    explicit PacketQueue(bool blocking = false) : blocking_(blocking) {}

    void push(ChannelPacket p) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            q_.push_back(std::move(p));
        }
        if (blocking_) cv_.notify_one();
    }

    bool empty() const {
        std::lock_guard<std::mutex> lk(mu_);
        return q_.empty();
    }

    /// Non-blocking pop; nullopt when empty.
    std::optional<ChannelPacket> try_pop() {
        std::lock_guard<std::mutex> lk(mu_);
        if (q_.empty()) return std::nullopt;
        ChannelPacket p = std::move(q_.front());
        q_.pop_front();
        return p;
    }

    /// Blocking pop (two-thread mode only).
    ChannelPacket pop_wait() {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return !q_.empty(); });
        ChannelPacket p = std::move(q_.front());
        q_.pop_front();
        return p;
    }

    bool blocking() const { return blocking_; }

private:
    bool blocking_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<ChannelPacket> q_;
};

}  // namespace cosim
