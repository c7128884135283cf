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

#include <optional>
#include <string>
#include <vector>

#include "cosim/channel.hpp"
#include "cosim/digest.hpp"
#include "cosim/fabric.hpp"
#include "cosim/rng.hpp"

namespace cosim {

// The synchronization layer: one Channel Wrapper (CW) per verification
// domain. The two CWs normally leapfrog in conservative lockstep, one
// whole-cycle exchange per direction per cycle. When the data-flow source
// side can predict everything the other side will drive, it becomes the
// leader: it runs ahead, feeding itself predictions and logging its own
// outputs plus those predictions into the Leader Output Buffer. The LOB is
// flushed as one batched transfer; the lagger replays it, checking each
// prediction, and answers with a single report. A wrong prediction rolls
// the leader back to the checkpoint taken at the transition start and
// replays the verified prefix. Committed traces are therefore bit-identical
// to the monolithic reference no matter how often predictions fail.
//
// Both CWs derive every path decision from replicated deterministic state
// (committed snapshots plus the shared pipeline replica), so they never need
// a side channel to agree on what happens next.

enum class TransitionPhase : uint8_t { RA, FU, RB, RF };
const char* to_string(TransitionPhase p);

enum class CwPath : uint8_t { C, P, S, L, R, F };

enum class CwStation : uint8_t {
    Start,
    End,
    RbStore,          // P-5
    ConservativeHop,  // P-6
    Flush,            // S-2
    GetResponse,      // S-3
    StoreActual,      // S-5
    RequestRestore,   // S-6
    PredictionCheck,  // L-1
    ReportFail,       // L-5
    WaitLeader,       // L-6
    SendOutput,       // R-2
    ReadInput,        // C-3 / R-3
};

// Shared protocol stage, updated identically on both sides after every
// committed cycle or transition.
enum class Stage : uint8_t { Conv, Hop, Ra };

struct CtlState {
    OperatingMode mode = OperatingMode::Conservative;
    Stage stage = Stage::Conv;
};

/// Next stage after the cycle/transition that just committed. Pure function
/// of replicated state: both CWs stay in lockstep by construction.
CtlState next_ctl(const CtlState& cur, const Domain& d);

/// Path taken at the START station of a unit cycle. Throws IllegalState for
/// role/stage combinations outside the state diagram.
CwPath choose_path(bool leader, Stage stage, bool predictable, size_t lob_len,
                   size_t lob_depth, bool entries_pending, bool all_consumed_ok,
                   bool post_restore);

/// Lagger-side prediction check: bit-equality over the predicted fields only.
bool check_prediction(const LobEntry& entry, const FieldSet& actual);

// ---------------------------------------------------------------------------
// Checkpointing: a restorable deep copy of one domain. The CW's own control
// state (and its noise stream) is never part of the blob.
// ---------------------------------------------------------------------------

struct Checkpoint {
    uint64_t cycle = 0;
    uint32_t variable_count = 0;
    Domain blob;
};

Checkpoint store_checkpoint(const Domain& d, uint32_t variable_count);
void restore_checkpoint(Domain& d, const Checkpoint& cp);

// ---------------------------------------------------------------------------
// Per-run accounting
// ---------------------------------------------------------------------------

struct TimeBuckets {
    double sim = 0.0;
    double acc = 0.0;
    double store = 0.0;
    double restore = 0.0;
    double channel = 0.0;

    double total() const { return sim + acc + store + restore + channel; }
    void add(const TimeBuckets& o) {
        sim += o.sim;
        acc += o.acc;
        store += o.store;
        restore += o.restore;
        channel += o.channel;
    }
};

struct TransitionRow {
    uint64_t id = 0;
    uint64_t base_cycle = 0;
    OperatingMode mode = OperatingMode::Conservative;
    uint64_t committed = 0;
    uint64_t predictions = 0;
    int64_t failure_index = -1;  // 1-based entry index, -1 on success
    uint32_t packets = 2;
    double virtual_time_s = 0.0;
    std::string phases;
};

struct CwStats {
    uint64_t conservative_cycles = 0;
    uint64_t hop_cycles = 0;
    uint64_t ra_cycles = 0;
    uint64_t replay_cycles = 0;
    uint64_t stores = 0;
    uint64_t restores = 0;
    uint64_t flushes = 0;
    uint64_t max_flush_entries = 0;
    uint64_t transitions = 0;
    uint64_t failures = 0;
    uint64_t predictions = 0;

    void add(const CwStats& o);
};

struct SyncParams {
    uint64_t n_cycles = 0;
    uint32_t lob_depth = 64;
    double p_success = 1.0;
    uint64_t seed = 1;
    CostModel cost;
    double conv_payload_words = 2.0;
    double flush_words_per_entry = 0.5;
    double report_words = 1.0;
    uint32_t rollback_variables = 1000;
    double t_cycle[2] = {1.0e-6, 1.0e-7};       // indexed by Side
    double store_cost[2] = {2.5e-9, 3.0e-11};   // per variable, by Side
    double restore_cost[2] = {1.0e-9, 3.0e-11};
    bool record_trace = true;
    bool record_paths = false;
};

// ---------------------------------------------------------------------------
// Channel Wrapper
// ---------------------------------------------------------------------------

class ChannelWrapper {
public:
    ChannelWrapper(Side side, const SyncParams& params, const FabricConfig& cfg,
                   PacketQueue& in, PacketQueue& out);

    /// Cooperative scheduling: make as much progress as possible without a
    /// missing packet; returns false if nothing could be done.
    bool advance();

    /// Thread-per-domain scheduling: run to completion with blocking reads.
    void run();

    bool finished() const { return domain_.committed() >= params_.n_cycles; }

    const Domain& domain() const { return domain_; }
    const TimeBuckets& buckets() const { return buckets_; }
    const ChannelLedger& ledger() const { return ledger_; }
    const CwStats& stats() const { return stats_; }
    const std::vector<TransitionRow>& transitions() const { return transitions_; }
    const std::vector<MsabsSnapshot>& trace() const { return trace_; }
    uint64_t trace_digest() const { return trace_digest_.value(); }
    const std::string& path_log() const { return paths_; }
    const std::vector<CwStation>& stations() const { return stations_; }

private:
    enum class Waiting : uint8_t { None, ConvPeer, Flush, Report };

    bool is_leader() const;
    Side self() const { return side_; }
    Side peer() const { return other(side_); }
    Direction send_dir() const {
        return side_ == Side::Sim ? Direction::S2A : Direction::A2S;
    }

    std::optional<ChannelPacket> fetch();
    void send(ChannelPacket&& p);
    void charge_eval();
    void do_store();
    void sink(const MsabsSnapshot& snap);
    void update_ctl();
    void note(CwStation st);

    void start_next();
    void begin_conservative(bool store_after);
    void complete_conservative(const ChannelPacket& p);
    void leader_run_ahead();
    void leader_resolve(const ChannelPacket& p);
    void lagger_consume(const ChannelPacket& p);
    void perturb(FieldSet& prediction);
    void log_transition(uint64_t committed, uint64_t predictions,
                        int64_t failure_index, const char* phases);

    Side side_;
    SyncParams params_;
    Domain domain_;
    PacketQueue* in_;
    PacketQueue* out_;

    CtlState ctl_;
    bool chain_store_ = false;  // transition entered from a previous one
    Waiting waiting_ = Waiting::None;

    // in-flight conservative cycle
    uint64_t pending_cycle_ = 0;
    bool pending_store_ = false;
    bool pending_hop_ = false;

    // in-flight transition (leader side)
    uint64_t trans_base_ = 0;
    std::vector<LobEntry> lob_;
    std::vector<LobEntry> sent_entries_;
    std::vector<MsabsSnapshot> spec_rows_;
    std::optional<Checkpoint> checkpoint_;
    uint64_t s_cycle_ = 0;
    double trans_time_ = 0.0;

    Rng rng_;
    uint32_t perturb_rr_ = 0;

    TimeBuckets buckets_;
    ChannelLedger ledger_;
    CwStats stats_;
    std::vector<TransitionRow> transitions_;
    std::vector<MsabsSnapshot> trace_;
    Digest trace_digest_;
    std::string paths_;
    std::vector<CwStation> stations_;
};

}  // namespace cosim
