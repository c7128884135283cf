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

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosim/ahb.hpp"

namespace cosim {

// Two verification domains. A bus component lives in exactly one of them;
// cross-domain values move only as whole-cycle snapshots, so there is no
// combinational path between the halves.
enum class Side : uint8_t { Sim = 0, Acc = 1 };

inline Side other(Side s) { return s == Side::Sim ? Side::Acc : Side::Sim; }
inline const char* to_string(Side s) { return s == Side::Sim ? "sim" : "acc"; }

// ---------------------------------------------------------------------------
// Static configuration
// ---------------------------------------------------------------------------

inline constexpr int kDefaultSlave = -1;  // built-in error responder

struct AddressRange {
    uint32_t base = 0;
    uint32_t size = 0;  // bytes, power of two
    int slave = 0;
};

struct DecoderMap {
    std::vector<AddressRange> ranges;

    /// Containing range's slave, else the default (error) slave.
    int decode(uint32_t addr) const;
    void validate(int slave_count) const;
};

struct ArbiterConfig {
    std::vector<int> priority;  // permutation of master indices, best first
    int default_grant = 0;
    void validate(int master_count) const;
};

struct TxnDesc {
    uint32_t gap = 0;  // idle cycles before this transaction requests the bus
    bool write = false;
    uint32_t addr = 0;
    Hburst burst = Hburst::Single;
    Hsize size = Hsize::Word;
    uint32_t beats = 0;                // INCR length; fixed bursts derive it
    std::vector<uint8_t> busy_before;  // BUSY cycles inserted before beat i (i>=1)
    std::vector<uint32_t> data;        // write payload, one word per beat

    uint32_t total_beats() const {
        auto b = burst_beats(burst);
        return b ? *b : beats;
    }
};

struct MasterScript {
    std::vector<TxnDesc> txns;
};

struct SlaveCfg {
    uint32_t fifo_depth = 16;
    uint32_t service_rate = 16;  // words drained per cycle
    uint32_t wait_states = 0;    // fixed wait states per beat
};

struct SidebandCfg {
    std::string name;
    Side owner = Side::Sim;
    std::vector<uint64_t> toggles;  // cycles at which the line flips
};

struct FabricConfig {
    std::vector<Side> master_domain;       // one entry per master
    std::vector<MasterScript> scripts;     // one entry per master
    std::vector<Side> slave_domain;        // one entry per slave
    std::vector<SlaveCfg> slave_cfg;       // one entry per slave
    DecoderMap decoder;
    ArbiterConfig arbiter;
    std::vector<SidebandCfg> sideband;

    int master_count() const { return static_cast<int>(master_domain.size()); }
    int slave_count() const { return static_cast<int>(slave_domain.size()); }
    uint32_t master_bits(Side s) const;
    uint32_t sideband_bits(Side s) const;
    bool has_sideband() const { return !sideband.empty(); }
    void validate() const;
};

/// Deterministic filler for write payload words left unspecified in scripts.
uint32_t auto_data_word(int master, size_t txn, uint32_t beat);

// ---------------------------------------------------------------------------
// Replicated arbitration + pipeline state. Updated only from committed
// snapshots, so both half buses (and the leader's speculative copy) evolve
// identical grant/select decisions from identical MSABS histories. The grant
// is registered: the grant for cycle t+1 is a function of requests and burst
// state through cycle t.
// ---------------------------------------------------------------------------

struct DataPhase {
    bool active = false;
    int owner = -1;
    uint32_t addr = 0;
    bool write = false;
    Hsize size = Hsize::Word;
    uint32_t beat = 0;
    bool last_beat = false;  // final beat of a fixed-length burst
};

struct BurstTrack {
    bool active = false;
    int owner = -1;
    uint32_t start_addr = 0;
    Hsize size = Hsize::Word;
    Hburst burst = Hburst::Single;
    uint32_t beats_total = 0;   // 0 for INCR
    uint32_t beats_issued = 0;  // accepted address beats
};

struct PipelineState {
    int grant = 0;       // granted master for the upcoming cycle
    int prev_grant = 0;  // granted master of the last committed cycle
    DataPhase data_phase;
    BurstTrack burst;

    // last committed address-phase drive, for the hold-while-stalled check
    bool have_prev = false;
    MsabsSnapshot prev;

    /// Grant applied to the next cycle. Owner retained while a burst is in
    /// flight; otherwise highest-priority requester, else the default master.
    static int arbitrate(const ArbiterConfig& cfg, uint32_t hbusreq,
                         const PipelineState& state);

    /// Advance one clock edge from the full committed snapshot.
    /// `strict` enables the protocol-violation checks; speculative commits
    /// under injected noise run non-strict.
    void commit(const FabricConfig& cfg, const MsabsSnapshot& snap, bool strict);
};

// ---------------------------------------------------------------------------
// Component state
// ---------------------------------------------------------------------------

struct MasterState {
    size_t txn_i = 0;
    uint32_t beat_i = 0;  // next beat index to issue within the current burst
    bool bursting = false;
    uint32_t gap_left = 0;
    uint32_t busy_left = 0;
    std::deque<uint32_t> pending_wdata;  // issued write beats not yet completed
    uint64_t read_hash = 14695981039346656037ull;

    bool done(const MasterScript& s) const { return txn_i >= s.txns.size(); }
};

/// Producer-consumer wait-state model, shared between a real slave and the
/// predictor's mirror of a remote slave.
struct SlaveFlow {
    uint32_t wait_left = 0;
    bool beat_in_service = false;
    uint32_t occupancy = 0;
};

bool slave_ready(const SlaveCfg& cfg, const SlaveFlow& f);

struct SlaveState {
    SlaveFlow flow;
    std::map<uint32_t, uint32_t> mem;  // word-aligned address -> word
};

uint32_t mem_read_word(const std::map<uint32_t, uint32_t>& mem, uint32_t addr);
void mem_write(std::map<uint32_t, uint32_t>& mem, uint32_t addr, Hsize size,
               uint32_t wdata);

/// Sideband level at cycle t: parity of toggles at or before t.
bool sideband_level(const SidebandCfg& sb, uint64_t t);

// ---------------------------------------------------------------------------
// Domain: one verification domain's half of the bus (or the whole bus, for
// the monolithic reference). Holds the components placed on its side plus
// the replicated arbiter/decoder/pipeline and, for remote slaves, memoryless
// flow mirrors that make their responses predictable.
//
// evaluate(t) produces the fields driven locally at cycle t from state
// committed through t-1 only; commit(t) folds the full merged snapshot back
// in at the clock edge. Nothing read during evaluate crosses domains, which
// is what rules out combinational half loops.
// ---------------------------------------------------------------------------

class Domain {
public:
    Domain(const FabricConfig& cfg, std::optional<Side> filter);

    bool local_master(int i) const;
    bool local_slave(int j) const;

    /// Fields driven by components of `who` at the upcoming cycle.
    FieldMask driven_mask(Side who) const;
    /// Fields driven by this domain instance (its filter) at the upcoming cycle.
    FieldMask local_mask() const;

    /// Locally driven field values for cycle t. Pure with respect to state.
    FieldSet evaluate(uint64_t t) const;

    /// Fill bus defaults for fields nobody drives this cycle (idle data
    /// phase, or the built-in default slave's error response).
    void finalize_snapshot(MsabsSnapshot& s) const;

    /// Clock edge: fold the full snapshot into every local component, the
    /// pipeline replica and the remote-slave mirrors.
    void commit(uint64_t t, const MsabsSnapshot& snap, bool strict = true);

    uint64_t committed() const { return committed_; }
    const PipelineState& pipeline() const { return pipe_; }
    const MsabsSnapshot& last_committed() const { return last_; }
    const FabricConfig& config() const { return *cfg_; }
    std::optional<Side> filter() const { return filter_; }

    const SlaveFlow& slave_flow(int j) const { return slaves_[j].flow; }
    const std::map<uint32_t, uint32_t>& slave_memory(int j) const { return slaves_[j].mem; }
    uint64_t master_read_hash(int i) const { return masters_[i].read_hash; }

    /// Sorted (slave, addr, word) image of all local slave memories.
    std::vector<std::tuple<int, uint32_t, uint32_t>> memory_image() const;

    // Domains are value types; a checkpoint is a plain copy.

private:
    struct Drive {
        bool driving = false;
        MsabsSnapshot v;
    };
    Drive master_drive(int i, uint64_t t) const;

    const FabricConfig* cfg_;
    std::optional<Side> filter_;
    PipelineState pipe_;
    std::vector<MasterState> masters_;
    std::vector<SlaveState> slaves_;  // mirrors only (no mem writes) if remote
    MsabsSnapshot last_;
    uint64_t committed_ = 0;
};

/// Monolithic reference step: evaluate + finalize + commit in one domain
/// holding every component. Returns the cycle's snapshot.
MsabsSnapshot step_monolithic(Domain& all, uint64_t t);

/// Half-bus step: local evaluation merged with the proxy fields produced by
/// the remote half for the same cycle. Throws MissingProxyInput when the
/// proxies do not cover the remotely driven mask.
MsabsSnapshot step_half_bus(Domain& half, uint64_t t, const FieldSet& proxies,
                            bool strict = true);

// ---------------------------------------------------------------------------
// Operating-mode selection: the data-flow source leads. Reads lead from the
// addressed slave's domain, writes from the granted master's domain; an idle
// bus, an unmapped target or source and sink in one domain mean conservative.
// ---------------------------------------------------------------------------

enum class OperatingMode : uint8_t { Conservative = 0, SLA = 1, ALS = 2 };

const char* to_string(OperatingMode m);

OperatingMode mode_select(const Domain& d);

/// Leader side for a mode, if any.
std::optional<Side> leader_side(OperatingMode m);

// ---------------------------------------------------------------------------
// Predictability of the upcoming cycle, from the leader's point of view:
// true iff every field the lagger will drive is in a predictable class and
// its predictor has the state to produce it (mid-burst cursor, response
// mirror, last values). New bursts and cross-domain data cycles are not
// predictable.
// ---------------------------------------------------------------------------

bool predictable_next(const Domain& d, Side leader);

/// Predicted lagger-driven fields for the upcoming cycle (no noise).
FieldSet predict_response(const Domain& d, Side leader);

}  // namespace cosim
