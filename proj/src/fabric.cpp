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

#include "cosim/fabric.hpp"

#include <algorithm>

namespace cosim {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

int DecoderMap::decode(uint32_t addr) const {
    for (const auto& r : ranges) {
        if (addr >= r.base && addr - r.base < r.size) return r.slave;
    }
    return kDefaultSlave;
}

void DecoderMap::validate(int slave_count) const {
    std::vector<std::pair<uint64_t, uint64_t>> spans;
    for (const auto& r : ranges) {
        if (r.size == 0 || (r.size & (r.size - 1)) != 0)
            throw ConfigError("decoder range size must be a nonzero power of two");
        if (r.slave < 0 || r.slave >= slave_count)
            throw ConfigError("decoder range names a slave that does not exist");
        spans.emplace_back(r.base, static_cast<uint64_t>(r.base) + r.size);
    }
    std::sort(spans.begin(), spans.end());
    for (size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second)
            throw ConfigError("decoder ranges overlap");
    }
}

void ArbiterConfig::validate(int master_count) const {
    if (static_cast<int>(priority.size()) != master_count)
        throw ConfigError("arbiter priority must list every master exactly once");
    std::vector<bool> seen(master_count, false);
    for (int m : priority) {
        if (m < 0 || m >= master_count || seen[m])
            throw ConfigError("arbiter priority is not a permutation of master indices");
        seen[m] = true;
    }
    if (default_grant < 0 || default_grant >= master_count)
        throw ConfigError("arbiter default grant out of range");
}

uint32_t FabricConfig::master_bits(Side s) const {
    uint32_t bits = 0;
    for (size_t i = 0; i < master_domain.size(); ++i)
        if (master_domain[i] == s) bits |= (1u << i);
    return bits;
}

uint32_t FabricConfig::sideband_bits(Side s) const {
    uint32_t bits = 0;
    for (size_t i = 0; i < sideband.size(); ++i)
        if (sideband[i].owner == s) bits |= (1u << i);
    return bits;
}

void FabricConfig::validate() const {
    if (master_domain.empty() || master_domain.size() > 32)
        throw ConfigError("need between 1 and 32 masters");
    if (scripts.size() != master_domain.size())
        throw ConfigError("one script per master required");
    if (slave_domain.size() != slave_cfg.size())
        throw ConfigError("one slave config per slave required");
    if (sideband.size() > 32) throw ConfigError("at most 32 sideband signals");
    decoder.validate(slave_count());
    arbiter.validate(master_count());

    for (size_t i = 0; i < scripts.size(); ++i) {
        for (size_t k = 0; k < scripts[i].txns.size(); ++k) {
            const TxnDesc& t = scripts[i].txns[k];
            uint32_t bytes = static_cast<uint32_t>(t.size);
            if (t.addr % bytes != 0)
                throw ConfigError("transaction address not aligned to transfer size");
            if (t.burst == Hburst::Incr && t.beats == 0)
                throw ConfigError("INCR transaction needs an explicit beat count");
            if (t.burst != Hburst::Incr && t.beats != 0 &&
                t.beats != *burst_beats(t.burst))
                throw ConfigError("beat count conflicts with fixed burst length");
            uint32_t total = t.total_beats();
            if (t.write && t.data.size() > total)
                throw ConfigError("write payload longer than the burst");
            if (!t.busy_before.empty()) {
                if (t.burst == Hburst::Single)
                    throw ConfigError("BUSY cycles are only legal inside multi-beat bursts");
                if (t.busy_before.size() > total)
                    throw ConfigError("busy list longer than the burst");
                if (t.busy_before[0] != 0)
                    throw ConfigError("BUSY cannot precede the first beat");
            }
        }
    }
    for (const auto& sb : sideband) {
        if (sb.name.empty()) throw ConfigError("sideband signal needs a name");
    }
}

uint32_t auto_data_word(int master, size_t txn, uint32_t beat) {
    uint64_t z = 0x9E3779B97F4A7C15ull * (static_cast<uint64_t>(master + 1) * 0x10001ull +
                                          (txn + 1) * 0x101ull + beat + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    return static_cast<uint32_t>(z ^ (z >> 29));
}

// ---------------------------------------------------------------------------
// Slave helpers
// ---------------------------------------------------------------------------

bool slave_ready(const SlaveCfg& cfg, const SlaveFlow& f) {
    return f.wait_left == 0 && f.occupancy < cfg.fifo_depth;
}

uint32_t mem_read_word(const std::map<uint32_t, uint32_t>& mem, uint32_t addr) {
    auto it = mem.find(addr & ~3u);
    return it == mem.end() ? 0u : it->second;
}

void mem_write(std::map<uint32_t, uint32_t>& mem, uint32_t addr, Hsize size,
               uint32_t wdata) {
    uint32_t base = addr & ~3u;
    uint32_t lane = addr & 3u;
    uint32_t cur = mem_read_word(mem, base);
    switch (size) {
        case Hsize::Word:
            cur = wdata;
            break;
        case Hsize::Halfword: {
            uint32_t sh = (lane & 2u) * 8;
            cur = (cur & ~(0xFFFFu << sh)) | ((wdata & 0xFFFFu) << sh);
            break;
        }
        case Hsize::Byte: {
            uint32_t sh = lane * 8;
            cur = (cur & ~(0xFFu << sh)) | ((wdata & 0xFFu) << sh);
            break;
        }
    }
    mem[base] = cur;
}

bool sideband_level(const SidebandCfg& sb, uint64_t t) {
    size_t n = 0;
    for (uint64_t c : sb.toggles) {
        if (c <= t) ++n;
        else break;
    }
    return (n & 1) != 0;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

int PipelineState::arbitrate(const ArbiterConfig& cfg, uint32_t hbusreq,
                             const PipelineState& state) {
    if (state.burst.active) return state.burst.owner;
    for (int m : cfg.priority)
        if (hbusreq & (1u << m)) return m;
    return cfg.default_grant;
}

void PipelineState::commit(const FabricConfig& cfg, const MsabsSnapshot& snap,
                           bool strict) {
    if (strict && have_prev && !prev.hready &&
        (prev.htrans == Htrans::Nonseq || prev.htrans == Htrans::Seq)) {
        if (snap.htrans != prev.htrans || snap.haddr != prev.haddr ||
            snap.hwrite != prev.hwrite || snap.hsize != prev.hsize ||
            snap.hburst != prev.hburst)
            throw ProtocolViolation("address phase changed while hready was low");
    }

    prev_grant = grant;

    if (snap.hready) {
        const bool final_data_completed = data_phase.active && data_phase.last_beat;

        if (snap.htrans == Htrans::Nonseq || snap.htrans == Htrans::Seq) {
            DataPhase ndp;
            ndp.active = true;
            ndp.owner = grant;
            ndp.addr = snap.haddr;
            ndp.write = snap.hwrite;
            ndp.size = snap.hsize;
            if (snap.htrans == Htrans::Nonseq) {
                burst.active = true;
                burst.owner = grant;
                burst.start_addr = snap.haddr;
                burst.size = snap.hsize;
                burst.burst = snap.hburst;
                burst.beats_total = burst_beats(snap.hburst).value_or(0);
                burst.beats_issued = 1;
                ndp.beat = 0;
            } else {
                ndp.beat = burst.beats_issued;
                burst.beats_issued += 1;
            }
            ndp.last_beat =
                burst.beats_total > 0 && burst.beats_issued == burst.beats_total;
            data_phase = ndp;
        } else {
            data_phase.active = false;
            if (final_data_completed) {
                burst.active = false;
            } else if (snap.htrans == Htrans::Idle && burst.active &&
                       burst.beats_total == 0) {
                // INCR bursts end when the owner idles.
                burst.active = false;
            }
        }
    }

    grant = arbitrate(cfg.arbiter, snap.hbusreq, *this);
    have_prev = true;
    prev = snap;
}

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

Domain::Domain(const FabricConfig& cfg, std::optional<Side> filter)
    : cfg_(&cfg), filter_(filter) {
    masters_.resize(cfg.master_domain.size());
    slaves_.resize(cfg.slave_domain.size());
    for (size_t i = 0; i < masters_.size(); ++i) {
        if (!cfg.scripts[i].txns.empty())
            masters_[i].gap_left = cfg.scripts[i].txns[0].gap;
    }
    pipe_.grant = cfg.arbiter.default_grant;
    pipe_.prev_grant = cfg.arbiter.default_grant;
    last_.sideband.assign(cfg.sideband.size(), 0);
}

bool Domain::local_master(int i) const {
    return !filter_ || cfg_->master_domain[i] == *filter_;
}

bool Domain::local_slave(int j) const {
    return !filter_ || cfg_->slave_domain[j] == *filter_;
}

FieldMask Domain::driven_mask(Side who) const {
    FieldMask m = 0;
    if (cfg_->master_bits(who) != 0) m |= field_bit(FieldId::Hbusreq);
    if (cfg_->master_domain[pipe_.grant] == who) m |= addr_ctrl_mask();
    const DataPhase& dp = pipe_.data_phase;
    if (dp.active) {
        if (dp.write && cfg_->master_domain[dp.owner] == who)
            m |= field_bit(FieldId::Hwdata);
        int sl = cfg_->decoder.decode(dp.addr);
        if (sl != kDefaultSlave && cfg_->slave_domain[sl] == who) {
            m |= response_mask();
            if (!dp.write) m |= field_bit(FieldId::Hrdata);
        }
    }
    if (cfg_->sideband_bits(who) != 0) m |= field_bit(FieldId::Sideband);
    return m;
}

FieldMask Domain::local_mask() const {
    if (filter_) return driven_mask(*filter_);
    return driven_mask(Side::Sim) | driven_mask(Side::Acc);
}

namespace {

bool requesting(const MasterState& m, const MasterScript& s) {
    return !m.done(s) && m.gap_left == 0;
}

}  // namespace

Domain::Drive Domain::master_drive(int i, uint64_t /*t*/) const {
    Drive d;
    d.driving = true;
    const MasterState& m = masters_[i];
    const MasterScript& s = cfg_->scripts[i];
    if (m.bursting) {
        const TxnDesc& txn = s.txns[m.txn_i];
        d.v.htrans = m.busy_left > 0 ? Htrans::Busy : Htrans::Seq;
        d.v.haddr = next_burst_address({txn.addr, txn.size, txn.burst, m.beat_i});
        d.v.hwrite = txn.write;
        d.v.hsize = txn.size;
        d.v.hburst = txn.burst;
        d.v.hprot = 3;
    } else if (requesting(m, s)) {
        const TxnDesc& txn = s.txns[m.txn_i];
        d.v.htrans = Htrans::Nonseq;
        d.v.haddr = txn.addr;
        d.v.hwrite = txn.write;
        d.v.hsize = txn.size;
        d.v.hburst = txn.burst;
        d.v.hprot = 3;
    }
    return d;  // idle drive otherwise (defaults)
}

FieldSet Domain::evaluate(uint64_t t) const {
    FieldSet fs;
    fs.mask = local_mask();
    fs.values.sideband.assign(cfg_->sideband.size(), 0);

    for (size_t i = 0; i < masters_.size(); ++i) {
        if (!local_master(static_cast<int>(i))) continue;
        if (requesting(masters_[i], cfg_->scripts[i]))
            fs.values.hbusreq |= (1u << i);
    }

    if (local_master(pipe_.grant))
        merge_fields(fs.values, master_drive(pipe_.grant, t).v, addr_ctrl_mask());

    const DataPhase& dp = pipe_.data_phase;
    if (dp.active && dp.write && local_master(dp.owner)) {
        const MasterState& m = masters_[dp.owner];
        if (m.pending_wdata.empty())
            throw ProtocolViolation("write data phase with no pending write word");
        fs.values.hwdata = m.pending_wdata.front();
    }

    if (dp.active) {
        int sl = cfg_->decoder.decode(dp.addr);
        if (sl != kDefaultSlave && local_slave(sl)) {
            const SlaveState& st = slaves_[sl];
            bool ready = slave_ready(cfg_->slave_cfg[sl], st.flow);
            fs.values.hready = ready;
            fs.values.hresp = Hresp::Okay;
            if (!dp.write) fs.values.hrdata = ready ? mem_read_word(st.mem, dp.addr) : 0;
        }
    }

    for (size_t k = 0; k < cfg_->sideband.size(); ++k) {
        bool mine = !filter_ || cfg_->sideband[k].owner == *filter_;
        if (mine && sideband_level(cfg_->sideband[k], t))
            fs.values.sideband[k] = 1;
    }
    return fs;
}

void Domain::finalize_snapshot(MsabsSnapshot& s) const {
    const DataPhase& dp = pipe_.data_phase;
    const int sl = dp.active ? cfg_->decoder.decode(dp.addr) : kDefaultSlave;
    if (!dp.active) {
        s.hready = true;
        s.hresp = Hresp::Okay;
        s.hrdata = 0;
    } else if (sl == kDefaultSlave) {
        // unmapped access: single-cycle error response from the default slave
        s.hready = true;
        s.hresp = Hresp::Error;
        s.hrdata = 0;
    } else if (dp.write) {
        s.hrdata = 0;
    }
    if (!(dp.active && dp.write)) s.hwdata = 0;
    s.hsplit = 0;
    if (s.sideband.size() != cfg_->sideband.size())
        s.sideband.resize(cfg_->sideband.size(), 0);
}

void Domain::commit(uint64_t t, const MsabsSnapshot& snap, bool strict) {
    const DataPhase dp = pipe_.data_phase;  // data phase of cycle t
    const int target = dp.active ? cfg_->decoder.decode(dp.addr) : kDefaultSlave;

    // masters: beat completion, issue advance, gap countdown
    for (size_t i = 0; i < masters_.size(); ++i) {
        if (!local_master(static_cast<int>(i))) continue;
        MasterState& m = masters_[i];
        const MasterScript& s = cfg_->scripts[i];

        if (dp.active && dp.owner == static_cast<int>(i) && snap.hready) {
            if (dp.write) {
                if (!m.pending_wdata.empty()) m.pending_wdata.pop_front();
            } else {
                m.read_hash ^= (static_cast<uint64_t>(dp.addr) << 32) ^ snap.hrdata;
                m.read_hash *= 1099511628211ull;
            }
        }

        bool advanced = false;
        if (pipe_.grant == static_cast<int>(i) && snap.hready && !m.done(s)) {
            if (snap.htrans == Htrans::Busy && m.busy_left > 0) {
                m.busy_left -= 1;
            } else if (snap.htrans == Htrans::Nonseq || snap.htrans == Htrans::Seq) {
                const TxnDesc& txn = s.txns[m.txn_i];
                uint32_t beat = snap.htrans == Htrans::Nonseq ? 0 : m.beat_i;
                if (txn.write) {
                    uint32_t w = beat < txn.data.size()
                                     ? txn.data[beat]
                                     : auto_data_word(static_cast<int>(i), m.txn_i, beat);
                    m.pending_wdata.push_back(w);
                }
                m.beat_i = beat + 1;
                if (m.beat_i >= txn.total_beats()) {
                    m.txn_i += 1;
                    m.beat_i = 0;
                    m.bursting = false;
                    m.busy_left = 0;
                    m.gap_left = m.done(s) ? 0 : s.txns[m.txn_i].gap;
                    advanced = true;
                } else {
                    m.bursting = true;
                    m.busy_left = m.beat_i < txn.busy_before.size()
                                      ? txn.busy_before[m.beat_i]
                                      : 0;
                }
            }
        }
        if (!advanced && !m.done(s) && m.gap_left > 0 && !m.bursting) m.gap_left -= 1;
    }

    // slaves: completion, wait counters, fifo drain (real state and mirrors)
    for (size_t j = 0; j < slaves_.size(); ++j) {
        SlaveFlow& f = slaves_[j].flow;
        const SlaveCfg& sc = cfg_->slave_cfg[j];
        if (dp.active && target == static_cast<int>(j)) {
            if (snap.hready) {
                if (dp.write && local_slave(static_cast<int>(j)))
                    mem_write(slaves_[j].mem, dp.addr, dp.size, snap.hwdata);
                f.occupancy += 1;
                f.beat_in_service = false;
            } else if (f.wait_left > 0) {
                f.wait_left -= 1;
            }
        }
        f.occupancy -= std::min(f.occupancy, sc.service_rate);
    }

    pipe_.commit(*cfg_, snap, strict);

    // a freshly accepted beat starts service at its slave
    if (snap.hready && pipe_.data_phase.active) {
        int nt = cfg_->decoder.decode(pipe_.data_phase.addr);
        if (nt != kDefaultSlave) {
            SlaveFlow& f = slaves_[nt].flow;
            f.wait_left = cfg_->slave_cfg[nt].wait_states;
            f.beat_in_service = true;
        }
    }

    last_ = snap;
    committed_ = t + 1;
}

std::vector<std::tuple<int, uint32_t, uint32_t>> Domain::memory_image() const {
    std::vector<std::tuple<int, uint32_t, uint32_t>> out;
    for (size_t j = 0; j < slaves_.size(); ++j) {
        if (!local_slave(static_cast<int>(j))) continue;
        for (const auto& [addr, word] : slaves_[j].mem)
            out.emplace_back(static_cast<int>(j), addr, word);
    }
    return out;
}

MsabsSnapshot step_monolithic(Domain& all, uint64_t t) {
    FieldSet fs = all.evaluate(t);
    MsabsSnapshot snap;
    snap.sideband.assign(all.config().sideband.size(), 0);
    merge_fields(snap, fs.values, fs.mask);
    all.finalize_snapshot(snap);
    all.commit(t, snap, true);
    return snap;
}

MsabsSnapshot step_half_bus(Domain& half, uint64_t t, const FieldSet& proxies,
                            bool strict) {
    if (!half.filter()) throw IllegalState("half-bus step on a monolithic domain");
    FieldMask expected = half.driven_mask(other(*half.filter()));
    if (proxies.mask != expected)
        throw MissingProxyInput("proxy fields do not match the remotely driven set");
    FieldSet local = half.evaluate(t);
    MsabsSnapshot snap;
    snap.sideband.assign(half.config().sideband.size(), 0);
    merge_fields(snap, local.values, local.mask);
    merge_fields(snap, proxies.values, proxies.mask);
    half.finalize_snapshot(snap);
    half.commit(t, snap, strict);
    return snap;
}

// ---------------------------------------------------------------------------
// Mode selection and predictability
// ---------------------------------------------------------------------------

const char* to_string(OperatingMode m) {
    switch (m) {
        case OperatingMode::Conservative: return "conservative";
        case OperatingMode::SLA: return "sla";
        case OperatingMode::ALS: return "als";
    }
    return "?";
}

std::optional<Side> leader_side(OperatingMode m) {
    if (m == OperatingMode::SLA) return Side::Sim;
    if (m == OperatingMode::ALS) return Side::Acc;
    return std::nullopt;
}

OperatingMode mode_select(const Domain& d) {
    if (d.committed() == 0) return OperatingMode::Conservative;
    const MsabsSnapshot& last = d.last_committed();
    const PipelineState& pipe = d.pipeline();
    const FabricConfig& cfg = d.config();

    Htrans tr = last.htrans;
    bool in_transfer = tr == Htrans::Nonseq || tr == Htrans::Seq ||
                       (tr == Htrans::Busy && pipe.burst.active);
    if (!in_transfer) return OperatingMode::Conservative;

    int master = pipe.prev_grant;
    int sl = cfg.decoder.decode(last.haddr);
    if (sl == kDefaultSlave) return OperatingMode::Conservative;

    Side ms = cfg.master_domain[master];
    Side ss = cfg.slave_domain[sl];
    if (ms == ss) return OperatingMode::Conservative;

    Side source = last.hwrite ? ms : ss;
    return source == Side::Sim ? OperatingMode::SLA : OperatingMode::ALS;
}

bool predictable_next(const Domain& d, Side leader) {
    const Side lag = other(leader);
    const PipelineState& pipe = d.pipeline();
    const MsabsSnapshot& last = d.last_committed();
    const FabricConfig& cfg = d.config();

    if (cfg.master_domain[pipe.grant] == lag) {
        bool stall_hold = d.committed() > 0 && !last.hready &&
                          (last.htrans == Htrans::Nonseq || last.htrans == Htrans::Seq);
        bool continuing = pipe.burst.active && pipe.burst.owner == pipe.grant &&
                          (pipe.burst.beats_total == 0 ||
                           pipe.burst.beats_issued < pipe.burst.beats_total);
        if (!stall_hold && !continuing) return false;
    }

    const DataPhase& dp = pipe.data_phase;
    if (dp.active) {
        if (dp.write && cfg.master_domain[dp.owner] == lag) return false;
        int sl = cfg.decoder.decode(dp.addr);
        if (!dp.write && sl != kDefaultSlave && cfg.slave_domain[sl] == lag)
            return false;
    }
    return true;
}

FieldSet predict_response(const Domain& d, Side leader) {
    const Side lag = other(leader);
    const PipelineState& pipe = d.pipeline();
    const MsabsSnapshot& last = d.last_committed();
    const FabricConfig& cfg = d.config();

    FieldSet fs;
    fs.mask = d.driven_mask(lag);
    fs.values.sideband.assign(cfg.sideband.size(), 0);

    if (mask_has(fs.mask, FieldId::Hwdata) || mask_has(fs.mask, FieldId::Hrdata))
        throw UnpredictableField("data-class field requested from the predictor");

    if (mask_has(fs.mask, FieldId::Hbusreq))
        fs.values.hbusreq = last.hbusreq & cfg.master_bits(lag);

    if (mask_has(fs.mask, FieldId::Haddr)) {
        bool stall_hold = !last.hready &&
                          (last.htrans == Htrans::Nonseq || last.htrans == Htrans::Seq);
        if (stall_hold) {
            merge_fields(fs.values, last, addr_ctrl_mask());
        } else {
            const BurstTrack& b = pipe.burst;
            if (!b.active)
                throw UnpredictableField("no burst in flight to continue");
            fs.values.htrans = Htrans::Seq;
            fs.values.haddr =
                next_burst_address({b.start_addr, b.size, b.burst, b.beats_issued});
            fs.values.hwrite = last.hwrite;
            fs.values.hsize = last.hsize;
            fs.values.hburst = last.hburst;
            fs.values.hprot = last.hprot;
        }
    }

    if (mask_has(fs.mask, FieldId::Hready)) {
        const DataPhase& dp = pipe.data_phase;
        int sl = cfg.decoder.decode(dp.addr);
        fs.values.hready = slave_ready(cfg.slave_cfg[sl], d.slave_flow(sl));
        fs.values.hresp = Hresp::Okay;
    }

    if (mask_has(fs.mask, FieldId::Sideband)) {
        for (size_t k = 0; k < cfg.sideband.size(); ++k)
            if (cfg.sideband[k].owner == lag)
                fs.values.sideband[k] = k < last.sideband.size() ? last.sideband[k] : 0;
    }
    return fs;
}

}  // namespace cosim
