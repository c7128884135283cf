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

#include "cosim/sync.hpp"

#include <algorithm>

#include "cosim/digest.hpp"
#include "cosim/pack.hpp"

namespace cosim {

const char* to_string(TransitionPhase p) {
    switch (p) {
        case TransitionPhase::RA: return "RA";
        case TransitionPhase::FU: return "FU";
        case TransitionPhase::RB: return "RB";
        case TransitionPhase::RF: return "RF";
    }
    return "?";
}

CtlState next_ctl(const CtlState& cur, const Domain& d) {
    OperatingMode m = mode_select(d);
    bool pred = false;
    if (auto ls = leader_side(m)) pred = predictable_next(d, *ls);

    if (cur.stage == Stage::Hop || cur.stage == Stage::Ra) {
        if (m == cur.mode && pred) return {cur.mode, Stage::Ra};
    }
    if (m != OperatingMode::Conservative && pred) return {m, Stage::Hop};
    return {OperatingMode::Conservative, Stage::Conv};
}

CwPath choose_path(bool leader, Stage stage, bool predictable, size_t lob_len,
                   size_t lob_depth, bool entries_pending, bool all_consumed_ok,
                   bool post_restore) {
    if (post_restore) {
        if (!leader) throw IllegalState("only the leader rolls forth");
        return CwPath::F;
    }
    if (stage == Stage::Ra) {
        if (leader) {
            if (!predictable || lob_len >= lob_depth - 1) return CwPath::S;
            return CwPath::P;
        }
        if (entries_pending) return CwPath::L;
        if (all_consumed_ok) return CwPath::R;
        throw IllegalState("lagger has nothing to consume inside a transition");
    }
    if (leader && predictable) return CwPath::P;  // first P-path visit: rb_store
    if (stage == Stage::Hop && !leader) return CwPath::C;
    if (!predictable || !leader) return CwPath::C;
    throw IllegalState("unreachable path decision");
}

bool check_prediction(const LobEntry& entry, const FieldSet& actual) {
    if (!entry.prediction)
        throw IllegalState("prediction check on an entry without a prediction");
    const FieldSet& p = *entry.prediction;
    return p.mask == actual.mask && fields_equal(p.values, actual.values, p.mask);
}

Checkpoint store_checkpoint(const Domain& d, uint32_t variable_count) {
    return Checkpoint{d.committed(), variable_count, d};
}

void restore_checkpoint(Domain& d, const Checkpoint& cp) {
    d = cp.blob;
}

void CwStats::add(const CwStats& o) {
    conservative_cycles += o.conservative_cycles;
    hop_cycles += o.hop_cycles;
    ra_cycles += o.ra_cycles;
    replay_cycles += o.replay_cycles;
    stores += o.stores;
    restores += o.restores;
    flushes += o.flushes;
    max_flush_entries = std::max(max_flush_entries, o.max_flush_entries);
    transitions += o.transitions;
    failures += o.failures;
    predictions += o.predictions;
}

// ---------------------------------------------------------------------------
// ChannelWrapper
// ---------------------------------------------------------------------------

ChannelWrapper::ChannelWrapper(Side side, const SyncParams& params,
                               const FabricConfig& cfg, PacketQueue& in,
                               PacketQueue& out)
    : side_(side),
      params_(params),
      domain_(cfg, side),
      in_(&in),
      out_(&out),
      rng_(params.seed * 2 + static_cast<uint64_t>(side)) {}

bool ChannelWrapper::is_leader() const {
    auto ls = leader_side(ctl_.mode);
    return ls && *ls == side_;
}

std::optional<ChannelPacket> ChannelWrapper::fetch() {
    if (in_->blocking()) return in_->pop_wait();
    return in_->try_pop();
}

void ChannelWrapper::send(ChannelPacket&& p) {
    p.direction = send_dir();
    double t = ledger_.record(params_.cost, p);
    buckets_.channel += t;
    out_->push(std::move(p));
}

void ChannelWrapper::charge_eval() {
    double t = params_.t_cycle[static_cast<int>(side_)];
    if (side_ == Side::Sim)
        buckets_.sim += t;
    else
        buckets_.acc += t;
}

void ChannelWrapper::do_store() {
    checkpoint_ = store_checkpoint(domain_, params_.rollback_variables);
    double c = params_.rollback_variables *
               params_.store_cost[static_cast<int>(side_)];
    buckets_.store += c;
    trans_time_ += c;
    stats_.stores += 1;
}

void ChannelWrapper::sink(const MsabsSnapshot& snap) {
    std::vector<uint32_t> words =
        pack_snapshot(snap, full_mask(!snap.sideband.empty()));
    for (uint32_t w : words) trace_digest_.add(w);
    if (params_.record_trace) trace_.push_back(snap);
}

void ChannelWrapper::update_ctl() {
    if (finished()) return;
    CtlState nc = next_ctl(ctl_, domain_);
    chain_store_ = (ctl_.stage == Stage::Ra && nc.stage == Stage::Ra);
    ctl_ = nc;
}

void ChannelWrapper::note(CwStation st) {
    if (params_.record_paths) stations_.push_back(st);
}

bool ChannelWrapper::advance() {
    bool progressed = false;
    for (;;) {
        if (finished()) return progressed;
        switch (waiting_) {
            case Waiting::None:
                start_next();
                progressed = true;
                break;
            case Waiting::ConvPeer: {
                auto p = fetch();
                if (!p) return progressed;
                complete_conservative(*p);
                progressed = true;
                break;
            }
            case Waiting::Flush: {
                auto p = fetch();
                if (!p) return progressed;
                lagger_consume(*p);
                progressed = true;
                break;
            }
            case Waiting::Report: {
                auto p = fetch();
                if (!p) return progressed;
                leader_resolve(*p);
                progressed = true;
                break;
            }
        }
    }
}

void ChannelWrapper::run() {
    while (!finished()) advance();
}

void ChannelWrapper::start_next() {
    if (ctl_.stage == Stage::Conv || ctl_.stage == Stage::Hop) {
        bool hop_leader = ctl_.stage == Stage::Hop && is_leader();
        begin_conservative(hop_leader);
        return;
    }
    // Stage::Ra
    if (is_leader()) {
        leader_run_ahead();
    } else {
        note(CwStation::ReadInput);
        waiting_ = Waiting::Flush;
    }
}

void ChannelWrapper::begin_conservative(bool store_after) {
    pending_cycle_ = domain_.committed();
    pending_store_ = store_after;
    pending_hop_ = ctl_.stage == Stage::Hop;
    if (store_after) note(CwStation::RbStore);

    FieldSet local = domain_.evaluate(pending_cycle_);
    charge_eval();

    ChannelPacket p;
    p.kind = side_ == Side::Sim ? PacketKind::ConvOut : PacketKind::ConvIn;
    p.cycle = pending_cycle_;
    p.payload = encode_fieldset(local);
    p.accounted_words = params_.conv_payload_words;
    p.sender_committed = domain_.committed();
    send(std::move(p));

    if (store_after) note(CwStation::ConservativeHop);
    note(CwStation::ReadInput);
    waiting_ = Waiting::ConvPeer;
}

void ChannelWrapper::complete_conservative(const ChannelPacket& p) {
    if (p.kind != PacketKind::ConvOut && p.kind != PacketKind::ConvIn)
        throw DesyncDetected("expected a conventional exchange packet");
    if (p.cycle != pending_cycle_)
        throw DesyncDetected("conventional exchange out of step");

    FieldSet remote = decode_fieldset(p.payload, domain_.config().sideband.size());
    MsabsSnapshot snap = step_half_bus(domain_, pending_cycle_, remote, true);
    sink(snap);

    if (pending_hop_) {
        stats_.hop_cycles += 1;
        paths_ += is_leader() ? 'P' : 'C';
    } else {
        stats_.conservative_cycles += 1;
        paths_ += 'C';
    }
    if (pending_store_) do_store();
    pending_store_ = false;
    pending_hop_ = false;
    update_ctl();
    waiting_ = Waiting::None;
}

void ChannelWrapper::perturb(FieldSet& prediction) {
    // Value-level perturbations only: each one guarantees a bit mismatch at
    // the lagger's check without collapsing the leader's own run-ahead
    // structure (htrans/hwrite stay untouched so the speculative burst
    // tracking keeps walking the window it will later discard).
    static constexpr FieldId kTargets[] = {
        FieldId::Hready, FieldId::Haddr, FieldId::Hresp,
        FieldId::Hbusreq, FieldId::Hprot, FieldId::Sideband,
    };
    std::vector<FieldId> present;
    for (FieldId f : kTargets)
        if (mask_has(prediction.mask, f)) present.push_back(f);
    if (present.empty()) return;

    FieldId f = present[perturb_rr_ % present.size()];
    perturb_rr_ += 1;
    MsabsSnapshot& v = prediction.values;
    const FabricConfig& cfg = domain_.config();
    switch (f) {
        case FieldId::Hready:
            v.hready = !v.hready;
            break;
        case FieldId::Haddr:
            v.haddr += static_cast<uint32_t>(v.hsize);
            break;
        case FieldId::Hresp:
            v.hresp = v.hresp == Hresp::Okay ? Hresp::Error : Hresp::Okay;
            break;
        case FieldId::Hbusreq: {
            uint32_t bits = cfg.master_bits(peer());
            v.hbusreq ^= bits & (~bits + 1);  // lowest remote master bit
            break;
        }
        case FieldId::Hprot:
            v.hprot ^= 1;
            break;
        case FieldId::Sideband:
            for (size_t k = 0; k < cfg.sideband.size(); ++k) {
                if (cfg.sideband[k].owner == peer()) {
                    v.sideband[k] ^= 1;
                    break;
                }
            }
            break;
        default:
            break;
    }
}

void ChannelWrapper::leader_run_ahead() {
    trans_base_ = domain_.committed();
    trans_time_ = 0.0;
    if (chain_store_) do_store();
    if (!checkpoint_ || checkpoint_->cycle != trans_base_)
        throw NoCheckpoint("transition started without a checkpoint at its base");
    lob_.clear();
    spec_rows_.clear();

    for (;;) {
        uint64_t c = domain_.committed();
        bool last_cycle = (c + 1 == params_.n_cycles);
        bool lob_full = lob_.size() >= static_cast<size_t>(params_.lob_depth) - 1;
        bool pred_ok = predictable_next(domain_, side_);
        if (!pred_ok || lob_full || last_cycle) {
            // synchronization cycle: evaluate, flush everything, block
            FieldSet out = domain_.evaluate(c);
            charge_eval();
            trans_time_ += params_.t_cycle[static_cast<int>(side_)];
            s_cycle_ = c;
            std::vector<LobEntry> entries = lob_;
            entries.push_back(LobEntry{c, out, std::nullopt});

            ChannelPacket p = encode_lob_flush(entries, send_dir(),
                                               domain_.config().sideband.size(),
                                               params_.lob_depth);
            p.accounted_words =
                static_cast<double>(entries.size()) * params_.flush_words_per_entry;
            p.sender_committed = trans_base_;
            note(CwStation::Flush);
            double tch = transfer_time(params_.cost, send_dir(), p.accounted_words);
            trans_time_ += tch;
            send(std::move(p));

            stats_.flushes += 1;
            stats_.max_flush_entries =
                std::max<uint64_t>(stats_.max_flush_entries, entries.size());
            sent_entries_ = std::move(entries);
            lob_.clear();
            paths_ += 'S';
            note(CwStation::GetResponse);
            waiting_ = Waiting::Report;
            return;
        }

        // P path: predict the lagger, log outputs + prediction, run on
        FieldSet pred = predict_response(domain_, side_);
        stats_.predictions += 1;
        if (!rng_.bernoulli(params_.p_success)) perturb(pred);

        FieldSet out = domain_.evaluate(c);
        charge_eval();
        trans_time_ += params_.t_cycle[static_cast<int>(side_)];
        lob_.push_back(LobEntry{c, out, pred});

        MsabsSnapshot snap = step_half_bus(domain_, c, pred, /*strict=*/false);
        spec_rows_.push_back(snap);
        stats_.ra_cycles += 1;
        paths_ += 'P';
    }
}

void ChannelWrapper::log_transition(uint64_t committed, uint64_t predictions,
                                    int64_t failure_index, const char* phases) {
    double lagger_t =
        committed * params_.t_cycle[static_cast<int>(other(side_))];
    Direction report_dir = side_ == Side::Sim ? Direction::A2S : Direction::S2A;
    double report_t = transfer_time(params_.cost, report_dir, params_.report_words);
    TransitionRow row;
    row.id = stats_.transitions;
    row.base_cycle = trans_base_;
    row.mode = ctl_.mode;
    row.committed = committed;
    row.predictions = predictions;
    row.failure_index = failure_index;
    row.packets = 2;
    row.virtual_time_s = trans_time_ + lagger_t + report_t;
    row.phases = phases;
    transitions_.push_back(std::move(row));
    stats_.transitions += 1;
}

void ChannelWrapper::leader_resolve(const ChannelPacket& p) {
    const size_t k = sent_entries_.size();
    if (p.kind == PacketKind::ReportAllOk) {
        if (p.sender_committed != s_cycle_ + 1)
            throw DesyncDetected("lagger progress disagrees after a clean transition");
        FieldSet actual = decode_fieldset(p.payload, domain_.config().sideband.size());
        for (const MsabsSnapshot& row : spec_rows_) sink(row);
        spec_rows_.clear();
        MsabsSnapshot snap = step_half_bus(domain_, s_cycle_, actual, true);
        sink(snap);
        checkpoint_.reset();
        sent_entries_.clear();
        log_transition(k, k - 1, -1, "RA FU");
    } else if (p.kind == PacketKind::ReportFail) {
        const uint32_t j = p.fail_index;
        if (j == 0 || j > k)
            throw DesyncDetected("failure index outside the flushed window");
        FieldSet actual = decode_fieldset(p.payload, domain_.config().sideband.size());
        if (p.sender_committed != trans_base_ + j)
            throw DesyncDetected("lagger progress disagrees after a failed transition");

        note(CwStation::StoreActual);
        note(CwStation::RequestRestore);
        if (!checkpoint_) throw NoCheckpoint("no checkpoint to restore");
        restore_checkpoint(domain_, *checkpoint_);
        double rc = params_.rollback_variables *
                    params_.restore_cost[static_cast<int>(side_)];
        buckets_.restore += rc;
        trans_time_ += rc;
        stats_.restores += 1;
        stats_.failures += 1;
        spec_rows_.clear();

        // roll forth over the verified prefix, then finish the failed cycle
        // with the actual response the lagger attached to its report
        for (uint32_t i = 1; i < j; ++i) {
            uint64_t ci = trans_base_ + i - 1;
            const LobEntry& e = sent_entries_[i - 1];
            MsabsSnapshot snap = step_half_bus(domain_, ci, *e.prediction, true);
            sink(snap);
            charge_eval();
            trans_time_ += params_.t_cycle[static_cast<int>(side_)];
            stats_.replay_cycles += 1;
            paths_ += 'F';
        }
        MsabsSnapshot snap = step_half_bus(domain_, trans_base_ + j - 1, actual, true);
        sink(snap);
        charge_eval();
        trans_time_ += params_.t_cycle[static_cast<int>(side_)];
        paths_ += 'F';

        checkpoint_.reset();
        sent_entries_.clear();
        log_transition(j, k - 1, static_cast<int64_t>(j), "RA FU RB RF");
    } else {
        throw DesyncDetected("expected a transition report");
    }
    update_ctl();
    waiting_ = Waiting::None;
}

void ChannelWrapper::lagger_consume(const ChannelPacket& p) {
    if (p.kind != PacketKind::LobFlush)
        throw DesyncDetected("expected a LOB flush");
    if (p.sender_committed != domain_.committed())
        throw DesyncDetected("flush base disagrees with lagger progress");

    std::vector<LobEntry> entries =
        decode_lob_flush(p, domain_.config().sideband.size());
    trans_base_ = domain_.committed();
    trans_time_ = 0.0;

    for (size_t i = 0; i < entries.size(); ++i) {
        const LobEntry& e = entries[i];
        uint64_t ci = trans_base_ + i;
        if (e.cycle != ci) throw DesyncDetected("flush entry cycle out of order");

        FieldSet mine = domain_.evaluate(ci);
        charge_eval();

        if (e.prediction) {
            note(CwStation::PredictionCheck);
            bool ok = check_prediction(e, mine);
            MsabsSnapshot snap = step_half_bus(domain_, ci, e.leader_outputs, true);
            sink(snap);
            if (!ok) {
                note(CwStation::ReportFail);
                ChannelPacket r;
                r.kind = PacketKind::ReportFail;
                r.cycle = ci;
                r.fail_index = static_cast<uint32_t>(i + 1);
                r.payload = encode_fieldset(mine);
                r.accounted_words = params_.report_words;
                r.sender_committed = domain_.committed();
                send(std::move(r));
                paths_ += 'L';
                note(CwStation::WaitLeader);
                update_ctl();
                waiting_ = Waiting::None;
                return;
            }
            paths_ += 'L';
        } else {
            // final entry: commit and report back our own outputs
            MsabsSnapshot snap = step_half_bus(domain_, ci, e.leader_outputs, true);
            sink(snap);
            note(CwStation::SendOutput);
            ChannelPacket r;
            r.kind = PacketKind::ReportAllOk;
            r.cycle = ci;
            r.payload = encode_fieldset(mine);
            r.accounted_words = params_.report_words;
            r.sender_committed = domain_.committed();
            send(std::move(r));
            paths_ += 'R';
            note(CwStation::ReadInput);
            update_ctl();
            waiting_ = Waiting::None;
            return;
        }
    }
    throw DesyncDetected("flush ended without a final entry");
}

}  // namespace cosim
