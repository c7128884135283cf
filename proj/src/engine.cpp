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

#include "cosim/engine.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "cosim/digest.hpp"
#include "cosim/pack.hpp"

namespace cosim {

const char* to_string(EngineKind k) {
    switch (k) {
        case EngineKind::Monolithic: return "monolithic";
        case EngineKind::Conventional: return "conventional";
        case EngineKind::Optimistic: return "optimistic";
    }
    return "?";
}

void Scenario::validate() const {
    fabric.validate();
    if (cycles < 1) throw ConfigError("run length must be at least one cycle");
    if (lob_depth < 1) throw ConfigError("LOB depth must be at least one");
    if (p_success < 0.0 || p_success > 1.0)
        throw ConfigError("prediction success probability outside [0,1]");
    if (threads != 1 && threads != 2)
        throw ConfigError("threads must be 1 or 2");
    if (t_sim_cycle < 0 || t_acc_cycle < 0 || conv_payload_words < 0 ||
        flush_words_per_entry < 0 || report_words < 0)
        throw ConfigError("negative time or payload parameter");
}

PerfParams to_perf_params(const Scenario& scn) {
    PerfParams pp;
    pp.t_sim_cycle = scn.t_sim_cycle;
    pp.t_acc_cycle = scn.t_acc_cycle;
    pp.cost = scn.cost;
    pp.lob_depth = scn.lob_depth;
    pp.rollback_variables = scn.rollback_variables;
    pp.store_cost_sim = scn.store_cost_sim;
    pp.restore_cost_sim = scn.restore_cost_sim;
    pp.store_cost_acc = scn.store_cost_acc;
    pp.restore_cost_acc = scn.restore_cost_acc;
    pp.flush_words_per_entry = scn.flush_words_per_entry;
    pp.report_words = scn.report_words;
    pp.conv_payload_words = scn.conv_payload_words;
    return pp;
}

SyncParams to_sync_params(const Scenario& scn) {
    SyncParams sp;
    sp.n_cycles = scn.cycles;
    sp.lob_depth = scn.lob_depth;
    sp.p_success = scn.p_success;
    sp.seed = scn.seed;
    sp.cost = scn.cost;
    sp.conv_payload_words = scn.conv_payload_words;
    sp.flush_words_per_entry = scn.flush_words_per_entry;
    sp.report_words = scn.report_words;
    sp.rollback_variables = scn.rollback_variables;
    sp.t_cycle[static_cast<int>(Side::Sim)] = scn.t_sim_cycle;
    sp.t_cycle[static_cast<int>(Side::Acc)] = scn.t_acc_cycle;
    sp.store_cost[static_cast<int>(Side::Sim)] = scn.store_cost_sim;
    sp.store_cost[static_cast<int>(Side::Acc)] = scn.store_cost_acc;
    sp.restore_cost[static_cast<int>(Side::Sim)] = scn.restore_cost_sim;
    sp.restore_cost[static_cast<int>(Side::Acc)] = scn.restore_cost_acc;
    sp.record_trace = scn.record_trace;
    sp.record_paths = scn.record_paths;
    return sp;
}

namespace {

uint64_t snapshot_digest_words(const MsabsSnapshot& s, Digest& dg) {
    std::vector<uint32_t> words = pack_snapshot(s, full_mask(!s.sideband.empty()));
    for (uint32_t w : words) dg.add(w);
    return dg.value();
}

uint64_t image_digest(const std::vector<std::tuple<int, uint32_t, uint32_t>>& img) {
    Digest dg;
    for (const auto& [sl, addr, word] : img) {
        dg.add(static_cast<uint64_t>(sl));
        dg.add((static_cast<uint64_t>(addr) << 32) | word);
    }
    return dg.value();
}

void finalize_ledger(std::vector<LedgerEntry>& entries, RunResult& rr) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const LedgerEntry& a, const LedgerEntry& b) {
                         if (a.cycle != b.cycle) return a.cycle < b.cycle;
                         return static_cast<int>(a.direction) <
                                static_cast<int>(b.direction);
                     });
    double cum = 0.0;
    for (auto& e : entries) {
        cum += e.time_s;
        e.cumulative_s = cum;
    }
    rr.channel_accesses = entries.size();
    rr.ledger = std::move(entries);
}

}  // namespace

RunResult run_monolithic(const Scenario& scn) {
    scn.validate();
    RunResult rr;
    rr.engine = EngineKind::Monolithic;
    rr.cycles = scn.cycles;

    Domain all(scn.fabric, std::nullopt);
    Digest dg;
    for (uint64_t t = 0; t < scn.cycles; ++t) {
        MsabsSnapshot snap = step_monolithic(all, t);
        snapshot_digest_words(snap, dg);
        if (scn.record_trace) rr.trace.push_back(std::move(snap));
    }
    rr.trace_digest = dg.value();
    rr.memory = all.memory_image();
    rr.memory_digest = image_digest(rr.memory);
    return rr;
}

RunResult run_conventional(const Scenario& scn) {
    scn.validate();
    RunResult rr;
    rr.engine = EngineKind::Conventional;
    rr.cycles = scn.cycles;

    Domain sim(scn.fabric, Side::Sim);
    Domain acc(scn.fabric, Side::Acc);
    TimeBuckets buckets;
    ChannelLedger ledger;
    Digest dg;

    for (uint64_t t = 0; t < scn.cycles; ++t) {
        FieldSet from_sim = sim.evaluate(t);
        FieldSet from_acc = acc.evaluate(t);
        buckets.sim += scn.t_sim_cycle;
        buckets.acc += scn.t_acc_cycle;

        ChannelPacket p_out;
        p_out.kind = PacketKind::ConvOut;
        p_out.direction = Direction::S2A;
        p_out.cycle = t;
        p_out.payload = encode_fieldset(from_sim);
        p_out.accounted_words = scn.conv_payload_words;
        buckets.channel += ledger.record(scn.cost, p_out);

        ChannelPacket p_in;
        p_in.kind = PacketKind::ConvIn;
        p_in.direction = Direction::A2S;
        p_in.cycle = t;
        p_in.payload = encode_fieldset(from_acc);
        p_in.accounted_words = scn.conv_payload_words;
        buckets.channel += ledger.record(scn.cost, p_in);

        MsabsSnapshot s1 = step_half_bus(sim, t, from_acc, true);
        MsabsSnapshot s2 = step_half_bus(acc, t, from_sim, true);
        if (!(s1 == s2)) throw DesyncDetected("half-bus snapshots disagree");
        snapshot_digest_words(s1, dg);
        if (scn.record_trace) rr.trace.push_back(std::move(s1));
    }

    rr.trace_digest = dg.value();
    rr.memory = sim.memory_image();
    auto acc_img = acc.memory_image();
    rr.memory.insert(rr.memory.end(), acc_img.begin(), acc_img.end());
    std::sort(rr.memory.begin(), rr.memory.end());
    rr.memory_digest = image_digest(rr.memory);

    rr.total_time_s = buckets.total();
    double n = static_cast<double>(scn.cycles);
    rr.breakdown.t_sim = buckets.sim / n;
    rr.breakdown.t_acc = buckets.acc / n;
    rr.breakdown.t_ch = buckets.channel / n;
    rr.breakdown.performance = n / rr.total_time_s;
    rr.breakdown.ratio = 1.0;
    std::vector<LedgerEntry> entries = std::move(ledger.entries);
    finalize_ledger(entries, rr);
    return rr;
}

RunResult run_optimistic(const Scenario& scn) {
    scn.validate();
    const bool threaded = scn.threads == 2;
    PacketQueue to_acc(threaded);  // sim -> acc
    PacketQueue to_sim(threaded);  // acc -> sim
    SyncParams sp = to_sync_params(scn);

    ChannelWrapper cws(Side::Sim, sp, scn.fabric, to_sim, to_acc);
    ChannelWrapper cwa(Side::Acc, sp, scn.fabric, to_acc, to_sim);

    if (threaded) {
        std::exception_ptr err_s, err_a;
        std::thread ts([&] {
            try {
                cws.run();
            } catch (...) {
                err_s = std::current_exception();
            }
        });
        std::thread ta([&] {
            try {
                cwa.run();
            } catch (...) {
                err_a = std::current_exception();
            }
        });
        ts.join();
        ta.join();
        if (err_s) std::rethrow_exception(err_s);
        if (err_a) std::rethrow_exception(err_a);
    } else {
        for (;;) {
            bool p1 = cws.advance();
            bool p2 = cwa.advance();
            if (cws.finished() && cwa.finished()) break;
            if (!p1 && !p2)
                throw DesyncDetected("both channel wrappers stalled");
        }
    }

    if (cws.domain().committed() != scn.cycles ||
        cwa.domain().committed() != scn.cycles)
        throw DesyncDetected("domains finished at different cycles");
    if (cws.trace_digest() != cwa.trace_digest())
        throw DesyncDetected("committed traces disagree between domains");

    RunResult rr;
    rr.engine = EngineKind::Optimistic;
    rr.cycles = scn.cycles;
    rr.trace = cws.trace();
    rr.trace_digest = cws.trace_digest();
    rr.memory = cws.domain().memory_image();
    auto acc_img = cwa.domain().memory_image();
    rr.memory.insert(rr.memory.end(), acc_img.begin(), acc_img.end());
    std::sort(rr.memory.begin(), rr.memory.end());
    rr.memory_digest = image_digest(rr.memory);

    TimeBuckets buckets = cws.buckets();
    buckets.add(cwa.buckets());
    rr.total_time_s = buckets.total();
    double n = static_cast<double>(scn.cycles);
    rr.breakdown.t_sim = buckets.sim / n;
    rr.breakdown.t_acc = buckets.acc / n;
    rr.breakdown.t_store = buckets.store / n;
    rr.breakdown.t_restore = buckets.restore / n;
    rr.breakdown.t_ch = buckets.channel / n;
    rr.breakdown.performance = n / rr.total_time_s;
    rr.breakdown.ratio =
        rr.breakdown.performance / conventional_breakdown(to_perf_params(scn)).performance;

    std::vector<LedgerEntry> entries = cws.ledger().entries;
    entries.insert(entries.end(), cwa.ledger().entries.begin(),
                   cwa.ledger().entries.end());
    finalize_ledger(entries, rr);

    rr.transitions = cws.transitions();
    rr.transitions.insert(rr.transitions.end(), cwa.transitions().begin(),
                          cwa.transitions().end());
    std::sort(rr.transitions.begin(), rr.transitions.end(),
              [](const TransitionRow& a, const TransitionRow& b) {
                  return a.base_cycle < b.base_cycle;
              });
    for (size_t i = 0; i < rr.transitions.size(); ++i) rr.transitions[i].id = i;

    rr.stats = cws.stats();
    rr.stats.add(cwa.stats());
    rr.paths_sim = cws.path_log();
    rr.paths_acc = cwa.path_log();
    rr.stations_sim = cws.stations();
    rr.stations_acc = cwa.stations();
    return rr;
}

RunResult run(const Scenario& scn) {
    switch (scn.engine) {
        case EngineKind::Monolithic: return run_monolithic(scn);
        case EngineKind::Conventional: return run_conventional(scn);
        case EngineKind::Optimistic: return run_optimistic(scn);
    }
    throw ConfigError("unknown engine");
}

}  // namespace cosim
