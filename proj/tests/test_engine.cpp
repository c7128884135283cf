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

#include <doctest.h>

#include <sstream>

#include "cosim/scenario_io.hpp"
#include "scenario_gen.hpp"

using namespace cosim;

TEST_CASE("conventional engine reproduces the monolithic trace") {
    for (uint64_t s : {1ull, 2ull, 3ull}) {
        Scenario scn = testgen::random_scenario(s);
        RunResult mono = run_monolithic(scn);
        RunResult conv = run_conventional(scn);
        CHECK(conv.trace_digest == mono.trace_digest);
        CHECK(conv.memory == mono.memory);
        CHECK(conv.channel_accesses == 2 * scn.cycles);
    }
}

TEST_CASE("optimistic engine reproduces the monolithic trace across p and seeds") {
    for (uint64_t s : {4ull, 5ull}) {
        Scenario scn = testgen::random_scenario(s);
        RunResult mono = run_monolithic(scn);
        for (double p : {0.0, 0.5, 1.0}) {
            for (uint64_t seed : {1ull, 99ull}) {
                Scenario v = scn;
                v.p_success = p;
                v.seed = seed;
                RunResult opt = run_optimistic(v);
                CHECK(opt.trace_digest == mono.trace_digest);
                CHECK(opt.memory == mono.memory);
            }
        }
    }
}

TEST_CASE("conventional baseline hits the reference speed") {
    Scenario scn = scenario_table2_als(1.0, 20000, 1);
    scn.engine = EngineKind::Conventional;
    RunResult rr = run_conventional(scn);
    CHECK(rr.breakdown.performance == doctest::Approx(38.9e3).epsilon(0.05));
    // engine measurement and the closed form agree to numerical precision
    PerfBreakdown model = conventional_breakdown(to_perf_params(scn));
    CHECK(rr.breakdown.performance ==
          doctest::Approx(model.performance).epsilon(1e-9));
}

TEST_CASE("a free channel leaves only the domain cycle times") {
    Scenario scn = scenario_table2_als(1.0, 5000, 1);
    scn.cost = CostModel{0.0, 0.0, 0.0};
    RunResult rr = run_conventional(scn);
    CHECK(rr.breakdown.performance ==
          doctest::Approx(1.0 / (1.0e-6 + 1.0e-7)).epsilon(1e-9));
}

TEST_CASE("virtual time decomposes exactly into the reported components") {
    Scenario scn = scenario_table2_als(0.9, 30000, 3);
    RunResult rr = run_optimistic(scn);
    double n = static_cast<double>(rr.cycles);
    double sum = rr.breakdown.per_cycle_total() * n;
    CHECK(sum == doctest::Approx(rr.total_time_s).epsilon(1e-12));
    // the ledger carries the same channel seconds as the breakdown
    double ch = 0.0;
    for (const LedgerEntry& e : rr.ledger) ch += e.time_s;
    CHECK(ch == doctest::Approx(rr.breakdown.t_ch * n).epsilon(1e-12));
}

TEST_CASE("same scenario and seed replay byte-identically") {
    Scenario scn = testgen::random_scenario(8);
    scn.p_success = 0.6;
    RunResult a = run_optimistic(scn);
    RunResult b = run_optimistic(scn);
    CHECK(a.trace_digest == b.trace_digest);
    CHECK(a.memory_digest == b.memory_digest);
    CHECK(a.total_time_s == b.total_time_s);
    REQUIRE(a.ledger.size() == b.ledger.size());
    for (size_t i = 0; i < a.ledger.size(); ++i) {
        CHECK(a.ledger[i].cycle == b.ledger[i].cycle);
        CHECK(a.ledger[i].words == b.ledger[i].words);
        CHECK(a.ledger[i].time_s == b.ledger[i].time_s);
    }
    std::ostringstream ra, rb;
    write_result_csv(ra, scn, a);
    write_result_csv(rb, scn, b);
    CHECK(ra.str() == rb.str());
}

TEST_CASE("two-thread execution is observationally identical") {
    for (uint64_t s : {11ull, 12ull}) {
        Scenario scn = testgen::random_scenario(s);
        scn.p_success = 0.7;
        Scenario threaded = scn;
        threaded.threads = 2;
        RunResult a = run_optimistic(scn);
        RunResult b = run_optimistic(threaded);
        CHECK(a.trace_digest == b.trace_digest);
        CHECK(a.memory_digest == b.memory_digest);
        CHECK(a.total_time_s == b.total_time_s);
        CHECK(a.channel_accesses == b.channel_accesses);
        std::ostringstream ta, tb;
        write_trace_csv(ta, a.trace);
        write_trace_csv(tb, b.trace);
        CHECK(ta.str() == tb.str());
    }
}

TEST_CASE("perfect prediction beats the conventional engine whenever D >= 2") {
    for (uint32_t depth : {2u, 4u, 16u}) {
        Scenario scn = scenario_table2_als(1.0, 4000, 1);
        scn.lob_depth = depth;
        RunResult rr = run_optimistic(scn);
        CHECK(rr.breakdown.ratio > 1.0);
    }
}

TEST_CASE("batching collapses the access count by the window size") {
    Scenario opt = scenario_batch640();
    RunResult o = run_optimistic(opt);
    Scenario conv = opt;
    conv.engine = EngineKind::Conventional;
    RunResult c = run_conventional(conv);
    CHECK(c.channel_accesses >= 1280);
    CHECK(o.channel_accesses <= 2 * ((640 + 63) / 64) + 4);
    // steady-state access reduction approaches the LOB depth
    double reduction = static_cast<double>(c.channel_accesses) /
                       static_cast<double>(o.channel_accesses);
    CHECK(reduction >= 50.0);
}

TEST_CASE("optimistic run matches its own analytic expectation at p=1") {
    Scenario scn = scenario_table2_als(1.0, 200000, 1);
    RunResult rr = run_optimistic(scn);
    PerfBreakdown model = als_breakdown(to_perf_params(scn), 1.0);
    CHECK(rr.breakdown.t_sim == doctest::Approx(model.t_sim).epsilon(0.01));
    CHECK(rr.breakdown.t_acc == doctest::Approx(model.t_acc).epsilon(0.01));
    CHECK(rr.breakdown.t_store == doctest::Approx(model.t_store).epsilon(0.01));
    CHECK(rr.breakdown.t_ch == doctest::Approx(model.t_ch).epsilon(0.01));
    CHECK(rr.breakdown.ratio == doctest::Approx(model.ratio).epsilon(0.01));
}

TEST_CASE("simulator-led writes run the same protocol") {
    Scenario scn = scenario_table2_sla(1.0e-6, 1.0, 5000, 1);
    scn.record_trace = true;
    RunResult rr = run_optimistic(scn);
    CHECK(rr.stats.transitions > 70);
    for (const TransitionRow& t : rr.transitions)
        CHECK(t.mode == OperatingMode::SLA);
    RunResult mono = run_monolithic(scn);
    CHECK(rr.trace_digest == mono.trace_digest);
    CHECK(rr.memory == mono.memory);
}

TEST_CASE("desync detection rejects foreign packets") {
    // feed a conventional packet where a flush is expected
    Scenario scn = scenario_table2_als(1.0, 64, 1);
    SyncParams sp = to_sync_params(scn);
    PacketQueue to_acc(false), to_sim(false);
    ChannelWrapper sim(Side::Sim, sp, scn.fabric, to_sim, to_acc);
    ChannelWrapper acc(Side::Acc, sp, scn.fabric, to_acc, to_sim);
    // interleave just far enough that the lagger blocks on the first flush
    sim.advance();
    acc.advance();
    sim.advance();
    ChannelPacket bogus;
    bogus.kind = PacketKind::LobFlush;
    bogus.payload = {0};  // zero entries
    to_sim.push(std::move(bogus));
    CHECK_THROWS_AS(sim.advance(), SimError);
}
