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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cosim/scenario_io.hpp"
#include "scenario_gen.hpp"

using namespace cosim;

namespace {

const char* kSample = R"(
# sample scenario
name = sample
engine = optimistic
cycles = 256
lob_depth = 8
seed = 42
p_success = 0.75

masters = 2
master.0.domain = sim
master.0.script = W 0x0 INCR4 WORD data=1,2,3,4 ; R 0x0 WRAP4 WORD @2
master.1.domain = acc
master.1.script = @3 R 0x1000 INCR WORD beats=6 busy=0,1,0,0,1,0

slaves = 2
slave.0.domain = acc
slave.0.fifo_depth = 4
slave.0.service_rate = 1
slave.0.wait_states = 1
slave.1.domain = sim

decoder.range.0 = 0x0 0x1000 0
decoder.range.1 = 0x1000 0x1000 1
arbiter.priority = 1 0
arbiter.default_grant = 0

sideband.0.name = irq0
sideband.0.domain = acc
sideband.0.toggles = 17 40
)";

}  // namespace

TEST_CASE("scenario files parse into a validated configuration") {
    Scenario scn = parse_scenario_text(kSample, "sample");
    CHECK(scn.name == "sample");
    CHECK(scn.cycles == 256);
    CHECK(scn.lob_depth == 8);
    CHECK(scn.p_success == doctest::Approx(0.75));
    CHECK(scn.fabric.master_count() == 2);
    CHECK(scn.fabric.master_domain[1] == Side::Acc);
    REQUIRE(scn.fabric.scripts[0].txns.size() == 2);
    CHECK(scn.fabric.scripts[0].txns[0].write);
    CHECK(scn.fabric.scripts[0].txns[0].data == std::vector<uint32_t>{1, 2, 3, 4});
    CHECK(scn.fabric.scripts[0].txns[1].gap == 2);
    CHECK(scn.fabric.scripts[1].txns[0].beats == 6);
    CHECK(scn.fabric.scripts[1].txns[0].busy_before.size() == 6);
    CHECK(scn.fabric.slave_cfg[0].wait_states == 1);
    CHECK(scn.fabric.decoder.ranges.size() == 2);
    CHECK(scn.fabric.arbiter.priority == std::vector<int>{1, 0});
    REQUIRE(scn.fabric.sideband.size() == 1);
    CHECK(scn.fabric.sideband[0].toggles == std::vector<uint64_t>{17, 40});

    // a parsed scenario actually runs and stays exact
    RunResult mono = run_monolithic(scn);
    RunResult opt = run_optimistic(scn);
    CHECK(opt.trace_digest == mono.trace_digest);
}

TEST_CASE("serialization round-trips through the parser") {
    Scenario scn = testgen::random_scenario(21);
    std::string text = serialize_scenario(scn);
    Scenario back = parse_scenario_text(text, "roundtrip");
    CHECK(serialize_scenario(back) == text);
}

TEST_CASE("config errors carry file and line positions") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("cycles 100\n", "f"),
                         "f:1: expected 'key = value'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("\n\ncycles = ten\n", "f"),
                         "f:3: expected an integer for 'cycles'", ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("masters = 1\n", "f"), ConfigError);
    CHECK_THROWS_AS(
        parse_scenario_text("cycles = 10\ncycles = 20\nmasters = 1\n", "f"),
        ConfigError);
    // unknown keys are rejected, with their line
    std::string txt = "masters = 1\nmaster.0.domain = sim\n"
                      "master.0.script = R 0x0 SINGLE WORD\nslaves = 0\n"
                      "arbiter.priority = 0\nmystery = 1\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(txt, "f"), "f:6: unknown key 'mystery'",
                         ConfigError);
}

TEST_CASE("script parsing rejects malformed transactions") {
    CHECK_THROWS_AS(parse_script("X 0x0 SINGLE WORD"), ConfigError);
    CHECK_THROWS_AS(parse_script("R 0x0 SINGLE"), ConfigError);
    CHECK_THROWS_AS(parse_script("R 0x0 NOPE WORD"), ConfigError);
    CHECK(parse_script("").txns.empty());
    MasterScript s = parse_script("W 0x10 SINGLE BYTE data=0xFF @4");
    REQUIRE(s.txns.size() == 1);
    CHECK(s.txns[0].gap == 4);
    CHECK(s.txns[0].size == Hsize::Byte);
}

TEST_CASE("trace csv diff finds the first divergent cycle") {
    Scenario scn = testgen::random_scenario(30);
    RunResult a = run_monolithic(scn);

    char ta[] = "/tmp/cosim_trace_a_XXXXXX";
    char tb[] = "/tmp/cosim_trace_b_XXXXXX";
    REQUIRE(mkstemp(ta) >= 0);
    REQUIRE(mkstemp(tb) >= 0);
    {
        std::ofstream fa(ta), fb(tb);
        write_trace_csv(fa, a.trace);
        auto rows = a.trace;
        rows[17].haddr ^= 0x100;  // corrupt one cycle
        write_trace_csv(fb, rows);
    }
    CHECK(!diff_trace_files(ta, ta).has_value());
    auto d = diff_trace_files(ta, tb);
    REQUIRE(d.has_value());
    CHECK(*d == 17);
    std::remove(ta);
    std::remove(tb);
}

TEST_CASE("result csv embeds the resolved configuration") {
    Scenario scn = scenario_table2_als(1.0, 64, 3);
    RunResult rr = run_optimistic(scn);
    std::ostringstream os;
    write_result_csv(os, scn, rr);
    std::string text = os.str();
    CHECK(text.find("# p_success = 1\n") != std::string::npos);
    CHECK(text.find("# lob_depth = 64") != std::string::npos);
    CHECK(text.find("# ch_startup = 1.22") != std::string::npos);
    CHECK(text.find("prob,T_sim,T_acc,T_store,T_rest,T_ch,performance,ratio") !=
          std::string::npos);
}

TEST_CASE("ledger and transition csv writers emit one row per record") {
    Scenario scn = scenario_table2_als(1.0, 200, 1);
    scn.lob_depth = 16;
    RunResult rr = run_optimistic(scn);
    std::ostringstream lo, to;
    write_ledger_csv(lo, rr.ledger);
    write_transitions_csv(to, rr.transitions);
    auto count_lines = [](const std::string& s) {
        size_t n = 0;
        for (char c : s)
            if (c == '\n') ++n;
        return n;
    };
    CHECK(count_lines(lo.str()) == rr.ledger.size() + 1);
    CHECK(count_lines(to.str()) == rr.transitions.size() + 1);
}
