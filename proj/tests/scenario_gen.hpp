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

#include <array>

#include "cosim/engine.hpp"
#include "cosim/rng.hpp"

namespace cosim::testgen {

// Randomized scenario factory for the transparency property: mixed burst
// kinds, BUSY insertions, idle gaps, wait-state slaves, both placements and
// optional sideband toggles. Every generated scenario is valid by
// construction.
inline Scenario random_scenario(uint64_t gen_seed) {
    Rng rng(gen_seed ^ 0xC0FFEEull);
    Scenario scn;
    scn.name = "random-" + std::to_string(gen_seed);
    scn.cycles = 300 + rng.below(900);
    scn.lob_depth = static_cast<uint32_t>(1 + rng.below(24));
    scn.seed = gen_seed * 7 + 1;
    scn.record_trace = true;

    int masters = static_cast<int>(1 + rng.below(3));
    int slaves = static_cast<int>(1 + rng.below(2));

    FabricConfig& f = scn.fabric;
    for (int j = 0; j < slaves; ++j) {
        f.slave_domain.push_back(rng.bernoulli(0.5) ? Side::Sim : Side::Acc);
        SlaveCfg sc;
        sc.fifo_depth = static_cast<uint32_t>(2 + rng.below(8));
        sc.service_rate = static_cast<uint32_t>(1 + rng.below(2));
        sc.wait_states = static_cast<uint32_t>(rng.below(3));
        f.slave_cfg.push_back(sc);
        f.decoder.ranges.push_back(
            AddressRange{static_cast<uint32_t>(j) * 0x10000u, 0x10000u, j});
    }

    for (int i = 0; i < masters; ++i) {
        f.master_domain.push_back(rng.bernoulli(0.5) ? Side::Sim : Side::Acc);
        MasterScript script;
        size_t txns = 3 + rng.below(6);
        for (size_t k = 0; k < txns; ++k) {
            TxnDesc t;
            t.gap = static_cast<uint32_t>(rng.below(6));
            t.write = rng.bernoulli(0.5);
            t.size = std::array<Hsize, 3>{Hsize::Byte, Hsize::Halfword,
                                          Hsize::Word}[rng.below(3)];
            t.burst = std::array<Hburst, 6>{Hburst::Single, Hburst::Incr4,
                                            Hburst::Wrap4,  Hburst::Incr8,
                                            Hburst::Wrap8,  Hburst::Incr}[rng.below(6)];
            if (t.burst == Hburst::Incr)
                t.beats = static_cast<uint32_t>(2 + rng.below(12));
            uint32_t bytes = static_cast<uint32_t>(t.size);
            uint32_t span = 0x10000u * static_cast<uint32_t>(slaves);
            // occasionally hit unmapped space to exercise the default slave
            if (rng.bernoulli(0.08)) span = 0x20000u * slaves;
            t.addr = static_cast<uint32_t>(rng.below(span / bytes)) * bytes;
            uint32_t beats = t.total_beats();
            if (beats > 1 && rng.bernoulli(0.3)) {
                t.busy_before.assign(beats, 0);
                for (uint32_t b = 1; b < beats; ++b)
                    if (rng.bernoulli(0.25))
                        t.busy_before[b] = static_cast<uint8_t>(1 + rng.below(2));
            }
            script.txns.push_back(std::move(t));
        }
        f.scripts.push_back(std::move(script));
    }

    f.arbiter.priority.resize(masters);
    for (int i = 0; i < masters; ++i) f.arbiter.priority[i] = i;
    for (int i = masters - 1; i > 0; --i)
        std::swap(f.arbiter.priority[i], f.arbiter.priority[rng.below(i + 1)]);
    f.arbiter.default_grant = static_cast<int>(rng.below(masters));

    size_t sidebands = rng.below(3);
    for (size_t k = 0; k < sidebands; ++k) {
        SidebandCfg sb;
        sb.name = "irq" + std::to_string(k);
        sb.owner = rng.bernoulli(0.5) ? Side::Sim : Side::Acc;
        uint64_t at = 5 + rng.below(40);
        while (at < scn.cycles) {
            sb.toggles.push_back(at);
            at += 10 + rng.below(80);
        }
        f.sideband.push_back(std::move(sb));
    }

    scn.validate();
    return scn;
}

}  // namespace cosim::testgen
