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

#include <string>
#include <tuple>
#include <vector>

#include "cosim/perfmodel.hpp"
#include "cosim/sync.hpp"

namespace cosim {

enum class EngineKind : uint8_t { Monolithic, Conventional, Optimistic };
const char* to_string(EngineKind k);

struct Scenario {
    std::string name = "scenario";
    EngineKind engine = EngineKind::Optimistic;
    FabricConfig fabric;
    uint64_t cycles = 1000;
    uint32_t lob_depth = 64;
    double t_sim_cycle = 1.0e-6;
    double t_acc_cycle = 1.0e-7;
    CostModel cost;
    double conv_payload_words = 2.0;
    double flush_words_per_entry = 0.5;
    double report_words = 1.0;
    uint32_t rollback_variables = 1000;
    double store_cost_sim = 2.5e-9;
    double restore_cost_sim = 1.0e-9;
    double store_cost_acc = 3.0e-11;
    double restore_cost_acc = 3.0e-11;
    double p_success = 1.0;
    uint64_t seed = 1;
    int threads = 1;
    bool record_trace = true;
    bool record_paths = false;

    void validate() const;
};

PerfParams to_perf_params(const Scenario& scn);
SyncParams to_sync_params(const Scenario& scn);

struct RunResult {
    EngineKind engine = EngineKind::Monolithic;
    uint64_t cycles = 0;
    std::vector<MsabsSnapshot> trace;  // when recorded
    uint64_t trace_digest = 0;
    std::vector<std::tuple<int, uint32_t, uint32_t>> memory;  // (slave, addr, word)
    uint64_t memory_digest = 0;
    double total_time_s = 0.0;
    PerfBreakdown breakdown;
    std::vector<LedgerEntry> ledger;
    uint64_t channel_accesses = 0;
    std::vector<TransitionRow> transitions;
    CwStats stats;
    std::string paths_sim;
    std::string paths_acc;
    std::vector<CwStation> stations_sim;
    std::vector<CwStation> stations_acc;
};

/// The reference: every component in one domain, no channel, golden trace.
RunResult run_monolithic(const Scenario& scn);

/// Lockstep co-emulation: both domains advance one cycle per exchange pair.
RunResult run_conventional(const Scenario& scn);

/// Prediction-and-rollback co-emulation via the two channel wrappers.
RunResult run_optimistic(const Scenario& scn);

RunResult run(const Scenario& scn);

}  // namespace cosim
