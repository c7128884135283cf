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
#include <vector>

#include "cosim/channel.hpp"
#include "cosim/fabric.hpp"

namespace cosim {

// Closed-form expectation model for the optimistic engine on a steadily
// predictable workload, cross-validated against the Monte Carlo engine.
//
// A transition flushes D entries: D-1 predicted cycles plus a final
// synchronization cycle completed from the lagger's report. Predictions
// succeed i.i.d. with probability p. On the first failure at entry j the
// leader has still run the whole window ahead, restores, replays the j-1
// verified cycles and finishes the failed one from the reported actual, so
// per transition the leader executes D + j cycles while the lagger only
// ever executes committed cycles.

struct PerfParams {
    double t_sim_cycle = 1.0e-6;
    double t_acc_cycle = 1.0e-7;
    CostModel cost;
    uint32_t lob_depth = 64;
    uint32_t rollback_variables = 1000;
    // calibrated accounting constants (see docs/calibration.md)
    double store_cost_sim = 2.5e-9;
    double restore_cost_sim = 1.0e-9;
    double store_cost_acc = 3.0e-11;
    double restore_cost_acc = 3.0e-11;
    double flush_words_per_entry = 0.5;
    double report_words = 1.0;
    double conv_payload_words = 2.0;
};

struct PerfBreakdown {
    double t_sim = 0.0;
    double t_acc = 0.0;
    double t_store = 0.0;
    double t_restore = 0.0;
    double t_ch = 0.0;
    double performance = 0.0;  // committed cycles per second
    double ratio = 1.0;        // vs the conventional engine

    double per_cycle_total() const {
        return t_sim + t_acc + t_store + t_restore + t_ch;
    }
};

/// Lockstep baseline: one exchange each way per cycle.
PerfBreakdown conventional_breakdown(const PerfParams& pp);

/// Accelerator-leading mode (leader time = t_acc_cycle).
PerfBreakdown als_breakdown(const PerfParams& pp, double p);

/// Simulator-leading mode (leader time = t_sim_cycle).
PerfBreakdown sla_breakdown(const PerfParams& pp, double p);

struct SweepRow {
    OperatingMode mode = OperatingMode::ALS;
    uint32_t lob_depth = 64;
    double p = 1.0;
    PerfBreakdown breakdown;
};

std::vector<SweepRow> sweep(const PerfParams& pp, OperatingMode mode,
                            const std::vector<double>& p_values,
                            const std::vector<uint32_t>& depths);

/// Prediction accuracy at which the mode's performance equals the
/// conventional baseline (bisection; ratio is monotone in p).
double break_even_accuracy(const PerfParams& pp, OperatingMode mode);

}  // namespace cosim
