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
#include <ostream>
#include <string>

#include "cosim/engine.hpp"

namespace cosim {

/// Parse the key/value scenario format (see docs/scenario_format.md).
/// Errors carry file:line positions.
Scenario parse_scenario_text(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

/// Resolved configuration as scenario-format text, defaults included.
std::string serialize_scenario(const Scenario& scn);

/// One master transaction list, scenario-script syntax.
MasterScript parse_script(const std::string& text);

void write_trace_csv(std::ostream& os, const std::vector<MsabsSnapshot>& rows);
void write_ledger_csv(std::ostream& os, const std::vector<LedgerEntry>& rows);
void write_transitions_csv(std::ostream& os, const std::vector<TransitionRow>& rows);

/// Table-2-shaped result row (prob, T_sim, T_acc, T_store, T_rest, T_ch,
/// performance, ratio) with the resolved configuration in header comments.
void write_result_csv(std::ostream& os, const Scenario& scn, const RunResult& rr);

void write_breakdown_row(std::ostream& os, double prob, const PerfBreakdown& b);

/// First cycle at which two trace CSVs differ (header excluded); nullopt when
/// they are identical.
std::optional<uint64_t> diff_trace_files(const std::string& a, const std::string& b);

// Pinned reference configurations.
Scenario scenario_table2_als(double p, uint64_t cycles, uint64_t seed);
Scenario scenario_table2_sla(double t_sim_cycle, double p, uint64_t cycles,
                             uint64_t seed);
Scenario scenario_batch640();

}  // namespace cosim
