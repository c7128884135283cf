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

#include "cosim/perfmodel.hpp"

#include <cmath>

namespace cosim {

PerfBreakdown conventional_breakdown(const PerfParams& pp) {
    PerfBreakdown b;
    b.t_sim = pp.t_sim_cycle;
    b.t_acc = pp.t_acc_cycle;
    b.t_ch = 2.0 * pp.cost.startup_s +
             pp.conv_payload_words * (pp.cost.s2a_word_s + pp.cost.a2s_word_s);
    b.performance = 1.0 / b.per_cycle_total();
    b.ratio = 1.0;
    return b;
}

namespace {

PerfBreakdown leading_breakdown(const PerfParams& pp, double p, Side leader) {
    if (p < 0.0 || p > 1.0) throw ConfigError("prediction probability outside [0,1]");
    const double D = static_cast<double>(pp.lob_depth);
    const double M = D - 1.0;  // predictions per full transition

    // s: all predictions of a transition succeed; E_C: committed cycles per
    // transition; E_extra: expected replay+completion work on failure.
    double s, E_C;
    if (p >= 1.0 || M == 0.0) {
        s = 1.0;
        E_C = D;
    } else {
        s = std::pow(p, M);
        E_C = (1.0 - s) / (1.0 - p) + s;
    }
    const double E_L = D + (E_C - D * s);  // leader cycles per transition

    const double t_leader = leader == Side::Sim ? pp.t_sim_cycle : pp.t_acc_cycle;
    const double t_lagger = leader == Side::Sim ? pp.t_acc_cycle : pp.t_sim_cycle;
    const double store_c = leader == Side::Sim ? pp.store_cost_sim : pp.store_cost_acc;
    const double rest_c =
        leader == Side::Sim ? pp.restore_cost_sim : pp.restore_cost_acc;

    const Direction flush_dir = leader == Side::Sim ? Direction::S2A : Direction::A2S;
    const Direction report_dir = other(leader) == Side::Sim ? Direction::S2A
                                                            : Direction::A2S;
    const double channel_per_transition =
        2.0 * pp.cost.startup_s +
        D * pp.flush_words_per_entry * pp.cost.word_cost(flush_dir) +
        pp.report_words * pp.cost.word_cost(report_dir);

    PerfBreakdown b;
    const double leader_per_cycle = t_leader * E_L / E_C;
    const double lagger_per_cycle = t_lagger;
    if (leader == Side::Sim) {
        b.t_sim = leader_per_cycle;
        b.t_acc = lagger_per_cycle;
    } else {
        b.t_sim = lagger_per_cycle;
        b.t_acc = leader_per_cycle;
    }
    b.t_store = pp.rollback_variables * store_c / E_C;
    b.t_restore = pp.rollback_variables * rest_c * (1.0 - s) / E_C;
    b.t_ch = channel_per_transition / E_C;
    b.performance = 1.0 / b.per_cycle_total();
    b.ratio = b.performance / conventional_breakdown(pp).performance;
    return b;
}

}  // namespace

PerfBreakdown als_breakdown(const PerfParams& pp, double p) {
    return leading_breakdown(pp, p, Side::Acc);
}

PerfBreakdown sla_breakdown(const PerfParams& pp, double p) {
    return leading_breakdown(pp, p, Side::Sim);
}

std::vector<SweepRow> sweep(const PerfParams& pp, OperatingMode mode,
                            const std::vector<double>& p_values,
                            const std::vector<uint32_t>& depths) {
    if (p_values.empty() || depths.empty())
        throw ConfigError("sweep needs at least one probability and one depth");
    std::vector<SweepRow> rows;
    for (uint32_t d : depths) {
        PerfParams q = pp;
        q.lob_depth = d;
        for (double p : p_values) {
            SweepRow r;
            r.mode = mode;
            r.lob_depth = d;
            r.p = p;
            r.breakdown = mode == OperatingMode::SLA ? sla_breakdown(q, p)
                                                     : als_breakdown(q, p);
            rows.push_back(r);
        }
    }
    return rows;
}

double break_even_accuracy(const PerfParams& pp, OperatingMode mode) {
    auto ratio_at = [&](double p) {
        return (mode == OperatingMode::SLA ? sla_breakdown(pp, p)
                                           : als_breakdown(pp, p))
            .ratio;
    };
    double lo = 0.001, hi = 0.9999;
    if (ratio_at(lo) >= 1.0) return lo;
    if (ratio_at(hi) <= 1.0) return hi;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        if (ratio_at(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cosim
