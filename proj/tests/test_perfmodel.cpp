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

#include <cmath>

#include "cosim/perfmodel.hpp"
#include "cosim/scenario_io.hpp"

using namespace cosim;

namespace {

PerfParams reference_params() { return PerfParams{}; }

}  // namespace

TEST_CASE("conventional closed form lands on the reference baseline") {
    PerfBreakdown b = conventional_breakdown(reference_params());
    CHECK(b.performance == doctest::Approx(38.9e3).epsilon(0.05));
    CHECK(b.t_sim == 1.0e-6);
    CHECK(b.t_acc == 1.0e-7);
    CHECK(b.t_store == 0.0);
    CHECK(b.t_restore == 0.0);
}

TEST_CASE("conventional with a free channel is bounded by the domains") {
    PerfParams pp = reference_params();
    pp.cost = CostModel{0.0, 0.0, 0.0};
    PerfBreakdown b = conventional_breakdown(pp);
    CHECK(b.performance == doctest::Approx(1.0 / 1.1e-6).epsilon(1e-12));
}

TEST_CASE("doubling the startup shifts the baseline by the closed-form amount") {
    PerfParams pp = reference_params();
    PerfBreakdown base = conventional_breakdown(pp);
    pp.cost.startup_s *= 2.0;
    PerfBreakdown slow = conventional_breakdown(pp);
    double expect = 1.0 / (1.0 / base.performance + 12.2e-6 * 2.0);
    CHECK(slow.performance == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("accelerator-led perfect prediction matches the reference column") {
    PerfBreakdown b = als_breakdown(reference_params(), 1.0);
    CHECK(b.ratio == doctest::Approx(16.75).epsilon(0.10));
    CHECK(b.t_sim == doctest::Approx(1.0e-6).epsilon(1e-12));
    CHECK(b.t_acc == doctest::Approx(1.0e-7).epsilon(1e-12));
    CHECK(b.t_store == doctest::Approx(4.69e-10).epsilon(0.05));
    CHECK(b.t_restore == 0.0);
    CHECK(b.t_ch == doctest::Approx(4.3e-7).epsilon(0.15));
    CHECK(b.performance == doctest::Approx(652e3).epsilon(0.1));
}

TEST_CASE("accelerator-led sweep tracks the reference ratio row") {
    const double probs[] = {0.99, 0.96, 0.90, 0.80, 0.60, 0.30, 0.10};
    const double ratios[] = {13.97, 9.33, 5.80, 3.56, 1.91, 1.19, 0.94};
    PerfParams pp = reference_params();
    double prev = als_breakdown(pp, 1.0).ratio;
    for (int i = 0; i < 7; ++i) {
        PerfBreakdown b = als_breakdown(pp, probs[i]);
        CHECK(b.ratio == doctest::Approx(ratios[i]).epsilon(0.15));
        CHECK(b.ratio <= prev);
        prev = b.ratio;
        // T_sim never grows: the lagger only executes committed cycles
        CHECK(b.t_sim == doctest::Approx(1.0e-6).epsilon(1e-12));
    }
}

TEST_CASE("simulator-led anchors and break-even accuracies") {
    PerfParams pp = reference_params();
    CHECK(sla_breakdown(pp, 1.0).ratio == doctest::Approx(15.34).epsilon(0.10));

    PerfParams slow = pp;
    slow.t_sim_cycle = 1.0e-5;
    CHECK(sla_breakdown(slow, 1.0).ratio == doctest::Approx(3.25).epsilon(0.10));

    double be_fast = break_even_accuracy(pp, OperatingMode::SLA);
    double be_slow = break_even_accuracy(slow, OperatingMode::SLA);
    CHECK(be_fast == doctest::Approx(0.70).epsilon(0.08));
    CHECK(be_slow == doctest::Approx(0.98).epsilon(0.06));
}

TEST_CASE("performance is monotone in prediction accuracy") {
    PerfParams pp = reference_params();
    for (OperatingMode mode : {OperatingMode::ALS, OperatingMode::SLA}) {
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            double p = i / 200.0;
            PerfBreakdown b = mode == OperatingMode::ALS ? als_breakdown(pp, p)
                                                         : sla_breakdown(pp, p);
            CHECK(b.performance >= prev);
            prev = b.performance;
        }
    }
}

TEST_CASE("a ratio below one exists at low accuracy") {
    PerfParams pp = reference_params();
    bool sub_one = false;
    for (double p = 0.05; p <= 0.3001; p += 0.05)
        if (als_breakdown(pp, p).ratio < 1.0) sub_one = true;
    CHECK(sub_one);
}

TEST_CASE("infinite windows amortize the startup away") {
    PerfParams pp = reference_params();
    pp.store_cost_acc = 0.0;
    pp.restore_cost_acc = 0.0;
    pp.lob_depth = 1u << 20;
    double limit =
        1.0 / (pp.t_sim_cycle + pp.t_acc_cycle +
               pp.flush_words_per_entry * pp.cost.a2s_word_s);
    CHECK(als_breakdown(pp, 1.0).performance == doctest::Approx(limit).epsilon(0.001));
}

TEST_CASE("deeper windows help at high accuracy and hurt at low accuracy") {
    PerfParams pp = reference_params();
    auto rows =
        sweep(pp, OperatingMode::ALS, {1.0, 0.05}, {8u, 16u, 32u, 64u, 128u});
    double prev_hi = 0.0, prev_lo = 1e18;
    for (const SweepRow& r : rows) {
        if (r.p == 1.0) {
            CHECK(r.breakdown.ratio >= prev_hi);
            prev_hi = r.breakdown.ratio;
        } else {
            CHECK(r.breakdown.ratio <= prev_lo);
            prev_lo = r.breakdown.ratio;
        }
    }
}

TEST_CASE("sweep rejects empty grids") {
    PerfParams pp = reference_params();
    CHECK_THROWS_AS(sweep(pp, OperatingMode::ALS, {}, {64u}), ConfigError);
    CHECK_THROWS_AS(sweep(pp, OperatingMode::ALS, {1.0}, {}), ConfigError);
}

TEST_CASE("analytic expectations sit within three standard errors of Monte Carlo") {
    // the module's core oracle check: independent seeds, per-component SE
    const int runs = 6;
    const uint64_t cycles = 120000;
    for (double p : {0.9, 0.6}) {
        double ratio[runs], t_acc[runs], t_ch[runs], t_store[runs];
        for (int r = 0; r < runs; ++r) {
            Scenario scn = scenario_table2_als(p, cycles, 101 + 13 * r);
            RunResult rr = run_optimistic(scn);
            ratio[r] = rr.breakdown.ratio;
            t_acc[r] = rr.breakdown.t_acc;
            t_ch[r] = rr.breakdown.t_ch;
            t_store[r] = rr.breakdown.t_store;
        }
        auto agree = [&](const double* v, double expect) {
            double mean = 0.0;
            for (int r = 0; r < runs; ++r) mean += v[r];
            mean /= runs;
            double var = 0.0;
            for (int r = 0; r < runs; ++r) var += (v[r] - mean) * (v[r] - mean);
            double se = std::sqrt(var / (runs - 1.0) / runs);
            // run-boundary effects (warm-up, final partial window) are a few
            // parts in 1e4; keep a small absolute floor under the 3-SE band
            double tol = std::max(3.0 * se, 3e-3 * std::abs(expect));
            CHECK(std::abs(mean - expect) <= tol);
        };
        PerfBreakdown model = als_breakdown(reference_params(), p);
        agree(ratio, model.ratio);
        agree(t_acc, model.t_acc);
        agree(t_ch, model.t_ch);
        agree(t_store, model.t_store);
    }
}

TEST_CASE("simulator-led Monte Carlo matches its closed form too") {
    Scenario scn = scenario_table2_sla(1.0e-6, 0.9, 150000, 5);
    RunResult rr = run_optimistic(scn);
    PerfBreakdown model = sla_breakdown(to_perf_params(scn), 0.9);
    CHECK(rr.breakdown.ratio == doctest::Approx(model.ratio).epsilon(0.02));
    CHECK(rr.breakdown.t_sim == doctest::Approx(model.t_sim).epsilon(0.02));
    CHECK(rr.breakdown.t_ch == doctest::Approx(model.t_ch).epsilon(0.02));
    CHECK(rr.breakdown.t_restore ==
          doctest::Approx(model.t_restore).epsilon(0.05));
}
