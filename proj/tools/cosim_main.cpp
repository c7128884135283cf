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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cosim/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace cosim;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kConfig = 2;
constexpr int kProtocol = 3;

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

void write_run_outputs(const fs::path& dir, const Scenario& scn, const RunResult& rr) {
    fs::create_directories(dir);
    if (scn.record_trace) {
        auto os = open_out(dir / "trace.csv");
        write_trace_csv(os, rr.trace);
    }
    {
        auto os = open_out(dir / "ledger.csv");
        write_ledger_csv(os, rr.ledger);
    }
    {
        auto os = open_out(dir / "transitions.csv");
        write_transitions_csv(os, rr.transitions);
    }
    {
        auto os = open_out(dir / "result.csv");
        write_result_csv(os, scn, rr);
    }
}

int do_run(const std::string& scenario_path, const std::string& engine,
           const std::string& out_dir, const std::optional<double>& p,
           const std::optional<uint64_t>& seed, const std::optional<uint32_t>& depth,
           const std::optional<int>& threads) {
    Scenario scn = load_scenario(scenario_path);
    if (!engine.empty()) {
        if (engine == "monolithic")
            scn.engine = EngineKind::Monolithic;
        else if (engine == "conventional")
            scn.engine = EngineKind::Conventional;
        else if (engine == "optimistic")
            scn.engine = EngineKind::Optimistic;
        else
            throw ConfigError("unknown engine '" + engine + "'");
    }
    if (p) scn.p_success = *p;
    if (seed) scn.seed = *seed;
    if (depth) scn.lob_depth = *depth;
    if (threads) scn.threads = *threads;

    RunResult rr = run(scn);
    write_run_outputs(out_dir, scn, rr);
    std::printf("%s: %llu cycles, %.6g s virtual, %.6g cycles/s, %llu channel accesses\n",
                to_string(scn.engine), static_cast<unsigned long long>(rr.cycles),
                rr.total_time_s, rr.breakdown.performance,
                static_cast<unsigned long long>(rr.channel_accesses));
    return kOk;
}

int do_diff(const std::string& a, const std::string& b) {
    auto first = diff_trace_files(a, b);
    if (!first) {
        std::printf("traces identical\n");
        return kOk;
    }
    std::printf("traces differ at cycle %llu\n",
                static_cast<unsigned long long>(*first));
    return kMismatch;
}

int do_sweep(const std::string& scenario_path, const std::string& mode_name,
             const std::vector<double>& ps, const std::vector<uint32_t>& depths,
             const std::string& out_file) {
    Scenario scn = load_scenario(scenario_path);
    PerfParams pp = to_perf_params(scn);
    OperatingMode mode =
        mode_name == "sla" ? OperatingMode::SLA : OperatingMode::ALS;
    std::vector<double> p_list = ps;
    if (p_list.empty())
        p_list = {1.0, 0.99, 0.96, 0.9, 0.8, 0.6, 0.3, 0.1};
    std::vector<uint32_t> d_list = depths;
    if (d_list.empty()) d_list = {scn.lob_depth};

    auto rows = sweep(pp, mode, p_list, d_list);
    auto os = open_out(out_file);
    os << "mode,lob_depth,prob,T_sim,T_acc,T_store,T_rest,T_ch,performance,ratio\n";
    char buf[64];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%u,", to_string(r.mode), r.lob_depth);
        os << buf;
        write_breakdown_row(os, r.p, r.breakdown);
    }
    return kOk;
}

int do_table2(const std::string& out_dir, uint64_t mc_cycles) {
    fs::create_directories(out_dir);
    const std::vector<double> probs = {1.0, 0.99, 0.96, 0.9, 0.8, 0.6, 0.3, 0.1};
    Scenario base = scenario_table2_als(1.0, 1000, 1);
    PerfParams pp = to_perf_params(base);
    {
        auto os = open_out(fs::path(out_dir) / "table2.csv");
        os << "prob,T_sim,T_acc,T_store,T_rest,T_ch,performance,ratio\n";
        for (double p : probs) write_breakdown_row(os, p, als_breakdown(pp, p));
    }
    if (mc_cycles > 0) {
        auto os = open_out(fs::path(out_dir) / "table2_mc.csv");
        os << "prob,T_sim,T_acc,T_store,T_rest,T_ch,performance,ratio\n";
        for (double p : probs) {
            Scenario scn = scenario_table2_als(p, mc_cycles, 1);
            RunResult rr = run_optimistic(scn);
            write_breakdown_row(os, p, rr.breakdown);
        }
    }
    return kOk;
}

int do_fig4(const std::string& out_file) {
    Scenario base = scenario_table2_als(1.0, 1000, 1);
    PerfParams pp = to_perf_params(base);
    auto os = open_out(out_file);
    os << "t_sim_cycle,lob_depth,prob,ratio\n";
    char buf[96];
    for (double t_sim : {1.0e-5, 1.0e-6}) {
        for (uint32_t depth : {16u, 64u}) {
            PerfParams q = pp;
            q.t_sim_cycle = t_sim;
            q.lob_depth = depth;
            for (int i = 1; i <= 100; ++i) {
                double p = i / 100.0;
                PerfBreakdown b = als_breakdown(q, p);
                std::snprintf(buf, sizeof(buf), "%.3g,%u,%.3g,%.6g\n", t_sim, depth, p,
                              b.ratio);
                os << buf;
            }
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cycle-accurate split-bus co-emulation sandbox"};
    app.require_subcommand(1);

    std::string scenario_path, engine, out_dir = ".", out_file, mode_name = "als";
    std::string diff_a, diff_b;
    std::optional<double> p_opt;
    std::optional<uint64_t> seed_opt;
    std::optional<uint32_t> depth_opt;
    std::optional<int> threads_opt;
    std::vector<double> ps;
    std::vector<uint32_t> depths;
    uint64_t mc_cycles = 0;

    auto* c_run = app.add_subcommand("run", "run one engine on a scenario");
    c_run->add_option("--scenario", scenario_path, "scenario file")->required();
    c_run->add_option("--engine", engine, "monolithic|conventional|optimistic");
    c_run->add_option("--out", out_dir, "output directory");
    c_run->add_option("--p", p_opt, "override prediction success probability");
    c_run->add_option("--seed", seed_opt, "override noise seed");
    c_run->add_option("--depth", depth_opt, "override LOB depth");
    c_run->add_option("--threads", threads_opt, "1 or 2");

    auto* c_diff = app.add_subcommand("diff", "compare two trace CSVs");
    c_diff->add_option("a", diff_a, "trace A")->required();
    c_diff->add_option("b", diff_b, "trace B")->required();

    auto* c_sweep = app.add_subcommand("sweep", "analytic sweep over p and LOB depth");
    c_sweep->add_option("--scenario", scenario_path, "scenario file")->required();
    c_sweep->add_option("--mode", mode_name, "als|sla");
    c_sweep->add_option("--p", ps, "probability grid");
    c_sweep->add_option("--depth", depths, "LOB depth grid");
    c_sweep->add_option("--out", out_file, "output CSV")->required();

    auto* c_t2 = app.add_subcommand("table2", "reference performance reproduction");
    c_t2->add_option("--out", out_dir, "output directory");
    c_t2->add_option("--mc", mc_cycles, "also run Monte Carlo with this many cycles");

    auto* c_f4 = app.add_subcommand("fig4", "ratio-vs-accuracy grid CSV");
    c_f4->add_option("--out", out_file, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed())
            return do_run(scenario_path, engine, out_dir, p_opt, seed_opt, depth_opt,
                          threads_opt);
        if (c_diff->parsed()) return do_diff(diff_a, diff_b);
        if (c_sweep->parsed())
            return do_sweep(scenario_path, mode_name, ps, depths, out_file);
        if (c_t2->parsed()) return do_table2(out_dir, mc_cycles);
        if (c_f4->parsed()) return do_fig4(out_file);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const SimError& e) {
        std::fprintf(stderr, "protocol error: %s\n", e.what());
        return kProtocol;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kProtocol;
    }
    return kOk;
}
