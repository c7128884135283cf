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

#include "cosim/scenario_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace cosim {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct KvFile {
    std::string origin;
    std::map<std::string, Entry> kv;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
    }

    const Entry* find(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::string str(const std::string& key, const std::string& dflt) {
        const Entry* e = find(key);
        return e ? e->value : dflt;
    }

    double num(const std::string& key, double dflt) {
        const Entry* e = find(key);
        if (!e) return dflt;
        try {
            size_t pos = 0;
            double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            fail(e->line, "expected a number for '" + key + "'");
        }
    }

    uint64_t uint(const std::string& key, uint64_t dflt) {
        const Entry* e = find(key);
        if (!e) return dflt;
        try {
            size_t pos = 0;
            uint64_t v = std::stoull(e->value, &pos, 0);
            if (pos != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            fail(e->line, "expected an integer for '" + key + "'");
        }
    }

    bool flag(const std::string& key, bool dflt) {
        const Entry* e = find(key);
        if (!e) return dflt;
        if (e->value == "1" || e->value == "true" || e->value == "yes") return true;
        if (e->value == "0" || e->value == "false" || e->value == "no") return false;
        fail(e->line, "expected a boolean for '" + key + "'");
    }
};

KvFile scan(const std::string& text, const std::string& origin) {
    KvFile f;
    f.origin = origin;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            f.fail(ln, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) f.fail(ln, "empty key");
        if (f.kv.count(key)) f.fail(ln, "duplicate key '" + key + "'");
        f.kv[key] = Entry{value, ln, false};
    }
    return f;
}

Side parse_side(KvFile& f, const std::string& key) {
    const Entry* e = f.find(key);
    if (!e) throw ConfigError(f.origin + ": missing '" + key + "'");
    if (e->value == "sim") return Side::Sim;
    if (e->value == "acc") return Side::Acc;
    f.fail(e->line, "domain must be 'sim' or 'acc'");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& s, char sep) {
    std::vector<uint64_t> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (cur.empty()) continue;
        out.push_back(std::stoull(cur, nullptr, 0));
    }
    return out;
}

Hburst parse_burst(const std::string& s) {
    for (int i = 0; i < 8; ++i) {
        auto b = static_cast<Hburst>(i);
        if (s == to_string(b)) return b;
    }
    throw ConfigError("unknown burst kind '" + s + "'");
}

Hsize parse_size(const std::string& s) {
    if (s == "BYTE") return Hsize::Byte;
    if (s == "HALF" || s == "HALFWORD") return Hsize::Halfword;
    if (s == "WORD") return Hsize::Word;
    throw ConfigError("unknown transfer size '" + s + "'");
}

}  // namespace

MasterScript parse_script(const std::string& text) {
    MasterScript script;
    std::string txn_text;
    std::istringstream is(text);
    while (std::getline(is, txn_text, ';')) {
        txn_text = trim(txn_text);
        if (txn_text.empty()) continue;
        TxnDesc t;
        size_t positional = 0;
        for (const std::string& tok : split_ws(txn_text)) {
            if (tok[0] == '@') {
                t.gap = static_cast<uint32_t>(std::stoul(tok.substr(1), nullptr, 0));
            } else if (tok.rfind("beats=", 0) == 0) {
                t.beats = static_cast<uint32_t>(std::stoul(tok.substr(6), nullptr, 0));
            } else if (tok.rfind("busy=", 0) == 0) {
                for (uint64_t v : parse_u64_list(tok.substr(5), ','))
                    t.busy_before.push_back(static_cast<uint8_t>(v));
            } else if (tok.rfind("data=", 0) == 0) {
                for (uint64_t v : parse_u64_list(tok.substr(5), ','))
                    t.data.push_back(static_cast<uint32_t>(v));
            } else if (positional == 0) {
                if (tok == "R")
                    t.write = false;
                else if (tok == "W")
                    t.write = true;
                else
                    throw ConfigError("transaction must start with R or W, got '" +
                                      tok + "'");
                positional = 1;
            } else if (positional == 1) {
                t.addr = static_cast<uint32_t>(std::stoul(tok, nullptr, 0));
                positional = 2;
            } else if (positional == 2) {
                t.burst = parse_burst(tok);
                positional = 3;
            } else if (positional == 3) {
                t.size = parse_size(tok);
                positional = 4;
            } else {
                throw ConfigError("unexpected token '" + tok + "' in script");
            }
        }
        if (positional < 4)
            throw ConfigError("incomplete transaction '" + txn_text + "'");
        script.txns.push_back(std::move(t));
    }
    return script;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    KvFile f = scan(text, origin);
    Scenario scn;
    scn.name = f.str("name", "scenario");

    std::string engine = f.str("engine", "optimistic");
    if (engine == "monolithic")
        scn.engine = EngineKind::Monolithic;
    else if (engine == "conventional")
        scn.engine = EngineKind::Conventional;
    else if (engine == "optimistic")
        scn.engine = EngineKind::Optimistic;
    else
        throw ConfigError(origin + ": unknown engine '" + engine + "'");

    scn.cycles = f.uint("cycles", scn.cycles);
    scn.lob_depth = static_cast<uint32_t>(f.uint("lob_depth", scn.lob_depth));
    scn.seed = f.uint("seed", scn.seed);
    scn.p_success = f.num("p_success", scn.p_success);
    scn.threads = static_cast<int>(f.uint("threads", scn.threads));
    scn.record_trace = f.flag("record_trace", scn.record_trace);
    scn.record_paths = f.flag("record_paths", scn.record_paths);
    scn.t_sim_cycle = f.num("t_sim_cycle", scn.t_sim_cycle);
    scn.t_acc_cycle = f.num("t_acc_cycle", scn.t_acc_cycle);
    scn.cost.startup_s = f.num("ch_startup", scn.cost.startup_s);
    scn.cost.s2a_word_s = f.num("ch_s2a_word", scn.cost.s2a_word_s);
    scn.cost.a2s_word_s = f.num("ch_a2s_word", scn.cost.a2s_word_s);
    scn.conv_payload_words = f.num("conv_payload_words", scn.conv_payload_words);
    scn.flush_words_per_entry =
        f.num("flush_words_per_entry", scn.flush_words_per_entry);
    scn.report_words = f.num("report_words", scn.report_words);
    scn.rollback_variables =
        static_cast<uint32_t>(f.uint("rollback_variables", scn.rollback_variables));
    scn.store_cost_sim = f.num("store_cost_sim", scn.store_cost_sim);
    scn.restore_cost_sim = f.num("restore_cost_sim", scn.restore_cost_sim);
    scn.store_cost_acc = f.num("store_cost_acc", scn.store_cost_acc);
    scn.restore_cost_acc = f.num("restore_cost_acc", scn.restore_cost_acc);

    uint64_t masters = f.uint("masters", 0);
    uint64_t slaves = f.uint("slaves", 0);
    if (masters == 0) throw ConfigError(origin + ": need at least one master");
    for (uint64_t i = 0; i < masters; ++i) {
        std::string base = "master." + std::to_string(i) + ".";
        scn.fabric.master_domain.push_back(parse_side(f, base + "domain"));
        const Entry* e = f.find(base + "script");
        if (!e) throw ConfigError(origin + ": missing '" + base + "script'");
        try {
            scn.fabric.scripts.push_back(parse_script(e->value));
        } catch (const ConfigError& err) {
            f.fail(e->line, err.what());
        }
    }
    for (uint64_t j = 0; j < slaves; ++j) {
        std::string base = "slave." + std::to_string(j) + ".";
        scn.fabric.slave_domain.push_back(parse_side(f, base + "domain"));
        SlaveCfg sc;
        sc.fifo_depth = static_cast<uint32_t>(f.uint(base + "fifo_depth", 16));
        sc.service_rate = static_cast<uint32_t>(f.uint(base + "service_rate", 16));
        sc.wait_states = static_cast<uint32_t>(f.uint(base + "wait_states", 0));
        scn.fabric.slave_cfg.push_back(sc);
    }

    for (uint64_t k = 0;; ++k) {
        const Entry* e = f.find("decoder.range." + std::to_string(k));
        if (!e) break;
        auto toks = split_ws(e->value);
        if (toks.size() != 3) f.fail(e->line, "decoder range needs 'base size slave'");
        AddressRange r;
        r.base = static_cast<uint32_t>(std::stoul(toks[0], nullptr, 0));
        r.size = static_cast<uint32_t>(std::stoul(toks[1], nullptr, 0));
        r.slave = static_cast<int>(std::stol(toks[2], nullptr, 0));
        scn.fabric.decoder.ranges.push_back(r);
    }

    {
        const Entry* e = f.find("arbiter.priority");
        std::vector<int> prio;
        if (e) {
            for (const std::string& tok : split_ws(e->value))
                prio.push_back(static_cast<int>(std::stol(tok)));
        } else {
            for (uint64_t i = 0; i < masters; ++i) prio.push_back(static_cast<int>(i));
        }
        scn.fabric.arbiter.priority = std::move(prio);
        scn.fabric.arbiter.default_grant =
            static_cast<int>(f.uint("arbiter.default_grant", 0));
    }

    for (uint64_t k = 0;; ++k) {
        std::string base = "sideband." + std::to_string(k) + ".";
        const Entry* e = f.find(base + "name");
        if (!e) break;
        SidebandCfg sb;
        sb.name = e->value;
        sb.owner = parse_side(f, base + "domain");
        const Entry* tg = f.find(base + "toggles");
        if (tg) sb.toggles = parse_u64_list(tg->value, ' ');
        scn.fabric.sideband.push_back(std::move(sb));
    }

    for (const auto& [key, e] : f.kv) {
        if (!e.used) f.fail(e.line, "unknown key '" + key + "'");
    }

    try {
        scn.validate();
    } catch (const SimError& err) {
        throw ConfigError(origin + ": " + err.what());
    }
    return scn;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string script_text(const MasterScript& s) {
    std::string out;
    for (size_t i = 0; i < s.txns.size(); ++i) {
        const TxnDesc& t = s.txns[i];
        if (i) out += " ; ";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s 0x%X %s %s", t.write ? "W" : "R", t.addr,
                      to_string(t.burst),
                      t.size == Hsize::Byte      ? "BYTE"
                      : t.size == Hsize::Halfword ? "HALF"
                                                  : "WORD");
        out += buf;
        if (t.gap) out += " @" + std::to_string(t.gap);
        if (t.burst == Hburst::Incr) out += " beats=" + std::to_string(t.beats);
        if (!t.busy_before.empty()) {
            out += " busy=";
            for (size_t b = 0; b < t.busy_before.size(); ++b)
                out += (b ? "," : "") + std::to_string(t.busy_before[b]);
        }
        if (!t.data.empty()) {
            out += " data=";
            for (size_t b = 0; b < t.data.size(); ++b)
                out += (b ? "," : "") + std::to_string(t.data[b]);
        }
    }
    return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& scn) {
    std::ostringstream os;
    os << "name = " << scn.name << "\n";
    os << "engine = " << to_string(scn.engine) << "\n";
    os << "cycles = " << scn.cycles << "\n";
    os << "lob_depth = " << scn.lob_depth << "\n";
    os << "seed = " << scn.seed << "\n";
    os << "p_success = " << fmt_num(scn.p_success) << "\n";
    os << "threads = " << scn.threads << "\n";
    os << "record_trace = " << (scn.record_trace ? 1 : 0) << "\n";
    os << "record_paths = " << (scn.record_paths ? 1 : 0) << "\n";
    os << "t_sim_cycle = " << fmt_num(scn.t_sim_cycle) << "\n";
    os << "t_acc_cycle = " << fmt_num(scn.t_acc_cycle) << "\n";
    os << "ch_startup = " << fmt_num(scn.cost.startup_s) << "\n";
    os << "ch_s2a_word = " << fmt_num(scn.cost.s2a_word_s) << "\n";
    os << "ch_a2s_word = " << fmt_num(scn.cost.a2s_word_s) << "\n";
    os << "conv_payload_words = " << fmt_num(scn.conv_payload_words) << "\n";
    os << "flush_words_per_entry = " << fmt_num(scn.flush_words_per_entry) << "\n";
    os << "report_words = " << fmt_num(scn.report_words) << "\n";
    os << "rollback_variables = " << scn.rollback_variables << "\n";
    os << "store_cost_sim = " << fmt_num(scn.store_cost_sim) << "\n";
    os << "restore_cost_sim = " << fmt_num(scn.restore_cost_sim) << "\n";
    os << "store_cost_acc = " << fmt_num(scn.store_cost_acc) << "\n";
    os << "restore_cost_acc = " << fmt_num(scn.restore_cost_acc) << "\n";
    os << "masters = " << scn.fabric.master_count() << "\n";
    for (int i = 0; i < scn.fabric.master_count(); ++i) {
        os << "master." << i << ".domain = " << to_string(scn.fabric.master_domain[i])
           << "\n";
        os << "master." << i << ".script = " << script_text(scn.fabric.scripts[i])
           << "\n";
    }
    os << "slaves = " << scn.fabric.slave_count() << "\n";
    for (int j = 0; j < scn.fabric.slave_count(); ++j) {
        os << "slave." << j << ".domain = " << to_string(scn.fabric.slave_domain[j])
           << "\n";
        os << "slave." << j << ".fifo_depth = " << scn.fabric.slave_cfg[j].fifo_depth
           << "\n";
        os << "slave." << j
           << ".service_rate = " << scn.fabric.slave_cfg[j].service_rate << "\n";
        os << "slave." << j << ".wait_states = " << scn.fabric.slave_cfg[j].wait_states
           << "\n";
    }
    for (size_t k = 0; k < scn.fabric.decoder.ranges.size(); ++k) {
        const AddressRange& r = scn.fabric.decoder.ranges[k];
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%X 0x%X %d", r.base, r.size, r.slave);
        os << "decoder.range." << k << " = " << buf << "\n";
    }
    os << "arbiter.priority =";
    for (int m : scn.fabric.arbiter.priority) os << " " << m;
    os << "\n";
    os << "arbiter.default_grant = " << scn.fabric.arbiter.default_grant << "\n";
    for (size_t k = 0; k < scn.fabric.sideband.size(); ++k) {
        const SidebandCfg& sb = scn.fabric.sideband[k];
        os << "sideband." << k << ".name = " << sb.name << "\n";
        os << "sideband." << k << ".domain = " << to_string(sb.owner) << "\n";
        if (!sb.toggles.empty()) {
            os << "sideband." << k << ".toggles =";
            for (uint64_t t : sb.toggles) os << " " << t;
            os << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_trace_csv(std::ostream& os, const std::vector<MsabsSnapshot>& rows) {
    os << "cycle,haddr,htrans,hwrite,hsize,hburst,hprot,hwdata,hrdata,hresp,hready,"
          "hsplit,hbusreq,sideband\n";
    char buf[160];
    for (size_t t = 0; t < rows.size(); ++t) {
        const MsabsSnapshot& s = rows[t];
        std::snprintf(buf, sizeof(buf),
                      "%zu,0x%08X,%s,%u,%u,%s,%u,0x%08X,0x%08X,%s,%u,0x%X,0x%X,", t,
                      s.haddr, to_string(s.htrans), s.hwrite ? 1u : 0u,
                      static_cast<unsigned>(s.hsize), to_string(s.hburst),
                      static_cast<unsigned>(s.hprot), s.hwdata, s.hrdata,
                      to_string(s.hresp), s.hready ? 1u : 0u, s.hsplit, s.hbusreq);
        os << buf;
        if (s.sideband.empty()) {
            os << "-";
        } else {
            for (uint8_t b : s.sideband) os << (b ? '1' : '0');
        }
        os << "\n";
    }
}

void write_ledger_csv(std::ostream& os, const std::vector<LedgerEntry>& rows) {
    os << "index,cycle,kind,direction,words,time_s,cumulative_s\n";
    char buf[160];
    for (size_t i = 0; i < rows.size(); ++i) {
        const LedgerEntry& e = rows[i];
        std::snprintf(buf, sizeof(buf), "%zu,%" PRIu64 ",%s,%s,%.9g,%.9g,%.9g\n", i,
                      e.cycle, to_string(e.kind), to_string(e.direction), e.words,
                      e.time_s, e.cumulative_s);
        os << buf;
    }
}

void write_transitions_csv(std::ostream& os, const std::vector<TransitionRow>& rows) {
    os << "id,base_cycle,mode,committed,predictions,failure_index,packets,"
          "virtual_time_s,phases\n";
    char buf[200];
    for (const TransitionRow& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%" PRIu64 ",%" PRIu64 ",%s,%" PRIu64 ",%" PRIu64 ",%" PRId64
                      ",%u,%.9g,%s\n",
                      r.id, r.base_cycle, to_string(r.mode), r.committed,
                      r.predictions, r.failure_index, r.packets, r.virtual_time_s,
                      r.phases.c_str());
        os << buf;
    }
}

void write_breakdown_row(std::ostream& os, double prob, const PerfBreakdown& b) {
    char buf[240];
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", prob,
                  b.t_sim, b.t_acc, b.t_store, b.t_restore, b.t_ch, b.performance,
                  b.ratio);
    os << buf;
}

void write_result_csv(std::ostream& os, const Scenario& scn, const RunResult& rr) {
    std::istringstream cfg(serialize_scenario(scn));
    std::string line;
    while (std::getline(cfg, line)) os << "# " << line << "\n";
    char buf[120];
    std::snprintf(buf, sizeof(buf), "# committed_cycles = %" PRIu64 "\n", rr.cycles);
    os << buf;
    std::snprintf(buf, sizeof(buf), "# channel_accesses = %" PRIu64 "\n",
                  rr.channel_accesses);
    os << buf;
    std::snprintf(buf, sizeof(buf), "# trace_digest = %016" PRIx64 "\n",
                  rr.trace_digest);
    os << buf;
    std::snprintf(buf, sizeof(buf), "# memory_digest = %016" PRIx64 "\n",
                  rr.memory_digest);
    os << buf;
    os << "prob,T_sim,T_acc,T_store,T_rest,T_ch,performance,ratio\n";
    write_breakdown_row(os, scn.p_success, rr.breakdown);
}

std::optional<uint64_t> diff_trace_files(const std::string& a, const std::string& b) {
    std::ifstream fa(a), fb(b);
    if (!fa) throw ConfigError("cannot open trace '" + a + "'");
    if (!fb) throw ConfigError("cannot open trace '" + b + "'");
    std::string la, lb;
    bool ga = static_cast<bool>(std::getline(fa, la));
    bool gb = static_cast<bool>(std::getline(fb, lb));
    if (!ga || !gb || la != lb) return 0;  // header mismatch or empty file
    uint64_t cycle = 0;
    for (;;) {
        ga = static_cast<bool>(std::getline(fa, la));
        gb = static_cast<bool>(std::getline(fb, lb));
        if (!ga && !gb) return std::nullopt;
        if (ga != gb || la != lb) return cycle;
        ++cycle;
    }
}

// ---------------------------------------------------------------------------
// Pinned configurations
// ---------------------------------------------------------------------------

Scenario scenario_table2_als(double p, uint64_t cycles, uint64_t seed) {
    Scenario scn;
    scn.name = "table2-als";
    scn.engine = EngineKind::Optimistic;
    scn.cycles = cycles;
    scn.p_success = p;
    scn.seed = seed;
    scn.record_trace = false;

    // one DMA-style reader in the simulator domain, memory in the
    // accelerator domain: the data source (the memory) leads
    scn.fabric.master_domain = {Side::Sim};
    TxnDesc t;
    t.write = false;
    t.addr = 0;
    t.burst = Hburst::Incr;
    t.size = Hsize::Word;
    t.beats = static_cast<uint32_t>(cycles + 2 * scn.lob_depth);
    scn.fabric.scripts = {MasterScript{{t}}};
    scn.fabric.slave_domain = {Side::Acc};
    scn.fabric.slave_cfg = {SlaveCfg{64, 64, 0}};
    scn.fabric.decoder.ranges = {AddressRange{0, 0x8000000, 0}};  // 128 MiB
    scn.fabric.arbiter.priority = {0};
    scn.fabric.arbiter.default_grant = 0;
    return scn;
}

Scenario scenario_table2_sla(double t_sim_cycle, double p, uint64_t cycles,
                             uint64_t seed) {
    Scenario scn = scenario_table2_als(p, cycles, seed);
    scn.name = "table2-sla";
    scn.t_sim_cycle = t_sim_cycle;
    // writes instead of reads: the data source is now the simulator-side
    // master, so the simulator leads
    scn.fabric.scripts[0].txns[0].write = true;
    return scn;
}

Scenario scenario_batch640() {
    Scenario scn = scenario_table2_als(1.0, 640, 1);
    scn.name = "batch640";
    scn.record_trace = true;
    return scn;
}

}  // namespace cosim
