// gstab: build, query, and analyze minimum-fusion graph-state construction
// tables. Exit codes: 0 success, 2 target not in table, 3 input parse error,
// 4 resource limit exceeded. Logs go to stderr; results to stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gst/bounds.hpp"
#include "gst/codes.hpp"
#include "gst/io_json.hpp"
#include "gst/query.hpp"
#include "gst/tablebase.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotFound = 2;
constexpr int kExitParse = 3;
constexpr int kExitResource = 4;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

gst::Graph load_graph_or_exit(const std::string& path) {
    std::string text;
    try {
        text = slurp(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitParse);
    }
    gst::ParseError err;
    auto g = gst::read_graph_auto(text, &err);
    if (!g) {
        std::cerr << "error: cannot parse graph from " << path << ": " << err.message
                  << " (byte offset " << err.offset << ")\n";
        std::exit(kExitParse);
    }
    return *g;
}

gst::Tablebase load_table_or_exit(const std::string& path, bool deep = false) {
    try {
        return gst::load(path, deep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitParse);
    }
}

gst::ordered_json stats_json(const gst::BuildStats& s) {
    gst::ordered_json j;
    j["max_initial_qubits"] = s.max_initial_qubits;
    j["graphs_total"] = s.graphs_total;
    j["orbits_total"] = s.orbits_total;
    j["orbits_by_depth"] = s.orbits_by_depth;
    j["connected_orbits_by_depth"] = s.connected_orbits_by_depth;
    j["adjacent_fusion_links"] = s.adjacent_fusion_links;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-fusion graph-state tablebase"};
    app.require_subcommand(1);

    // --- build ---
    auto* cmd_build = app.add_subcommand("build", "build a table and write it to disk");
    int max_qubits = 8;
    std::string out_path;
    int threads = 1;
    uint64_t max_graphs = 0;
    bool progress = false;
    cmd_build->add_option("--max-qubits", max_qubits, "max initial caterpillar qubits")->required();
    cmd_build->add_option("--out", out_path, "output table file")->required();
    cmd_build->add_option("--threads", threads, "worker threads for candidate generation");
    cmd_build->add_option("--max-graphs", max_graphs, "abort if more graphs get stored (0 = unlimited)");
    cmd_build->add_flag("--progress", progress, "print per-layer progress to stderr");

    // --- stats ---
    auto* cmd_stats = app.add_subcommand("stats", "print statistics of a table");
    std::string table_path, format = "text";
    bool connected_only = false;
    cmd_stats->add_option("--table", table_path, "table file")->required();
    cmd_stats->add_option("--format", format, "json|text");
    cmd_stats->add_flag("--connected-only", connected_only, "show connected-orbit counts only");

    // --- query ---
    auto* cmd_query = app.add_subcommand("query", "look up a construction protocol for a graph");
    std::string q_table, q_graph, q_format = "json", q_out;
    bool q_verify = false;
    cmd_query->add_option("--table", q_table, "table file")->required();
    cmd_query->add_option("--graph", q_graph, "target graph file (graph6 or JSON, - for stdin)")->required();
    cmd_query->add_option("--format", q_format, "json|text");
    cmd_query->add_option("--out", q_out, "also write the protocol JSON to this file");
    cmd_query->add_flag("--verify", q_verify, "replay the protocol in the stabilizer simulator");

    // --- verify ---
    auto* cmd_verify = app.add_subcommand("verify", "check table invariants");
    std::string v_table;
    bool v_deep = false;
    cmd_verify->add_option("--table", v_table, "table file")->required();
    cmd_verify->add_flag("--deep", v_deep, "replay every fusion link");

    // --- bounds ---
    auto* cmd_bounds = app.add_subcommand("bounds", "fusion bounds for a graph");
    std::string b_graph, b_table, b_format = "json";
    bool b_ns = false, b_sub = false;
    int b_climb = -1;
    cmd_bounds->add_option("--graph", b_graph, "graph file")->required();
    cmd_bounds->add_option("--table", b_table, "table file (for --subgraph-lb)");
    cmd_bounds->add_flag("--ns", b_ns, "minimum static-qubit count (linear rank width)");
    cmd_bounds->add_option("--climb", b_climb, "climb bound for the given baseline n_s");
    cmd_bounds->add_flag("--subgraph-lb", b_sub, "subgraph lower bound against the table");
    cmd_bounds->add_option("--format", b_format, "json|text");

    // --- codes ---
    auto* cmd_codes = app.add_subcommand("codes", "loss-tolerant graph codes");
    auto* cmd_search = cmd_codes->add_subcommand("search", "search a table for the best codes");
    std::string cs_table, cs_format = "json";
    int cs_max_nodes = 10, cs_budget = 0;
    size_t cs_top = 5;
    cmd_search->add_option("--table", cs_table, "table file")->required();
    cmd_search->add_option("--max-nodes", cs_max_nodes, "max progenitor vertices");
    cmd_search->add_option("--budget", cs_budget, "max fusion count of the progenitor");
    cmd_search->add_option("--top", cs_top, "how many results to keep");
    cmd_search->add_option("--format", cs_format, "json|text");
    auto* cmd_eval = cmd_codes->add_subcommand("eval", "evaluate one progenitor graph + delta");
    std::string ce_graph, ce_format = "json";
    int ce_delta = 0, ce_istar = -1;
    cmd_eval->add_option("--graph", ce_graph, "progenitor graph file")->required();
    cmd_eval->add_option("--delta", ce_delta, "encoding vertex")->required();
    cmd_eval->add_option("--istar", ce_istar, "logical-Z input qubit (default: lowest)");
    cmd_eval->add_option("--format", ce_format, "json|text");
    cmd_codes->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_build) {
            gst::BuildOptions opt;
            opt.max_initial_qubits = max_qubits;
            opt.threads = threads;
            opt.max_graphs = max_graphs;
            if (progress) opt.progress = [](const std::string& s) { std::cerr << s << "\n"; };
            try {
                gst::Tablebase tb = gst::build(opt);
                gst::save(tb, out_path);
                std::cout << stats_json(tb.stats()).dump() << "\n";
            } catch (const gst::BuildLimitError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitResource;
            }
            return kExitOk;
        }

        if (*cmd_stats) {
            gst::Tablebase tb = load_table_or_exit(table_path);
            gst::BuildStats s = tb.stats();
            if (format == "json") {
                std::cout << stats_json(s).dump() << "\n";
            } else {
                std::cout << "max initial qubits: " << s.max_initial_qubits << "\n";
                std::cout << "graphs: " << s.graphs_total << ", orbits: " << s.orbits_total << "\n";
                const auto& counts = connected_only ? s.connected_orbits_by_depth : s.orbits_by_depth;
                for (size_t d = 0; d < counts.size(); ++d)
                    std::cout << "depth " << d << ": " << counts[d] << " orbits"
                              << (connected_only ? " (connected)" : "") << "\n";
                std::cout << "adjacent-pair fusion links: " << s.adjacent_fusion_links << "\n";
            }
            return kExitOk;
        }

        if (*cmd_query) {
            gst::Graph target = load_graph_or_exit(q_graph);
            gst::Tablebase tb = load_table_or_exit(q_table);
            if (!tb.lookup(target)) {
                gst::ordered_json j;
                j["found"] = false;
                j["subgraph_lower_bound"] = gst::subgraph_lower_bound(tb, target);
                std::cout << j.dump() << "\n";
                return kExitNotFound;
            }
            gst::ConstructionProtocol proto = gst::construct(tb, target);
            if (q_verify) {
                auto rep = gst::replay_verify(proto, target);
                if (!rep.ok) {
                    std::cerr << "error: protocol failed verification at step " << rep.failed_step
                              << ": " << rep.detail << "\n";
                    return 1;
                }
            }
            gst::ordered_json j = gst::protocol_to_json(proto);
            j["found"] = true;
            if (!q_out.empty()) {
                std::ofstream f(q_out, std::ios::binary);
                f << gst::export_protocol(proto) << "\n";
            }
            if (q_format == "json") {
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "initial (graph6): " << gst::to_graph6(proto.initial) << "\n";
                for (const auto& s : proto.steps) {
                    if (s.op == gst::ProtocolStep::Op::LC)
                        std::cout << "LC(" << int(s.v) << ")\n";
                    else
                        std::cout << "fuse " << int(s.a) << " & " << int(s.b) << "\n";
                }
                std::cout << "fusions: " << proto.depth << "\n";
            }
            return kExitOk;
        }

        if (*cmd_verify) {
            gst::Tablebase tb = load_table_or_exit(v_table, v_deep);
            std::cout << "ok: " << tb.orbits.size() << " orbits, " << tb.stats().graphs_total
                      << " graphs" << (v_deep ? ", all links replayed" : "") << "\n";
            return kExitOk;
        }

        if (*cmd_bounds) {
            gst::Graph g = load_graph_or_exit(b_graph);
            gst::ordered_json j;
            j["n"] = g.n;
            if (b_ns || (!b_sub && b_climb < 0)) {
                auto r = gst::ns_min(g);
                j["ns_min"] = r.value;
                j["ns_min_exact"] = r.exact;
            }
            if (b_climb >= 0) {
                auto r = gst::climb(g, b_climb);
                j["climb"] = r.value;
                j["climb_exact"] = r.exact;
                j["climb_ns"] = b_climb;
            }
            if (b_sub) {
                if (b_table.empty()) {
                    std::cerr << "error: --subgraph-lb needs --table\n";
                    return kExitParse;
                }
                gst::Tablebase tb = load_table_or_exit(b_table);
                j["subgraph_lower_bound"] = gst::subgraph_lower_bound(tb, g);
            }
            if (b_format == "json")
                std::cout << j.dump() << "\n";
            else
                for (auto& [k, v] : j.items()) std::cout << k << ": " << v << "\n";
            return kExitOk;
        }

        if (*cmd_search) {
            gst::Tablebase tb = load_table_or_exit(cs_table);
            auto hits = gst::search_codes(tb, cs_max_nodes, cs_budget, cs_top);
            gst::ordered_json arr = gst::ordered_json::array();
            for (const auto& h : hits) {
                gst::ordered_json j;
                j["threshold"] = h.threshold;
                j["progenitor"] = h.progenitor_g6;
                j["n"] = h.n;
                j["delta"] = h.delta;
                j["orbit"] = h.orbit;
                j["depth"] = tb.orbits[h.orbit].depth;
                arr.push_back(std::move(j));
            }
            if (cs_format == "json")
                std::cout << arr.dump() << "\n";
            else
                for (const auto& j : arr)
                    std::cout << j["threshold"] << "  n=" << j["n"] << " delta=" << j["delta"]
                              << " depth=" << j["depth"] << "  " << j["progenitor"] << "\n";
            return kExitOk;
        }

        if (*cmd_eval) {
            gst::Graph g = load_graph_or_exit(ce_graph);
            auto code = gst::make_code(g, ce_delta, ce_istar);
            if (!code) {
                std::cerr << "error: invalid encoding vertex\n";
                return kExitParse;
            }
            gst::ordered_json j;
            j["n_physical"] = code->n_physical();
            const char* names[3] = {"X", "Y", "Z"};
            double worst = 1.0;
            for (int w = 0; w < 3; ++w) {
                auto curve = gst::loss_curve(*code, w);
                gst::ordered_json cj;
                cj["threshold"] = curve.threshold;
                cj["unrecoverable_by_weight"] = curve.unrecoverable;
                j[std::string("logical_") + names[w]] = std::move(cj);
                worst = std::min(worst, curve.threshold);
            }
            j["threshold"] = worst;
            if (ce_format == "json")
                std::cout << j.dump() << "\n";
            else
                std::cout << "threshold " << worst << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
