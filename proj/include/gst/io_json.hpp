#pragma once

// JSON forms: the {"n":..., "edges":[[i,j],...]} graph encoding and the
// construction-protocol schema
//   {"initial": <graph6>, "steps": [{"op":"LC","v":..} | {"op":"FUSE","a":..,
//    "b":..[,"frame":[..]]}], "map": [..], "depth": ..}
// Output uses ordered keys so identical inputs give byte-identical bytes.

#include <optional>
#include <string>

#include <json.hpp>

#include "gst/graph.hpp"
#include "gst/query.hpp"

namespace gst {

using ordered_json = nlohmann::ordered_json;

inline std::string graph_to_json(const Graph& g) {
    ordered_json j;
    j["n"] = g.n;
    auto edges = ordered_json::array();
    for (int i = 0; i < g.n; ++i)
        for (int k = i + 1; k < g.n; ++k)
            if (g.has_edge(i, k)) edges.push_back({i, k});
    j["edges"] = std::move(edges);
    return j.dump();
}

inline std::optional<Graph> graph_from_json(std::string_view text, ParseError* err = nullptr) {
    auto fail = [&](std::string msg, size_t off) -> std::optional<Graph> {
        if (err) *err = {std::move(msg), off};
        return std::nullopt;
    };
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) return fail("invalid JSON", 0);
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_unsigned())
        return fail("missing or invalid \"n\"", 0);
    int n = j["n"].get<int>();
    if (n < 0 || n > kMaxVertices) return fail("vertex count out of range", 0);
    Graph g(n);
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) return fail("\"edges\" must be an array", 0);
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                return fail("edge entries must be [i, j]", 0);
            int a = e[0].get<int>(), b = e[1].get<int>();
            if (a < 0 || b < 0 || a >= n || b >= n || a == b) return fail("edge endpoint out of range", 0);
            g.add_edge(a, b);
        }
    }
    return g;
}

// Reads either graph6 or the JSON edge-list form, auto-detected.
inline std::optional<Graph> read_graph_auto(std::string_view text, ParseError* err = nullptr) {
    size_t start = text.find_first_not_of(" \t\r\n");
    if (start == std::string_view::npos) {
        if (err) *err = {"empty input", 0};
        return std::nullopt;
    }
    if (text[start] == '{') return graph_from_json(text, err);
    // graph6: single line
    size_t end = text.find_first_of("\r\n", start);
    return from_graph6(text.substr(start, end == std::string_view::npos ? end : end - start), err);
}

inline ordered_json protocol_to_json(const ConstructionProtocol& p) {
    ordered_json j;
    j["initial"] = to_graph6(p.initial);
    auto steps = ordered_json::array();
    for (const ProtocolStep& s : p.steps) {
        ordered_json js;
        if (s.op == ProtocolStep::Op::LC) {
            js["op"] = "LC";
            js["v"] = s.v;
        } else {
            js["op"] = "FUSE";
            js["a"] = s.a;
            js["b"] = s.b;
            if (!s.frame.is_identity()) {
                auto fr = ordered_json::array();
                for (const SingleClifford& c : s.frame.ops) fr.push_back(c.pack());
                js["frame"] = std::move(fr);
            }
        }
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    j["map"] = p.final_map;
    j["depth"] = p.depth;
    return j;
}

inline std::string export_protocol(const ConstructionProtocol& p) { return protocol_to_json(p).dump(); }

inline std::optional<ConstructionProtocol> import_protocol(std::string_view text,
                                                           ParseError* err = nullptr) {
    auto fail = [&](std::string msg) -> std::optional<ConstructionProtocol> {
        if (err) *err = {std::move(msg), 0};
        return std::nullopt;
    };
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) return fail("invalid JSON");
    ConstructionProtocol p;
    if (!j.contains("initial") || !j["initial"].is_string()) return fail("missing \"initial\"");
    ParseError gerr;
    auto g = from_graph6(j["initial"].get<std::string>(), &gerr);
    if (!g) return fail("bad initial graph6: " + gerr.message);
    p.initial = *g;
    if (!j.contains("steps") || !j["steps"].is_array()) return fail("missing \"steps\"");
    for (const auto& js : j["steps"]) {
        if (!js.contains("op")) return fail("step without op");
        std::string op = js["op"].get<std::string>();
        if (op == "LC") {
            p.steps.push_back(ProtocolStep::lc(js["v"].get<int>()));
        } else if (op == "FUSE") {
            LocalCliffordFrame frame;
            if (js.contains("frame"))
                for (const auto& c : js["frame"])
                    frame.ops.push_back(SingleClifford::unpack(c.get<uint8_t>()));
            p.steps.push_back(ProtocolStep::fuse_step(js["a"].get<int>(), js["b"].get<int>(), frame));
            ++p.depth;
        } else {
            return fail("unknown step op");
        }
    }
    if (j.contains("map")) p.final_map = j["map"].get<VertexMap>();
    if (j.contains("depth") && j["depth"].get<int>() != p.depth) return fail("depth does not match fuse steps");
    return p;
}

}  // namespace gst
