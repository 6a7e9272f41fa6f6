#pragma once

// Retrograde builder for the orbit graph: seed every caterpillar (and
// detached-caterpillar set) orbit at depth 0, then apply the default fusion
// to all members of the current layer, recording one incoming link per newly
// discovered orbit. Strict layer order makes recorded depths minimal.
//
// Storage is kept flat: one arena of bit-packed member rows plus an
// open-addressing hash index over every stored member, since tables reach
// ~3*10^7 graphs at max_initial_qubits = 14.

#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gst/fusion.hpp"
#include "gst/graph.hpp"
#include "gst/orbit.hpp"

namespace gst {

struct MemberRef {
    uint32_t orbit = 0xffffffffu;
    uint32_t member = 0;
    bool valid() const { return orbit != 0xffffffffu; }
};

// Insert-only open-addressing multimap from 64-bit hashes to member refs.
// Duplicate hashes are allowed (WL collisions, same-hash members); lookup
// visits every matching slot.
class HashIndex {
  public:
    HashIndex() { rehash(1u << 16); }

    void insert(uint64_t h, MemberRef ref) {
        if ((count_ + 1) * 10 >= slots_.size() * 7) rehash(slots_.size() * 2);
        size_t i = h & mask_;
        while (slots_[i].ref.valid()) i = (i + 1) & mask_;
        slots_[i] = {h, ref};
        ++count_;
    }

    template <class F>
    void for_each(uint64_t h, F&& f) const {
        size_t i = h & mask_;
        while (slots_[i].ref.valid()) {
            if (slots_[i].hash == h)
                if (f(slots_[i].ref)) return;
            i = (i + 1) & mask_;
        }
    }

    size_t size() const { return count_; }

  private:
    struct Slot {
        uint64_t hash = 0;
        MemberRef ref;
    };
    std::vector<Slot> slots_;
    size_t mask_ = 0;
    size_t count_ = 0;

    void rehash(size_t n) {
        std::vector<Slot> old = std::move(slots_);
        slots_.assign(n, Slot{});
        mask_ = n - 1;
        count_ = 0;
        for (const Slot& s : old)
            if (s.ref.valid()) insert(s.hash, s.ref);
    }
};

struct FusionLink {
    uint32_t parent_orbit = 0;
    uint32_t parent_member = 0;
    uint8_t a = 0, b = 0;
    uint32_t child_member = 0;  // always the orbit's BFS seed (member 0)
    VertexMap relabel;          // parent-member labels -> child-member labels, a/b -> 0xff
    LocalCliffordFrame frame;   // non-identity only for adjacent-endpoint fusions
};

struct Orbit {
    uint8_t n = 0;
    uint8_t depth = 0;
    bool connected = false;
    uint32_t member_count = 0;
    uint64_t row_offset = 0;  // into member_rows, n u16 per member
    std::optional<FusionLink> parent;
};

struct BuildStats {
    uint64_t graphs_total = 0;
    uint64_t orbits_total = 0;
    std::vector<uint64_t> orbits_by_depth;            // all orbits
    std::vector<uint64_t> connected_orbits_by_depth;  // connected members only
    uint64_t adjacent_fusion_links = 0;
    int max_initial_qubits = 0;
};

struct BuildLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BuildOptions {
    int max_initial_qubits = 8;
    int threads = 1;
    uint64_t max_graphs = 0;  // 0 = unlimited; exceeding raises BuildLimitError
    std::function<void(const std::string&)> progress;  // optional, called per layer
};

class Tablebase {
  public:
    std::vector<Orbit> orbits;
    std::vector<uint16_t> member_rows;
    HashIndex index;
    int max_initial_qubits = 0;

    Graph member(uint32_t orbit, uint32_t idx) const {
        const Orbit& o = orbits[orbit];
        Graph g(o.n);
        const uint16_t* row = member_rows.data() + o.row_offset + static_cast<size_t>(idx) * o.n;
        for (int v = 0; v < o.n; ++v) g.adj[v] = row[v];
        return g;
    }

    // member isomorphic to `target` with witness map target-labels -> member-labels
    struct LookupResult {
        uint32_t orbit = 0;
        uint32_t member = 0;
        VertexMap map;
    };
    std::optional<LookupResult> lookup(const Graph& target) const {
        std::optional<LookupResult> out;
        index.for_each(wl_hash(target).value, [&](MemberRef ref) {
            if (orbits[ref.orbit].n != target.n) return false;
            if (auto wit = isomorphic(target, member(ref.orbit, ref.member))) {
                out = LookupResult{ref.orbit, ref.member, std::move(*wit)};
                return true;
            }
            return false;
        });
        return out;
    }

    bool contains_hashed(const Graph& g, uint64_t hash) const {
        bool found = false;
        index.for_each(hash, [&](MemberRef ref) {
            found = orbits[ref.orbit].n == g.n && isomorphic(g, member(ref.orbit, ref.member));
            return found;
        });
        return found;
    }

    bool contains(const Graph& g) const { return contains_hashed(g, wl_hash(g).value); }

    BuildStats stats() const {
        BuildStats s;
        s.max_initial_qubits = max_initial_qubits;
        s.orbits_total = orbits.size();
        for (const Orbit& o : orbits) {
            s.graphs_total += o.member_count;
            size_t d = o.depth;
            if (s.orbits_by_depth.size() <= d) {
                s.orbits_by_depth.resize(d + 1, 0);
                s.connected_orbits_by_depth.resize(d + 1, 0);
            }
            ++s.orbits_by_depth[d];
            if (o.connected) ++s.connected_orbits_by_depth[d];
            if (o.parent && member(o.parent->parent_orbit, o.parent->parent_member)
                                .has_edge(o.parent->a, o.parent->b))
                ++s.adjacent_fusion_links;
        }
        return s;
    }

    // --- internals used by the builder (and by load) ---

    uint32_t append_member(uint32_t orbit_id, const Graph& g) {
        Orbit& o = orbits[orbit_id];
        uint32_t idx = o.member_count++;
        for (int v = 0; v < g.n; ++v) member_rows.push_back(static_cast<uint16_t>(g.adj[v]));
        index.insert(wl_hash(g).value, {orbit_id, idx});
        return idx;
    }

    // create an orbit from seed and expand its LC closure (BFS, iso dedup)
    uint32_t add_orbit(const Graph& seed, int depth, std::optional<FusionLink> link) {
        uint32_t id = static_cast<uint32_t>(orbits.size());
        Orbit o;
        o.n = seed.n;
        o.depth = static_cast<uint8_t>(depth);
        o.connected = seed.is_connected();
        o.row_offset = member_rows.size();
        o.parent = std::move(link);
        orbits.push_back(std::move(o));
        append_member(id, seed);
        for (uint32_t head = 0; head < orbits[id].member_count; ++head) {
            const Graph cur = member(id, head);
            for (int v = 0; v < cur.n; ++v) {
                Graph img = local_complement(cur, v);
                uint64_t h = wl_hash(img).value;
                if (!contains_hashed(img, h)) {
                    Orbit& o2 = orbits[id];
                    uint32_t idx = o2.member_count++;
                    for (int w = 0; w < img.n; ++w)
                        member_rows.push_back(static_cast<uint16_t>(img.adj[w]));
                    index.insert(h, {id, idx});
                }
            }
        }
        return id;
    }
};

namespace detail {

// degenerate pairs act as single-qubit measurements and never open new orbits
inline bool fusable_pair(const Graph& g, int a, int b) {
    if (g.adj[a] == 0 || g.adj[b] == 0) return false;
    if (g.adj[a] == (1u << b) && g.adj[b] == (1u << a)) return false;
    return true;
}

struct Candidate {
    Graph graph;
    uint64_t hash = 0;
    uint8_t a = 0, b = 0;
    uint32_t member = 0;
    bool present = false;  // resolved against a pre-commit snapshot of the index
    bool has_frame = false;
    LocalCliffordFrame frame;
};

}  // namespace detail

inline Tablebase build(const BuildOptions& opt) {
    if (opt.max_initial_qubits < 1 || opt.max_initial_qubits > 16)
        throw std::invalid_argument("max_initial_qubits must be in 1..16");
    Tablebase tb;
    tb.max_initial_qubits = opt.max_initial_qubits;

    auto note = [&](const std::string& s) {
        if (opt.progress) opt.progress(s);
    };

    // depth-0 seeds: all caterpillar trees and detached caterpillar sets
    for (int n = 1; n <= opt.max_initial_qubits; ++n)
        for (const Graph& c : enumerate_caterpillars(n)) tb.add_orbit(c, 0, std::nullopt);
    for (const Graph& c : enumerate_detached_caterpillars(opt.max_initial_qubits))
        tb.add_orbit(c, 0, std::nullopt);
    note("depth 0: " + std::to_string(tb.orbits.size()) + " orbits, " +
         std::to_string(tb.index.size()) + " graphs");

    uint32_t layer_begin = 0, layer_end = static_cast<uint32_t>(tb.orbits.size());
    int depth = 0;
    const int threads = std::max(1, opt.threads);

    while (layer_begin < layer_end) {
        ++depth;
        // flatten the frontier's members
        std::vector<MemberRef> frontier;
        for (uint32_t oi = layer_begin; oi < layer_end; ++oi) {
            if (tb.orbits[oi].n < 3) continue;
            for (uint32_t mi = 0; mi < tb.orbits[oi].member_count; ++mi)
                frontier.push_back({oi, mi});
        }

        const size_t chunk_size = 2048;
        size_t chunks_done = 0;
        std::vector<detail::Candidate> cands;
        for (size_t base = 0; base < frontier.size(); base += chunk_size) {
            if (opt.progress && ++chunks_done % 256 == 0)
                note("  depth " + std::to_string(depth) + " frontier " + std::to_string(base) + "/" +
                     std::to_string(frontier.size()) + ", " + std::to_string(tb.index.size()) +
                     " graphs");
            const size_t end = std::min(frontier.size(), base + chunk_size);
            cands.clear();
            // candidate generation (parallelizable: reads a fixed index snapshot)
            auto generate = [&](size_t lo, size_t hi, std::vector<detail::Candidate>& out) {
                for (size_t i = lo; i < hi; ++i) {
                    const Graph g = tb.member(frontier[i].orbit, frontier[i].member);
                    for (int a = 0; a < g.n; ++a)
                        for (int b = a + 1; b < g.n; ++b) {
                            if (!detail::fusable_pair(g, a, b)) continue;
                            detail::Candidate c;
                            c.a = static_cast<uint8_t>(a);
                            c.b = static_cast<uint8_t>(b);
                            c.member = static_cast<uint32_t>(i);
                            if (!g.has_edge(a, b)) {
                                c.graph = *fast_fuse_rewrite(g, a, b);
                            } else {
                                FusionOutcome fo = fuse(g, a, b);
                                c.graph = fo.result.graph;
                                c.frame = std::move(fo.result.frame);
                                c.has_frame = !c.frame.is_identity();
                            }
                            c.hash = wl_hash(c.graph).value;
                            c.present = tb.contains_hashed(c.graph, c.hash);
                            if (!c.present) out.push_back(std::move(c));
                        }
                }
            };
            if (threads <= 1) {
                generate(base, end, cands);
            } else {
                std::vector<std::vector<detail::Candidate>> parts(threads);
                std::vector<std::thread> pool;
                size_t per = (end - base + threads - 1) / threads;
                for (int t = 0; t < threads; ++t) {
                    size_t lo = base + t * per, hi = std::min(end, lo + per);
                    if (lo >= hi) break;
                    pool.emplace_back([&, lo, hi, t] { generate(lo, hi, parts[t]); });
                }
                for (auto& th : pool) th.join();
                for (auto& p : parts)
                    for (auto& c : p) cands.push_back(std::move(c));
            }
            // serial commit in deterministic order
            std::stable_sort(cands.begin(), cands.end(),
                             [](const detail::Candidate& x, const detail::Candidate& y) {
                                 if (x.member != y.member) return x.member < y.member;
                                 if (x.a != y.a) return x.a < y.a;
                                 return x.b < y.b;
                             });
            for (detail::Candidate& c : cands) {
                if (tb.contains_hashed(c.graph, c.hash)) continue;  // created meanwhile
                MemberRef src = frontier[c.member];
                FusionLink link;
                link.parent_orbit = src.orbit;
                link.parent_member = src.member;
                link.a = c.a;
                link.b = c.b;
                link.child_member = 0;
                link.relabel = fusion_relabel_map(tb.orbits[src.orbit].n, c.a, c.b);
                link.frame = std::move(c.frame);
                tb.add_orbit(c.graph, depth, std::move(link));
                if (opt.max_graphs && tb.index.size() > opt.max_graphs)
                    throw BuildLimitError("graph limit exceeded at depth " + std::to_string(depth) +
                                          " (" + std::to_string(tb.index.size()) + " graphs stored)");
            }
        }
        layer_begin = layer_end;
        layer_end = static_cast<uint32_t>(tb.orbits.size());
        note("depth " + std::to_string(depth) + ": +" + std::to_string(layer_end - layer_begin) +
             " orbits, " + std::to_string(tb.index.size()) + " graphs total");
    }
    return tb;
}

// ---------------------------------------------------------------------------
// Persistence: little-endian binary, CRC32 per section, index rebuilt on load.

namespace detail {

inline uint32_t crc32(const uint8_t* data, size_t len, uint32_t crc = 0) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    crc = ~crc;
    for (size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return ~crc;
}

struct SectionWriter {
    std::FILE* f;
    uint32_t crc = 0;
    void raw(const void* p, size_t len) {
        if (std::fwrite(p, 1, len, f) != len) throw std::runtime_error("table write failed");
        crc = crc32(static_cast<const uint8_t*>(p), len, crc);
    }
    template <class T>
    void num(T v) {
        raw(&v, sizeof(T));
    }
    void end_section() {
        uint32_t c = crc;
        if (std::fwrite(&c, 1, 4, f) != 4) throw std::runtime_error("table write failed");
        crc = 0;
    }
};

struct SectionReader {
    std::FILE* f;
    uint32_t crc = 0;
    void raw(void* p, size_t len) {
        if (std::fread(p, 1, len, f) != len) throw std::runtime_error("table file truncated");
        crc = crc32(static_cast<uint8_t*>(p), len, crc);
    }
    template <class T>
    T num() {
        T v;
        raw(&v, sizeof(T));
        return v;
    }
    void end_section() {
        uint32_t expect = crc;
        uint32_t stored;
        if (std::fread(&stored, 1, 4, f) != 4) throw std::runtime_error("table file truncated");
        if (stored != expect) throw std::runtime_error("table checksum mismatch");
        crc = 0;
    }
};

}  // namespace detail

inline constexpr char kTableMagic[8] = {'G', 'S', 'T', 'B', 'L', 'v', '1', '\0'};
inline constexpr uint32_t kTableVersion = 1;

inline void save(const Tablebase& tb, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    detail::SectionWriter w{f};
    w.raw(kTableMagic, 8);
    w.num<uint32_t>(kTableVersion);
    w.num<uint8_t>(static_cast<uint8_t>(tb.max_initial_qubits));
    uint8_t pad[3] = {};
    w.raw(pad, 3);
    w.num<uint64_t>(tb.orbits.size());
    w.num<uint64_t>(tb.member_rows.size());
    w.end_section();

    for (const Orbit& o : tb.orbits) {
        w.num<uint8_t>(o.n);
        w.num<uint8_t>(o.depth);
        w.num<uint8_t>(o.connected ? 1 : 0);
        w.num<uint8_t>(o.parent ? 1 : 0);
        w.num<uint32_t>(o.member_count);
        if (o.parent) {
            const FusionLink& l = *o.parent;
            w.num<uint32_t>(l.parent_orbit);
            w.num<uint32_t>(l.parent_member);
            w.num<uint8_t>(l.a);
            w.num<uint8_t>(l.b);
            w.num<uint32_t>(l.child_member);
            w.num<uint8_t>(static_cast<uint8_t>(l.relabel.size()));
            w.raw(l.relabel.data(), l.relabel.size());
            w.num<uint8_t>(static_cast<uint8_t>(l.frame.ops.size()));
            for (const SingleClifford& c : l.frame.ops) w.num<uint8_t>(c.pack());
        }
    }
    w.end_section();

    w.raw(tb.member_rows.data(), tb.member_rows.size() * sizeof(uint16_t));
    w.end_section();
    if (std::fclose(f) != 0) throw std::runtime_error("table close failed");
}

inline Tablebase load(const std::string& path, bool deep_check = false) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    struct Closer {
        std::FILE* f;
        ~Closer() { std::fclose(f); }
    } closer{f};
    detail::SectionReader r{f};
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kTableMagic, 8) != 0) throw std::runtime_error("not a table file");
    if (r.num<uint32_t>() != kTableVersion) throw std::runtime_error("table version mismatch");
    Tablebase tb;
    tb.max_initial_qubits = r.num<uint8_t>();
    uint8_t pad[3];
    r.raw(pad, 3);
    uint64_t orbit_count = r.num<uint64_t>();
    uint64_t row_count = r.num<uint64_t>();
    r.end_section();

    tb.orbits.reserve(orbit_count);
    uint64_t offset = 0;
    for (uint64_t i = 0; i < orbit_count; ++i) {
        Orbit o;
        o.n = r.num<uint8_t>();
        o.depth = r.num<uint8_t>();
        o.connected = r.num<uint8_t>() != 0;
        bool has_parent = r.num<uint8_t>() != 0;
        o.member_count = r.num<uint32_t>();
        o.row_offset = offset;
        offset += static_cast<uint64_t>(o.member_count) * o.n;
        if (has_parent) {
            FusionLink l;
            l.parent_orbit = r.num<uint32_t>();
            l.parent_member = r.num<uint32_t>();
            l.a = r.num<uint8_t>();
            l.b = r.num<uint8_t>();
            l.child_member = r.num<uint32_t>();
            l.relabel.resize(r.num<uint8_t>());
            r.raw(l.relabel.data(), l.relabel.size());
            uint8_t flen = r.num<uint8_t>();
            l.frame.ops.resize(flen);
            for (int k = 0; k < flen; ++k) l.frame.ops[k] = SingleClifford::unpack(r.num<uint8_t>());
            o.parent = std::move(l);
        }
        tb.orbits.push_back(std::move(o));
    }
    r.end_section();
    if (offset != row_count) throw std::runtime_error("table row count inconsistent");

    tb.member_rows.resize(row_count);
    r.raw(tb.member_rows.data(), row_count * sizeof(uint16_t));
    r.end_section();

    // rebuild hash index and run the fast invariant check
    for (uint32_t oi = 0; oi < tb.orbits.size(); ++oi) {
        const Orbit& o = tb.orbits[oi];
        if (o.parent) {
            const FusionLink& l = *o.parent;
            if (l.parent_orbit >= oi) throw std::runtime_error("table not in tree order");
            const Orbit& p = tb.orbits[l.parent_orbit];
            if (p.depth + 1 != o.depth) throw std::runtime_error("table depth inconsistent");
            if (o.n + 2 != p.n) throw std::runtime_error("table vertex counts inconsistent");
            if (l.parent_member >= p.member_count || l.child_member >= o.member_count)
                throw std::runtime_error("table link member out of range");
        } else if (o.depth != 0) {
            throw std::runtime_error("non-root orbit without parent link");
        }
        for (uint32_t mi = 0; mi < o.member_count; ++mi)
            tb.index.insert(wl_hash(tb.member(oi, mi)).value, {oi, mi});
    }

    if (deep_check) {
        for (uint32_t oi = 0; oi < tb.orbits.size(); ++oi) {
            const Orbit& o = tb.orbits[oi];
            if (!o.parent) {
                // depth-0 orbits must have a caterpillar-set seed member
                if (o.depth == 0 && !is_caterpillar_forest(tb.member(oi, 0)))
                    throw std::runtime_error("depth-0 orbit seed is not a caterpillar set");
                continue;
            }
            const FusionLink& l = *o.parent;
            FusionOutcome fo = fuse(tb.member(l.parent_orbit, l.parent_member), l.a, l.b);
            if (!fo.ok() || !(fo.result.graph == tb.member(oi, l.child_member)))
                throw std::runtime_error("fusion link replay mismatch at orbit " + std::to_string(oi));
            for (int q = 0; q < o.n; ++q)
                if (!(fo.result.frame.at(q) == l.frame.at(q)))
                    throw std::runtime_error("fusion link frame mismatch at orbit " + std::to_string(oi));
        }
    }
    return tb;
}

}  // namespace gst
