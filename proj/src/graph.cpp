#include "cjsr/graph.hpp"

#include <algorithm>
#include <numeric>

namespace cjsr {

namespace {

// Iterative Tarjan; emits components sinks-first, reversed by the caller.
struct TarjanState {
    const System& sys;
    std::vector<int> index, low, comp;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    int next_index = 0;
    std::vector<std::vector<int>> components;

    explicit TarjanState(const System& s)
        : sys(s),
          index(s.vertex_count(), -1),
          low(s.vertex_count(), 0),
          comp(s.vertex_count(), -1),
          on_stack(s.vertex_count(), false) {}

    void visit(int root) {
        struct Frame {
            int v;
            std::size_t next_edge;
        };
        std::vector<Frame> frames;
        frames.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_edge < sys.out[f.v].size()) {
                int w = sys.edges[sys.out[f.v][f.next_edge++]].to;
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                if (low[v] == index[v]) {
                    std::vector<int> members;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = static_cast<int>(components.size());
                        members.push_back(w);
                    } while (w != v);
                    std::sort(members.begin(), members.end());
                    components.push_back(std::move(members));
                }
            }
        }
    }
};

System induced_subsystem(const System& sys, const std::vector<int>& members) {
    std::vector<bool> keep(sys.vertex_count(), false);
    for (int v : members) keep[v] = true;
    System sub;
    std::vector<int> map(sys.vertex_count(), -1);
    for (int v : members) {
        map[v] = static_cast<int>(sub.vertices.size());
        sub.vertices.push_back(sys.vertices[v]);
    }
    for (const auto& e : sys.edges) {
        if (!keep[e.from] || !keep[e.to]) continue;
        Edge ne = e;
        ne.from = map[e.from];
        ne.to = map[e.to];
        sub.edges.push_back(std::move(ne));
    }
    sub.finalize();
    return sub;
}

}  // namespace

SccDecomposition strongly_connected_components(const System& sys) {
    TarjanState st(sys);
    for (int v = 0; v < sys.vertex_count(); ++v)
        if (st.index[v] < 0) st.visit(v);
    // Tarjan finishes reachable components first; reversing puts sources
    // ahead of everything they reach.
    std::reverse(st.components.begin(), st.components.end());
    SccDecomposition dec;
    dec.components = std::move(st.components);
    dec.subsystems.reserve(dec.components.size());
    for (const auto& members : dec.components) dec.subsystems.push_back(induced_subsystem(sys, members));
    return dec;
}

bool is_strongly_connected(const System& sys) {
    return strongly_connected_components(sys).components.size() == 1;
}

namespace {

// Lexicographic edge order follows edge-id strings.
std::vector<int> edge_ranks(const System& sys) {
    std::vector<int> order(sys.edge_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sys.edges[a].id < sys.edges[b].id; });
    std::vector<int> rank(sys.edge_count());
    for (int i = 0; i < sys.edge_count(); ++i) rank[order[i]] = i;
    return rank;
}

bool is_primitive(const std::vector<int>& seq) {
    int n = static_cast<int>(seq.size());
    for (int p = 1; p <= n / 2; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (int i = p; i < n && periodic; ++i) periodic = seq[i] == seq[i - p];
        if (periodic) return false;
    }
    return true;
}

bool is_minimal_rotation(const std::vector<int>& seq) {
    int n = static_cast<int>(seq.size());
    for (int s = 1; s < n; ++s) {
        for (int i = 0; i < n; ++i) {
            int a = seq[(s + i) % n];
            int b = seq[i];
            if (a != b) {
                if (a < b) return false;
                break;
            }
        }
    }
    return true;
}

struct CycleScan {
    const System& sys;
    int l0;
    std::uint64_t cap;
    std::vector<int> rank;
    std::vector<int> ranked_seq;
    std::vector<int> edge_seq;
    std::vector<Path> found;

    CycleScan(const System& s, int l, std::uint64_t c) : sys(s), l0(l), cap(c), rank(edge_ranks(s)) {}

    void dfs(int start, int at, int head_rank) {
        for (int ei : sys.out[at]) {
            // A canonical sequence never contains an edge below its head.
            if (rank[ei] < head_rank) continue;
            edge_seq.push_back(ei);
            ranked_seq.push_back(rank[ei]);
            const Edge& e = sys.edges[ei];
            if (e.to == start && is_primitive(ranked_seq) && is_minimal_rotation(ranked_seq)) {
                if (found.size() >= cap)
                    throw CapError("cycle enumeration exceeded cap of " + std::to_string(cap));
                Path p;
                p.edges = edge_seq;
                found.push_back(std::move(p));
            }
            if (static_cast<int>(edge_seq.size()) < l0) dfs(start, e.to, head_rank);
            edge_seq.pop_back();
            ranked_seq.pop_back();
        }
    }
};

}  // namespace

std::vector<Path> enumerate_closed_walks(const System& sys, int l0, std::uint64_t cap) {
    if (l0 < 1) throw Error("enumerate_closed_walks: l0 must be >= 1");
    CycleScan scan(sys, l0, cap);
    // Walks are generated from the head edge of their canonical rotation, so
    // each rotation class is produced exactly once.
    std::vector<int> order(sys.edge_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scan.rank[a] < scan.rank[b]; });
    for (int ei : order) {
        const Edge& head = sys.edges[ei];
        scan.edge_seq.push_back(ei);
        scan.ranked_seq.push_back(scan.rank[ei]);
        if (head.to == head.from) {
            if (scan.found.size() >= cap) throw CapError("cycle enumeration exceeded cap");
            Path p;
            p.edges = scan.edge_seq;
            scan.found.push_back(std::move(p));
        }
        if (l0 > 1) scan.dfs(head.from, head.to, scan.rank[ei]);
        scan.edge_seq.pop_back();
        scan.ranked_seq.pop_back();
    }
    return scan.found;
}

namespace {

bool matrices_close(const Mat& a, const Mat& b, double eps) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).cwiseAbs().maxCoeff() <= eps;
}

// Outgoing structure match: a bijection between the two edge lists that
// preserves targets and matrices within eps. Targets are compared after
// collapsing v1/v2, since a merge identifies them.
bool same_outgoing(const System& sys, int v1, int v2, double eps) {
    const auto& o1 = sys.out[v1];
    const auto& o2 = sys.out[v2];
    if (o1.size() != o2.size()) return false;
    auto canon = [&](int v) { return v == v2 ? v1 : v; };
    std::vector<bool> used(o2.size(), false);
    for (int e1 : o1) {
        bool matched = false;
        for (std::size_t j = 0; j < o2.size(); ++j) {
            if (used[j]) continue;
            const Edge& a = sys.edges[e1];
            const Edge& b = sys.edges[o2[j]];
            if (canon(a.to) != canon(b.to)) continue;
            if (!matrices_close(a.m, b.m, eps)) continue;
            used[j] = true;
            matched = true;
            break;
        }
        if (!matched) return false;
    }
    return true;
}

// Merge keeps v1's outgoing edges, drops v2's, and reroutes edges into v2.
System merge_pair(const System& sys, int v1, int v2) {
    System next;
    std::vector<int> map(sys.vertex_count(), -1);
    for (int v = 0; v < sys.vertex_count(); ++v) {
        if (v == v2) continue;
        map[v] = static_cast<int>(next.vertices.size());
        next.vertices.push_back(sys.vertices[v]);
    }
    map[v2] = map[v1];
    for (const auto& e : sys.edges) {
        if (e.from == v2) continue;
        Edge ne = e;
        ne.from = map[e.from];
        ne.to = map[e.to];
        next.edges.push_back(std::move(ne));
    }
    next.finalize();
    return next;
}

}  // namespace

System identify_vertices(const System& sys, double eps) {
    System cur = sys;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v1 = 0; v1 < cur.vertex_count() && !changed; ++v1) {
            for (int v2 = v1 + 1; v2 < cur.vertex_count() && !changed; ++v2) {
                if (cur.vertices[v1].dim != cur.vertices[v2].dim) continue;
                if (!same_outgoing(cur, v1, v2, eps)) continue;
                cur = merge_pair(cur, v1, v2);
                changed = true;
            }
        }
    }
    return cur;
}

}  // namespace cjsr
