/* graph.hpp -- tiny digraph helpers (SCC, topological order, cycle search). */

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

namespace rmc::graph {

/// Tarjan, iterative. Returns component id per node; ids are in reverse
/// topological order of the condensation (successors have smaller ids).
struct SccResult {
    std::vector<std::uint32_t> comp;
    std::uint32_t count = 0;
};

inline SccResult scc(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto [u, v] : edges) adj[u].push_back(v);
    SccResult res;
    res.comp.assign(n, UINT32_MAX);
    std::vector<std::uint32_t> index(n, UINT32_MAX), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != UINT32_MAX) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.v].size()) {
                std::uint32_t w = adj[f.v][f.child++];
                if (index[w] == UINT32_MAX) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    for (;;) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        res.comp[w] = res.count;
                        if (w == f.v) break;
                    }
                    ++res.count;
                }
                std::uint32_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return res;
}

/// Topological index (Kahn). nullopt when the graph has a cycle.
inline std::optional<std::vector<std::uint32_t>> topological_index(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    std::vector<std::uint32_t> indeg(n, 0);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        ++indeg[v];
    }
    std::deque<std::uint32_t> ready;
    for (std::uint32_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::vector<std::uint32_t> order(n, 0);
    std::uint32_t emitted = 0;
    while (!ready.empty()) {
        std::uint32_t v = ready.front();
        ready.pop_front();
        order[v] = emitted++;
        for (std::uint32_t w : adj[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    if (emitted != n) return std::nullopt;
    return order;
}

/// Some cycle through >= 2 distinct nodes, if one exists.
inline std::optional<std::vector<std::uint32_t>> find_cycle(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    SccResult res = scc(n, edges);
    std::vector<std::uint32_t> size(res.count, 0);
    for (std::uint32_t v = 0; v < n; ++v) ++size[res.comp[v]];
    std::optional<std::uint32_t> big;
    for (std::uint32_t v = 0; v < n; ++v)
        if (size[res.comp[v]] >= 2) {
            big = res.comp[v];
            break;
        }
    if (!big) return std::nullopt;
    // walk inside the component back to the start node
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto [u, v] : edges)
        if (res.comp[u] == *big && res.comp[v] == *big) adj[u].push_back(v);
    std::uint32_t start = 0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (res.comp[v] == *big) {
            start = v;
            break;
        }
    std::vector<int> parent(n, -1);
    std::deque<std::uint32_t> q{start};
    std::vector<char> seen(n, 0);
    seen[start] = 1;
    while (!q.empty()) {
        std::uint32_t v = q.front();
        q.pop_front();
        for (std::uint32_t w : adj[v]) {
            if (w == start) {
                std::vector<std::uint32_t> cycle{start};
                std::uint32_t cur = v;
                while (cur != start) {
                    cycle.push_back(cur);
                    cur = static_cast<std::uint32_t>(parent[cur]);
                }
                std::reverse(cycle.begin() + 1, cycle.end());
                return cycle;
            }
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = static_cast<int>(v);
                q.push_back(w);
            }
        }
    }
    return std::nullopt;
}

}  // namespace rmc::graph
