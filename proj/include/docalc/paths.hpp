#ifndef DOCALC_PATHS_HPP
#define DOCALC_PATHS_HPP

#include <optional>
#include <string>
#include <vector>

#include "docalc/graph.hpp"

namespace docalc {

enum class Dir { Forward, Backward };

/// Simple undirected path: distinct nodes threaded by one arrow between
/// adjacent nodes, in either direction. dirs[k] == Forward means the host
/// graph has the edge nodes[k] -> nodes[k+1].
struct UndirectedPath {
    std::vector<NodeId> nodes;
    std::vector<Dir> dirs;

    std::size_t length() const { return dirs.size(); }
};

inline std::string render(const UndirectedPath& p) {
    std::string out;
    for (std::size_t k = 0; k < p.nodes.size(); ++k) {
        if (k > 0) out += p.dirs[k - 1] == Dir::Forward ? " -> " : " <- ";
        out += p.nodes[k];
    }
    return out;
}

inline void validate_path(const Dag& g, const UndirectedPath& p) {
    if (p.nodes.size() < 2 || p.dirs.size() != p.nodes.size() - 1)
        throw std::invalid_argument("malformed path");
    for (std::size_t k = 0; k < p.nodes.size(); ++k)
        for (std::size_t j = k + 1; j < p.nodes.size(); ++j)
            if (p.nodes[k] == p.nodes[j])
                throw std::invalid_argument("path repeats node: " + p.nodes[k]);
    for (std::size_t k = 0; k < p.dirs.size(); ++k) {
        const bool fwd = p.dirs[k] == Dir::Forward;
        const NodeId& u = fwd ? p.nodes[k] : p.nodes[k + 1];
        const NodeId& v = fwd ? p.nodes[k + 1] : p.nodes[k];
        if (!g.has_edge(u, v))
            throw std::invalid_argument("path uses missing edge: " + u + " -> " + v);
    }
}

/// Interior nodes with arrows impinging from both sides. Endpoints are
/// never colliders.
inline NodeSet colliders(const UndirectedPath& p) {
    NodeSet out;
    for (std::size_t k = 1; k + 1 <= p.dirs.size(); ++k)
        if (p.dirs[k - 1] == Dir::Forward && p.dirs[k] == Dir::Backward)
            out.insert(p.nodes[k]);
    return out;
}

/// All simple undirected paths starting in a and ending in b, lexicographic
/// by node sequence. Interior nodes are unrestricted. Exponential; gated to
/// small graphs because it serves as the d-separation oracle.
inline std::vector<UndirectedPath> enumerate_paths(const Dag& g, const NodeSet& a,
                                                   const NodeSet& b,
                                                   std::size_t node_limit = 12) {
    if (a.empty() || b.empty()) throw std::invalid_argument("endpoint set is empty");
    if (!disjoint(a, b)) throw std::invalid_argument("endpoint sets overlap");
    for (const auto& n : a) (void)g.index_of(n);
    for (const auto& n : b) (void)g.index_of(n);
    if (g.size() > node_limit)
        throw std::invalid_argument("path enumeration gated to " +
                                    std::to_string(node_limit) + " nodes");

    const std::size_t n = g.size();
    std::vector<char> in_b(n, 0);
    for (const auto& x : b) in_b[static_cast<std::size_t>(g.index_of(x))] = 1;

    std::vector<UndirectedPath> out;
    std::vector<int> stack_nodes;
    std::vector<Dir> stack_dirs;
    std::vector<char> on_path(n, 0);

    // Neighbors in lexicographic node order, each with its edge direction.
    auto neighbors = [&](int u) {
        std::vector<std::pair<int, Dir>> nb;
        const auto& pa = g.parents_of(u);
        const auto& ch = g.children_of(u);
        std::size_t i = 0, j = 0;
        while (i < pa.size() || j < ch.size()) {
            if (j >= ch.size() || (i < pa.size() && pa[i] < ch[j]))
                nb.emplace_back(pa[i++], Dir::Backward);
            else
                nb.emplace_back(ch[j++], Dir::Forward);
        }
        return nb;
    };

    auto emit = [&] {
        UndirectedPath p;
        for (int u : stack_nodes) p.nodes.push_back(g.name(u));
        p.dirs = stack_dirs;
        out.push_back(std::move(p));
    };

    auto dfs = [&](auto&& self, int u) -> void {
        for (const auto& [v, d] : neighbors(u)) {
            if (on_path[static_cast<std::size_t>(v)]) continue;
            stack_nodes.push_back(v);
            stack_dirs.push_back(d);
            on_path[static_cast<std::size_t>(v)] = 1;
            if (in_b[static_cast<std::size_t>(v)]) emit();
            self(self, v);
            on_path[static_cast<std::size_t>(v)] = 0;
            stack_dirs.pop_back();
            stack_nodes.pop_back();
        }
    };

    for (const auto& start : a) {
        const int s = g.index_of(start);
        stack_nodes.assign(1, s);
        stack_dirs.clear();
        on_path.assign(n, 0);
        on_path[static_cast<std::size_t>(s)] = 1;
        dfs(dfs, s);
    }
    std::sort(out.begin(), out.end(),
              [](const UndirectedPath& x, const UndirectedPath& y) { return x.nodes < y.nodes; });
    return out;
}

/// Blocked at fixed e: some non-collider of the path lies in e, or some
/// collider's closed descendant set misses e entirely.
inline bool is_blocked(const Dag& g, const UndirectedPath& p, const NodeSet& e) {
    validate_path(g, p);
    for (const auto& n : e) (void)g.index_of(n);
    const NodeSet col = colliders(p);
    for (const auto& v : p.nodes) {
        if (!col.count(v) && e.count(v)) return true;
    }
    for (const auto& c : col) {
        if (disjoint(closure(descendants, g, NodeSet{c}), e)) return true;
    }
    return false;
}

struct DSepVerdict {
    bool separated = true;
    std::optional<UndirectedPath> witness;  // an unblocked path, when !separated
};

namespace detail {

inline void check_dsep_args(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& e) {
    if (!disjoint(a, b) || !disjoint(a, e) || !disjoint(b, e))
        throw std::invalid_argument("d-separation query sets must be pairwise disjoint");
    for (const auto& s : {a, b, e})
        for (const auto& n : s) (void)g.index_of(n);
}

}  // namespace detail

/// Literal definition: a and b are d-separated at fixed e iff every
/// undirected path between them is blocked. Witness is the first unblocked
/// path in lexicographic order. Empty a or b means no paths, hence separated.
inline DSepVerdict d_separated(const Dag& g, const NodeSet& a, const NodeSet& b,
                               const NodeSet& e, std::size_t node_limit = 12) {
    detail::check_dsep_args(g, a, b, e);
    if (a.empty() || b.empty()) return {};
    for (const auto& p : enumerate_paths(g, a, b, node_limit))
        if (!is_blocked(g, p, e)) return {false, p};
    return {};
}

/// Reachability decision procedure: same boolean as d_separated without
/// materializing paths. Walks (node, entry-direction) states; a trail may
/// pass through a collider only when the collider has itself or a
/// descendant in e.
inline bool d_separated_fast(const Dag& g, const NodeSet& a, const NodeSet& b,
                             const NodeSet& e) {
    detail::check_dsep_args(g, a, b, e);
    if (a.empty() || b.empty()) return true;

    const std::size_t n = g.size();
    std::vector<char> in_e(n, 0), in_b(n, 0);
    for (const auto& x : e) in_e[static_cast<std::size_t>(g.index_of(x))] = 1;
    for (const auto& x : b) in_b[static_cast<std::size_t>(g.index_of(x))] = 1;

    // Nodes that are in e or have a descendant in e (open colliders).
    std::vector<char> anc_e(n, 0);
    {
        std::vector<int> stack;
        for (const auto& x : e) {
            const int i = g.index_of(x);
            anc_e[static_cast<std::size_t>(i)] = 1;
            stack.push_back(i);
        }
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int p : g.parents_of(u))
                if (!anc_e[static_cast<std::size_t>(p)]) {
                    anc_e[static_cast<std::size_t>(p)] = 1;
                    stack.push_back(p);
                }
        }
    }

    // State: (node, arrived-along-incoming-arrow?). Seeds fan out both ways.
    std::vector<char> seen_up(n, 0), seen_down(n, 0);
    std::vector<std::pair<int, bool>> stack;
    for (const auto& x : a) {
        const int i = g.index_of(x);
        stack.emplace_back(i, false);  // as if reached from a child
    }
    while (!stack.empty()) {
        auto [u, arrived_down] = stack.back();
        stack.pop_back();
        auto& seen = arrived_down ? seen_down : seen_up;
        if (seen[static_cast<std::size_t>(u)]) continue;
        seen[static_cast<std::size_t>(u)] = 1;

        if (!arrived_down) {
            // Reached against an arrow (or seed): non-collider at u.
            if (in_e[static_cast<std::size_t>(u)]) continue;
            if (in_b[static_cast<std::size_t>(u)]) return false;
            for (int p : g.parents_of(u)) stack.emplace_back(p, false);
            for (int c : g.children_of(u)) stack.emplace_back(c, true);
        } else {
            // Reached along an arrow into u.
            if (!in_e[static_cast<std::size_t>(u)]) {
                if (in_b[static_cast<std::size_t>(u)]) return false;
                for (int c : g.children_of(u)) stack.emplace_back(c, true);
            }
            if (anc_e[static_cast<std::size_t>(u)]) {
                // Open collider: the trail may bounce back up.
                for (int p : g.parents_of(u)) stack.emplace_back(p, false);
            }
        }
    }
    return true;
}

}  // namespace docalc

#endif
