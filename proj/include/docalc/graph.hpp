#ifndef DOCALC_GRAPH_HPP
#define DOCALC_GRAPH_HPP

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace docalc {

using NodeId = std::string;
using NodeSet = std::set<NodeId>;

inline constexpr const char* kRootPrefix = "rt__";

/// Immutable directed acyclic graph over named nodes.
///
/// Node order is lexicographic everywhere, so every query that returns a
/// set or list of nodes is deterministic. Acyclicity is verified on
/// construction; all surgery operations below return new graphs.
class Dag {
public:
    Dag() = default;

    Dag(std::vector<NodeId> nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
        std::sort(nodes.begin(), nodes.end());
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
            if (nodes[k] == nodes[k + 1])
                throw std::invalid_argument("duplicate node: " + nodes[k]);
        }
        for (const auto& n : nodes) {
            if (n.empty()) throw std::invalid_argument("empty node name");
        }
        names_ = std::move(nodes);
        parents_.assign(names_.size(), {});
        children_.assign(names_.size(), {});
        for (const auto& [u, v] : edges) {
            const int ui = index_of(u);
            const int vi = index_of(v);
            if (ui == vi) throw std::invalid_argument("self-loop at node: " + u);
            auto& ch = children_[static_cast<std::size_t>(ui)];
            if (std::find(ch.begin(), ch.end(), vi) != ch.end())
                throw std::invalid_argument("duplicate edge: " + u + " -> " + v);
            ch.push_back(vi);
            parents_[static_cast<std::size_t>(vi)].push_back(ui);
        }
        for (auto& v : parents_) std::sort(v.begin(), v.end());
        for (auto& v : children_) std::sort(v.begin(), v.end());
        check_acyclic();
    }

    std::size_t size() const { return names_.size(); }
    const std::vector<NodeId>& nodes() const { return names_; }

    bool has_node(const NodeId& n) const {
        return std::binary_search(names_.begin(), names_.end(), n);
    }

    int index_of(const NodeId& n) const {
        auto it = std::lower_bound(names_.begin(), names_.end(), n);
        if (it == names_.end() || *it != n)
            throw std::invalid_argument("unknown node: " + n);
        return static_cast<int>(it - names_.begin());
    }

    const NodeId& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& parents_of(int i) const { return parents_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& children_of(int i) const { return children_[static_cast<std::size_t>(i)]; }

    bool has_edge(const NodeId& u, const NodeId& v) const {
        if (!has_node(u) || !has_node(v)) return false;
        const auto& ch = children_[static_cast<std::size_t>(index_of(u))];
        return std::binary_search(ch.begin(), ch.end(), index_of(v));
    }

    /// Edge list as (parent, child) name pairs, sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (std::size_t u = 0; u < names_.size(); ++u)
            for (int v : children_[u]) out.emplace_back(names_[u], names_[static_cast<std::size_t>(v)]);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& ch : children_) n += ch.size();
        return n;
    }

    NodeSet node_set() const { return NodeSet(names_.begin(), names_.end()); }

    bool operator==(const Dag& o) const {
        return names_ == o.names_ && children_ == o.children_;
    }
    bool operator!=(const Dag& o) const { return !(*this == o); }

    /// A topological order of node indices (ties broken lexicographically).
    std::vector<int> topological_order() const {
        const std::size_t n = names_.size();
        std::vector<int> indeg(n, 0), order;
        for (std::size_t i = 0; i < n; ++i) indeg[i] = static_cast<int>(parents_[i].size());
        std::set<int> ready;
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] == 0) ready.insert(static_cast<int>(i));
        while (!ready.empty()) {
            const int u = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(u);
            for (int v : children_[static_cast<std::size_t>(u)])
                if (--indeg[static_cast<std::size_t>(v)] == 0) ready.insert(v);
        }
        return order;
    }

private:
    void check_acyclic() const {
        if (topological_order().size() != names_.size())
            throw std::invalid_argument("graph contains a directed cycle");
    }

    std::vector<NodeId> names_;               // sorted
    std::vector<std::vector<int>> parents_;   // sorted index lists
    std::vector<std::vector<int>> children_;
};

namespace detail {

inline std::vector<int> to_indices(const Dag& g, const NodeSet& a) {
    std::vector<int> out;
    out.reserve(a.size());
    for (const auto& n : a) out.push_back(g.index_of(n));
    return out;
}

inline NodeSet to_names(const Dag& g, const std::vector<char>& mark) {
    NodeSet out;
    for (std::size_t i = 0; i < mark.size(); ++i)
        if (mark[i]) out.insert(g.name(static_cast<int>(i)));
    return out;
}

// BFS along parent or child links, excluding the seed set itself.
inline NodeSet relatives(const Dag& g, const NodeSet& a, bool up, bool transitive) {
    std::vector<char> seen(g.size(), 0), in_result(g.size(), 0);
    std::vector<int> frontier = to_indices(g, a);
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier) {
            const auto& adj = up ? g.parents_of(u) : g.children_of(u);
            for (int v : adj) {
                if (!in_result[static_cast<std::size_t>(v)]) {
                    in_result[static_cast<std::size_t>(v)] = 1;
                    if (transitive && !seen[static_cast<std::size_t>(v)]) {
                        seen[static_cast<std::size_t>(v)] = 1;
                        next.push_back(v);
                    }
                }
            }
        }
        if (!transitive) break;
        frontier = std::move(next);
    }
    return to_names(g, in_result);
}

}  // namespace detail

inline NodeSet parents(const Dag& g, const NodeSet& a) {
    return detail::relatives(g, a, /*up=*/true, /*transitive=*/false);
}

inline NodeSet children(const Dag& g, const NodeSet& a) {
    return detail::relatives(g, a, /*up=*/false, /*transitive=*/false);
}

inline NodeSet ancestors(const Dag& g, const NodeSet& a) {
    return detail::relatives(g, a, /*up=*/true, /*transitive=*/true);
}

inline NodeSet descendants(const Dag& g, const NodeSet& a) {
    return detail::relatives(g, a, /*up=*/false, /*transitive=*/true);
}

/// f(a) ∪ a for any of the four structural queries.
template <typename F>
NodeSet closure(F&& f, const Dag& g, const NodeSet& a) {
    NodeSet out = f(g, a);
    out.insert(a.begin(), a.end());
    return out;
}

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    for (const auto& n : a)
        if (!b.count(n)) out.insert(n);
    return out;
}

inline NodeSet set_intersect(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    for (const auto& n : a)
        if (b.count(n)) out.insert(n);
    return out;
}

inline bool disjoint(const NodeSet& a, const NodeSet& b) {
    return set_intersect(a, b).empty();
}

/// Subgraph induced on node set a: nodes outside a and their arrows erased.
inline Dag restrict_to(const Dag& g, const NodeSet& a) {
    for (const auto& n : a) (void)g.index_of(n);
    std::vector<NodeId> nodes(a.begin(), a.end());
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [u, v] : g.edges())
        if (a.count(u) && a.count(v)) edges.emplace_back(u, v);
    return Dag(std::move(nodes), edges);
}

/// G with all arrows entering a erased.
inline Dag cut_incoming(const Dag& g, const NodeSet& a) {
    for (const auto& n : a) (void)g.index_of(n);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [u, v] : g.edges())
        if (!a.count(v)) edges.emplace_back(u, v);
    return Dag(g.nodes(), edges);
}

/// G with all arrows exiting a erased.
inline Dag cut_outgoing(const Dag& g, const NodeSet& a) {
    for (const auto& n : a) (void)g.index_of(n);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [u, v] : g.edges())
        if (!a.count(u)) edges.emplace_back(u, v);
    return Dag(g.nodes(), edges);
}

/// Maps each augmented node to its generated twin root.
struct RootMap {
    std::map<NodeId, NodeId> twin;  // a_j -> rt(a_j)

    NodeSet root_names() const {
        NodeSet out;
        for (const auto& [k, v] : twin) out.insert(v);
        return out;
    }
};

inline NodeId root_name(const NodeId& n) { return kRootPrefix + n; }

/// Augments g with one twin root per node of a: root rt__a_j with the single
/// edge rt__a_j -> a_j. Fails if a generated name collides with an existing node.
inline std::pair<Dag, RootMap> add_roots(const Dag& g, const NodeSet& a) {
    for (const auto& n : a) (void)g.index_of(n);
    RootMap rm;
    std::vector<NodeId> nodes = g.nodes();
    auto edges = g.edges();
    for (const auto& n : a) {
        const NodeId r = root_name(n);
        if (g.has_node(r))
            throw std::invalid_argument("root name collision: node " + r + " already exists");
        rm.twin[n] = r;
        nodes.push_back(r);
        edges.emplace_back(r, n);
    }
    return {Dag(std::move(nodes), edges), std::move(rm)};
}

/// Flips every edge.
inline Dag reverse(const Dag& g) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [u, v] : g.edges()) edges.emplace_back(v, u);
    return Dag(g.nodes(), edges);
}

}  // namespace docalc

#endif
