#ifndef DOCALC_BAYES_NET_HPP
#define DOCALC_BAYES_NET_HPP

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "docalc/graph.hpp"
#include "docalc/prob_table.hpp"

namespace docalc {

/// Joint state-space cap, overridable via DOCALC_STATE_CAP.
inline std::size_t state_space_cap() {
    if (const char* s = std::getenv("DOCALC_STATE_CAP")) {
        const long long v = std::atoll(s);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 10'000'000;
}

/// Conditional probability table P(owner | parents). Rows are indexed by the
/// joint parent assignment, mixed-radix with the first listed parent slowest.
struct Cpt {
    NodeId owner;
    int owner_card = 0;
    std::vector<NodeId> parent_order;
    std::vector<int> parent_cards;
    std::vector<double> table;  // row-major: parent index * owner_card + state

    std::size_t row_count() const {
        std::size_t n = 1;
        for (int c : parent_cards) n *= static_cast<std::size_t>(c);
        return n;
    }

    double entry(int state, const std::vector<int>& parent_states) const {
        std::size_t row = 0;
        for (std::size_t k = 0; k < parent_cards.size(); ++k)
            row = row * static_cast<std::size_t>(parent_cards[k]) +
                  static_cast<std::size_t>(parent_states[k]);
        return table[row * static_cast<std::size_t>(owner_card) + static_cast<std::size_t>(state)];
    }
};

/// Discrete Bayesian network: DAG + per-node cardinality + one CPT per node.
/// Rows must sum to 1 within 1e-9; rows off by more than 1e-12 are renormalized.
class BayesNet {
public:
    BayesNet() = default;

    BayesNet(Dag dag, std::map<NodeId, int> cards, std::map<NodeId, Cpt> cpts)
        : dag_(std::move(dag)), cards_(std::move(cards)), cpts_(std::move(cpts)) {
        for (const auto& n : dag_.nodes()) {
            auto ci = cards_.find(n);
            if (ci == cards_.end()) throw std::invalid_argument("missing cardinality for " + n);
            if (ci->second < 1) throw std::invalid_argument("cardinality < 1 for " + n);
            auto pi = cpts_.find(n);
            if (pi == cpts_.end()) throw std::invalid_argument("missing cpt for " + n);
            validate_cpt(n, pi->second);
        }
        if (cards_.size() != dag_.size() || cpts_.size() != dag_.size())
            throw std::invalid_argument("cardinality/cpt declared for unknown node");
    }

    const Dag& dag() const { return dag_; }
    int card(const NodeId& n) const { return cards_.at(n); }
    const std::map<NodeId, int>& cards() const { return cards_; }
    const Cpt& cpt(const NodeId& n) const { return cpts_.at(n); }

    std::size_t joint_size() const {
        std::size_t n = 1;
        for (const auto& v : dag_.nodes()) n *= static_cast<std::size_t>(cards_.at(v));
        return n;
    }

private:
    void validate_cpt(const NodeId& n, Cpt& c) {
        if (c.owner != n) throw std::invalid_argument("cpt owner mismatch for " + n);
        if (c.owner_card != cards_.at(n)) throw std::invalid_argument("cpt cardinality mismatch for " + n);
        NodeSet declared(c.parent_order.begin(), c.parent_order.end());
        if (declared.size() != c.parent_order.size())
            throw std::invalid_argument("cpt lists a parent twice for " + n);
        if (declared != parents(dag_, NodeSet{n}))
            throw std::invalid_argument("cpt parents do not match graph for " + n);
        if (c.parent_cards.size() != c.parent_order.size())
            throw std::invalid_argument("cpt parent cardinality list malformed for " + n);
        for (std::size_t k = 0; k < c.parent_order.size(); ++k)
            if (c.parent_cards[k] != cards_.at(c.parent_order[k]))
                throw std::invalid_argument("cpt parent cardinality mismatch for " + n);
        const std::size_t rows = c.row_count();
        if (c.table.size() != rows * static_cast<std::size_t>(c.owner_card))
            throw std::invalid_argument("cpt row count mismatch for " + n);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (int v = 0; v < c.owner_card; ++v) {
                const double p = c.table[r * static_cast<std::size_t>(c.owner_card) +
                                         static_cast<std::size_t>(v)];
                if (p < 0.0) throw std::invalid_argument("negative probability in cpt for " + n);
                s += p;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw std::invalid_argument("cpt row does not sum to 1 for " + n);
            // Renormalize only rows that are measurably off; dividing rows
            // already within an ulp of 1 would perturb them and make
            // serialization round trips drift.
            if (std::abs(s - 1.0) > 1e-12)
                for (int v = 0; v < c.owner_card; ++v)
                    c.table[r * static_cast<std::size_t>(c.owner_card) +
                            static_cast<std::size_t>(v)] /= s;
        }
    }

    Dag dag_;
    std::map<NodeId, int> cards_;
    std::map<NodeId, Cpt> cpts_;
};

namespace detail {

// Per-node lookup plan: positions of the node and its cpt parents in the
// canonical joint scope.
struct FactorPlan {
    const Cpt* cpt;
    int self_pos;
    std::vector<int> parent_pos;
};

inline std::vector<FactorPlan> factor_plans(const BayesNet& bn, const ProbTable& t) {
    std::vector<FactorPlan> plans;
    for (const auto& n : bn.dag().nodes()) {
        FactorPlan p;
        p.cpt = &bn.cpt(n);
        p.self_pos = t.position(n);
        for (const auto& q : p.cpt->parent_order) p.parent_pos.push_back(t.position(q));
        plans.push_back(std::move(p));
    }
    return plans;
}

// Product of the CPT factors for the nodes flagged in `use`, over every cell.
inline ProbTable factor_product(const BayesNet& bn, const std::vector<char>& use) {
    if (bn.joint_size() > state_space_cap())
        throw std::runtime_error("joint state space exceeds cap (" +
                                 std::to_string(state_space_cap()) +
                                 " cells); use a smaller net or raise DOCALC_STATE_CAP");
    std::vector<NodeId> scope = bn.dag().nodes();
    std::vector<int> cards;
    for (const auto& n : scope) cards.push_back(bn.card(n));
    ProbTable t(scope, cards);
    const std::vector<FactorPlan> plans = factor_plans(bn, t);

    std::vector<int> d(scope.size(), 0);
    std::vector<int> ps;
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        double v = 1.0;
        for (std::size_t j = 0; j < plans.size(); ++j) {
            if (!use[j]) continue;
            const FactorPlan& p = plans[j];
            ps.clear();
            for (int q : p.parent_pos) ps.push_back(d[static_cast<std::size_t>(q)]);
            v *= p.cpt->entry(d[static_cast<std::size_t>(p.self_pos)], ps);
        }
        t.set(idx, v);
        for (std::size_t k = scope.size(); k-- > 0;) {
            if (++d[k] < cards[k]) break;
            d[k] = 0;
        }
    }
    return t;
}

}  // namespace detail

/// Full joint P(x.) = ∏_j P(x_j | pa(x_j)) over the canonical scope.
inline ProbTable joint(const BayesNet& bn) {
    return detail::factor_product(bn, std::vector<char>(bn.dag().size(), 1));
}

/// Numerical conditional independence: for every assignment with
/// P(b,e) > 0 and P(e) > 0, |P(a|b,e) - P(a|e)| <= tol.
inline bool ci_holds(const BayesNet& bn, const NodeSet& a, const NodeSet& b,
                     const NodeSet& e, double tol = 1e-9) {
    if (!disjoint(a, b) || !disjoint(a, e) || !disjoint(b, e))
        throw std::invalid_argument("ci_holds: sets must be pairwise disjoint");
    const ProbTable j = joint(bn);
    const ProbTable lhs = conditional(j, a, set_union(b, e));
    const ProbTable rhs = conditional(j, a, e);
    // lhs has scope a∪b∪e, rhs a∪e; compare where both defined.
    const std::vector<int> rpos = detail::scope_positions(lhs, rhs.scope());
    for (std::size_t idx = 0; idx < lhs.size(); ++idx) {
        if (!lhs.defined(idx)) continue;
        const std::vector<int> d = lhs.digits_of(idx);
        std::vector<int> rd;
        rd.reserve(rpos.size());
        for (int p : rpos) rd.push_back(d[static_cast<std::size_t>(p)]);
        const std::size_t ri = rhs.index_of(rd);
        if (!rhs.defined(ri)) continue;
        if (std::abs(lhs.value(idx) - rhs.value(ri)) > tol) return false;
    }
    return true;
}

/// Same comparison, reporting the max deviation over supported assignments.
inline double ci_deviation(const BayesNet& bn, const NodeSet& a, const NodeSet& b,
                           const NodeSet& e) {
    const ProbTable j = joint(bn);
    const ProbTable lhs = conditional(j, a, set_union(b, e));
    const ProbTable rhs = conditional(j, a, e);
    const std::vector<int> rpos = detail::scope_positions(lhs, rhs.scope());
    double dev = 0.0;
    for (std::size_t idx = 0; idx < lhs.size(); ++idx) {
        if (!lhs.defined(idx)) continue;
        const std::vector<int> d = lhs.digits_of(idx);
        std::vector<int> rd;
        rd.reserve(rpos.size());
        for (int p : rpos) rd.push_back(d[static_cast<std::size_t>(p)]);
        const std::size_t ri = rhs.index_of(rd);
        if (!rhs.defined(ri)) continue;
        dev = std::max(dev, std::abs(lhs.value(idx) - rhs.value(ri)));
    }
    return dev;
}

}  // namespace docalc

#endif
