#ifndef DOCALC_DOCALCULUS_HPP
#define DOCALC_DOCALCULUS_HPP

#include <optional>
#include <stdexcept>

#include "docalc/bayes_net.hpp"
#include "docalc/graph.hpp"
#include "docalc/interventions.hpp"
#include "docalc/paths.hpp"
#include "docalc/prob_table.hpp"

namespace docalc {

/// Query sets for the three rules: b and a are the sets being related, h is
/// permanently intervened, i is observed. The remaining nodes are the
/// implicit "other" set.
struct RuleQuery {
    NodeSet b, a, h, i;

    void validate(const Dag& g) const {
        for (const auto* s : {&b, &a, &h, &i})
            for (const auto& n : *s) (void)g.index_of(n);
        if (!disjoint(b, a) || !disjoint(b, h) || !disjoint(b, i) || !disjoint(a, h) ||
            !disjoint(a, i) || !disjoint(h, i))
            throw std::invalid_argument("rule query sets must be pairwise disjoint");
    }
};

struct NumericCheck {
    double max_deviation = 0.0;
    std::size_t checked_cells = 0;
    bool holds = true;
};

struct RuleVerdict {
    int rule = 0;
    bool applicable = false;
    Dag mutilated;
    std::optional<UndirectedPath> witness;  // an unblocked path, when not applicable
    std::optional<NumericCheck> numeric;
};

/// Rule 1 graph: G with arrows into h erased.
inline Dag g1(const Dag& g, const RuleQuery& q) {
    q.validate(g);
    return cut_incoming(g, q.h);
}

/// Rule 2 graph: arrows into h and arrows out of a erased.
inline Dag g2(const Dag& g, const RuleQuery& q) {
    q.validate(g);
    return cut_outgoing(cut_incoming(g, q.h), q.a);
}

/// Rule 3 graph: after the h-cut, additionally erase arrows into the part
/// of a that is not an ancestor of i.
inline Dag g3(const Dag& g, const RuleQuery& q) {
    q.validate(g);
    const Dag gh = cut_incoming(g, q.h);
    const NodeSet a_minus = set_minus(q.a, ancestors(gh, q.i));
    return cut_incoming(gh, a_minus);
}

/// Rule 3 proof object: root-augment a, then cut arrows into h.
inline std::pair<Dag, RootMap> g3_prime(const Dag& g, const RuleQuery& q) {
    q.validate(g);
    auto [ga, rm] = add_roots(g, q.a);
    return {cut_incoming(ga, q.h), std::move(rm)};
}

/// Graphical applicability of rule 1, 2 or 3: d-separation of b from a
/// given h ∪ i in the corresponding mutilated graph. The witness (an
/// unblocked path) is produced by the path-enumeration engine when the
/// graph is small enough.
inline RuleVerdict rule_applicable(const Dag& g, int rule, const RuleQuery& q,
                                   bool want_witness = true,
                                   std::size_t witness_node_limit = 12) {
    q.validate(g);
    RuleVerdict v;
    v.rule = rule;
    switch (rule) {
        case 1: v.mutilated = g1(g, q); break;
        case 2: v.mutilated = g2(g, q); break;
        case 3: v.mutilated = g3(g, q); break;
        default: throw std::invalid_argument("rule must be 1, 2 or 3");
    }
    const NodeSet given = set_union(q.h, q.i);
    v.applicable = d_separated_fast(v.mutilated, q.b, q.a, given);
    if (!v.applicable && want_witness && !q.b.empty() && !q.a.empty() &&
        g.size() <= witness_node_limit) {
        v.witness = d_separated(v.mutilated, q.b, q.a, given, witness_node_limit).witness;
    }
    return v;
}

/// Joint separation statement for the rule 3 proof object: b d-separated
/// from a ∪ rt(a) given h ∪ i in the root-augmented, h-cut graph. Note that
/// rule 3 applicability does NOT imply this joint statement: in the chain
/// b -> c -> a (nothing observed) rule 3 applies, yet b -> c -> a itself is
/// an unblocked path here. See s_prime_root_check for the weakening that
/// applicability does imply.
inline bool s_prime_check(const Dag& g, const RuleQuery& q) {
    auto [gp, rm] = g3_prime(g, q);
    return d_separated_fast(gp, q.b, set_union(q.a, rm.root_names()), set_union(q.h, q.i));
}

/// Root-twin weakening: b d-separated from rt(a) alone given h ∪ i in the
/// same graph. Any unblocked witness must end at a root twin rt(a_j), whose
/// only arrow points into a_j; this is the statement the rule 3 graphical
/// condition actually entails.
inline bool s_prime_root_check(const Dag& g, const RuleQuery& q) {
    auto [gp, rm] = g3_prime(g, q);
    return d_separated_fast(gp, q.b, rm.root_names(), set_union(q.h, q.i));
}

namespace detail {

// Accumulates max |lhs - rhs| where lhs has scope ⊇ rhs's scope; undefined
// cells on either side are skipped.
inline void accumulate_deviation(const ProbTable& lhs, const ProbTable& rhs,
                                 NumericCheck& chk) {
    const std::vector<int> rpos = scope_positions(lhs, rhs.scope());
    for (std::size_t idx = 0; idx < lhs.size(); ++idx) {
        if (!lhs.defined(idx)) continue;
        const std::vector<int> d = lhs.digits_of(idx);
        std::vector<int> rd;
        rd.reserve(rpos.size());
        for (int p : rpos) rd.push_back(d[static_cast<std::size_t>(p)]);
        const std::size_t ri = rhs.index_of(rd);
        if (!rhs.defined(ri)) continue;
        chk.max_deviation = std::max(chk.max_deviation, std::abs(lhs.value(idx) - rhs.value(ri)));
        ++chk.checked_cells;
    }
}

}  // namespace detail

/// Numerically verifies the probabilistic equality of the given rule over
/// every value combination of (b, a, h, i) with positive-probability
/// conditioning context. Hats compose, so P(b|â,ĥ,i) is a single uproot of
/// a ∪ h.
///   rule 1:  P(b|a,ĥ,i) = P(b|ĥ,i)
///   rule 2:  P(b|â,ĥ,i) = P(b|a,ĥ,i)
///   rule 3:  P(b|â,ĥ,i) = P(b|ĥ,i)
inline NumericCheck rule_equality_holds(const BayesNet& bn, int rule, const RuleQuery& q,
                                        double tol, const ProbTable& uh, const ProbTable& uah) {
    q.validate(bn.dag());
    if (rule < 1 || rule > 3) throw std::invalid_argument("rule must be 1, 2 or 3");
    NumericCheck chk;

    std::vector<NodeId> h_vars(q.h.begin(), q.h.end());
    std::vector<int> h_cards;
    std::size_t h_cells = 1;
    for (const auto& n : h_vars) {
        h_cards.push_back(bn.card(n));
        h_cells *= static_cast<std::size_t>(bn.card(n));
    }
    for (std::size_t hi = 0; hi < h_cells; ++hi) {
        Assignment hv;
        std::size_t rem = hi;
        for (std::size_t k = h_vars.size(); k-- > 0;) {
            hv[h_vars[k]] = static_cast<int>(rem % static_cast<std::size_t>(h_cards[k]));
            rem /= static_cast<std::size_t>(h_cards[k]);
        }
        const ProbTable post_h = slice(uh, hv);  // P(x-h | ĥ = hv)

        ProbTable lhs, rhs;
        if (rule == 1) {
            lhs = conditional(post_h, q.b, set_union(q.a, q.i));  // P(b|a,ĥ,i)
            rhs = conditional(post_h, q.b, q.i);                  // P(b|ĥ,i)
        } else {
            // P(b|â,ĥ,i) per a-value: slice the (a∪h)-uproot at (a,h).
            std::vector<NodeId> a_vars(q.a.begin(), q.a.end());
            std::size_t a_cells = 1;
            for (const auto& n : a_vars) a_cells *= static_cast<std::size_t>(bn.card(n));
            const NodeSet ab_i = set_union(set_union(q.a, q.b), q.i);
            std::vector<NodeId> l_scope(ab_i.begin(), ab_i.end());
            std::vector<int> l_cards;
            for (const auto& n : l_scope) l_cards.push_back(bn.card(n));
            lhs = ProbTable(l_scope, l_cards);
            for (std::size_t ai = 0; ai < a_cells; ++ai) {
                Assignment av;
                std::size_t arem = ai;
                for (std::size_t k = a_vars.size(); k-- > 0;) {
                    av[a_vars[k]] = static_cast<int>(arem % static_cast<std::size_t>(bn.card(a_vars[k])));
                    arem /= static_cast<std::size_t>(bn.card(a_vars[k]));
                }
                Assignment ahv = av;
                ahv.insert(hv.begin(), hv.end());
                const ProbTable per = conditional(slice(uah, ahv), q.b, q.i);
                for (std::size_t pi = 0; pi < per.size(); ++pi) {
                    Assignment cell = av;
                    const std::vector<int> pd = per.digits_of(pi);
                    for (std::size_t k = 0; k < per.scope().size(); ++k)
                        cell[per.scope()[k]] = pd[k];
                    std::vector<int> ld(l_scope.size());
                    for (std::size_t k = 0; k < l_scope.size(); ++k) ld[k] = cell.at(l_scope[k]);
                    const std::size_t li = lhs.index_of(ld);
                    if (per.defined(pi))
                        lhs.set(li, per.value(pi));
                    else
                        lhs.mark_undefined(li);
                }
            }
            rhs = rule == 2 ? conditional(post_h, q.b, set_union(q.a, q.i))
                            : conditional(post_h, q.b, q.i);
        }
        detail::accumulate_deviation(lhs, rhs, chk);
    }
    chk.holds = chk.max_deviation <= tol;
    return chk;
}

/// Convenience form that derives the uprooted tables itself. Callers checking
/// many queries against one net should cache the tables (they depend only on
/// h and a ∪ h) and use the overload above.
inline NumericCheck rule_equality_holds(const BayesNet& bn, int rule, const RuleQuery& q,
                                        double tol = 1e-9) {
    const ProbTable uh = uproot(bn, q.h);
    const ProbTable uah = rule == 1 ? ProbTable() : uproot(bn, set_union(q.a, q.h));
    return rule_equality_holds(bn, rule, q, tol, uh, uah);
}

}  // namespace docalc

#endif
