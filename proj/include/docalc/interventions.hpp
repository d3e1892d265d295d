#ifndef DOCALC_INTERVENTIONS_HPP
#define DOCALC_INTERVENTIONS_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include "docalc/bayes_net.hpp"
#include "docalc/graph.hpp"
#include "docalc/prob_table.hpp"

namespace docalc {

inline NodeSet keys(const Assignment& a) {
    NodeSet out;
    for (const auto& [k, v] : a) out.insert(k);
    return out;
}

/// Truncated factorization: table over all nodes whose cell is
/// ∏_{j ∉ a} P(x_j | pa(x_j)). Fixing the a-coordinates yields the
/// normalized interventional distribution P(x.-a. | â.).
inline ProbTable uproot(const BayesNet& bn, const NodeSet& a) {
    std::vector<char> use(bn.dag().size(), 1);
    for (const auto& n : a) use[static_cast<std::size_t>(bn.dag().index_of(n))] = 0;
    return detail::factor_product(bn, use);
}

/// P(b. | â., e.): marginalize the uprooted distribution onto b ∪ e, then
/// condition on e. With e empty this is P(b.|â.) as a plain table over b.
inline ProbTable do_query(const BayesNet& bn, const NodeSet& b, const Assignment& a,
                          const NodeSet& e) {
    const NodeSet ka = keys(a);
    if (!disjoint(b, ka) || !disjoint(b, e) || !disjoint(ka, e))
        throw std::invalid_argument("do_query: b, do-set and e must be pairwise disjoint");
    const ProbTable post = slice(uproot(bn, ka), a);
    if (e.empty()) return marginal(post, b);
    return conditional(post, b, e);
}

/// Augments the net with one binary switch root per node of a. With the
/// switch at 0 the node keeps its original mechanism; at 1 it follows its
/// unconditional marginal, severing its roots:
///   P(a_j | pa, rt) = P(a_j) [rt=1] + P(a_j | pa) [rt=0].
inline BayesNet root_switch_net(const BayesNet& bn, const NodeSet& a) {
    auto [dag2, rm] = add_roots(bn.dag(), a);
    std::map<NodeId, int> cards = bn.cards();
    std::map<NodeId, Cpt> cpts;

    const ProbTable j = joint(bn);
    for (const auto& n : bn.dag().nodes()) {
        if (!a.count(n)) {
            cpts[n] = bn.cpt(n);
            continue;
        }
        const ProbTable pn = marginal(j, NodeSet{n});
        const Cpt& orig = bn.cpt(n);

        Cpt c;
        c.owner = n;
        c.owner_card = bn.card(n);
        const NodeSet ps = parents(dag2, NodeSet{n});
        c.parent_order.assign(ps.begin(), ps.end());
        for (const auto& p : c.parent_order)
            c.parent_cards.push_back(p == rm.twin.at(n) ? 2 : bn.card(p));

        // Positions of the original parents within the new parent order.
        std::vector<int> opos;
        for (const auto& p : orig.parent_order) {
            const auto it = std::find(c.parent_order.begin(), c.parent_order.end(), p);
            opos.push_back(static_cast<int>(it - c.parent_order.begin()));
        }
        const auto rt_it = std::find(c.parent_order.begin(), c.parent_order.end(), rm.twin.at(n));
        const std::size_t rt_pos = static_cast<std::size_t>(rt_it - c.parent_order.begin());

        const std::size_t rows = c.row_count();
        c.table.resize(rows * static_cast<std::size_t>(c.owner_card));
        std::vector<int> d(c.parent_order.size(), 0);
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<int> od;
            od.reserve(opos.size());
            for (int p : opos) od.push_back(d[static_cast<std::size_t>(p)]);
            for (int v = 0; v < c.owner_card; ++v)
                c.table[r * static_cast<std::size_t>(c.owner_card) + static_cast<std::size_t>(v)] =
                    d[rt_pos] == 1 ? pn.value(static_cast<std::size_t>(v)) : orig.entry(v, od);
            for (std::size_t k = c.parent_order.size(); k-- > 0;) {
                if (++d[k] < c.parent_cards[k]) break;
                d[k] = 0;
            }
        }
        cpts[n] = std::move(c);
    }
    for (const auto& [n, r] : rm.twin) {
        cards[r] = 2;
        Cpt c;
        c.owner = r;
        c.owner_card = 2;
        c.table = {0.5, 0.5};
        cpts[r] = std::move(c);
    }
    return BayesNet(dag2, std::move(cards), std::move(cpts));
}

/// Mowing to a': table over all x. equal to
/// P(x.-a.|[a']^) * P(a.|[x.-a.]^), i.e. the children of a read the fixed
/// value a' while the mechanisms of a itself stay intact.
inline ProbTable mow(const BayesNet& bn, const NodeSet& a, const Assignment& a_prime) {
    if (keys(a_prime) != a)
        throw std::invalid_argument("mow: assignment keys must equal the mowed set");
    for (const auto& [n, v] : a_prime)
        if (v < 0 || v >= bn.card(n))
            throw std::invalid_argument("mow: state out of range for " + n);
    if (bn.joint_size() > state_space_cap())
        throw std::runtime_error("joint state space exceeds cap");

    std::vector<NodeId> scope = bn.dag().nodes();
    std::vector<int> cards;
    for (const auto& n : scope) cards.push_back(bn.card(n));
    ProbTable t(scope, cards);
    const auto plans = detail::factor_plans(bn, t);

    std::vector<char> mowed(scope.size(), 0);
    std::vector<int> subst(scope.size(), -1);
    for (std::size_t k = 0; k < scope.size(); ++k) {
        if (a.count(scope[k])) {
            mowed[k] = 1;
            subst[k] = a_prime.at(scope[k]);
        }
    }

    std::vector<int> d(scope.size(), 0);
    std::vector<int> ps;
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        double v = 1.0;
        for (std::size_t jn = 0; jn < plans.size(); ++jn) {
            const auto& p = plans[jn];
            const bool owner_mowed = mowed[static_cast<std::size_t>(p.self_pos)];
            ps.clear();
            for (int q : p.parent_pos) {
                // Arrows exiting a are severed: children of a see a'.
                const int digit = (!owner_mowed && mowed[static_cast<std::size_t>(q)])
                                      ? subst[static_cast<std::size_t>(q)]
                                      : d[static_cast<std::size_t>(q)];
                ps.push_back(digit);
            }
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

/// The uprooting operator δ_â applied to the marginal query P(s):
/// sums the truncated factorization over everything outside s. Variables of
/// a that lie in s survive as intervention values; the rest are summed out.
inline ProbTable uproot_op_joint(const BayesNet& bn, const NodeSet& a, const NodeSet& s) {
    return marginal(uproot(bn, a), s);
}

/// δ_â applied to the conditional query P(target | given), via the ratio
/// rule δ P(t|g) = δ P(t ∪ g) / δ P(g). With empty given this is the plain
/// joint-query operator above.
inline ProbTable uproot_op(const BayesNet& bn, const NodeSet& a, const NodeSet& target,
                           const NodeSet& given) {
    if (!disjoint(target, given))
        throw std::invalid_argument("uproot_op: target and given overlap");
    if (given.empty()) return uproot_op_joint(bn, a, target);
    const ProbTable num = uproot_op_joint(bn, a, set_union(target, given));
    const ProbTable den = uproot_op_joint(bn, a, given);
    ProbTable out(num.scope(), num.cards());
    const std::vector<int> gpos = detail::scope_positions(num, den.scope());
    for (std::size_t idx = 0; idx < num.size(); ++idx) {
        const std::vector<int> d = num.digits_of(idx);
        std::vector<int> gd;
        gd.reserve(gpos.size());
        for (int p : gpos) gd.push_back(d[static_cast<std::size_t>(p)]);
        const std::size_t gi = den.index_of(gd);
        if (den.value(gi) == 0.0)
            out.mark_undefined(idx);
        else
            out.set(idx, num.value(idx) / den.value(gi));
    }
    return out;
}

/// The three query shapes covered by the mow-and-take-the-limit identities.
enum class MowLimitShape {
    JointAB,            // lim δ_v̌a(a') P(a,b)  = P(a,b)
    MarginalB,          // lim δ_v̌a(a') P(b)    = P(b|â)   (sum over a first)
    ConditionalBGivenA  // lim δ_v̌a(a') P(b|a)  = P(b|a)
};

/// Evaluates lim_{a' -> a} δ_v̌a.(a') on the given query shape: the mowed
/// expression with a' pinned to the running value of a (the diagonal).
/// Result scope is a ∪ b in every shape.
inline ProbTable mow_limit(const BayesNet& bn, const NodeSet& a, const NodeSet& b,
                           MowLimitShape shape) {
    if (!disjoint(a, b)) throw std::invalid_argument("mow_limit: a and b overlap");
    std::vector<NodeId> a_vars(a.begin(), a.end());
    std::vector<int> a_cards;
    for (const auto& n : a_vars) a_cards.push_back(bn.card(n));

    const NodeSet ab = set_union(a, b);
    std::vector<NodeId> out_scope(ab.begin(), ab.end());
    std::vector<int> out_cards;
    for (const auto& n : out_scope) out_cards.push_back(bn.card(n));
    ProbTable out(out_scope, out_cards);

    // One mow per diagonal point a' = a-value.
    std::size_t a_cells = 1;
    for (int c : a_cards) a_cells *= static_cast<std::size_t>(c);
    for (std::size_t ai = 0; ai < a_cells; ++ai) {
        Assignment av;
        std::size_t rem = ai;
        for (std::size_t k = a_vars.size(); k-- > 0;) {
            av[a_vars[k]] = static_cast<int>(rem % static_cast<std::size_t>(a_cards[k]));
            rem /= static_cast<std::size_t>(a_cards[k]);
        }
        const ProbTable m = mow(bn, a, av);
        ProbTable per;  // table over b for this a-value
        switch (shape) {
            case MowLimitShape::JointAB:
                per = slice(marginal(m, ab), av);
                break;
            case MowLimitShape::MarginalB:
                per = marginal(m, b);
                break;
            case MowLimitShape::ConditionalBGivenA:
                per = slice(conditional(marginal(m, ab), b, a), av);
                break;
        }
        for (std::size_t bi = 0; bi < per.size(); ++bi) {
            Assignment cell = av;
            const std::vector<int> bd = per.digits_of(bi);
            for (std::size_t k = 0; k < per.scope().size(); ++k) cell[per.scope()[k]] = bd[k];
            std::vector<int> od(out_scope.size());
            for (std::size_t k = 0; k < out_scope.size(); ++k) od[k] = cell.at(out_scope[k]);
            const std::size_t oi = out.index_of(od);
            if (per.defined(bi))
                out.set(oi, per.value(bi));
            else
                out.mark_undefined(oi);
        }
    }
    return out;
}

}  // namespace docalc

#endif
