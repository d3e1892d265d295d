#ifndef DOCALC_PROB_TABLE_HPP
#define DOCALC_PROB_TABLE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "docalc/graph.hpp"

namespace docalc {

using Assignment = std::map<NodeId, int>;

/// Dense real-valued table over the joint assignments of an ordered variable
/// scope. Indexing is mixed-radix with the first scope variable slowest.
/// Cells may be flagged undefined (zero-probability conditioning contexts);
/// undefined never propagates as NaN.
class ProbTable {
public:
    ProbTable() = default;

    ProbTable(std::vector<NodeId> scope, std::vector<int> cards)
        : scope_(std::move(scope)), cards_(std::move(cards)) {
        if (scope_.size() != cards_.size())
            throw std::invalid_argument("scope/cardinality length mismatch");
        std::size_t n = 1;
        for (int c : cards_) {
            if (c < 1) throw std::invalid_argument("cardinality must be >= 1");
            n *= static_cast<std::size_t>(c);
        }
        values_.assign(n, 0.0);
    }

    const std::vector<NodeId>& scope() const { return scope_; }
    const std::vector<int>& cards() const { return cards_; }
    std::size_t size() const { return values_.size(); }

    double value(std::size_t idx) const { return values_[idx]; }
    void set(std::size_t idx, double v) { values_[idx] = v; }
    double& operator[](std::size_t idx) { return values_[idx]; }

    bool defined(std::size_t idx) const { return undef_.empty() || !undef_[idx]; }
    void mark_undefined(std::size_t idx) {
        if (undef_.empty()) undef_.assign(values_.size(), 0);
        undef_[idx] = 1;
        values_[idx] = 0.0;
    }
    bool has_undefined() const {
        for (auto u : undef_)
            if (u) return true;
        return false;
    }

    int position(const NodeId& v) const {
        for (std::size_t k = 0; k < scope_.size(); ++k)
            if (scope_[k] == v) return static_cast<int>(k);
        throw std::invalid_argument("variable not in table scope: " + v);
    }

    std::size_t index_of(const std::vector<int>& digits) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < scope_.size(); ++k)
            idx = idx * static_cast<std::size_t>(cards_[k]) + static_cast<std::size_t>(digits[k]);
        return idx;
    }

    std::vector<int> digits_of(std::size_t idx) const {
        std::vector<int> d(scope_.size());
        for (std::size_t k = scope_.size(); k-- > 0;) {
            d[k] = static_cast<int>(idx % static_cast<std::size_t>(cards_[k]));
            idx /= static_cast<std::size_t>(cards_[k]);
        }
        return d;
    }

    double at(const Assignment& asg) const {
        std::vector<int> d(scope_.size());
        for (std::size_t k = 0; k < scope_.size(); ++k) {
            auto it = asg.find(scope_[k]);
            if (it == asg.end())
                throw std::invalid_argument("assignment misses variable: " + scope_[k]);
            d[k] = it->second;
        }
        return values_[index_of(d)];
    }

    double sum() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (defined(i)) s += values_[i];
        return s;
    }

    void normalize() {
        const double s = sum();
        if (s <= 0.0) throw std::runtime_error("cannot normalize a zero-mass table");
        for (auto& v : values_) v /= s;
    }

private:
    std::vector<NodeId> scope_;
    std::vector<int> cards_;
    std::vector<double> values_;
    std::vector<std::uint8_t> undef_;  // empty means all defined
};

namespace detail {

// Position of each variable of sub within full's scope.
inline std::vector<int> scope_positions(const ProbTable& full, const std::vector<NodeId>& sub) {
    std::vector<int> pos;
    pos.reserve(sub.size());
    for (const auto& v : sub) pos.push_back(full.position(v));
    return pos;
}

inline std::vector<NodeId> sorted_scope(const NodeSet& s) {
    return std::vector<NodeId>(s.begin(), s.end());
}

}  // namespace detail

/// Sums out every variable not in keep; result scope is keep in canonical
/// (lexicographic) order. A result cell is undefined if any contributing
/// cell was.
inline ProbTable marginal(const ProbTable& t, const NodeSet& keep) {
    const std::vector<NodeId> out_scope = detail::sorted_scope(keep);
    const std::vector<int> pos = detail::scope_positions(t, out_scope);
    std::vector<int> out_cards;
    for (int p : pos) out_cards.push_back(t.cards()[static_cast<std::size_t>(p)]);

    ProbTable out(out_scope, out_cards);
    std::vector<std::uint8_t> bad(out.size(), 0);
    const std::size_t n = t.size();
    std::vector<int> d(t.scope().size(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t oi = 0;
        for (std::size_t k = 0; k < pos.size(); ++k)
            oi = oi * static_cast<std::size_t>(out_cards[k]) +
                 static_cast<std::size_t>(d[static_cast<std::size_t>(pos[k])]);
        if (t.defined(idx))
            out[oi] += t.value(idx);
        else
            bad[oi] = 1;
        // odometer increment, last digit fastest
        for (std::size_t k = t.scope().size(); k-- > 0;) {
            if (++d[k] < t.cards()[k]) break;
            d[k] = 0;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (bad[i]) out.mark_undefined(i);
    return out;
}

/// Fixes the given variables to the assigned states and drops them from the
/// scope. No renormalization.
inline ProbTable slice(const ProbTable& t, const Assignment& fix) {
    NodeSet keep_set;
    for (const auto& v : t.scope())
        if (!fix.count(v)) keep_set.insert(v);
    const std::vector<NodeId> out_scope = detail::sorted_scope(keep_set);
    const std::vector<int> pos = detail::scope_positions(t, out_scope);
    std::vector<int> out_cards;
    for (int p : pos) out_cards.push_back(t.cards()[static_cast<std::size_t>(p)]);
    ProbTable out(out_scope, out_cards);

    std::vector<int> d(t.scope().size(), 0);
    for (std::size_t k = 0; k < t.scope().size(); ++k) {
        auto it = fix.find(t.scope()[k]);
        if (it != fix.end()) {
            if (it->second < 0 || it->second >= t.cards()[k])
                throw std::invalid_argument("state out of range for " + t.scope()[k]);
            d[k] = it->second;
        }
    }
    const std::size_t m = out.size();
    for (std::size_t oi = 0; oi < m; ++oi) {
        const std::vector<int> od = out.digits_of(oi);
        for (std::size_t k = 0; k < pos.size(); ++k) d[static_cast<std::size_t>(pos[k])] = od[k];
        const std::size_t idx = t.index_of(d);
        if (t.defined(idx))
            out.set(oi, t.value(idx));
        else
            out.mark_undefined(oi);
    }
    return out;
}

/// P(target | given) as a table over target ∪ given. Cells whose
/// conditioning context has zero mass are flagged undefined.
inline ProbTable conditional(const ProbTable& t, const NodeSet& target, const NodeSet& given) {
    if (!disjoint(target, given))
        throw std::invalid_argument("conditional: target and given overlap");
    const ProbTable num = marginal(t, set_union(target, given));
    const ProbTable den = marginal(t, given);

    ProbTable out(num.scope(), num.cards());
    const std::vector<int> gpos = detail::scope_positions(num, den.scope());
    for (std::size_t idx = 0; idx < num.size(); ++idx) {
        const std::vector<int> d = num.digits_of(idx);
        std::vector<int> gd;
        gd.reserve(gpos.size());
        for (int p : gpos) gd.push_back(d[static_cast<std::size_t>(p)]);
        const std::size_t gi = den.index_of(gd);
        if (!num.defined(idx) || !den.defined(gi) || den.value(gi) == 0.0)
            out.mark_undefined(idx);
        else
            out.set(idx, num.value(idx) / den.value(gi));
    }
    return out;
}

/// Dependence ratio P(a:b|c) = P(a,b|c) / (P(a|c) P(b|c)) over a ∪ b ∪ c.
/// Algebraically equal to P(abc) P(c) / (P(ac) P(bc)); cells with a zero
/// denominator are flagged undefined.
inline ProbTable dep_ratio(const ProbTable& t, const NodeSet& a, const NodeSet& b,
                           const NodeSet& c) {
    if (!disjoint(a, b) || !disjoint(a, c) || !disjoint(b, c))
        throw std::invalid_argument("dep_ratio: sets must be pairwise disjoint");
    const ProbTable abc = marginal(t, set_union(set_union(a, b), c));
    const ProbTable ac = marginal(t, set_union(a, c));
    const ProbTable bc = marginal(t, set_union(b, c));
    const ProbTable pc = marginal(t, c);

    ProbTable out(abc.scope(), abc.cards());
    const std::vector<int> pac = detail::scope_positions(abc, ac.scope());
    const std::vector<int> pbc = detail::scope_positions(abc, bc.scope());
    const std::vector<int> pcc = detail::scope_positions(abc, pc.scope());
    auto sub_index = [](const ProbTable& sub, const std::vector<int>& pos,
                        const std::vector<int>& d) {
        std::vector<int> sd;
        sd.reserve(pos.size());
        for (int p : pos) sd.push_back(d[static_cast<std::size_t>(p)]);
        return sub.index_of(sd);
    };
    for (std::size_t idx = 0; idx < abc.size(); ++idx) {
        const std::vector<int> d = abc.digits_of(idx);
        const double vac = ac.value(sub_index(ac, pac, d));
        const double vbc = bc.value(sub_index(bc, pbc, d));
        const double vc = pc.value(sub_index(pc, pcc, d));
        if (vac == 0.0 || vbc == 0.0)
            out.mark_undefined(idx);
        else
            out.set(idx, abc.value(idx) * vc / (vac * vbc));
    }
    return out;
}

/// Max |x - y| over cells defined in both tables; scopes must match.
inline std::pair<double, std::size_t> max_deviation(const ProbTable& x, const ProbTable& y) {
    if (x.scope() != y.scope())
        throw std::invalid_argument("max_deviation: scope mismatch");
    double dev = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x.defined(i) || !y.defined(i)) continue;
        dev = std::max(dev, std::abs(x.value(i) - y.value(i)));
        ++checked;
    }
    return {dev, checked};
}

}  // namespace docalc

#endif
