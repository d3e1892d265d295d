#ifndef DOCALC_HARNESS_HPP
#define DOCALC_HARNESS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "docalc/bayes_net.hpp"
#include "docalc/docalculus.hpp"
#include "docalc/graph.hpp"
#include "docalc/interventions.hpp"
#include "docalc/paths.hpp"

namespace docalc {

/// Deterministic splitmix64 generator. Self-contained so that reports are
/// reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    int int_in(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Geometric with success probability 1/2: values 0,1,2,..., mean 1.
    int geometric() {
        int k = 0;
        while (next() & 1) ++k;
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t k = v.size(); k > 1; --k)
            std::swap(v[k - 1], v[below(k)]);
    }

private:
    std::uint64_t state_;
};

/// Decorrelates per-trial streams from a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t trial) {
    Rng r(master ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    r.next();
    return r.next();
}

struct GenConfig {
    int node_count = 5;
    double edge_prob = 0.4;
    int max_cardinality = 2;
    std::uint64_t seed = 0;
    int trials = 100;

    void validate() const {
        if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
        if (edge_prob < 0.0 || edge_prob > 1.0)
            throw std::invalid_argument("edge_prob must be in [0,1]");
        if (max_cardinality < 2) throw std::invalid_argument("max_cardinality must be >= 2");
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    }
};

/// Random DAG: uniform random topological order, each order-respecting edge
/// included independently with edge_prob.
inline Dag gen_dag(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<NodeId> names;
    for (int k = 0; k < cfg.node_count; ++k) {
        std::string s = std::to_string(k);
        if (s.size() < 2) s = "0" + s;
        names.push_back("n" + s);
    }
    std::vector<NodeId> order = names;
    rng.shuffle(order);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int i = 0; i < cfg.node_count; ++i)
        for (int j = i + 1; j < cfg.node_count; ++j)
            if (rng.u01() < cfg.edge_prob)
                edges.emplace_back(order[static_cast<std::size_t>(i)],
                                   order[static_cast<std::size_t>(j)]);
    return Dag(names, edges);
}

/// Random CPTs with every entry >= 0.01 after normalization, so the
/// faithfulness probe is not confounded by near-deterministic rows.
inline BayesNet gen_cpts(const Dag& dag, const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    std::map<NodeId, int> cards;
    for (const auto& n : dag.nodes()) cards[n] = rng.int_in(2, cfg.max_cardinality);

    std::map<NodeId, Cpt> cpts;
    for (const auto& n : dag.nodes()) {
        Cpt c;
        c.owner = n;
        c.owner_card = cards[n];
        const NodeSet ps = parents(dag, NodeSet{n});
        c.parent_order.assign(ps.begin(), ps.end());
        for (const auto& p : c.parent_order) c.parent_cards.push_back(cards[p]);
        const std::size_t rows = c.row_count();
        const int k = c.owner_card;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> q(static_cast<std::size_t>(k));
            double s = 0.0;
            for (auto& v : q) {
                v = rng.u01() + 1e-12;
                s += v;
            }
            for (int v = 0; v < k; ++v)
                c.table.push_back((1.0 - 0.01 * k) * q[static_cast<std::size_t>(v)] / s + 0.01);
        }
        cpts[n] = std::move(c);
    }
    return BayesNet(dag, std::move(cards), std::move(cpts));
}

struct RuleCounters {
    long applicable = 0;
    long equality_held = 0;
    long equality_failed = 0;
    long converse_held_not_applicable = 0;  // probed for rules 1 and 2 only
    long not_applicable = 0;
    double max_deviation = 0.0;
};

struct FuzzReport {
    std::string kind;  // "dsep" or "rules"
    GenConfig cfg;

    // dsep contingency
    long sep_ci = 0, sep_not_ci = 0, notsep_ci = 0, notsep_not_ci = 0;
    double max_dev_separated = 0.0;
    double faithfulness_ratio = 0.0;

    // rules
    RuleCounters rule[3];
    long rule2_childless_mismatches = 0;

    bool pass = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = kind;
        j["config"] = {{"nodes", cfg.node_count},       {"edge_prob", cfg.edge_prob},
                       {"max_cardinality", cfg.max_cardinality}, {"seed", cfg.seed},
                       {"trials", cfg.trials}};
        if (kind == "dsep") {
            j["contingency"] = {{"separated_ci", sep_ci},
                                {"separated_not_ci", sep_not_ci},
                                {"not_separated_ci", notsep_ci},
                                {"not_separated_not_ci", notsep_not_ci}};
            j["max_dev_separated"] = max_dev_separated;
            j["faithfulness_ratio"] = faithfulness_ratio;
        } else {
            for (int r = 0; r < 3; ++r) {
                nlohmann::json rj = {{"applicable", rule[r].applicable},
                                     {"equality_held", rule[r].equality_held},
                                     {"equality_failed", rule[r].equality_failed},
                                     {"not_applicable", rule[r].not_applicable},
                                     {"max_deviation", rule[r].max_deviation}};
                if (r < 2) rj["converse_held_not_applicable"] = rule[r].converse_held_not_applicable;
                j["rules"]["rule" + std::to_string(r + 1)] = rj;
            }
            j["rule2_childless_mismatches"] = rule2_childless_mismatches;
        }
        j["pass"] = pass;
        return j;
    }
};

namespace detail {

// Random disjoint category assignment; categories sized geometrically
// (mean 1) with the first `required` categories forced nonempty.
inline std::vector<NodeSet> random_partition(const Dag& g, Rng& rng, int categories,
                                             int required) {
    std::vector<NodeId> pool = g.nodes();
    rng.shuffle(pool);
    std::vector<NodeSet> out(static_cast<std::size_t>(categories));
    std::size_t cursor = 0;
    for (int c = 0; c < categories; ++c) {
        int size = rng.geometric();
        if (c < required && size == 0) size = 1;
        // leave one node apiece for the remaining required categories
        const std::size_t reserve =
            static_cast<std::size_t>(required > c + 1 ? required - c - 1 : 0);
        for (int k = 0; k < size && cursor + reserve < pool.size(); ++k)
            out[static_cast<std::size_t>(c)].insert(pool[cursor++]);
    }
    return out;
}

}  // namespace detail

/// d-separation probe: soundness (separated implies numerical CI) asserted,
/// completeness reported as a faithfulness ratio.
inline FuzzReport fuzz_dsep(const GenConfig& cfg) {
    cfg.validate();
    if (cfg.node_count < 2) throw std::invalid_argument("dsep fuzzing needs >= 2 nodes");
    FuzzReport rep;
    rep.kind = "dsep";
    rep.cfg = cfg;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        const Dag g = gen_dag(cfg, rng);
        const BayesNet bn = gen_cpts(g, cfg, rng);
        const auto part = detail::random_partition(g, rng, 4, 2);  // a, b, e, other
        const NodeSet &a = part[0], &b = part[1], &e = part[2];

        const bool sep = d_separated_fast(g, a, b, e);
        const double dev = ci_deviation(bn, a, b, e);
        const bool ci = dev <= 1e-9;
        if (sep) {
            rep.max_dev_separated = std::max(rep.max_dev_separated, dev);
            ++(ci ? rep.sep_ci : rep.sep_not_ci);
        } else {
            ++(ci ? rep.notsep_ci : rep.notsep_not_ci);
        }
    }
    const long notsep = rep.notsep_ci + rep.notsep_not_ci;
    rep.faithfulness_ratio =
        notsep == 0 ? 0.0 : static_cast<double>(rep.notsep_ci) / static_cast<double>(notsep);
    rep.pass = rep.sep_not_ci == 0 && rep.faithfulness_ratio < 0.05;
    return rep;
}

/// rule probe: when a rule is graphically applicable its probabilistic
/// equality must hold at 1e-9; the rule 1/2 converses are tallied, not
/// asserted. Also cross-checks that rule 2 degenerates to rule 1 whenever
/// a is childless in the h-cut graph.
inline FuzzReport fuzz_rules(const GenConfig& cfg) {
    cfg.validate();
    if (cfg.node_count < 2) throw std::invalid_argument("rule fuzzing needs >= 2 nodes");
    FuzzReport rep;
    rep.kind = "rules";
    rep.cfg = cfg;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        const Dag g = gen_dag(cfg, rng);
        const BayesNet bn = gen_cpts(g, cfg, rng);
        const auto part = detail::random_partition(g, rng, 5, 2);  // b, a, h, i, other
        RuleQuery q{part[0], part[1], part[2], part[3]};

        bool verdicts[3];
        for (int r = 1; r <= 3; ++r) {
            RuleCounters& rc = rep.rule[r - 1];
            const RuleVerdict v = rule_applicable(g, r, q, /*want_witness=*/false);
            verdicts[r - 1] = v.applicable;
            if (v.applicable) {
                ++rc.applicable;
                const NumericCheck chk = rule_equality_holds(bn, r, q, 1e-9);
                rc.max_deviation = std::max(rc.max_deviation, chk.max_deviation);
                ++(chk.holds ? rc.equality_held : rc.equality_failed);
            } else {
                ++rc.not_applicable;
                if (r < 3) {
                    const NumericCheck chk = rule_equality_holds(bn, r, q, 1e-9);
                    if (chk.holds) ++rc.converse_held_not_applicable;
                }
            }
        }
        if (children(cut_incoming(g, q.h), q.a).empty() && verdicts[0] != verdicts[1])
            ++rep.rule2_childless_mismatches;
    }
    rep.pass = rep.rule[0].equality_failed == 0 && rep.rule[1].equality_failed == 0 &&
               rep.rule[2].equality_failed == 0 && rep.rule2_childless_mismatches == 0;
    return rep;
}

}  // namespace docalc

#endif
