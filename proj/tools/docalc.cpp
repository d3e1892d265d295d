// Command-line front end: d-separation queries, graph surgery,
// interventional queries, rule applicability checks and the fuzz harness.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "docalc/docalculus.hpp"
#include "docalc/harness.hpp"
#include "docalc/interventions.hpp"
#include "docalc/io.hpp"
#include "docalc/paths.hpp"

namespace {

using nlohmann::json;
using namespace docalc;

NodeSet parse_set(const std::string& csv) {
    NodeSet out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.insert(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

Assignment parse_assignment(const std::string& csv) {
    Assignment out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        const auto eq = cur.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected NAME=STATE, got: " + cur);
        out[cur.substr(0, eq)] = std::stoi(cur.substr(eq + 1));
        cur.clear();
    };
    for (char c : csv + ",") {
        if (c == ',')
            flush();
        else
            cur += c;
    }
    return out;
}

void print_table(const ProbTable& t) {
    if (t.scope().empty()) {
        std::printf("(): %.12g\n", t.value(0));
        return;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto d = t.digits_of(i);
        std::string key;
        for (std::size_t k = 0; k < t.scope().size(); ++k) {
            if (k) key += " ";
            key += t.scope()[k] + "=" + std::to_string(d[k]);
        }
        if (t.defined(i))
            std::printf("%s: %.12g\n", key.c_str(), t.value(i));
        else
            std::printf("%s: undefined\n", key.c_str());
    }
}

json table_json(const ProbTable& t) {
    json cells = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        json cell;
        const auto d = t.digits_of(i);
        for (std::size_t k = 0; k < t.scope().size(); ++k) cell["assignment"][t.scope()[k]] = d[k];
        if (t.defined(i))
            cell["p"] = t.value(i);
        else
            cell["undefined"] = true;
        cells.push_back(cell);
    }
    return json{{"scope", t.scope()}, {"cells", cells}};
}

json edges_json(const Dag& g) {
    json out = json::array();
    for (const auto& [u, v] : g.edges()) out.push_back({u, v});
    return out;
}

void print_edges(const Dag& g) {
    for (const auto& [u, v] : g.edges()) std::printf("edge %s %s\n", u.c_str(), v.c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"do-calculus toolkit: graph surgery, d-separation, interventions, rules"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "emit one JSON object instead of text");

    // dsep
    auto* dsep = app.add_subcommand("dsep", "decide d-separation in a graph");
    std::string g_file, a_csv, b_csv, e_csv;
    dsep->add_option("--graph", g_file, "graph file")->required();
    dsep->add_option("--a", a_csv, "first node set, comma separated")->required();
    dsep->add_option("--b", b_csv, "second node set")->required();
    dsep->add_option("--given", e_csv, "conditioning set");

    // mutilate
    auto* mut = app.add_subcommand("mutilate", "apply graph surgery and print the result");
    std::string m_file, m_cut_in, m_cut_out, m_restrict, m_roots;
    mut->add_option("--graph", m_file, "graph file")->required();
    mut->add_option("--cut-incoming", m_cut_in, "erase arrows entering these nodes");
    mut->add_option("--cut-outgoing", m_cut_out, "erase arrows exiting these nodes");
    mut->add_option("--restrict", m_restrict, "restrict to these nodes");
    mut->add_option("--add-roots", m_roots, "add a twin root per node");

    // intervene
    auto* itv = app.add_subcommand("intervene", "evaluate P(target | do(...), given)");
    std::string n_file, do_csv, tgt_csv, giv_csv, method = "truncate";
    itv->add_option("--net", n_file, "network file with cpt blocks")->required();
    itv->add_option("--do", do_csv, "interventions, e.g. X=1,Z=0")->required();
    itv->add_option("--target", tgt_csv, "target nodes")->required();
    itv->add_option("--given", giv_csv, "observed nodes, names or NAME=STATE");
    itv->add_option("--method", method, "truncate | root-switch | both")
        ->check(CLI::IsMember({"truncate", "root-switch", "both"}));

    // rule
    auto* rule = app.add_subcommand("rule", "check do-calculus rule applicability");
    std::string r_graph, r_b, r_a, r_h, r_i, r_net;
    int r_rule = 0;
    double r_tol = 1e-9;
    rule->add_option("--graph", r_graph, "graph file")->required();
    rule->add_option("--rule", r_rule, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    rule->add_option("--b", r_b, "b set")->required();
    rule->add_option("--a", r_a, "a set")->required();
    // --h would collide with the default -h short help flag
    rule->set_help_flag("--help", "print help");
    rule->add_option("--h", r_h, "permanently intervened set");
    rule->add_option("--i", r_i, "observed set");
    rule->add_option("--net", r_net, "optional network file for the numeric check");
    rule->add_option("--tol", r_tol, "numeric tolerance");

    // fuzz
    auto* fz = app.add_subcommand("fuzz", "randomized soundness probes");
    GenConfig cfg;
    fz->add_option("--trials", cfg.trials, "trials per probe");
    fz->add_option("--nodes", cfg.node_count, "nodes per random net");
    fz->add_option("--edge-prob", cfg.edge_prob, "edge probability");
    fz->add_option("--max-card", cfg.max_cardinality, "max cardinality");
    fz->add_option("--seed", cfg.seed, "master seed");

    CLI11_PARSE(app, argc, argv);

    if (dsep->parsed()) {
        const NetFile f = load_net_file(g_file);
        const NodeSet a = parse_set(a_csv), b = parse_set(b_csv), e = parse_set(e_csv);
        const DSepVerdict v = f.dag.size() <= 12 ? d_separated(f.dag, a, b, e)
                                                 : DSepVerdict{d_separated_fast(f.dag, a, b, e), {}};
        if (as_json) {
            json j{{"command", "dsep"}, {"separated", v.separated}};
            if (v.witness) j["witness"] = render(*v.witness);
            std::printf("%s\n", j.dump().c_str());
        } else if (v.separated) {
            std::printf("SEPARATED\n");
        } else {
            std::printf("NOT SEPARATED\n");
            if (v.witness) std::printf("witness: %s\n", render(*v.witness).c_str());
        }
        return 0;
    }

    if (mut->parsed()) {
        const NetFile f = load_net_file(m_file);
        Dag g = f.dag;
        json ops = json::array();
        if (!m_restrict.empty()) {
            g = restrict_to(g, parse_set(m_restrict));
            ops.push_back("restrict");
        }
        if (!m_cut_in.empty()) {
            g = cut_incoming(g, parse_set(m_cut_in));
            ops.push_back("cut-incoming");
        }
        if (!m_cut_out.empty()) {
            g = cut_outgoing(g, parse_set(m_cut_out));
            ops.push_back("cut-outgoing");
        }
        json roots = json::object();
        if (!m_roots.empty()) {
            auto [g2, rm] = add_roots(g, parse_set(m_roots));
            g = g2;
            for (const auto& [k, v] : rm.twin) roots[k] = v;
            ops.push_back("add-roots");
        }
        if (as_json) {
            std::printf("%s\n", json{{"command", "mutilate"},
                                     {"ops", ops},
                                     {"nodes", g.nodes()},
                                     {"edges", edges_json(g)},
                                     {"roots", roots}}
                                    .dump()
                                    .c_str());
        } else {
            for (const auto& n : g.nodes()) std::printf("node %s\n", n.c_str());
            print_edges(g);
        }
        return 0;
    }

    if (itv->parsed()) {
        const BayesNet bn = load_net_file(n_file).to_net();
        const Assignment doasg = parse_assignment(do_csv);
        const NodeSet target = parse_set(tgt_csv);
        NodeSet given;
        Assignment given_vals;
        for (const auto& name : parse_set(giv_csv)) {
            if (name.find('=') != std::string::npos) {
                const Assignment one = parse_assignment(name);
                for (const auto& [k, v] : one) {
                    given.insert(k);
                    given_vals[k] = v;
                }
            } else {
                given.insert(name);
            }
        }

        auto via_switch = [&] {
            const BayesNet sw = root_switch_net(bn, keys(doasg));
            Assignment ctx = doasg;
            for (const auto& [n, s] : doasg) {
                (void)s;
                ctx[root_name(n)] = 1;
            }
            ProbTable t =
                conditional(slice(joint(sw), ctx), target, given);
            return t;
        };
        ProbTable t = method == "root-switch" ? via_switch() : do_query(bn, target, doasg, given);
        double discrepancy = -1.0;
        if (method == "both") discrepancy = max_deviation(t, via_switch()).first;
        if (!given_vals.empty()) t = slice(t, given_vals);
        if (as_json) {
            json j{{"command", "intervene"}, {"table", table_json(t)}};
            if (method == "both") j["max_discrepancy"] = discrepancy;
            std::printf("%s\n", j.dump().c_str());
        } else {
            print_table(t);
            if (method == "both") std::printf("max discrepancy: %.3g\n", discrepancy);
        }
        return 0;
    }

    if (rule->parsed()) {
        const NetFile f = load_net_file(r_graph);
        const RuleQuery q{parse_set(r_b), parse_set(r_a), parse_set(r_h), parse_set(r_i)};
        RuleVerdict v = rule_applicable(f.dag, r_rule, q);
        if (!r_net.empty()) {
            const BayesNet bn = load_net_file(r_net).to_net();
            v.numeric = rule_equality_holds(bn, r_rule, q, r_tol);
        }
        if (as_json) {
            json j{{"command", "rule"},
                   {"rule", r_rule},
                   {"applicable", v.applicable},
                   {"mutilated_edges", edges_json(v.mutilated)}};
            if (v.witness) j["witness"] = render(*v.witness);
            if (v.numeric)
                j["numeric"] = {{"max_deviation", v.numeric->max_deviation},
                                {"checked_cells", v.numeric->checked_cells},
                                {"holds", v.numeric->holds}};
            std::printf("%s\n", j.dump().c_str());
        } else {
            std::printf("%s\n", v.applicable ? "APPLICABLE" : "NOT APPLICABLE");
            print_edges(v.mutilated);
            if (v.witness) std::printf("witness: %s\n", render(*v.witness).c_str());
            if (v.numeric)
                std::printf("max deviation: %.3g over %zu cells (%s)\n", v.numeric->max_deviation,
                            v.numeric->checked_cells, v.numeric->holds ? "holds" : "fails");
        }
        if (v.numeric && !v.numeric->holds) return 2;
        return 0;
    }

    // fuzz
    const FuzzReport rd = fuzz_dsep(cfg);
    const FuzzReport rr = fuzz_rules(cfg);
    const bool pass = rd.pass && rr.pass;
    if (as_json) {
        std::printf("%s\n",
                    json{{"command", "fuzz"}, {"dsep", rd.to_json()}, {"rules", rr.to_json()}, {"pass", pass}}
                        .dump()
                        .c_str());
    } else {
        std::printf("dsep probe:  %s\n%s\n", rd.pass ? "PASS" : "FAIL", rd.to_json().dump(2).c_str());
        std::printf("rules probe: %s\n%s\n", rr.pass ? "PASS" : "FAIL", rr.to_json().dump(2).c_str());
        std::printf("%s\n", pass ? "PASS" : "FAIL");
    }
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
