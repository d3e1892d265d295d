#ifndef DOCALC_IO_HPP
#define DOCALC_IO_HPP

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "docalc/bayes_net.hpp"
#include "docalc/graph.hpp"

namespace docalc {

/// Parsed network file. CPT blocks are optional: a file with only node/edge
/// lines describes a bare graph.
struct NetFile {
    Dag dag;
    std::map<NodeId, int> cards;
    bool has_cpts = false;
    std::map<NodeId, Cpt> cpts;

    BayesNet to_net() const {
        if (!has_cpts) throw std::invalid_argument("file declares no cpt blocks");
        return BayesNet(dag, cards, cpts);
    }
};

/// Text format, one declaration per line:
///   node <name> <cardinality>
///   edge <parent> <child>
///   cpt <node> | [<parent> ...]
///   <parent-state digits>: <p_0> <p_1> ...
/// '#' starts a comment; blank lines are ignored; duplicate declarations
/// are errors. CPT rows appear in mixed-radix order of the listed parents,
/// first parent slowest; root nodes carry a single ':'-prefixed row.
inline NetFile parse_net_text(std::istream& in) {
    std::vector<NodeId> nodes;
    std::map<NodeId, int> cards;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::map<NodeId, Cpt> cpts;

    Cpt* open_cpt = nullptr;
    std::size_t rows_seen = 0;
    int lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
    };
    auto finish_cpt = [&] {
        if (!open_cpt) return;
        if (rows_seen != open_cpt->row_count())
            fail("cpt " + open_cpt->owner + " has " + std::to_string(rows_seen) + " rows, expected " +
                 std::to_string(open_cpt->row_count()));
        open_cpt = nullptr;
    };

    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (tok == "node") {
            finish_cpt();
            std::string name;
            int card = 0;
            if (!(ls >> name >> card)) fail("expected: node <name> <cardinality>");
            if (card < 1) fail("cardinality must be >= 1");
            if (cards.count(name)) fail("duplicate node declaration: " + name);
            nodes.push_back(name);
            cards[name] = card;
        } else if (tok == "edge") {
            finish_cpt();
            std::string u, v;
            if (!(ls >> u >> v)) fail("expected: edge <parent> <child>");
            if (!cards.count(u)) fail("edge references undeclared node: " + u);
            if (!cards.count(v)) fail("edge references undeclared node: " + v);
            for (const auto& e : edges)
                if (e.first == u && e.second == v) fail("duplicate edge: " + u + " -> " + v);
            edges.emplace_back(u, v);
        } else if (tok == "cpt") {
            finish_cpt();
            std::string name, bar;
            if (!(ls >> name >> bar) || bar != "|") fail("expected: cpt <node> | [parents...]");
            if (!cards.count(name)) fail("cpt for undeclared node: " + name);
            if (cpts.count(name)) fail("duplicate cpt declaration: " + name);
            Cpt c;
            c.owner = name;
            c.owner_card = cards[name];
            std::string p;
            while (ls >> p) {
                if (!cards.count(p)) fail("cpt parent undeclared: " + p);
                c.parent_order.push_back(p);
                c.parent_cards.push_back(cards[p]);
            }
            cpts[name] = std::move(c);
            open_cpt = &cpts[name];
            rows_seen = 0;
        } else {
            // CPT row: "<digits>: p0 p1 ..." (":" alone for root nodes).
            if (!open_cpt) fail("unexpected token: " + tok);
            const auto colon = tok.find(':');
            if (colon == std::string::npos) fail("cpt row missing ':'");
            const std::string digits = tok.substr(0, colon);
            if (digits.size() != open_cpt->parent_order.size())
                fail("cpt row has " + std::to_string(digits.size()) + " parent digits, expected " +
                     std::to_string(open_cpt->parent_order.size()));
            std::size_t row = 0;
            for (std::size_t k = 0; k < digits.size(); ++k) {
                if (digits[k] < '0' || digits[k] > '9') fail("bad parent digit in cpt row");
                const int d = digits[k] - '0';
                if (d >= open_cpt->parent_cards[k]) fail("parent state out of range in cpt row");
                row = row * static_cast<std::size_t>(open_cpt->parent_cards[k]) +
                      static_cast<std::size_t>(d);
            }
            if (row != rows_seen) fail("cpt rows out of mixed-radix order");
            std::string rest = tok.substr(colon + 1);
            std::istringstream vs(rest + " " + std::string(std::istreambuf_iterator<char>(ls), {}));
            double pval;
            std::vector<double> probs;
            while (vs >> pval) probs.push_back(pval);
            if (static_cast<int>(probs.size()) != open_cpt->owner_card)
                fail("cpt row has wrong number of probabilities");
            open_cpt->table.insert(open_cpt->table.end(), probs.begin(), probs.end());
            ++rows_seen;
        }
    }
    finish_cpt();

    NetFile out;
    out.dag = Dag(nodes, edges);
    out.cards = std::move(cards);
    if (!cpts.empty()) {
        if (cpts.size() != out.dag.size())
            throw std::invalid_argument("cpt blocks present for only some nodes");
        out.has_cpts = true;
        out.cpts = std::move(cpts);
    }
    return out;
}

inline NetFile parse_net_text(const std::string& text) {
    std::istringstream in(text);
    return parse_net_text(in);
}

inline NetFile load_net_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return parse_net_text(in);
}

inline std::string format_net(const NetFile& f) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& n : f.dag.nodes()) out << "node " << n << ' ' << f.cards.at(n) << '\n';
    for (const auto& [u, v] : f.dag.edges()) out << "edge " << u << ' ' << v << '\n';
    if (f.has_cpts) {
        for (const auto& n : f.dag.nodes()) {
            const Cpt& c = f.cpts.at(n);
            out << "cpt " << n << " |";
            for (const auto& p : c.parent_order) out << ' ' << p;
            out << '\n';
            const std::size_t rows = c.row_count();
            for (std::size_t r = 0; r < rows; ++r) {
                std::string digits;
                std::size_t rem = r;
                for (std::size_t k = c.parent_cards.size(); k-- > 0;) {
                    digits.insert(digits.begin(),
                                  static_cast<char>('0' + rem % static_cast<std::size_t>(c.parent_cards[k])));
                    rem /= static_cast<std::size_t>(c.parent_cards[k]);
                }
                out << digits << ':';
                for (int v = 0; v < c.owner_card; ++v)
                    out << ' ' << c.table[r * static_cast<std::size_t>(c.owner_card) +
                                          static_cast<std::size_t>(v)];
                out << '\n';
            }
        }
    }
    return out.str();
}

inline NetFile to_net_file(const BayesNet& bn) {
    NetFile f;
    f.dag = bn.dag();
    f.cards = bn.cards();
    f.has_cpts = true;
    for (const auto& n : bn.dag().nodes()) f.cpts[n] = bn.cpt(n);
    return f;
}

}  // namespace docalc

#endif
