#include <catch2/catch_amalgamated.hpp>

#include "docalc/harness.hpp"
#include "docalc/io.hpp"

using namespace docalc;

TEST_CASE("graph file parsing") {
    const std::string text =
        "# a three node chain\n"
        "node X 2\n"
        "node Y 2\n"
        "node Z 3   # trailing comment\n"
        "\n"
        "edge X Y\n"
        "edge Y Z\n";
    const NetFile f = parse_net_text(text);
    CHECK(f.dag.nodes() == std::vector<NodeId>{"X", "Y", "Z"});
    CHECK(f.dag.has_edge("X", "Y"));
    CHECK(f.cards.at("Z") == 3);
    CHECK_FALSE(f.has_cpts);
    CHECK_THROWS(f.to_net());
}

TEST_CASE("parse errors name the offense") {
    CHECK_THROWS_WITH(parse_net_text("node X 2\nnode X 2\n"),
                      Catch::Matchers::ContainsSubstring("duplicate node"));
    CHECK_THROWS_WITH(parse_net_text("node X 2\nedge X Y\n"),
                      Catch::Matchers::ContainsSubstring("undeclared"));
    CHECK_THROWS_WITH(parse_net_text("node X 2\nnode Y 2\nedge X Y\nedge X Y\n"),
                      Catch::Matchers::ContainsSubstring("duplicate edge"));
    CHECK_THROWS(parse_net_text("node X 0\n"));
    CHECK_THROWS_WITH(parse_net_text("node X 2\ncpt X |\n: 0.5 0.5\ncpt X |\n: 0.5 0.5\n"),
                      Catch::Matchers::ContainsSubstring("duplicate cpt"));
}

TEST_CASE("network file parsing") {
    const std::string text =
        "node X 2\n"
        "node Y 2\n"
        "edge X Y\n"
        "cpt X |\n"
        ": 0.7 0.3\n"
        "cpt Y | X\n"
        "0: 0.8 0.2\n"
        "1: 0.1 0.9\n";
    const BayesNet bn = parse_net_text(text).to_net();
    const ProbTable j = joint(bn);
    CHECK(j.at({{"X", 1}, {"Y", 1}}) == Catch::Approx(0.27));

    // rows must cover each parent assignment exactly once, in order
    CHECK_THROWS(parse_net_text("node X 2\nnode Y 2\nedge X Y\ncpt X |\n: 0.7 0.3\n"
                                "cpt Y | X\n0: 0.8 0.2\n"));
    CHECK_THROWS(parse_net_text("node X 2\nnode Y 2\nedge X Y\ncpt X |\n: 0.7 0.3\n"
                                "cpt Y | X\n1: 0.1 0.9\n0: 0.8 0.2\n"));
    // cpt parents must match the graph (caught when the net is built)
    CHECK_THROWS(parse_net_text("node X 2\nnode Y 2\nedge X Y\ncpt X |\n: 0.7 0.3\n"
                                "cpt Y |\n: 0.5 0.5\n")
                     .to_net());
}

TEST_CASE("round trip through the text format") {
    GenConfig cfg;
    cfg.node_count = 5;
    cfg.edge_prob = 0.5;
    cfg.max_cardinality = 3;
    for (int t = 0; t < 10; ++t) {
        Rng rng(split_seed(17, static_cast<std::uint64_t>(t)));
        const Dag g = gen_dag(cfg, rng);
        const BayesNet bn = gen_cpts(g, cfg, rng);
        const std::string text = format_net(to_net_file(bn));
        const BayesNet back = parse_net_text(text).to_net();
        CHECK(back.dag() == bn.dag());
        CHECK(max_deviation(joint(back), joint(bn)).first < 1e-12);
        // serialization is a fixed point
        CHECK(format_net(to_net_file(back)) == text);
    }
}
