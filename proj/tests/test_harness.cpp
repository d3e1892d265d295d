#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "docalc/harness.hpp"

using namespace docalc;

namespace {

std::string golden_path(const std::string& name) {
    return std::string(DOCALC_GOLDEN_DIR) + "/" + name;
}

// Compares against the checked-in report; writes it when absent or when
// DOCALC_REGEN_GOLDEN is set, so intentional format changes are a re-run away.
void check_golden(const std::string& name, const std::string& actual) {
    const std::string path = golden_path(name);
    std::ifstream in(path);
    if (!in || std::getenv("DOCALC_REGEN_GOLDEN")) {
        std::ofstream out(path);
        REQUIRE(out.good());
        out << actual;
        WARN("golden file regenerated: " << path);
        return;
    }
    std::ostringstream want;
    want << in.rdbuf();
    CHECK(actual == want.str());
}

}  // namespace

TEST_CASE("rng determinism and range") {
    Rng a(12345), b(12345);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
    Rng r(7);
    for (int k = 0; k < 1000; ++k) {
        const double u = r.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int x = r.int_in(-3, 5);
        CHECK(x >= -3);
        CHECK(x <= 5);
    }
    CHECK(split_seed(1, 2) == split_seed(1, 2));
    CHECK(split_seed(1, 2) != split_seed(1, 3));
    CHECK(split_seed(1, 2) != split_seed(2, 2));
}

TEST_CASE("gen_dag") {
    GenConfig cfg;
    cfg.node_count = 6;

    SECTION("deterministic per seed") {
        Rng r1(99), r2(99);
        CHECK(gen_dag(cfg, r1) == gen_dag(cfg, r2));
    }

    SECTION("edge probability extremes") {
        cfg.edge_prob = 0.0;
        Rng r(1);
        CHECK(gen_dag(cfg, r).edge_count() == 0);
        cfg.edge_prob = 1.0;
        Rng r2(1);
        const Dag full = gen_dag(cfg, r2);
        CHECK(full.edge_count() == 15);  // 6 choose 2: a full tournament DAG
        CHECK(full.topological_order().size() == 6);
    }

    SECTION("rejects bad configs") {
        GenConfig bad = cfg;
        bad.edge_prob = 1.5;
        Rng r(1);
        CHECK_THROWS(gen_dag(bad, r));
        bad = cfg;
        bad.node_count = 0;
        CHECK_THROWS(gen_dag(bad, r));
    }
}

TEST_CASE("gen_cpts") {
    GenConfig cfg;
    cfg.node_count = 5;
    cfg.edge_prob = 0.6;
    cfg.max_cardinality = 4;
    for (int t = 0; t < 10; ++t) {
        Rng rng(split_seed(5, static_cast<std::uint64_t>(t)));
        const Dag g = gen_dag(cfg, rng);
        const BayesNet bn = gen_cpts(g, cfg, rng);
        for (const auto& n : g.nodes()) {
            const Cpt& c = bn.cpt(n);
            CHECK(bn.card(n) >= 2);
            CHECK(bn.card(n) <= 4);
            const std::size_t rows = c.row_count();
            for (std::size_t r = 0; r < rows; ++r) {
                double s = 0.0;
                for (int v = 0; v < c.owner_card; ++v) {
                    const double p = c.table[r * static_cast<std::size_t>(c.owner_card) +
                                             static_cast<std::size_t>(v)];
                    CHECK(p >= 0.01);
                    s += p;
                }
                CHECK(s == Catch::Approx(1.0).margin(1e-9));
            }
        }
    }
    // deterministic per seed
    Rng r1(88), r2(88);
    const Dag g1 = gen_dag(cfg, r1), g2 = gen_dag(cfg, r2);
    CHECK(max_deviation(joint(gen_cpts(g1, cfg, r1)), joint(gen_cpts(g2, cfg, r2))).first == 0.0);
}

TEST_CASE("random_partition keeps the required categories nonempty") {
    GenConfig cfg;
    cfg.node_count = 5;
    cfg.edge_prob = 0.4;
    for (int t = 0; t < 500; ++t) {
        Rng rng(split_seed(3, static_cast<std::uint64_t>(t)));
        const Dag g = gen_dag(cfg, rng);
        const auto part = detail::random_partition(g, rng, 4, 2);
        CHECK_FALSE(part[0].empty());
        CHECK_FALSE(part[1].empty());
        std::size_t total = 0;
        for (const auto& s : part) total += s.size();
        CHECK(total <= g.size());
    }
}

TEST_CASE("fuzz_dsep report") {
    GenConfig cfg;
    cfg.node_count = 5;
    cfg.edge_prob = 0.4;
    cfg.max_cardinality = 3;
    cfg.seed = 42;
    cfg.trials = 60;

    const FuzzReport rep = fuzz_dsep(cfg);
    CHECK(rep.pass);
    CHECK(rep.sep_not_ci == 0);
    CHECK(rep.sep_ci + rep.sep_not_ci + rep.notsep_ci + rep.notsep_not_ci == cfg.trials);
    CHECK(rep.sep_ci > 0);
    CHECK(rep.notsep_not_ci > 0);

    // byte-identical on re-run
    const std::string j1 = rep.to_json().dump(2);
    const std::string j2 = fuzz_dsep(cfg).to_json().dump(2);
    CHECK(j1 == j2);
    check_golden("dsep_seed42.json", j1 + "\n");
}

TEST_CASE("fuzz_rules report") {
    GenConfig cfg;
    cfg.node_count = 5;
    cfg.edge_prob = 0.4;
    cfg.max_cardinality = 2;
    cfg.seed = 42;
    cfg.trials = 40;

    const FuzzReport rep = fuzz_rules(cfg);
    CHECK(rep.pass);
    for (int r = 0; r < 3; ++r) {
        CHECK(rep.rule[r].equality_failed == 0);
        CHECK(rep.rule[r].applicable + rep.rule[r].not_applicable == cfg.trials);
    }
    CHECK(rep.rule2_childless_mismatches == 0);
    CHECK(rep.rule[0].applicable + rep.rule[1].applicable + rep.rule[2].applicable > 0);

    const std::string j1 = rep.to_json().dump(2);
    const std::string j2 = fuzz_rules(cfg).to_json().dump(2);
    CHECK(j1 == j2);
    check_golden("rules_seed42.json", j1 + "\n");
}
