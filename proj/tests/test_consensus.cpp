#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entsig/consensus.hpp"
#include "test_helpers.hpp"

using namespace entsig;
using testutil::Instance;

namespace {

// K=10 pool; entity e in ranks {1,3} with rho {0.8, 0.5}; filler entity f
// keeps other docs non-empty without affecting e.
Instance worked_fixture() {
    Instance inst;
    std::vector<std::string> docs;
    for (int i = 1; i <= 10; ++i)
        docs.push_back("d" + std::to_string(i));
    inst.pool("q1", docs);
    inst.judge("q1", "d1", 1);
    inst.links.add("d1", "e", 0.8, 1);
    inst.links.add("d3", "e", 0.5, 1);
    inst.links.add("d2", "f", 0.9, 1);
    inst.links.add("d4", "f", 0.9, 1);
    return inst;
}

} // namespace

TEST_CASE("consensus worked examples at K=10") {
    auto index = worked_fixture().index();
    ConsensusConfig cfg;
    SUBCASE("rho variant") {
        cfg.variant = ConsensusVariant::rho;
        auto entries = consensus_rank(index, "q1", cfg);
        REQUIRE(!entries.empty());
        const auto* e = &entries[0];
        if (e->id != "e")
            e = &entries[1];
        REQUIRE(e->id == "e");
        CHECK(e->score == doctest::Approx(2.9891).epsilon(5e-5)); // 1.3 * 2.2993
    }
    SUBCASE("rank variant") {
        cfg.variant = ConsensusVariant::rank;
        auto entries = consensus_rank(index, "q1", cfg);
        const auto* e = &entries[0];
        if (e->id != "e")
            e = &entries[1];
        REQUIRE(e->id == "e");
        CHECK(e->score == doctest::Approx(3.4489).epsilon(5e-5)); // 1.5 * 2.2993
    }
    SUBCASE("rho_rank soft support is the product sum") {
        cfg.variant = ConsensusVariant::rho_rank;
        auto entries = consensus_rank(index, "q1", cfg);
        const auto* e = &entries[0];
        if (e->id != "e")
            e = &entries[1];
        REQUIRE(e->id == "e");
        double soft = 0.8 / std::log2(2.0) + 0.5 / std::log2(4.0);
        double idf = std::log(11.0 / 3.0) + 1.0;
        CHECK(e->score == doctest::Approx(soft * idf));
    }
}

TEST_CASE("the consensus gate removes singleton entities") {
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3"});
    inst.judge("q1", "d1", 1);
    inst.links.add("d1", "lone", 0.9, 1);
    inst.links.add("d1", "pair", 0.9, 1);
    inst.links.add("d2", "pair", 0.9, 1);
    auto index = inst.index();
    auto entries = consensus_rank(index, "q1", ConsensusConfig{});
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].id == "pair");

    // raising the gate empties the run and the record notes it
    ConsensusConfig strict;
    strict.gate_min_df = 3;
    auto result = consensus_run(index, strict);
    CHECK(result.run["q1"].empty());
    CHECK(result.empty_queries == std::vector<std::string>{"q1"});
}

TEST_CASE("pseudo-IDF decreases the score as df_cand grows at fixed soft support") {
    // a: 2 docs at rho .5 each (soft 1.0); b: 4 docs at rho .25 (soft 1.0)
    Instance inst;
    std::vector<std::string> docs;
    for (int i = 1; i <= 8; ++i)
        docs.push_back("d" + std::to_string(i));
    inst.pool("q1", docs);
    inst.judge("q1", "d1", 1);
    inst.links.add("d1", "a", 0.5, 1);
    inst.links.add("d2", "a", 0.5, 1);
    for (int i = 3; i <= 6; ++i)
        inst.links.add(docs[i - 1], "b", 0.25, 1);
    auto index = inst.index();
    ConsensusConfig cfg;
    cfg.variant = ConsensusVariant::rho;
    auto entries = consensus_rank(index, "q1", cfg);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "a");
    CHECK(entries[0].score > entries[1].score);
}

TEST_CASE("rho_rank soft support never exceeds rho soft support") {
    for (std::uint64_t seed = 700; seed < 715; ++seed) {
        auto r = testutil::random_instance(seed, 2, 16, 8);
        auto index = r.inst.index();
        ConsensusConfig rho_cfg, both_cfg;
        rho_cfg.variant = ConsensusVariant::rho;
        both_cfg.variant = ConsensusVariant::rho_rank;
        rho_cfg.k_out = both_cfg.k_out = 0; // keep everything
        for (const auto& [qid, qi] : index.queries()) {
            auto rho_entries = consensus_rank(index, qid, rho_cfg);
            auto both_entries = consensus_rank(index, qid, both_cfg);
            std::map<std::string, double> rho_scores;
            for (const auto& e : rho_entries)
                rho_scores[e.id] = e.score;
            for (const auto& e : both_entries)
                CHECK(e.score <= rho_scores.at(e.id) + 1e-12);
        }
    }
}

TEST_CASE("gated entities never appear and output is deterministic") {
    for (std::uint64_t seed = 720; seed < 730; ++seed) {
        auto r = testutil::random_instance(seed);
        auto index = r.inst.index();
        ConsensusConfig cfg;
        auto first = consensus_run(index, cfg);
        auto second = consensus_run(index, cfg);
        for (const auto& [qid, entries] : first.run) {
            const auto& qi = index.query(qid);
            for (const auto& e : entries)
                CHECK(qi.entity_stats.at(e.id).df_cand >= cfg.gate_min_df);
        }
        auto path_a = std::filesystem::temp_directory_path() / "entsig_cons_a.run";
        auto path_b = std::filesystem::temp_directory_path() / "entsig_cons_b.run";
        write_run(first.run, path_a.string());
        write_run(second.run, path_b.string());
        std::ifstream fa(path_a), fb(path_b);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
        std::filesystem::remove(path_a);
        std::filesystem::remove(path_b);
    }
}
