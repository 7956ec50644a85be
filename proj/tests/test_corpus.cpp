#include <doctest.h>

#include "entsig/corpus.hpp"
#include "test_helpers.hpp"

using namespace entsig;
using testutil::Instance;

TEST_CASE("build_index counts df statistics from judgments") {
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3"})
        .judge("q1", "d1", 1)
        .judge("q1", "d2", 0)
        .link("d1", {"e"})
        .link("d2", {"e"})
        .link("d3", {"e"});
    auto index = inst.index();
    const auto& st = index.query("q1").entity_stats.at("e");
    CHECK(st.df_rel == 1);
    CHECK(st.df_nonrel == 1);
    CHECK(st.df_cand == 3);
    CHECK(st.ranks == std::vector<int>{1, 2, 3});
}

TEST_CASE("empty entity channel still builds a valid index") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"}).judge("q1", "d1", 1);
    auto index = inst.index();
    CHECK(index.query("q1").entity_stats.empty());
    CHECK(index.recount_matches());
}

TEST_CASE("grade 2 documents are relevant") {
    Instance inst;
    inst.pool("q1", {"d1"}).judge("q1", "d1", 2).link("d1", {"e"});
    auto index = inst.index();
    CHECK(index.query("q1").relevant.count("d1") == 1);
    CHECK(index.query("q1").entity_stats.at("e").df_rel == 1);
}

TEST_CASE("entity_presence intersects document links with the given set") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"}).judge("q1", "d1", 1);
    inst.link("d1", {"a", "b"});
    auto index = inst.index();
    CHECK(index.entity_presence("q1", "d1", {"b", "c"}));
    CHECK_FALSE(index.entity_presence("q1", "d2", {"a", "b"})); // no links
    CHECK_FALSE(index.entity_presence("q1", "d1", {}));
    CHECK_THROWS_AS(index.entity_presence("q1", "nope", {"a"}), DataError);
}

TEST_CASE("duplicate pool doc is rejected") {
    Instance inst;
    inst.judge("q1", "d1", 1);
    std::vector<PooledDoc> docs{{"d1", 1, 2.0}, {"d1", 2, 1.0}};
    inst.links.add_empty_doc("d1");
    inst.pools.set("q1", docs);
    CHECK_THROWS_AS(inst.index(), DataError);
}

TEST_CASE("pool doc missing from links needs the lenient flag") {
    Instance inst;
    inst.judge("q1", "d1", 1);
    inst.pools.set("q1", {{"d1", 1, 1.0}});
    CHECK_THROWS_AS(inst.index(), DataError);
    IndexOptions opts;
    opts.lenient_missing_docs = true;
    auto index = inst.index(opts);
    CHECK(index.doc_entities("d1").empty());
}

TEST_CASE("query without qrels is kept with a warning") {
    Instance inst;
    inst.pool("q1", {"d1"});
    auto index = inst.index();
    CHECK(index.has_query("q1"));
    CHECK(index.query("q1").relevant.empty());
    CHECK(index.query("q1").judged_nonrel.empty());
    CHECK(!index.warnings().empty());
}

TEST_CASE("empty pools are dropped with a record") {
    Instance inst;
    inst.pool("q1", {"d1"}).judge("q1", "d1", 1);
    inst.pools.set("q2", {});
    auto index = inst.index();
    CHECK_FALSE(index.has_query("q2"));
    CHECK(index.dropped_queries() == std::vector<std::string>{"q2"});
}

TEST_CASE("rho outside [0,1] is rejected at link ingestion") {
    EntityLinks links;
    CHECK_THROWS_AS(links.add("d1", "e", 1.2, 1), DataError);
    CHECK_THROWS_AS(links.add("d1", "e", -0.1, 1), DataError);
}

TEST_CASE("rho aggregates by max and mentions sum per (doc, entity)") {
    EntityLinks links;
    links.add("d1", "e", 0.4, 2);
    links.add("d1", "e", 0.7, 3);
    const auto& ents = *links.find("d1");
    REQUIRE(ents.size() == 1);
    CHECK(ents[0].rho == doctest::Approx(0.7));
    CHECK(ents[0].mentions == 5);
}

TEST_CASE("rho threshold filters links before indexing") {
    Instance inst;
    inst.pool("q1", {"d1"}).judge("q1", "d1", 1);
    inst.links.add("d1", "lo", 0.2, 1);
    inst.links.add("d1", "hi", 0.9, 1);
    IndexOptions opts;
    opts.rho_threshold = 0.5;
    auto index = inst.index(opts);
    CHECK(index.query("q1").entity_stats.count("hi") == 1);
    CHECK(index.query("q1").entity_stats.count("lo") == 0);
}

TEST_CASE("df bounds and judged partition hold on random instances") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto r = testutil::random_instance(seed);
        auto index = r.inst.index();
        for (const auto& [qid, qi] : index.queries()) {
            for (const auto& [e, st] : qi.entity_stats) {
                CHECK(st.df_rel + st.df_nonrel <= st.df_cand);
                CHECK(st.df_cand <= static_cast<int>(qi.pool.size()));
            }
            for (const auto& d : qi.relevant)
                CHECK(qi.judged_nonrel.count(d) == 0);
            std::size_t judged = 0;
            for (const auto& doc : qi.pool)
                if (index.qrels().grade(qid, doc.doc_id))
                    ++judged;
            CHECK(judged == qi.relevant.size() + qi.judged_nonrel.size());
        }
        CHECK(index.recount_matches());
    }
}
