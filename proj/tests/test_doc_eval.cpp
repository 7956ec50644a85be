#include <doctest.h>

#include <cmath>

#include "entsig/doc_eval.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace entsig;
using testutil::Instance;
using testutil::one_query_run;

TEST_CASE("build_eval_pool selects entity-reachable docs under conditional mode") {
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3", "d4"});
    inst.judge("q1", "d1", 1);
    inst.link("d1", {"e"}).link("d3", {"e"});
    auto index = inst.index();
    auto run = one_query_run("q1", {"e"});
    EvalConfig cfg;
    cfg.mode = EvalMode::conditional;
    cfg.k_entities = 1;
    auto pool = build_eval_pool(index, &run, "q1", cfg);
    CHECK(pool == std::set<std::string>{"d1", "d3"});

    cfg.mode = EvalMode::open_world;
    CHECK(build_eval_pool(index, &run, "q1", cfg).size() == 4);
}

TEST_CASE("conditional pool equals the full pool when every doc is reachable") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"});
    inst.judge("q1", "d1", 1);
    inst.link("d1", {"e"}).link("d2", {"e"});
    auto index = inst.index();
    auto run = one_query_run("q1", {"e"});
    EvalConfig cond;
    cond.mode = EvalMode::conditional;
    EvalConfig open;
    open.mode = EvalMode::open_world;
    CHECK(build_eval_pool(index, &run, "q1", cond) == build_eval_pool(index, &run, "q1", open));
}

TEST_CASE("AP follows the restricted-denominator definition") {
    Instance inst;
    inst.pool("q1", {"a", "b", "c"});
    inst.judge("q1", "a", 1).judge("q1", "b", 0).judge("q1", "c", 1);
    auto index = inst.index();
    // ranking [rel, nonrel, rel]
    Run run;
    run["q1"] = {{"a", 1, 3.0, "t"}, {"b", 2, 2.0, "t"}, {"c", 3, 1.0, "t"}};
    auto report = evaluate_run(run, index, EvalConfig{});
    REQUIRE(report.rows.size() == 1);
    CHECK(*report.rows[0].ap == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
}

TEST_CASE("perfect ranking scores 1.0 on AP and nDCG") {
    Instance inst;
    inst.pool("q1", {"a", "b", "c", "d"});
    inst.judge("q1", "a", 2).judge("q1", "b", 1).judge("q1", "c", 0).judge("q1", "d", 0);
    auto index = inst.index();
    Run run;
    run["q1"] = {{"a", 1, 4.0, "t"}, {"b", 2, 3.0, "t"}, {"c", 3, 2.0, "t"}, {"d", 4, 1.0, "t"}};
    auto report = evaluate_run(run, index, EvalConfig{});
    CHECK(*report.map == doctest::Approx(1.0));
    CHECK(*report.mean_ndcg == doctest::Approx(1.0));
}

TEST_CASE("P@20 keeps its fixed denominator on small pools") {
    Instance inst;
    std::vector<std::string> docs;
    for (int i = 0; i < 8; ++i)
        docs.push_back("d" + std::to_string(i));
    inst.pool("q1", docs);
    for (int i = 0; i < 3; ++i)
        inst.judge("q1", docs[i], 1);
    for (int i = 3; i < 8; ++i)
        inst.judge("q1", docs[i], 0);
    auto index = inst.index();
    Run run;
    for (int i = 0; i < 8; ++i)
        run["q1"].push_back({docs[i], i + 1, static_cast<double>(8 - i), "t"});
    auto report = evaluate_run(run, index, EvalConfig{});
    CHECK(*report.rows[0].precision == doctest::Approx(0.15)); // 3 / 20
}

TEST_CASE("nDCG gain function is configurable") {
    Instance inst;
    inst.pool("q1", {"a", "b"});
    inst.judge("q1", "a", 1).judge("q1", "b", 2);
    auto index = inst.index();
    Run run; // grade-1 doc ranked above grade-2 doc
    run["q1"] = {{"a", 1, 2.0, "t"}, {"b", 2, 1.0, "t"}};
    EvalConfig linear;
    auto r1 = evaluate_run(run, index, linear);
    double expected_linear = (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0));
    CHECK(*r1.rows[0].ndcg == doctest::Approx(expected_linear));
    EvalConfig exp;
    exp.exp_gain = true;
    auto r2 = evaluate_run(run, index, exp);
    double expected_exp = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
    CHECK(*r2.rows[0].ndcg == doctest::Approx(expected_exp));
}

TEST_CASE("input score ties break by doc id descending") {
    Instance inst;
    inst.pool("q1", {"dA", "dB"});
    inst.judge("q1", "dA", 0).judge("q1", "dB", 1);
    auto index = inst.index();
    Run run;
    run["q1"] = {{"dA", 1, 1.0, "t"}, {"dB", 2, 1.0, "t"}};
    auto report = evaluate_run(run, index, EvalConfig{});
    CHECK(*report.rows[0].ap == doctest::Approx(1.0)); // dB sorts first
}

TEST_CASE("degenerate queries get null metrics and are counted") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"});
    inst.judge("q1", "d1", 1);
    inst.link("d1", {"x"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"d1", 1, 2.0, "t"}, {"d2", 2, 1.0, "t"}};
    auto run = one_query_run("q1", {"unlinked"});
    EvalConfig cfg;
    cfg.mode = EvalMode::conditional;
    auto report = evaluate_run(doc_run, index, cfg, &run);
    CHECK(report.degenerate_queries == 1);
    CHECK_FALSE(report.rows[0].ap.has_value());
    CHECK_FALSE(report.map.has_value());
}

TEST_CASE("saturation identity: full reachability equalizes the two modes") {
    for (std::uint64_t seed = 800; seed < 810; ++seed) {
        auto r = testutil::random_instance(seed, 2, 12, 5);
        // force reachability: every doc links a shared entity
        for (const auto& [qid, docs] : r.inst.pools.by_query())
            for (const auto& d : docs)
                r.inst.links.add(d.doc_id, "omni", 0.9, 1);
        for (auto& [qid, entries] : r.entity_run)
            entries.insert(entries.begin(), RunEntry{"omni", 0, 1e9, "er"});
        auto index = r.inst.index();
        EvalConfig cond;
        cond.mode = EvalMode::conditional;
        EvalConfig open;
        open.mode = EvalMode::open_world;
        auto a = evaluate_run(r.doc_run, index, cond, &r.entity_run);
        auto b = evaluate_run(r.doc_run, index, open, &r.entity_run);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].ap == b.rows[i].ap);
            CHECK(a.rows[i].ndcg == b.rows[i].ndcg);
            CHECK(a.rows[i].precision == b.rows[i].precision);
            CHECK(a.rows[i].recall == b.rows[i].recall);
            CHECK(a.rows[i].pool_size == b.rows[i].pool_size);
        }
        CHECK(a.map == b.map);
    }
}

TEST_CASE("conditional metrics ignore judgments outside the conditional pool") {
    Instance inst;
    inst.pool("q1", {"in1", "in2", "out1", "out2"});
    inst.judge("q1", "in1", 1).judge("q1", "in2", 0);
    inst.judge("q1", "out1", 1).judge("q1", "out2", 0);
    inst.link("in1", {"e"}).link("in2", {"e"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"in1", 1, 4.0, "t"},
                     {"out1", 2, 3.0, "t"},
                     {"in2", 3, 2.0, "t"},
                     {"out2", 4, 1.0, "t"}};
    auto run = one_query_run("q1", {"e"});
    EvalConfig cfg;
    cfg.mode = EvalMode::conditional;
    auto before = evaluate_run(doc_run, index, cfg, &run);

    // flip the labels of the out-of-pool docs
    Instance flipped = inst;
    flipped.qrels = Qrels{};
    flipped.judge("q1", "in1", 1).judge("q1", "in2", 0);
    flipped.judge("q1", "out1", 0).judge("q1", "out2", 1);
    auto index2 = flipped.index();
    auto after = evaluate_run(doc_run, index2, cfg, &run);
    CHECK(*before.rows[0].ap == *after.rows[0].ap);
    CHECK(*before.rows[0].ndcg == *after.rows[0].ndcg);
    CHECK(before.rows[0].dropped_docs == 2);
}

TEST_CASE("doc metrics match the brute-force oracle on random instances") {
    for (std::uint64_t seed = 820; seed < 860; ++seed) {
        auto r = testutil::random_instance(seed);
        auto index = r.inst.index();
        for (auto mode : {EvalMode::open_world, EvalMode::conditional}) {
            EvalConfig cfg;
            cfg.mode = mode;
            cfg.k_entities = 3;
            auto report = evaluate_run(r.doc_run, index, cfg, &r.entity_run);
            for (const auto& row : report.rows) {
                auto pool = build_eval_pool(index, &r.entity_run, row.query_id, cfg);
                auto o = oracle::doc_metrics(r.inst.qrels, row.query_id,
                                             r.doc_run.at(row.query_id), pool, cfg.ndcg_k,
                                             cfg.precision_k, cfg.recall_k);
                CHECK(row.ap.has_value() == o.ap.has_value());
                if (row.ap) {
                    CHECK(*row.ap == doctest::Approx(*o.ap).epsilon(1e-12));
                    CHECK(*row.ndcg == doctest::Approx(*o.ndcg).epsilon(1e-12));
                    CHECK(*row.precision == doctest::Approx(*o.precision).epsilon(1e-12));
                    CHECK(*row.recall == doctest::Approx(*o.recall).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("interpolation at lambda 0 reproduces the input ordering") {
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3"});
    inst.judge("q1", "d1", 1);
    inst.link("d2", {"e"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"d1", 1, 3.0, "t"}, {"d2", 2, 2.0, "t"}, {"d3", 3, 1.0, "t"}};
    auto er = one_query_run("q1", {"e"});
    auto out = interpolate_rerank(index, doc_run, er, 0.0, 1);
    REQUIRE(out["q1"].size() == 3);
    CHECK(out["q1"][0].id == "d1");
    CHECK(out["q1"][1].id == "d2");
    CHECK(out["q1"][2].id == "d3");
}

TEST_CASE("interpolation at lambda 1 ranks entity-bearing docs first") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"});
    inst.judge("q1", "d1", 1);
    inst.link("d2", {"e"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"d1", 1, 9.0, "t"}, {"d2", 2, 1.0, "t"}};
    auto er = one_query_run("q1", {"e"});
    auto out = interpolate_rerank(index, doc_run, er, 1.0, 1);
    CHECK(out["q1"][0].id == "d2");
}

TEST_CASE("interpolation hand example at lambda 0.5") {
    // norm doc scores: d1=1, d2=.5, d3=0; only d3 carries the single top
    // entity (degenerate entity norm -> 0.5). Final: d1=.5, d2=.25, d3=.25,
    // tie broken by id descending.
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3"});
    inst.judge("q1", "d1", 1);
    inst.link("d3", {"e"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"d1", 1, 3.0, "t"}, {"d2", 2, 2.0, "t"}, {"d3", 3, 1.0, "t"}};
    auto er = one_query_run("q1", {"e"});
    auto out = interpolate_rerank(index, doc_run, er, 0.5, 1);
    REQUIRE(out["q1"].size() == 3);
    CHECK(out["q1"][0].id == "d1");
    CHECK(out["q1"][0].score == doctest::Approx(0.5));
    CHECK(out["q1"][1].id == "d3"); // 0.25 tie, id desc
    CHECK(out["q1"][2].id == "d2");
    CHECK(out["q1"][1].score == doctest::Approx(0.25));
}

TEST_CASE("degenerate doc score ranges normalize to one half") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"});
    inst.judge("q1", "d1", 1);
    inst.link("d1", {"e"});
    auto index = inst.index();
    Run doc_run;
    doc_run["q1"] = {{"d1", 1, 5.0, "t"}, {"d2", 2, 5.0, "t"}};
    auto er = one_query_run("q1", {"e"});
    auto out = interpolate_rerank(index, doc_run, er, 0.5, 1);
    CHECK(out["q1"][0].id == "d1"); // 0.25 + 0.25 vs 0.25
    CHECK(out["q1"][0].score == doctest::Approx(0.5));
    CHECK(out["q1"][1].score == doctest::Approx(0.25));
}
