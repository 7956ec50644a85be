#include <doctest.h>

#include <cmath>
#include <random>

#include "entsig/coverage.hpp"
#include "entsig/oer.hpp"
#include "test_helpers.hpp"

using namespace entsig;
using testutil::Instance;
using testutil::one_query_run;

TEST_CASE("oer_score worked examples at alpha=1, tau_support=3") {
    OerConfig cfg; // defaults: alpha 1, tau 3
    SUBCASE("strong positive signal") {
        auto s = oer_score(3, 0, 3, 5, 10, cfg);
        CHECK(s.log_odds_diff == doctest::Approx(2.6856).epsilon(5e-5));
        CHECK(s.support_w == doctest::Approx(0.6321).epsilon(5e-5));
        CHECK(s.oer == doctest::Approx(1.6976).epsilon(5e-5));
    }
    SUBCASE("near-uniform entity") {
        auto s = oer_score(2, 4, 6, 5, 10, cfg);
        CHECK(s.oer == doctest::Approx(0.0422).epsilon(2e-3));
    }
    SUBCASE("anti-signal") {
        auto s = oer_score(0, 6, 6, 5, 10, cfg);
        CHECK(s.oer == doctest::Approx(-1.8402).epsilon(5e-5));
    }
}

TEST_CASE("oer components satisfy their algebra") {
    OerConfig cfg;
    auto s = oer_score(3, 1, 5, 8, 12, cfg);
    CHECK(s.p_rel_hat == doctest::Approx((3 + 1.0) / (8 + 2.0)));
    CHECK(s.p_nonrel_hat == doctest::Approx((1 + 1.0) / (12 + 2.0)));
    CHECK(s.oer == s.support_w * s.log_odds_diff); // exact by construction
    CHECK(s.p_rel_hat > 0.0);
    CHECK(s.p_rel_hat < 1.0);
}

TEST_CASE("swapping rel and nonrel negates the log-odds difference exactly") {
    OerConfig cfg;
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        int num_rel = 1 + static_cast<int>(rng() % 40);
        int num_nonrel = 1 + static_cast<int>(rng() % 40);
        int df_rel = static_cast<int>(rng() % (num_rel + 1));
        int df_nonrel = static_cast<int>(rng() % (num_nonrel + 1));
        int df_cand = df_rel + df_nonrel + static_cast<int>(rng() % 5);
        if (df_cand == 0)
            df_cand = 1;
        auto a = oer_score(df_rel, df_nonrel, df_cand, num_rel, num_nonrel, cfg);
        auto b = oer_score(df_nonrel, df_rel, df_cand, num_nonrel, num_rel, cfg);
        CHECK(a.log_odds_diff == -b.log_odds_diff);
    }
}

TEST_CASE("support weight is strictly increasing in df_cand and bounded") {
    OerConfig cfg;
    double prev = 0.0;
    for (int df = 1; df <= 60; ++df) {
        auto s = oer_score(0, 0, df, 5, 5, cfg);
        CHECK(s.support_w > prev);
        CHECK(s.support_w > 0.0);
        CHECK(s.support_w < 1.0);
        prev = s.support_w;
    }
}

TEST_CASE("log-odds sign matches raw rate difference as alpha vanishes") {
    OerConfig cfg;
    cfg.alpha = 1e-9;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        int num_rel = 2 + static_cast<int>(rng() % 10);
        int num_nonrel = 2 + static_cast<int>(rng() % 10);
        int df_rel = static_cast<int>(rng() % (num_rel + 1));
        int df_nonrel = static_cast<int>(rng() % (num_nonrel + 1));
        double raw = static_cast<double>(df_rel) / num_rel -
                     static_cast<double>(df_nonrel) / num_nonrel;
        if (raw == 0.0)
            continue;
        auto s = oer_score(df_rel, df_nonrel, std::max(1, df_rel + df_nonrel), num_rel,
                           num_nonrel, cfg);
        CHECK(std::signbit(s.log_odds_diff) == std::signbit(raw));
    }
}

TEST_CASE("classify_mode follows the taxonomy precedence") {
    OerConfig cfg;
    CHECK(classify_mode(0, 1, 1, 5.0, cfg) == SignalMode::sparse); // sparse wins regardless
    CHECK(classify_mode(1, 1, 2, -3.0, cfg) == SignalMode::sparse);
    CHECK(classify_mode(3, 1, 5, 0.9, cfg) == SignalMode::core);
    CHECK(classify_mode(5, 55, 60, -0.1, cfg) == SignalMode::bait);
    CHECK(classify_mode(1, 4, 5, -0.2, cfg) == SignalMode::anti);
    CHECK(classify_mode(1, 2, 4, 0.3, cfg) == SignalMode::conditional);
    // oer <= 0 without bait support or strict nonrel majority
    CHECK(classify_mode(2, 2, 4, 0.0, cfg) == SignalMode::anti);        // df_nonrel >= df_rel
    CHECK(classify_mode(3, 2, 6, -0.01, cfg) == SignalMode::conditional); // df_rel majority
    // core must clear every bar
    CHECK(classify_mode(1, 0, 4, 2.0, cfg) == SignalMode::conditional); // df_rel < 2
    CHECK(classify_mode(3, 3, 7, 0.8, cfg) == SignalMode::conditional); // not a rel majority
    CHECK(classify_mode(3, 1, 5, 0.4, cfg) == SignalMode::conditional); // oer below 0.5
}

TEST_CASE("every (query, entity) pair receives exactly one mode") {
    for (std::uint64_t seed = 400; seed < 420; ++seed) {
        auto r = testutil::random_instance(seed);
        auto index = r.inst.index();
        auto table = build_oer_table(index, OerConfig{});
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& row : table.rows())
            CHECK(seen.emplace(row.query_id, row.entity_id).second);
        // table covers every stats pair of non-skipped queries
        std::size_t expected = 0;
        for (const auto& [qid, qi] : index.queries()) {
            bool skipped = qi.relevant.empty() || qi.judged_nonrel.empty();
            if (!skipped)
                expected += qi.entity_stats.size();
        }
        CHECK(table.rows().size() == expected);
    }
}

TEST_CASE("run_rates counts bait, signal, and sparse slots") {
    // Hand-built table: 1 core, 1 conditional, 1 bait, 1 anti.
    OerTable table;
    auto mk = [&](const char* q, const char* e, SignalMode m) {
        OerRow row;
        row.query_id = q;
        row.entity_id = e;
        row.mode = m;
        table.add(row);
    };
    mk("q1", "c", SignalMode::core);
    mk("q1", "d", SignalMode::conditional);
    mk("q1", "b", SignalMode::bait);
    mk("q2", "a", SignalMode::anti);
    mk("q2", "c", SignalMode::core);
    table.sort_rows();

    Run run;
    run["q1"] = {{"b", 1, 3.0, "t"}, {"c", 2, 2.0, "t"}, {"d", 3, 1.0, "t"}};
    run["q2"] = {{"c", 1, 2.0, "t"}, {"unknown", 2, 1.0, "t"}}; // missing -> sparse
    auto rates = run_rates(run, table, 20);
    CHECK(rates.slots == 5);
    CHECK(rates.bait_rate == doctest::Approx(1.0 / 5));
    CHECK(rates.signal_rate == doctest::Approx(3.0 / 5));
    CHECK(rates.sparse_rate == doctest::Approx(1.0 / 5));
    CHECK(rates.bait_rate + rates.signal_rate + rates.sparse_rate == doctest::Approx(1.0));
    CHECK(rates.top1_bait_rate == doctest::Approx(0.5)); // q1's rank-1 is bait

    CHECK_THROWS_AS(run_rates(Run{}, table, 20), DataError);
}

TEST_CASE("local_idf_rescale applies the pool IDF and re-sorts") {
    Instance inst;
    std::vector<std::string> docs;
    for (int i = 0; i < 1000; ++i)
        docs.push_back("d" + std::to_string(i));
    inst.pool("q1", docs);
    inst.judge("q1", "d0", 1);
    for (int i = 0; i < 99; ++i)
        inst.links.add(docs[i], "broad", 0.5, 1);
    auto index = inst.index();

    Run run;
    run["q1"] = {{"broad", 1, 0.5, "t"}, {"absent", 2, 0.4, "t"}};
    auto rescaled = local_idf_rescale(run, index);
    const auto& entries = rescaled["q1"];
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "broad");
    CHECK(entries[0].score == doctest::Approx(1.6518).epsilon(5e-5)); // 0.5 * 3.3036
    CHECK(entries[1].id == "absent");
    CHECK(entries[1].score == doctest::Approx(0.0));
}

TEST_CASE("local_idf_rescale preserves order among equal-df entities") {
    Instance inst;
    inst.pool("q1", {"d1", "d2", "d3"});
    inst.judge("q1", "d1", 1);
    inst.links.add("d1", "a", 0.5, 1);
    inst.links.add("d2", "b", 0.5, 1);
    auto index = inst.index();
    Run run;
    run["q1"] = {{"a", 1, 3.0, "t"}, {"b", 2, 1.0, "t"}};
    auto rescaled = local_idf_rescale(run, index);
    CHECK(rescaled["q1"][0].id == "a"); // same df_cand, higher input score stays ahead
    CHECK(rescaled["q1"][0].score > rescaled["q1"][1].score);
}

TEST_CASE("local idf is exactly 1 at full pool saturation") {
    Instance inst;
    inst.pool("q1", {"d1", "d2"});
    inst.judge("q1", "d1", 1);
    inst.links.add("d1", "e", 0.5, 1);
    inst.links.add("d2", "e", 0.5, 1);
    auto index = inst.index();
    Run run = one_query_run("q1", {"e"});
    run["q1"][0].score = 0.37;
    auto rescaled = local_idf_rescale(run, index);
    CHECK(rescaled["q1"][0].score == doctest::Approx(0.37)); // ln(3/3)+1 = 1
}

TEST_CASE("oer_filter keeps entities at or above the threshold") {
    OerTable table;
    auto mk = [&](const char* e, double oer) {
        OerRow row;
        row.query_id = "q1";
        row.entity_id = e;
        row.score.oer = oer;
        table.add(row);
    };
    mk("e1", 1.2);
    mk("e2", 0.3);
    mk("e3", -0.4);
    table.sort_rows();

    Run run;
    run["q1"] = {{"e1", 1, 3.0, "t"}, {"e2", 2, 2.0, "t"}, {"e3", 3, 1.0, "t"}};

    SUBCASE("minus infinity is the identity") {
        auto r = oer_filter(run, table, -std::numeric_limits<double>::infinity());
        CHECK(r.run["q1"].size() == 3);
    }
    SUBCASE("threshold 0 removes negative entities") {
        auto r = oer_filter(run, table, 0.0);
        REQUIRE(r.run["q1"].size() == 2);
        CHECK(r.run["q1"][1].id == "e2");
    }
    SUBCASE("threshold 0.5 keeps only e1 at rank 1") {
        auto r = oer_filter(run, table, 0.5);
        REQUIRE(r.run["q1"].size() == 1);
        CHECK(r.run["q1"][0].id == "e1");
        CHECK(r.run["q1"][0].rank == 1);
    }
    SUBCASE("entities missing from the table are removed") {
        Run extra = run;
        extra["q1"].push_back({"ghost", 4, 0.5, "t"});
        auto r = oer_filter(extra, table, -100.0);
        CHECK(r.run["q1"].size() == 3);
    }
    SUBCASE("queries losing every entity are recorded") {
        auto r = oer_filter(run, table, 99.0);
        CHECK(r.run["q1"].empty());
        CHECK(r.emptied_queries == std::vector<std::string>{"q1"});
    }
}

TEST_CASE("filtering is nested in the threshold and coverage is anti-monotone") {
    for (std::uint64_t seed = 500; seed < 515; ++seed) {
        auto r = testutil::random_instance(seed, 2, 14, 8);
        auto index = r.inst.index();
        auto table = build_oer_table(index, OerConfig{});
        auto f0 = oer_filter(r.entity_run, table, 0.0);
        auto f1 = oer_filter(r.entity_run, table, 0.8);
        for (const auto& [qid, entries] : f1.run) {
            std::set<std::string> low;
            for (const auto& e : f0.run[qid])
                low.insert(e.id);
            for (const auto& e : entries)
                CHECK(low.count(e.id) == 1); // tau2 >= tau1 keeps a subset
        }
        // runs here are <= 10 entities, so a k=20 prefix sees whole runs and
        // removing entities can only lose coverage
        for (const auto& [qid, qi] : index.queries()) {
            if (qi.relevant.empty())
                continue;
            double before = rel_cov(index, r.entity_run, qid, 20);
            double after = rel_cov(index, f0.run, qid, 20);
            double strict = rel_cov(index, f1.run, qid, 20);
            CHECK(after <= before + 1e-12);
            CHECK(strict <= after + 1e-12);
        }
    }
}
