#include "entsig/doc_eval.hpp"

#include <algorithm>
#include <cmath>

#include "entsig/coverage.hpp"
#include "entsig/parallel.hpp"

namespace entsig {

const char* to_string(EvalMode mode) {
    return mode == EvalMode::conditional ? "conditional" : "open-world";
}

std::set<std::string> build_eval_pool(const CorpusIndex& index, const Run* entity_run,
                                      const std::string& query_id, const EvalConfig& cfg) {
    const auto& qi = index.query(query_id);
    std::set<std::string> pool;
    if (cfg.mode == EvalMode::open_world) {
        for (const auto& d : qi.pool)
            pool.insert(d.doc_id);
        return pool;
    }
    if (!entity_run)
        throw UsageError("conditional evaluation requires an entity run");
    auto it = entity_run->find(query_id);
    std::set<std::string> top =
        it == entity_run->end() ? std::set<std::string>{} : top_k_entities(it->second, cfg.k_entities);
    for (const auto& d : qi.pool) {
        bool hit = false;
        for (const auto& m : index.doc_entities(d.doc_id))
            if (top.count(m.entity_id)) {
                hit = true;
                break;
            }
        if (hit)
            pool.insert(d.doc_id);
    }
    return pool;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& v) {
    if (v.empty())
        return std::nullopt;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double ndcg_gain(int grade, const EvalConfig& cfg) {
    return cfg.exp_gain ? std::pow(2.0, grade) - 1.0 : static_cast<double>(grade);
}

QueryEval evaluate_query(const Run& doc_run, const CorpusIndex& index, const EvalConfig& cfg,
                         const Run* entity_run, const std::string& query_id) {
    const auto& qi = index.query(query_id);
    QueryEval qe;
    qe.query_id = query_id;

    std::set<std::string> pool = build_eval_pool(index, entity_run, query_id, cfg);
    qe.pool_size = static_cast<int>(pool.size());
    int relevant_total = static_cast<int>(qi.relevant.size());
    for (const auto& d : qi.relevant)
        if (pool.count(d))
            ++qe.relevant_in_pool;
    qe.excluded_relevant = relevant_total - qe.relevant_in_pool;

    if (pool.empty() || qe.relevant_in_pool == 0) {
        qe.degenerate = true;
        return qe;
    }

    // Restrict the submitted ranking to the eval pool, then apply the
    // trec_eval ordering: score descending, doc_id descending on ties.
    std::vector<RunEntry> ranked;
    const auto it = doc_run.find(query_id);
    if (it != doc_run.end()) {
        for (const auto& e : it->second) {
            if (pool.count(e.id))
                ranked.push_back(e);
            else
                ++qe.dropped_docs;
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id > b.id;
    });

    double ap_sum = 0.0;
    double dcg = 0.0;
    int rel_seen = 0;
    int rel_in_prec_k = 0;
    int rel_in_recall_k = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        int rank = static_cast<int>(i) + 1;
        auto grade = index.qrels().grade(query_id, ranked[i].id);
        bool rel = grade && *grade >= 1;
        if (rel) {
            ++rel_seen;
            ap_sum += static_cast<double>(rel_seen) / rank;
            if (rank <= cfg.precision_k)
                ++rel_in_prec_k;
            if (rank <= cfg.recall_k)
                ++rel_in_recall_k;
        }
        if (rank <= cfg.ndcg_k && grade && *grade > 0)
            dcg += ndcg_gain(*grade, cfg) / std::log2(rank + 1.0);
    }

    std::vector<int> ideal_grades;
    for (const auto& d : pool) {
        auto grade = index.qrels().grade(query_id, d);
        if (grade && *grade > 0)
            ideal_grades.push_back(*grade);
    }
    std::sort(ideal_grades.rbegin(), ideal_grades.rend());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal_grades.size() && i < static_cast<std::size_t>(cfg.ndcg_k);
         ++i)
        idcg += ndcg_gain(ideal_grades[i], cfg) / std::log2(static_cast<double>(i) + 2.0);

    qe.ap = ap_sum / qe.relevant_in_pool;
    qe.ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
    qe.precision = static_cast<double>(rel_in_prec_k) / cfg.precision_k;
    qe.recall = static_cast<double>(rel_in_recall_k) / qe.relevant_in_pool;
    return qe;
}

} // namespace

DocEvalReport evaluate_run(const Run& doc_run, const CorpusIndex& index, const EvalConfig& cfg,
                           const Run* entity_run) {
    if (cfg.mode == EvalMode::conditional && !entity_run)
        throw UsageError("conditional evaluation requires an entity run");
    DocEvalReport report;
    report.mode = cfg.mode;
    std::vector<const std::string*> qids;
    for (const auto& [query_id, entries] : doc_run)
        if (index.has_query(query_id))
            qids.push_back(&query_id);
    std::vector<QueryEval> slots(qids.size());
    parallel_for(qids.size(), [&](std::size_t i) {
        slots[i] = evaluate_query(doc_run, index, cfg, entity_run, *qids[i]);
    });
    std::vector<double> aps, ndcgs, precs, recalls;
    for (auto& qe : slots) {
        if (qe.degenerate) {
            ++report.degenerate_queries;
        } else {
            aps.push_back(*qe.ap);
            ndcgs.push_back(*qe.ndcg);
            precs.push_back(*qe.precision);
            recalls.push_back(*qe.recall);
            ++report.evaluated_queries;
        }
        report.rows.push_back(std::move(qe));
    }
    report.map = mean_of(aps);
    report.mean_ndcg = mean_of(ndcgs);
    report.mean_precision = mean_of(precs);
    report.mean_recall = mean_of(recalls);
    return report;
}

Report doc_eval_to_report(const DocEvalReport& report, const EvalConfig& cfg) {
    Report out({"qid", "mode", "map", "ndcg_at_" + std::to_string(cfg.ndcg_k),
                "p_at_" + std::to_string(cfg.precision_k),
                "recall_at_" + std::to_string(cfg.recall_k), "pool_size", "relevant_in_pool",
                "excluded_rel", "dropped_docs"});
    auto opt = [&out](const std::optional<double>& v) {
        if (v)
            out.add(*v);
        else
            out.add_missing();
    };
    for (const auto& qe : report.rows) {
        out.begin_row().add(qe.query_id).add(std::string(to_string(report.mode)));
        opt(qe.ap);
        opt(qe.ndcg);
        opt(qe.precision);
        opt(qe.recall);
        out.add(qe.pool_size).add(qe.relevant_in_pool).add(qe.excluded_relevant).add(
            qe.dropped_docs);
    }
    out.begin_row().add(std::string("all")).add(std::string(to_string(report.mode)));
    opt(report.map);
    opt(report.mean_ndcg);
    opt(report.mean_precision);
    opt(report.mean_recall);
    out.add(static_cast<long long>(report.evaluated_queries))
        .add(static_cast<long long>(report.degenerate_queries))
        .add_missing()
        .add_missing();
    return out;
}

namespace {

// Min-max to [0,1]; a degenerate range maps everything to 0.5.
std::vector<double> minmax_normalize(const std::vector<double>& values) {
    std::vector<double> out(values.size(), 0.5);
    if (values.empty())
        return out;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi == *lo)
        return out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = (values[i] - *lo) / (*hi - *lo);
    return out;
}

} // namespace

std::vector<RunEntry> interpolate_rerank(const CorpusIndex& index,
                                         const std::vector<RunEntry>& doc_entries,
                                         const std::vector<RunEntry>& entity_entries,
                                         const std::string& query_id, double lambda,
                                         int k_entities) {
    if (lambda < 0.0 || lambda > 1.0)
        throw UsageError("interpolation lambda must be in [0,1]");
    std::size_t depth = std::min<std::size_t>(std::max(k_entities, 0), entity_entries.size());

    std::vector<double> ent_scores(depth);
    for (std::size_t i = 0; i < depth; ++i)
        ent_scores[i] = entity_entries[i].score;
    std::vector<double> ent_norm = minmax_normalize(ent_scores);
    std::map<std::string, double> entity_weight;
    for (std::size_t i = 0; i < depth; ++i)
        entity_weight[entity_entries[i].id] = ent_norm[i];

    std::vector<double> doc_scores(doc_entries.size());
    for (std::size_t i = 0; i < doc_entries.size(); ++i)
        doc_scores[i] = doc_entries[i].score;
    std::vector<double> doc_norm = minmax_normalize(doc_scores);

    std::vector<RunEntry> out = doc_entries;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double ent = 0.0;
        for (const auto& m : index.doc_entities(out[i].id)) {
            auto it = entity_weight.find(m.entity_id);
            if (it != entity_weight.end())
                ent += it->second;
        }
        out[i].score = (1.0 - lambda) * doc_norm[i] + lambda * ent;
        out[i].tag = "interp";
    }
    std::sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id > b.id;
    });
    int r = 1;
    for (auto& e : out)
        e.rank = r++;
    return out;
}

Run interpolate_rerank(const CorpusIndex& index, const Run& doc_run, const Run& entity_run,
                       double lambda, int k_entities) {
    Run out;
    static const std::vector<RunEntry> kEmpty;
    for (const auto& [query_id, entries] : doc_run) {
        if (!index.has_query(query_id))
            continue;
        auto it = entity_run.find(query_id);
        const auto& ents = it == entity_run.end() ? kEmpty : it->second;
        out[query_id] = interpolate_rerank(index, entries, ents, query_id, lambda, k_entities);
    }
    return out;
}

} // namespace entsig
