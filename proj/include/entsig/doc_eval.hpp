#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/trec_io.hpp"

namespace entsig {

enum class EvalMode { conditional, open_world };

const char* to_string(EvalMode mode);

struct EvalConfig {
    EvalMode mode = EvalMode::open_world;
    int k_entities = 20;  // top-k prefix defining the conditional pool
    int ndcg_k = 20;
    int precision_k = 20;
    int recall_k = 1000;
    bool exp_gain = false; // nDCG gain: raw grade by default, 2^g - 1 when set
};

// Conditional: candidates whose linked entities intersect the run's top-k
// prefix. Open-world: the full candidate pool.
std::set<std::string> build_eval_pool(const CorpusIndex& index, const Run* entity_run,
                                      const std::string& query_id, const EvalConfig& cfg);

struct QueryEval {
    std::string query_id;
    std::optional<double> ap;
    std::optional<double> ndcg;
    std::optional<double> precision;
    std::optional<double> recall;
    int pool_size = 0;        // eval pool size
    int relevant_in_pool = 0; // recall/AP denominator
    int excluded_relevant = 0; // relevant candidates removed by conditioning
    int dropped_docs = 0;      // run docs outside the eval pool
    bool degenerate = false;   // empty conditional pool or no relevant in pool
};

struct DocEvalReport {
    EvalMode mode = EvalMode::open_world;
    std::vector<QueryEval> rows; // query asc
    // Means over non-degenerate queries.
    std::optional<double> map;
    std::optional<double> mean_ndcg;
    std::optional<double> mean_precision;
    std::optional<double> mean_recall;
    int evaluated_queries = 0;
    int degenerate_queries = 0;
};

// trec_eval conventions: unjudged docs are non-relevant, fixed P@k
// denominator, score ties broken by doc_id descending, nDCG gain = raw grade
// with 1/log2(rank+1) discount and a pool-restricted ideal.
DocEvalReport evaluate_run(const Run& doc_run, const CorpusIndex& index, const EvalConfig& cfg,
                           const Run* entity_run = nullptr);

Report doc_eval_to_report(const DocEvalReport& report, const EvalConfig& cfg);

// Entity-interpolation document reranker:
//   score'(d) = (1-lambda) * minmax(doc score) + lambda * sum of minmax
//   entity-run scores over entities(d) ∩ top-k.
// Degenerate min-max ranges normalize to 0.5.
std::vector<RunEntry> interpolate_rerank(const CorpusIndex& index,
                                         const std::vector<RunEntry>& doc_entries,
                                         const std::vector<RunEntry>& entity_entries,
                                         const std::string& query_id, double lambda,
                                         int k_entities);
Run interpolate_rerank(const CorpusIndex& index, const Run& doc_run, const Run& entity_run,
                       double lambda, int k_entities);

} // namespace entsig
