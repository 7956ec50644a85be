#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/oer.hpp"
#include "entsig/trec_io.hpp"

namespace entsig {

enum class NonRelDenominator {
    judged_only,     // judged non-relevant pool docs (default)
    pool_complement, // pool \ R_q, unjudged included
};

struct CoverageConfig {
    std::vector<int> k_values{10, 20, 50};
    double epsilon = 1e-6;
    NonRelDenominator nonrel = NonRelDenominator::judged_only;
    bool with_oracle = false;
    const OerTable* oer_table = nullptr; // enables the observable-coverage column
};

// Top-k prefix of a ranked entity list (all entries when k exceeds length).
std::set<std::string> top_k_entities(const std::vector<RunEntry>& entries, int k);

// Fraction of relevant pool docs whose linked entities intersect the top-k
// prefix. Precondition: |R_q| > 0.
double rel_cov(const CorpusIndex& index, const Run& entity_run, const std::string& query_id,
               int k);

// Same fraction over the non-relevant denominator. Precondition: denominator
// nonempty.
double nonrel_cov(const CorpusIndex& index, const Run& entity_run, const std::string& query_id,
                  int k, NonRelDenominator denom = NonRelDenominator::judged_only);

double disc_ratio(double relcov, double nonrelcov, double epsilon);

// Mean, over relevant docs reached by the top-k prefix, of |entities(d) ∩ top-k|.
// nullopt when no relevant doc is reached.
std::optional<double> mean_overlap(const CorpusIndex& index, const Run& entity_run,
                                   const std::string& query_id, int k);

struct OracleCover {
    std::vector<std::string> entities; // greedy pick order
    double coverage = 0.0;             // fraction of relevant docs covered at halt
};

// Greedy set cover of the relevant pool docs using entities as sets; ties in
// gain break by entity_id ascending. Docs with no linked entities are
// uncoverable. Precondition: |R_q| > 0.
OracleCover oracle_cover(const CorpusIndex& index, const std::string& query_id);

// RelCov through core-signal entities only: the core entities of the query,
// intersected with the run's top-k prefix when a run is supplied.
double observable_cov(const CorpusIndex& index, const OerTable& table,
                      const std::string& query_id, int k,
                      const Run* entity_run = nullptr);

struct CoverageRow {
    std::string query_id; // "all" for aggregate rows
    int k = 0;
    std::optional<double> relcov;
    std::optional<double> nonrelcov;
    std::optional<double> discratio;
    std::optional<double> overlap;
    std::optional<double> oraclecov;
    std::optional<double> obscov;
};

struct CoverageReport {
    std::vector<CoverageRow> rows;      // per (query, k), query asc then k asc
    std::vector<CoverageRow> aggregate; // one row per k, qid "all"; means over defined queries
    std::vector<std::string> skipped_queries; // |R_q| = 0, excluded from rows and means
};

CoverageReport coverage_report(const CorpusIndex& index, const Run& entity_run,
                               const CoverageConfig& cfg);

// Per-query scalar measures without a run prefix: oracle coverage and/or
// observable coverage over all core-signal entities. Rows carry k = 0.
CoverageReport per_query_measures(const CorpusIndex& index, const CoverageConfig& cfg);

Report coverage_to_report(const CoverageReport& report, const CoverageConfig& cfg);

} // namespace entsig
