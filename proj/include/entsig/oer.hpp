#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/trec_io.hpp"

namespace entsig {

// Signal-mode taxonomy for (query, entity) pairs.
enum class SignalMode { core, conditional, bait, anti, sparse };

const char* to_string(SignalMode mode);
std::optional<SignalMode> signal_mode_from_string(const std::string& s);

struct OerConfig {
    double alpha = 1.0;        // Laplace smoothing constant
    double tau_support = 3.0;  // support-weight decay
    double core_oer_min = 0.5;
    int bait_dfcand_min = 50;
    int sparse_dfcand_max = 2;
};

struct OerScore {
    double p_rel_hat = 0.0;
    double p_nonrel_hat = 0.0;
    double log_odds_diff = 0.0;
    double support_w = 0.0;
    double oer = 0.0;
};

struct OerRow {
    std::string query_id;
    std::string entity_id;
    int df_rel = 0;
    int df_nonrel = 0;
    int df_cand = 0;
    OerScore score;
    SignalMode mode = SignalMode::sparse;
};

// Per-(query, entity) OER scores and mode labels. Rows sorted by
// (query_id, entity_id). Queries without both relevant and judged
// non-relevant pool docs are skipped and recorded.
class OerTable {
public:
    void add(OerRow row);
    const std::vector<OerRow>& rows() const { return rows_; }
    const OerRow* find(const std::string& query_id, const std::string& entity_id) const;
    std::vector<const OerRow*> query_rows(const std::string& query_id) const;
    std::vector<std::string>& skipped_queries() { return skipped_; }
    const std::vector<std::string>& skipped_queries() const { return skipped_; }
    void sort_rows();

private:
    std::vector<OerRow> rows_;
    std::vector<std::string> skipped_;
};

// Support-weighted log-odds difference between entity presence rates in
// relevant and judged non-relevant candidate documents.
//   p_rel_hat    = (df_rel + a) / (|R| + 2a)
//   p_nonrel_hat = (df_nonrel + a) / (|NR| + 2a)
//   support_w    = 1 - exp(-df_cand / tau_support)
//   oer          = support_w * (logit(p_rel_hat) - logit(p_nonrel_hat))
OerScore oer_score(int df_rel, int df_nonrel, int df_cand, int num_rel, int num_nonrel,
                   const OerConfig& cfg);

// Taxonomy precedence: sparse -> core -> bait -> anti -> conditional, with
// non-positive leftovers falling to anti when df_nonrel >= df_rel.
SignalMode classify_mode(int df_rel, int df_nonrel, int df_cand, double oer,
                         const OerConfig& cfg);

OerTable build_oer_table(const CorpusIndex& index, const OerConfig& cfg);

struct RunRates {
    double bait_rate = 0.0;     // top-k slots labeled bait or anti
    double signal_rate = 0.0;   // top-k slots labeled core or conditional
    double sparse_rate = 0.0;
    double top1_bait_rate = 0.0; // queries whose rank-1 entity is bait or anti
    long long slots = 0;
    long long queries = 0;
};

// Entities missing from the table count as sparse (df all zero).
RunRates run_rates(const Run& entity_run, const OerTable& table, int k);

// score'(e) = score(e) * (ln((N_q+1)/(df_cand+1)) + 1); df_cand = 0 scores 0.
// Re-sorted by (score desc, entity_id desc) with ranks reassigned.
std::vector<RunEntry> local_idf_rescale(const std::vector<RunEntry>& entries,
                                        const CorpusIndex& index, const std::string& query_id);
Run local_idf_rescale(const Run& entity_run, const CorpusIndex& index);

struct FilterResult {
    Run run;
    std::vector<std::string> emptied_queries;
};

// Keeps entities with oer >= threshold (missing rows are removed), preserves
// relative order, reassigns ranks 1..m.
FilterResult oer_filter(const Run& entity_run, const OerTable& table, double threshold);

// TSV columns: qid entity df_rel df_nonrel df_cand oer mode.
Report oer_table_report(const OerTable& table);
// Parses the TSV written by oer_table_report (or its JSON twin's columns).
OerTable read_oer_table_tsv(const std::string& path);

} // namespace entsig
