#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/oer.hpp"

namespace entsig {

// Per-query partition of entities with judged evidence:
//   E+ : df_rel > 0 and df_nonrel = 0   (label 1)
//   E- : df_rel = 0 and df_nonrel > 0   (label 0)
//   E0 : both > 0                       (excluded from emitted qrels)
// Entities seen only in unjudged docs belong to no partition.
struct EntityPartition {
    std::map<std::string, std::vector<std::string>> positives;
    std::map<std::string, std::vector<std::string>> negatives;
    std::map<std::string, std::vector<std::string>> common;

    long long count_positives() const;
    long long count_negatives() const;
    long long count_common() const;
};

struct BinaryDerivation {
    EntityPartition partition;
    Qrels entity_qrels; // qid -> entity_id -> {0,1}; E0 omitted
};

BinaryDerivation derive_binary_qrels(const CorpusIndex& index);

struct PartitionClassStats {
    long long count = 0;
    std::optional<double> mean_df_cand;
    std::optional<double> median_df_cand;
    // Pool-collection IDF: ln(N/df) over the union of all pool docs.
    // An approximation of full-collection IDF; pools are all we ingest.
    std::optional<double> mean_collection_idf;
    std::optional<double> median_collection_df;
};

struct PartitionStats {
    PartitionClassStats positives;
    PartitionClassStats negatives;
    PartitionClassStats common;
    std::optional<double> imbalance_ratio; // |E-| / |E+|, null when |E+| = 0
    // Common-partition log-odds profile; null when E0 is empty.
    std::optional<double> common_positive_fraction;
    std::optional<double> common_mean_log_odds;
    std::optional<double> common_median_log_odds;
};

// OER must be computed for E0 members (guaranteed: E0 requires both doc
// classes, so the query was not skipped by build_oer_table).
PartitionStats partition_stats(const CorpusIndex& index, const EntityPartition& partition,
                               const OerTable& table);

Report partition_stats_report(const PartitionStats& stats);

} // namespace entsig
