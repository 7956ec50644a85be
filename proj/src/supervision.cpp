#include "entsig/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace entsig {

namespace {

long long count_pairs(const std::map<std::string, std::vector<std::string>>& per_query) {
    long long n = 0;
    for (const auto& [q, ents] : per_query)
        n += static_cast<long long>(ents.size());
    return n;
}

std::optional<double> mean_of(const std::vector<double>& v) {
    if (v.empty())
        return std::nullopt;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

std::optional<double> median_of(std::vector<double> v) {
    if (v.empty())
        return std::nullopt;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

long long EntityPartition::count_positives() const {
    return count_pairs(positives);
}
long long EntityPartition::count_negatives() const {
    return count_pairs(negatives);
}
long long EntityPartition::count_common() const {
    return count_pairs(common);
}

BinaryDerivation derive_binary_qrels(const CorpusIndex& index) {
    BinaryDerivation out;
    for (const auto& [query_id, qi] : index.queries()) {
        for (const auto& [entity_id, st] : qi.entity_stats) {
            if (st.df_rel > 0 && st.df_nonrel == 0) {
                out.partition.positives[query_id].push_back(entity_id);
                out.entity_qrels.set(query_id, entity_id, 1);
            } else if (st.df_rel == 0 && st.df_nonrel > 0) {
                out.partition.negatives[query_id].push_back(entity_id);
                out.entity_qrels.set(query_id, entity_id, 0);
            } else if (st.df_rel > 0 && st.df_nonrel > 0) {
                out.partition.common[query_id].push_back(entity_id);
            }
            // df_rel = df_nonrel = 0: unjudged-only entity, no partition.
        }
    }
    return out;
}

namespace {

PartitionClassStats class_stats(const CorpusIndex& index,
                                const std::map<std::string, std::vector<std::string>>& members,
                                const std::map<std::string, int>& collection_df,
                                std::size_t collection_size) {
    PartitionClassStats stats;
    std::vector<double> df_cands, idfs, dfs;
    for (const auto& [query_id, entities] : members) {
        const auto& qi = index.query(query_id);
        for (const auto& entity : entities) {
            ++stats.count;
            auto it = qi.entity_stats.find(entity);
            if (it != qi.entity_stats.end())
                df_cands.push_back(it->second.df_cand);
            auto dfit = collection_df.find(entity);
            if (dfit != collection_df.end() && collection_size > 0) {
                dfs.push_back(dfit->second);
                idfs.push_back(std::log(static_cast<double>(collection_size) / dfit->second));
            }
        }
    }
    stats.mean_df_cand = mean_of(df_cands);
    stats.median_df_cand = median_of(df_cands);
    stats.mean_collection_idf = mean_of(idfs);
    stats.median_collection_df = median_of(dfs);
    return stats;
}

} // namespace

PartitionStats partition_stats(const CorpusIndex& index, const EntityPartition& partition,
                               const OerTable& table) {
    // Pool-collection document frequencies over the union of all pool docs.
    std::set<std::string> collection;
    for (const auto& [q, qi] : index.queries())
        for (const auto& d : qi.pool)
            collection.insert(d.doc_id);
    std::map<std::string, int> collection_df;
    for (const auto& doc : collection)
        for (const auto& m : index.doc_entities(doc))
            collection_df[m.entity_id] += 1;

    PartitionStats stats;
    stats.positives = class_stats(index, partition.positives, collection_df, collection.size());
    stats.negatives = class_stats(index, partition.negatives, collection_df, collection.size());
    stats.common = class_stats(index, partition.common, collection_df, collection.size());

    if (stats.positives.count > 0)
        stats.imbalance_ratio =
            static_cast<double>(stats.negatives.count) / static_cast<double>(stats.positives.count);

    std::vector<double> log_odds;
    long long positive = 0;
    for (const auto& [query_id, entities] : partition.common) {
        for (const auto& entity : entities) {
            const OerRow* row = table.find(query_id, entity);
            if (!row)
                throw UsageError("partition_stats: OER missing for common entity " + entity +
                                 " of query " + query_id);
            log_odds.push_back(row->score.log_odds_diff);
            if (row->score.log_odds_diff > 0.0)
                ++positive;
        }
    }
    if (!log_odds.empty()) {
        stats.common_positive_fraction =
            static_cast<double>(positive) / static_cast<double>(log_odds.size());
        stats.common_mean_log_odds = mean_of(log_odds);
        stats.common_median_log_odds = median_of(log_odds);
    }
    return stats;
}

Report partition_stats_report(const PartitionStats& stats) {
    Report report({"partition", "count", "mean_df_cand", "median_df_cand", "mean_pool_idf",
                   "median_pool_df", "positive_log_odds_fraction", "mean_log_odds",
                   "median_log_odds", "imbalance_ratio"});
    auto opt = [&report](const std::optional<double>& v) {
        if (v)
            report.add(*v);
        else
            report.add_missing();
    };
    auto emit = [&](const char* name, const PartitionClassStats& cls, bool is_common,
                    bool with_ratio) {
        report.begin_row().add(std::string(name)).add(cls.count);
        opt(cls.mean_df_cand);
        opt(cls.median_df_cand);
        opt(cls.mean_collection_idf);
        opt(cls.median_collection_df);
        if (is_common) {
            opt(stats.common_positive_fraction);
            opt(stats.common_mean_log_odds);
            opt(stats.common_median_log_odds);
        } else {
            report.add_missing().add_missing().add_missing();
        }
        if (with_ratio)
            opt(stats.imbalance_ratio);
        else
            report.add_missing();
    };
    emit("positives", stats.positives, false, true);
    emit("negatives", stats.negatives, false, false);
    emit("common", stats.common, true, false);
    return report;
}

} // namespace entsig
