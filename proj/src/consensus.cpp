#include "entsig/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "entsig/parallel.hpp"

namespace entsig {

const char* to_string(ConsensusVariant v) {
    switch (v) {
    case ConsensusVariant::rho:
        return "rho";
    case ConsensusVariant::rank:
        return "rank";
    case ConsensusVariant::rho_rank:
        return "rho_rank";
    }
    return "rho_rank";
}

std::vector<RunEntry> consensus_rank(const CorpusIndex& index, const std::string& query_id,
                                     const ConsensusConfig& cfg) {
    if (cfg.gate_min_df < 1)
        throw UsageError("consensus gate_min_df must be >= 1");
    const auto& qi = index.query(query_id);
    if (qi.pool.empty())
        throw UsageError("consensus_rank: empty pool for query " + query_id);
    double pool_size = static_cast<double>(qi.pool.size());

    std::vector<RunEntry> scored;
    std::string tag = std::string("consensus-") + to_string(cfg.variant);
    for (const auto& [entity_id, st] : qi.entity_stats) {
        if (st.df_cand < cfg.gate_min_df)
            continue;
        double soft = 0.0;
        for (std::size_t i = 0; i < st.ranks.size(); ++i) {
            double rank_w = 1.0 / std::log2(static_cast<double>(st.ranks[i]) + 1.0);
            switch (cfg.variant) {
            case ConsensusVariant::rho:
                soft += st.rho_per_doc[i];
                break;
            case ConsensusVariant::rank:
                soft += rank_w;
                break;
            case ConsensusVariant::rho_rank:
                soft += st.rho_per_doc[i] * rank_w;
                break;
            }
        }
        double pseudo_idf = std::log((pool_size + 1.0) / (st.df_cand + 1.0)) + 1.0;
        scored.push_back(RunEntry{entity_id, 0, soft * pseudo_idf, tag});
    }
    std::sort(scored.begin(), scored.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id > b.id;
    });
    if (cfg.k_out > 0 && scored.size() > static_cast<std::size_t>(cfg.k_out))
        scored.resize(cfg.k_out);
    int r = 1;
    for (auto& e : scored)
        e.rank = r++;
    return scored;
}

ConsensusResult consensus_run(const CorpusIndex& index, const ConsensusConfig& cfg) {
    std::vector<const std::string*> qids;
    for (const auto& [query_id, qi] : index.queries())
        qids.push_back(&query_id);
    std::vector<std::vector<RunEntry>> slots(qids.size());
    parallel_for(qids.size(),
                 [&](std::size_t i) { slots[i] = consensus_rank(index, *qids[i], cfg); });
    ConsensusResult result;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].empty())
            result.empty_queries.push_back(*qids[i]);
        result.run[*qids[i]] = std::move(slots[i]);
    }
    return result;
}

} // namespace entsig
