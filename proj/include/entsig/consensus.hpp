#pragma once

#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/trec_io.hpp"

namespace entsig {

enum class ConsensusVariant { rho, rank, rho_rank };

const char* to_string(ConsensusVariant v);

struct ConsensusConfig {
    ConsensusVariant variant = ConsensusVariant::rho_rank;
    int gate_min_df = 2; // entities in fewer candidate docs are dropped
    int k_out = 20;
};

// Unsupervised consensus entity ranking over the candidate pool:
//   score(e) = soft_support(e) * (ln((K+1)/(df_cand+1)) + 1)
// soft_support sums per-document weights over candidate docs containing e:
// rho (max linker confidence), 1/log2(rank+1), or their product.
std::vector<RunEntry> consensus_rank(const CorpusIndex& index, const std::string& query_id,
                                     const ConsensusConfig& cfg);

struct ConsensusResult {
    Run run;
    std::vector<std::string> empty_queries; // every entity gated away
};

ConsensusResult consensus_run(const CorpusIndex& index, const ConsensusConfig& cfg);

} // namespace entsig
