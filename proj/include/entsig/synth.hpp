#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"
#include "entsig/trec_io.hpp"

namespace entsig {

// Seeded generator of query-document-entity environments. Per-query signal
// entities are linked in relevant docs with probability signal_linking_recall
// (and leak into non-relevant docs with probability signal_leak_rate);
// globally shared generic entities are linked in any doc with probability
// generic_entity_rate.
struct SynthConfig {
    int num_queries = 50;
    int pool_size = 100;
    int num_rel_per_query = 10;
    int entity_vocab_size = 500;
    int signal_entities_per_query = 3;
    double signal_linking_recall = 1.0;
    double generic_entity_rate = 0.0;
    double signal_leak_rate = 0.0;
    std::uint64_t seed = 42;
};

struct SynthData {
    Qrels qrels;
    CandidatePool pools;
    EntityLinks links;
    // Ground truth for oracle checks.
    std::map<std::string, std::vector<std::string>> signal_entities; // per query
    std::vector<std::string> generic_entities;
    Run planted_run; // per query: its signal entities, ranked
};

// Deterministic under cfg.seed; per-query generators are split from the
// master seed so generation order is irrelevant.
SynthData generate(const SynthConfig& cfg);

// Writes qrels.txt, pool.run, links.jsonl, planted.run, truth.json.
void write_synth(const SynthData& data, const std::string& out_dir);

} // namespace entsig
