#include "entsig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "entsig/parallel.hpp"

#include <json.hpp>

namespace entsig {

namespace {

// Hand-rolled draws: identical streams on every platform and stdlib.
double rand_u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// rho values carry 4 decimals; full doubles would bloat the JSONL output
// for no diagnostic benefit.
double rand_rho(std::mt19937_64& rng, double lo, double span) {
    return std::round((lo + span * rand_u01(rng)) * 1e4) / 1e4;
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

std::string pad4(int v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", v);
    return buf;
}

void validate(const SynthConfig& cfg) {
    if (cfg.num_queries < 1 || cfg.pool_size < 1 || cfg.num_rel_per_query < 1 ||
        cfg.entity_vocab_size < 1 || cfg.signal_entities_per_query < 1)
        throw UsageError("synth: counts must be positive");
    if (cfg.num_rel_per_query > cfg.pool_size)
        throw UsageError("synth: num_rel_per_query exceeds pool_size");
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(cfg.signal_linking_recall) || !prob_ok(cfg.generic_entity_rate) ||
        !prob_ok(cfg.signal_leak_rate))
        throw UsageError("synth: probabilities must be in [0,1]");
    long long planted =
        static_cast<long long>(cfg.num_queries) * cfg.signal_entities_per_query;
    if (planted > cfg.entity_vocab_size)
        throw UsageError("synth: entity vocabulary too small for " + std::to_string(planted) +
                         " planted signal entities");
}

} // namespace

SynthData generate(const SynthConfig& cfg) {
    validate(cfg);
    SynthData data;

    int generic_count =
        cfg.entity_vocab_size - cfg.num_queries * cfg.signal_entities_per_query;
    for (int g = 0; g < generic_count; ++g)
        data.generic_entities.push_back("E_gen_" + pad4(g + 1));

    // Per-query fragments generated in parallel under split seeds, merged in
    // query order afterwards.
    struct Fragment {
        std::string qid;
        std::vector<std::string> signals;
        std::vector<PooledDoc> pool;
        std::vector<std::pair<std::string, int>> judgments;
        std::vector<std::pair<std::string, std::vector<EntityMention>>> doc_links;
        std::vector<RunEntry> planted;
    };
    std::vector<Fragment> fragments(static_cast<std::size_t>(cfg.num_queries));
    parallel_for(fragments.size(), [&](std::size_t q) {
        Fragment& frag = fragments[q];
        frag.qid = "q" + pad4(static_cast<int>(q) + 1);
        std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(q) + 1)));

        for (int s = 0; s < cfg.signal_entities_per_query; ++s)
            frag.signals.push_back("E_sig_" + frag.qid + "_" + std::to_string(s + 1));

        // Relevant docs at random pool positions.
        std::vector<int> positions(cfg.pool_size);
        std::iota(positions.begin(), positions.end(), 0);
        for (int i = 0; i < cfg.num_rel_per_query; ++i) {
            int j = i + static_cast<int>(rand_below(rng, cfg.pool_size - i));
            std::swap(positions[i], positions[j]);
        }
        std::vector<bool> is_rel(cfg.pool_size, false);
        for (int i = 0; i < cfg.num_rel_per_query; ++i)
            is_rel[positions[i]] = true;

        frag.pool.reserve(cfg.pool_size);
        int rel_idx = 0;
        for (int d = 0; d < cfg.pool_size; ++d) {
            std::string doc_id = frag.qid + "_d" + pad4(d + 1);
            frag.pool.push_back(PooledDoc{doc_id, d + 1, static_cast<double>(cfg.pool_size - d)});
            if (is_rel[d]) {
                frag.judgments.emplace_back(doc_id, rel_idx % 3 == 0 ? 2 : 1);
                ++rel_idx;
            } else {
                frag.judgments.emplace_back(doc_id, 0);
            }
            std::vector<EntityMention> mentions;
            double link_p = is_rel[d] ? cfg.signal_linking_recall : cfg.signal_leak_rate;
            for (const auto& sig : frag.signals) {
                if (rand_u01(rng) < link_p) {
                    double rho = rand_rho(rng, 0.6, 0.4);
                    int count = rand_u01(rng) < 0.25 ? 2 : 1;
                    mentions.push_back(EntityMention{sig, rho, count});
                }
            }
            for (const auto& gen : data.generic_entities) {
                if (rand_u01(rng) < cfg.generic_entity_rate)
                    mentions.push_back(EntityMention{gen, rand_rho(rng, 0.05, 0.9), 1});
            }
            frag.doc_links.emplace_back(std::move(doc_id), std::move(mentions));
        }
        for (int s = 0; s < cfg.signal_entities_per_query; ++s)
            frag.planted.push_back(RunEntry{frag.signals[s], s + 1,
                                            static_cast<double>(cfg.signal_entities_per_query - s),
                                            "planted"});
    });

    for (auto& frag : fragments) {
        for (auto& [doc_id, grade] : frag.judgments)
            data.qrels.set(frag.qid, doc_id, grade);
        for (auto& [doc_id, mentions] : frag.doc_links)
            data.links.set_doc(std::move(doc_id), std::move(mentions));
        data.pools.set(frag.qid, std::move(frag.pool));
        data.signal_entities[frag.qid] = std::move(frag.signals);
        data.planted_run[frag.qid] = std::move(frag.planted);
    }
    return data;
}

void write_synth(const SynthData& data, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw DataError("cannot create output directory " + out_dir + ": " + ec.message());

    write_qrels(data.qrels, (fs::path(out_dir) / "qrels.txt").string());

    Run pool_run;
    for (const auto& [qid, docs] : data.pools.by_query()) {
        auto& entries = pool_run[qid];
        for (const auto& d : docs)
            entries.push_back(RunEntry{d.doc_id, d.rank, d.score, "pool"});
    }
    write_run(pool_run, (fs::path(out_dir) / "pool.run").string());
    write_entity_links(data.links, (fs::path(out_dir) / "links.jsonl").string());
    write_run(data.planted_run, (fs::path(out_dir) / "planted.run").string());

    nlohmann::ordered_json truth;
    truth["signal_entities"] = nlohmann::ordered_json::object();
    for (const auto& [qid, signals] : data.signal_entities)
        truth["signal_entities"][qid] = signals;
    truth["generic_entities"] = data.generic_entities;
    std::ofstream out(fs::path(out_dir) / "truth.json", std::ios::binary);
    if (!out)
        throw DataError("cannot write truth.json in " + out_dir);
    out << truth.dump(2) << "\n";
}

} // namespace entsig
