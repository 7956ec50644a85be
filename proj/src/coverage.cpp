#include "entsig/coverage.hpp"

#include <algorithm>
#include <map>

#include "entsig/parallel.hpp"

namespace entsig {

std::set<std::string> top_k_entities(const std::vector<RunEntry>& entries, int k) {
    std::set<std::string> out;
    std::size_t depth = std::min<std::size_t>(std::max(k, 0), entries.size());
    for (std::size_t i = 0; i < depth; ++i)
        out.insert(entries[i].id);
    return out;
}

namespace {

int overlap_count(const CorpusIndex& index, const std::string& doc_id,
                  const std::set<std::string>& entity_set) {
    int n = 0;
    for (const auto& m : index.doc_entities(doc_id))
        if (entity_set.count(m.entity_id))
            ++n;
    return n;
}

const std::vector<RunEntry>* run_entries(const Run& run, const std::string& query_id) {
    auto it = run.find(query_id);
    return it == run.end() ? nullptr : &it->second;
}

double covered_fraction(const CorpusIndex& index, const std::set<std::string>& docs,
                        const std::set<std::string>& entity_set) {
    if (docs.empty())
        throw UsageError("coverage over an empty document set");
    std::size_t reached = 0;
    for (const auto& d : docs)
        if (overlap_count(index, d, entity_set) > 0)
            ++reached;
    return static_cast<double>(reached) / static_cast<double>(docs.size());
}

} // namespace

double rel_cov(const CorpusIndex& index, const Run& entity_run, const std::string& query_id,
               int k) {
    if (k < 1)
        throw UsageError("rel_cov requires k >= 1");
    const auto& qi = index.query(query_id);
    if (qi.relevant.empty())
        throw UsageError("rel_cov: query " + query_id + " has no relevant pool docs");
    const auto* entries = run_entries(entity_run, query_id);
    auto top = entries ? top_k_entities(*entries, k) : std::set<std::string>{};
    return covered_fraction(index, qi.relevant, top);
}

double nonrel_cov(const CorpusIndex& index, const Run& entity_run, const std::string& query_id,
                  int k, NonRelDenominator denom) {
    if (k < 1)
        throw UsageError("nonrel_cov requires k >= 1");
    const auto& qi = index.query(query_id);
    std::set<std::string> docs;
    if (denom == NonRelDenominator::judged_only) {
        docs = qi.judged_nonrel;
    } else {
        for (const auto& d : qi.pool)
            if (!qi.relevant.count(d.doc_id))
                docs.insert(d.doc_id);
    }
    if (docs.empty())
        throw UsageError("nonrel_cov: query " + query_id + " has no docs in the denominator");
    const auto* entries = run_entries(entity_run, query_id);
    auto top = entries ? top_k_entities(*entries, k) : std::set<std::string>{};
    return covered_fraction(index, docs, top);
}

double disc_ratio(double relcov, double nonrelcov, double epsilon) {
    if (epsilon <= 0.0)
        throw UsageError("disc_ratio requires epsilon > 0");
    return relcov / (nonrelcov + epsilon);
}

std::optional<double> mean_overlap(const CorpusIndex& index, const Run& entity_run,
                                   const std::string& query_id, int k) {
    const auto& qi = index.query(query_id);
    const auto* entries = run_entries(entity_run, query_id);
    auto top = entries ? top_k_entities(*entries, k) : std::set<std::string>{};
    long long total = 0;
    long long reached = 0;
    for (const auto& d : qi.relevant) {
        int n = overlap_count(index, d, top);
        if (n > 0) {
            total += n;
            ++reached;
        }
    }
    if (reached == 0)
        return std::nullopt;
    return static_cast<double>(total) / static_cast<double>(reached);
}

OracleCover oracle_cover(const CorpusIndex& index, const std::string& query_id) {
    const auto& qi = index.query(query_id);
    if (qi.relevant.empty())
        throw UsageError("oracle_cover: query " + query_id + " has no relevant pool docs");

    // entity -> relevant docs containing it
    std::map<std::string, std::set<std::string>> entity_docs;
    for (const auto& d : qi.relevant)
        for (const auto& m : index.doc_entities(d))
            entity_docs[m.entity_id].insert(d);

    OracleCover result;
    std::set<std::string> covered;
    while (true) {
        const std::string* best = nullptr;
        std::size_t best_gain = 0;
        for (const auto& [entity, docs] : entity_docs) {
            std::size_t gain = 0;
            for (const auto& d : docs)
                if (!covered.count(d))
                    ++gain;
            // ties break by entity_id ascending: map order visits ids
            // ascending, so strictly-greater keeps the first.
            if (gain > best_gain) {
                best_gain = gain;
                best = &entity;
            }
        }
        if (!best || best_gain == 0)
            break;
        result.entities.push_back(*best);
        for (const auto& d : entity_docs[*best])
            covered.insert(d);
    }
    result.coverage = static_cast<double>(covered.size()) / static_cast<double>(qi.relevant.size());
    return result;
}

double observable_cov(const CorpusIndex& index, const OerTable& table,
                      const std::string& query_id, int k, const Run* entity_run) {
    const auto& qi = index.query(query_id);
    if (qi.relevant.empty())
        throw UsageError("observable_cov: query " + query_id + " has no relevant pool docs");
    std::set<std::string> core;
    for (const auto* row : table.query_rows(query_id))
        if (row->mode == SignalMode::core)
            core.insert(row->entity_id);
    if (entity_run) {
        const auto* entries = run_entries(*entity_run, query_id);
        auto top = entries ? top_k_entities(*entries, k) : std::set<std::string>{};
        std::set<std::string> both;
        for (const auto& e : top)
            if (core.count(e))
                both.insert(e);
        core = std::move(both);
    }
    return covered_fraction(index, qi.relevant, core);
}

namespace {

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty())
        return std::nullopt;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace

CoverageReport coverage_report(const CorpusIndex& index, const Run& entity_run,
                               const CoverageConfig& cfg) {
    CoverageReport report;
    std::vector<int> ks = cfg.k_values;
    std::sort(ks.begin(), ks.end());

    std::vector<const std::string*> qids;
    for (const auto& [query_id, qi] : index.queries())
        qids.push_back(&query_id);

    // Per-query rows computed in parallel over the immutable index; the
    // slot index keeps the reduction ordered.
    struct QuerySlot {
        bool skipped = false;
        std::vector<CoverageRow> rows;
    };
    std::vector<QuerySlot> slots(qids.size());
    parallel_for(qids.size(), [&](std::size_t i) {
        const std::string& query_id = *qids[i];
        const auto& qi = index.query(query_id);
        auto& slot = slots[i];
        if (qi.relevant.empty()) {
            slot.skipped = true;
            return;
        }
        std::optional<double> oracle;
        if (cfg.with_oracle)
            oracle = oracle_cover(index, query_id).coverage;
        bool has_nonrel = cfg.nonrel == NonRelDenominator::judged_only
                              ? !qi.judged_nonrel.empty()
                              : qi.relevant.size() < qi.pool.size();
        for (int k : ks) {
            CoverageRow row;
            row.query_id = query_id;
            row.k = k;
            row.relcov = rel_cov(index, entity_run, query_id, k);
            if (has_nonrel) {
                row.nonrelcov = nonrel_cov(index, entity_run, query_id, k, cfg.nonrel);
                row.discratio = disc_ratio(*row.relcov, *row.nonrelcov, cfg.epsilon);
            }
            row.overlap = mean_overlap(index, entity_run, query_id, k);
            if (cfg.with_oracle)
                row.oraclecov = oracle;
            if (cfg.oer_table)
                row.obscov = observable_cov(index, *cfg.oer_table, query_id, k, &entity_run);
            slot.rows.push_back(std::move(row));
        }
    });

    std::map<int, std::vector<double>> agg_rel, agg_nonrel, agg_disc, agg_overlap, agg_oracle,
        agg_obs;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].skipped) {
            report.skipped_queries.push_back(*qids[i]);
            continue;
        }
        for (auto& row : slots[i].rows) {
            agg_rel[row.k].push_back(*row.relcov);
            if (row.nonrelcov) {
                agg_nonrel[row.k].push_back(*row.nonrelcov);
                agg_disc[row.k].push_back(*row.discratio);
            }
            if (row.overlap)
                agg_overlap[row.k].push_back(*row.overlap);
            if (row.oraclecov)
                agg_oracle[row.k].push_back(*row.oraclecov);
            if (row.obscov)
                agg_obs[row.k].push_back(*row.obscov);
            report.rows.push_back(std::move(row));
        }
    }

    for (int k : ks) {
        CoverageRow row;
        row.query_id = "all";
        row.k = k;
        row.relcov = mean_of(agg_rel[k]); // the coverage ceiling at k
        row.nonrelcov = mean_of(agg_nonrel[k]);
        row.discratio = mean_of(agg_disc[k]);
        row.overlap = mean_of(agg_overlap[k]);
        if (cfg.with_oracle)
            row.oraclecov = mean_of(agg_oracle[k]);
        if (cfg.oer_table)
            row.obscov = mean_of(agg_obs[k]);
        report.aggregate.push_back(std::move(row));
    }
    return report;
}

CoverageReport per_query_measures(const CorpusIndex& index, const CoverageConfig& cfg) {
    if (!cfg.with_oracle && !cfg.oer_table)
        throw UsageError("per-query measures need the oracle flag or an OER table");
    CoverageReport report;
    std::vector<double> agg_oracle, agg_obs;
    for (const auto& [query_id, qi] : index.queries()) {
        if (qi.relevant.empty()) {
            report.skipped_queries.push_back(query_id);
            continue;
        }
        CoverageRow row;
        row.query_id = query_id;
        row.k = 0; // no prefix restriction
        if (cfg.with_oracle) {
            row.oraclecov = oracle_cover(index, query_id).coverage;
            agg_oracle.push_back(*row.oraclecov);
        }
        if (cfg.oer_table) {
            row.obscov = observable_cov(index, *cfg.oer_table, query_id, 0, nullptr);
            agg_obs.push_back(*row.obscov);
        }
        report.rows.push_back(std::move(row));
    }
    CoverageRow all;
    all.query_id = "all";
    all.k = 0;
    if (cfg.with_oracle)
        all.oraclecov = mean_of(agg_oracle);
    if (cfg.oer_table)
        all.obscov = mean_of(agg_obs);
    report.aggregate.push_back(std::move(all));
    return report;
}

Report coverage_to_report(const CoverageReport& report, const CoverageConfig& cfg) {
    std::vector<std::string> cols{"qid", "k", "relcov", "nonrelcov", "discratio", "overlap"};
    if (cfg.with_oracle)
        cols.push_back("oraclecov");
    if (cfg.oer_table)
        cols.push_back("obscov");
    Report out(cols);
    auto emit = [&](const CoverageRow& row) {
        out.begin_row().add(row.query_id).add(row.k);
        auto cell = [&](const std::optional<double>& v) {
            if (v)
                out.add(*v);
            else
                out.add_missing();
        };
        cell(row.relcov);
        cell(row.nonrelcov);
        cell(row.discratio);
        cell(row.overlap);
        if (cfg.with_oracle)
            cell(row.oraclecov);
        if (cfg.oer_table)
            cell(row.obscov);
    };
    for (const auto& row : report.rows)
        emit(row);
    for (const auto& row : report.aggregate)
        emit(row);
    return out;
}

} // namespace entsig
