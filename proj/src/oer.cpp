#include "entsig/oer.hpp"

#include <algorithm>
#include <cmath>

#include "entsig/parallel.hpp"

namespace entsig {

const char* to_string(SignalMode mode) {
    switch (mode) {
    case SignalMode::core:
        return "core";
    case SignalMode::conditional:
        return "conditional";
    case SignalMode::bait:
        return "bait";
    case SignalMode::anti:
        return "anti";
    case SignalMode::sparse:
        return "sparse";
    }
    return "sparse";
}

std::optional<SignalMode> signal_mode_from_string(const std::string& s) {
    if (s == "core")
        return SignalMode::core;
    if (s == "conditional")
        return SignalMode::conditional;
    if (s == "bait")
        return SignalMode::bait;
    if (s == "anti")
        return SignalMode::anti;
    if (s == "sparse")
        return SignalMode::sparse;
    return std::nullopt;
}

void OerTable::add(OerRow row) {
    rows_.push_back(std::move(row));
}

void OerTable::sort_rows() {
    std::sort(rows_.begin(), rows_.end(), [](const OerRow& a, const OerRow& b) {
        if (a.query_id != b.query_id)
            return a.query_id < b.query_id;
        return a.entity_id < b.entity_id;
    });
}

const OerRow* OerTable::find(const std::string& query_id, const std::string& entity_id) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), std::tie(query_id, entity_id),
                               [](const OerRow& r, const auto& key) {
                                   return std::tie(r.query_id, r.entity_id) < key;
                               });
    if (it != rows_.end() && it->query_id == query_id && it->entity_id == entity_id)
        return &*it;
    return nullptr;
}

std::vector<const OerRow*> OerTable::query_rows(const std::string& query_id) const {
    std::vector<const OerRow*> out;
    auto lo = std::lower_bound(rows_.begin(), rows_.end(), query_id,
                               [](const OerRow& r, const std::string& q) { return r.query_id < q; });
    for (auto it = lo; it != rows_.end() && it->query_id == query_id; ++it)
        out.push_back(&*it);
    return out;
}

namespace {
double logit(double p) {
    return std::log(p / (1.0 - p));
}
} // namespace

OerScore oer_score(int df_rel, int df_nonrel, int df_cand, int num_rel, int num_nonrel,
                   const OerConfig& cfg) {
    if (num_rel <= 0 || num_nonrel <= 0)
        throw UsageError("oer_score requires nonempty relevant and non-relevant pools");
    if (cfg.alpha <= 0.0 || cfg.tau_support <= 0.0)
        throw UsageError("alpha and tau_support must be positive");
    OerScore s;
    s.p_rel_hat = (df_rel + cfg.alpha) / (num_rel + 2.0 * cfg.alpha);
    s.p_nonrel_hat = (df_nonrel + cfg.alpha) / (num_nonrel + 2.0 * cfg.alpha);
    s.log_odds_diff = logit(s.p_rel_hat) - logit(s.p_nonrel_hat);
    s.support_w = 1.0 - std::exp(-static_cast<double>(df_cand) / cfg.tau_support);
    s.oer = s.support_w * s.log_odds_diff;
    return s;
}

SignalMode classify_mode(int df_rel, int df_nonrel, int df_cand, double oer,
                         const OerConfig& cfg) {
    if (df_cand <= cfg.sparse_dfcand_max)
        return SignalMode::sparse;
    if (df_cand > cfg.sparse_dfcand_max && df_rel >= 2 && df_rel > df_nonrel &&
        oer >= cfg.core_oer_min)
        return SignalMode::core;
    if (oer <= 0.0 && df_cand >= cfg.bait_dfcand_min)
        return SignalMode::bait;
    if (oer < 0.0 && df_nonrel > df_rel)
        return SignalMode::anti;
    if (oer > 0.0)
        return SignalMode::conditional;
    // oer <= 0 without bait support or a non-relevant majority.
    return df_nonrel >= df_rel ? SignalMode::anti : SignalMode::conditional;
}

OerTable build_oer_table(const CorpusIndex& index, const OerConfig& cfg) {
    std::vector<const std::string*> qids;
    for (const auto& [query_id, qi] : index.queries())
        qids.push_back(&query_id);

    struct QuerySlot {
        bool skipped = false;
        std::vector<OerRow> rows;
    };
    std::vector<QuerySlot> slots(qids.size());
    parallel_for(qids.size(), [&](std::size_t i) {
        const std::string& query_id = *qids[i];
        const auto& qi = index.query(query_id);
        int num_rel = static_cast<int>(qi.relevant.size());
        int num_nonrel = static_cast<int>(qi.judged_nonrel.size());
        if (num_rel == 0 || num_nonrel == 0) {
            slots[i].skipped = true;
            return;
        }
        slots[i].rows.reserve(qi.entity_stats.size());
        for (const auto& [entity_id, st] : qi.entity_stats) {
            OerRow row;
            row.query_id = query_id;
            row.entity_id = entity_id;
            row.df_rel = st.df_rel;
            row.df_nonrel = st.df_nonrel;
            row.df_cand = st.df_cand;
            row.score = oer_score(st.df_rel, st.df_nonrel, st.df_cand, num_rel, num_nonrel, cfg);
            row.mode = classify_mode(st.df_rel, st.df_nonrel, st.df_cand, row.score.oer, cfg);
            slots[i].rows.push_back(std::move(row));
        }
    });

    OerTable table;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].skipped) {
            table.skipped_queries().push_back(*qids[i]);
            continue;
        }
        for (auto& row : slots[i].rows)
            table.add(std::move(row));
    }
    table.sort_rows();
    return table;
}

RunRates run_rates(const Run& entity_run, const OerTable& table, int k) {
    if (entity_run.empty())
        throw DataError("run_rates: empty entity run");
    if (k < 1)
        throw UsageError("run_rates requires k >= 1");
    RunRates rates;
    long long bait = 0, signal = 0, sparse = 0, top1_bait = 0;
    for (const auto& [query_id, entries] : entity_run) {
        std::size_t depth = std::min<std::size_t>(k, entries.size());
        for (std::size_t i = 0; i < depth; ++i) {
            const OerRow* row = table.find(query_id, entries[i].id);
            SignalMode mode = row ? row->mode : SignalMode::sparse;
            switch (mode) {
            case SignalMode::bait:
            case SignalMode::anti:
                ++bait;
                if (i == 0)
                    ++top1_bait;
                break;
            case SignalMode::core:
            case SignalMode::conditional:
                ++signal;
                break;
            case SignalMode::sparse:
                ++sparse;
                break;
            }
        }
        rates.slots += static_cast<long long>(depth);
        ++rates.queries;
    }
    if (rates.slots > 0) {
        rates.bait_rate = static_cast<double>(bait) / rates.slots;
        rates.signal_rate = static_cast<double>(signal) / rates.slots;
        rates.sparse_rate = static_cast<double>(sparse) / rates.slots;
    }
    rates.top1_bait_rate = static_cast<double>(top1_bait) / rates.queries;
    return rates;
}

std::vector<RunEntry> local_idf_rescale(const std::vector<RunEntry>& entries,
                                        const CorpusIndex& index, const std::string& query_id) {
    const auto& qi = index.query(query_id);
    double n_q = static_cast<double>(qi.pool.size());
    std::vector<RunEntry> out = entries;
    for (auto& e : out) {
        auto it = qi.entity_stats.find(e.id);
        int df_cand = it == qi.entity_stats.end() ? 0 : it->second.df_cand;
        if (df_cand == 0) {
            e.score = 0.0;
        } else {
            double idf = std::log((n_q + 1.0) / (df_cand + 1.0)) + 1.0;
            e.score *= idf;
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id > b.id;
    });
    int r = 1;
    for (auto& e : out)
        e.rank = r++;
    return out;
}

Run local_idf_rescale(const Run& entity_run, const CorpusIndex& index) {
    Run out;
    for (const auto& [query_id, entries] : entity_run) {
        if (!index.has_query(query_id))
            continue;
        out[query_id] = local_idf_rescale(entries, index, query_id);
    }
    return out;
}

FilterResult oer_filter(const Run& entity_run, const OerTable& table, double threshold) {
    FilterResult result;
    for (const auto& [query_id, entries] : entity_run) {
        std::vector<RunEntry> kept;
        for (const auto& e : entries) {
            const OerRow* row = table.find(query_id, e.id);
            if (row && row->score.oer >= threshold)
                kept.push_back(e);
        }
        int r = 1;
        for (auto& e : kept)
            e.rank = r++;
        if (kept.empty())
            result.emptied_queries.push_back(query_id);
        result.run[query_id] = std::move(kept);
    }
    return result;
}

Report oer_table_report(const OerTable& table) {
    Report report({"qid", "entity", "df_rel", "df_nonrel", "df_cand", "oer", "mode"});
    for (const auto& row : table.rows()) {
        report.begin_row()
            .add(row.query_id)
            .add(row.entity_id)
            .add(row.df_rel)
            .add(row.df_nonrel)
            .add(row.df_cand)
            .add(row.score.oer)
            .add(std::string(to_string(row.mode)));
    }
    return report;
}

OerTable read_oer_table_tsv(const std::string& path) {
    TsvTable tsv = read_tsv(path);
    auto qid_col = tsv.column_index("qid");
    auto ent_col = tsv.column_index("entity");
    auto rel_col = tsv.column_index("df_rel");
    auto nonrel_col = tsv.column_index("df_nonrel");
    auto cand_col = tsv.column_index("df_cand");
    auto oer_col = tsv.column_index("oer");
    auto mode_col = tsv.column_index("mode");
    OerTable table;
    std::size_t lineno = 1;
    for (const auto& row : tsv.rows) {
        ++lineno;
        OerRow r;
        r.query_id = row[qid_col];
        r.entity_id = row[ent_col];
        auto df_rel = parse_int(row[rel_col]);
        auto df_nonrel = parse_int(row[nonrel_col]);
        auto df_cand = parse_int(row[cand_col]);
        auto oer = parse_real(row[oer_col]);
        auto mode = signal_mode_from_string(row[mode_col]);
        if (!df_rel || !df_nonrel || !df_cand || !oer || !mode)
            throw DataError(path, lineno, "malformed OER table row");
        r.df_rel = static_cast<int>(*df_rel);
        r.df_nonrel = static_cast<int>(*df_nonrel);
        r.df_cand = static_cast<int>(*df_cand);
        r.score.oer = *oer;
        r.mode = *mode;
        table.add(std::move(r));
    }
    table.sort_rows();
    return table;
}

} // namespace entsig
