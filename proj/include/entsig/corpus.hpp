#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entsig/common.hpp"

namespace entsig {

// Document-level relevance judgments. Relevance predicate: grade >= 1.
class Qrels {
public:
    void set(std::string query_id, std::string doc_id, int grade);
    std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;
    bool relevant(const std::string& query_id, const std::string& doc_id) const;
    bool has_query(const std::string& query_id) const;
    const std::map<std::string, std::map<std::string, int>>& by_query() const { return by_query_; }
    std::size_t size() const;

private:
    std::map<std::string, std::map<std::string, int>> by_query_;
};

struct EntityMention {
    std::string entity_id;
    double rho = 0.0;
    int mentions = 1;
};

// Per-document linked entity sets. An entity appears at most once per
// document: rho is the max over mentions, mention counts are summed.
class EntityLinks {
public:
    void add(const std::string& doc_id, const std::string& entity_id, double rho, int mentions);
    void add_empty_doc(const std::string& doc_id);
    // Replaces the document's mention list in one shot; aggregates duplicate
    // entity ids by max rho / summed mentions. False when the doc exists.
    bool set_doc(std::string doc_id, std::vector<EntityMention> mentions);
    bool has_doc(const std::string& doc_id) const;
    // nullptr when the document is unknown; empty vector for a known
    // document with no linked entities.
    const std::vector<EntityMention>* find(const std::string& doc_id) const;
    const std::map<std::string, std::vector<EntityMention>>& docs() const { return docs_; }
    // Drops links with rho below the threshold; documents stay present.
    EntityLinks filtered_by_rho(double min_rho) const;

private:
    std::map<std::string, std::vector<EntityMention>> docs_;
};

struct PooledDoc {
    std::string doc_id;
    int rank = 0;
    double score = 0.0;
};

// First-stage candidate pools, one ranked document list per query.
class CandidatePool {
public:
    void set(const std::string& query_id, std::vector<PooledDoc> docs);
    const std::vector<PooledDoc>* find(const std::string& query_id) const;
    const std::map<std::string, std::vector<PooledDoc>>& by_query() const { return by_query_; }

private:
    std::map<std::string, std::vector<PooledDoc>> by_query_;
};

// Inverted per-(query, entity) statistics over the candidate pool.
// df_cand = df_rel + df_nonrel + df_unjudged; each document contributes
// at most once per entity.
struct EntityStats {
    int df_rel = 0;
    int df_nonrel = 0;
    int df_cand = 0;
    std::vector<int> ranks;          // candidate ranks containing the entity, ascending
    std::vector<double> rho_per_doc; // aligned with ranks
};

struct IndexOptions {
    bool lenient_missing_docs = false;      // pool docs absent from links -> empty entity set
    std::optional<double> rho_threshold;    // filter links below this rho before indexing
};

struct QueryIndex {
    std::vector<PooledDoc> pool;               // ordered by rank
    std::set<std::string> relevant;            // R_q: relevant judged docs in the pool
    std::set<std::string> judged_nonrel;       // NR_q: grade-0 judged docs in the pool
    std::map<std::string, EntityStats> entity_stats;
};

// Immutable after build; shared read-only by every downstream module.
class CorpusIndex {
public:
    static CorpusIndex build(const Qrels& qrels, const CandidatePool& pools,
                             const EntityLinks& links, const IndexOptions& opts = {});

    const std::map<std::string, QueryIndex>& queries() const { return queries_; }
    const QueryIndex& query(const std::string& query_id) const;
    bool has_query(const std::string& query_id) const;
    const Qrels& qrels() const { return qrels_; }
    const EntityLinks& links() const { return links_; }

    // Linked entities of a pool document (empty when none).
    const std::vector<EntityMention>& doc_entities(const std::string& doc_id) const;

    // True iff the document's linked entities intersect entity_set.
    // Throws DataError when doc_id is not in the query's pool.
    bool entity_presence(const std::string& query_id, const std::string& doc_id,
                         const std::set<std::string>& entity_set) const;

    const std::vector<std::string>& dropped_queries() const { return dropped_queries_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // Recomputes EntityPoolStats and R/NR sets from the raw inputs and
    // compares with the stored index. Used by index-check and tests.
    bool recount_matches() const;

private:
    Qrels qrels_;
    EntityLinks links_;
    std::map<std::string, QueryIndex> queries_;
    std::vector<std::string> dropped_queries_;
    std::vector<std::string> warnings_;
};

} // namespace entsig
