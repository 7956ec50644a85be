#include "entsig/corpus.hpp"

#include <algorithm>
#include <unordered_map>

namespace entsig {

void Qrels::set(std::string query_id, std::string doc_id, int grade) {
    if (grade < 0)
        throw DataError("negative relevance grade for (" + query_id + ", " + doc_id + ")");
    by_query_[std::move(query_id)][std::move(doc_id)] = grade;
}

std::optional<int> Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end())
        return std::nullopt;
    auto d = q->second.find(doc_id);
    if (d == q->second.end())
        return std::nullopt;
    return d->second;
}

bool Qrels::relevant(const std::string& query_id, const std::string& doc_id) const {
    auto g = grade(query_id, doc_id);
    return g && *g >= 1;
}

bool Qrels::has_query(const std::string& query_id) const {
    return by_query_.count(query_id) > 0;
}

std::size_t Qrels::size() const {
    std::size_t n = 0;
    for (const auto& [q, docs] : by_query_)
        n += docs.size();
    return n;
}

void EntityLinks::add(const std::string& doc_id, const std::string& entity_id, double rho,
                      int mentions) {
    if (rho < 0.0 || rho > 1.0)
        throw DataError("rho outside [0,1] for entity " + entity_id + " in doc " + doc_id);
    if (mentions < 1)
        throw DataError("mention count < 1 for entity " + entity_id + " in doc " + doc_id);
    auto& ents = docs_[doc_id];
    auto it = std::lower_bound(ents.begin(), ents.end(), entity_id,
                               [](const EntityMention& m, const std::string& id) {
                                   return m.entity_id < id;
                               });
    if (it != ents.end() && it->entity_id == entity_id) {
        it->rho = std::max(it->rho, rho);
        it->mentions += mentions;
    } else {
        ents.insert(it, EntityMention{entity_id, rho, mentions});
    }
}

void EntityLinks::add_empty_doc(const std::string& doc_id) {
    docs_.try_emplace(doc_id);
}

bool EntityLinks::set_doc(std::string doc_id, std::vector<EntityMention> mentions) {
    std::sort(mentions.begin(), mentions.end(),
              [](const EntityMention& a, const EntityMention& b) {
                  return a.entity_id < b.entity_id;
              });
    std::vector<EntityMention> dedup;
    dedup.reserve(mentions.size());
    for (auto& m : mentions) {
        if (!dedup.empty() && dedup.back().entity_id == m.entity_id) {
            dedup.back().rho = std::max(dedup.back().rho, m.rho);
            dedup.back().mentions += m.mentions;
        } else {
            dedup.push_back(std::move(m));
        }
    }
    return docs_.try_emplace(std::move(doc_id), std::move(dedup)).second;
}

bool EntityLinks::has_doc(const std::string& doc_id) const {
    return docs_.count(doc_id) > 0;
}

const std::vector<EntityMention>* EntityLinks::find(const std::string& doc_id) const {
    auto it = docs_.find(doc_id);
    return it == docs_.end() ? nullptr : &it->second;
}

EntityLinks EntityLinks::filtered_by_rho(double min_rho) const {
    EntityLinks out;
    for (const auto& [doc, ents] : docs_) {
        out.add_empty_doc(doc);
        for (const auto& m : ents)
            if (m.rho >= min_rho)
                out.add(doc, m.entity_id, m.rho, m.mentions);
    }
    return out;
}

void CandidatePool::set(const std::string& query_id, std::vector<PooledDoc> docs) {
    by_query_[query_id] = std::move(docs);
}

const std::vector<PooledDoc>* CandidatePool::find(const std::string& query_id) const {
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
}

namespace {

QueryIndex build_query(const std::string& query_id, const std::vector<PooledDoc>& pool,
                       const Qrels& qrels, const EntityLinks& links) {
    QueryIndex qi;
    qi.pool = pool;
    // Accumulate in a hash map (docs arrive in rank order, so per-entity
    // rank lists stay sorted), then move into the ordered map once.
    std::unordered_map<std::string, EntityStats> stats;
    const std::map<std::string, int>* judged = nullptr;
    if (auto it = qrels.by_query().find(query_id); it != qrels.by_query().end())
        judged = &it->second;
    for (const auto& doc : pool) {
        const int* grade = nullptr;
        if (judged) {
            if (auto it = judged->find(doc.doc_id); it != judged->end())
                grade = &it->second;
        }
        bool rel = grade && *grade >= 1;
        if (grade) {
            if (rel)
                qi.relevant.insert(doc.doc_id);
            else
                qi.judged_nonrel.insert(doc.doc_id);
        }
        const auto* ents = links.find(doc.doc_id);
        if (!ents)
            continue;
        for (const auto& m : *ents) {
            auto& st = stats[m.entity_id];
            st.df_cand += 1;
            if (grade) {
                if (rel)
                    st.df_rel += 1;
                else
                    st.df_nonrel += 1;
            }
            st.ranks.push_back(doc.rank);
            st.rho_per_doc.push_back(m.rho);
        }
    }
    for (auto& [entity, st] : stats)
        qi.entity_stats.emplace(entity, std::move(st));
    return qi;
}

} // namespace

CorpusIndex CorpusIndex::build(const Qrels& qrels, const CandidatePool& pools,
                               const EntityLinks& links, const IndexOptions& opts) {
    CorpusIndex index;
    index.qrels_ = qrels;
    index.links_ = opts.rho_threshold ? links.filtered_by_rho(*opts.rho_threshold) : links;

    for (const auto& [query_id, pool] : pools.by_query()) {
        if (pool.empty()) {
            index.dropped_queries_.push_back(query_id);
            index.warnings_.push_back("query " + query_id + " has an empty pool; dropped");
            continue;
        }
        std::set<std::string> seen;
        for (const auto& doc : pool) {
            if (!seen.insert(doc.doc_id).second)
                throw DataError("duplicate doc " + doc.doc_id + " in pool for query " + query_id);
            if (!index.links_.has_doc(doc.doc_id)) {
                if (!opts.lenient_missing_docs)
                    throw DataError("pool doc " + doc.doc_id + " for query " + query_id +
                                    " is absent from the entity links (use the lenient flag to "
                                    "treat it as having no entities)");
                index.links_.add_empty_doc(doc.doc_id);
            }
        }
        if (!qrels.has_query(query_id))
            index.warnings_.push_back("query " + query_id +
                                      " has no relevance judgments; all candidates unjudged");
        index.queries_[query_id] = build_query(query_id, pool, qrels, index.links_);
    }
    return index;
}

const QueryIndex& CorpusIndex::query(const std::string& query_id) const {
    auto it = queries_.find(query_id);
    if (it == queries_.end())
        throw UsageError("unknown query id: " + query_id);
    return it->second;
}

bool CorpusIndex::has_query(const std::string& query_id) const {
    return queries_.count(query_id) > 0;
}

const std::vector<EntityMention>& CorpusIndex::doc_entities(const std::string& doc_id) const {
    static const std::vector<EntityMention> kEmpty;
    const auto* ents = links_.find(doc_id);
    return ents ? *ents : kEmpty;
}

bool CorpusIndex::entity_presence(const std::string& query_id, const std::string& doc_id,
                                  const std::set<std::string>& entity_set) const {
    const auto& qi = query(query_id);
    bool in_pool = std::any_of(qi.pool.begin(), qi.pool.end(),
                               [&](const PooledDoc& d) { return d.doc_id == doc_id; });
    if (!in_pool)
        throw DataError("doc " + doc_id + " is not in the candidate pool of query " + query_id);
    if (entity_set.empty())
        return false;
    for (const auto& m : doc_entities(doc_id))
        if (entity_set.count(m.entity_id))
            return true;
    return false;
}

bool CorpusIndex::recount_matches() const {
    for (const auto& [query_id, qi] : queries_) {
        QueryIndex fresh = build_query(query_id, qi.pool, qrels_, links_);
        if (fresh.relevant != qi.relevant || fresh.judged_nonrel != qi.judged_nonrel)
            return false;
        if (fresh.entity_stats.size() != qi.entity_stats.size())
            return false;
        for (const auto& [entity, st] : qi.entity_stats) {
            auto it = fresh.entity_stats.find(entity);
            if (it == fresh.entity_stats.end())
                return false;
            const auto& f = it->second;
            if (f.df_rel != st.df_rel || f.df_nonrel != st.df_nonrel ||
                f.df_cand != st.df_cand || f.ranks != st.ranks ||
                f.rho_per_doc != st.rho_per_doc)
                return false;
        }
    }
    return true;
}

} // namespace entsig
