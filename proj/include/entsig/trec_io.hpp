#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "entsig/corpus.hpp"

namespace entsig {

// One line of a TREC run file: `qid Q0 id rank score tag`. The id column
// carries document ids for doc runs and entity ids for entity runs.
struct RunEntry {
    std::string id;
    int rank = 0;
    double score = 0.0;
    std::string tag;
};

// Per-query ranked lists, keyed by query id, entries ordered by rank.
using Run = std::map<std::string, std::vector<RunEntry>>;

enum class RunKind { doc, entity };

// `qid 0 docid grade`, whitespace separated. Duplicate (qid,docid) pairs
// with differing grades are an error naming both lines.
Qrels read_qrels(const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);

// `qid Q0 id rank score tag`. Strict mode requires per-query ranks to be
// unique and strictly increasing in file order; lenient re-sorts each query
// by (score desc, id desc) and reassigns ranks 1..n.
Run read_run(const std::string& path, RunKind kind, bool lenient = false);
void write_run(const Run& run, const std::string& path);

// One JSON object per line:
//   {"doc_id": str, "entities": [{"entity_id": str, "rho": num, "mentions": int}]}
// rho aggregated by max per (doc, entity), mentions summed.
EntityLinks read_entity_links(const std::string& path);
void write_entity_links(const EntityLinks& links, const std::string& path);

// Candidate pools ride the run format; validates pool invariants
// (ranks 1..n contiguous, scores non-increasing).
CandidatePool read_candidate_pool(const std::string& path, bool lenient = false);

// Tabular report with deterministic column order. Reals print with a fixed
// number of decimals (default 4); absent values print as NA (TSV) / null (JSON).
class Report {
public:
    struct Cell {
        enum class Kind { text, integer, real, real_full, missing } kind = Kind::missing;
        std::string text;
        long long i = 0;
        double d = 0.0;
    };

    explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    Report& begin_row();
    Report& add(const std::string& v);
    Report& add(long long v);
    Report& add(int v) { return add(static_cast<long long>(v)); }
    Report& add(double v);
    Report& add_full(double v); // shortest round-trip, for score-like fields
    Report& add_missing();

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    void write_tsv(std::ostream& out, int decimals = 4) const;
    void write_json(std::ostream& out, int decimals = 4) const;
    // format: "tsv" or "json"; path "-" writes to stdout.
    void write(const std::string& format, const std::string& path, int decimals = 4) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

// Whole-file TSV reader for analysis inputs (header + rows, joinable by qid).
struct TsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const; // throws DataError
};
TsvTable read_tsv(const std::string& path);

} // namespace entsig
