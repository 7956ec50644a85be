#include "entsig/trec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace entsig {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    return out;
}

} // namespace

Qrels read_qrels(const std::string& path) {
    auto in = open_input(path);
    Qrels qrels;
    // qid -> docid -> (grade, first line)
    std::unordered_map<std::string, std::unordered_map<std::string, std::pair<int, std::size_t>>>
        seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_ws(line);
        if (fields.empty())
            continue;
        if (fields.size() != 4)
            throw DataError(path, lineno,
                            "expected `qid 0 docid grade`, got " +
                                std::to_string(fields.size()) + " fields");
        auto grade = parse_int(fields[3]);
        if (!grade)
            throw DataError(path, lineno, "non-integer grade `" + std::string(fields[3]) + "`");
        if (*grade < 0)
            throw DataError(path, lineno, "negative grade " + std::to_string(*grade));
        std::string qid(fields[0]);
        std::string docid(fields[2]);
        auto [it, fresh] = seen[qid].try_emplace(docid, static_cast<int>(*grade), lineno);
        if (!fresh) {
            if (it->second.first != static_cast<int>(*grade))
                throw DataError(path, lineno,
                                "duplicate judgment for (" + qid + ", " + docid +
                                    ") with differing grade; first seen at line " +
                                    std::to_string(it->second.second));
            continue;
        }
        qrels.set(std::move(qid), std::move(docid), static_cast<int>(*grade));
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [qid, docs] : qrels.by_query())
        for (const auto& [docid, grade] : docs)
            out << qid << " 0 " << docid << " " << grade << "\n";
}

Run read_run(const std::string& path, RunKind kind, bool lenient) {
    auto in = open_input(path);
    const char* what = kind == RunKind::doc ? "doc" : "entity";
    Run run;
    std::unordered_map<std::string, std::unordered_set<std::string>> ids_seen;
    std::unordered_map<std::string, int> last_rank;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_ws(line);
        if (fields.empty())
            continue;
        if (fields.size() != 6)
            throw DataError(path, lineno,
                            "expected `qid Q0 id rank score tag`, got " +
                                std::to_string(fields.size()) + " fields");
        auto rank = parse_int(fields[3]);
        if (!rank)
            throw DataError(path, lineno, "non-integer rank `" + std::string(fields[3]) + "`");
        auto score = parse_real(fields[4]);
        if (!score)
            throw DataError(path, lineno, "non-numeric score `" + std::string(fields[4]) + "`");
        std::string qid(fields[0]);
        std::string id(fields[2]);
        if (!ids_seen[qid].insert(id).second)
            throw DataError(path, lineno,
                            std::string("duplicate ") + what + " id " + id + " in query " + qid);
        if (!lenient) {
            auto it = last_rank.find(qid);
            if (it != last_rank.end() && static_cast<int>(*rank) <= it->second)
                throw DataError(path, lineno,
                                "ranks for query " + qid +
                                    " are not strictly increasing (use the lenient flag to "
                                    "re-sort by score)");
            last_rank[qid] = static_cast<int>(*rank);
        }
        run[qid].push_back(
            RunEntry{std::move(id), static_cast<int>(*rank), *score, std::string(fields[5])});
    }
    if (lenient) {
        for (auto& [qid, entries] : run) {
            std::stable_sort(entries.begin(), entries.end(),
                             [](const RunEntry& a, const RunEntry& b) {
                                 if (a.score != b.score)
                                     return a.score > b.score;
                                 return a.id > b.id;
                             });
            int r = 1;
            for (auto& e : entries)
                e.rank = r++;
        }
    }
    if (run.empty())
        std::cerr << "warning: " << path << " contains no run records\n";
    return run;
}

void write_run(const Run& run, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [qid, entries] : run)
        for (const auto& e : entries)
            out << qid << " Q0 " << e.id << " " << e.rank << " " << real_to_string(e.score)
                << " " << e.tag << "\n";
}

namespace {

struct LinkEntity {
    std::string entity_id;
    double rho = 0.0;
    std::optional<int> mentions;
};

struct LinkLine {
    std::string doc_id;
    std::vector<LinkEntity> entities;
};

// Scanner for canonical link lines: flat objects, no escape sequences, keys
// in any order. Returns nullopt on anything unusual so the caller can fall
// back to the full JSON parser.
class FastLinkScanner {
public:
    explicit FastLinkScanner(std::string_view s) : s_(s) {}

    std::optional<LinkLine> parse() {
        LinkLine out;
        bool saw_doc = false, saw_entities = false;
        skip_ws();
        if (!eat('{'))
            return std::nullopt;
        if (!eat('}')) {
            while (true) {
                auto key = parse_string();
                if (!key || !eat(':'))
                    return std::nullopt;
                if (*key == "doc_id") {
                    auto v = parse_string();
                    if (!v)
                        return std::nullopt;
                    out.doc_id = std::string(*v);
                    saw_doc = true;
                } else if (*key == "entities") {
                    if (!parse_entities(out))
                        return std::nullopt;
                    saw_entities = true;
                } else {
                    return std::nullopt; // unknown key: let the full parser decide
                }
                if (eat(','))
                    continue;
                if (eat('}'))
                    break;
                return std::nullopt;
            }
        }
        skip_ws();
        if (pos_ != s_.size() || !saw_doc || !saw_entities)
            return std::nullopt;
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r'))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::optional<std::string_view> parse_string() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '"')
            return std::nullopt;
        std::size_t start = ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\')
                return std::nullopt; // escapes take the slow path
            ++pos_;
        }
        if (pos_ >= s_.size())
            return std::nullopt;
        return s_.substr(start, pos_++ - start);
    }
    std::optional<double> parse_number() {
        skip_ws();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (ec != std::errc{} || ptr == s_.data() + pos_)
            return std::nullopt;
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return v;
    }
    bool parse_entities(LinkLine& out) {
        if (!eat('['))
            return false;
        if (eat(']'))
            return true;
        while (true) {
            if (!eat('{'))
                return false;
            std::string_view entity_id;
            double rho = -1.0;
            std::optional<int> mentions;
            bool saw_id = false, saw_rho = false;
            if (!eat('}')) {
                while (true) {
                    auto key = parse_string();
                    if (!key || !eat(':'))
                        return false;
                    if (*key == "entity_id") {
                        auto v = parse_string();
                        if (!v)
                            return false;
                        entity_id = *v;
                        saw_id = true;
                    } else if (*key == "rho") {
                        auto v = parse_number();
                        if (!v)
                            return false;
                        rho = *v;
                        saw_rho = true;
                    } else if (*key == "mentions") {
                        auto v = parse_number();
                        if (!v || *v != std::floor(*v))
                            return false;
                        mentions = static_cast<int>(*v);
                    } else {
                        return false;
                    }
                    if (eat(','))
                        continue;
                    if (eat('}'))
                        break;
                    return false;
                }
            }
            if (!saw_id || !saw_rho)
                return false;
            out.entities.push_back(LinkEntity{std::string(entity_id), rho, mentions});
            if (eat(','))
                continue;
            if (eat(']'))
                return true;
            return false;
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

LinkLine parse_link_line_slow(const std::string& path, std::size_t lineno,
                              const std::string& line) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("doc_id") || !obj["doc_id"].is_string() ||
        !obj.contains("entities") || !obj["entities"].is_array())
        throw DataError(path, lineno, "expected {\"doc_id\": str, \"entities\": [...]}");
    LinkLine out;
    out.doc_id = obj["doc_id"].get<std::string>();
    for (const auto& ent : obj["entities"]) {
        if (!ent.is_object() || !ent.contains("entity_id") || !ent["entity_id"].is_string() ||
            !ent.contains("rho") || !ent["rho"].is_number())
            throw DataError(path, lineno,
                            "expected {\"entity_id\": str, \"rho\": num, \"mentions\": int}");
        std::optional<int> mentions;
        if (ent.contains("mentions")) {
            if (!ent["mentions"].is_number_integer())
                throw DataError(path, lineno, "non-integer mention count");
            mentions = ent["mentions"].get<int>();
        }
        out.entities.push_back(
            LinkEntity{ent["entity_id"].get<std::string>(), ent["rho"].get<double>(), mentions});
    }
    return out;
}

} // namespace

EntityLinks read_entity_links(const std::string& path) {
    auto in = open_input(path);
    EntityLinks links;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        auto fast = FastLinkScanner(line).parse();
        LinkLine parsed = fast ? std::move(*fast) : parse_link_line_slow(path, lineno, line);
        std::vector<EntityMention> mentions;
        mentions.reserve(parsed.entities.size());
        for (auto& ent : parsed.entities) {
            if (ent.rho < 0.0 || ent.rho > 1.0)
                throw DataError(path, lineno,
                                "rho " + real_to_string(ent.rho) + " outside [0,1]");
            if (ent.mentions && *ent.mentions < 1)
                throw DataError(path, lineno, "mention count < 1");
            mentions.push_back(EntityMention{std::move(ent.entity_id), ent.rho,
                                             ent.mentions.value_or(1)});
        }
        std::string doc_name = parsed.doc_id;
        if (!links.set_doc(std::move(parsed.doc_id), std::move(mentions)))
            throw DataError(path, lineno, "duplicate doc_id " + doc_name);
    }
    return links;
}

void write_entity_links(const EntityLinks& links, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [doc_id, ents] : links.docs()) {
        nlohmann::ordered_json obj;
        obj["doc_id"] = doc_id;
        obj["entities"] = nlohmann::ordered_json::array();
        for (const auto& m : ents) {
            nlohmann::ordered_json e;
            e["entity_id"] = m.entity_id;
            e["rho"] = m.rho;
            e["mentions"] = m.mentions;
            obj["entities"].push_back(std::move(e));
        }
        out << obj.dump() << "\n";
    }
}

CandidatePool read_candidate_pool(const std::string& path, bool lenient) {
    Run run = read_run(path, RunKind::doc, lenient);
    CandidatePool pools;
    for (const auto& [qid, entries] : run) {
        std::vector<PooledDoc> docs;
        docs.reserve(entries.size());
        int expected = 1;
        double prev_score = 0.0;
        for (const auto& e : entries) {
            if (e.rank != expected)
                throw DataError("candidate pool for query " + qid + " has rank " +
                                std::to_string(e.rank) + " where " + std::to_string(expected) +
                                " was expected (pool ranks must be 1..n)");
            if (expected > 1 && e.score > prev_score)
                throw DataError("candidate pool for query " + qid +
                                " has scores increasing with rank at rank " +
                                std::to_string(e.rank));
            docs.push_back(PooledDoc{e.id, e.rank, e.score});
            prev_score = e.score;
            ++expected;
        }
        pools.set(qid, std::move(docs));
    }
    return pools;
}

Report& Report::begin_row() {
    rows_.emplace_back();
    rows_.back().reserve(columns_.size());
    return *this;
}

Report& Report::add(const std::string& v) {
    rows_.back().push_back(Cell{Cell::Kind::text, v, 0, 0.0});
    return *this;
}

Report& Report::add(long long v) {
    rows_.back().push_back(Cell{Cell::Kind::integer, {}, v, 0.0});
    return *this;
}

Report& Report::add(double v) {
    rows_.back().push_back(Cell{Cell::Kind::real, {}, 0, v});
    return *this;
}

Report& Report::add_full(double v) {
    rows_.back().push_back(Cell{Cell::Kind::real_full, {}, 0, v});
    return *this;
}

Report& Report::add_missing() {
    rows_.back().push_back(Cell{});
    return *this;
}

namespace {

std::string cell_text(const Report::Cell& c, int decimals) {
    switch (c.kind) {
    case Report::Cell::Kind::text:
        return c.text;
    case Report::Cell::Kind::integer:
        return std::to_string(c.i);
    case Report::Cell::Kind::real:
        return fixed_to_string(c.d, decimals);
    case Report::Cell::Kind::real_full:
        return real_to_string(c.d);
    case Report::Cell::Kind::missing:
        return "NA";
    }
    return {};
}

} // namespace

void Report::write_tsv(std::ostream& out, int decimals) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "\t" : "") << columns_[i];
    out << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "\t" : "") << cell_text(row[i], decimals);
        out << "\n";
    }
}

void Report::write_json(std::ostream& out, int decimals) const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size() && i < columns_.size(); ++i) {
            const auto& c = row[i];
            switch (c.kind) {
            case Cell::Kind::text:
                obj[columns_[i]] = c.text;
                break;
            case Cell::Kind::integer:
                obj[columns_[i]] = c.i;
                break;
            case Cell::Kind::real:
                // Fixed decimals for metric fields, as in the TSV output.
                obj[columns_[i]] = nlohmann::ordered_json::parse(fixed_to_string(c.d, decimals));
                break;
            case Cell::Kind::real_full:
                obj[columns_[i]] = c.d;
                break;
            case Cell::Kind::missing:
                obj[columns_[i]] = nullptr;
                break;
            }
        }
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << "\n";
}

void Report::write(const std::string& format, const std::string& path, int decimals) const {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (path != "-") {
        file = open_output(path);
        out = &file;
    }
    if (format == "tsv")
        write_tsv(*out, decimals);
    else if (format == "json")
        write_json(*out, decimals);
    else
        throw UsageError("unknown report format: " + format);
}

std::size_t TsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw DataError("column `" + name + "` not found in table");
}

TsvTable read_tsv(const std::string& path) {
    auto in = open_input(path);
    TsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos)
                break;
            start = tab + 1;
        }
        if (table.columns.empty()) {
            table.columns = std::move(fields);
        } else {
            if (fields.size() != table.columns.size())
                throw DataError(path, lineno,
                                "row has " + std::to_string(fields.size()) + " fields, header has " +
                                    std::to_string(table.columns.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.columns.empty())
        throw DataError(path, 0, "empty table");
    return table;
}

} // namespace entsig
