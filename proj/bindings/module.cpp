// Python bindings for the diagnostics core. Thin wrappers: file readers,
// the index, and the per-module operations with keyword-friendly signatures.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entsig/analysis.hpp"
#include "entsig/consensus.hpp"
#include "entsig/corpus.hpp"
#include "entsig/coverage.hpp"
#include "entsig/doc_eval.hpp"
#include "entsig/oer.hpp"
#include "entsig/supervision.hpp"
#include "entsig/synth.hpp"
#include "entsig/trec_io.hpp"

namespace py = pybind11;
using namespace entsig;

namespace {

NonRelDenominator parse_nonrel(const std::string& s) {
    if (s == "judged")
        return NonRelDenominator::judged_only;
    if (s == "pool-complement")
        return NonRelDenominator::pool_complement;
    throw UsageError("nonrel must be `judged` or `pool-complement`");
}

EvalMode parse_mode(const std::string& s) {
    if (s == "conditional")
        return EvalMode::conditional;
    if (s == "open-world")
        return EvalMode::open_world;
    throw UsageError("mode must be `conditional` or `open-world`");
}

ConsensusVariant parse_variant(const std::string& s) {
    if (s == "rho")
        return ConsensusVariant::rho;
    if (s == "rank")
        return ConsensusVariant::rank;
    if (s == "rho_rank")
        return ConsensusVariant::rho_rank;
    throw UsageError("variant must be rho, rank, or rho_rank");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "entity-channel diagnostics for entity-oriented retrieval";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

    // --- core containers ---
    py::class_<Qrels>(m, "Qrels")
        .def(py::init<>())
        .def("set", &Qrels::set, py::arg("query_id"), py::arg("doc_id"), py::arg("grade"))
        .def("grade",
             [](const Qrels& q, const std::string& qid, const std::string& d) {
                 return q.grade(qid, d);
             })
        .def("relevant", &Qrels::relevant)
        .def("__len__", &Qrels::size)
        .def("by_query", &Qrels::by_query);

    py::class_<EntityMention>(m, "EntityMention")
        .def(py::init([](std::string entity_id, double rho, int mentions) {
                 return EntityMention{std::move(entity_id), rho, mentions};
             }),
             py::arg("entity_id"), py::arg("rho") = 1.0, py::arg("mentions") = 1)
        .def_readonly("entity_id", &EntityMention::entity_id)
        .def_readonly("rho", &EntityMention::rho)
        .def_readonly("mentions", &EntityMention::mentions);

    py::class_<EntityLinks>(m, "EntityLinks")
        .def(py::init<>())
        .def("add", &EntityLinks::add, py::arg("doc_id"), py::arg("entity_id"), py::arg("rho"),
             py::arg("mentions") = 1)
        .def("add_empty_doc", &EntityLinks::add_empty_doc)
        .def("has_doc", &EntityLinks::has_doc)
        .def("entities",
             [](const EntityLinks& links, const std::string& doc) {
                 const auto* e = links.find(doc);
                 return e ? *e : std::vector<EntityMention>{};
             })
        .def("__len__", [](const EntityLinks& links) { return links.docs().size(); });

    py::class_<PooledDoc>(m, "PooledDoc")
        .def(py::init([](std::string doc_id, int rank, double score) {
                 return PooledDoc{std::move(doc_id), rank, score};
             }),
             py::arg("doc_id"), py::arg("rank"), py::arg("score"))
        .def_readonly("doc_id", &PooledDoc::doc_id)
        .def_readonly("rank", &PooledDoc::rank)
        .def_readonly("score", &PooledDoc::score);

    py::class_<CandidatePool>(m, "CandidatePool")
        .def(py::init<>())
        .def("set", &CandidatePool::set, py::arg("query_id"), py::arg("docs"))
        .def("query_ids", [](const CandidatePool& p) {
            std::vector<std::string> out;
            for (const auto& [qid, docs] : p.by_query())
                out.push_back(qid);
            return out;
        });

    py::class_<RunEntry>(m, "RunEntry")
        .def(py::init([](std::string id, int rank, double score, std::string tag) {
                 return RunEntry{std::move(id), rank, score, std::move(tag)};
             }),
             py::arg("id"), py::arg("rank"), py::arg("score"), py::arg("tag") = "run")
        .def_readonly("id", &RunEntry::id)
        .def_readonly("rank", &RunEntry::rank)
        .def_readonly("score", &RunEntry::score)
        .def_readonly("tag", &RunEntry::tag)
        .def("__repr__", [](const RunEntry& e) {
            return "RunEntry(" + e.id + ", " + std::to_string(e.rank) + ", " +
                   real_to_string(e.score) + ")";
        });

    py::class_<EntityStats>(m, "EntityStats")
        .def_readonly("df_rel", &EntityStats::df_rel)
        .def_readonly("df_nonrel", &EntityStats::df_nonrel)
        .def_readonly("df_cand", &EntityStats::df_cand)
        .def_readonly("ranks", &EntityStats::ranks)
        .def_readonly("rho_per_doc", &EntityStats::rho_per_doc);

    py::class_<CorpusIndex>(m, "CorpusIndex")
        .def("query_ids",
             [](const CorpusIndex& idx) {
                 std::vector<std::string> out;
                 for (const auto& [qid, qi] : idx.queries())
                     out.push_back(qid);
                 return out;
             })
        .def("relevant",
             [](const CorpusIndex& idx, const std::string& qid) { return idx.query(qid).relevant; })
        .def("judged_nonrel",
             [](const CorpusIndex& idx, const std::string& qid) {
                 return idx.query(qid).judged_nonrel;
             })
        .def("pool",
             [](const CorpusIndex& idx, const std::string& qid) { return idx.query(qid).pool; })
        .def("entity_stats",
             [](const CorpusIndex& idx, const std::string& qid) {
                 return idx.query(qid).entity_stats;
             })
        .def("doc_entities", &CorpusIndex::doc_entities)
        .def("entity_presence", &CorpusIndex::entity_presence, py::arg("query_id"),
             py::arg("doc_id"), py::arg("entity_set"))
        .def("dropped_queries", &CorpusIndex::dropped_queries)
        .def("warnings", &CorpusIndex::warnings)
        .def("recount_matches", &CorpusIndex::recount_matches);

    m.def(
        "build_index",
        [](const Qrels& qrels, const CandidatePool& pools, const EntityLinks& links,
           bool lenient_missing_docs, std::optional<double> rho_threshold) {
            IndexOptions opts;
            opts.lenient_missing_docs = lenient_missing_docs;
            opts.rho_threshold = rho_threshold;
            return CorpusIndex::build(qrels, pools, links, opts);
        },
        py::arg("qrels"), py::arg("pools"), py::arg("links"),
        py::arg("lenient_missing_docs") = false, py::arg("rho_threshold") = py::none());

    // --- file formats ---
    m.def("read_qrels", &read_qrels);
    m.def("write_qrels", &write_qrels);
    m.def(
        "read_run",
        [](const std::string& path, const std::string& kind, bool lenient) {
            return read_run(path, kind == "entity" ? RunKind::entity : RunKind::doc, lenient);
        },
        py::arg("path"), py::arg("kind") = "doc", py::arg("lenient") = false);
    m.def("write_run", &write_run);
    m.def("read_entity_links", &read_entity_links);
    m.def("write_entity_links", &write_entity_links);
    m.def("read_candidate_pool", &read_candidate_pool, py::arg("path"),
          py::arg("lenient") = false);
    m.def("read_oer_table_tsv", &read_oer_table_tsv);

    // --- coverage ---
    py::class_<CoverageRow>(m, "CoverageRow")
        .def_readonly("query_id", &CoverageRow::query_id)
        .def_readonly("k", &CoverageRow::k)
        .def_readonly("relcov", &CoverageRow::relcov)
        .def_readonly("nonrelcov", &CoverageRow::nonrelcov)
        .def_readonly("discratio", &CoverageRow::discratio)
        .def_readonly("overlap", &CoverageRow::overlap)
        .def_readonly("oraclecov", &CoverageRow::oraclecov)
        .def_readonly("obscov", &CoverageRow::obscov);
    py::class_<CoverageReport>(m, "CoverageReport")
        .def_readonly("rows", &CoverageReport::rows)
        .def_readonly("aggregate", &CoverageReport::aggregate)
        .def_readonly("skipped_queries", &CoverageReport::skipped_queries);
    py::class_<OracleCover>(m, "OracleCover")
        .def_readonly("entities", &OracleCover::entities)
        .def_readonly("coverage", &OracleCover::coverage);

    m.def("rel_cov", &rel_cov, py::arg("index"), py::arg("entity_run"), py::arg("query_id"),
          py::arg("k"));
    m.def(
        "nonrel_cov",
        [](const CorpusIndex& index, const Run& run, const std::string& qid, int k,
           const std::string& nonrel) {
            return nonrel_cov(index, run, qid, k, parse_nonrel(nonrel));
        },
        py::arg("index"), py::arg("entity_run"), py::arg("query_id"), py::arg("k"),
        py::arg("nonrel") = "judged");
    m.def("disc_ratio", &disc_ratio, py::arg("relcov"), py::arg("nonrelcov"),
          py::arg("epsilon") = 1e-6);
    m.def("mean_overlap", &mean_overlap, py::arg("index"), py::arg("entity_run"),
          py::arg("query_id"), py::arg("k"));
    m.def("oracle_cover", &oracle_cover, py::arg("index"), py::arg("query_id"));
    m.def(
        "observable_cov",
        [](const CorpusIndex& index, const OerTable& table, const std::string& qid, int k,
           std::optional<Run> run) {
            return observable_cov(index, table, qid, k, run ? &*run : nullptr);
        },
        py::arg("index"), py::arg("oer_table"), py::arg("query_id"), py::arg("k") = 0,
        py::arg("entity_run") = py::none());
    m.def(
        "coverage_report",
        [](const CorpusIndex& index, const Run& run, std::vector<int> k_values, double epsilon,
           const std::string& nonrel, bool with_oracle, const OerTable* table) {
            CoverageConfig cfg;
            cfg.k_values = std::move(k_values);
            cfg.epsilon = epsilon;
            cfg.nonrel = parse_nonrel(nonrel);
            cfg.with_oracle = with_oracle;
            cfg.oer_table = table;
            return coverage_report(index, run, cfg);
        },
        py::arg("index"), py::arg("entity_run"), py::arg("k_values") = std::vector<int>{10, 20, 50},
        py::arg("epsilon") = 1e-6, py::arg("nonrel") = "judged", py::arg("with_oracle") = false,
        py::arg("oer_table") = py::none(), py::keep_alive<0, 7>());

    // --- OER ---
    py::enum_<SignalMode>(m, "SignalMode")
        .value("core", SignalMode::core)
        .value("conditional", SignalMode::conditional)
        .value("bait", SignalMode::bait)
        .value("anti", SignalMode::anti)
        .value("sparse", SignalMode::sparse);

    py::class_<OerConfig>(m, "OerConfig")
        .def(py::init<>())
        .def_readwrite("alpha", &OerConfig::alpha)
        .def_readwrite("tau_support", &OerConfig::tau_support)
        .def_readwrite("core_oer_min", &OerConfig::core_oer_min)
        .def_readwrite("bait_dfcand_min", &OerConfig::bait_dfcand_min)
        .def_readwrite("sparse_dfcand_max", &OerConfig::sparse_dfcand_max);

    py::class_<OerScore>(m, "OerScore")
        .def_readonly("p_rel_hat", &OerScore::p_rel_hat)
        .def_readonly("p_nonrel_hat", &OerScore::p_nonrel_hat)
        .def_readonly("log_odds_diff", &OerScore::log_odds_diff)
        .def_readonly("support_w", &OerScore::support_w)
        .def_readonly("oer", &OerScore::oer);

    py::class_<OerRow>(m, "OerRow")
        .def_readonly("query_id", &OerRow::query_id)
        .def_readonly("entity_id", &OerRow::entity_id)
        .def_readonly("df_rel", &OerRow::df_rel)
        .def_readonly("df_nonrel", &OerRow::df_nonrel)
        .def_readonly("df_cand", &OerRow::df_cand)
        .def_readonly("score", &OerRow::score)
        .def_readonly("mode", &OerRow::mode);

    py::class_<OerTable>(m, "OerTable")
        .def_property_readonly("rows", [](const OerTable& t) { return t.rows(); })
        .def_property_readonly("skipped_queries",
                               [](const OerTable& t) { return t.skipped_queries(); })
        .def("find", [](const OerTable& t, const std::string& qid, const std::string& entity) {
            const OerRow* row = t.find(qid, entity);
            return row ? std::optional<OerRow>(*row) : std::nullopt;
        });

    m.def("oer_score", &oer_score, py::arg("df_rel"), py::arg("df_nonrel"), py::arg("df_cand"),
          py::arg("num_rel"), py::arg("num_nonrel"), py::arg("config") = OerConfig{});
    m.def("classify_mode", &classify_mode, py::arg("df_rel"), py::arg("df_nonrel"),
          py::arg("df_cand"), py::arg("oer"), py::arg("config") = OerConfig{});
    m.def("build_oer_table", &build_oer_table, py::arg("index"),
          py::arg("config") = OerConfig{});

    py::class_<RunRates>(m, "RunRates")
        .def_readonly("bait_rate", &RunRates::bait_rate)
        .def_readonly("signal_rate", &RunRates::signal_rate)
        .def_readonly("sparse_rate", &RunRates::sparse_rate)
        .def_readonly("top1_bait_rate", &RunRates::top1_bait_rate)
        .def_readonly("slots", &RunRates::slots)
        .def_readonly("queries", &RunRates::queries);
    m.def("run_rates", &run_rates, py::arg("entity_run"), py::arg("oer_table"),
          py::arg("k") = 20);

    m.def("local_idf_rescale",
          py::overload_cast<const Run&, const CorpusIndex&>(&local_idf_rescale),
          py::arg("entity_run"), py::arg("index"));

    py::class_<FilterResult>(m, "FilterResult")
        .def_readonly("run", &FilterResult::run)
        .def_readonly("emptied_queries", &FilterResult::emptied_queries);
    m.def("oer_filter", &oer_filter, py::arg("entity_run"), py::arg("oer_table"),
          py::arg("threshold"));

    // --- supervision ---
    py::class_<EntityPartition>(m, "EntityPartition")
        .def_readonly("positives", &EntityPartition::positives)
        .def_readonly("negatives", &EntityPartition::negatives)
        .def_readonly("common", &EntityPartition::common)
        .def("count_positives", &EntityPartition::count_positives)
        .def("count_negatives", &EntityPartition::count_negatives)
        .def("count_common", &EntityPartition::count_common);
    py::class_<BinaryDerivation>(m, "BinaryDerivation")
        .def_readonly("partition", &BinaryDerivation::partition)
        .def_readonly("entity_qrels", &BinaryDerivation::entity_qrels);
    m.def("derive_binary_qrels", &derive_binary_qrels, py::arg("index"));

    py::class_<PartitionClassStats>(m, "PartitionClassStats")
        .def_readonly("count", &PartitionClassStats::count)
        .def_readonly("mean_df_cand", &PartitionClassStats::mean_df_cand)
        .def_readonly("median_df_cand", &PartitionClassStats::median_df_cand)
        .def_readonly("mean_collection_idf", &PartitionClassStats::mean_collection_idf)
        .def_readonly("median_collection_df", &PartitionClassStats::median_collection_df);
    py::class_<PartitionStats>(m, "PartitionStats")
        .def_readonly("positives", &PartitionStats::positives)
        .def_readonly("negatives", &PartitionStats::negatives)
        .def_readonly("common", &PartitionStats::common)
        .def_readonly("imbalance_ratio", &PartitionStats::imbalance_ratio)
        .def_readonly("common_positive_fraction", &PartitionStats::common_positive_fraction)
        .def_readonly("common_mean_log_odds", &PartitionStats::common_mean_log_odds)
        .def_readonly("common_median_log_odds", &PartitionStats::common_median_log_odds);
    m.def("partition_stats", &partition_stats, py::arg("index"), py::arg("partition"),
          py::arg("oer_table"));

    // --- consensus ---
    py::class_<ConsensusResult>(m, "ConsensusResult")
        .def_readonly("run", &ConsensusResult::run)
        .def_readonly("empty_queries", &ConsensusResult::empty_queries);
    m.def(
        "consensus_run",
        [](const CorpusIndex& index, const std::string& variant, int gate_min_df, int k_out) {
            ConsensusConfig cfg;
            cfg.variant = parse_variant(variant);
            cfg.gate_min_df = gate_min_df;
            cfg.k_out = k_out;
            return consensus_run(index, cfg);
        },
        py::arg("index"), py::arg("variant") = "rho_rank", py::arg("gate_min_df") = 2,
        py::arg("k_out") = 20);

    // --- document evaluation ---
    py::class_<QueryEval>(m, "QueryEval")
        .def_readonly("query_id", &QueryEval::query_id)
        .def_readonly("ap", &QueryEval::ap)
        .def_readonly("ndcg", &QueryEval::ndcg)
        .def_readonly("precision", &QueryEval::precision)
        .def_readonly("recall", &QueryEval::recall)
        .def_readonly("pool_size", &QueryEval::pool_size)
        .def_readonly("relevant_in_pool", &QueryEval::relevant_in_pool)
        .def_readonly("excluded_relevant", &QueryEval::excluded_relevant)
        .def_readonly("dropped_docs", &QueryEval::dropped_docs)
        .def_readonly("degenerate", &QueryEval::degenerate);
    py::class_<DocEvalReport>(m, "DocEvalReport")
        .def_readonly("rows", &DocEvalReport::rows)
        .def_readonly("map", &DocEvalReport::map)
        .def_readonly("mean_ndcg", &DocEvalReport::mean_ndcg)
        .def_readonly("mean_precision", &DocEvalReport::mean_precision)
        .def_readonly("mean_recall", &DocEvalReport::mean_recall)
        .def_readonly("evaluated_queries", &DocEvalReport::evaluated_queries)
        .def_readonly("degenerate_queries", &DocEvalReport::degenerate_queries);

    m.def(
        "build_eval_pool",
        [](const CorpusIndex& index, std::optional<Run> entity_run, const std::string& qid,
           const std::string& mode, int k_entities) {
            EvalConfig cfg;
            cfg.mode = parse_mode(mode);
            cfg.k_entities = k_entities;
            return build_eval_pool(index, entity_run ? &*entity_run : nullptr, qid, cfg);
        },
        py::arg("index"), py::arg("entity_run"), py::arg("query_id"),
        py::arg("mode") = "conditional", py::arg("k_entities") = 20);
    m.def(
        "evaluate_run",
        [](const Run& doc_run, const CorpusIndex& index, const std::string& mode,
           std::optional<Run> entity_run, int k_entities, int ndcg_k, int precision_k,
           int recall_k, bool exp_gain) {
            EvalConfig cfg;
            cfg.mode = parse_mode(mode);
            cfg.k_entities = k_entities;
            cfg.ndcg_k = ndcg_k;
            cfg.precision_k = precision_k;
            cfg.recall_k = recall_k;
            cfg.exp_gain = exp_gain;
            return evaluate_run(doc_run, index, cfg, entity_run ? &*entity_run : nullptr);
        },
        py::arg("doc_run"), py::arg("index"), py::arg("mode") = "open-world",
        py::arg("entity_run") = py::none(), py::arg("k_entities") = 20, py::arg("ndcg_k") = 20,
        py::arg("precision_k") = 20, py::arg("recall_k") = 1000, py::arg("exp_gain") = false);
    m.def("interpolate_rerank",
          py::overload_cast<const CorpusIndex&, const Run&, const Run&, double, int>(
              &interpolate_rerank),
          py::arg("index"), py::arg("doc_run"), py::arg("entity_run"), py::arg("lambda_") = 0.5,
          py::arg("k_entities") = 20);

    // --- analysis ---
    py::class_<FrontierPoint>(m, "FrontierPoint")
        .def(py::init([](std::string run_id, double relcov, double nonrelcov) {
                 return FrontierPoint{std::move(run_id), relcov, nonrelcov, false};
             }),
             py::arg("run_id"), py::arg("relcov"), py::arg("nonrelcov"))
        .def_readonly("run_id", &FrontierPoint::run_id)
        .def_readonly("relcov", &FrontierPoint::relcov)
        .def_readonly("nonrelcov", &FrontierPoint::nonrelcov)
        .def_readonly("on_frontier", &FrontierPoint::on_frontier);
    m.def("pareto_frontier", &pareto_frontier, py::arg("points"));

    m.def(
        "correlate",
        [](const std::vector<double>& xs, const std::vector<double>& ys,
           const std::string& method) {
            auto c = correlate(xs, ys,
                               method == "spearman" ? CorrelationMethod::spearman
                                                    : CorrelationMethod::pearson);
            return py::make_tuple(c.r, c.p_value, c.degenerate);
        },
        py::arg("xs"), py::arg("ys"), py::arg("method") = "pearson");
    m.def("stratify", &stratify, py::arg("per_query_values"), py::arg("buckets") = 3);

    py::class_<RegressionResult>(m, "RegressionResult")
        .def_readonly("names", &RegressionResult::names)
        .def_readonly("coefficients", &RegressionResult::coefficients)
        .def_readonly("std_errors", &RegressionResult::std_errors)
        .def_readonly("p_values", &RegressionResult::p_values)
        .def_readonly("r_squared", &RegressionResult::r_squared)
        .def_readonly("n", &RegressionResult::n);
    m.def("ols_regress", &ols_regress, py::arg("y"), py::arg("columns"),
          py::arg("column_names") = std::vector<std::string>{});
    m.def("residualize", &residualize, py::arg("y"), py::arg("columns"),
          py::arg("column_names") = std::vector<std::string>{});

    py::class_<Breakpoint>(m, "Breakpoint")
        .def_readonly("tau", &Breakpoint::tau)
        .def_readonly("below_mean", &Breakpoint::below_mean)
        .def_readonly("above_mean", &Breakpoint::above_mean)
        .def_readonly("p_value", &Breakpoint::p_value)
        .def_readonly("below_n", &Breakpoint::below_n)
        .def_readonly("above_n", &Breakpoint::above_n);
    m.def("breakpoint_sweep", &breakpoint_sweep, py::arg("y"), py::arg("x"),
          py::arg("candidate_taus"), py::arg("min_side") = 5);

    // --- synthetic environments ---
    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("num_queries", &SynthConfig::num_queries)
        .def_readwrite("pool_size", &SynthConfig::pool_size)
        .def_readwrite("num_rel_per_query", &SynthConfig::num_rel_per_query)
        .def_readwrite("entity_vocab_size", &SynthConfig::entity_vocab_size)
        .def_readwrite("signal_entities_per_query", &SynthConfig::signal_entities_per_query)
        .def_readwrite("signal_linking_recall", &SynthConfig::signal_linking_recall)
        .def_readwrite("generic_entity_rate", &SynthConfig::generic_entity_rate)
        .def_readwrite("signal_leak_rate", &SynthConfig::signal_leak_rate)
        .def_readwrite("seed", &SynthConfig::seed);
    py::class_<SynthData>(m, "SynthData")
        .def_readonly("qrels", &SynthData::qrels)
        .def_readonly("pools", &SynthData::pools)
        .def_readonly("links", &SynthData::links)
        .def_readonly("signal_entities", &SynthData::signal_entities)
        .def_readonly("generic_entities", &SynthData::generic_entities)
        .def_readonly("planted_run", &SynthData::planted_run);
    m.def("generate", &generate, py::arg("config"));
    m.def("write_synth", &write_synth, py::arg("data"), py::arg("out_dir"));
}
