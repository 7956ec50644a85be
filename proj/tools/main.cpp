// entsig: batch diagnostics for the entity channel of a retrieval pipeline.
// Each pipeline stage is a subcommand; intermediate artifacts (entity runs,
// OER tables, derived qrels) are plain files so stages compose in any order.

#include <algorithm>
#include <cctype>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entsig/analysis.hpp"
#include "entsig/consensus.hpp"
#include "entsig/corpus.hpp"
#include "entsig/coverage.hpp"
#include "entsig/doc_eval.hpp"
#include "entsig/oer.hpp"
#include "entsig/supervision.hpp"
#include "entsig/synth.hpp"
#include "entsig/trec_io.hpp"

namespace {

using namespace entsig;

struct IndexArgs {
    std::string qrels;
    std::string pool;
    std::string links;
    bool lenient_links = false;
    bool lenient_run = false;
    double rho_threshold = -1.0; // < 0 means off
};

struct OutputArgs {
    std::string out = "-";
    std::string format = "tsv";
    int decimals = 4;
};

void add_index_options(CLI::App* sub, IndexArgs& args) {
    sub->add_option("--qrels", args.qrels, "document qrels file (`qid 0 docid grade`)")
        ->required();
    sub->add_option("--pool", args.pool, "candidate pool as a TREC run file")->required();
    sub->add_option("--links", args.links, "entity links JSONL file")->required();
    sub->add_flag("--lenient-links", args.lenient_links,
                  "treat pool docs missing from the links file as having no entities");
    sub->add_flag("--lenient-run", args.lenient_run,
                  "re-sort out-of-order run files by (score desc, id desc)");
    sub->add_option("--rho-threshold", args.rho_threshold,
                    "drop entity links with rho below this value before indexing");
}

void add_output_options(CLI::App* sub, OutputArgs& args) {
    sub->add_option("--out", args.out, "output path, - for stdout")->capture_default_str();
    sub->add_option("--format", args.format, "report format")
        ->check(CLI::IsMember({"tsv", "json"}))
        ->capture_default_str();
    sub->add_option("--decimals", args.decimals, "decimal places for metric fields")
        ->capture_default_str();
}

CorpusIndex load_index(const IndexArgs& args) {
    Qrels qrels = read_qrels(args.qrels);
    CandidatePool pools = read_candidate_pool(args.pool, args.lenient_run);
    EntityLinks links = read_entity_links(args.links);
    IndexOptions opts;
    opts.lenient_missing_docs = args.lenient_links;
    if (args.rho_threshold >= 0.0)
        opts.rho_threshold = args.rho_threshold;
    CorpusIndex index = CorpusIndex::build(qrels, pools, links, opts);
    for (const auto& w : index.warnings())
        std::cerr << "warning: " << w << "\n";
    return index;
}

void report_skips(const std::vector<std::string>& skipped, const char* why) {
    if (!skipped.empty()) {
        std::cerr << "note: " << skipped.size() << " queries skipped (" << why << "):";
        for (const auto& q : skipped)
            std::cerr << " " << q;
        std::cerr << "\n";
    }
}

// ENTSIG_<FLAG> environment overrides for every long option.
void apply_env_prefix(CLI::App* app) {
    for (CLI::Option* opt : app->get_options()) {
        const auto& lnames = opt->get_lnames();
        if (lnames.empty() || lnames[0] == "help")
            continue;
        std::string env = "ENTSIG_";
        for (char c : lnames[0])
            env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        opt->envname(env);
    }
    for (CLI::App* sub : app->get_subcommands(nullptr))
        apply_env_prefix(sub);
}

void dump_config(const CLI::App* sub) {
    for (const CLI::Option* opt : sub->get_options()) {
        const auto& lnames = opt->get_lnames();
        if (lnames.empty() || lnames[0] == "help" || lnames[0] == "help-all" ||
            lnames[0] == "show-config")
            continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i)
                value += (i ? "," : "") + results[i];
        } else {
            value = opt->get_default_str();
        }
        std::cout << lnames[0] << "=" << value << "\n";
    }
}

std::vector<double> numeric_column(const TsvTable& table, const std::string& name) {
    std::size_t col = table.column_index(name);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto v = parse_real(table.rows[r][col]);
        if (!v)
            throw DataError("non-numeric value `" + table.rows[r][col] + "` in column " + name +
                            " at data row " + std::to_string(r + 1));
        out.push_back(*v);
    }
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"entity-channel diagnostics for entity-oriented retrieval"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every subcommand");

    // Shared option state; only the chosen subcommand reads its slice.
    IndexArgs index_args;
    OutputArgs out_args;
    OerConfig oer_cfg;
    std::string entity_run_path, doc_run_path, oer_table_path, input_path, out_dir;
    std::vector<int> k_values{10, 20, 50};
    int k_single = 20, k_entities = 20, k_out = 20, gate_min_df = 2;
    int buckets = 3, ndcg_k = 20, precision_k = 20, recall_k = 1000, tau_grid = 0;
    double epsilon = 1e-6, threshold = 0.0, lambda = 0.5;
    std::size_t min_side = 5;
    std::string nonrel = "judged", variant = "rho_rank", mode = "open-world",
                method = "pearson";
    std::string qid_col = "qid", value_col = "value", y_col = "delta_ap", x_col = "coverage";
    std::string id_col = "run_id", relcov_col = "relcov", nonrelcov_col = "nonrelcov";
    std::vector<std::string> control_cols, x_cols;
    std::vector<double> taus;
    SynthConfig synth_cfg;

    auto add_oer_options = [&](CLI::App* sub) {
        sub->add_option("--alpha", oer_cfg.alpha, "Laplace smoothing constant")
            ->capture_default_str();
        sub->add_option("--tau-support", oer_cfg.tau_support, "support weight decay")
            ->capture_default_str();
        sub->add_option("--core-oer-min", oer_cfg.core_oer_min, "core-signal OER threshold")
            ->capture_default_str();
        sub->add_option("--bait-dfcand-min", oer_cfg.bait_dfcand_min,
                        "minimum df_cand for generic bait")
            ->capture_default_str();
        sub->add_option("--sparse-dfcand-max", oer_cfg.sparse_dfcand_max,
                        "maximum df_cand for sparse evidence")
            ->capture_default_str();
    };

    // --- index-check ---
    auto* check = app.add_subcommand("index-check", "build the index and verify its invariants");
    add_index_options(check, index_args);
    add_output_options(check, out_args);
    check->callback([&] {
        CorpusIndex index = load_index(index_args);
        std::size_t docs = 0, pairs = 0, rel = 0, nonrel_docs = 0;
        std::set<std::string> entities;
        for (const auto& [qid, qi] : index.queries()) {
            docs += qi.pool.size();
            rel += qi.relevant.size();
            nonrel_docs += qi.judged_nonrel.size();
            pairs += qi.entity_stats.size();
            for (const auto& [e, st] : qi.entity_stats)
                entities.insert(e);
        }
        bool recount_ok = index.recount_matches();
        Report report({"field", "value"});
        auto kv = [&report](const char* k, long long v) {
            report.begin_row().add(std::string(k)).add(v);
        };
        kv("queries", static_cast<long long>(index.queries().size()));
        kv("dropped_queries", static_cast<long long>(index.dropped_queries().size()));
        kv("pool_docs", static_cast<long long>(docs));
        kv("judged_relevant", static_cast<long long>(rel));
        kv("judged_nonrelevant", static_cast<long long>(nonrel_docs));
        kv("distinct_entities", static_cast<long long>(entities.size()));
        kv("query_entity_pairs", static_cast<long long>(pairs));
        kv("warnings", static_cast<long long>(index.warnings().size()));
        report.begin_row().add(std::string("recount_ok")).add(
            std::string(recount_ok ? "true" : "false"));
        report.write(out_args.format, out_args.out, out_args.decimals);
        if (!recount_ok)
            throw DataError("index recount mismatch: stored statistics disagree with a rebuild");
    });

    // --- coverage ---
    auto* cov = app.add_subcommand("coverage",
                                   "RelCov/NonRelCov/DiscRatio/mean-overlap over the pool");
    add_index_options(cov, index_args);
    add_output_options(cov, out_args);
    cov->add_option("--entity-run", entity_run_path, "entity run to evaluate");
    cov->add_option("--k", k_values, "entity cutoffs")->delimiter(',')->capture_default_str();
    cov->add_option("--epsilon", epsilon, "DiscRatio smoothing constant")->capture_default_str();
    cov->add_option("--nonrel", nonrel, "NonRelCov denominator")
        ->check(CLI::IsMember({"judged", "pool-complement"}))
        ->capture_default_str();
    cov->add_flag("--oracle", "add the greedy minimum-cover oracle coverage column");
    cov->add_option("--oer-table", oer_table_path,
                    "OER table TSV; adds the observable (core-signal) coverage column");
    cov->callback([&] {
        CorpusIndex index = load_index(index_args);
        CoverageConfig cfg;
        cfg.k_values = k_values;
        cfg.epsilon = epsilon;
        cfg.nonrel = nonrel == "judged" ? NonRelDenominator::judged_only
                                        : NonRelDenominator::pool_complement;
        cfg.with_oracle = cov->count("--oracle") > 0;
        OerTable table;
        if (!oer_table_path.empty()) {
            table = read_oer_table_tsv(oer_table_path);
            cfg.oer_table = &table;
        }
        CoverageReport report;
        if (!entity_run_path.empty()) {
            Run entity_run = read_run(entity_run_path, RunKind::entity, index_args.lenient_run);
            report = coverage_report(index, entity_run, cfg);
        } else {
            report = per_query_measures(index, cfg);
        }
        report_skips(report.skipped_queries, "no relevant pool docs");
        coverage_to_report(report, cfg).write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- oer ---
    auto* oer_cmd = app.add_subcommand("oer", "per-(query,entity) OER scores and signal modes");
    add_index_options(oer_cmd, index_args);
    add_output_options(oer_cmd, out_args);
    add_oer_options(oer_cmd);
    oer_cmd->callback([&] {
        CorpusIndex index = load_index(index_args);
        OerTable table = build_oer_table(index, oer_cfg);
        report_skips(table.skipped_queries(), "missing relevant or judged non-relevant docs");
        oer_table_report(table).write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- rates ---
    auto* rates_cmd = app.add_subcommand("rates", "bait/signal/top-1-bait rates of an entity run");
    add_output_options(rates_cmd, out_args);
    rates_cmd->add_option("--entity-run", entity_run_path, "entity run")->required();
    rates_cmd->add_option("--oer-table", oer_table_path, "OER table TSV")->required();
    rates_cmd->add_option("--k", k_single, "top-k prefix")->capture_default_str();
    rates_cmd->callback([&] {
        Run run = read_run(entity_run_path, RunKind::entity);
        OerTable table = read_oer_table_tsv(oer_table_path);
        RunRates r = run_rates(run, table, k_single);
        Report report({"k", "bait_rate", "signal_rate", "sparse_rate", "top1_bait_rate", "slots",
                       "queries"});
        report.begin_row()
            .add(k_single)
            .add(r.bait_rate)
            .add(r.signal_rate)
            .add(r.sparse_rate)
            .add(r.top1_bait_rate)
            .add(r.slots)
            .add(r.queries);
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- derive-qrels ---
    auto* derive = app.add_subcommand("derive-qrels",
                                      "binary entity qrels from document judgments");
    add_index_options(derive, index_args);
    derive->add_option("--out", out_args.out, "entity qrels output path")->required();
    derive->callback([&] {
        CorpusIndex index = load_index(index_args);
        BinaryDerivation d = derive_binary_qrels(index);
        write_qrels(d.entity_qrels, out_args.out);
        std::cerr << "partition: " << d.partition.count_positives() << " positives, "
                  << d.partition.count_negatives() << " negatives, "
                  << d.partition.count_common() << " common (excluded)\n";
    });

    // --- partition-stats ---
    auto* pstats = app.add_subcommand("partition-stats",
                                      "statistics of the binary-derivation partition");
    add_index_options(pstats, index_args);
    add_output_options(pstats, out_args);
    add_oer_options(pstats);
    pstats->callback([&] {
        CorpusIndex index = load_index(index_args);
        BinaryDerivation d = derive_binary_qrels(index);
        OerTable table = build_oer_table(index, oer_cfg);
        PartitionStats stats = partition_stats(index, d.partition, table);
        partition_stats_report(stats).write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- consensus ---
    auto* cons = app.add_subcommand("consensus", "unsupervised consensus entity ranker");
    add_index_options(cons, index_args);
    cons->add_option("--out", out_args.out, "entity run output path")->required();
    cons->add_option("--variant", variant, "soft-support weighting")
        ->check(CLI::IsMember({"rho", "rank", "rho_rank"}))
        ->capture_default_str();
    cons->add_option("--gate-min-df", gate_min_df, "consensus gate: minimum df_cand")
        ->capture_default_str();
    cons->add_option("--k-out", k_out, "entities emitted per query")->capture_default_str();
    cons->callback([&] {
        CorpusIndex index = load_index(index_args);
        ConsensusConfig cfg;
        cfg.variant = variant == "rho"    ? ConsensusVariant::rho
                      : variant == "rank" ? ConsensusVariant::rank
                                          : ConsensusVariant::rho_rank;
        cfg.gate_min_df = gate_min_df;
        cfg.k_out = k_out;
        ConsensusResult result = consensus_run(index, cfg);
        report_skips(result.empty_queries, "all entities gated");
        write_run(result.run, out_args.out);
    });

    // --- idf-rescale ---
    auto* idf = app.add_subcommand("idf-rescale", "local-IDF rescaling of an entity run");
    add_index_options(idf, index_args);
    idf->add_option("--entity-run", entity_run_path, "entity run")->required();
    idf->add_option("--out", out_args.out, "rescaled run output path")->required();
    idf->callback([&] {
        CorpusIndex index = load_index(index_args);
        Run run = read_run(entity_run_path, RunKind::entity, index_args.lenient_run);
        write_run(local_idf_rescale(run, index), out_args.out);
    });

    // --- oer-filter ---
    auto* filter = app.add_subcommand("oer-filter", "drop run entities below an OER threshold");
    filter->add_option("--entity-run", entity_run_path, "entity run")->required();
    filter->add_option("--oer-table", oer_table_path, "OER table TSV")->required();
    filter->add_option("--threshold", threshold, "minimum OER to keep")->capture_default_str();
    filter->add_option("--out", out_args.out, "filtered run output path")->required();
    filter->callback([&] {
        Run run = read_run(entity_run_path, RunKind::entity);
        OerTable table = read_oer_table_tsv(oer_table_path);
        FilterResult result = oer_filter(run, table, threshold);
        report_skips(result.emptied_queries, "all entities filtered out");
        write_run(result.run, out_args.out);
    });

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval",
                                        "conditional / open-world document-run evaluation");
    add_index_options(eval_cmd, index_args);
    add_output_options(eval_cmd, out_args);
    eval_cmd->add_option("--doc-run", doc_run_path, "document run to score")->required();
    eval_cmd->add_option("--entity-run", entity_run_path,
                         "entity run (required for conditional mode)");
    eval_cmd->add_option("--mode", mode, "evaluation pool semantics")
        ->check(CLI::IsMember({"conditional", "open-world"}))
        ->capture_default_str();
    eval_cmd->add_option("--k-entities", k_entities, "top-k prefix for the conditional pool")
        ->capture_default_str();
    eval_cmd->add_option("--ndcg-k", ndcg_k, "nDCG cutoff")->capture_default_str();
    std::string ndcg_gain = "linear";
    eval_cmd->add_option("--ndcg-gain", ndcg_gain, "nDCG gain function")
        ->check(CLI::IsMember({"linear", "exp"}))
        ->capture_default_str();
    eval_cmd->add_option("--p-k", precision_k, "precision cutoff")->capture_default_str();
    eval_cmd->add_option("--recall-k", recall_k, "recall cutoff")->capture_default_str();
    eval_cmd->callback([&] {
        CorpusIndex index = load_index(index_args);
        Run doc_run = read_run(doc_run_path, RunKind::doc, index_args.lenient_run);
        EvalConfig cfg;
        cfg.mode = mode == "conditional" ? EvalMode::conditional : EvalMode::open_world;
        cfg.k_entities = k_entities;
        cfg.ndcg_k = ndcg_k;
        cfg.precision_k = precision_k;
        cfg.recall_k = recall_k;
        cfg.exp_gain = ndcg_gain == "exp";
        std::optional<Run> entity_run;
        if (!entity_run_path.empty())
            entity_run = read_run(entity_run_path, RunKind::entity, index_args.lenient_run);
        if (cfg.mode == EvalMode::conditional && !entity_run)
            throw UsageError("eval --mode conditional requires --entity-run");
        DocEvalReport report =
            evaluate_run(doc_run, index, cfg, entity_run ? &*entity_run : nullptr);
        doc_eval_to_report(report, cfg).write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- rerank ---
    auto* rerank = app.add_subcommand("rerank", "entity-interpolation document reranker");
    add_index_options(rerank, index_args);
    rerank->add_option("--doc-run", doc_run_path, "document run")->required();
    rerank->add_option("--entity-run", entity_run_path, "entity run")->required();
    rerank->add_option("--lambda", lambda, "entity interpolation weight in [0,1]")
        ->capture_default_str();
    rerank->add_option("--k-entities", k_entities, "entity prefix used for doc scores")
        ->capture_default_str();
    rerank->add_option("--out", out_args.out, "reranked run output path")->required();
    rerank->callback([&] {
        CorpusIndex index = load_index(index_args);
        Run doc_run = read_run(doc_run_path, RunKind::doc, index_args.lenient_run);
        Run entity_run = read_run(entity_run_path, RunKind::entity, index_args.lenient_run);
        write_run(interpolate_rerank(index, doc_run, entity_run, lambda, k_entities),
                  out_args.out);
    });

    // --- frontier ---
    auto* frontier_cmd = app.add_subcommand("frontier",
                                            "Pareto frontier over (relcov, nonrelcov) points");
    add_output_options(frontier_cmd, out_args);
    frontier_cmd->add_option("--input", input_path, "TSV with one row per run")->required();
    frontier_cmd->add_option("--id-col", id_col, "run id column")->capture_default_str();
    frontier_cmd->add_option("--relcov-col", relcov_col, "RelCov column")->capture_default_str();
    frontier_cmd->add_option("--nonrelcov-col", nonrelcov_col, "NonRelCov column")
        ->capture_default_str();
    frontier_cmd->callback([&] {
        TsvTable table = read_tsv(input_path);
        auto ids = table.column_index(id_col);
        auto rel = numeric_column(table, relcov_col);
        auto non = numeric_column(table, nonrelcov_col);
        std::vector<FrontierPoint> points;
        for (std::size_t i = 0; i < table.rows.size(); ++i)
            points.push_back(FrontierPoint{table.rows[i][ids], rel[i], non[i], false});
        points = pareto_frontier(points);
        Report report({"run_id", "relcov", "nonrelcov", "on_frontier"});
        for (const auto& p : points)
            report.begin_row().add(p.run_id).add(p.relcov).add(p.nonrelcov).add(
                static_cast<long long>(p.on_frontier ? 1 : 0));
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- correlate ---
    auto* corr = app.add_subcommand("correlate", "Pearson / Spearman correlation of two columns");
    add_output_options(corr, out_args);
    corr->add_option("--input", input_path, "TSV input")->required();
    corr->add_option("--x", x_col, "x column")->required();
    corr->add_option("--y", y_col, "y column")->required();
    corr->add_option("--method", method, "correlation method")
        ->check(CLI::IsMember({"pearson", "spearman"}))
        ->capture_default_str();
    corr->callback([&] {
        TsvTable table = read_tsv(input_path);
        auto xs = numeric_column(table, x_col);
        auto ys = numeric_column(table, y_col);
        Correlation c = correlate(xs, ys,
                                  method == "pearson" ? CorrelationMethod::pearson
                                                      : CorrelationMethod::spearman);
        Report report({"method", "n", "r", "p_value", "degenerate"});
        report.begin_row().add(method).add(static_cast<long long>(xs.size()));
        if (c.r)
            report.add(*c.r);
        else
            report.add_missing();
        if (c.p_value)
            report.add(*c.p_value);
        else
            report.add_missing();
        report.add(static_cast<long long>(c.degenerate ? 1 : 0));
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- stratify ---
    auto* strat = app.add_subcommand("stratify", "bucket queries by a per-query value");
    add_output_options(strat, out_args);
    strat->add_option("--input", input_path, "TSV input")->required();
    strat->add_option("--qid-col", qid_col, "query id column")->capture_default_str();
    strat->add_option("--value", value_col, "value column")->required();
    strat->add_option("--buckets", buckets, "number of buckets")->capture_default_str();
    strat->callback([&] {
        TsvTable table = read_tsv(input_path);
        auto qids = table.column_index(qid_col);
        auto values = numeric_column(table, value_col);
        std::map<std::string, double> per_query;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (!per_query.emplace(table.rows[i][qids], values[i]).second)
                throw DataError("duplicate qid " + table.rows[i][qids] + " in " + input_path);
        }
        auto assignment = stratify(per_query, buckets);
        Report report({"qid", "bucket"});
        for (const auto& [qid, bucket] : assignment)
            report.begin_row().add(qid).add(static_cast<long long>(bucket));
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- regress ---
    auto* reg = app.add_subcommand("regress", "OLS with controls");
    add_output_options(reg, out_args);
    reg->add_option("--input", input_path, "TSV input")->required();
    reg->add_option("--y", y_col, "response column")->required();
    reg->add_option("--x", x_cols, "predictor columns")->delimiter(',')->required();
    reg->callback([&] {
        TsvTable table = read_tsv(input_path);
        auto y = numeric_column(table, y_col);
        std::vector<std::vector<double>> cols;
        for (const auto& name : x_cols)
            cols.push_back(numeric_column(table, name));
        RegressionResult r = ols_regress(y, cols, x_cols);
        Report report({"term", "coefficient", "std_error", "p_value"});
        for (std::size_t j = 0; j < r.names.size(); ++j)
            report.begin_row()
                .add(r.names[j])
                .add(r.coefficients[j])
                .add(r.std_errors[j])
                .add(r.p_values[j]);
        report.begin_row().add(std::string("r_squared")).add(r.r_squared).add_missing()
            .add_missing();
        report.begin_row()
            .add(std::string("n"))
            .add(static_cast<long long>(r.n))
            .add_missing()
            .add_missing();
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- breakpoint ---
    auto* bp = app.add_subcommand("breakpoint", "two-segment-means sweep over coverage");
    add_output_options(bp, out_args);
    bp->add_option("--input", input_path, "TSV input")->required();
    bp->add_option("--y", y_col, "response column (e.g. delta_ap)")->capture_default_str();
    bp->add_option("--x", x_col, "sweep column (e.g. coverage)")->capture_default_str();
    bp->add_option("--controls", control_cols,
                   "control columns; y is residualized on them before the sweep")
        ->delimiter(',');
    bp->add_option("--taus", taus, "candidate breakpoints")->delimiter(',');
    bp->add_option("--tau-grid", tau_grid, "evenly spaced candidates over the x range");
    bp->add_option("--min-side", min_side, "minimum points on each side")->capture_default_str();
    bp->callback([&] {
        TsvTable table = read_tsv(input_path);
        auto y = numeric_column(table, y_col);
        auto x = numeric_column(table, x_col);
        if (!control_cols.empty()) {
            std::vector<std::vector<double>> controls;
            for (const auto& name : control_cols)
                controls.push_back(numeric_column(table, name));
            y = residualize(y, controls, control_cols);
        }
        std::vector<double> candidates = taus;
        if (tau_grid > 0) {
            auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            for (int i = 1; i <= tau_grid; ++i)
                candidates.push_back(*lo + (*hi - *lo) * i / (tau_grid + 1.0));
        }
        if (candidates.empty())
            throw UsageError("breakpoint needs --taus or --tau-grid");
        Breakpoint b = breakpoint_sweep(y, x, candidates, min_side);
        Report report({"tau", "below_mean", "above_mean", "p_value", "below_n", "above_n"});
        report.begin_row()
            .add_full(b.tau)
            .add(b.below_mean)
            .add(b.above_mean)
            .add(b.p_value)
            .add(static_cast<long long>(b.below_n))
            .add(static_cast<long long>(b.above_n));
        report.write(out_args.format, out_args.out, out_args.decimals);
    });

    // --- synth ---
    auto* synth_cmd = app.add_subcommand("synth", "seeded synthetic environment generator");
    synth_cmd->add_option("--out-dir", out_dir, "directory for the generated files")->required();
    synth_cmd->add_option("--queries", synth_cfg.num_queries, "number of queries")
        ->capture_default_str();
    synth_cmd->add_option("--pool-size", synth_cfg.pool_size, "candidate docs per query")
        ->capture_default_str();
    synth_cmd->add_option("--rel-per-query", synth_cfg.num_rel_per_query,
                          "relevant docs per query")
        ->capture_default_str();
    synth_cmd->add_option("--vocab", synth_cfg.entity_vocab_size, "entity vocabulary size")
        ->capture_default_str();
    synth_cmd->add_option("--signals-per-query", synth_cfg.signal_entities_per_query,
                          "planted signal entities per query")
        ->capture_default_str();
    synth_cmd->add_option("--linking-recall", synth_cfg.signal_linking_recall,
                          "P(signal linked | relevant doc)")
        ->capture_default_str();
    synth_cmd->add_option("--generic-rate", synth_cfg.generic_entity_rate,
                          "P(generic linked | any doc)")
        ->capture_default_str();
    synth_cmd->add_option("--leak-rate", synth_cfg.signal_leak_rate,
                          "P(signal linked | non-relevant doc)")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_cfg.seed, "master seed")->capture_default_str();
    synth_cmd->callback([&] {
        SynthData data = generate(synth_cfg);
        write_synth(data, out_dir);
        std::cerr << "wrote qrels.txt, pool.run, links.jsonl, planted.run, truth.json to "
                  << out_dir << "\n";
    });

    // Every subcommand: --show-config prints the resolved options and exits 0.
    // Requirements are relaxed for the dump so defaults are inspectable
    // without supplying input paths.
    bool want_config = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--show-config")
            want_config = true;
    for (CLI::App* sub : app.get_subcommands(nullptr)) {
        auto* flag = sub->add_flag("--show-config", "print resolved options and exit");
        if (want_config)
            for (CLI::Option* opt : sub->get_options())
                opt->required(false);
        sub->parse_complete_callback([sub, flag] {
            if (flag->count() > 0) {
                dump_config(sub);
                std::exit(0);
            }
        });
    }
    apply_env_prefix(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const entsig::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const entsig::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
