#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "augment.hpp"
#include "bundle.hpp"
#include "corpus.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "runs.hpp"
#include "synthetic.hpp"
#include "train.hpp"

namespace trait_tuner::cli {

namespace fs = std::filesystem;

enum ExitCode : int { exit_ok = 0, exit_runtime = 1, exit_usage = 2 };

/// "agreeableness: 0.23; openness: 0.47; ..." in canonical trait order.
inline std::string format_prediction(const TraitVector& v, int digits = 2) {
    std::string line;
    for (TraitName t : all_traits) {
        if (!line.empty()) line += "; ";
        line += std::string(name_of(t)) + ": " + format_fixed(v[t], digits);
    }
    return line;
}

/// Per-user raw records: {"user_id", "comments": [...], "traits": {...}}.
inline std::vector<UserComments> read_user_comments(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("missing user file " + path.string());
    std::vector<UserComments> users;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            UserComments u;
            u.user_id = j.at("user_id").get<std::string>();
            u.comments = j.at("comments").get<std::vector<std::string>>();
            u.traits = trait_vector_from_json(j.at("traits"));
            users.push_back(std::move(u));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        }
    }
    return users;
}

inline std::string render_evaluation(const EvaluationReport& r, int digits) {
    std::ostringstream os;
    os << detail::pad("Trait", 20);
    for (const char* h : {"MSE", "MAE", "R2", "Accuracy", "F1"}) os << detail::pad(h, 10);
    os << "\n";
    auto row = [&](const std::string& name, const TraitMetrics& m) {
        os << detail::pad(name, 20);
        for (const auto& c : metric_cells(m, digits)) os << detail::pad(c, 10);
        os << "\n";
    };
    for (TraitName t : all_traits) row(std::string(name_of(t)), r[t]);
    row("overall", r.overall);
    os << "n = " << r.n << (r.r2_partial ? " (overall R2 excludes traits with zero label variance)" : "") << "\n";
    return os.str();
}

inline EvaluationReport evaluate_split(const LoadedBundle& bundle, const std::vector<LabeledText>& records,
                                       F1Averaging averaging, std::size_t batch_size = 16) {
    std::vector<std::string> texts;
    std::vector<TraitVector> labels;
    for (const auto& r : records) {
        texts.push_back(r.text);
        labels.push_back(r.traits);
    }
    return evaluate(bundle.predict(texts, batch_size), labels, bundle.rule, averaging);
}

inline NormalizationStats data_stats(const fs::path& data_dir) {
    const auto path = data_dir / "normalization.json";
    return fs::exists(path) ? load_stats(path) : NormalizationStats::identity();
}

/// Command-line values that override the resolved plan. Unset values leave
/// the plan alone.
struct PlanOverrides {
    std::optional<std::string> encoder, head, hidden, scheduler, mixed, search, augment, synonyms;
    std::optional<std::size_t> max_seq_len, batch_size, epochs, patience, budget, copies, ensemble_size;
    std::optional<double> lr, dropout, weight_decay, warmup, rate;

    void add_to(CLI::App& app) {
        app.add_option("--encoder", encoder, "encoder checkpoint: roberta-base, bert-base, tiny-test");
        app.add_option("--max-seq-len", max_seq_len, "maximum subword tokens per text");
        app.add_option("--head", head, "regression head: linear or mlp");
        app.add_option("--hidden", hidden, "MLP hidden sizes, comma separated");
        app.add_option("--lr", lr, "peak learning rate");
        app.add_option("--batch-size", batch_size, "batch size");
        app.add_option("--epochs", epochs, "training epochs");
        app.add_option("--dropout", dropout, "dropout rate");
        app.add_option("--weight-decay", weight_decay, "decoupled weight decay");
        app.add_option("--scheduler", scheduler, "constant, linear-warmup-decay or cosine-warmup");
        app.add_option("--warmup", warmup, "warmup fraction of total steps");
        app.add_option("--mixed-precision", mixed, "on or off");
        app.add_option("--patience", patience, "early-stopping patience (0 disables)");
        app.add_option("--search", search, "hyperparameter search on or off");
        app.add_option("--budget", budget, "search trials");
        app.add_option("--augment", augment, "synonym augmentation on or off");
        app.add_option("--augment-rate", rate, "synonym replacement probability");
        app.add_option("--augment-copies", copies, "augmented copies per training record");
        app.add_option("--synonyms", synonyms, "synonym table file (word<TAB>syn1,syn2)");
        app.add_option("--ensemble-size", ensemble_size, "ensemble members (S5 only)");
    }

    static bool on_off(const std::string& flag, const std::string& v) {
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError(flag + " expects on or off, got '" + v + "'");
    }

    void apply(TrainPlan& p) const {
        if (encoder) p.encoder.name = *encoder;
        if (max_seq_len) p.encoder.max_sequence_length = *max_seq_len;
        if (head) {
            p.head.kind = head_kind_from_name(*head);
            p.head.hidden_sizes = p.head.kind == HeadKind::mlp ? std::vector<std::size_t>{256} : std::vector<std::size_t>{};
        }
        if (hidden) {
            p.head.hidden_sizes.clear();
            std::istringstream in(*hidden);
            std::string part;
            while (std::getline(in, part, ',')) {
                try {
                    p.head.hidden_sizes.push_back(std::stoul(part));
                } catch (const std::exception&) {
                    throw ConfigError("--hidden expects comma-separated integers");
                }
            }
        }
        if (lr) p.config.learning_rate = *lr;
        if (batch_size) p.config.batch_size = *batch_size;
        if (epochs) p.config.epochs = *epochs;
        if (dropout) p.config.dropout = *dropout;
        if (weight_decay) p.config.weight_decay = *weight_decay;
        if (scheduler) p.config.scheduler = scheduler_from_name(*scheduler);
        if (warmup) p.config.warmup_fraction = *warmup;
        if (mixed) p.config.mixed_precision = on_off("--mixed-precision", *mixed);
        if (patience) p.config.early_stop_patience = *patience;
        if (search) {
            p.search_enabled = on_off("--search", *search);
            if (p.search_enabled && p.search_budget == 0) p.search_budget = default_search_budget;
        }
        if (budget) p.search_budget = *budget;
        if (augment) p.augment_enabled = on_off("--augment", *augment);
        if (rate) p.augment.rate = *rate;
        if (copies) p.augment.copies = *copies;
        if (synonyms) p.synonym_table = *synonyms;
        if (ensemble_size) p.ensemble_size = *ensemble_size;
    }
};

/// Strategy defaults, then the JSON config file, then command-line flags.
inline TrainPlan resolve_plan(const std::string& strategy, const std::string& config_file, const PlanOverrides& o) {
    TrainPlan plan = strategy_config(strategy_from_name(strategy));
    if (!config_file.empty()) {
        nlohmann::json j;
        try {
            j = io::read_json(config_file);
        } catch (const LoadError& e) {
            throw ConfigError(e.what());
        } catch (const ParseError& e) {
            throw ConfigError(e.what());
        }
        if (j.contains("strategy") && j["strategy"] != strategy)
            throw ConfigError("config file strategy does not match --strategy");
        merge_json(plan, j);
    }
    o.apply(plan);
    plan.validate();
    return plan;
}

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// Subcommands

struct PrepareArgs {
    std::string input, out, sizes = "256,64,64";
    bool synthetic = false;
    std::uint64_t seed = 7;
    std::size_t max_tokens = default_chunk_tokens;
};

inline int run_prepare(const PrepareArgs& a, Streams io_) {
    Corpus corpus;
    NormalizationStats stats;
    if (a.synthetic) {
        SplitSizes sizes;
        char sep1 = 0, sep2 = 0;
        std::istringstream in(a.sizes);
        if (!(in >> sizes.train >> sep1 >> sizes.eval >> sep2 >> sizes.test) || sep1 != ',' || sep2 != ',')
            throw ConfigError("--sizes expects train,eval,test");
        corpus = make_synthetic_corpus(a.seed, sizes);
        stats = NormalizationStats::identity();
    } else {
        if (a.input.empty()) throw ConfigError("prepare needs --input DIR or --synthetic");
        if (!fs::is_directory(a.input)) throw LoadError("input directory not found: " + a.input);
        Corpus raw;
        std::size_t skipped = 0;
        for (Split s : all_splits) {
            const auto users = read_user_comments(split_path(a.input, s));
            auto chunks = chunk_user_comments(users, a.max_tokens);
            skipped += chunks.skipped_users;
            raw.split(s) = std::move(chunks.chunks);
        }
        if (skipped > 0) io_.err << "warning: skipped " << skipped << " users with no comments\n";
        validate_corpus(raw, false);
        auto normalized = normalize_labels(raw);
        corpus = std::move(normalized.corpus);
        stats = normalized.stats;
    }
    write_corpus(a.out, corpus);
    save_stats(fs::path(a.out) / "normalization.json", stats);
    io_.out << "wrote " << corpus.train.size() << "/" << corpus.eval.size() << "/" << corpus.test.size()
            << " records to " << a.out << "\n";
    return exit_ok;
}

struct TrainArgs {
    std::string strategy, data, out, config;
    std::uint64_t seed = 1;
    bool quiet = false;
    int digits = 2;
    PlanOverrides overrides;
};

inline int run_train(const TrainArgs& a, Streams io_) {
    const TrainPlan plan = resolve_plan(a.strategy, a.config, a.overrides);
    const Corpus corpus = load_corpus(a.data, true);
    const NormalizationStats stats = data_stats(a.data);
    const std::string fingerprint = corpus_fingerprint(a.data);

    RunManifest manifest;
    manifest.kind = "train";
    manifest.strategy = strategy_name(plan.strategy);
    manifest.plan = to_json(plan);
    manifest.corpus_fingerprint = fingerprint;
    const fs::path run_dir = create_run_directory(runs_root(a.out), manifest.plan.dump() + fingerprint +
                                                                         std::to_string(a.seed), &manifest.id);
    write_manifest(run_dir, manifest);
    try {
        EpochCallback progress;
        if (!a.quiet)
            progress = [&](std::size_t epoch, const EpochRecord& r) {
                io_.err << "epoch " << epoch + 1 << ": train_loss " << r.train_loss << " eval_mse " << r.eval_mse << "\n";
            };
        const TrainingRun run = run_plan(plan, corpus, a.seed, progress);
        manifest.plan = to_json(run.plan);
        manifest.seeds = run.seeds;
        io::write_json(run_dir / "plan.json", manifest.plan);
        io::write_json(run_dir / "history.json", history_json(run));
        manifest.artifacts = {{"plan", "plan.json"}, {"history", "history.json"}, {"bundle", "bundle"},
                              {"metrics", "metrics.json"}};
        if (run.search) {
            io::write_json(run_dir / "trials.json", trials_json(*run.search));
            manifest.artifacts["trials"] = "trials.json";
        }
        std::vector<RegressionModel> members;
        for (const auto& m : run.members) members.push_back(m.model);
        const BinarizationRule rule = derive_thresholds(corpus.train);
        save_bundle(members, run.seeds, stats, rule, run_dir / "bundle", manifest.plan);
        const LoadedBundle bundle = load_bundle(run_dir / "bundle");
        const EvaluationReport report = evaluate_split(bundle, corpus.test, F1Averaging::macro);
        io::write_json(run_dir / "metrics.json", to_json(report));
        manifest.status = RunStatus::complete;
        write_manifest(run_dir, manifest);
        io_.out << "run " << manifest.id << " complete: " << run_dir.string() << "\n"
                << render_evaluation(report, a.digits);
    } catch (const std::exception& e) {
        manifest.status = RunStatus::failed;
        manifest.error = e.what();
        write_manifest(run_dir, manifest);
        throw;
    }
    return exit_ok;
}

struct SearchArgs {
    std::string strategy = "S2", data, out, config;
    std::uint64_t seed = 1;
    PlanOverrides overrides;
};

inline int run_search(const SearchArgs& a, Streams io_) {
    TrainPlan plan = resolve_plan(a.strategy, a.config, a.overrides);
    if (plan.search_budget == 0) plan.search_budget = default_search_budget;
    plan.search_enabled = true;
    const Corpus corpus = load_corpus(a.data, true);
    RunManifest manifest;
    manifest.kind = "search";
    manifest.strategy = strategy_name(plan.strategy);
    manifest.plan = to_json(plan);
    manifest.corpus_fingerprint = corpus_fingerprint(a.data);
    manifest.seeds = {a.seed};
    const fs::path run_dir = create_run_directory(runs_root(a.out), manifest.plan.dump() + std::to_string(a.seed),
                                                  &manifest.id);
    write_manifest(run_dir, manifest);
    try {
        const SearchResult result = search_hyperparameters(plan.search_space, plan.search_budget, corpus, a.seed, plan);
        io::write_json(run_dir / "plan.json", manifest.plan);
        io::write_json(run_dir / "trials.json", trials_json(result));
        manifest.artifacts = {{"plan", "plan.json"}, {"trials", "trials.json"}};
        manifest.status = RunStatus::complete;
        write_manifest(run_dir, manifest);
        io_.out << "search " << manifest.id << ": best trial " << result.best_index << " eval_mse "
                << result.best_objective << "\n"
                << to_json(result.best).dump(2) << "\n";
    } catch (const SearchFailedError& e) {
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& t : e.trials()) trials.push_back(to_json(t));
        io::write_json(run_dir / "trials.json", {{"trials", trials}});
        manifest.status = RunStatus::failed;
        manifest.error = e.what();
        write_manifest(run_dir, manifest);
        throw;
    } catch (const std::exception& e) {
        manifest.status = RunStatus::failed;
        manifest.error = e.what();
        write_manifest(run_dir, manifest);
        throw;
    }
    return exit_ok;
}

struct EvaluateArgs {
    std::string bundle, data, split = "test", out, f1 = "macro";
    int digits = 2;
};

inline int run_evaluate(const EvaluateArgs& a, Streams io_) {
    const LoadedBundle bundle = load_bundle(a.bundle);
    const Corpus corpus = load_corpus(a.data, true);
    Split split = Split::test;
    if (a.split == "train") split = Split::train;
    else if (a.split == "eval") split = Split::eval;
    else if (a.split != "test") throw ConfigError("--split expects train, eval or test");
    F1Averaging averaging = F1Averaging::macro;
    if (a.f1 == "positive") averaging = F1Averaging::positive;
    else if (a.f1 != "macro") throw ConfigError("--f1 expects macro or positive");
    const EvaluationReport report = evaluate_split(bundle, corpus.split(split), averaging);
    if (!a.out.empty()) io::write_json(a.out, to_json(report));
    io_.out << render_evaluation(report, a.digits);
    return exit_ok;
}

struct PredictArgs {
    std::string bundle, input;
    int digits = 2;
    bool raw = false;
    std::size_t batch_size = 16;
};

inline int run_predict(const PredictArgs& a, Streams io_) {
    const LoadedBundle bundle = load_bundle(a.bundle);
    std::ifstream in(a.input);
    if (!in) throw LoadError("input file not found: " + a.input);
    std::vector<std::string> texts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) texts.push_back(line);
    }
    if (texts.empty()) throw ArgumentError("no texts in " + a.input);
    for (const auto& v : bundle.predict(texts, a.batch_size))
        io_.out << format_prediction(a.raw ? denormalize(v, bundle.stats) : v, a.digits) << "\n";
    return exit_ok;
}

struct CompareArgs {
    std::string metrics, baseline, format = "text";
    int digits = 2;
};

inline int run_compare(const CompareArgs& a, Streams io_) {
    const EvaluationReport report = report_from_json(io::read_json(a.metrics));
    const BaselineTable table = parse_baseline_table(io::read_text(a.baseline));
    const auto rows = compare_to_baseline(report, table);
    auto signed_fixed = [&](double v) { return (v > 0 ? "+" : "") + format_fixed(v, a.digits); };
    if (a.format == "csv") {
        io_.out << "trait,algorithm,ours_accuracy,baseline_accuracy,accuracy_delta,accuracy_win,ours_f1,baseline_f1,"
                   "f1_delta,f1_win\n";
        for (const auto& r : rows)
            io_.out << name_of(r.trait) << "," << r.algorithm << "," << format_fixed(r.ours_accuracy, a.digits) << ","
                    << format_fixed(r.baseline_accuracy, a.digits) << "," << signed_fixed(r.accuracy_delta) << ","
                    << (r.accuracy_win ? "win" : "") << "," << format_fixed(r.ours_f1, a.digits) << ","
                    << format_fixed(r.baseline_f1, a.digits) << "," << signed_fixed(r.f1_delta) << ","
                    << (r.f1_win ? "win" : "") << "\n";
        return exit_ok;
    }
    if (a.format != "text") throw ConfigError("--format expects text or csv");
    io_.out << detail::pad("Trait", 19) << detail::pad("Algorithm", 12) << detail::pad("Acc", 8)
            << detail::pad("Base", 8) << detail::pad("Delta", 10) << detail::pad("F1", 8) << detail::pad("Base", 8)
            << "Delta\n";
    for (const auto& r : rows)
        io_.out << detail::pad(std::string(name_of(r.trait)), 19) << detail::pad(r.algorithm, 12)
                << detail::pad(format_fixed(r.ours_accuracy, a.digits), 8)
                << detail::pad(format_fixed(r.baseline_accuracy, a.digits), 8)
                << detail::pad(signed_fixed(r.accuracy_delta) + (r.accuracy_win ? " *" : ""), 10)
                << detail::pad(format_fixed(r.ours_f1, a.digits), 8)
                << detail::pad(format_fixed(r.baseline_f1, a.digits), 8) << signed_fixed(r.f1_delta)
                << (r.f1_win ? " *" : "") << "\n";
    io_.out << "(* = ours ahead)\n";
    return exit_ok;
}

struct ReportArgs {
    std::string runs, format = "text";
    int digits = 2;
};

inline int run_report(const ReportArgs& a, Streams io_) {
    if (a.format != "text" && a.format != "csv" && a.format != "both")
        throw ConfigError("--format expects text, csv or both");
    const RenderedReport r = render_report(runs_root(a.runs), a.digits);
    if (a.format != "csv") io_.out << r.text;
    if (a.format == "both") io_.out << "\n";
    if (a.format != "text") io_.out << r.csv;
    return exit_ok;
}

// ---------------------------------------------------------------------------

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns 0 on success, 1 on runtime or resource errors, 2 on usage or
/// configuration errors.
inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fine-tune text encoders into continuous Big Five trait regressors", "trait_tuner"};
    app.require_subcommand(1);

    PrepareArgs prepare;
    auto* prepare_cmd = app.add_subcommand("prepare", "chunk and normalize raw per-user data, or write a synthetic corpus");
    prepare_cmd->add_option("--input", prepare.input, "directory with train/eval/test.jsonl user records");
    prepare_cmd->add_flag("--synthetic", prepare.synthetic, "generate the synthetic keyword corpus instead");
    prepare_cmd->add_option("--sizes", prepare.sizes, "synthetic split sizes train,eval,test")->capture_default_str();
    prepare_cmd->add_option("--seed", prepare.seed, "synthetic corpus seed")->capture_default_str();
    prepare_cmd->add_option("--max-tokens", prepare.max_tokens, "whitespace-token budget per chunk")->capture_default_str();
    prepare_cmd->add_option("--out", prepare.out, "output data directory")->required();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train one strategy and register a run");
    train_cmd->add_option("--strategy", train_args.strategy, "S0..S5")->required();
    train_cmd->add_option("--data", train_args.data, "prepared data directory")->required();
    train_cmd->add_option("--out", train_args.out, "runs root (default $TRAIT_TUNER_RUNS or ./runs)");
    train_cmd->add_option("--seed", train_args.seed, "seed")->capture_default_str();
    train_cmd->add_option("--config", train_args.config, "JSON plan overrides");
    train_cmd->add_option("--digits", train_args.digits, "decimals in printed metrics")->capture_default_str();
    train_cmd->add_flag("--quiet", train_args.quiet, "suppress per-epoch progress");
    train_args.overrides.add_to(*train_cmd);

    SearchArgs search_args;
    auto* search_cmd = app.add_subcommand("search", "standalone hyperparameter search");
    search_cmd->add_option("--strategy", search_args.strategy, "strategy whose plan seeds the search")->capture_default_str();
    search_cmd->add_option("--data", search_args.data, "prepared data directory")->required();
    search_cmd->add_option("--out", search_args.out, "runs root");
    search_cmd->add_option("--seed", search_args.seed, "seed")->capture_default_str();
    search_cmd->add_option("--config", search_args.config, "JSON plan overrides (including search.space)");
    search_args.overrides.add_to(*search_cmd);

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a bundle on a data split");
    eval_cmd->add_option("--bundle", eval_args.bundle, "bundle directory")->required();
    eval_cmd->add_option("--data", eval_args.data, "prepared data directory")->required();
    eval_cmd->add_option("--split", eval_args.split, "train, eval or test")->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "write metrics.json here");
    eval_cmd->add_option("--f1", eval_args.f1, "macro or positive")->capture_default_str();
    eval_cmd->add_option("--digits", eval_args.digits, "decimals")->capture_default_str();

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "score texts, one per input line");
    predict_cmd->add_option("--bundle", predict_args.bundle, "bundle directory")->required();
    predict_cmd->add_option("--input", predict_args.input, "text file, one text per line")->required();
    predict_cmd->add_option("--digits", predict_args.digits, "decimals")->capture_default_str();
    predict_cmd->add_option("--batch-size", predict_args.batch_size, "batch size")->capture_default_str();
    predict_cmd->add_flag("--raw", predict_args.raw, "denormalize to raw label units");

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "compare accuracy/F1 against published binary baselines");
    compare_cmd->add_option("--metrics", compare_args.metrics, "metrics.json")->required();
    compare_cmd->add_option("--baseline", compare_args.baseline, "baseline table (algorithm,EXT,NEU,AGR,CON,OPN)")->required();
    compare_cmd->add_option("--format", compare_args.format, "text or csv")->capture_default_str();
    compare_cmd->add_option("--digits", compare_args.digits, "decimals")->capture_default_str();

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "tabulate complete runs");
    report_cmd->add_option("--runs", report_args.runs, "runs root");
    report_cmd->add_option("--format", report_args.format, "text, csv or both")->capture_default_str();
    report_cmd->add_option("--digits", report_args.digits, "decimals")->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    const Streams streams{out, err};
    try {
        if (prepare_cmd->parsed()) return run_prepare(prepare, streams);
        if (train_cmd->parsed()) return run_train(train_args, streams);
        if (search_cmd->parsed()) return run_search(search_args, streams);
        if (eval_cmd->parsed()) return run_evaluate(eval_args, streams);
        if (predict_cmd->parsed()) return run_predict(predict_args, streams);
        if (compare_cmd->parsed()) return run_compare(compare_args, streams);
        if (report_cmd->parsed()) return run_report(report_args, streams);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    err << app.help();
    return exit_usage;
}

} // namespace trait_tuner::cli
