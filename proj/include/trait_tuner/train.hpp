#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "augment.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "hashing.hpp"
#include "model.hpp"
#include "optim.hpp"

namespace trait_tuner {

enum class StrategyId { S0, S1, S2, S3, S4, S5 };

inline constexpr std::array<StrategyId, 6> all_strategies{StrategyId::S0, StrategyId::S1, StrategyId::S2,
                                                          StrategyId::S3, StrategyId::S4, StrategyId::S5};

inline std::string strategy_name(StrategyId s) { return "S" + std::to_string(static_cast<int>(s)); }

inline StrategyId strategy_from_name(std::string_view name) {
    for (StrategyId s : all_strategies)
        if (strategy_name(s) == name) return s;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (expected S0..S5)");
}

struct TrainConfig {
    double learning_rate = 2e-5;
    std::size_t batch_size = 16;
    std::size_t epochs = 3;
    double weight_decay = 0.01;  ///< decoupled (AdamW) decay strength
    double dropout = 0.1;        ///< applied in the encoder and the head during training
    SchedulerKind scheduler = SchedulerKind::linear_warmup_decay;
    double warmup_fraction = 0.1;
    bool mixed_precision = false;
    std::size_t early_stop_patience = 0;  ///< 0 disables early stopping
    double max_grad_norm = 1.0;           ///< global gradient-norm clip; 0 disables

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (epochs == 0) throw ConfigError("epochs must be positive");
        if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
        if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ConfigError("warmup_fraction must lie in [0,1)");
        if (!(max_grad_norm >= 0.0)) throw ConfigError("max_grad_norm must be non-negative");
    }

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline nlohmann::json to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"weight_decay", c.weight_decay},
            {"dropout", c.dropout},
            {"scheduler", scheduler_name(c.scheduler)},
            {"warmup_fraction", c.warmup_fraction},
            {"mixed_precision", c.mixed_precision},
            {"early_stop_patience", c.early_stop_patience},
            {"max_grad_norm", c.max_grad_norm}};
}

/// Overlays the keys present in `j` onto `c`.
inline void merge_json(TrainConfig& c, const nlohmann::json& j) {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.dropout = j.value("dropout", c.dropout);
    if (j.contains("scheduler")) c.scheduler = scheduler_from_name(j["scheduler"].get<std::string>());
    c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
    c.mixed_precision = j.value("mixed_precision", c.mixed_precision);
    c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
    c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
}

/// Ranges explored by the hyperparameter search.
struct SearchSpace {
    double lr_min = 1e-5, lr_max = 5e-4;  ///< log-uniform
    std::vector<std::size_t> batch_sizes{8, 16, 32};
    double dropout_min = 0.0, dropout_max = 0.3;  ///< uniform
    double weight_decay_min = 1e-4, weight_decay_max = 1e-1;  ///< log-uniform
    std::vector<std::size_t> epochs{2, 3, 4, 5};

    void validate() const {
        if (!(lr_min > 0.0 && lr_min <= lr_max)) throw ArgumentError("search space: bad learning-rate range");
        if (!(weight_decay_min > 0.0 && weight_decay_min <= weight_decay_max))
            throw ArgumentError("search space: bad weight-decay range");
        if (!(dropout_min >= 0.0 && dropout_min <= dropout_max && dropout_max < 1.0))
            throw ArgumentError("search space: bad dropout range");
        if (batch_sizes.empty() || epochs.empty()) throw ArgumentError("search space: empty choice set");
        for (auto b : batch_sizes)
            if (b == 0) throw ArgumentError("search space: batch size 0");
        for (auto e : epochs)
            if (e == 0) throw ArgumentError("search space: epoch count 0");
    }

    bool contains(const TrainConfig& c) const {
        return c.learning_rate >= lr_min && c.learning_rate <= lr_max && c.dropout >= dropout_min &&
               c.dropout <= dropout_max && c.weight_decay >= weight_decay_min && c.weight_decay <= weight_decay_max &&
               std::find(batch_sizes.begin(), batch_sizes.end(), c.batch_size) != batch_sizes.end() &&
               std::find(epochs.begin(), epochs.end(), c.epochs) != epochs.end();
    }

    friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

inline nlohmann::json to_json(const SearchSpace& s) {
    return {{"learning_rate", {s.lr_min, s.lr_max}},
            {"batch_size", s.batch_sizes},
            {"dropout", {s.dropout_min, s.dropout_max}},
            {"weight_decay", {s.weight_decay_min, s.weight_decay_max}},
            {"epochs", s.epochs},
            {"sampler", "independent-random"}};
}

inline void merge_json(SearchSpace& s, const nlohmann::json& j) {
    auto range = [&](const char* key, double& lo, double& hi) {
        if (!j.contains(key)) return;
        const auto& r = j[key];
        if (!r.is_array() || r.size() != 2) throw ConfigError(std::string("search space '") + key + "' must be [lo, hi]");
        lo = r[0].get<double>();
        hi = r[1].get<double>();
    };
    range("learning_rate", s.lr_min, s.lr_max);
    range("dropout", s.dropout_min, s.dropout_max);
    range("weight_decay", s.weight_decay_min, s.weight_decay_max);
    if (j.contains("batch_size")) s.batch_sizes = j["batch_size"].get<std::vector<std::size_t>>();
    if (j.contains("epochs")) s.epochs = j["epochs"].get<std::vector<std::size_t>>();
}

/// A fully resolved strategy configuration.
struct TrainPlan {
    StrategyId strategy = StrategyId::S1;
    EncoderSpec encoder;
    HeadSpec head;
    TrainConfig config;
    bool search_enabled = false;
    std::size_t search_budget = 0;
    SearchSpace search_space;
    bool augment_enabled = false;
    AugmentPolicy augment;
    std::string synonym_table;  ///< path; empty selects the built-in table
    std::size_t ensemble_size = 1;

    void validate() const {
        encoder.validate();
        head.validate();
        config.validate();
        augment.validate();
        if (search_enabled) {
            if (search_budget < 1) throw ConfigError("search enabled with budget 0");
            search_space.validate();
        }
        if (ensemble_size == 0) throw ConfigError("ensemble_size must be positive");
        if (ensemble_size >= 2 && strategy != StrategyId::S5)
            throw ConfigError("ensembles (ensemble_size >= 2) belong to strategy S5 only");
    }
};

inline nlohmann::json to_json(const TrainPlan& p) {
    return {{"strategy", strategy_name(p.strategy)},
            {"encoder", to_json(p.encoder)},
            {"pooling", "mean"},
            {"head", to_json(p.head)},
            {"config", to_json(p.config)},
            {"search", {{"enabled", p.search_enabled}, {"budget", p.search_budget}, {"space", to_json(p.search_space)}}},
            {"augment",
             {{"enabled", p.augment_enabled},
              {"rate", p.augment.rate},
              {"copies", p.augment.copies},
              {"synonym_table", p.synonym_table.empty() ? "builtin" : p.synonym_table}}},
            {"ensemble_size", p.ensemble_size}};
}

/// Overlays a (possibly partial) plan description onto `p`. The layout
/// matches `to_json(TrainPlan)`; every key is optional.
inline void merge_json(TrainPlan& p, const nlohmann::json& j) {
    try {
        if (j.contains("strategy")) p.strategy = strategy_from_name(j["strategy"].get<std::string>());
        if (j.contains("encoder")) {
            const auto& e = j["encoder"];
            p.encoder.name = e.value("name", p.encoder.name);
            p.encoder.max_sequence_length = e.value("max_sequence_length", p.encoder.max_sequence_length);
        }
        if (j.contains("head")) {
            const auto& h = j["head"];
            if (h.contains("kind")) {
                p.head.kind = head_kind_from_name(h["kind"].get<std::string>());
                if (p.head.kind == HeadKind::linear) p.head.hidden_sizes.clear();
                if (p.head.kind == HeadKind::mlp && p.head.hidden_sizes.empty()) p.head.hidden_sizes = {256};
            }
            if (h.contains("hidden_sizes")) p.head.hidden_sizes = h["hidden_sizes"].get<std::vector<std::size_t>>();
            p.head.dropout = h.value("dropout", p.head.dropout);
        }
        if (j.contains("config")) merge_json(p.config, j["config"]);
        if (j.contains("search")) {
            const auto& s = j["search"];
            p.search_enabled = s.value("enabled", p.search_enabled);
            p.search_budget = s.value("budget", p.search_budget);
            if (s.contains("space")) merge_json(p.search_space, s["space"]);
        }
        if (j.contains("augment")) {
            const auto& a = j["augment"];
            p.augment_enabled = a.value("enabled", p.augment_enabled);
            p.augment.rate = a.value("rate", p.augment.rate);
            p.augment.copies = a.value("copies", p.augment.copies);
            const auto table = a.value("synonym_table", p.synonym_table);
            p.synonym_table = table == "builtin" ? std::string() : table;
        }
        p.ensemble_size = j.value("ensemble_size", p.ensemble_size);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("plan: ") + e.what());
    }
}

inline TrainPlan plan_from_json(const nlohmann::json& j) {
    TrainPlan p;
    merge_json(p, j);
    p.encoder.hidden_size = j.contains("encoder") ? j["encoder"].value("hidden_size", std::size_t{0}) : 0;
    return p;
}

inline constexpr std::size_t default_search_budget = 20;
inline constexpr std::size_t default_ensemble_size = 3;

/// Canonical plan for each strategy row:
///   S0 bert-base + linear head, manual hyperparameters
///   S1 roberta-base + linear head, manual hyperparameters
///   S2 roberta-base + MLP head + hyperparameter search
///   S3 S2 + mixed precision
///   S4 S3 without the MLP head, cosine schedule
///   S5 S3 + synonym augmentation + 3-member ensemble, cosine schedule
inline TrainPlan strategy_config(StrategyId s) {
    TrainPlan p;
    p.strategy = s;
    p.encoder.name = s == StrategyId::S0 ? "bert-base" : "roberta-base";
    const bool mlp = s == StrategyId::S2 || s == StrategyId::S3 || s == StrategyId::S5;
    p.head = mlp ? HeadSpec::mlp() : HeadSpec::linear();
    p.search_enabled = s >= StrategyId::S2;
    p.search_budget = p.search_enabled ? default_search_budget : 0;
    p.config.mixed_precision = s >= StrategyId::S3;
    if (s >= StrategyId::S4) p.config.scheduler = SchedulerKind::cosine_warmup;
    p.augment_enabled = s == StrategyId::S5;
    p.ensemble_size = s == StrategyId::S5 ? default_ensemble_size : 1;
    return p;
}

// ---------------------------------------------------------------------------
// Training loop

struct EpochRecord {
    double train_loss = 0.0;  ///< mean batch loss (raw outputs, dropout active)
    double eval_mse = 0.0;    ///< clamped predictions on the eval split
};

/// Patience-based stopping on eval MSE. Tracks the best (lowest) epoch;
/// `should_stop` turns true after `patience` consecutive epochs without a
/// strict improvement.
class EarlyStopper {
public:
    explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

    /// Records one epoch; returns true when this epoch is the new best.
    bool observe(double eval_mse) {
        const bool improved = !best_ || eval_mse < best_value_;
        if (improved) {
            best_ = epochs_;
            best_value_ = eval_mse;
            stale_ = 0;
        } else {
            ++stale_;
        }
        ++epochs_;
        return improved;
    }

    bool should_stop() const noexcept { return patience_ > 0 && stale_ >= patience_; }
    std::size_t best_epoch() const noexcept { return best_.value_or(0); }
    double best_value() const noexcept { return best_value_; }

private:
    std::size_t patience_;
    std::size_t epochs_ = 0;
    std::size_t stale_ = 0;
    std::optional<std::size_t> best_;
    double best_value_ = 0.0;
};

struct SingleRun {
    RegressionModel model;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;  ///< 0-based index into history
    bool stopped_early = false;
    bool restored_best = false;
    double final_eval_mse = 0.0;  ///< eval MSE of the returned parameters
    std::uint64_t seed = 0;
    std::size_t skipped_steps = 0;  ///< mixed precision overflow skips
};

using EpochCallback = std::function<void(std::size_t epoch, const EpochRecord&)>;

inline double eval_split_mse(const RegressionModel& model, const std::vector<std::vector<int>>& ids,
                             const std::vector<LabeledText>& records) {
    double sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const nn::Matrix raw = model.forward(ids[i], nn::inference_mode(), nullptr);
        for (std::size_t t = 0; t < trait_count; ++t) {
            const double e = std::clamp(raw(0, static_cast<Eigen::Index>(t)), 0.0, 1.0) - records[i].traits[t];
            sum += e * e;
        }
    }
    return sum / static_cast<double>(records.size() * trait_count);
}

/// Fine-tunes one model (encoder and head) on the training split with MSE
/// loss, AdamW, the configured schedule, dropout, gradient clipping, and
/// optional emulated mixed precision. Evaluates on the eval split after every
/// epoch. Deterministic for a given seed in full precision.
inline SingleRun train(const TrainPlan& plan, const Corpus& corpus, std::uint64_t seed,
                       const EpochCallback& on_epoch = {}) {
    if (corpus.train.empty()) throw ArgumentError("train: empty training split");
    if (corpus.eval.empty()) throw ArgumentError("train: empty eval split");
    plan.encoder.validate();
    plan.config.validate();
    const TrainConfig& cfg = plan.config;
    HeadSpec head = plan.head;
    head.dropout = cfg.dropout;

    SingleRun run{build_model(plan.encoder, head, seed), {}, 0, false, false, 0.0, seed, 0};
    RegressionModel& model = run.model;

    std::vector<std::vector<int>> train_ids, eval_ids;
    for (const auto& r : corpus.train) train_ids.push_back(model.encode(r.text));
    for (const auto& r : corpus.eval) eval_ids.push_back(model.encode(r.text));

    const std::size_t n = corpus.train.size();
    const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
    LearningRateSchedule schedule(cfg.scheduler, cfg.learning_rate, batches * cfg.epochs, cfg.warmup_fraction);
    auto params = model.params();
    AdamW optimizer(params, {.weight_decay = cfg.weight_decay});
    LossScaler scaler;

    std::mt19937_64 shuffle_rng(derive_seed(seed, "shuffle"));
    std::mt19937_64 dropout_rng(derive_seed(seed, "dropout"));
    const nn::Mode mode{true, cfg.dropout, cfg.mixed_precision ? nn::Precision::mixed : nn::Precision::full,
                        &dropout_rng};

    EarlyStopper stopper(cfg.early_stop_patience);
    std::vector<nn::Matrix> best_params;
    std::vector<std::size_t> order(n);
    std::size_t step = 0;
    RegressionModel::SampleCache cache;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t end = std::min(n, begin + cfg.batch_size);
            const double denom = static_cast<double>((end - begin) * trait_count);
            const double scale = cfg.mixed_precision ? scaler.scale() : 1.0;
            model.zero_grad();
            double batch_loss = 0.0;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = order[k];
                cache = {};
                const nn::Matrix out = model.forward(train_ids[i], mode, &cache);
                nn::Matrix err(1, static_cast<Eigen::Index>(trait_count));
                for (std::size_t t = 0; t < trait_count; ++t)
                    err(0, static_cast<Eigen::Index>(t)) = out(0, static_cast<Eigen::Index>(t)) - corpus.train[i].traits[t];
                batch_loss += err.squaredNorm();
                model.backward(cache, err * (2.0 * scale / denom), mode);
            }
            batch_loss /= denom;
            if (!std::isfinite(batch_loss)) throw DivergenceError(epoch + 1);
            loss_sum += batch_loss;
            const bool apply = !cfg.mixed_precision || scaler.unscale(params);
            if (apply) {
                if (cfg.max_grad_norm > 0.0) clip_grad_norm(params, cfg.max_grad_norm);
                optimizer.step(schedule.at(step));
            } else {
                ++run.skipped_steps;
            }
            ++step;
        }
        EpochRecord rec{loss_sum / static_cast<double>(batches), eval_split_mse(model, eval_ids, corpus.eval)};
        if (!std::isfinite(rec.eval_mse)) throw DivergenceError(epoch + 1);
        run.history.push_back(rec);
        if (on_epoch) on_epoch(epoch, rec);
        if (stopper.observe(rec.eval_mse) && cfg.early_stop_patience > 0) {
            best_params.clear();
            for (const auto* p : params) best_params.push_back(p->value);
        }
        if (stopper.should_stop()) {
            run.stopped_early = epoch + 1 < cfg.epochs;
            break;
        }
    }
    run.best_epoch = stopper.best_epoch();
    run.final_eval_mse = run.history.back().eval_mse;
    if (cfg.early_stop_patience > 0 && !best_params.empty() && run.best_epoch + 1 != run.history.size()) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
        run.restored_best = true;
        run.final_eval_mse = run.history[run.best_epoch].eval_mse;
    }
    model.zero_grad();
    return run;
}

} // namespace trait_tuner
