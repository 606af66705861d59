#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "augment.hpp"
#include "search.hpp"
#include "train.hpp"

namespace trait_tuner {

struct EnsembleRun {
    std::vector<SingleRun> members;

    EnsembleModel ensemble() const {
        EnsembleModel e;
        for (const auto& m : members) e.members.push_back(m.model);
        return e;
    }
};

/// Trains one member per seed with an identical plan.
inline EnsembleRun train_ensemble(const TrainPlan& plan, const Corpus& corpus, const std::vector<std::uint64_t>& seeds,
                                  const EpochCallback& on_epoch = {}) {
    if (seeds.size() < 2) throw ArgumentError("an ensemble needs at least two seeds");
    if (seeds.size() != plan.ensemble_size)
        throw ArgumentError("seed count " + std::to_string(seeds.size()) + " does not match ensemble_size " +
                            std::to_string(plan.ensemble_size));
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ArgumentError("ensemble seeds must be distinct");
    EnsembleRun run;
    for (auto s : seeds) run.members.push_back(train(plan, corpus, s, on_epoch));
    return run;
}

/// Everything one strategy run produces.
struct TrainingRun {
    TrainPlan plan;  ///< resolved: config is the searched one when search ran
    std::vector<SingleRun> members;
    std::vector<std::uint64_t> seeds;
    std::optional<SearchResult> search;
    double wall_seconds = 0.0;

    EnsembleModel predictor() const {
        EnsembleModel e;
        for (const auto& m : members) e.members.push_back(m.model);
        return e;
    }
};

inline nlohmann::json history_json(const TrainingRun& run) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : run.members) {
        nlohmann::json epochs = nlohmann::json::array();
        for (std::size_t e = 0; e < m.history.size(); ++e)
            epochs.push_back({{"epoch", e + 1}, {"train_loss", m.history[e].train_loss}, {"eval_mse", m.history[e].eval_mse}});
        members.push_back({{"seed", m.seed},
                           {"epochs", epochs},
                           {"best_epoch", m.best_epoch + 1},
                           {"stopped_early", m.stopped_early},
                           {"restored_best", m.restored_best},
                           {"final_eval_mse", m.final_eval_mse},
                           {"skipped_steps", m.skipped_steps}});
    }
    return {{"members", members}, {"wall_seconds", run.wall_seconds}};
}

inline nlohmann::json trials_json(const SearchResult& s) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : s.trials) trials.push_back(to_json(t));
    return {{"best_index", s.best_index},
            {"best_objective", s.best_objective},
            {"best_config", to_json(s.best)},
            {"trials", trials}};
}

/// Member seeds for an ensemble: seed, seed+1, ...
inline std::vector<std::uint64_t> member_seeds(std::uint64_t seed, std::size_t count) {
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < count; ++k) seeds.push_back(seed + k);
    return seeds;
}

/// Runs a whole strategy: optional synonym augmentation of the training
/// split, optional hyperparameter search, then a single model or an ensemble.
inline TrainingRun run_plan(const TrainPlan& plan, const Corpus& corpus, std::uint64_t seed,
                            const EpochCallback& on_epoch = {}) {
    plan.validate();
    const auto started = std::chrono::steady_clock::now();
    TrainingRun run;
    run.plan = plan;

    Corpus working = corpus;
    if (plan.augment_enabled) {
        const SynonymTable table =
            plan.synonym_table.empty() ? default_synonym_table() : load_synonym_table(plan.synonym_table);
        working = expand_training_split(corpus, table, plan.augment, derive_seed(seed, "augment"));
    }
    if (plan.search_enabled) {
        run.search = search_hyperparameters(plan.search_space, plan.search_budget, working,
                                            derive_seed(seed, "search"), plan);
        run.plan.config = run.search->best;
    }
    if (plan.ensemble_size >= 2) {
        run.seeds = member_seeds(seed, plan.ensemble_size);
        run.members = train_ensemble(run.plan, working, run.seeds, on_epoch).members;
    } else {
        run.seeds = {seed};
        run.members.push_back(train(run.plan, working, seed, on_epoch));
    }
    run.plan.encoder.hidden_size = run.members.front().model.encoder_spec().hidden_size;
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return run;
}

} // namespace trait_tuner
