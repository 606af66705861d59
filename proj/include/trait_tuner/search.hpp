#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashing.hpp"
#include "train.hpp"

namespace trait_tuner {

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    TrainConfig config;
    std::optional<double> objective;  ///< eval-split MSE; empty when the trial diverged
    std::string error;
};

inline nlohmann::json to_json(const TrialResult& t) {
    nlohmann::json j = {{"index", t.index}, {"seed", t.seed}, {"config", to_json(t.config)}};
    j["objective"] = t.objective ? nlohmann::json(*t.objective) : nlohmann::json(nullptr);
    j["status"] = t.objective ? "complete" : "diverged";
    if (!t.error.empty()) j["error"] = t.error;
    return j;
}

class SearchFailedError : public Error {
public:
    explicit SearchFailedError(std::vector<TrialResult> trials)
        : Error("hyperparameter search failed: all " + std::to_string(trials.size()) + " trials diverged"),
          trials_(std::move(trials)) {}
    const std::vector<TrialResult>& trials() const noexcept { return trials_; }

private:
    std::vector<TrialResult> trials_;
};

struct SearchResult {
    TrainConfig best;
    std::size_t best_index = 0;
    double best_objective = 0.0;
    std::vector<TrialResult> trials;
};

/// Draws one configuration: log-uniform learning rate and weight decay,
/// uniform dropout, uniform choice of batch size and epoch count. Fields
/// outside the space are inherited from `base`.
inline TrainConfig sample_config(const SearchSpace& space, const TrainConfig& base, std::mt19937_64& rng) {
    auto log_uniform = [&](double lo, double hi) {
        if (lo == hi) return lo;
        std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
        return std::clamp(std::exp(d(rng)), lo, hi);
    };
    auto choice = [&](const std::vector<std::size_t>& options) {
        std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
        return options[d(rng)];
    };
    TrainConfig c = base;
    c.learning_rate = log_uniform(space.lr_min, space.lr_max);
    c.batch_size = choice(space.batch_sizes);
    c.dropout = space.dropout_min == space.dropout_max
                    ? space.dropout_min
                    : std::uniform_real_distribution<double>(space.dropout_min, space.dropout_max)(rng);
    c.weight_decay = log_uniform(space.weight_decay_min, space.weight_decay_max);
    c.epochs = choice(space.epochs);
    return c;
}

/// Independent random search. All configurations are drawn up front from
/// `seed`, each trial trains with its own derived seed, and trials are scored
/// by the eval-split MSE of the trained model. Returns the argmin (first on
/// ties) together with the full trial log.
inline SearchResult search_hyperparameters(const SearchSpace& space, std::size_t budget, const Corpus& corpus,
                                           std::uint64_t seed, const TrainPlan& base) {
    if (budget == 0) throw ArgumentError("search budget must be at least 1");
    space.validate();
    std::mt19937_64 rng(derive_seed(seed, "search-sampler"));
    std::vector<TrialResult> trials(budget);
    for (std::size_t i = 0; i < budget; ++i) {
        trials[i].index = i;
        trials[i].seed = derive_seed(seed, i);
        trials[i].config = sample_config(space, base.config, rng);
    }
    for (auto& trial : trials) {
        TrainPlan plan = base;
        plan.config = trial.config;
        try {
            trial.objective = train(plan, corpus, trial.seed).final_eval_mse;
        } catch (const DivergenceError& e) {
            trial.error = e.what();
        }
    }
    std::optional<std::size_t> best;
    for (const auto& t : trials)
        if (t.objective && (!best || *t.objective < *trials[*best].objective)) best = t.index;
    if (!best) throw SearchFailedError(std::move(trials));
    SearchResult result;
    result.best = trials[*best].config;
    result.best_index = *best;
    result.best_objective = *trials[*best].objective;
    result.trials = std::move(trials);
    return result;
}

} // namespace trait_tuner
