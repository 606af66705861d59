#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "hashing.hpp"

namespace trait_tuner {

namespace synthetic_vocab {

// Indexed by TraitName.
inline constexpr std::array<std::array<std::string_view, 12>, trait_count> keywords{{
    {"kind", "helpful", "gentle", "caring", "forgiving", "thankful", "generous", "patient", "polite", "warm",
     "sharing", "trusting"},
    {"curious", "imaginative", "novel", "artistic", "abstract", "poetry", "philosophy", "explore", "ideas",
     "creative", "museum", "invent"},
    {"organized", "schedule", "plan", "tidy", "deadline", "careful", "checklist", "diligent", "prepared",
     "punctual", "thorough", "budget"},
    {"party", "friends", "crowd", "talkative", "energetic", "dance", "loud", "outgoing", "festival", "cheer",
     "social", "club"},
    {"anxious", "worried", "nervous", "tense", "upset", "moody", "stressed", "afraid", "panic", "insecure",
     "irritable", "gloomy"},
}};

inline constexpr std::array<std::string_view, 24> filler{
    "the", "a", "and", "then", "today", "we", "it", "was", "with", "about", "some", "that",
    "this", "there", "when", "just", "really", "my", "our", "after", "before", "again", "maybe", "so",
};

} // namespace synthetic_vocab

/// The label function of the synthetic generator: for each trait, the fraction
/// of that trait's keywords among all keyword (content) tokens. Texts with no
/// keywords get all-zero labels.
inline TraitVector synthetic_labels(std::string_view text) {
    std::array<std::size_t, trait_count> counts{};
    std::size_t content = 0;
    for (auto tok : whitespace_tokens(text)) {
        for (std::size_t t = 0; t < trait_count; ++t) {
            const auto& words = synthetic_vocab::keywords[t];
            if (std::find(words.begin(), words.end(), tok) != words.end()) {
                ++counts[t];
                ++content;
                break;
            }
        }
    }
    TraitVector v;
    if (content == 0) return v;
    for (std::size_t t = 0; t < trait_count; ++t) v[t] = static_cast<double>(counts[t]) / static_cast<double>(content);
    return v;
}

struct SplitSizes {
    std::size_t train = 0;
    std::size_t eval = 0;
    std::size_t test = 0;
};

/// Deterministic stand-in corpus. Each text mixes trait keywords (drawn from a
/// per-record random trait mixture) with filler words, and its label is
/// `synthetic_labels(text)`, so labels are a learnable function of the text.
inline Corpus make_synthetic_corpus(std::uint64_t seed, SplitSizes sizes) {
    if (sizes.train == 0 || sizes.eval == 0 || sizes.test == 0)
        throw ArgumentError("synthetic split sizes must all be at least 1");
    std::mt19937_64 rng(derive_seed(seed, "synthetic-corpus"));
    std::uniform_int_distribution<int> content_len(6, 16);
    std::uniform_int_distribution<int> filler_len(3, 10);
    std::uniform_int_distribution<std::size_t> pick_keyword(0, synthetic_vocab::keywords[0].size() - 1);
    std::uniform_int_distribution<std::size_t> pick_filler(0, synthetic_vocab::filler.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_user(0, 15);

    Corpus corpus;
    auto generate = [&](Split split, std::size_t count) {
        auto& records = corpus.split(split);
        records.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            // Squared uniforms skew the mixture so some traits dominate.
            std::array<double, trait_count> weights{};
            for (auto& w : weights) {
                const double u = unit(rng);
                w = u * u;
            }
            std::discrete_distribution<std::size_t> pick_trait(weights.begin(), weights.end());
            std::vector<std::string_view> tokens;
            const int n_content = content_len(rng);
            const int n_filler = filler_len(rng);
            for (int k = 0; k < n_content; ++k)
                tokens.push_back(synthetic_vocab::keywords[pick_trait(rng)][pick_keyword(rng)]);
            for (int k = 0; k < n_filler; ++k) tokens.push_back(synthetic_vocab::filler[pick_filler(rng)]);
            std::shuffle(tokens.begin(), tokens.end(), rng);
            std::string text;
            for (auto tok : tokens) {
                if (!text.empty()) text += ' ';
                text += tok;
            }
            char id[48];
            std::snprintf(id, sizeof id, "syn-%s-%06zu", std::string(split_name(split)).c_str(), i);
            LabeledText r{id, "synuser-" + std::to_string(pick_user(rng)), text, synthetic_labels(text)};
            records.push_back(std::move(r));
        }
    };
    generate(Split::train, sizes.train);
    generate(Split::eval, sizes.eval);
    generate(Split::test, sizes.test);
    return corpus;
}

} // namespace trait_tuner
