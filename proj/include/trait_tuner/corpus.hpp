#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "io.hpp"
#include "traits.hpp"

namespace trait_tuner {

struct LabeledText {
    std::string id;
    std::string user_id;
    std::string text;
    TraitVector traits;

    friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

enum class Split { train, eval, test };

inline constexpr std::array<Split, 3> all_splits{Split::train, Split::eval, Split::test};

constexpr std::string_view split_name(Split s) noexcept {
    switch (s) {
    case Split::train: return "train";
    case Split::eval: return "eval";
    case Split::test: return "test";
    }
    return "?";
}

struct Corpus {
    std::vector<LabeledText> train;
    std::vector<LabeledText> eval;
    std::vector<LabeledText> test;

    std::vector<LabeledText>& split(Split s) noexcept {
        return s == Split::train ? train : s == Split::eval ? eval : test;
    }
    const std::vector<LabeledText>& split(Split s) const noexcept {
        return s == Split::train ? train : s == Split::eval ? eval : test;
    }
    std::size_t size() const noexcept { return train.size() + eval.size() + test.size(); }

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct TraitRange {
    double min = 0.0;
    double max = 1.0;
    friend bool operator==(const TraitRange&, const TraitRange&) = default;
};

/// Per-trait min/max of the raw training labels.
struct NormalizationStats {
    std::array<TraitRange, trait_count> ranges{};

    const TraitRange& operator[](TraitName t) const noexcept { return ranges[index_of(t)]; }
    TraitRange& operator[](TraitName t) noexcept { return ranges[index_of(t)]; }

    /// Stats that map [0,1] onto itself, for data that is already normalized.
    static NormalizationStats identity() { return {}; }

    void validate() const {
        for (TraitName t : all_traits) {
            const auto& r = (*this)[t];
            if (!(r.max > r.min)) throw DegenerateLabelError(std::string(name_of(t)));
        }
    }

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

inline nlohmann::json to_json(const NormalizationStats& stats) {
    nlohmann::json j = nlohmann::json::object();
    for (TraitName t : all_traits)
        j[std::string(name_of(t))] = {{"min", stats[t].min}, {"max", stats[t].max}};
    return j;
}

inline NormalizationStats stats_from_json(const nlohmann::json& j) {
    NormalizationStats stats;
    for (TraitName t : all_traits) {
        const std::string key(name_of(t));
        if (!j.contains(key) || !j[key].contains("min") || !j[key].contains("max"))
            throw ParseError("normalization stats missing '" + key + "'");
        stats[t] = {j[key]["min"].get<double>(), j[key]["max"].get<double>()};
    }
    stats.validate();
    return stats;
}

inline void save_stats(const std::filesystem::path& path, const NormalizationStats& stats) {
    io::write_json(path, to_json(stats));
}

inline NormalizationStats load_stats(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw LoadError("missing normalization stats: " + path.string());
    return stats_from_json(io::read_json(path));
}

// ---------------------------------------------------------------------------
// Record files

inline nlohmann::json to_json(const LabeledText& r) {
    return {{"id", r.id}, {"user_id", r.user_id}, {"text", r.text}, {"traits", to_json_object(r.traits)}};
}

/// Parses one record line. Throws ParseError (without line info; the caller adds it).
inline LabeledText record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("record is not an object");
    auto str_field = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw ParseError(std::string("missing string field '") + key + "'");
        return it->get<std::string>();
    };
    LabeledText r;
    r.id = str_field("id");
    r.user_id = str_field("user_id");
    r.text = str_field("text");
    auto it = j.find("traits");
    if (it == j.end()) throw ParseError("missing field 'traits'");
    r.traits = trait_vector_from_json(*it);
    return r;
}

inline std::vector<LabeledText> read_records(const std::filesystem::path& path, std::string_view split) {
    std::ifstream in(path);
    if (!in) throw LoadError("missing " + std::string(split) + " split file: " + path.string());
    std::vector<LabeledText> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        }
    }
    return records;
}

inline void write_records(const std::filesystem::path& path, std::span<const LabeledText> records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    io::write_text(path, out);
}

inline std::filesystem::path split_path(const std::filesystem::path& dir, Split s) {
    return dir / (std::string(split_name(s)) + ".jsonl");
}

/// Checks the corpus-level invariants: non-empty splits, non-empty texts,
/// ids unique across all splits, and (optionally) labels inside [0,1].
inline void validate_corpus(const Corpus& corpus, bool require_unit_range) {
    std::unordered_set<std::string> seen;
    for (Split s : all_splits) {
        const auto& records = corpus.split(s);
        if (records.empty()) throw ValidationError(std::string(split_name(s)) + " split is empty");
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (r.text.empty())
                throw ValidationError(std::string(split_name(s)) + " record '" + r.id + "' has empty text");
            if (!seen.insert(r.id).second) throw ValidationError("duplicate id '" + r.id + "'");
            if (require_unit_range && !r.traits.in_unit_range())
                throw ValidationError(std::string(split_name(s)) + " record '" + r.id +
                                      "' has a trait score outside [0,1]");
        }
    }
}

/// Loads train.jsonl / eval.jsonl / test.jsonl from `dir`. Split membership is
/// taken as given; nothing is reshuffled.
inline Corpus load_corpus(const std::filesystem::path& dir, bool already_normalized) {
    if (!std::filesystem::is_directory(dir)) throw LoadError("data directory not found: " + dir.string());
    Corpus corpus;
    for (Split s : all_splits) corpus.split(s) = read_records(split_path(dir, s), split_name(s));
    validate_corpus(corpus, already_normalized);
    return corpus;
}

inline void write_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
    std::filesystem::create_directories(dir);
    for (Split s : all_splits) write_records(split_path(dir, s), corpus.split(s));
}

// ---------------------------------------------------------------------------
// Normalization

inline NormalizationStats compute_stats(std::span<const LabeledText> train) {
    if (train.empty()) throw ArgumentError("cannot compute normalization stats on an empty training split");
    NormalizationStats stats;
    for (TraitName t : all_traits) {
        auto [lo, hi] = std::minmax_element(train.begin(), train.end(),
                                            [t](const auto& a, const auto& b) { return a.traits[t] < b.traits[t]; });
        stats[t] = {lo->traits[t], hi->traits[t]};
    }
    stats.validate();
    return stats;
}

inline TraitVector normalize(const TraitVector& raw, const NormalizationStats& stats, bool clip) {
    TraitVector v;
    for (TraitName t : all_traits) {
        const auto& r = stats[t];
        double s = (raw[t] - r.min) / (r.max - r.min);
        if (clip) s = std::clamp(s, 0.0, 1.0);
        v[t] = s;
    }
    return v;
}

struct NormalizedCorpus {
    Corpus corpus;
    NormalizationStats stats;
};

/// Per-trait min-max scaling with statistics from the training split only.
/// Eval and test values are clipped to [0,1] after the transform.
inline NormalizedCorpus normalize_labels(const Corpus& corpus) {
    NormalizedCorpus out{corpus, compute_stats(corpus.train)};
    for (auto& r : out.corpus.train) r.traits = normalize(r.traits, out.stats, false);
    for (auto& r : out.corpus.eval) r.traits = normalize(r.traits, out.stats, true);
    for (auto& r : out.corpus.test) r.traits = normalize(r.traits, out.stats, true);
    return out;
}

/// Inverse of the min-max transform, back to raw label units.
inline TraitVector denormalize(const TraitVector& v, const NormalizationStats& stats) {
    stats.validate();
    TraitVector raw;
    for (TraitName t : all_traits) raw[t] = v[t] * (stats[t].max - stats[t].min) + stats[t].min;
    return raw;
}

// ---------------------------------------------------------------------------
// Chunking per-user comment streams

struct UserComments {
    std::string user_id;
    std::vector<std::string> comments;
    TraitVector traits;
};

struct ChunkResult {
    std::vector<LabeledText> chunks;
    std::size_t skipped_users = 0;
};

inline std::vector<std::string_view> whitespace_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        if (j > i) tokens.push_back(text.substr(i, j - i));
        i = j;
    }
    return tokens;
}

inline constexpr std::size_t default_chunk_tokens = 384;

/// Greedy in-order packing of each user's comments into chunks of at most
/// `max_tokens` whitespace tokens. A comment that does not fit in the
/// remaining budget starts a new chunk; a comment longer than `max_tokens`
/// by itself is cut into token windows. Chunks never mix users.
inline ChunkResult chunk_user_comments(std::span<const UserComments> users, std::size_t max_tokens) {
    if (max_tokens < 16) throw ArgumentError("max_tokens must be at least 16");
    ChunkResult result;
    for (const auto& user : users) {
        std::size_t k = 0;
        std::string current;
        std::size_t current_tokens = 0;
        auto flush = [&] {
            if (current_tokens == 0) return;
            result.chunks.push_back({user.user_id + "#" + std::to_string(k++), user.user_id, current, user.traits});
            current.clear();
            current_tokens = 0;
        };
        auto append = [&](std::string_view piece, std::size_t n) {
            if (!current.empty()) current += ' ';
            current += piece;
            current_tokens += n;
        };
        bool any = false;
        for (const auto& comment : user.comments) {
            const auto tokens = whitespace_tokens(comment);
            if (tokens.empty()) continue;
            any = true;
            if (tokens.size() <= max_tokens) {
                if (current_tokens + tokens.size() > max_tokens) flush();
                const auto first = tokens.front().data() - comment.data();
                const auto last = tokens.back().data() + tokens.back().size() - comment.data();
                append(std::string_view(comment).substr(first, last - first), tokens.size());
                continue;
            }
            flush();
            for (std::size_t start = 0; start < tokens.size(); start += max_tokens) {
                const std::size_t end = std::min(tokens.size(), start + max_tokens);
                std::string window;
                for (std::size_t i = start; i < end; ++i) {
                    if (i > start) window += ' ';
                    window += tokens[i];
                }
                append(window, end - start);
                if (end < tokens.size()) flush();
            }
        }
        flush();
        if (!any) ++result.skipped_users;
    }
    return result;
}

} // namespace trait_tuner
