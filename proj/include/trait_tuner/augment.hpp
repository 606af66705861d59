#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "default_synonyms.hpp"
#include "hashing.hpp"
#include "io.hpp"

namespace trait_tuner {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

/// Lowercase token -> replacement tokens. An ordered map keeps iteration (and
/// therefore any serialization) stable.
class SynonymTable {
public:
    SynonymTable() = default;

    /// Adds an entry. Self-references are dropped; an entry left with no
    /// replacements is rejected.
    void add(std::string_view word, std::vector<std::string> synonyms) {
        const std::string key = to_lower(word);
        if (key.empty()) throw ValidationError("synonym table: empty headword");
        std::vector<std::string> kept;
        for (auto& s : synonyms) {
            if (s.empty() || to_lower(s) == key) continue;
            if (std::find(kept.begin(), kept.end(), s) == kept.end()) kept.push_back(std::move(s));
        }
        if (kept.empty()) throw ValidationError("synonym table: '" + key + "' has no replacement other than itself");
        auto& slot = entries_[key];
        for (auto& s : kept)
            if (std::find(slot.begin(), slot.end(), s) == slot.end()) slot.push_back(std::move(s));
    }

    const std::vector<std::string>* find(std::string_view token) const {
        auto it = entries_.find(to_lower(token));
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::map<std::string, std::vector<std::string>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::vector<std::string>> entries_;
};

/// Parses `word<TAB>syn1,syn2,...` lines. Blank lines and lines starting with
/// '#' are skipped.
inline SynonymTable parse_synonym_table(std::string_view text) {
    SynonymTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("synonym table: expected word<TAB>synonyms", lineno);
        std::vector<std::string> syns;
        std::istringstream list(line.substr(tab + 1));
        std::string s;
        while (std::getline(list, s, ','))
            if (!s.empty()) syns.push_back(s);
        try {
            table.add(line.substr(0, tab), std::move(syns));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return table;
}

inline SynonymTable load_synonym_table(const std::filesystem::path& path) {
    return parse_synonym_table(io::read_text(path));
}

inline const SynonymTable& default_synonym_table() {
    static const SynonymTable table = parse_synonym_table(default_synonym_tsv);
    return table;
}

struct AugmentPolicy {
    double rate = 0.15;      ///< probability that a substitutable token is replaced
    std::size_t copies = 1;  ///< augmented variants per original training record

    void validate() const {
        if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("augment rate must lie in [0,1]");
    }
};

namespace detail {

inline bool is_edge_punct(unsigned char c) { return std::ispunct(c) && c != '\'' && c != '-'; }

} // namespace detail

/// Replaces whitespace tokens found in `table` (case-insensitive, ignoring
/// leading/trailing punctuation) with a uniformly chosen synonym with
/// probability `rate`. Separators are preserved byte for byte, so the token
/// count never changes and `rate == 0` returns the input unchanged.
inline std::string synonym_augment(std::string_view text, const SynonymTable& table, double rate, std::uint64_t seed,
                                   std::size_t* replaced = nullptr) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("augment rate must lie in [0,1]");
    std::mt19937_64 rng(derive_seed(seed, "synonym-augment"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::string out;
    out.reserve(text.size());
    std::size_t n_replaced = 0;
    std::size_t i = 0;
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (i < text.size()) {
        if (is_space(text[i])) {
            out += text[i++];
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        const std::string_view token = text.substr(i, j - i);
        std::size_t a = 0, b = token.size();
        while (a < b && detail::is_edge_punct(token[a])) ++a;
        while (b > a && detail::is_edge_punct(token[b - 1])) --b;
        const std::string_view core = token.substr(a, b - a);
        const auto* syns = core.empty() ? nullptr : table.find(core);
        if (syns != nullptr && rate > 0.0 && unit(rng) < rate) {
            std::uniform_int_distribution<std::size_t> pick(0, syns->size() - 1);
            std::string replacement = (*syns)[pick(rng)];
            if (std::isupper(static_cast<unsigned char>(core[0])) && !replacement.empty())
                replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
            out += token.substr(0, a);
            out += replacement;
            out += token.substr(b);
            ++n_replaced;
        } else {
            out += token;
        }
        i = j;
    }
    if (replaced != nullptr) *replaced = n_replaced;
    return out;
}

/// Appends `policy.copies` synonym-augmented variants after each training
/// record. Variants keep the source label and get ids "<id>#aug<k>", k from 1.
/// Eval and test splits are returned untouched.
inline Corpus expand_training_split(const Corpus& corpus, const SynonymTable& table, const AugmentPolicy& policy,
                                    std::uint64_t seed) {
    policy.validate();
    Corpus out;
    out.eval = corpus.eval;
    out.test = corpus.test;
    out.train.reserve(corpus.train.size() * (policy.copies + 1));
    for (std::size_t i = 0; i < corpus.train.size(); ++i) {
        const auto& src = corpus.train[i];
        out.train.push_back(src);
        for (std::size_t k = 1; k <= policy.copies; ++k) {
            const auto variant_seed = derive_seed(derive_seed(seed, i), k);
            out.train.push_back({src.id + "#aug" + std::to_string(k), src.user_id,
                                 synonym_augment(src.text, table, policy.rate, variant_seed), src.traits});
        }
    }
    return out;
}

} // namespace trait_tuner
