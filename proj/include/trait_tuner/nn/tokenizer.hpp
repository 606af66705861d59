#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "../errors.hpp"
#include "../hashing.hpp"

namespace trait_tuner::nn {

enum class TokenizerKind { hashed, wordpiece };

inline std::string_view tokenizer_kind_name(TokenizerKind k) { return k == TokenizerKind::hashed ? "hashed" : "wordpiece"; }

inline TokenizerKind tokenizer_kind_from_name(std::string_view s) {
    if (s == "hashed") return TokenizerKind::hashed;
    if (s == "wordpiece") return TokenizerKind::wordpiece;
    throw ConfigError("unknown tokenizer kind '" + std::string(s) + "'");
}

/// Maps text to token ids. Two schemes:
///  - hashed: lowercase whitespace tokens hashed into [1, vocab_size); id 0 is
///    reserved for the placeholder emitted for empty input.
///  - wordpiece: punctuation-splitting pre-tokenizer followed by greedy
///    longest-match subwords ("##" continuation prefix) over a vocabulary file;
///    wraps the sequence in [CLS]/[SEP] when the vocabulary defines them.
class Tokenizer {
public:
    static Tokenizer hashed(std::size_t vocab_size) {
        if (vocab_size < 2) throw ConfigError("hashed tokenizer needs vocab_size >= 2");
        Tokenizer t;
        t.kind_ = TokenizerKind::hashed;
        t.vocab_size_ = vocab_size;
        return t;
    }

    static Tokenizer wordpiece(std::vector<std::string> vocab, bool lowercase) {
        Tokenizer t;
        t.kind_ = TokenizerKind::wordpiece;
        t.lowercase_ = lowercase;
        t.vocab_ = std::move(vocab);
        t.vocab_size_ = t.vocab_.size();
        for (std::size_t i = 0; i < t.vocab_.size(); ++i) t.index_.emplace(t.vocab_[i], static_cast<int>(i));
        auto id_of = [&](const char* tok) {
            auto it = t.index_.find(tok);
            return it == t.index_.end() ? -1 : it->second;
        };
        t.unk_ = id_of("[UNK]");
        t.cls_ = id_of("[CLS]");
        t.sep_ = id_of("[SEP]");
        if (t.unk_ < 0) throw ConfigError("wordpiece vocabulary lacks [UNK]");
        return t;
    }

    static Tokenizer wordpiece_from_file(const std::filesystem::path& vocab_file, bool lowercase) {
        std::ifstream in(vocab_file);
        if (!in) throw ResourceError("missing vocabulary file " + vocab_file.string());
        std::vector<std::string> vocab;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            vocab.push_back(line);
        }
        return wordpiece(std::move(vocab), lowercase);
    }

    TokenizerKind kind() const noexcept { return kind_; }
    std::size_t vocab_size() const noexcept { return vocab_size_; }
    bool lowercase() const noexcept { return lowercase_; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }

    /// Token ids for `text`, truncated from the end to at most `max_len`
    /// entries. Never returns an empty sequence.
    std::vector<int> encode(std::string_view text, std::size_t max_len) const {
        std::vector<int> ids = kind_ == TokenizerKind::hashed ? encode_hashed(text) : encode_wordpiece(text);
        const bool wrap = kind_ == TokenizerKind::wordpiece && cls_ >= 0 && sep_ >= 0 && max_len >= 3;
        const std::size_t budget = wrap ? max_len - 2 : max_len;
        if (ids.size() > budget) ids.resize(budget);
        if (wrap) {
            ids.insert(ids.begin(), cls_);
            ids.push_back(sep_);
        }
        if (ids.empty()) ids.push_back(kind_ == TokenizerKind::hashed ? 0 : unk_);
        return ids;
    }

private:
    static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

    std::vector<int> encode_hashed(std::string_view text) const {
        std::vector<int> ids;
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && is_space(text[i])) ++i;
            std::size_t j = i;
            while (j < text.size() && !is_space(text[j])) ++j;
            if (j > i) {
                std::string tok(text.substr(i, j - i));
                for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                ids.push_back(static_cast<int>(1 + fnv1a(tok) % (vocab_size_ - 1)));
            }
            i = j;
        }
        return ids;
    }

    std::vector<int> encode_wordpiece(std::string_view text) const {
        std::vector<std::string> words;
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        };
        for (char ch : text) {
            const auto c = static_cast<unsigned char>(ch);
            if (std::isspace(c)) {
                flush();
            } else if (std::ispunct(c)) {
                flush();
                words.emplace_back(1, ch);
            } else {
                cur += lowercase_ && c < 128 ? static_cast<char>(std::tolower(c)) : ch;
            }
        }
        flush();

        std::vector<int> ids;
        for (const auto& w : words) {
            std::vector<int> pieces;
            std::size_t start = 0;
            bool bad = false;
            while (start < w.size()) {
                std::size_t end = w.size();
                int found = -1;
                while (end > start) {
                    std::string sub = (start > 0 ? "##" : "") + w.substr(start, end - start);
                    if (auto it = index_.find(sub); it != index_.end()) {
                        found = it->second;
                        break;
                    }
                    --end;
                }
                if (found < 0) {
                    bad = true;
                    break;
                }
                pieces.push_back(found);
                start = end;
            }
            if (bad) ids.push_back(unk_);
            else ids.insert(ids.end(), pieces.begin(), pieces.end());
        }
        return ids;
    }

    TokenizerKind kind_ = TokenizerKind::hashed;
    std::size_t vocab_size_ = 0;
    bool lowercase_ = true;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> index_;
    int unk_ = -1;
    int cls_ = -1;
    int sep_ = -1;
};

} // namespace trait_tuner::nn
