#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "hashing.hpp"
#include "io.hpp"
#include "nn/encoder.hpp"
#include "nn/head.hpp"
#include "nn/ops.hpp"
#include "nn/tensor_io.hpp"
#include "nn/tokenizer.hpp"
#include "traits.hpp"

namespace trait_tuner {

inline constexpr std::string_view tiny_test_encoder = "tiny-test";
inline constexpr std::array<std::string_view, 3> registered_encoders{"roberta-base", "bert-base", "tiny-test"};

inline bool is_registered_encoder(std::string_view name) {
    return std::find(registered_encoders.begin(), registered_encoders.end(), name) != registered_encoders.end();
}

struct EncoderSpec {
    std::string name = "roberta-base";
    std::size_t max_sequence_length = 384;  ///< subword tokens; longer inputs are truncated from the end
    std::size_t hidden_size = 0;            ///< filled in from the checkpoint when the model is built

    void validate() const {
        if (!is_registered_encoder(name)) throw ConfigError("unknown encoder '" + name + "'");
        if (max_sequence_length == 0) throw ConfigError("max_sequence_length must be positive");
    }

    friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

inline nlohmann::json to_json(const EncoderSpec& e) {
    return {{"name", e.name}, {"max_sequence_length", e.max_sequence_length}, {"hidden_size", e.hidden_size}};
}

inline EncoderSpec encoder_spec_from_json(const nlohmann::json& j) {
    EncoderSpec e;
    e.name = j.at("name").get<std::string>();
    e.max_sequence_length = j.value("max_sequence_length", e.max_sequence_length);
    e.hidden_size = j.value("hidden_size", std::size_t{0});
    e.validate();
    return e;
}

/// Architecture of the built-in randomly initialized test encoder.
inline nn::EncoderConfig tiny_test_config() {
    nn::EncoderConfig c;
    c.vocab_size = 4096;
    c.hidden_size = 32;
    c.num_layers = 2;
    c.num_heads = 2;
    c.intermediate_size = 64;
    c.max_positions = 512;
    c.layer_norm_eps = 1e-5;
    c.init_std = 0.02;
    return c;
}

/// Checkpoint cache root: $TRAIT_TUNER_CACHE, else ~/.cache/trait_tuner.
inline std::filesystem::path checkpoint_cache_root() {
    if (const char* env = std::getenv("TRAIT_TUNER_CACHE"); env != nullptr && *env != '\0') return env;
    if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0')
        return std::filesystem::path(home) / ".cache" / "trait_tuner";
    return ".trait_tuner_cache";
}

/// Encoder, tokenizer, mean pooling over all (non-padding) tokens, and a
/// regression head producing five raw outputs. Every parameter is trainable.
class RegressionModel {
public:
    struct SampleCache {
        nn::TransformerEncoder::Cache encoder;
        nn::RegressionHead::Cache head;
        Eigen::Index tokens = 0;
    };

    RegressionModel(EncoderSpec spec, nn::Tokenizer tokenizer, nn::TransformerEncoder encoder, nn::RegressionHead head)
        : spec_(std::move(spec)), tokenizer_(std::move(tokenizer)), encoder_(std::move(encoder)), head_(std::move(head)) {
        spec_.hidden_size = encoder_.hidden_size();
    }

    const EncoderSpec& encoder_spec() const noexcept { return spec_; }
    const HeadSpec& head_spec() const noexcept { return head_.spec(); }
    const nn::Tokenizer& tokenizer() const noexcept { return tokenizer_; }
    const nn::EncoderConfig& encoder_config() const noexcept { return encoder_.config(); }

    std::vector<int> encode(std::string_view text) const { return tokenizer_.encode(text, spec_.max_sequence_length); }

    /// Raw (unclamped) 1 x 5 output for one token sequence.
    nn::Matrix forward(const std::vector<int>& ids, const nn::Mode& mode, SampleCache* cache) const {
        nn::Matrix hidden = encoder_.forward(ids, mode, cache ? &cache->encoder : nullptr);
        nn::Matrix pooled = hidden.colwise().mean();
        if (cache != nullptr) cache->tokens = hidden.rows();
        return head_.forward(pooled, mode, cache ? &cache->head : nullptr);
    }

    void backward(const SampleCache& cache, const nn::Matrix& d_out, const nn::Mode& mode) {
        nn::Matrix d_pooled = head_.backward(cache.head, d_out, mode);
        nn::Matrix d_hidden = nn::Matrix::Ones(cache.tokens, 1) * d_pooled / static_cast<double>(cache.tokens);
        encoder_.backward(cache.encoder, std::move(d_hidden), mode);
    }

    template <typename F>
    void for_each_param(F&& f) {
        encoder_.for_each_param(f);
        head_.for_each_param(f);
    }

    template <typename F>
    void for_each_param(F&& f) const {
        encoder_.for_each_param(f);
        head_.for_each_param(f);
    }

    template <typename F>
    void for_each_head_param(F&& f) {
        head_.for_each_param(f);
    }

    std::vector<nn::Param*> params() {
        std::vector<nn::Param*> out;
        for_each_param([&](nn::Param& p) { out.push_back(&p); });
        return out;
    }

    std::vector<const nn::Param*> params() const {
        std::vector<const nn::Param*> out;
        for_each_param([&](const nn::Param& p) { out.push_back(&p); });
        return out;
    }

    void zero_grad() {
        for_each_param([](nn::Param& p) { p.zero_grad(); });
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for_each_param([&](const nn::Param& p) { n += static_cast<std::size_t>(p.value.size()); });
        return n;
    }

    /// FNV-1a over the bytes of every parameter value.
    std::uint64_t checksum() const {
        std::uint64_t h = fnv1a_offset;
        for_each_param([&](const nn::Param& p) {
            h = fnv1a(std::string_view(reinterpret_cast<const char*>(p.value.data()), p.value.size() * sizeof(double)), h);
        });
        return h;
    }

    std::uint64_t head_checksum() const {
        std::uint64_t h = fnv1a_offset;
        head_.for_each_param([&](const nn::Param& p) {
            h = fnv1a(std::string_view(reinterpret_cast<const char*>(p.value.data()), p.value.size() * sizeof(double)), h);
        });
        return h;
    }

    /// Raw outputs (N x 5) in input order.
    nn::Matrix predict_raw(std::span<const std::string> texts) const {
        nn::Matrix out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(trait_count));
        for (std::size_t i = 0; i < texts.size(); ++i)
            out.row(static_cast<Eigen::Index>(i)) = forward(encode(texts[i]), nn::inference_mode(), nullptr).row(0);
        return out;
    }

private:
    EncoderSpec spec_;
    nn::Tokenizer tokenizer_;
    nn::TransformerEncoder encoder_;
    nn::RegressionHead head_;
};

inline TraitVector clamped_row(const nn::Matrix& m, Eigen::Index row) {
    TraitVector v;
    for (std::size_t t = 0; t < trait_count; ++t) v[t] = std::clamp(m(row, static_cast<Eigen::Index>(t)), 0.0, 1.0);
    return v;
}

/// Clamped predictions, one TraitVector per text, in input order. Texts are
/// processed in groups of `batch_size`; each sequence runs independently, so
/// the batch size never changes the result.
inline std::vector<TraitVector> predict(const RegressionModel& model, std::span<const std::string> texts,
                                        std::size_t batch_size = 16) {
    if (texts.empty()) throw ArgumentError("predict: empty text list");
    if (batch_size == 0) throw ArgumentError("predict: batch_size must be positive");
    std::vector<TraitVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size) {
        const auto batch = texts.subspan(start, std::min(batch_size, texts.size() - start));
        const nn::Matrix raw = model.predict_raw(batch);
        for (Eigen::Index r = 0; r < raw.rows(); ++r) out.push_back(clamped_row(raw, r));
    }
    return out;
}

/// Mean-aggregating ensemble of independently trained members.
struct EnsembleModel {
    std::vector<RegressionModel> members;

    void validate() const {
        if (members.empty()) throw ArgumentError("ensemble has no members");
    }
};

/// Per text and trait: arithmetic mean of the members' clamped predictions,
/// re-clamped to [0,1].
inline std::vector<TraitVector> ensemble_predict(const EnsembleModel& ensemble, std::span<const std::string> texts,
                                                 std::size_t batch_size = 16) {
    ensemble.validate();
    if (texts.empty()) throw ArgumentError("predict: empty text list");
    std::vector<TraitVector> sum(texts.size());
    for (const auto& m : ensemble.members) {
        const auto p = predict(m, texts, batch_size);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t t = 0; t < trait_count; ++t) sum[i][t] += p[i][t];
    }
    const double n = static_cast<double>(ensemble.members.size());
    for (auto& v : sum)
        for (auto& s : v.scores) s = std::clamp(s / n, 0.0, 1.0);
    return sum;
}

// ---------------------------------------------------------------------------
// Encoder checkpoints

/// Writes an encoder in the checkpoint cache layout: config.json,
/// weights.bin and (for wordpiece tokenizers) vocab.txt.
inline void write_encoder_checkpoint(const std::filesystem::path& dir, const RegressionModel& model) {
    std::filesystem::create_directories(dir);
    nlohmann::json config = nn::to_json(model.encoder_config());
    config["tokenizer"] = {{"kind", nn::tokenizer_kind_name(model.tokenizer().kind())},
                           {"lowercase", model.tokenizer().lowercase()}};
    io::write_json(dir / "config.json", config);
    std::vector<const nn::Param*> enc;
    for (const nn::Param* p : model.params())
        if (p->name.rfind("encoder.", 0) == 0) enc.push_back(p);
    nn::save_tensors(dir / "weights.bin", enc);
    if (model.tokenizer().kind() == nn::TokenizerKind::wordpiece) {
        std::string vocab;
        for (const auto& tok : model.tokenizer().vocabulary()) vocab += tok + "\n";
        io::write_text(dir / "vocab.txt", vocab);
    }
}

inline nn::Tokenizer tokenizer_from_config(const nlohmann::json& config, const nn::EncoderConfig& enc,
                                           const std::filesystem::path& dir) {
    const auto tok = config.value("tokenizer", nlohmann::json::object());
    const auto kind = nn::tokenizer_kind_from_name(tok.value("kind", std::string("wordpiece")));
    if (kind == nn::TokenizerKind::hashed) return nn::Tokenizer::hashed(enc.vocab_size);
    auto t = nn::Tokenizer::wordpiece_from_file(dir / "vocab.txt", tok.value("lowercase", true));
    if (t.vocab_size() != enc.vocab_size)
        throw ResourceError("vocabulary size in " + (dir / "vocab.txt").string() + " does not match config.json");
    return t;
}

/// Builds a model. The tiny-test encoder is randomly initialized from `seed`;
/// other encoders load from `<cache root>/<name>/`. Head parameters are always
/// initialized from `seed`.
inline RegressionModel build_model(EncoderSpec enc, const HeadSpec& head, std::uint64_t seed) {
    enc.validate();
    head.validate();
    std::mt19937_64 enc_rng(derive_seed(seed, "encoder-init"));
    std::mt19937_64 head_rng(derive_seed(seed, "head-init"));

    nn::EncoderConfig config;
    nn::Tokenizer tokenizer;
    nn::TransformerEncoder encoder;
    if (enc.name == tiny_test_encoder) {
        config = tiny_test_config();
        tokenizer = nn::Tokenizer::hashed(config.vocab_size);
        if (enc.max_sequence_length > config.max_positions)
            throw ConfigError("max_sequence_length exceeds the encoder's positional capacity");
        encoder = nn::TransformerEncoder(config, enc_rng);
    } else {
        const auto dir = checkpoint_cache_root() / enc.name;
        if (!std::filesystem::exists(dir / "config.json") || !std::filesystem::exists(dir / "weights.bin"))
            throw ResourceError("checkpoint '" + enc.name + "' not available in cache path " + dir.string() +
                                " (set TRAIT_TUNER_CACHE)");
        const auto cfg_json = io::read_json(dir / "config.json");
        config = nn::encoder_config_from_json(cfg_json);
        if (enc.max_sequence_length > config.max_positions)
            throw ConfigError("max_sequence_length exceeds the encoder's positional capacity");
        tokenizer = tokenizer_from_config(cfg_json, config, dir);
        encoder = nn::TransformerEncoder(config, enc_rng);
        std::vector<nn::Param*> params;
        encoder.for_each_param([&](nn::Param& p) { params.push_back(&p); });
        nn::assign_tensors(nn::load_tensors(dir / "weights.bin"), params, (dir / "weights.bin").string());
    }
    nn::RegressionHead regression_head(head, config.hidden_size, head_rng);
    return RegressionModel(std::move(enc), std::move(tokenizer), std::move(encoder), std::move(regression_head));
}

/// Rebuilds a model skeleton from a persisted architecture description
/// (no checkpoint access); parameters are expected to be overwritten.
inline RegressionModel build_from_architecture(EncoderSpec enc, const HeadSpec& head, const nn::EncoderConfig& config,
                                               nn::Tokenizer tokenizer) {
    std::mt19937_64 rng(0);
    nn::TransformerEncoder encoder(config, rng);
    nn::RegressionHead regression_head(head, config.hidden_size, rng);
    return RegressionModel(std::move(enc), std::move(tokenizer), std::move(encoder), std::move(regression_head));
}

} // namespace trait_tuner
