#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "../errors.hpp"
#include "ops.hpp"

namespace trait_tuner::nn {

struct EncoderConfig {
    std::size_t vocab_size = 4096;
    std::size_t hidden_size = 32;
    std::size_t num_layers = 2;
    std::size_t num_heads = 2;
    std::size_t intermediate_size = 64;
    std::size_t max_positions = 512;
    double layer_norm_eps = 1e-5;
    double init_std = 0.02;

    void validate() const {
        if (vocab_size == 0 || hidden_size == 0 || num_layers == 0 || num_heads == 0 || intermediate_size == 0 ||
            max_positions == 0)
            throw ConfigError("encoder dimensions must be positive");
        if (hidden_size % num_heads != 0) throw ConfigError("hidden_size must be divisible by num_heads");
    }
};

inline nlohmann::json to_json(const EncoderConfig& c) {
    return {{"vocab_size", c.vocab_size},          {"hidden_size", c.hidden_size},
            {"num_layers", c.num_layers},          {"num_heads", c.num_heads},
            {"intermediate_size", c.intermediate_size}, {"max_position_embeddings", c.max_positions},
            {"layer_norm_eps", c.layer_norm_eps},  {"initializer_range", c.init_std}};
}

inline EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
    EncoderConfig c;
    try {
        c.vocab_size = j.at("vocab_size").get<std::size_t>();
        c.hidden_size = j.at("hidden_size").get<std::size_t>();
        c.num_layers = j.at("num_layers").get<std::size_t>();
        c.num_heads = j.at("num_heads").get<std::size_t>();
        c.intermediate_size = j.at("intermediate_size").get<std::size_t>();
        c.max_positions = j.at("max_position_embeddings").get<std::size_t>();
        c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
        c.init_std = j.value("initializer_range", c.init_std);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("encoder config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Post-norm transformer encoder (token + learned position embeddings,
/// multi-head self-attention, GELU feed-forward) with hand-written backward
/// passes. Sequences are processed one at a time, so there is no padding.
class TransformerEncoder {
public:
    struct Layer {
        Param wq, bq, wk, bk, wv, bv, wo, bo;
        Param ln1_g, ln1_b;
        Param w1, b1, w2, b2;
        Param ln2_g, ln2_b;
    };

    struct LayerCache {
        Matrix input, q, k, v, context, attn_mask, h1, pre_act, act, ffn_mask;
        std::vector<Matrix> probs;
        LayerNormCache ln1, ln2;
    };

    struct Cache {
        std::vector<int> ids;
        LayerNormCache ln0;
        std::vector<LayerCache> layers;
    };

    TransformerEncoder() = default;

    TransformerEncoder(const EncoderConfig& config, std::mt19937_64& rng) : config_(config) {
        config_.validate();
        const auto h = static_cast<Eigen::Index>(config_.hidden_size);
        const auto ff = static_cast<Eigen::Index>(config_.intermediate_size);
        const double sd = config_.init_std;
        auto weight = [&](std::string name, Eigen::Index r, Eigen::Index c) {
            return Param(std::move(name), random_normal(r, c, sd, rng), true);
        };
        auto zeros = [](std::string name, Eigen::Index c) { return Param(std::move(name), Matrix::Zero(1, c), false); };
        auto ones = [](std::string name, Eigen::Index c) { return Param(std::move(name), Matrix::Ones(1, c), false); };

        token_embedding_ = weight("encoder.embeddings.token", static_cast<Eigen::Index>(config_.vocab_size), h);
        position_embedding_ = weight("encoder.embeddings.position", static_cast<Eigen::Index>(config_.max_positions), h);
        embed_ln_g_ = ones("encoder.embeddings.norm.gain", h);
        embed_ln_b_ = zeros("encoder.embeddings.norm.bias", h);
        for (std::size_t l = 0; l < config_.num_layers; ++l) {
            const std::string p = "encoder.layer." + std::to_string(l) + ".";
            layers_.push_back(Layer{
                weight(p + "attention.query.weight", h, h), zeros(p + "attention.query.bias", h),
                weight(p + "attention.key.weight", h, h), zeros(p + "attention.key.bias", h),
                weight(p + "attention.value.weight", h, h), zeros(p + "attention.value.bias", h),
                weight(p + "attention.output.weight", h, h), zeros(p + "attention.output.bias", h),
                ones(p + "attention.norm.gain", h), zeros(p + "attention.norm.bias", h),
                weight(p + "ffn.in.weight", h, ff), zeros(p + "ffn.in.bias", ff),
                weight(p + "ffn.out.weight", ff, h), zeros(p + "ffn.out.bias", h),
                ones(p + "ffn.norm.gain", h), zeros(p + "ffn.norm.bias", h),
            });
        }
    }

    const EncoderConfig& config() const noexcept { return config_; }
    std::size_t hidden_size() const noexcept { return config_.hidden_size; }

    template <typename F>
    void for_each_param(F&& f) {
        f(token_embedding_);
        f(position_embedding_);
        f(embed_ln_g_);
        f(embed_ln_b_);
        for (auto& L : layers_)
            for (Param* p : {&L.wq, &L.bq, &L.wk, &L.bk, &L.wv, &L.bv, &L.wo, &L.bo, &L.ln1_g, &L.ln1_b, &L.w1, &L.b1,
                             &L.w2, &L.b2, &L.ln2_g, &L.ln2_b})
                f(*p);
    }

    template <typename F>
    void for_each_param(F&& f) const {
        const_cast<TransformerEncoder*>(this)->for_each_param([&](Param& p) { f(static_cast<const Param&>(p)); });
    }

    /// Hidden states (T x hidden) for one token sequence.
    Matrix forward(const std::vector<int>& ids, const Mode& mode, Cache* cache) const {
        const auto t_len = static_cast<Eigen::Index>(ids.size());
        if (ids.empty() || ids.size() > config_.max_positions)
            throw ArgumentError("sequence length must be in [1, max_positions]");
        Matrix x(t_len, static_cast<Eigen::Index>(config_.hidden_size));
        for (Eigen::Index t = 0; t < t_len; ++t) {
            const int id = ids[static_cast<std::size_t>(t)];
            if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) throw ArgumentError("token id out of range");
            x.row(t) = token_embedding_.value.row(id) + position_embedding_.value.row(t);
        }
        if (cache != nullptr) {
            cache->ids = ids;
            cache->layers.assign(layers_.size(), {});
        }
        Matrix h = layer_norm(x, embed_ln_g_, embed_ln_b_, config_.layer_norm_eps, cache ? &cache->ln0 : nullptr);
        for (std::size_t l = 0; l < layers_.size(); ++l)
            h = layer_forward(layers_[l], h, mode, cache ? &cache->layers[l] : nullptr);
        return h;
    }

    /// Accumulates parameter gradients given dL/d(hidden states).
    void backward(const Cache& cache, Matrix grad, const Mode& mode) {
        for (std::size_t l = layers_.size(); l-- > 0;) grad = layer_backward(layers_[l], cache.layers[l], grad, mode);
        Matrix dx = layer_norm_backward(cache.ln0, grad, embed_ln_g_, embed_ln_b_);
        for (std::size_t t = 0; t < cache.ids.size(); ++t) {
            const auto row = static_cast<Eigen::Index>(t);
            token_embedding_.grad.row(cache.ids[t]) += dx.row(row);
            position_embedding_.grad.row(row) += dx.row(row);
        }
    }

private:
    Eigen::Index head_dim() const { return static_cast<Eigen::Index>(config_.hidden_size / config_.num_heads); }

    Matrix layer_forward(const Layer& L, const Matrix& h, const Mode& mode, LayerCache* c) const {
        const Eigen::Index dh = head_dim();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
        Matrix q = linear(h, L.wq, L.bq, mode);
        Matrix k = linear(h, L.wk, L.bk, mode);
        Matrix v = linear(h, L.wv, L.bv, mode);
        Matrix context(h.rows(), h.cols());
        std::vector<Matrix> probs;
        for (std::size_t head = 0; head < config_.num_heads; ++head) {
            const Eigen::Index off = static_cast<Eigen::Index>(head) * dh;
            Matrix scores = matmul(q.middleCols(off, dh), k.middleCols(off, dh).transpose(), mode) * scale;
            Matrix p = softmax_rows(scores);
            context.middleCols(off, dh) = matmul(p, v.middleCols(off, dh), mode);
            probs.push_back(std::move(p));
        }
        Matrix attn_mask = dropout_mask(h.rows(), h.cols(), mode);
        Matrix attn = apply_mask(linear(context, L.wo, L.bo, mode), attn_mask);
        LayerNormCache ln1;
        Matrix h1 = layer_norm(h + attn, L.ln1_g, L.ln1_b, config_.layer_norm_eps, c ? &ln1 : nullptr);
        Matrix pre_act = linear(h1, L.w1, L.b1, mode);
        Matrix act = gelu(pre_act);
        Matrix ffn_mask = dropout_mask(h.rows(), h.cols(), mode);
        Matrix ffn = apply_mask(linear(act, L.w2, L.b2, mode), ffn_mask);
        LayerNormCache ln2;
        Matrix out = layer_norm(h1 + ffn, L.ln2_g, L.ln2_b, config_.layer_norm_eps, c ? &ln2 : nullptr);
        if (c != nullptr) {
            c->input = h;
            c->q = std::move(q);
            c->k = std::move(k);
            c->v = std::move(v);
            c->context = std::move(context);
            c->probs = std::move(probs);
            c->attn_mask = std::move(attn_mask);
            c->ln1 = std::move(ln1);
            c->h1 = std::move(h1);
            c->pre_act = std::move(pre_act);
            c->act = std::move(act);
            c->ffn_mask = std::move(ffn_mask);
            c->ln2 = std::move(ln2);
        }
        return out;
    }

    Matrix layer_backward(Layer& L, const LayerCache& c, const Matrix& d_out, const Mode& mode) {
        const Eigen::Index dh = head_dim();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        Matrix d_res2 = layer_norm_backward(c.ln2, d_out, L.ln2_g, L.ln2_b);
        Matrix d_ffn = apply_mask(d_res2, c.ffn_mask);
        Matrix d_act = linear_backward(c.act, d_ffn, L.w2, L.b2, mode);
        Matrix d_pre = gelu_backward(c.pre_act, d_act);
        Matrix d_h1 = d_res2 + linear_backward(c.h1, d_pre, L.w1, L.b1, mode);

        Matrix d_res1 = layer_norm_backward(c.ln1, d_h1, L.ln1_g, L.ln1_b);
        Matrix d_attn = apply_mask(d_res1, c.attn_mask);
        Matrix d_context = linear_backward(c.context, d_attn, L.wo, L.bo, mode);

        Matrix dq(c.q.rows(), c.q.cols()), dk(c.k.rows(), c.k.cols()), dv(c.v.rows(), c.v.cols());
        for (std::size_t head = 0; head < config_.num_heads; ++head) {
            const Eigen::Index off = static_cast<Eigen::Index>(head) * dh;
            const Matrix& p = c.probs[head];
            Matrix d_ctx = d_context.middleCols(off, dh);
            Matrix d_p = matmul(d_ctx, c.v.middleCols(off, dh).transpose(), mode);
            dv.middleCols(off, dh) = matmul(p.transpose(), d_ctx, mode);
            Matrix d_scores = softmax_rows_backward(p, d_p) * scale;
            dq.middleCols(off, dh) = matmul(d_scores, c.k.middleCols(off, dh), mode);
            dk.middleCols(off, dh) = matmul(d_scores.transpose(), c.q.middleCols(off, dh), mode);
        }
        Matrix d_in = d_res1;
        d_in += linear_backward(c.input, dq, L.wq, L.bq, mode);
        d_in += linear_backward(c.input, dk, L.wk, L.bk, mode);
        d_in += linear_backward(c.input, dv, L.wv, L.bv, mode);
        return d_in;
    }

    EncoderConfig config_;
    Param token_embedding_, position_embedding_, embed_ln_g_, embed_ln_b_;
    std::vector<Layer> layers_;
};

} // namespace trait_tuner::nn
