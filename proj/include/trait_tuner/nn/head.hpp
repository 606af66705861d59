#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "../errors.hpp"
#include "../traits.hpp"
#include "ops.hpp"

namespace trait_tuner {

enum class HeadKind { linear, mlp };

inline std::string_view head_kind_name(HeadKind k) { return k == HeadKind::linear ? "linear" : "mlp"; }

inline HeadKind head_kind_from_name(std::string_view s) {
    if (s == "linear") return HeadKind::linear;
    if (s == "mlp") return HeadKind::mlp;
    throw ConfigError("unknown head kind '" + std::string(s) + "' (expected linear or mlp)");
}

struct HeadSpec {
    static constexpr std::size_t output_dim = trait_count;

    HeadKind kind = HeadKind::linear;
    std::vector<std::size_t> hidden_sizes;  ///< mlp only
    double dropout = 0.1;

    static HeadSpec linear() { return {HeadKind::linear, {}, 0.1}; }
    /// One hidden layer of 256 units.
    static HeadSpec mlp() { return {HeadKind::mlp, {256}, 0.1}; }

    void validate() const {
        if (kind == HeadKind::mlp && hidden_sizes.empty())
            throw ConfigError("mlp head needs at least one hidden layer");
        if (kind == HeadKind::linear && !hidden_sizes.empty())
            throw ConfigError("linear head takes no hidden layers");
        for (auto n : hidden_sizes)
            if (n == 0) throw ConfigError("mlp hidden sizes must be positive");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("head dropout must lie in [0,1)");
    }

    friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

inline nlohmann::json to_json(const HeadSpec& h) {
    return {{"kind", head_kind_name(h.kind)},
            {"hidden_sizes", h.hidden_sizes},
            {"dropout", h.dropout},
            {"output_dim", HeadSpec::output_dim}};
}

inline HeadSpec head_spec_from_json(const nlohmann::json& j) {
    HeadSpec h;
    h.kind = head_kind_from_name(j.at("kind").get<std::string>());
    h.hidden_sizes = j.value("hidden_sizes", std::vector<std::size_t>{});
    h.dropout = j.value("dropout", 0.1);
    if (j.contains("output_dim") && j["output_dim"].get<std::size_t>() != HeadSpec::output_dim)
        throw ConfigError("head output_dim must be 5");
    h.validate();
    return h;
}

namespace nn {

/// Dense regression head: dropout on the pooled input, then each hidden
/// layer is dense + GELU + dropout, then a dense projection to five outputs.
/// The output is linear; clamping happens at inference time.
class RegressionHead {
public:
    struct Cache {
        std::vector<Matrix> inputs;    ///< input to each dense layer (post-dropout)
        std::vector<Matrix> pre_acts;  ///< hidden pre-activations
        std::vector<Matrix> masks;     ///< dropout masks, one per dense layer input
    };

    RegressionHead() = default;

    RegressionHead(const HeadSpec& spec, std::size_t input_dim, std::mt19937_64& rng) : spec_(spec) {
        spec_.validate();
        std::size_t in = input_dim;
        std::vector<std::size_t> outs = spec_.hidden_sizes;
        outs.push_back(HeadSpec::output_dim);
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const std::string p = "head.dense." + std::to_string(i) + ".";
            weights_.emplace_back(p + "weight",
                                  glorot_uniform(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(outs[i]), rng),
                                  true);
            biases_.emplace_back(p + "bias", Matrix::Zero(1, static_cast<Eigen::Index>(outs[i])), false);
            in = outs[i];
        }
    }

    const HeadSpec& spec() const noexcept { return spec_; }

    template <typename F>
    void for_each_param(F&& f) {
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            f(weights_[i]);
            f(biases_[i]);
        }
    }

    template <typename F>
    void for_each_param(F&& f) const {
        const_cast<RegressionHead*>(this)->for_each_param([&](Param& p) { f(static_cast<const Param&>(p)); });
    }

    /// Maps pooled features (rows x input_dim) to raw outputs (rows x 5).
    Matrix forward(const Matrix& pooled, const Mode& mode, Cache* cache) const {
        Matrix x = pooled;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            Matrix mask = dropout_mask(x.rows(), x.cols(), mode);
            x = apply_mask(x, mask);
            if (cache != nullptr) {
                cache->inputs.push_back(x);
                cache->masks.push_back(std::move(mask));
            }
            Matrix z = linear(x, weights_[i], biases_[i], mode);
            if (i + 1 == weights_.size()) return z;
            x = gelu(z);
            if (cache != nullptr) cache->pre_acts.push_back(std::move(z));
        }
        return x;
    }

    /// Accumulates gradients and returns dL/d(pooled).
    Matrix backward(const Cache& cache, const Matrix& d_out, const Mode& mode) {
        Matrix grad = d_out;
        for (std::size_t i = weights_.size(); i-- > 0;) {
            if (i + 1 < weights_.size()) grad = gelu_backward(cache.pre_acts[i], grad);
            grad = linear_backward(cache.inputs[i], grad, weights_[i], biases_[i], mode);
            grad = apply_mask(grad, cache.masks[i]);
        }
        return grad;
    }

private:
    HeadSpec spec_;
    std::vector<Param> weights_;
    std::vector<Param> biases_;
};

} // namespace nn
} // namespace trait_tuner
