#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "nn/ops.hpp"

namespace trait_tuner {

enum class SchedulerKind { constant, linear_warmup_decay, cosine_warmup };

inline std::string_view scheduler_name(SchedulerKind k) {
    switch (k) {
    case SchedulerKind::constant: return "constant";
    case SchedulerKind::linear_warmup_decay: return "linear-warmup-decay";
    case SchedulerKind::cosine_warmup: return "cosine-warmup";
    }
    return "?";
}

inline SchedulerKind scheduler_from_name(std::string_view s) {
    if (s == "constant") return SchedulerKind::constant;
    if (s == "linear-warmup-decay") return SchedulerKind::linear_warmup_decay;
    if (s == "cosine-warmup") return SchedulerKind::cosine_warmup;
    throw ConfigError("unknown scheduler '" + std::string(s) + "'");
}

/// Learning rate as a function of the optimizer step (0-based).
class LearningRateSchedule {
public:
    LearningRateSchedule(SchedulerKind kind, double peak, std::size_t total_steps, double warmup_fraction)
        : kind_(kind), peak_(peak), total_(std::max<std::size_t>(total_steps, 1)),
          warmup_(static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total_)))) {}

    std::size_t warmup_steps() const noexcept { return warmup_; }
    std::size_t total_steps() const noexcept { return total_; }

    double at(std::size_t step) const {
        if (kind_ == SchedulerKind::constant) return peak_;
        if (step < warmup_) return peak_ * static_cast<double>(step) / static_cast<double>(warmup_);
        const double span = static_cast<double>(total_ - warmup_);
        const double progress = std::min(1.0, static_cast<double>(step - warmup_) / span);
        if (kind_ == SchedulerKind::linear_warmup_decay) return peak_ * (1.0 - progress);
        return peak_ * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    }

private:
    SchedulerKind kind_;
    double peak_;
    std::size_t total_;
    std::size_t warmup_;
};

/// Adam with decoupled weight decay. Decay skips parameters flagged
/// `decay == false` (biases, norm gains).
class AdamW {
public:
    struct Options {
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        double weight_decay = 0.01;
    };

    AdamW(std::vector<nn::Param*> params, Options opts) : params_(std::move(params)), opts_(opts) {
        for (const auto* p : params_) {
            m_.push_back(nn::Matrix::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(nn::Matrix::Zero(p->value.rows(), p->value.cols()));
        }
    }

    std::size_t steps() const noexcept { return t_; }

    void step(double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            nn::Param& p = *params_[i];
            m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * p.grad;
            v_[i] = opts_.beta2 * v_[i] + (1.0 - opts_.beta2) * p.grad.cwiseProduct(p.grad);
            if (p.decay && opts_.weight_decay > 0.0) p.value *= 1.0 - lr * opts_.weight_decay;
            p.value.array() -= lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + opts_.eps);
        }
    }

private:
    std::vector<nn::Param*> params_;
    Options opts_;
    std::vector<nn::Matrix> m_, v_;
    std::size_t t_ = 0;
};

inline double global_grad_norm(const std::vector<nn::Param*>& params) {
    double sq = 0.0;
    for (const auto* p : params) sq += p->grad.squaredNorm();
    return std::sqrt(sq);
}

inline void clip_grad_norm(const std::vector<nn::Param*>& params, double max_norm) {
    const double norm = global_grad_norm(params);
    if (norm > max_norm && std::isfinite(norm))
        for (auto* p : params) p->grad *= max_norm / norm;
}

/// Dynamic loss scaling for half-precision backward passes: gradients are
/// computed on a scaled loss, steps with overflowed gradients are skipped and
/// the scale halved, and the scale doubles after a run of clean steps.
class LossScaler {
public:
    explicit LossScaler(double initial = 65536.0, std::size_t growth_interval = 200)
        : scale_(initial), growth_interval_(growth_interval) {}

    double scale() const noexcept { return scale_; }

    /// Unscales gradients in place; returns false (and backs off) on overflow.
    bool unscale(const std::vector<nn::Param*>& params) {
        for (const auto* p : params)
            if (!p->grad.allFinite()) {
                scale_ = std::max(1.0, scale_ / 2.0);
                clean_steps_ = 0;
                return false;
            }
        for (auto* p : params) p->grad /= scale_;
        if (++clean_steps_ >= growth_interval_) {
            scale_ *= 2.0;
            clean_steps_ = 0;
        }
        return true;
    }

private:
    double scale_;
    std::size_t growth_interval_;
    std::size_t clean_steps_ = 0;
};

} // namespace trait_tuner
