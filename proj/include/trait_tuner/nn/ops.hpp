#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace trait_tuner::nn {

/// Rows are tokens (or samples), columns are features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ColVector = Eigen::Matrix<double, Eigen::Dynamic, 1>;

/// A trainable tensor with its gradient accumulator.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    bool decay = true;  ///< weight decay applies (false for biases and norm gains)

    Param() = default;
    Param(std::string n, Matrix v, bool d) : name(std::move(n)), value(std::move(v)), decay(d) {
        grad = Matrix::Zero(value.rows(), value.cols());
    }
    void zero_grad() { grad.setZero(); }
};

enum class Precision { full, mixed };

/// Rounds every element to the nearest IEEE binary16 value (saturating to
/// ±inf on overflow, like a real half-precision cast).
inline Matrix to_half(const Matrix& m) {
    return m.unaryExpr([](double x) { return static_cast<double>(static_cast<float>(Eigen::half(static_cast<float>(x)))); });
}

/// Per-call execution settings shared by forward and backward.
struct Mode {
    bool training = false;
    double dropout = 0.0;
    Precision precision = Precision::full;
    std::mt19937_64* rng = nullptr;  ///< required when training with dropout > 0

    bool mixed() const noexcept { return precision == Precision::mixed; }
};

inline const Mode& inference_mode() {
    static const Mode m{};
    return m;
}

/// Matrix product; under mixed precision the operands and the result are
/// rounded to binary16 while accumulation stays in double, mirroring
/// half-input/wide-accumulate hardware.
template <typename A, typename B>
Matrix matmul(const A& a, const B& b, const Mode& mode) {
    if (!mode.mixed()) return Matrix(a * b);
    return to_half(Matrix(to_half(Matrix(a)) * to_half(Matrix(b))));
}

/// y = x W + b
inline Matrix linear(const Matrix& x, const Param& w, const Param& b, const Mode& mode) {
    Matrix y = matmul(x, w.value, mode);
    y.rowwise() += b.value.row(0);
    return y;
}

/// Accumulates dW, db for y = x W + b and returns dx.
inline Matrix linear_backward(const Matrix& x, const Matrix& dy, Param& w, Param& b, const Mode& mode) {
    w.grad += matmul(x.transpose(), dy, mode);
    b.grad.row(0) += dy.colwise().sum();
    return matmul(dy, w.value.transpose(), mode);
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double gelu_grad(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline Matrix gelu(const Matrix& x) {
    return x.unaryExpr([](double v) { return gelu(v); });
}

inline Matrix gelu_backward(const Matrix& x, const Matrix& dy) {
    return dy.cwiseProduct(x.unaryExpr([](double v) { return gelu_grad(v); }));
}

struct LayerNormCache {
    Matrix xhat;
    ColVector rstd;
};

/// Row-wise layer normalization with learned gain and bias.
inline Matrix layer_norm(const Matrix& x, const Param& gain, const Param& bias, double eps, LayerNormCache* cache) {
    const auto cols = static_cast<double>(x.cols());
    ColVector mean = x.rowwise().sum() / cols;
    Matrix centered = x.colwise() - mean;
    ColVector var = centered.cwiseProduct(centered).rowwise().sum() / cols;
    ColVector rstd = (var.array() + eps).rsqrt().matrix();
    Matrix xhat = centered.array().colwise() * rstd.array();
    Matrix y = xhat.array().rowwise() * gain.value.row(0).array();
    y.rowwise() += bias.value.row(0);
    if (cache != nullptr) {
        cache->xhat = std::move(xhat);
        cache->rstd = std::move(rstd);
    }
    return y;
}

inline Matrix layer_norm_backward(const LayerNormCache& cache, const Matrix& dy, Param& gain, Param& bias) {
    gain.grad.row(0) += dy.cwiseProduct(cache.xhat).colwise().sum();
    bias.grad.row(0) += dy.colwise().sum();
    const auto cols = static_cast<double>(dy.cols());
    Matrix dxhat = dy.array().rowwise() * gain.value.row(0).array();
    ColVector mean_dxhat = dxhat.rowwise().sum() / cols;
    ColVector mean_dxhat_xhat = dxhat.cwiseProduct(cache.xhat).rowwise().sum() / cols;
    Matrix dx = dxhat.colwise() - mean_dxhat;
    dx.array() -= cache.xhat.array().colwise() * mean_dxhat_xhat.array();
    return dx.array().colwise() * cache.rstd.array();
}

/// Numerically stable row-wise softmax.
inline Matrix softmax_rows(const Matrix& s) {
    Matrix out = s.colwise() - s.rowwise().maxCoeff();
    out = out.array().exp();
    ColVector sums = out.rowwise().sum();
    return out.array().colwise() / sums.array();
}

inline Matrix softmax_rows_backward(const Matrix& probs, const Matrix& dprobs) {
    ColVector dot = probs.cwiseProduct(dprobs).rowwise().sum();
    return probs.cwiseProduct(Matrix(dprobs.colwise() - dot));
}

/// Inverted-dropout mask (entries 0 or 1/(1-p)); empty when dropout is inactive.
inline Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, const Mode& mode) {
    if (!mode.training || mode.dropout <= 0.0) return {};
    std::bernoulli_distribution keep(1.0 - mode.dropout);
    const double scale = 1.0 / (1.0 - mode.dropout);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(*mode.rng) ? scale : 0.0;
    return m;
}

inline Matrix apply_mask(const Matrix& x, const Matrix& mask) {
    return mask.size() == 0 ? x : Matrix(x.cwiseProduct(mask));
}

inline Matrix random_normal(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

/// Glorot/Xavier uniform initialization.
inline Matrix glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix m(fan_in, fan_out);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

} // namespace trait_tuner::nn
