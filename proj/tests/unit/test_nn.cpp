#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include <trait_tuner/nn/encoder.hpp>
#include <trait_tuner/nn/head.hpp>
#include <trait_tuner/nn/ops.hpp>
#include <trait_tuner/nn/tensor_io.hpp>
#include <trait_tuner/nn/tokenizer.hpp>
#include <trait_tuner/optim.hpp>

#include "support/temp_dir.hpp"

using namespace trait_tuner;
using nn::Matrix;

namespace {

// Scalar objective sum(out .* weights) and its finite-difference gradient.
template <class F>
Matrix numeric_grad(Matrix x, const Matrix& w, F&& f, double h = 1e-6) {
    Matrix g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double orig = x.data()[i];
        x.data()[i] = orig + h;
        const double up = f(x).cwiseProduct(w).sum();
        x.data()[i] = orig - h;
        const double down = f(x).cwiseProduct(w).sum();
        x.data()[i] = orig;
        g.data()[i] = (up - down) / (2 * h);
    }
    return g;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

} // namespace

TEST(Ops, LayerNormBackward) {
    std::mt19937_64 rng(1);
    const Matrix x = random_matrix(rng, 3, 6), w = random_matrix(rng, 3, 6);
    nn::Param gamma("g", random_matrix(rng, 1, 6), true);
    nn::Param beta("b", random_matrix(rng, 1, 6), true);
    nn::LayerNormCache cache;
    nn::layer_norm(x, gamma, beta, 1e-5, &cache);
    const Matrix dx = nn::layer_norm_backward(cache, w, gamma, beta);
    const Matrix expect = numeric_grad(x, w, [&](const Matrix& v) { return nn::layer_norm(v, gamma, beta, 1e-5, nullptr); });
    EXPECT_LT((dx - expect).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ops, SoftmaxAndGeluBackward) {
    std::mt19937_64 rng(2);
    const Matrix x = random_matrix(rng, 4, 5), w = random_matrix(rng, 4, 5);
    const Matrix y = nn::softmax_rows(x);
    for (Eigen::Index r = 0; r < y.rows(); ++r) EXPECT_NEAR(y.row(r).sum(), 1.0, 1e-12);
    const Matrix ds = nn::softmax_rows_backward(y, w);
    EXPECT_LT((ds - numeric_grad(x, w, [](const Matrix& v) { return nn::softmax_rows(v); })).cwiseAbs().maxCoeff(), 1e-6);
    const Matrix dg = nn::gelu_backward(x, w);
    EXPECT_LT((dg - numeric_grad(x, w, [](const Matrix& v) { return nn::gelu(v); })).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Tokenizer, HashedIsDeterministicAndTruncates) {
    const auto t = nn::Tokenizer::hashed(4096);
    const auto a = t.encode("Hello hello WORLD", 16);
    EXPECT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0], a[1]);
    for (int id : a) {
        EXPECT_GE(id, 1);
        EXPECT_LT(id, 4096);
    }
    EXPECT_EQ(t.encode("a b c d e f", 4).size(), 4u);
    EXPECT_EQ(t.encode("", 4).size(), 1u);
}

TEST(Tokenizer, WordPieceGreedyLongestMatch) {
    const std::vector<std::string> vocab{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "play", "##ing", "##s", "un", "##play"};
    const auto t = nn::Tokenizer::wordpiece(vocab, true);
    const auto ids = t.encode("Playing unplays xyz", 32);
    // [CLS] play ##ing un ##play ##s [UNK] [SEP]
    EXPECT_EQ(ids, (std::vector<int>{2, 4, 5, 7, 8, 6, 1, 3}));
    const auto cut = t.encode("playing playing playing", 4);
    EXPECT_EQ(cut, (std::vector<int>{2, 4, 5, 3}));
}

TEST(TensorIo, RoundTripAndErrors) {
    test_support::TempDir dir;
    std::mt19937_64 rng(3);
    nn::Param a("a", random_matrix(rng, 2, 3), true);
    nn::Param b("b.bias", random_matrix(rng, 1, 4), true);
    nn::save_tensors(dir / "w.bin", {&a, &b});
    const auto map = nn::load_tensors(dir / "w.bin");
    nn::Param a2("a", Matrix::Zero(2, 3), true);
    nn::Param b2("b.bias", Matrix::Zero(1, 4), true);
    nn::assign_tensors(map, {&a2, &b2}, "w.bin");
    EXPECT_EQ(a2.value, a.value);
    EXPECT_EQ(b2.value, b.value);
    nn::Param wrong("a", Matrix::Zero(3, 3), true);
    EXPECT_THROW(nn::assign_tensors(map, {&wrong}, "w.bin"), LoadError);
    std::ofstream(dir / "bad.bin") << "nonsense";
    EXPECT_THROW(nn::load_tensors(dir / "bad.bin"), ParseError);
    EXPECT_THROW(nn::load_tensors(dir / "missing.bin"), LoadError);
}

TEST(Encoder, OutputShapeAndDropoutOffIsDeterministic) {
    nn::EncoderConfig c;
    c.vocab_size = 64;
    std::mt19937_64 rng(4);
    nn::TransformerEncoder enc(c, rng);
    const std::vector<int> ids{1, 5, 9, 2};
    const Matrix h = enc.forward(ids, nn::inference_mode(), nullptr);
    EXPECT_EQ(h.rows(), 4);
    EXPECT_EQ(h.cols(), static_cast<Eigen::Index>(c.hidden_size));
    EXPECT_EQ(h, enc.forward(ids, nn::inference_mode(), nullptr));
}

TEST(Encoder, BackwardMatchesFiniteDifference) {
    nn::EncoderConfig c;
    c.vocab_size = 32;
    c.hidden_size = 8;
    c.num_heads = 2;
    c.intermediate_size = 12;
    c.num_layers = 1;
    c.init_std = 0.3;
    std::mt19937_64 rng(5);
    nn::TransformerEncoder enc(c, rng);
    const std::vector<int> ids{3, 7, 3, 11};
    const Matrix w = random_matrix(rng, 4, 8);
    nn::TransformerEncoder::Cache cache;
    const auto mode = nn::inference_mode();
    enc.forward(ids, mode, &cache);
    enc.for_each_param([](nn::Param& p) { p.zero_grad(); });
    enc.backward(cache, w, mode);
    std::size_t checked = 0;
    enc.for_each_param([&](nn::Param& p) {
        for (Eigen::Index i = 0; i < p.value.size(); i += std::max<Eigen::Index>(1, p.value.size() / 3)) {
            const double orig = p.value.data()[i];
            const double h = 1e-6;
            p.value.data()[i] = orig + h;
            const double up = enc.forward(ids, mode, nullptr).cwiseProduct(w).sum();
            p.value.data()[i] = orig - h;
            const double down = enc.forward(ids, mode, nullptr).cwiseProduct(w).sum();
            p.value.data()[i] = orig;
            const double numeric = (up - down) / (2 * h);
            const double analytic = p.grad.data()[i];
            EXPECT_NEAR(analytic, numeric, 1e-5 + 1e-4 * std::abs(numeric)) << p.name << "[" << i << "]";
            ++checked;
        }
    });
    EXPECT_GT(checked, 20u);
}

TEST(Head, SpecValidation) {
    EXPECT_NO_THROW(HeadSpec::linear().validate());
    EXPECT_NO_THROW(HeadSpec::mlp().validate());
    HeadSpec bad = HeadSpec::mlp();
    bad.hidden_sizes.clear();
    EXPECT_THROW(bad.validate(), ConfigError);
    const auto back = head_spec_from_json(to_json(HeadSpec::mlp()));
    EXPECT_EQ(back.kind, HeadKind::mlp);
    EXPECT_EQ(back.hidden_sizes, std::vector<std::size_t>{256});
}

TEST(Schedule, LinearWarmupDecayContract) {
    const LearningRateSchedule s(SchedulerKind::linear_warmup_decay, 1e-3, 100, 0.1);
    EXPECT_EQ(s.at(0), 0.0);
    EXPECT_DOUBLE_EQ(s.at(10), 1e-3);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_LE(s.at(i), s.at(10));
    EXPECT_NEAR(s.at(99), 0.0, 1e-3 / 90 + 1e-15);
    EXPECT_EQ(s.at(100), 0.0);
    const LearningRateSchedule cos(SchedulerKind::cosine_warmup, 1.0, 50, 0.2);
    EXPECT_EQ(cos.at(0), 0.0);
    EXPECT_DOUBLE_EQ(cos.at(10), 1.0);
    EXPECT_NEAR(cos.at(50), 0.0, 1e-12);
    const LearningRateSchedule flat(SchedulerKind::constant, 0.5, 10, 0.5);
    EXPECT_EQ(flat.at(0), 0.5);
    EXPECT_EQ(flat.at(9), 0.5);
}

TEST(Optim, AdamWSkipsDecayOnFlaggedParams) {
    nn::Param w("w", Matrix::Constant(1, 1, 1.0), true);
    nn::Param b("b", Matrix::Constant(1, 1, 1.0), false);
    AdamW opt({&w, &b}, {0.9, 0.999, 1e-8, 0.1});
    opt.step(0.5);
    EXPECT_DOUBLE_EQ(w.value(0, 0), 0.95);
    EXPECT_DOUBLE_EQ(b.value(0, 0), 1.0);
}

TEST(Optim, ClipGlobalNorm) {
    nn::Param a("a", Matrix::Zero(1, 2), true);
    nn::Param b("b", Matrix::Zero(1, 1), true);
    a.grad << 3, 0;
    b.grad << 4;
    std::vector<nn::Param*> ps{&a, &b};
    EXPECT_DOUBLE_EQ(global_grad_norm(ps), 5.0);
    clip_grad_norm(ps, 1.0);
    EXPECT_NEAR(global_grad_norm(ps), 1.0, 1e-12);
    EXPECT_NEAR(a.grad(0, 0), 0.6, 1e-12);
}

TEST(Optim, LossScalerDetectsOverflow) {
    LossScaler s;
    const double start = s.scale();
    nn::Param a("a", Matrix::Zero(1, 1), true);
    a.grad(0, 0) = std::numeric_limits<double>::infinity();
    std::vector<nn::Param*> ps{&a};
    EXPECT_FALSE(s.unscale(ps));
    EXPECT_LT(s.scale(), start);
    a.grad(0, 0) = s.scale() * 2.0;
    EXPECT_TRUE(s.unscale(ps));
    EXPECT_DOUBLE_EQ(a.grad(0, 0), 2.0);
}
