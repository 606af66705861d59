#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include <trait_tuner/corpus.hpp>
#include <trait_tuner/io.hpp>
#include <trait_tuner/synthetic.hpp>

#include "support/temp_dir.hpp"

using namespace trait_tuner;
using test_support::TempDir;

namespace {

TraitVector tv(double a, double o, double c, double e, double n) { return TraitVector{{a, o, c, e, n}}; }

LabeledText rec(std::string id, TraitVector t, std::string text = "some text") {
    return {std::move(id), "u", std::move(text), t};
}

std::string words(std::size_t n, const std::string& w = "w") {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + w + std::to_string(i);
    return s;
}

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

std::string line_of(const char* id) {
    return std::string(R"({"id":")") + id +
           R"(","user_id":"u","text":"hi","traits":{"agreeableness":0.1,"openness":0.2,"conscientiousness":0.3,"extraversion":0.4,"neuroticism":0.5}})";
}

} // namespace

TEST(Traits, CanonicalOrder) {
    EXPECT_EQ(trait_count, 5u);
    EXPECT_EQ(name_of(all_traits[0]), "agreeableness");
    EXPECT_EQ(name_of(all_traits[1]), "openness");
    EXPECT_EQ(name_of(all_traits[2]), "conscientiousness");
    EXPECT_EQ(name_of(all_traits[3]), "extraversion");
    EXPECT_EQ(name_of(all_traits[4]), "neuroticism");
    EXPECT_EQ(trait_from_code("OPN"), TraitName::openness);
}

TEST(LoadCorpus, SplitSizes) {
    TempDir dir;
    write_file(dir / "train.jsonl", line_of("a") + "\n" + line_of("b") + "\n\n");
    write_file(dir / "eval.jsonl", line_of("c") + "\n");
    write_file(dir / "test.jsonl", line_of("d") + "\n");
    const auto c = load_corpus(dir.path(), true);
    EXPECT_EQ(c.train.size(), 2u);
    EXPECT_EQ(c.eval.size(), 1u);
    EXPECT_EQ(c.test.size(), 1u);
    EXPECT_DOUBLE_EQ(c.train[1].traits[TraitName::extraversion], 0.4);
}

TEST(LoadCorpus, MissingFieldReportsLine) {
    TempDir dir;
    write_file(dir / "train.jsonl", line_of("a") + "\n" +
                                        R"({"id":"b","user_id":"u","text":"x","traits":{"agreeableness":0.1,"openness":0.2,"conscientiousness":0.3,"extraversion":0.4}})" "\n");
    write_file(dir / "eval.jsonl", line_of("c") + "\n");
    write_file(dir / "test.jsonl", line_of("d") + "\n");
    try {
        load_corpus(dir.path(), true);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("neuroticism"), std::string::npos);
    }
}

TEST(LoadCorpus, MissingSplitIsNamed) {
    TempDir dir;
    write_file(dir / "train.jsonl", line_of("a") + "\n");
    write_file(dir / "test.jsonl", line_of("d") + "\n");
    try {
        load_corpus(dir.path(), true);
        FAIL() << "expected a load error";
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find("eval"), std::string::npos);
    }
    EXPECT_THROW(load_corpus(dir / "nope", true), LoadError);
}

TEST(LoadCorpus, ValidationErrors) {
    TempDir dir;
    write_file(dir / "train.jsonl", line_of("a") + "\n");
    write_file(dir / "eval.jsonl", line_of("a") + "\n");
    write_file(dir / "test.jsonl", line_of("d") + "\n");
    EXPECT_THROW(load_corpus(dir.path(), true), ValidationError);

    Corpus c{{rec("a", tv(0.1, 0.2, 1.5, 0.4, 0.5))}, {rec("b", tv(0, 0, 0, 0, 0))}, {rec("c", tv(0, 0, 0, 0, 0))}};
    EXPECT_THROW(validate_corpus(c, true), ValidationError);
    EXPECT_NO_THROW(validate_corpus(c, false));
    c.test.clear();
    EXPECT_THROW(validate_corpus(c, false), ValidationError);
}

TEST(LoadCorpus, WriteLoadRoundTrip) {
    TempDir dir;
    const auto c = make_synthetic_corpus(3, {10, 4, 4});
    write_corpus(dir.path(), c);
    const auto back = load_corpus(dir.path(), true);
    EXPECT_EQ(back.train, c.train);
    EXPECT_EQ(back.eval, c.eval);
    EXPECT_EQ(back.test, c.test);
}

TEST(Normalize, MinMaxEndpoints) {
    Corpus c{{rec("a", tv(10, 1, 1, 1, 1)), rec("b", tv(20, 2, 2, 2, 2)), rec("c", tv(30, 3, 3, 3, 3))},
             {rec("d", tv(20, 2, 2, 2, 2))},
             {rec("e", tv(35, 0, 2, 2, 2))}};
    const auto n = normalize_labels(c);
    const auto a = TraitName::agreeableness;
    EXPECT_DOUBLE_EQ(n.stats.ranges[0].min, 10);
    EXPECT_DOUBLE_EQ(n.stats.ranges[0].max, 30);
    EXPECT_DOUBLE_EQ(n.corpus.train[0].traits[a], 0.0);
    EXPECT_DOUBLE_EQ(n.corpus.train[1].traits[a], 0.5);
    EXPECT_DOUBLE_EQ(n.corpus.train[2].traits[a], 1.0);
    EXPECT_DOUBLE_EQ(n.corpus.test[0].traits[a], 1.0);  // 1.25 clipped
    EXPECT_DOUBLE_EQ(n.corpus.test[0].traits[TraitName::openness], 0.0);  // -0.5 clipped
}

TEST(Normalize, DegenerateTraitIsNamed) {
    Corpus c{{rec("a", tv(1, 1, 1, 1, 5)), rec("b", tv(2, 2, 2, 2, 5))}, {rec("d", tv(1, 1, 1, 1, 1))},
             {rec("e", tv(1, 1, 1, 1, 1))}};
    try {
        normalize_labels(c);
        FAIL() << "expected degenerate label error";
    } catch (const DegenerateLabelError& e) {
        EXPECT_NE(std::string(e.what()).find("neuroticism"), std::string::npos);
    }
}

TEST(Normalize, Denormalize) {
    NormalizationStats s;
    for (auto& r : s.ranges) r = {10, 30};
    EXPECT_DOUBLE_EQ(denormalize(tv(0.5, 0, 1, 0.5, 0.5), s)[0], 20);
    EXPECT_DOUBLE_EQ(denormalize(tv(0.5, 0, 1, 0.5, 0.5), s)[1], 10);
    EXPECT_DOUBLE_EQ(denormalize(tv(0.5, 0, 1, 0.5, 0.5), s)[2], 30);
}

TEST(Normalize, RoundTripAndUnitRangeProperty) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-50.0, 120.0);
    for (int trial = 0; trial < 20; ++trial) {
        Corpus c;
        for (int i = 0; i < 25; ++i) {
            TraitVector v;
            for (auto& s : v.scores) s = u(rng);
            c.train.push_back(rec("t" + std::to_string(i), v));
        }
        c.eval.push_back(rec("e", c.train[0].traits));
        c.test.push_back(rec("s", c.train[1].traits));
        const auto n = normalize_labels(c);
        for (std::size_t t = 0; t < trait_count; ++t) {
            double lo = 1, hi = 0;
            for (const auto& r : n.corpus.train) lo = std::min(lo, r.traits[t]), hi = std::max(hi, r.traits[t]);
            EXPECT_EQ(lo, 0.0);
            EXPECT_EQ(hi, 1.0);
        }
        for (std::size_t i = 0; i < c.train.size(); ++i) {
            const auto back = denormalize(n.corpus.train[i].traits, n.stats);
            for (std::size_t t = 0; t < trait_count; ++t) EXPECT_NEAR(back[t], c.train[i].traits[t], 1e-9);
        }
    }
}

TEST(Normalize, StatsPersist) {
    TempDir dir;
    NormalizationStats s;
    for (std::size_t t = 0; t < trait_count; ++t) s.ranges[t] = {double(t), double(t) + 2.5};
    save_stats(dir / "normalization.json", s);
    const auto back = load_stats(dir / "normalization.json");
    for (std::size_t t = 0; t < trait_count; ++t) {
        EXPECT_EQ(back.ranges[t].min, s.ranges[t].min);
        EXPECT_EQ(back.ranges[t].max, s.ranges[t].max);
    }
    const auto j = io::read_json(dir / "normalization.json");
    EXPECT_EQ(j["openness"]["min"], 1.0);
}

TEST(Chunking, TwoLongCommentsDoNotShare) {
    const std::vector<UserComments> users{{"u1", {words(60, "a"), words(60, "b")}, tv(1, 2, 3, 4, 5)}};
    const auto r = chunk_user_comments(users, 100);
    ASSERT_EQ(r.chunks.size(), 2u);
    EXPECT_EQ(r.chunks[0].text, words(60, "a"));
    EXPECT_EQ(r.chunks[1].text, words(60, "b"));
    EXPECT_EQ(r.chunks[0].id, "u1#0");
    EXPECT_EQ(r.chunks[1].id, "u1#1");
    EXPECT_EQ(r.chunks[1].traits, users[0].traits);
}

TEST(Chunking, SingleShortComment) {
    const std::vector<UserComments> users{{"u", {words(10)}, tv(1, 1, 1, 1, 1)}};
    const auto r = chunk_user_comments(users, 32);
    ASSERT_EQ(r.chunks.size(), 1u);
    EXPECT_EQ(r.chunks[0].text, words(10));
}

TEST(Chunking, GreedyPackingNineChunks) {
    std::vector<UserComments> users;
    for (int u = 0; u < 3; ++u) {
        UserComments uc{"user" + std::to_string(u), {}, tv(u, u, u, u, u)};
        for (int c = 0; c < 5; ++c) uc.comments.push_back(words(30, "u" + std::to_string(u) + "c" + std::to_string(c) + "_"));
        users.push_back(uc);
    }
    const auto r = chunk_user_comments(users, 64);
    ASSERT_EQ(r.chunks.size(), 9u);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(r.chunks[i].user_id, users[i / 3].user_id);
    EXPECT_EQ(whitespace_tokens(r.chunks[0].text).size(), 60u);
    EXPECT_EQ(whitespace_tokens(r.chunks[2].text).size(), 30u);
}

TEST(Chunking, EmptyUsersAreSkippedAndCounted) {
    const std::vector<UserComments> users{{"a", {}, tv(0, 0, 0, 0, 0)},
                                          {"b", {"   "}, tv(0, 0, 0, 0, 0)},
                                          {"c", {"hello there"}, tv(0, 0, 0, 0, 0)}};
    const auto r = chunk_user_comments(users, 16);
    EXPECT_EQ(r.skipped_users, 2u);
    ASSERT_EQ(r.chunks.size(), 1u);
    EXPECT_THROW(chunk_user_comments(users, 15), ArgumentError);
}

TEST(Chunking, PreservesCommentStreamProperty) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> ncomments(1, 8), ntokens(1, 90), budget(16, 70);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<UserComments> users;
        for (int u = 0; u < 3; ++u) {
            UserComments uc{"u" + std::to_string(u), {}, tv(u, 0, 0, 0, 0)};
            const int n = ncomments(rng);
            for (int c = 0; c < n; ++c) uc.comments.push_back(words(ntokens(rng), "x" + std::to_string(c) + "_"));
            users.push_back(uc);
        }
        const std::size_t max_tokens = budget(rng);
        const auto r = chunk_user_comments(users, max_tokens);
        for (const auto& u : users) {
            std::string joined, expected;
            for (const auto& ch : r.chunks) {
                if (ch.user_id != u.user_id) continue;
                EXPECT_LE(whitespace_tokens(ch.text).size(), max_tokens);
                EXPECT_EQ(ch.traits, u.traits);
                joined += (joined.empty() ? "" : " ") + ch.text;
            }
            for (const auto& c : u.comments) expected += (expected.empty() ? "" : " ") + c;
            EXPECT_EQ(joined, expected);
        }
    }
}

TEST(Synthetic, SizesAndDeterminism) {
    const auto a = make_synthetic_corpus(7, {64, 16, 16});
    const auto b = make_synthetic_corpus(7, {64, 16, 16});
    const auto c = make_synthetic_corpus(8, {64, 16, 16});
    EXPECT_EQ(a.size(), 96u);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.eval, b.eval);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.train[0].text, c.train[0].text);
    EXPECT_NO_THROW(validate_corpus(a, true));
    EXPECT_THROW(make_synthetic_corpus(7, {0, 1, 1}), ArgumentError);
}

TEST(Synthetic, LabelsAreKeywordFractions) {
    std::string text;
    for (auto w : synthetic_vocab::keywords[index_of(TraitName::extraversion)]) text += std::string(w) + " ";
    text += std::string(synthetic_vocab::filler[0]);
    const auto v = synthetic_labels(text);
    EXPECT_DOUBLE_EQ(v[TraitName::extraversion], 1.0);
    for (TraitName t : all_traits)
        if (t != TraitName::extraversion) EXPECT_DOUBLE_EQ(v[t], 0.0);
    for (const auto& r : make_synthetic_corpus(1, {20, 1, 1}).train) EXPECT_EQ(r.traits, synthetic_labels(r.text));
}
