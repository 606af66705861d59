#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include <trait_tuner/cli.hpp>

#include "support/temp_dir.hpp"

using namespace trait_tuner;
using test_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<fs::path> run_dirs(const fs::path& root) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Lines of a rendered table whose first cell is `label`, split on whitespace.
std::vector<std::string> row_cells(const std::string& table, const std::string& label) {
    std::istringstream in(table);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> cells;
        for (std::string c; ls >> c;) cells.push_back(c);
        if (!cells.empty() && cells[0] == label) return cells;
    }
    return {};
}

class CliPipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("tt-cli");
        const auto data = (*dir_ / "data").string();
        ASSERT_EQ(run({"prepare", "--synthetic", "--seed", "3", "--sizes", "48,16,16", "--out", data}).code, 0);
        train_ = new Result(run({"train", "--strategy", "S3", "--encoder", "tiny-test", "--max-seq-len", "64",
                                 "--data", data, "--out", (*dir_ / "runs").string(), "--seed", "1", "--budget", "2",
                                 "--hidden", "32", "--quiet"}));
    }
    static void TearDownTestSuite() {
        delete train_;
        delete dir_;
    }
    static fs::path data() { return *dir_ / "data"; }
    static fs::path runs() { return *dir_ / "runs"; }

    static TempDir* dir_;
    static Result* train_;
};

TempDir* CliPipeline::dir_ = nullptr;
Result* CliPipeline::train_ = nullptr;

} // namespace

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"train", "--data", "d"}).code, 2);
    const auto r = run({"train", "--strategy", "S9", "--data", "d", "--out", "r"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("S9"), std::string::npos);
    EXPECT_EQ(run({"train", "--strategy", "S1", "--data", "d", "--mixed-precision", "maybe"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MissingDataDirectoryExitsOne) {
    TempDir dir;
    const auto missing = (dir / "no-such-data").string();
    const auto r = run({"train", "--strategy", "S1", "--encoder", "tiny-test", "--data", missing, "--out",
                        (dir / "runs").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST(Cli, BadConfigFileExitsTwo) {
    TempDir dir;
    std::ofstream(dir / "cfg.json") << "{ not json";
    EXPECT_EQ(run({"train", "--strategy", "S1", "--data", "d", "--config", (dir / "cfg.json").string()}).code, 2);
}

TEST(Cli, ConfigPrecedence) {
    TempDir dir;
    std::ofstream(dir / "cfg.json") << R"({"config": {"learning_rate": 0.0003, "epochs": 7}, "search": {"budget": 4}})";
    cli::PlanOverrides o;
    o.epochs = 2;
    const auto p = cli::resolve_plan("S3", (dir / "cfg.json").string(), o);
    EXPECT_EQ(p.config.learning_rate, 3e-4);  // file over defaults
    EXPECT_EQ(p.config.epochs, 2u);           // flag over file
    EXPECT_EQ(p.search_budget, 4u);
    EXPECT_TRUE(p.config.mixed_precision);     // strategy default kept
    cli::PlanOverrides off;
    off.search = "off";
    EXPECT_FALSE(cli::resolve_plan("S3", "", off).search_enabled);
}

TEST(Cli, PredictionLineFormat) {
    const TraitVector v{{0.23, 0.47, 0.39, 0.31, 0.78}};
    EXPECT_EQ(cli::format_prediction(v),
              "agreeableness: 0.23; openness: 0.47; conscientiousness: 0.39; extraversion: 0.31; neuroticism: 0.78");
}

TEST(Cli, PrepareChunksAndNormalizesRawUsers) {
    TempDir dir;
    const auto in = dir / "raw";
    fs::create_directories(in);
    auto user = [](const std::string& id, double base, int comments) {
        nlohmann::json j{{"user_id", id}, {"comments", nlohmann::json::array()}};
        for (int c = 0; c < comments; ++c) j["comments"].push_back("comment number " + std::to_string(c) + " from " + id);
        j["traits"] = {{"agreeableness", base}, {"openness", base + 10}, {"conscientiousness", base * 2},
                       {"extraversion", 100 - base}, {"neuroticism", base / 2}};
        return j.dump() + "\n";
    };
    std::ofstream(in / "train.jsonl") << user("a", 20, 3) << user("b", 60, 2) << user("c", 40, 0);
    std::ofstream(in / "eval.jsonl") << user("d", 80, 1);
    std::ofstream(in / "test.jsonl") << user("e", 10, 1);
    const auto r = run({"prepare", "--input", in.string(), "--out", (dir / "out").string(), "--max-tokens", "16"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("skipped 1"), std::string::npos);
    const auto corpus = load_corpus(dir / "out", true);
    EXPECT_EQ(corpus.train.front().id, "a#0");
    const auto stats = load_stats(dir / "out" / "normalization.json");
    EXPECT_EQ(stats.ranges[0].min, 20);
    EXPECT_EQ(stats.ranges[0].max, 60);
    EXPECT_EQ(corpus.test.front().traits[TraitName::agreeableness], 0.0);  // clipped
    EXPECT_EQ(corpus.eval.front().traits[TraitName::agreeableness], 1.0);  // clipped
}

TEST_F(CliPipeline, TrainLeavesCompleteRun) {
    ASSERT_EQ(train_->code, 0) << train_->err;
    const auto dirs = run_dirs(runs());
    ASSERT_EQ(dirs.size(), 1u);
    for (const char* f : {"manifest.json", "plan.json", "history.json", "trials.json", "metrics.json", "bundle/manifest.json"})
        EXPECT_TRUE(fs::exists(dirs[0] / f)) << f;
    const auto manifest = io::read_json(dirs[0] / "manifest.json");
    EXPECT_EQ(manifest["status"], "complete");
    EXPECT_EQ(manifest["strategy"], "S3");
    EXPECT_EQ(manifest["id"], dirs[0].filename().string());
    EXPECT_TRUE(std::regex_match(manifest["id"].get<std::string>(), std::regex(R"(\d{8}T\d{6}-[0-9a-f]{8})")));
    EXPECT_EQ(manifest["corpus_fingerprint"], corpus_fingerprint(data()));
    EXPECT_EQ(io::read_json(dirs[0] / "trials.json")["trials"].size(), 2u);
}

TEST_F(CliPipeline, EvaluateMatchesReportAndIsReproducible) {
    ASSERT_EQ(train_->code, 0);
    const auto dir = run_dirs(runs()).front();
    const auto bundle = (dir / "bundle").string();
    TempDir out;
    const auto a = run({"evaluate", "--bundle", bundle, "--data", data().string(), "--out", (out / "a.json").string()});
    const auto b = run({"evaluate", "--bundle", bundle, "--data", data().string(), "--out", (out / "b.json").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(out / "a.json"), slurp(out / "b.json"));
    EXPECT_EQ(slurp(out / "a.json"), slurp(dir / "metrics.json"));

    const auto rep = run({"report", "--runs", runs().string(), "--format", "both"});
    ASSERT_EQ(rep.code, 0) << rep.err;
    const auto eval_row = row_cells(a.out, "overall");
    const auto report_row = row_cells(rep.out, dir.filename().string());
    ASSERT_EQ(eval_row.size(), 6u);
    ASSERT_EQ(report_row.size(), 7u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(eval_row[i + 1], report_row[i + 2]);
    const std::string csv_row = "overall," + dir.filename().string() + ",S3,overall," + eval_row[1] + "," + eval_row[2] +
                                "," + eval_row[3] + "," + eval_row[4] + "," + eval_row[5];
    EXPECT_NE(rep.out.find(csv_row), std::string::npos);
}

TEST_F(CliPipeline, PredictEmitsOneLinePerText) {
    ASSERT_EQ(train_->code, 0);
    const auto bundle = (run_dirs(runs()).front() / "bundle").string();
    TempDir dir;
    std::ofstream(dir / "in.txt") << "i love parties\n\nquiet careful planner\n";
    const auto r = run({"predict", "--bundle", bundle, "--input", (dir / "in.txt").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::regex line(R"(agreeableness: [01]\.\d\d; openness: [01]\.\d\d; conscientiousness: [01]\.\d\d; )"
                          R"(extraversion: [01]\.\d\d; neuroticism: [01]\.\d\d)");
    std::istringstream in(r.out);
    std::size_t n = 0;
    for (std::string l; std::getline(in, l); ++n) EXPECT_TRUE(std::regex_match(l, line)) << l;
    EXPECT_EQ(n, 2u);
    EXPECT_EQ(run({"predict", "--bundle", (dir / "nope").string(), "--input", (dir / "in.txt").string()}).code, 1);
}

TEST_F(CliPipeline, EachTrainGetsANewRunDirectory) {
    ASSERT_EQ(train_->code, 0);
    TempDir root;
    for (int i = 0; i < 2; ++i)
        ASSERT_EQ(run({"train", "--strategy", "S1", "--encoder", "tiny-test", "--max-seq-len", "32", "--data",
                       data().string(), "--out", root.path().string(), "--epochs", "1", "--quiet"})
                      .code,
                  0);
    EXPECT_EQ(run_dirs(root.path()).size(), 2u);
}

TEST_F(CliPipeline, SearchCommandWritesTrials) {
    ASSERT_EQ(train_->code, 0);
    TempDir root;
    const auto r = run({"search", "--strategy", "S2", "--encoder", "tiny-test", "--max-seq-len", "32", "--data",
                        data().string(), "--out", root.path().string(), "--budget", "2", "--hidden", "16"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto dirs = run_dirs(root.path());
    ASSERT_EQ(dirs.size(), 1u);
    EXPECT_EQ(io::read_json(dirs[0] / "trials.json")["trials"].size(), 2u);
    // A search run has no metrics, so it is not reportable.
    EXPECT_EQ(run({"report", "--runs", root.path().string()}).code, 1);
}

TEST(CliReport, FixtureRowsAndOrdering) {
    const auto r = run({"report", "--runs", TRAIT_TUNER_FIXTURES "/runs", "--format", "both"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m3 = row_cells(r.out, "20240101T000000-0000m3m3");
    ASSERT_EQ(m3.size(), 7u);
    EXPECT_EQ(std::vector<std::string>(m3.begin() + 2, m3.end()),
              (std::vector<std::string>{"0.07", "0.16", "0.59", "0.80", "0.78"}));
    EXPECT_LT(r.out.find("0000m3m3"), r.out.find("0000m1m1"));
    EXPECT_EQ(r.out.find("failed00"), std::string::npos);
    EXPECT_NE(r.out.find("overall,20240101T000000-0000m3m3,S3,overall,0.07,0.16,0.59,0.80,0.78"), std::string::npos);
    EXPECT_NE(r.out.find("trait,20240101T000000-0000m3m3,S3,openness,0.03,0.12,0.66,0.84,0.82"), std::string::npos);
}

TEST(CliReport, TextAndCsvCarryIdenticalCells) {
    const auto rendered = render_report(TRAIT_TUNER_FIXTURES "/runs", 3);
    std::istringstream csv(rendered.csv);
    std::string line;
    std::getline(csv, line);
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
        ASSERT_EQ(f.size(), 9u);
        std::string joined;
        for (std::size_t i = 4; i < 9; ++i) joined += f[i] + (i < 8 ? " " : "");
        std::string spaced = rendered.text;
        // Collapse runs of spaces so the aligned table can be searched.
        spaced = std::regex_replace(spaced, std::regex(" +"), " ");
        EXPECT_NE(spaced.find(joined), std::string::npos) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 12u);
    EXPECT_EQ(rendered.runs, 2u);
}

TEST(CliReport, NoCompleteRunsExitsOne) {
    TempDir dir;
    EXPECT_EQ(run({"report", "--runs", dir.path().string()}).code, 1);
}

TEST(CliCompare, ReproducesOpennessDelta) {
    const auto r = run({"compare", "--metrics", TRAIT_TUNER_FIXTURES "/m3_metrics.json", "--baseline",
                        TRAIT_TUNER_FIXTURES "/essays_baselines.csv", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("openness,IDGWOFS,84.00,77.74,+6.26,win,82.00,69.80,+12.20,win"), std::string::npos) << r.out;
    const auto text = run({"compare", "--metrics", TRAIT_TUNER_FIXTURES "/m3_metrics.json", "--baseline",
                           TRAIT_TUNER_FIXTURES "/essays_baselines.csv"});
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("+6.26"), std::string::npos);
}
