#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "hashing.hpp"
#include "io.hpp"
#include "metrics.hpp"

namespace trait_tuner {

namespace fs = std::filesystem;

enum class RunStatus { running, complete, failed };

inline std::string_view run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::running: return "running";
    case RunStatus::complete: return "complete";
    case RunStatus::failed: return "failed";
    }
    return "?";
}

inline RunStatus run_status_from_name(std::string_view s) {
    if (s == "running") return RunStatus::running;
    if (s == "complete") return RunStatus::complete;
    if (s == "failed") return RunStatus::failed;
    throw ParseError("unknown run status '" + std::string(s) + "'");
}

struct RunManifest {
    std::string id;
    std::string kind = "train";  ///< "train" or "search"
    std::string strategy;
    nlohmann::json plan;
    std::vector<std::uint64_t> seeds;
    std::string corpus_fingerprint;
    nlohmann::json artifacts = nlohmann::json::object();
    RunStatus status = RunStatus::running;
    std::string error;
};

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j = {{"id", m.id},
                        {"kind", m.kind},
                        {"strategy", m.strategy},
                        {"plan", m.plan},
                        {"seeds", m.seeds},
                        {"corpus_fingerprint", m.corpus_fingerprint},
                        {"artifacts", m.artifacts},
                        {"status", run_status_name(m.status)}};
    if (!m.error.empty()) j["error"] = m.error;
    return j;
}

inline RunManifest run_manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.id = j.at("id").get<std::string>();
        m.kind = j.value("kind", std::string("train"));
        m.strategy = j.value("strategy", std::string());
        m.plan = j.value("plan", nlohmann::json::object());
        m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        m.corpus_fingerprint = j.value("corpus_fingerprint", std::string());
        m.artifacts = j.value("artifacts", nlohmann::json::object());
        m.status = run_status_from_name(j.at("status").get<std::string>());
        m.error = j.value("error", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("run manifest: ") + e.what());
    }
    return m;
}

/// Content hash of the three split files (names and bytes).
inline std::string corpus_fingerprint(const fs::path& data_dir) {
    std::uint64_t h = fnv1a_offset;
    for (Split s : all_splits) {
        const auto path = split_path(data_dir, s);
        h = fnv1a(path.filename().string(), h);
        h = fnv1a(io::read_text(path), h);
    }
    return to_hex(h);
}

/// Runs root: explicit value, else $TRAIT_TUNER_RUNS, else ./runs.
inline fs::path runs_root(const std::string& explicit_root = {}) {
    if (!explicit_root.empty()) return explicit_root;
    if (const char* env = std::getenv("TRAIT_TUNER_RUNS"); env != nullptr && *env != '\0') return env;
    return "runs";
}

/// Creates a fresh run directory named "<UTC timestamp>-<8 hex>". The
/// directory is claimed with a single create_directory call, so concurrent
/// callers never share (or overwrite) a run.
inline fs::path create_run_directory(const fs::path& root, const std::string& salt, std::string* id_out) {
    fs::create_directories(root);
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&tt, &tm);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", &tm);
        const auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(now.time_since_epoch()).count();
        std::uint64_t h = fnv1a(salt);
        h = derive_seed(h, static_cast<std::uint64_t>(nanos) ^ (attempt << 48));
        const std::string id = std::string(stamp) + "-" + to_hex(h).substr(0, 8);
        const fs::path dir = root / id;
        std::error_code ec;
        if (fs::create_directory(dir, ec)) {
            if (id_out != nullptr) *id_out = id;
            return dir;
        }
        if (ec) throw LoadError("cannot create run directory under " + root.string() + ": " + ec.message());
    }
    throw LoadError("could not allocate a unique run directory under " + root.string());
}

inline void write_manifest(const fs::path& run_dir, const RunManifest& m) {
    io::write_json(run_dir / "manifest.json", to_json(m));
}

struct RunRecord {
    fs::path dir;
    RunManifest manifest;
    std::optional<EvaluationReport> metrics;
};

/// All run directories under `root` whose manifest parses. Complete runs
/// with a metrics.json carry their report.
inline std::vector<RunRecord> list_runs(const fs::path& root) {
    std::vector<RunRecord> runs;
    if (!fs::is_directory(root)) return runs;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        RunRecord r{dir, run_manifest_from_json(io::read_json(dir / "manifest.json")), std::nullopt};
        if (r.manifest.status == RunStatus::complete && fs::exists(dir / "metrics.json"))
            r.metrics = report_from_json(io::read_json(dir / "metrics.json"));
        runs.push_back(std::move(r));
    }
    return runs;
}

struct RenderedReport {
    std::string text;
    std::string csv;
    std::size_t runs = 0;
};

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

} // namespace detail

/// One overall row per complete run (sorted by MSE ascending) followed by a
/// per-trait table per run, rendered both as an aligned text table and as
/// comma-separated rows. Both forms print identical cell strings.
inline RenderedReport render_report(const fs::path& root, int digits = 2) {
    std::vector<RunRecord> runs;
    for (auto& r : list_runs(root))
        if (r.metrics) runs.push_back(std::move(r));
    if (runs.empty()) throw LoadError("no complete runs under " + root.string());
    std::stable_sort(runs.begin(), runs.end(),
                     [](const RunRecord& a, const RunRecord& b) { return a.metrics->overall.mse < b.metrics->overall.mse; });

    const std::array<std::string, 5> headers{"MSE", "MAE", "R2", "Accuracy", "F1"};
    std::size_t id_width = 4;
    for (const auto& r : runs) id_width = std::max(id_width, r.manifest.id.size() + 2);

    std::ostringstream text, csv;
    csv << "table,run,strategy,trait,mse,mae,r2,accuracy,f1\n";
    text << "Overall performance\n" << detail::pad("Run", id_width) << detail::pad("Strategy", 10);
    for (const auto& h : headers) text << detail::pad(h, 10);
    text << "\n";
    for (const auto& r : runs) {
        const auto cells = metric_cells(r.metrics->overall, digits);
        text << detail::pad(r.manifest.id, id_width) << detail::pad(r.manifest.strategy, 10);
        csv << "overall," << r.manifest.id << "," << r.manifest.strategy << ",overall";
        for (const auto& c : cells) {
            text << detail::pad(c, 10);
            csv << "," << c;
        }
        text << "\n";
        csv << "\n";
    }
    for (const auto& r : runs) {
        text << "\nPer-trait performance: " << r.manifest.id << " (" << r.manifest.strategy << ")\n"
             << detail::pad("Trait", 20);
        for (const auto& h : headers) text << detail::pad(h, 10);
        text << "\n";
        for (TraitName t : all_traits) {
            const auto cells = metric_cells((*r.metrics)[t], digits);
            text << detail::pad(std::string(name_of(t)), 20);
            csv << "trait," << r.manifest.id << "," << r.manifest.strategy << "," << name_of(t);
            for (const auto& c : cells) {
                text << detail::pad(c, 10);
                csv << "," << c;
            }
            text << "\n";
            csv << "\n";
        }
    }
    return {text.str(), csv.str(), runs.size()};
}

} // namespace trait_tuner
