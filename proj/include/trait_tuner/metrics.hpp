#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "traits.hpp"

namespace trait_tuner {

namespace detail {

inline void check_pair(std::span<const double> preds, std::span<const double> labels, std::size_t min_len) {
    if (preds.size() != labels.size())
        throw ArgumentError("length mismatch: " + std::to_string(preds.size()) + " predictions vs " +
                            std::to_string(labels.size()) + " labels");
    if (preds.size() < min_len)
        throw ArgumentError("need at least " + std::to_string(min_len) + " values, got " + std::to_string(preds.size()));
}

} // namespace detail

inline double mse(std::span<const double> preds, std::span<const double> labels) {
    detail::check_pair(preds, labels, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double e = preds[i] - labels[i];
        sum += e * e;
    }
    return sum / static_cast<double>(preds.size());
}

inline double mae(std::span<const double> preds, std::span<const double> labels) {
    detail::check_pair(preds, labels, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - labels[i]);
    return sum / static_cast<double>(preds.size());
}

/// 1 - SS_res / SS_tot, with SS_tot taken about the label mean. Throws
/// DegenerateVarianceError when the labels are all equal.
inline double r_squared(std::span<const double> preds, std::span<const double> labels) {
    detail::check_pair(preds, labels, 2);
    // Checked directly: a rounded mean can leave a tiny nonzero SS_tot.
    if (std::all_of(labels.begin(), labels.end(), [&](double y) { return y == labels.front(); }))
        throw DegenerateVarianceError("R^2 undefined: labels have zero variance");
    double mean = 0.0;
    for (double y : labels) mean += y;
    mean /= static_cast<double>(labels.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double r = labels[i] - preds[i];
        const double d = labels[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    return 1.0 - ss_res / ss_tot;
}

// ---------------------------------------------------------------------------
// Binarization

enum class Binary : std::uint8_t { negative, positive };

struct BinarizationRule {
    std::array<double, trait_count> thresholds{0.5, 0.5, 0.5, 0.5, 0.5};

    double operator[](TraitName t) const noexcept { return thresholds[index_of(t)]; }

    void validate() const {
        for (std::size_t i = 0; i < trait_count; ++i)
            if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0))
                throw ValidationError("threshold for " + std::string(trait_names[i]) + " outside [0,1]");
    }

    friend bool operator==(const BinarizationRule&, const BinarizationRule&) = default;
};

inline nlohmann::json to_json(const BinarizationRule& rule) {
    nlohmann::json j = nlohmann::json::object();
    for (TraitName t : all_traits) j[std::string(name_of(t))] = rule[t];
    return j;
}

inline BinarizationRule rule_from_json(const nlohmann::json& j) {
    BinarizationRule rule;
    for (std::size_t i = 0; i < trait_count; ++i) {
        const std::string key(trait_names[i]);
        if (!j.contains(key)) throw ParseError("thresholds missing '" + key + "'");
        rule.thresholds[i] = j[key].get<double>();
    }
    rule.validate();
    return rule;
}

inline double median(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Per-trait median of the training labels.
inline BinarizationRule derive_thresholds(const std::array<std::vector<double>, trait_count>& labels_per_trait) {
    BinarizationRule rule;
    for (std::size_t t = 0; t < trait_count; ++t) {
        if (labels_per_trait[t].empty())
            throw ArgumentError("no training labels for " + std::string(trait_names[t]));
        rule.thresholds[t] = median(labels_per_trait[t]);
    }
    return rule;
}

inline BinarizationRule derive_thresholds(std::span<const LabeledText> train) {
    std::array<std::vector<double>, trait_count> per_trait;
    for (const auto& r : train)
        for (std::size_t t = 0; t < trait_count; ++t) per_trait[t].push_back(r.traits[t]);
    return derive_thresholds(per_trait);
}

/// value >= threshold is positive (ties go positive).
inline std::vector<Binary> binarize(std::span<const double> values, double threshold) {
    std::vector<Binary> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v >= threshold ? Binary::positive : Binary::negative);
    return out;
}

enum class F1Averaging { macro, positive };

struct AccuracyF1 {
    double accuracy = 0.0;
    double f1 = 0.0;
};

namespace detail {

/// 2TP / (2TP + FP + FN); a class absent from both sides scores 1.
inline double class_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

} // namespace detail

/// Accuracy and F1 (macro over the two classes by default).
inline AccuracyF1 accuracy_f1(std::span<const Binary> preds, std::span<const Binary> labels,
                              F1Averaging averaging = F1Averaging::macro) {
    if (preds.size() != labels.size()) throw ArgumentError("accuracy_f1: length mismatch");
    if (preds.empty()) throw ArgumentError("accuracy_f1: empty input");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool p = preds[i] == Binary::positive;
        const bool l = labels[i] == Binary::positive;
        tp += p && l;
        fp += p && !l;
        fn += !p && l;
        tn += !p && !l;
    }
    AccuracyF1 r;
    r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(preds.size());
    const double f1_pos = detail::class_f1(tp, fp, fn);
    const double f1_neg = detail::class_f1(tn, fn, fp);
    r.f1 = averaging == F1Averaging::macro ? 0.5 * (f1_pos + f1_neg) : f1_pos;
    return r;
}

// ---------------------------------------------------------------------------
// Reports

struct TraitMetrics {
    double mse = 0.0;
    double mae = 0.0;
    std::optional<double> r2;  ///< empty when labels had zero variance
    double accuracy = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    std::array<TraitMetrics, trait_count> traits{};
    TraitMetrics overall;
    std::size_t n = 0;
    BinarizationRule rule;
    bool r2_partial = false;  ///< overall r2 averages fewer than five traits

    const TraitMetrics& operator[](TraitName t) const noexcept { return traits[index_of(t)]; }
};

/// All five metrics per trait plus the unweighted mean across traits.
inline EvaluationReport evaluate(std::span<const TraitVector> preds, std::span<const TraitVector> labels,
                                 const BinarizationRule& rule, F1Averaging averaging = F1Averaging::macro) {
    if (preds.size() != labels.size()) throw ArgumentError("evaluate: length mismatch");
    if (preds.empty()) throw ArgumentError("evaluate: empty input");
    rule.validate();
    EvaluationReport report;
    report.n = preds.size();
    report.rule = rule;
    double r2_sum = 0.0;
    std::size_t r2_count = 0;
    std::vector<double> p(preds.size()), l(labels.size());
    for (std::size_t t = 0; t < trait_count; ++t) {
        for (std::size_t i = 0; i < preds.size(); ++i) {
            p[i] = preds[i][t];
            l[i] = labels[i][t];
        }
        TraitMetrics& m = report.traits[t];
        m.mse = mse(p, l);
        m.mae = mae(p, l);
        if (p.size() >= 2) {
            try {
                m.r2 = r_squared(p, l);
                r2_sum += *m.r2;
                ++r2_count;
            } catch (const DegenerateVarianceError&) {
                m.r2.reset();
            }
        }
        const auto bins = accuracy_f1(binarize(p, rule.thresholds[t]), binarize(l, rule.thresholds[t]), averaging);
        m.accuracy = bins.accuracy;
        m.f1 = bins.f1;
    }
    auto mean_of = [&](auto field) {
        double s = 0.0;
        for (const auto& m : report.traits) s += field(m);
        return s / static_cast<double>(trait_count);
    };
    report.overall.mse = mean_of([](const TraitMetrics& m) { return m.mse; });
    report.overall.mae = mean_of([](const TraitMetrics& m) { return m.mae; });
    report.overall.accuracy = mean_of([](const TraitMetrics& m) { return m.accuracy; });
    report.overall.f1 = mean_of([](const TraitMetrics& m) { return m.f1; });
    if (r2_count > 0) report.overall.r2 = r2_sum / static_cast<double>(r2_count);
    report.r2_partial = r2_count < trait_count;
    return report;
}

inline nlohmann::json to_json(const TraitMetrics& m, std::size_t n) {
    nlohmann::json j = {{"mse", m.mse}, {"mae", m.mae}, {"accuracy", m.accuracy}, {"f1", m.f1}, {"n", n}};
    j["r2"] = m.r2 ? nlohmann::json(*m.r2) : nlohmann::json(nullptr);
    return j;
}

/// metrics.json layout: {"n", "r2_partial", "overall": {...}, "traits":
/// {"<trait>": {...}}, "thresholds": {...}}; each metric object carries
/// mse, mae, r2, accuracy, f1, n.
inline nlohmann::json to_json(const EvaluationReport& r) {
    nlohmann::json traits = nlohmann::json::object();
    for (TraitName t : all_traits) traits[std::string(name_of(t))] = to_json(r[t], r.n);
    return {{"n", r.n},
            {"r2_partial", r.r2_partial},
            {"overall", to_json(r.overall, r.n)},
            {"traits", traits},
            {"thresholds", to_json(r.rule)}};
}

inline TraitMetrics trait_metrics_from_json(const nlohmann::json& j) {
    TraitMetrics m;
    try {
        m.mse = j.at("mse").get<double>();
        m.mae = j.at("mae").get<double>();
        if (!j.at("r2").is_null()) m.r2 = j.at("r2").get<double>();
        m.accuracy = j.at("accuracy").get<double>();
        m.f1 = j.at("f1").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("metrics object: ") + e.what());
    }
    return m;
}

/// Reads metrics.json. The overall row is taken as stored, not recomputed.
inline EvaluationReport report_from_json(const nlohmann::json& j) {
    EvaluationReport r;
    if (!j.contains("overall") || !j.contains("traits")) throw ParseError("metrics file needs 'overall' and 'traits'");
    r.overall = trait_metrics_from_json(j["overall"]);
    for (TraitName t : all_traits) {
        const std::string key(name_of(t));
        if (!j["traits"].contains(key)) throw ParseError("metrics file missing trait '" + key + "'");
        r.traits[index_of(t)] = trait_metrics_from_json(j["traits"][key]);
    }
    r.n = j.value("n", j["overall"].value("n", std::size_t{0}));
    r.r2_partial = j.value("r2_partial", false);
    if (j.contains("thresholds")) r.rule = rule_from_json(j["thresholds"]);
    return r;
}

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string format_metric(const std::optional<double>& v, int digits) {
    return v ? format_fixed(*v, digits) : std::string("n/a");
}

/// The five metric cells (MSE, MAE, R², Accuracy, F1) as formatted strings.
inline std::array<std::string, 5> metric_cells(const TraitMetrics& m, int digits) {
    return {format_fixed(m.mse, digits), format_fixed(m.mae, digits), format_metric(m.r2, digits),
            format_fixed(m.accuracy, digits), format_fixed(m.f1, digits)};
}

// ---------------------------------------------------------------------------
// Published binary baselines

struct BaselineCell {
    double accuracy = 0.0;  ///< percent
    double f1 = 0.0;        ///< percent
};

struct BaselineRow {
    std::string algorithm;
    std::array<std::optional<BaselineCell>, trait_count> cells{};
};

struct BaselineTable {
    std::vector<BaselineRow> rows;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split_delimited(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delim)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

inline double parse_percent(const std::string& s, std::size_t lineno) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("baseline table: bad number '" + s + "'", lineno);
    }
    if (trim(s.substr(used)).size() != 0) throw ParseError("baseline table: bad number '" + s + "'", lineno);
    if (!(v >= 0.0 && v <= 100.0)) throw ParseError("baseline table: percentage outside [0,100]", lineno);
    return v;
}

} // namespace detail

/// Parses `algorithm,EXT,NEU,AGR,CON,OPN` tables whose cells read "acc (f1)".
/// Column order is free; unknown trait columns are rejected.
inline BaselineTable parse_baseline_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::optional<TraitName>> columns;
    BaselineTable table;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_delimited(line, ',');
        if (columns.empty()) {
            if (cells.empty() || cells[0] != "algorithm")
                throw ParseError("baseline table: header must start with 'algorithm'", lineno);
            columns.push_back(std::nullopt);
            for (std::size_t c = 1; c < cells.size(); ++c) {
                auto t = trait_from_code(cells[c]);
                if (!t) throw ParseError("baseline table: unknown trait column '" + cells[c] + "'", lineno);
                columns.push_back(t);
            }
            continue;
        }
        if (cells.size() != columns.size()) throw ParseError("baseline table: wrong number of cells", lineno);
        BaselineRow row;
        row.algorithm = cells[0];
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            const auto open = cell.find('(');
            const auto close = cell.find(')');
            if (open == std::string::npos || close == std::string::npos || close < open)
                throw ParseError("baseline table: expected 'acc (f1)' cell, got '" + cell + "'", lineno);
            row.cells[index_of(*columns[c])] =
                BaselineCell{detail::parse_percent(detail::trim(cell.substr(0, open)), lineno),
                             detail::parse_percent(detail::trim(cell.substr(open + 1, close - open - 1)), lineno)};
        }
        table.rows.push_back(std::move(row));
    }
    if (columns.empty()) throw ParseError("baseline table: empty input");
    return table;
}

struct ComparisonRow {
    TraitName trait{};
    std::string algorithm;
    double ours_accuracy = 0.0;  ///< percent
    double baseline_accuracy = 0.0;
    double accuracy_delta = 0.0;
    bool accuracy_win = false;
    double ours_f1 = 0.0;
    double baseline_f1 = 0.0;
    double f1_delta = 0.0;
    bool f1_win = false;
};

/// Deltas below this many points count as ties.
inline constexpr double comparison_tie_tolerance = 1e-9;

/// Our per-trait accuracy/F1 (as percentages) minus each baseline's, one row
/// per (trait, algorithm) pair, traits in canonical order.
inline std::vector<ComparisonRow> compare_to_baseline(const EvaluationReport& report, const BaselineTable& baselines) {
    auto snap = [](double d) { return std::abs(d) <= comparison_tie_tolerance ? 0.0 : d; };
    std::vector<ComparisonRow> out;
    for (TraitName t : all_traits) {
        for (const auto& row : baselines.rows) {
            const auto& cell = row.cells[index_of(t)];
            if (!cell) continue;
            ComparisonRow c;
            c.trait = t;
            c.algorithm = row.algorithm;
            c.ours_accuracy = report[t].accuracy * 100.0;
            c.baseline_accuracy = cell->accuracy;
            c.accuracy_delta = snap(c.ours_accuracy - c.baseline_accuracy);
            c.accuracy_win = c.accuracy_delta > comparison_tie_tolerance;
            c.ours_f1 = report[t].f1 * 100.0;
            c.baseline_f1 = cell->f1;
            c.f1_delta = snap(c.ours_f1 - c.baseline_f1);
            c.f1_win = c.f1_delta > comparison_tie_tolerance;
            out.push_back(std::move(c));
        }
    }
    return out;
}

} // namespace trait_tuner
