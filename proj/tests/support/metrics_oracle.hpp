#pragma once

// Direct textbook recomputation of the evaluation metrics, written without
// reference to the library so it can serve as an independent check.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace oracle {

struct Cell {
    double mse, mae;
    std::optional<double> r2;
    double accuracy, f1;
};

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// F1 of one class from precision and recall. Class absent from labels and
// predictions: 1. Otherwise undefined precision or recall counts as 0.
inline double class_f1(const std::vector<bool>& pred_is, const std::vector<bool>& label_is) {
    double hit = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < pred_is.size(); ++i) {
        predicted += pred_is[i];
        actual += label_is[i];
        hit += pred_is[i] && label_is[i];
    }
    if (predicted == 0 && actual == 0) return 1.0;
    if (hit == 0) return 0.0;
    const double precision = hit / predicted;
    const double recall = hit / actual;
    return 2 * precision * recall / (precision + recall);
}

inline Cell score(const std::vector<double>& p, const std::vector<double>& y, double threshold) {
    const double n = static_cast<double>(p.size());
    Cell c{};
    double sq = 0, ab = 0, ybar = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sq += (p[i] - y[i]) * (p[i] - y[i]);
        ab += std::fabs(p[i] - y[i]);
        ybar += y[i];
    }
    ybar /= n;
    c.mse = sq / n;
    c.mae = ab / n;
    double tot = 0;
    for (double v : y) tot += (v - ybar) * (v - ybar);
    if (tot > 0 && p.size() >= 2) c.r2 = 1.0 - sq / tot;

    std::vector<bool> pp, yp, pn, yn;
    double agree = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool a = p[i] >= threshold, b = y[i] >= threshold;
        pp.push_back(a), yp.push_back(b), pn.push_back(!a), yn.push_back(!b);
        agree += a == b;
    }
    c.accuracy = agree / n;
    c.f1 = (class_f1(pp, yp) + class_f1(pn, yn)) / 2.0;
    return c;
}

} // namespace oracle
