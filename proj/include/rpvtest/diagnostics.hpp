#pragma once

// Q-Q diagnostic for log-normality of purchase values.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rpvtest/distributions.hpp"
#include "rpvtest/errors.hpp"

namespace rpvtest {

struct QQPoint {
    double theoretical_z = 0.0;
    double empirical_z = 0.0;

    bool operator==(const QQPoint&) const = default;
};

struct QQData {
    std::vector<QQPoint> points;
    std::size_t n = 0;
    double correlation = 0.0;  ///< Pearson, summary only

    bool operator==(const QQData&) const = default;
};

/// (i - 0.5) / n for i = 1..n
inline std::vector<double> plotting_positions(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return out;
}

inline double pearson(std::span<const QQPoint> pts) {
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.theoretical_z;
        my += p.empirical_z;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        const double dx = p.theoretical_z - mx, dy = p.empirical_z - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

/*
 * Sorted, standardized log values against standard normal quantiles at the
 * plotting positions. Standardization uses divisor n. Logs are taken of
 * x / x_min, so multiplying every value by a power of two leaves the result
 * bit-identical (and any other constant changes it only by rounding).
 */
inline QQData qq_lognormal(std::span<const double> values) {
    if (values.size() < 3) {
        throw InputError("qq_lognormal: need at least 3 values");
    }
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InputError("qq_lognormal: values must be positive and finite");
        }
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::stable_sort(sorted.begin(), sorted.end());
    const double ref = sorted.front();

    const std::size_t n = sorted.size();
    std::vector<double> logs(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        logs[i] = std::log(sorted[i] / ref);
        mean += logs[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double l : logs) {
        ss += (l - mean) * (l - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) {
        throw DegenerateInputError("qq_lognormal: all values are equal");
    }

    QQData out;
    out.n = n;
    out.points.resize(n);
    const auto pos = plotting_positions(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.points[i] = {dist::normal_quantile(pos[i]), (logs[i] - mean) / sd};
    }
    out.correlation = pearson(out.points);
    return out;
}

}  // namespace rpvtest
