#pragma once

// Zero-inflated log-normal revenue model.
//
// A visit ends without a purchase with probability 1 - r (order value 0) or
// with a purchase whose value is log-normal(mu, sigma2). Revenue per visit is
// then RPV = r * AOV with AOV = exp(mu + sigma2 / 2).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpvtest/errors.hpp"
#include "rpvtest/random.hpp"

namespace rpvtest {

enum class Group { Control, Treatment };

inline const char* to_string(Group g) { return g == Group::Control ? "control" : "treatment"; }

namespace detail {

inline void check_group(std::span<const double> values, const char* name) {
    if (values.empty()) {
        throw InputError(std::string(name) + " group is empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw InputError(std::string(name) + " group: order value at index " + std::to_string(i) +
                             " is negative or not finite");
        }
    }
}

}  // namespace detail

/// Per-visit order values for both arms; 0 means the visit did not purchase.
class ExperimentData {
public:
    ExperimentData(std::vector<double> control, std::vector<double> treatment)
        : control_(std::move(control)), treatment_(std::move(treatment)) {
        detail::check_group(control_, "control");
        detail::check_group(treatment_, "treatment");
    }

    const std::vector<double>& control() const noexcept { return control_; }
    const std::vector<double>& treatment() const noexcept { return treatment_; }
    const std::vector<double>& group(Group g) const noexcept {
        return g == Group::Control ? control_ : treatment_;
    }

    bool operator==(const ExperimentData&) const = default;

private:
    std::vector<double> control_;
    std::vector<double> treatment_;
};

/*
 * Sufficient statistics of one arm.
 *
 * log_var uses divisor m = n - k (maximum-likelihood convention) so it can be
 * plugged straight into the log-normal likelihood. log_mean needs at least one
 * purchase and log_var at least two; otherwise they are empty.
 */
struct GroupSummary {
    std::size_t n = 0;
    std::size_t k = 0;
    double p_hat = 0.0;
    double r_hat = 0.0;
    std::optional<double> log_mean;
    std::optional<double> log_var;

    std::size_t purchases() const noexcept { return n - k; }
};

struct ZiLogNormalParams {
    double r = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;

    /// On the edge of the parameter space: the Delta and LRT machinery reject these.
    bool is_boundary() const noexcept { return r <= 0.0 || r >= 1.0 || sigma2 <= 0.0; }

    bool operator==(const ZiLogNormalParams&) const = default;
};

inline void validate(const ZiLogNormalParams& p) {
    if (!(p.r >= 0.0 && p.r <= 1.0)) {
        throw InputError("conversion rate r must lie in [0,1]");
    }
    if (!std::isfinite(p.mu)) {
        throw InputError("mu must be finite");
    }
    if (!(p.sigma2 >= 0.0) || !std::isfinite(p.sigma2)) {
        throw InputError("sigma2 must be finite and non-negative");
    }
}

inline double aov(const ZiLogNormalParams& p) { return std::exp(p.mu + 0.5 * p.sigma2); }

inline double rpv(const ZiLogNormalParams& p) { return p.r * aov(p); }

/// Positive order values of a group, in input order.
inline std::vector<double> positives(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (v > 0.0) {
            out.push_back(v);
        }
    }
    return out;
}

inline GroupSummary summarize(std::span<const double> values) {
    detail::check_group(values, "input");

    GroupSummary s;
    s.n = values.size();
    double sum = 0.0;
    for (double v : values) {
        if (v > 0.0) {
            sum += std::log(v);
        } else {
            ++s.k;
        }
    }
    s.p_hat = static_cast<double>(s.k) / static_cast<double>(s.n);
    s.r_hat = 1.0 - s.p_hat;

    const std::size_t m = s.purchases();
    if (m >= 1) {
        const double mean = sum / static_cast<double>(m);
        s.log_mean = mean;
        if (m >= 2) {
            double ss = 0.0;
            for (double v : values) {
                if (v > 0.0) {
                    const double d = std::log(v) - mean;
                    ss += d * d;
                }
            }
            s.log_var = ss / static_cast<double>(m);
        }
    }
    return s;
}

/// Summary of the union of two groups.
inline GroupSummary summarize_pooled(const ExperimentData& data) {
    std::vector<double> all;
    all.reserve(data.control().size() + data.treatment().size());
    all.insert(all.end(), data.control().begin(), data.control().end());
    all.insert(all.end(), data.treatment().begin(), data.treatment().end());
    return summarize(all);
}

/// Closed-form maximum-likelihood fit. sigma2 may come back 0 (is_boundary()).
inline ZiLogNormalParams fit_mle(const GroupSummary& s) {
    if (s.purchases() < 2 || !s.log_mean || !s.log_var) {
        throw DegenerateGroupError("maximum-likelihood fit needs at least two purchases, got " +
                                   std::to_string(s.purchases()));
    }
    return {s.r_hat, *s.log_mean, *s.log_var};
}

/// One visit's order value. Visit i consumes draws 0 and 1 of stream (seed, i).
inline double simulate_visit(const ZiLogNormalParams& p, std::uint64_t seed, std::uint64_t visit) {
    const rng::Stream stream(seed, visit);
    if (!(stream.uniform(0) < p.r)) {
        return 0.0;
    }
    return std::exp(p.mu + std::sqrt(p.sigma2) * stream.normal(1));
}

inline std::vector<double> simulate(const ZiLogNormalParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n == 0) {
        throw InputError("simulate: n must be at least 1");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = simulate_visit(p, seed, i);
    }
    return out;
}

/// Both arms from one seed; each arm gets its own derived sub-seed.
inline ExperimentData simulate_experiment(const ZiLogNormalParams& control, std::size_t n_control,
                                          const ZiLogNormalParams& treatment, std::size_t n_treatment,
                                          std::uint64_t seed) {
    return ExperimentData(simulate(control, n_control, rng::derive(seed, 0)),
                          simulate(treatment, n_treatment, rng::derive(seed, 1)));
}

}  // namespace rpvtest
