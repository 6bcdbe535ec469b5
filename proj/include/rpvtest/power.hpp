#pragma once

// Monte Carlo power and sample-size planning by resampling pilot data.
//
// Each replication draws n visits with replacement from each pilot arm
// separately, runs the chosen test and records whether it rejected. Every
// replication owns a counter-based random stream keyed by (seed, replication),
// so the estimate does not depend on how replications are scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rpvtest/core.hpp"
#include "rpvtest/parametric.hpp"
#include "rpvtest/rank_tests.hpp"

namespace rpvtest {

enum class TestKind { TwoPart, DeltaCI, LRT };

inline const char* to_string(TestKind k) {
    switch (k) {
        case TestKind::TwoPart: return "two-part";
        case TestKind::DeltaCI: return "delta";
        case TestKind::LRT: return "lrt";
    }
    return "?";
}

/// Everything that changes what a test decides.
struct TestConfig {
    double alpha = 0.05;
    ThresholdMode threshold = ThresholdMode::Consistent;
    RankScope rank_scope = RankScope::Positive;
    VarianceMode variance = VarianceMode::Estimator;
    ConstraintForm constraint = ConstraintForm::Rpv;

    TwoPartConfig two_part() const { return {alpha, threshold, rank_scope}; }
};

/// Whether `kind` rejects on `data`; empty when the test cannot be carried out.
inline std::optional<bool> test_rejects(const ExperimentData& data, TestKind kind, const TestConfig& cfg) {
    try {
        switch (kind) {
            case TestKind::TwoPart: {
                const TwoPartResult r = two_part_test(data, cfg.two_part());
                if (r.degenerate) {
                    return std::nullopt;
                }
                return r.reject;
            }
            case TestKind::DeltaCI:
                return delta_ci(data, cfg.alpha, cfg.variance).significant;
            case TestKind::LRT:
                return lrt(data, cfg.alpha, cfg.constraint).reject;
        }
    } catch (const DegenerateGroupError&) {
    } catch (const DegenerateProportionError&) {
    } catch (const BoundaryParamError&) {
    } catch (const ConvergenceError&) {
    } catch (const NumericalError&) {
    }
    return std::nullopt;
}

struct PowerEstimate {
    std::size_t n_per_group = 0;
    std::size_t replications = 0;
    std::size_t rejections = 0;
    std::size_t degenerate = 0;  ///< replications where the test could not run; counted as non-rejections
    double power = 0.0;
    double power_ci_low = 0.0;  ///< Wilson 95%
    double power_ci_high = 0.0;
    TestKind test_kind = TestKind::TwoPart;
    double alpha = 0.05;
    std::uint64_t seed = 0;

    bool operator==(const PowerEstimate&) const = default;
};

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

/// Resample `n` values with replacement from `pool`, drawing from `cursor`.
inline std::vector<double> resample(const std::vector<double>& pool, std::size_t n, rng::Cursor& cursor) {
    std::vector<double> out(n);
    for (auto& v : out) {
        v = pool[cursor.below(pool.size())];
    }
    return out;
}

/// One replication's bootstrap experiment. Stream id = replication index.
inline ExperimentData bootstrap_experiment(const ExperimentData& pilot, std::size_t n_per_group, std::uint64_t seed,
                                           std::uint64_t replication) {
    rng::Cursor cursor(seed, replication);
    std::vector<double> c = resample(pilot.control(), n_per_group, cursor);
    std::vector<double> t = resample(pilot.treatment(), n_per_group, cursor);
    return ExperimentData(std::move(c), std::move(t));
}

/*
 * Run `count` independent jobs on up to `threads` workers. job(i) must depend
 * only on i; results land in slot i so the output is schedule-independent.
 */
template <class Result, class Job>
std::vector<Result> run_indexed(std::size_t count, unsigned threads, Job job) {
    std::vector<Result> out(count);
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = job(i);
        }
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                out[i] = job(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

inline PowerEstimate estimate_power(const ExperimentData& pilot, std::size_t n_per_group, std::size_t replications,
                                    TestKind kind, const TestConfig& cfg, std::uint64_t seed, unsigned threads = 1) {
    if (replications < 100) {
        throw InputError("estimate_power: at least 100 replications are required, got " + std::to_string(replications));
    }
    if (n_per_group == 0) {
        throw InputError("estimate_power: n_per_group must be at least 1");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw InputError("alpha must lie in (0,1)");
    }

    // 0 = no rejection, 1 = rejection, 2 = degenerate
    const auto outcomes = run_indexed<std::uint8_t>(replications, threads, [&](std::size_t j) -> std::uint8_t {
        const ExperimentData sample = bootstrap_experiment(pilot, n_per_group, seed, j);
        const auto rejected = test_rejects(sample, kind, cfg);
        if (!rejected) {
            return 2;
        }
        return *rejected ? 1 : 0;
    });

    PowerEstimate est;
    est.n_per_group = n_per_group;
    est.replications = replications;
    est.test_kind = kind;
    est.alpha = cfg.alpha;
    est.seed = seed;
    for (auto o : outcomes) {
        est.rejections += o == 1;
        est.degenerate += o == 2;
    }
    est.power = static_cast<double>(est.rejections) / static_cast<double>(replications);
    std::tie(est.power_ci_low, est.power_ci_high) = wilson_interval(est.rejections, replications);
    return est;
}

struct SearchConfig {
    std::size_t n0 = 0;  ///< 0: use the control pilot size
    std::size_t resolution = 100;
    std::size_t n_max = 10'000'000;
    std::size_t replications = 1000;
    unsigned threads = 1;
};

struct SampleSizePlan {
    double target_power = 0.8;
    std::size_t chosen_n = 0;
    std::vector<std::pair<std::size_t, PowerEstimate>> search_trace;  ///< ascending in n
    std::vector<std::string> warnings;
};

class SearchExhaustedError : public Error {
public:
    SearchExhaustedError(const std::string& what, std::vector<std::pair<std::size_t, PowerEstimate>> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<std::pair<std::size_t, PowerEstimate>>& trace() const noexcept { return trace_; }

private:
    std::vector<std::pair<std::size_t, PowerEstimate>> trace_;
};

inline double mean_revenue(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

/*
 * Smallest n (to within `resolution`) whose estimated power reaches the
 * target: double n from n0 until the target is met, then bisect the last
 * bracket. The probe at n uses sub-seed derive(seed, n), so re-probing the
 * same n reproduces the same estimate.
 */
inline SampleSizePlan find_sample_size(const ExperimentData& pilot, double target_power, TestKind kind,
                                       const TestConfig& cfg, std::uint64_t seed, const SearchConfig& search = {}) {
    if (!(target_power > 0.0 && target_power < 1.0)) {
        throw InputError("target power must lie in (0,1)");
    }
    if (search.resolution == 0) {
        throw InputError("resolution must be at least 1");
    }
    SampleSizePlan plan;
    plan.target_power = target_power;
    if (mean_revenue(pilot.control()) == mean_revenue(pilot.treatment())) {
        plan.warnings.push_back("pilot shows no revenue difference; the search may not terminate before n_max");
    }

    std::map<std::size_t, PowerEstimate> probes;
    auto probe = [&](std::size_t n) {
        auto it = probes.find(n);
        if (it == probes.end()) {
            it = probes.emplace(n, estimate_power(pilot, n, search.replications, kind, cfg, rng::derive(seed, n),
                                                  search.threads)).first;
        }
        return it->second.power;
    };
    auto trace = [&] { return std::vector<std::pair<std::size_t, PowerEstimate>>(probes.begin(), probes.end()); };

    const std::size_t n0 = search.n0 == 0 ? pilot.control().size() : search.n0;
    if (n0 > search.n_max) {
        throw InputError("n0 exceeds n_max");
    }
    if (probe(n0) >= target_power) {
        plan.chosen_n = n0;
        plan.search_trace = trace();
        return plan;
    }

    std::size_t lo = n0;
    std::size_t hi = n0;
    for (;;) {
        if (hi >= search.n_max) {
            throw SearchExhaustedError("target power " + std::to_string(target_power) + " not reached by n_max = " +
                                           std::to_string(search.n_max),
                                       trace());
        }
        lo = hi;
        hi = std::min(2 * hi, search.n_max);
        if (probe(hi) >= target_power) {
            break;
        }
    }
    while (hi - lo > search.resolution) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (probe(mid) >= target_power) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    plan.chosen_n = hi;
    plan.search_trace = trace();
    return plan;
}

}  // namespace rpvtest
