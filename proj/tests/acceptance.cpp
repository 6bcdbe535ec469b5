// Acceptance suite: one line per criterion, non-zero exit if any fails.
//
// Every tolerance, replication count and runtime budget below is fixed here;
// nothing is tuned after the fact.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rpvtest/rpvtest.hpp"

using namespace rpvtest;

namespace {

const ZiLogNormalParams kBase{0.05, 4.0, 1.0};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] AC%-2d %-34s %s (%.1fs / budget %.0fs%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), secs, budget_seconds, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Null experiment j: both arms drawn from the same parameters.
ExperimentData null_experiment(std::size_t n, std::uint64_t seed, std::uint64_t j) {
    return simulate_experiment(kBase, n, kBase, n, rng::derive(seed, j));
}

}  // namespace

int main() {
    std::printf("rpvtest acceptance suite (%u worker threads)\n", worker_count());

    criterion(1, "Mann-Whitney brute-force oracle", 10, [] {
        std::mt19937_64 gen(1);
        int mismatches = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<double> a(1 + gen() % 30), b(1 + gen() % 30);
            const int levels = 1 + static_cast<int>(gen() % 40);
            for (auto& x : a) x = 1.0 + static_cast<double>(gen() % levels);
            for (auto& x : b) x = 1.0 + static_cast<double>(gen() % levels);
            mismatches += mann_whitney_u(a, b) != oracle::brute_force_u(a, b);
        }
        return Outcome{mismatches == 0, fmt("10000 instances, %d mismatches", mismatches)};
    });

    criterion(2, "Two-part test null calibration", 120, [] {
        const std::size_t reps = 5000;
        const auto L = run_indexed<double>(reps, worker_count(), [](std::size_t j) {
            return two_part_test(null_experiment(2000, 2, j)).L;
        });
        const double consistent = dist::chi2_quantile(0.95, 2);
        std::size_t rej_c = 0, rej_p = 0;
        for (double l : L) {
            rej_c += l > consistent;
            rej_p += l > kPaperLThreshold;
        }
        const double rate_c = static_cast<double>(rej_c) / reps, rate_p = static_cast<double>(rej_p) / reps;
        return Outcome{rate_c >= 0.04 && rate_c <= 0.06 && rate_p < 0.02,
                       fmt("rate@5.991 = %.4f in [0.04,0.06], rate@9.633 = %.4f < 0.02", rate_c, rate_p)};
    });

    criterion(3, "Decision table", 1, [] {
        using enum Verdict;
        const Decision expected[3][3] = {
            {Decision::Positive, Decision::Positive, Decision::Indeterminate},
            {Decision::Positive, Decision::NoChange, Decision::Negative},
            {Decision::Indeterminate, Decision::Negative, Decision::Negative},
        };
        const Verdict v[3] = {PosSig, NonSig, NegSig};
        int ok = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ok += classify(v[i], v[j]) == expected[i][j];
        return Outcome{ok == 9, fmt("%d/9 cells match", ok)};
    });

    criterion(4, "Delta CI coverage under H0", 120, [] {
        const std::size_t reps = 2000;
        struct Cov {
            std::uint8_t estimator = 0, consistent = 0;
        };
        const auto cov = run_indexed<Cov>(reps, worker_count(), [](std::size_t j) {
            const ExperimentData d = null_experiment(10000, 4, j);
            const RpvEstimate e = delta_ci(d);
            const RpvEstimate c = delta_ci(d, 0.05, VarianceMode::Consistent);
            return Cov{static_cast<std::uint8_t>(!e.significant), static_cast<std::uint8_t>(!c.significant)};
        });
        double hit = 0, hit_consistent = 0;
        for (const auto& c : cov) {
            hit += c.estimator;
            hit_consistent += c.consistent;
        }
        hit /= reps;
        hit_consistent /= reps;
        return Outcome{std::abs(hit - 0.95) <= 0.02,
                       fmt("coverage %.4f in [0.93,0.97] (consistent-mode variance: %.4f, informational)", hit,
                           hit_consistent)};
    });

    criterion(5, "Delta composition vs finite differences", 1, [] {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> ur(0.005, 0.95), um(-2.0, 6.0), us(0.05, 3.0);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const ZiLogNormalParams p{ur(gen), um(gen), us(gen)};
            const double a = std::exp(p.mu + p.sigma2 / 2);
            auto rpv_of = [](double r, double aov) { return r * aov; };
            const double hr = 1e-6 * p.r, ha = 1e-6 * a;
            const double dr = (rpv_of(p.r + hr, a) - rpv_of(p.r - hr, a)) / (2 * hr);
            const double da = (rpv_of(p.r, a + ha) - rpv_of(p.r, a - ha)) / (2 * ha);
            const double var_r = p.r * (1 - p.r);
            const double lognormal_var = (std::exp(p.sigma2) - 1) * std::exp(2 * p.mu + p.sigma2);
            const double aov_estimator_var = a * a * (p.sigma2 + p.sigma2 * p.sigma2 / 2) / p.r;
            const double consistent = dr * dr * var_r + da * da * lognormal_var;
            const double estimator = dr * dr * var_r + da * da * aov_estimator_var;
            // paper-literal keeps the first-term exponent un-squared: dr^2 replaced by AOV
            const double literal = a * var_r + da * da * lognormal_var;
            worst = std::max({worst, std::abs(delta_variance(p, VarianceMode::Consistent) / consistent - 1),
                              std::abs(delta_variance(p, VarianceMode::Estimator) / estimator - 1),
                              std::abs(delta_variance(p, VarianceMode::PaperLiteral) / literal - 1)});
        }
        return Outcome{worst <= 1e-6, fmt("100 points x 3 modes, worst rel. error %.2e <= 1e-6", worst)};
    });

    criterion(6, "LRT null calibration", 300, [] {
        const std::size_t reps = 2000;
        struct Rep {
            double stat = 0, violation = 0;
            bool ok = false;
        };
        const auto out = run_indexed<Rep>(reps, worker_count(), [](std::size_t j) {
            try {
                const LrtResult r = lrt(null_experiment(5000, 6, j));
                return Rep{r.stat, r.constraint_violation, true};
            } catch (const Error&) {
                return Rep{};
            }
        });
        std::vector<double> stats;
        double worst_violation = 0, min_stat = INFINITY;
        int failed = 0;
        for (const auto& r : out) {
            if (!r.ok) {
                ++failed;
                continue;
            }
            stats.push_back(r.stat);
            worst_violation = std::max(worst_violation, r.violation);
            min_stat = std::min(min_stat, r.stat);
        }
        const double ks = oracle::ks_distance(stats, [](double x) { return dist::chi2_cdf(x, 1); });
        return Outcome{failed == 0 && ks < 0.04 && worst_violation <= 1e-8 && min_stat >= -1e-6,
                       fmt("KS %.4f < 0.04, max violation %.1e, min stat %.1e, %d fit failures", ks, worst_violation,
                           min_stat, failed)};
    });

    criterion(7, "Constrained fit vs 2001x2001 grid", 60, [] {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> ur(0.02, 0.2), um(2.0, 5.0), us(0.4, 1.6);
        double worst = 0.0;
        for (int inst = 0; inst < 20; ++inst) {
            const ZiLogNormalParams pc{ur(gen), um(gen), us(gen)};
            ZiLogNormalParams pt{ur(gen), pc.mu + 0.3 * (um(gen) - 3.5), us(gen)};
            const ExperimentData d = simulate_experiment(pc, 4000, pt, 4000, gen());
            const GroupSummary sc = summarize(d.control()), st = summarize(d.treatment());
            const ZiLogNormalParams c = fit_mle(sc), t = fit_mle(st);
            FitOptions opt;
            opt.free = {false, true, false, false, true, false};
            const ConstrainedFit fit = fit_constrained(sc, st, c, t, opt);

            // Oracle objective: log-normal log-likelihood in mu only, from raw sufficient statistics.
            const double mc = sc.purchases(), mt = st.purchases();
            auto f = [&](double uc, double ut) {
                return -mc * (*sc.log_var + (*sc.log_mean - uc) * (*sc.log_mean - uc)) / (2 * c.sigma2) -
                       mt * (*st.log_var + (*st.log_mean - ut) * (*st.log_mean - ut)) / (2 * t.sigma2);
            };
            auto g = [&](double uc, double ut) {
                return std::log(c.r) + uc + c.sigma2 / 2 - std::log(t.r) - ut - t.sigma2 / 2;
            };
            const auto best = oracle::constrained_grid_max(f, g, c.mu, t.mu, 2.0, 2001, 3, 100.0);
            worst = std::max({worst, std::abs(fit.control.mu - best.x), std::abs(fit.treatment.mu - best.y)});
        }
        return Outcome{worst <= 1e-4, fmt("20 instances, worst |mu - mu_grid| = %.2e <= 1e-4", worst)};
    });

    criterion(8, "Power procedure sanity", 300, [] {
        const auto v = simulate(kBase, 5000, 808);
        const ExperimentData null_pilot(v, v);
        const double se = std::sqrt(0.05 * 0.95 / 1000);
        bool ok = true;
        std::string detail;
        for (auto kind : {TestKind::TwoPart, TestKind::DeltaCI, TestKind::LRT}) {
            const PowerEstimate e = estimate_power(null_pilot, 5000, 1000, kind, {}, 81, worker_count());
            ok = ok && std::abs(e.power - 0.05) <= 3 * se;
            detail += fmt("%s %.3f, ", to_string(kind), e.power);
        }
        const ExperimentData effect_pilot =
            simulate_experiment(kBase, 5000, {0.06, 4.0, 1.0}, 5000, 809);
        const PowerEstimate small = estimate_power(effect_pilot, 500, 1000, TestKind::TwoPart, {}, 82, worker_count());
        const PowerEstimate large = estimate_power(effect_pilot, 5000, 1000, TestKind::TwoPart, {}, 83, worker_count());
        auto sd = [](const PowerEstimate& e) { return std::sqrt(e.power * (1 - e.power) / e.replications); };
        const bool monotone = small.power <= large.power + 2 * (sd(small) + sd(large));
        return Outcome{ok && monotone, fmt("null power %s|alpha +- %.3f; effect power n=500 %.3f, n=5000 %.3f",
                                           detail.c_str(), 3 * se, small.power, large.power)};
    });

    criterion(9, "Sample-size search vs simulated curve", 600, [] {
        // Pilot whose empirical distribution matches the model: exact zero counts
        // and purchases at log-normal quantiles.
        auto quantile_arm = [](double r, std::size_t n) {
            const auto m = static_cast<std::size_t>(std::llround(r * n));
            std::vector<double> v(n - m, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                v.push_back(std::exp(4.0 + dist::normal_quantile((i + 0.5) / m)));
            }
            return v;
        };
        const ExperimentData pilot(quantile_arm(0.02, 20000), quantile_arm(0.025, 20000));
        const double target = 0.8;
        SearchConfig search;
        search.n0 = 2000;
        search.resolution = 2000;
        search.replications = 2000;
        search.threads = worker_count();
        const SampleSizePlan plan = find_sample_size(pilot, target, TestKind::TwoPart, {}, 9, search);

        // Independent curve: fresh parametric experiments, no resampling.
        const std::size_t oracle_reps = 4000;
        auto simulated_power = [&](std::size_t n) {
            const auto rej = run_indexed<std::uint8_t>(oracle_reps, worker_count(), [&](std::size_t j) {
                const ExperimentData d = simulate_experiment({0.02, 4.0, 1.0}, n, {0.025, 4.0, 1.0}, n,
                                                             rng::derive(rng::derive(900, n), j));
                const TwoPartResult r = two_part_test(d);
                return static_cast<std::uint8_t>(!r.degenerate && r.reject);
            });
            double s = 0;
            for (auto x : rej) s += x;
            return s / oracle_reps;
        };
        double crossing = NAN;
        std::size_t prev_n = 8000;
        double prev_p = simulated_power(prev_n);
        for (std::size_t n = prev_n + 1000; n <= 32000 && std::isnan(crossing); n += 1000) {
            const double p = simulated_power(n);
            if (prev_p < target && p >= target) {
                crossing = prev_n + (target - prev_p) / (p - prev_p) * (n - prev_n);
            }
            prev_n = n;
            prev_p = p;
        }
        const double gap = std::abs(static_cast<double>(plan.chosen_n) - crossing);
        return Outcome{!std::isnan(crossing) && gap <= static_cast<double>(search.resolution),
                       fmt("chosen n %zu, simulated crossing %.0f, |gap| %.0f <= %zu", plan.chosen_n, crossing, gap,
                           search.resolution)};
    });

    criterion(10, "Q-Q diagnostic and inverse normal", 30, [] {
        const auto v = simulate({1.0, 4.0, 1.0}, 100000, 10);
        const QQData qq = qq_lognormal(v);
        bool invariant = true;
        for (double c : {0.25, 8.0, 4096.0}) {
            auto s = v;
            for (auto& x : s) x *= c;
            invariant = invariant && qq_lognormal(s) == qq;
        }
        double worst = 0.0;
        for (int i = 0; i <= 12000; ++i) {
            const double z = -6.0 + i * 0.001;
            const double p = static_cast<double>(oracle::series_normal_cdf(z));
            worst = std::max(worst, std::abs(dist::normal_quantile(p) - z));
        }
        return Outcome{qq.correlation > 0.999 && invariant && worst <= 1e-8,
                       fmt("corr %.6f > 0.999, scale-invariant %s, max |Phi^-1(Phi(z)) - z| %.1e <= 1e-8",
                           qq.correlation, invariant ? "yes" : "no", worst)};
    });

    criterion(11, "Determinism (serial vs parallel)", 120, [] {
        const std::string a = io::to_csv(simulate_experiment(kBase, 20000, {0.06, 4.0, 1.0}, 20000, 11));
        const std::string b = io::to_csv(simulate_experiment(kBase, 20000, {0.06, 4.0, 1.0}, 20000, 11));
        const ExperimentData pilot = simulate_experiment(kBase, 4000, {0.07, 4.0, 1.0}, 4000, 12);
        bool power_ok = true;
        for (auto kind : {TestKind::TwoPart, TestKind::DeltaCI, TestKind::LRT}) {
            const json serial = to_json(estimate_power(pilot, 3000, 300, kind, {}, 13, 1));
            const json parallel = to_json(estimate_power(pilot, 3000, 300, kind, {}, 13, 4));
            const json again = to_json(estimate_power(pilot, 3000, 300, kind, {}, 13, 1));
            power_ok = power_ok && serial.dump() == parallel.dump() && serial.dump() == again.dump();
        }
        SearchConfig s1;
        s1.n0 = 500;
        s1.resolution = 250;
        s1.replications = 200;
        SearchConfig s4 = s1;
        s4.threads = 4;
        const std::string plan1 = to_json(find_sample_size(pilot, 0.7, TestKind::TwoPart, {}, 14, s1)).dump();
        const std::string plan4 = to_json(find_sample_size(pilot, 0.7, TestKind::TwoPart, {}, 14, s4)).dump();
        const std::string plan1b = to_json(find_sample_size(pilot, 0.7, TestKind::TwoPart, {}, 14, s1)).dump();
        const bool ok = a == b && power_ok && plan1 == plan4 && plan1 == plan1b;
        return Outcome{ok, fmt("simulate %s, power %s, samplesize %s", a == b ? "identical" : "DIFFERS",
                               power_ok ? "identical" : "DIFFERS",
                               plan1 == plan4 && plan1 == plan1b ? "identical" : "DIFFERS")};
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
