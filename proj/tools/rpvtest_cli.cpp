// rpvtest: command-line front end for the RPV testing library.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "rpvtest/rpvtest.hpp"

namespace {

using namespace rpvtest;

struct Options {
    std::string input;
    std::string out;
    std::uint64_t seed = 1;
    TestConfig test;

    // pipeline
    TestKind followup = TestKind::DeltaCI;
    std::string followup_data;

    // power / samplesize
    TestKind test_kind = TestKind::TwoPart;
    std::size_t n = 0;
    std::size_t replications = 1000;
    unsigned threads = 1;
    double target_power = 0.8;
    std::size_t n0 = 0;
    std::size_t resolution = 100;
    std::size_t n_max = 10'000'000;

    // qq
    std::string qq_group = "all";
    std::string plot;

    // simulate
    double r = 0.05, mu = 4.0, sigma2 = 1.0;
    std::optional<double> r_t, mu_t, sigma2_t;
    std::size_t n_sim = 1000;
    std::optional<std::size_t> n_t;
    std::string csv;
};

void add_common(CLI::App* app, Options& o, bool needs_input) {
    if (needs_input) {
        app->add_option("input", o.input, "CSV file with header group,order_value")->required();
    }
    app->add_option("--out", o.out, "write the structured JSON report here");
    app->add_option("--seed", o.seed, "random seed")->capture_default_str();
    app->add_option("--alpha", o.test.alpha, "significance level")->capture_default_str()->check(CLI::Range(1e-12, 1.0 - 1e-12));
    app->add_option("--threshold", o.test.threshold, "L threshold: consistent (chi-square 2 df) or paper (9.633)")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ThresholdMode>{
            {"consistent", ThresholdMode::Consistent}, {"paper", ThresholdMode::Paper}}));
    app->add_option("--variance-mode", o.test.variance, "Delta variance: estimator, consistent or paper-literal")
        ->transform(CLI::CheckedTransformer(std::map<std::string, VarianceMode>{
            {"estimator", VarianceMode::Estimator},
            {"consistent", VarianceMode::Consistent},
            {"paper-literal", VarianceMode::PaperLiteral}}));
    app->add_option("--constraint", o.test.constraint, "LRT null constraint: rpv or paper-literal")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ConstraintForm>{
            {"rpv", ConstraintForm::Rpv}, {"paper-literal", ConstraintForm::PaperLiteral}}));
    app->add_option("--rank-scope", o.test.rank_scope, "values ranked by the U statistic: positive or all")
        ->transform(CLI::CheckedTransformer(std::map<std::string, RankScope>{
            {"positive", RankScope::Positive}, {"all", RankScope::All}}));
}

const std::map<std::string, TestKind> kTestKinds{
    {"two-part", TestKind::TwoPart}, {"delta", TestKind::DeltaCI}, {"lrt", TestKind::LRT}};

json base_config(const Options& o) {
    json c = to_json(o.test);
    c["seed"] = o.seed;
    return c;
}

void emit(const AnalysisReport& rep, const Options& o, std::ostream& text_out) {
    const json doc = to_json(rep);
    text_out << render_text(doc);
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            throw InputError("cannot write report to '" + o.out + "'");
        }
        f << doc.dump(2) << '\n';
    }
}

void write_file_or_stdout(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot write '" + path + "'");
    }
    f << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Revenue-per-visit A/B testing: two-part test, Delta CI, likelihood ratio test, power"};
    app.require_subcommand(1);
    Options o;

    auto* two_part = app.add_subcommand("two-part", "two-part test on zero-clumped order values");
    add_common(two_part, o, true);

    auto* delta = app.add_subcommand("delta", "Delta-method confidence interval for the RPV difference");
    add_common(delta, o, true);

    auto* lrt_cmd = app.add_subcommand("lrt", "likelihood ratio test of equal RPV");
    add_common(lrt_cmd, o, true);

    auto* pipeline = app.add_subcommand("pipeline", "two-part test, then a parametric test if indeterminate");
    add_common(pipeline, o, true);
    pipeline->add_option("--followup", o.followup, "parametric follow-up: delta or lrt")
        ->transform(CLI::CheckedTransformer(std::map<std::string, TestKind>{{"delta", TestKind::DeltaCI}, {"lrt", TestKind::LRT}}));
    pipeline->add_option("--followup-data", o.followup_data, "fresh CSV for the follow-up test");

    auto* power = app.add_subcommand("power", "bootstrap power of a test at a given sample size");
    add_common(power, o, true);
    power->add_option("--test", o.test_kind, "two-part, delta or lrt")->transform(CLI::CheckedTransformer(kTestKinds));
    power->add_option("--n", o.n, "visits per group (default: control pilot size)");
    power->add_option("--replications", o.replications)->capture_default_str();
    power->add_option("--threads", o.threads)->capture_default_str()->check(CLI::PositiveNumber);

    auto* samplesize = app.add_subcommand("samplesize", "smallest per-group sample size reaching a target power");
    add_common(samplesize, o, true);
    samplesize->add_option("--test", o.test_kind, "two-part, delta or lrt")->transform(CLI::CheckedTransformer(kTestKinds));
    samplesize->add_option("--target-power", o.target_power)->capture_default_str()->check(CLI::Range(1e-9, 1.0 - 1e-9));
    samplesize->add_option("--n0", o.n0, "starting sample size (default: control pilot size)");
    samplesize->add_option("--resolution", o.resolution)->capture_default_str()->check(CLI::PositiveNumber);
    samplesize->add_option("--n-max", o.n_max)->capture_default_str();
    samplesize->add_option("--replications", o.replications)->capture_default_str();
    samplesize->add_option("--threads", o.threads)->capture_default_str()->check(CLI::PositiveNumber);

    auto* qq = app.add_subcommand("qq", "Q-Q plot data for log-normality of purchase values");
    add_common(qq, o, true);
    qq->add_option("--group", o.qq_group, "control, treatment or all")->check(CLI::IsMember({"control", "treatment", "all"}));
    qq->add_option("--plot", o.plot, "write theoretical_z,empirical_z CSV here (default: stdout)");

    auto* simulate = app.add_subcommand("simulate", "simulate a zero-inflated log-normal experiment");
    add_common(simulate, o, false);
    simulate->add_option("--r", o.r, "control conversion rate")->capture_default_str();
    simulate->add_option("--mu", o.mu, "control log-scale mean")->capture_default_str();
    simulate->add_option("--sigma2", o.sigma2, "control log-scale variance")->capture_default_str();
    simulate->add_option("--n", o.n_sim, "visits per group")->capture_default_str();
    simulate->add_option("--r-t", o.r_t, "treatment conversion rate (default: control)");
    simulate->add_option("--mu-t", o.mu_t, "treatment log-scale mean (default: control)");
    simulate->add_option("--sigma2-t", o.sigma2_t, "treatment log-scale variance (default: control)");
    simulate->add_option("--n-t", o.n_t, "treatment visits (default: --n)");
    simulate->add_option("--csv", o.csv, "write the simulated CSV here (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const ZiLogNormalParams pc{o.r, o.mu, o.sigma2};
            const ZiLogNormalParams pt{o.r_t.value_or(o.r), o.mu_t.value_or(o.mu), o.sigma2_t.value_or(o.sigma2)};
            const ExperimentData data = simulate_experiment(pc, o.n_sim, pt, o.n_t.value_or(o.n_sim), o.seed);
            AnalysisReport rep;
            rep.stages = {Stage::Simulate};
            rep.inputs_digest = io::digest(data);
            rep.config_echo = {{"seed", o.seed}, {"control", to_json(pc)}, {"treatment", to_json(pt)},
                               {"n_control", o.n_sim}, {"n_treatment", o.n_t.value_or(o.n_sim)}};
            rep.result["Simulate"] = {{"control", to_json(summarize(data.control()))},
                                      {"treatment", to_json(summarize(data.treatment()))}};
            rep.verdict = "simulated " + std::to_string(data.control().size() + data.treatment().size()) + " visits";
            write_file_or_stdout(o.csv, io::to_csv(data));
            // Keep stdout clean when it carries the CSV.
            emit(rep, o, o.csv.empty() ? std::cerr : std::cout);
            return 0;
        }

        const ExperimentData data = io::load_csv(o.input);

        if (two_part->parsed() || delta->parsed() || lrt_cmd->parsed()) {
            const Stage stage = two_part->parsed() ? Stage::TwoPart : delta->parsed() ? Stage::DeltaCI : Stage::LRT;
            AnalysisReport rep = single_stage_report(stage, data, o.test);
            rep.config_echo["seed"] = o.seed;
            emit(rep, o, std::cout);
        } else if (pipeline->parsed()) {
            std::optional<ExperimentData> second;
            if (!o.followup_data.empty()) {
                second = io::load_csv(o.followup_data);
            }
            AnalysisReport rep = run_pipeline(data, {o.test, o.followup}, second ? &*second : nullptr);
            rep.config_echo["seed"] = o.seed;
            emit(rep, o, std::cout);
        } else if (power->parsed()) {
            const std::size_t n = o.n == 0 ? data.control().size() : o.n;
            const PowerEstimate est = estimate_power(data, n, o.replications, o.test_kind, o.test, o.seed, o.threads);
            AnalysisReport rep;
            rep.stages = {Stage::Power};
            rep.inputs_digest = io::digest(data);
            rep.config_echo = base_config(o);
            rep.config_echo["test"] = to_string(o.test_kind);
            rep.config_echo["n_per_group"] = n;
            rep.config_echo["replications"] = o.replications;
            rep.result["Power"] = to_json(est);
            rep.verdict = "power " + std::to_string(est.power) + " at n = " + std::to_string(n) + " per group";
            if (est.degenerate > 0) {
                rep.warnings.push_back(std::to_string(est.degenerate) +
                                       " degenerate resamples counted as non-rejections");
            }
            emit(rep, o, std::cout);
        } else if (samplesize->parsed()) {
            SearchConfig search{o.n0, o.resolution, o.n_max, o.replications, o.threads};
            AnalysisReport rep;
            rep.stages = {Stage::SampleSize};
            rep.inputs_digest = io::digest(data);
            rep.config_echo = base_config(o);
            rep.config_echo["test"] = to_string(o.test_kind);
            rep.config_echo["target_power"] = o.target_power;
            rep.config_echo["n0"] = o.n0 == 0 ? data.control().size() : o.n0;
            rep.config_echo["resolution"] = o.resolution;
            rep.config_echo["n_max"] = o.n_max;
            rep.config_echo["replications"] = o.replications;
            const SampleSizePlan plan = find_sample_size(data, o.target_power, o.test_kind, o.test, o.seed, search);
            rep.result["SampleSize"] = to_json(plan);
            rep.verdict = "chosen n = " + std::to_string(plan.chosen_n) + " per group";
            rep.warn(plan.warnings);
            emit(rep, o, std::cout);
        } else if (qq->parsed()) {
            std::vector<double> values;
            if (o.qq_group != "treatment") {
                auto c = positives(data.control());
                values.insert(values.end(), c.begin(), c.end());
            }
            if (o.qq_group != "control") {
                auto t = positives(data.treatment());
                values.insert(values.end(), t.begin(), t.end());
            }
            const QQData result = qq_lognormal(values);
            std::ostringstream plot;
            io::write_qq_csv(result, plot);
            write_file_or_stdout(o.plot, plot.str());

            AnalysisReport rep;
            rep.stages = {Stage::QQ};
            rep.inputs_digest = io::digest(data);
            rep.config_echo = base_config(o);
            rep.config_echo["group"] = o.qq_group;
            rep.result["QQ"] = to_json(result);
            rep.verdict = "Q-Q correlation " + std::to_string(result.correlation) + " over " +
                          std::to_string(result.n) + " purchases; inspect the plot for systematic deviation";
            emit(rep, o, o.plot.empty() ? std::cerr : std::cout);
        }
    } catch (const rpvtest::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
