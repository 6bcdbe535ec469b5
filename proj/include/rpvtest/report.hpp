#pragma once

// Structured analysis reports. Each run produces one JSON document; the text
// rendering is computed from that document alone.

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rpvtest/core.hpp"
#include "rpvtest/diagnostics.hpp"
#include "rpvtest/io.hpp"
#include "rpvtest/parametric.hpp"
#include "rpvtest/power.hpp"
#include "rpvtest/rank_tests.hpp"

namespace rpvtest {

using json = nlohmann::ordered_json;

enum class Stage { TwoPart, DeltaCI, LRT, Power, SampleSize, QQ, Simulate };

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::TwoPart: return "TwoPart";
        case Stage::DeltaCI: return "DeltaCI";
        case Stage::LRT: return "LRT";
        case Stage::Power: return "Power";
        case Stage::SampleSize: return "SampleSize";
        case Stage::QQ: return "QQ";
        case Stage::Simulate: return "Simulate";
    }
    return "?";
}

struct AnalysisReport {
    std::vector<Stage> stages;
    std::string inputs_digest;
    json config_echo = json::object();
    json result = json::object();  ///< keyed by stage name
    std::string verdict;
    std::vector<std::string> warnings;

    void warn(const std::vector<std::string>& ws) { warnings.insert(warnings.end(), ws.begin(), ws.end()); }
};

inline json to_json(const ZiLogNormalParams& p) {
    return {{"r", p.r}, {"mu", p.mu}, {"sigma2", p.sigma2}, {"aov", aov(p)}, {"rpv", rpv(p)}};
}

inline json to_json(const TestConfig& c) {
    return {{"alpha", c.alpha},
            {"threshold", to_string(c.threshold)},
            {"rank_scope", to_string(c.rank_scope)},
            {"variance_mode", to_string(c.variance)},
            {"constraint", to_string(c.constraint)}};
}

inline json to_json(const TwoPartResult& r) {
    json j;
    j["z_p"] = r.z_p;
    j["z_u"] = r.z_u ? json(*r.z_u) : json(nullptr);
    j["L"] = r.L;
    j["alpha"] = r.alpha;
    j["component_threshold"] = r.component_threshold;
    j["L_threshold"] = r.L_threshold;
    j["chi2_2_quantile"] = dist::chi2_quantile(1.0 - r.alpha, 2);
    j["fixed_L_threshold"] = kPaperLThreshold;
    j["reject"] = r.reject;
    j["r_verdict"] = to_string(r.r_verdict);
    j["aov_verdict"] = r.aov_verdict ? json(to_string(*r.aov_verdict)) : json(nullptr);
    j["decision"] = to_string(r.decision);
    j["degenerate"] = r.degenerate;
    return j;
}

inline json to_json(const RpvEstimate& e) {
    return {{"rpv_control", e.rpv_control},
            {"rpv_treatment", e.rpv_treatment},
            {"diff", e.diff},
            {"pooled_sigma2_rpv", e.pooled_sigma2_rpv},
            {"h", e.h},
            {"critical", e.critical},
            {"ci_low", e.ci_low},
            {"ci_high", e.ci_high},
            {"alpha", e.alpha},
            {"variance_mode", to_string(e.mode)},
            {"significant", e.significant},
            {"control", to_json(e.control)},
            {"treatment", to_json(e.treatment)},
            {"pooled", to_json(e.pooled)}};
}

inline json to_json(const LrtResult& r) {
    return {{"unconstrained", {{"control", to_json(r.control)}, {"treatment", to_json(r.treatment)}}},
            {"constrained", {{"control", to_json(r.null_control)}, {"treatment", to_json(r.null_treatment)}}},
            {"constraint", to_string(r.constraint)},
            {"lambda", r.lambda},
            {"loglik_alternative", r.loglik_alternative},
            {"loglik_null", r.loglik_null},
            {"log_lr", r.log_lr},
            {"stat", r.stat},
            {"df", r.df},
            {"p_value", r.p_value},
            {"alpha", r.alpha},
            {"critical", r.critical},
            {"reject", r.reject},
            {"converged", r.converged},
            {"kkt_residual", r.kkt_residual},
            {"constraint_violation", r.constraint_violation}};
}

inline json to_json(const PowerEstimate& p) {
    return {{"n_per_group", p.n_per_group}, {"replications", p.replications}, {"rejections", p.rejections},
            {"degenerate", p.degenerate},   {"power", p.power},               {"power_ci_low", p.power_ci_low},
            {"power_ci_high", p.power_ci_high}, {"test_kind", to_string(p.test_kind)}, {"alpha", p.alpha},
            {"seed", p.seed}};
}

inline json to_json(const SampleSizePlan& plan) {
    json trace = json::array();
    for (const auto& [n, est] : plan.search_trace) {
        trace.push_back(to_json(est));
    }
    return {{"target_power", plan.target_power}, {"chosen_n", plan.chosen_n}, {"search_trace", trace}};
}

inline json to_json(const GroupSummary& s) {
    return {{"n", s.n},
            {"k", s.k},
            {"p_hat", s.p_hat},
            {"r_hat", s.r_hat},
            {"log_mean", s.log_mean ? json(*s.log_mean) : json(nullptr)},
            {"log_var", s.log_var ? json(*s.log_var) : json(nullptr)}};
}

/// QQ summary; the point cloud itself goes to the plot CSV.
inline json to_json(const QQData& qq) { return {{"n", qq.n}, {"correlation", qq.correlation}}; }

inline json to_json(const AnalysisReport& r) {
    json stages = json::array();
    for (Stage s : r.stages) {
        stages.push_back(to_string(s));
    }
    return {{"stage", stages},
            {"inputs_digest", r.inputs_digest},
            {"config_echo", r.config_echo},
            {"result", r.result},
            {"verdict", r.verdict},
            {"warnings", r.warnings}};
}

/// Human-readable rendering of a report document.
inline std::string render_text(const json& doc) {
    std::ostringstream out;
    std::string stage_line;
    for (const auto& s : doc.at("stage")) {
        stage_line += (stage_line.empty() ? "" : " -> ") + s.get<std::string>();
    }
    out << "stages:  " << stage_line << '\n';
    out << "digest:  " << doc.at("inputs_digest").get<std::string>() << '\n';
    out << "config:  " << doc.at("config_echo").dump() << '\n';
    for (const auto& [name, body] : doc.at("result").items()) {
        out << '[' << name << "]\n";
        for (const auto& [key, value] : body.items()) {
            out << "  " << key << " = " << value.dump() << '\n';
        }
    }
    out << "verdict: " << doc.at("verdict").get<std::string>() << '\n';
    for (const auto& w : doc.at("warnings")) {
        out << "warning: " << w.get<std::string>() << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Stage runners
// ---------------------------------------------------------------------------

inline std::string two_part_verdict(const TwoPartResult& r) {
    std::ostringstream s;
    s << to_string(r.decision) << ": L = " << r.L << (r.reject ? " > " : " <= ") << r.L_threshold;
    if (r.reject) {
        s << "; conversion " << to_string(r.r_verdict) << ", AOV "
          << (r.aov_verdict ? to_string(*r.aov_verdict) : "undefined");
    }
    if (r.decision == Decision::Indeterminate) {
        s << "; a parametric follow-up test is needed";
    }
    return s.str();
}

inline std::string delta_verdict(const RpvEstimate& e) {
    std::ostringstream s;
    if (e.significant) {
        s << (e.diff > 0.0 ? "Positive" : "Negative") << ": RPV difference " << e.diff << ", CI [" << e.ci_low << ", "
          << e.ci_high << "] excludes 0";
    } else {
        s << "NoChange: RPV difference " << e.diff << ", CI [" << e.ci_low << ", " << e.ci_high << "] contains 0";
    }
    return s.str();
}

inline std::string lrt_verdict(const LrtResult& r) {
    std::ostringstream s;
    const double diff = rpv(r.treatment) - rpv(r.control);
    if (r.reject) {
        s << (diff > 0.0 ? "Positive" : "Negative") << ": LR statistic " << r.stat << ", p = " << r.p_value << " < "
          << r.alpha;
    } else {
        s << "NoChange: LR statistic " << r.stat << ", p = " << r.p_value << " >= " << r.alpha;
    }
    return s.str();
}

inline void add_two_part(AnalysisReport& rep, const ExperimentData& data, const TestConfig& cfg,
                         TwoPartResult* out = nullptr) {
    const TwoPartResult r = two_part_test(data, cfg.two_part());
    rep.stages.push_back(Stage::TwoPart);
    rep.result[to_string(Stage::TwoPart)] = to_json(r);
    rep.verdict = two_part_verdict(r);
    rep.warn(r.warnings);
    if (r.degenerate) {
        rep.warnings.push_back("degenerate group in two-part test");
    }
    if (out) {
        *out = r;
    }
}

inline void add_delta(AnalysisReport& rep, const ExperimentData& data, const TestConfig& cfg) {
    const RpvEstimate e = delta_ci(data, cfg.alpha, cfg.variance);
    rep.stages.push_back(Stage::DeltaCI);
    rep.result[to_string(Stage::DeltaCI)] = to_json(e);
    rep.verdict = delta_verdict(e);
    rep.warn(e.warnings);
}

inline void add_lrt(AnalysisReport& rep, const ExperimentData& data, const TestConfig& cfg) {
    const LrtResult r = lrt(data, cfg.alpha, cfg.constraint);
    rep.stages.push_back(Stage::LRT);
    rep.result[to_string(Stage::LRT)] = to_json(r);
    rep.verdict = lrt_verdict(r);
    rep.warn(r.warnings);
}

inline AnalysisReport single_stage_report(Stage stage, const ExperimentData& data, const TestConfig& cfg) {
    AnalysisReport rep;
    rep.inputs_digest = io::digest(data);
    rep.config_echo = to_json(cfg);
    switch (stage) {
        case Stage::TwoPart: add_two_part(rep, data, cfg); break;
        case Stage::DeltaCI: add_delta(rep, data, cfg); break;
        case Stage::LRT: add_lrt(rep, data, cfg); break;
        default: throw InputError("single_stage_report: not a test stage");
    }
    return rep;
}

struct PipelineConfig {
    TestConfig test;
    TestKind followup = TestKind::DeltaCI;  ///< DeltaCI or LRT
};

/*
 * Two-part test first; stop if it is determinate. Otherwise run the
 * configured parametric test, on `followup_data` when provided. A follow-up
 * on the same data as the first stage is flagged, since valid inference needs
 * a fresh sample.
 */
inline AnalysisReport run_pipeline(const ExperimentData& data, const PipelineConfig& cfg,
                                   const ExperimentData* followup_data = nullptr) {
    if (cfg.followup == TestKind::TwoPart) {
        throw InputError("pipeline follow-up must be delta or lrt");
    }
    AnalysisReport rep;
    rep.inputs_digest = io::digest(data);
    rep.config_echo = to_json(cfg.test);
    rep.config_echo["followup"] = to_string(cfg.followup);

    TwoPartResult first;
    add_two_part(rep, data, cfg.test, &first);
    if (first.decision != Decision::Indeterminate) {
        return rep;
    }

    const ExperimentData& second = followup_data ? *followup_data : data;
    const std::string second_digest = io::digest(second);
    rep.config_echo["followup_inputs_digest"] = second_digest;
    if (second_digest == rep.inputs_digest) {
        rep.warnings.push_back(
            "follow-up test reuses the data set of the two-part test; collect a new data set for valid inference");
    }
    if (cfg.followup == TestKind::DeltaCI) {
        add_delta(rep, second, cfg.test);
    } else {
        add_lrt(rep, second, cfg.test);
    }
    return rep;
}

}  // namespace rpvtest
