#pragma once

// Parametric RPV-change tests under the zero-inflated log-normal model:
// a Delta-method confidence interval for RPV_t - RPV_c, and a likelihood
// ratio test of equal RPV whose null fit is found numerically.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rpvtest/core.hpp"
#include "rpvtest/distributions.hpp"

namespace rpvtest {

// ---------------------------------------------------------------------------
// Delta method
// ---------------------------------------------------------------------------

/*
 * How the per-visit variance of the RPV estimate is composed. All three are
 * AOV^2 * var_r + r^2 * var_aov with var_r = r(1 - r); they differ in var_aov
 * and in how AOV enters the first term.
 *
 *   Estimator     var_aov = AOV^2 (sigma2 + sigma2^2 / 2) / r. Delta-method
 *                 variance of exp(mu_hat + sigma2_hat / 2) per visit; AOV is
 *                 estimated from the r * n purchases only.
 *   Consistent    var_aov = (e^sigma2 - 1) e^(2 mu + sigma2), the variance of
 *                 one log-normal order value, scaled like the conversion term.
 *   PaperLiteral  as Consistent, but the first term uses e^(mu + sigma2 / 2)
 *                 instead of its square.
 *
 * Only Estimator reaches nominal coverage; the other two understate the AOV
 * term and are kept for comparison with published numbers.
 */
enum class VarianceMode { Estimator, Consistent, PaperLiteral };

inline const char* to_string(VarianceMode m) {
    switch (m) {
        case VarianceMode::Estimator: return "estimator";
        case VarianceMode::Consistent: return "consistent";
        case VarianceMode::PaperLiteral: return "paper-literal";
    }
    return "?";
}

/// The two inputs of the Delta composition, per visit.
struct DeltaInputs {
    double r = 0.0;
    double aov = 0.0;
    double var_r = 0.0;
    double var_aov = 0.0;
};

inline DeltaInputs delta_inputs(const ZiLogNormalParams& p, VarianceMode mode = VarianceMode::Estimator) {
    validate(p);
    if (p.is_boundary()) {
        throw BoundaryParamError("Delta variance needs 0 < r < 1 and sigma2 > 0");
    }
    const double aov2 = std::exp(2.0 * p.mu + p.sigma2);
    DeltaInputs in;
    in.r = p.r;
    in.aov = aov(p);
    in.var_r = p.r * (1.0 - p.r);
    if (mode == VarianceMode::Estimator) {
        in.var_aov = aov2 * (p.sigma2 + 0.5 * p.sigma2 * p.sigma2) / p.r;
    } else {
        in.var_aov = std::expm1(p.sigma2) * aov2;
    }
    return in;
}

/// Per-visit variance of the RPV estimate (sigma^2_RPV).
inline double delta_variance(const ZiLogNormalParams& p, VarianceMode mode = VarianceMode::Estimator) {
    const DeltaInputs in = delta_inputs(p, mode);
    const double first = mode == VarianceMode::PaperLiteral ? in.aov : in.aov * in.aov;
    return first * in.var_r + in.r * in.r * in.var_aov;
}

/// (1/n1 + 1/n2)^-1
inline double harmonic_rate(std::size_t n1, std::size_t n2) {
    if (n1 == 0 || n2 == 0) {
        throw InputError("harmonic_rate: sample sizes must be positive");
    }
    return 1.0 / (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
}

struct RpvEstimate {
    ZiLogNormalParams control;
    ZiLogNormalParams treatment;
    ZiLogNormalParams pooled;
    double rpv_control = 0.0;
    double rpv_treatment = 0.0;
    double diff = 0.0;
    double pooled_sigma2_rpv = 0.0;
    double h = 0.0;
    double critical = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alpha = 0.05;
    VarianceMode mode = VarianceMode::Estimator;
    bool significant = false;  ///< 0 lies outside [ci_low, ci_high]
    std::vector<std::string> warnings;
};

inline RpvEstimate delta_ci(const ExperimentData& data, double alpha = 0.05,
                            VarianceMode mode = VarianceMode::Estimator) {
    RpvEstimate est;
    est.alpha = alpha;
    est.mode = mode;
    est.critical = dist::two_sided_critical(alpha);

    est.control = fit_mle(summarize(data.control()));
    est.treatment = fit_mle(summarize(data.treatment()));
    est.pooled = fit_mle(summarize_pooled(data));
    for (const auto* p : {&est.control, &est.treatment}) {
        if (p->is_boundary()) {
            est.warnings.push_back("group fit on the parameter boundary (r = 1 or sigma2 = 0)");
        }
    }
    if (mode != VarianceMode::Estimator) {
        est.warnings.push_back(std::string("variance mode '") + to_string(mode) +
                               "' understates the AOV term; coverage is below nominal");
    }

    est.rpv_control = rpv(est.control);
    est.rpv_treatment = rpv(est.treatment);
    est.diff = est.rpv_treatment - est.rpv_control;
    est.pooled_sigma2_rpv = delta_variance(est.pooled, mode);
    est.h = harmonic_rate(data.treatment().size(), data.control().size());
    const double half = est.critical * std::sqrt(est.pooled_sigma2_rpv / est.h);
    est.ci_low = est.diff - half;
    est.ci_high = est.diff + half;
    est.significant = est.ci_low > 0.0 || est.ci_high < 0.0;
    return est;
}

// ---------------------------------------------------------------------------
// Likelihood
// ---------------------------------------------------------------------------

/// What the likelihood needs from one group.
struct GroupStats {
    double n = 0.0;
    double k = 0.0;
    double m = 0.0;         ///< purchases
    double log_mean = 0.0;  ///< mean of ln(order value) over purchases
    double log_var = 0.0;   ///< divisor m

    static GroupStats from(const GroupSummary& s) {
        GroupStats g;
        g.n = static_cast<double>(s.n);
        g.k = static_cast<double>(s.k);
        g.m = static_cast<double>(s.purchases());
        g.log_mean = s.log_mean.value_or(0.0);
        g.log_var = s.log_var.value_or(0.0);
        return g;
    }

    /// Sum over purchases of (ln y - mu)^2.
    double squared_residuals(double mu) const {
        const double d = log_mean - mu;
        return m * (log_var + d * d);
    }
};

/// Log-normal log-density summed over a group's purchases.
inline double lognormal_loglik(const GroupStats& g, double mu, double sigma2) {
    if (g.m == 0.0) {
        return 0.0;
    }
    if (!(sigma2 > 0.0)) {
        throw NumericalError("log-normal likelihood needs sigma2 > 0");
    }
    return -g.m * g.log_mean - 0.5 * g.m * std::log(2.0 * std::numbers::pi * sigma2) -
           g.squared_residuals(mu) / (2.0 * sigma2);
}

/// Binomial log-mass of k no-purchases out of n at no-purchase probability 1 - r.
inline double binomial_loglik(const GroupStats& g, double r) {
    const double log_choose = std::lgamma(g.n + 1.0) - std::lgamma(g.k + 1.0) - std::lgamma(g.m + 1.0);
    double out = log_choose;
    if (g.k > 0.0) {
        out += g.k * std::log1p(-r);
    }
    if (g.m > 0.0) {
        out += g.m * std::log(r);
    }
    if (!std::isfinite(out)) {
        throw NumericalError("binomial log-likelihood is not finite (data impossible under r = " +
                             std::to_string(r) + ")");
    }
    return out;
}

inline double group_loglik(const ZiLogNormalParams& p, const GroupStats& g) {
    const double out = binomial_loglik(g, p.r) + lognormal_loglik(g, p.mu, p.sigma2);
    if (!std::isfinite(out)) {
        throw NumericalError("log-likelihood is not finite");
    }
    return out;
}

inline double log_likelihood(const ZiLogNormalParams& control, const ZiLogNormalParams& treatment,
                             const GroupSummary& control_summary, const GroupSummary& treatment_summary) {
    return group_loglik(control, GroupStats::from(control_summary)) +
           group_loglik(treatment, GroupStats::from(treatment_summary));
}

// ---------------------------------------------------------------------------
// Constrained maximum likelihood
// ---------------------------------------------------------------------------

/// Scalar constraint that defines "equal revenue" under the null.
enum class ConstraintForm {
    Rpv,           ///< r_c exp(mu_c + sigma2_c/2) = r_t exp(mu_t + sigma2_t/2)
    PaperLiteral,  ///< (1 - r_c) mu_c = (1 - r_t) mu_t
};

inline const char* to_string(ConstraintForm c) { return c == ConstraintForm::Rpv ? "rpv" : "paper-literal"; }

/*
 * Two-group likelihood in the unconstrained coordinates
 *   theta = (logit r_c, mu_c, log sigma2_c, logit r_t, mu_t, log sigma2_t).
 * The objective is the negative log-likelihood divided by the total number of
 * visits, without the parameter-free constants.
 */
class TwoGroupModel {
public:
    using Vec = Eigen::Matrix<double, 6, 1>;
    using Mat = Eigen::Matrix<double, 6, 6>;

    TwoGroupModel(const GroupStats& control, const GroupStats& treatment, ConstraintForm form)
        : groups_{control, treatment}, form_(form), scale_(1.0 / (control.n + treatment.n)) {}

    static Vec to_theta(const ZiLogNormalParams& c, const ZiLogNormalParams& t) {
        Vec th;
        th << logit(c.r), c.mu, std::log(c.sigma2), logit(t.r), t.mu, std::log(t.sigma2);
        return th;
    }

    static ZiLogNormalParams params(const Vec& th, int group) {
        const int o = 3 * group;
        return {sigmoid(th[o]), th[o + 1], std::exp(th[o + 2])};
    }

    double scale() const noexcept { return scale_; }
    ConstraintForm form() const noexcept { return form_; }

    /// Negative scaled log-likelihood kernel.
    double objective(const Vec& th) const {
        double f = 0.0;
        for (int g = 0; g < 2; ++g) {
            const auto& s = groups_[g];
            const double a = th[3 * g], mu = th[3 * g + 1], ls = th[3 * g + 2];
            // k ln(1 - r) + m ln r with r = sigmoid(a), written to stay finite for large |a|
            const double binom = -s.k * softplus(a) - s.m * softplus(-a);
            const double ln = -0.5 * s.m * ls - 0.5 * s.squared_residuals(mu) * std::exp(-ls);
            f -= binom + ln;
        }
        return f * scale_;
    }

    Vec gradient(const Vec& th) const {
        Vec gr;
        for (int g = 0; g < 2; ++g) {
            const auto& s = groups_[g];
            const double r = sigmoid(th[3 * g]), mu = th[3 * g + 1], inv_s2 = std::exp(-th[3 * g + 2]);
            gr[3 * g] = -(s.m - s.n * r);
            gr[3 * g + 1] = -s.m * (s.log_mean - mu) * inv_s2;
            gr[3 * g + 2] = 0.5 * s.m - 0.5 * s.squared_residuals(mu) * inv_s2;
        }
        return gr * scale_;
    }

    Mat hessian(const Vec& th) const {
        Mat h = Mat::Zero();
        for (int g = 0; g < 2; ++g) {
            const auto& s = groups_[g];
            const double r = sigmoid(th[3 * g]), mu = th[3 * g + 1], inv_s2 = std::exp(-th[3 * g + 2]);
            const int o = 3 * g;
            h(o, o) = s.n * r * (1.0 - r);
            h(o + 1, o + 1) = s.m * inv_s2;
            h(o + 1, o + 2) = h(o + 2, o + 1) = s.m * (s.log_mean - mu) * inv_s2;
            h(o + 2, o + 2) = 0.5 * s.squared_residuals(mu) * inv_s2;
        }
        return h * scale_;
    }

    /// Constraint g(theta); zero on the null set.
    double constraint(const Vec& th) const {
        if (form_ == ConstraintForm::Rpv) {
            return log_rpv(th, 0) - log_rpv(th, 1);
        }
        return (1.0 - sigmoid(th[0])) * th[1] - (1.0 - sigmoid(th[3])) * th[4];
    }

    Vec constraint_gradient(const Vec& th) const {
        Vec gr;
        for (int g = 0; g < 2; ++g) {
            const double sign = g == 0 ? 1.0 : -1.0;
            const double r = sigmoid(th[3 * g]), mu = th[3 * g + 1];
            if (form_ == ConstraintForm::Rpv) {
                gr[3 * g] = sign * (1.0 - r);
                gr[3 * g + 1] = sign;
                gr[3 * g + 2] = sign * 0.5 * std::exp(th[3 * g + 2]);
            } else {
                gr[3 * g] = -sign * r * (1.0 - r) * mu;
                gr[3 * g + 1] = sign * (1.0 - r);
                gr[3 * g + 2] = 0.0;
            }
        }
        return gr;
    }

    Mat constraint_hessian(const Vec& th) const {
        Mat h = Mat::Zero();
        for (int g = 0; g < 2; ++g) {
            const double sign = g == 0 ? 1.0 : -1.0;
            const double r = sigmoid(th[3 * g]), mu = th[3 * g + 1];
            const int o = 3 * g;
            if (form_ == ConstraintForm::Rpv) {
                h(o, o) = -sign * r * (1.0 - r);
                h(o + 2, o + 2) = sign * 0.5 * std::exp(th[o + 2]);
            } else {
                h(o, o) = -sign * r * (1.0 - r) * (1.0 - 2.0 * r) * mu;
                h(o, o + 1) = h(o + 1, o) = -sign * r * (1.0 - r);
            }
        }
        return h;
    }

    /// Constraint violation on the natural scale: relative RPV gap, or relative p*mu gap.
    double relative_violation(const Vec& th) const {
        const ZiLogNormalParams c = params(th, 0), t = params(th, 1);
        if (form_ == ConstraintForm::Rpv) {
            return std::abs(rpv(c) - rpv(t)) / rpv(c);
        }
        const double lhs = (1.0 - c.r) * c.mu;
        return std::abs(lhs - (1.0 - t.r) * t.mu) / std::max(std::abs(lhs), 1e-300);
    }

    static double sigmoid(double a) {
        return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
    }

    static double logit(double r) { return std::log(r) - std::log1p(-r); }

private:
    // log(1 + e^x)
    static double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

    double log_rpv(const Vec& th, int g) const {
        const double a = th[3 * g];
        return -softplus(-a) + th[3 * g + 1] + 0.5 * std::exp(th[3 * g + 2]);
    }

    std::array<GroupStats, 2> groups_;
    ConstraintForm form_;
    double scale_;
};

struct FitOptions {
    ConstraintForm constraint = ConstraintForm::Rpv;
    /// Infinity norm of the scaled Lagrangian gradient at the returned point.
    double tolerance = 1e-9;
    /// Which theta coordinates are optimized; the rest stay at their starting values.
    std::array<bool, 6> free{true, true, true, true, true, true};
    int max_outer = 60;
    int max_inner = 200;
};

struct ConstrainedFit {
    ZiLogNormalParams control;
    ZiLogNormalParams treatment;
    /// Multiplier in  grad loglik = lambda * grad g  (g as in TwoGroupModel::constraint).
    double lambda = 0.0;
    double kkt_residual = 0.0;
    double constraint_violation = 0.0;  ///< relative, see TwoGroupModel::relative_violation
    int outer_iterations = 0;
    int newton_steps = 0;
};

namespace detail {

using Vec6 = TwoGroupModel::Vec;
using Mat6 = TwoGroupModel::Mat;

inline void apply_mask(Vec6& v, const std::array<bool, 6>& free) {
    for (int i = 0; i < 6; ++i) {
        if (!free[i]) {
            v[i] = 0.0;
        }
    }
}

inline void apply_mask(Mat6& m, const std::array<bool, 6>& free) {
    for (int i = 0; i < 6; ++i) {
        if (!free[i]) {
            m.row(i).setZero();
            m.col(i).setZero();
            m(i, i) = 1.0;
        }
    }
}

/// Newton direction on a possibly indefinite Hessian: shift the spectrum until Cholesky succeeds.
inline Vec6 regularized_newton_step(const Mat6& h, const Vec6& grad) {
    const double diag_scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-12);
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Mat6 shifted = h;
        shifted.diagonal().array() += shift;
        Eigen::LLT<Mat6> llt(shifted);
        if (llt.info() == Eigen::Success) {
            return -llt.solve(grad);
        }
        shift = shift == 0.0 ? 1e-10 * diag_scale : shift * 10.0;
    }
    return -grad;
}

}  // namespace detail

/*
 * Maximize the two-group log-likelihood subject to the equal-revenue
 * constraint, starting from (start_c, start_t) with lambda = 0.
 *
 * Augmented Lagrangian outer loop; each subproblem
 *     F(theta) + nu g(theta) + rho/2 g(theta)^2
 * is minimized by damped Newton with Armijo backtracking. Once the outer loop
 * has the constraint small, a few Newton steps on the full KKT system polish
 * the point to machine precision.
 */
inline ConstrainedFit fit_constrained(const GroupSummary& control, const GroupSummary& treatment,
                                      const ZiLogNormalParams& start_c, const ZiLogNormalParams& start_t,
                                      const FitOptions& opt = {}) {
    using detail::Mat6;
    using detail::Vec6;
    if (!(opt.tolerance > 0.0)) {
        throw InputError("fit_constrained: tolerance must be positive");
    }
    if (start_c.is_boundary() || start_t.is_boundary()) {
        throw BoundaryParamError("constrained fit needs interior starting parameters");
    }
    const TwoGroupModel model(GroupStats::from(control), GroupStats::from(treatment), opt.constraint);
    const auto& free = opt.free;

    Vec6 th = TwoGroupModel::to_theta(start_c, start_t);
    double nu = 0.0;

    auto lagrangian_gradient = [&](const Vec6& x, double mult) {
        Vec6 gr = model.gradient(x) + mult * model.constraint_gradient(x);
        detail::apply_mask(gr, free);
        return gr;
    };

    const double curvature = std::max(model.hessian(th).diagonal().cwiseAbs().maxCoeff(), 1e-8);
    double rho = 10.0 * curvature;
    double g = model.constraint(th);
    const double feasibility_target = 1e-12;

    ConstrainedFit fit;
    int outer = 0;
    for (; outer < opt.max_outer; ++outer) {
        if (std::abs(g) <= feasibility_target && lagrangian_gradient(th, nu).lpNorm<Eigen::Infinity>() <= opt.tolerance) {
            break;
        }

        auto merit = [&](const Vec6& x) {
            const double c = model.constraint(x);
            return model.objective(x) + nu * c + 0.5 * rho * c * c;
        };
        for (int it = 0; it < opt.max_inner; ++it) {
            const double c = model.constraint(th);
            const Vec6 cg = model.constraint_gradient(th);
            Vec6 grad = model.gradient(th) + (nu + rho * c) * cg;
            detail::apply_mask(grad, free);
            if (grad.lpNorm<Eigen::Infinity>() <= 0.1 * opt.tolerance) {
                break;
            }
            Mat6 h = model.hessian(th) + (nu + rho * c) * model.constraint_hessian(th) + rho * cg * cg.transpose();
            detail::apply_mask(h, free);
            Vec6 step = detail::regularized_newton_step(h, grad);
            detail::apply_mask(step, free);

            const double f0 = merit(th);
            const double slope = grad.dot(step);
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Vec6 cand = th + t * step;
                const double f1 = merit(cand);
                if (std::isfinite(f1) && f1 <= f0 + 1e-4 * t * slope) {
                    th = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            ++fit.newton_steps;
            if (!moved) {
                break;  // at the floating-point floor of this subproblem
            }
        }

        const double g_new = model.constraint(th);
        nu += rho * g_new;
        if (std::abs(g_new) > 0.25 * std::abs(g)) {
            rho *= 10.0;
        }
        g = g_new;

        // Close enough for the KKT Newton polish to take over.
        if (std::abs(g) <= 1e-6 && lagrangian_gradient(th, nu).lpNorm<Eigen::Infinity>() <= 1e-6) {
            break;
        }
    }
    fit.outer_iterations = outer;

    // Newton on the KKT system [H_L  dg; dg^T 0] [dx; dnu] = -[grad L; g].
    using Mat7 = Eigen::Matrix<double, 7, 7>;
    using Vec7 = Eigen::Matrix<double, 7, 1>;
    auto kkt_norm = [&](const Vec6& x, double mult) {
        return std::max(lagrangian_gradient(x, mult).lpNorm<Eigen::Infinity>(), std::abs(model.constraint(x)));
    };
    for (int it = 0; it < 20; ++it) {
        const double before = kkt_norm(th, nu);
        if (std::abs(model.constraint(th)) <= feasibility_target &&
            lagrangian_gradient(th, nu).lpNorm<Eigen::Infinity>() <= 0.01 * opt.tolerance) {
            break;
        }
        Mat6 hl = model.hessian(th) + nu * model.constraint_hessian(th);
        detail::apply_mask(hl, free);
        Vec6 cg = model.constraint_gradient(th);
        detail::apply_mask(cg, free);
        Mat7 kkt = Mat7::Zero();
        kkt.topLeftCorner<6, 6>() = hl;
        kkt.block<6, 1>(0, 6) = cg;
        kkt.block<1, 6>(6, 0) = cg.transpose();
        Vec7 rhs;
        rhs.head<6>() = -lagrangian_gradient(th, nu);
        rhs[6] = -model.constraint(th);
        const Vec7 d = kkt.fullPivLu().solve(rhs);
        if (!d.allFinite()) {
            break;
        }
        const Vec6 cand = th + d.head<6>();
        const double cand_nu = nu + d[6];
        if (!(kkt_norm(cand, cand_nu) < before)) {
            break;
        }
        th = cand;
        nu = cand_nu;
        ++fit.newton_steps;
    }

    fit.kkt_residual = lagrangian_gradient(th, nu).lpNorm<Eigen::Infinity>();
    fit.constraint_violation = model.relative_violation(th);
    const double g_final = std::abs(model.constraint(th));
    if (!th.allFinite() || fit.kkt_residual > opt.tolerance || fit.constraint_violation > 1e-8) {
        throw ConvergenceError("constrained fit did not converge", g_final, fit.kkt_residual);
    }
    fit.control = TwoGroupModel::params(th, 0);
    fit.treatment = TwoGroupModel::params(th, 1);
    // Fixed coordinates come back exactly as given, not through logit/exp round trips.
    const std::array<double*, 6> out{&fit.control.r, &fit.control.mu, &fit.control.sigma2,
                                     &fit.treatment.r, &fit.treatment.mu, &fit.treatment.sigma2};
    const std::array<double, 6> given{start_c.r, start_c.mu, start_c.sigma2, start_t.r, start_t.mu, start_t.sigma2};
    for (int i = 0; i < 6; ++i) {
        if (!free[i]) {
            *out[i] = given[i];
        }
    }
    // grad(-loglik * scale) + nu grad g = 0  =>  grad loglik = (nu / scale) grad g
    fit.lambda = nu / model.scale();
    return fit;
}

/// Constrained fit started from the closed-form unconstrained MLE of each group.
inline ConstrainedFit fit_constrained(const GroupSummary& control, const GroupSummary& treatment,
                                      const FitOptions& opt = {}) {
    const ZiLogNormalParams c = fit_mle(control);
    const ZiLogNormalParams t = fit_mle(treatment);
    return fit_constrained(control, treatment, c, t, opt);
}

struct LrtResult {
    ZiLogNormalParams control;  ///< unconstrained
    ZiLogNormalParams treatment;
    ZiLogNormalParams null_control;  ///< constrained
    ZiLogNormalParams null_treatment;
    double lambda = 0.0;
    double loglik_alternative = 0.0;
    double loglik_null = 0.0;
    double log_lr = 0.0;  ///< ln L(H0) - ln L(H1), <= 0 up to solver noise
    double stat = 0.0;    ///< -2 log_lr
    int df = 1;
    double p_value = 1.0;
    double alpha = 0.05;
    double critical = 0.0;  ///< chi-square(1) quantile at 1 - alpha
    bool reject = false;
    bool converged = false;
    double kkt_residual = 0.0;
    double constraint_violation = 0.0;
    ConstraintForm constraint = ConstraintForm::Rpv;
    std::vector<std::string> warnings;
};

inline LrtResult lrt(const ExperimentData& data, double alpha = 0.05, ConstraintForm form = ConstraintForm::Rpv) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("alpha must lie in (0,1)");
    }
    const GroupSummary sc = summarize(data.control());
    const GroupSummary st = summarize(data.treatment());

    LrtResult res;
    res.alpha = alpha;
    res.constraint = form;
    res.control = fit_mle(sc);
    res.treatment = fit_mle(st);
    if (res.control.is_boundary() || res.treatment.is_boundary()) {
        throw BoundaryParamError("likelihood ratio test needs 0 < r < 1 and sigma2 > 0 in both groups");
    }
    if (form == ConstraintForm::PaperLiteral) {
        res.warnings.push_back("paper-literal constraint (1-r) mu equality is not an equal-revenue hypothesis");
    }

    FitOptions opt;
    opt.constraint = form;
    const ConstrainedFit fit = fit_constrained(sc, st, res.control, res.treatment, opt);
    res.null_control = fit.control;
    res.null_treatment = fit.treatment;
    res.lambda = fit.lambda;
    res.kkt_residual = fit.kkt_residual;
    res.constraint_violation = fit.constraint_violation;
    res.converged = true;

    const GroupStats gc = GroupStats::from(sc), gt = GroupStats::from(st);
    res.loglik_alternative = group_loglik(res.control, gc) + group_loglik(res.treatment, gt);
    res.loglik_null = group_loglik(res.null_control, gc) + group_loglik(res.null_treatment, gt);

    // Difference taken on the kernel, where the large data-only constants cancel exactly.
    const TwoGroupModel model(gc, gt, form);
    const double kernel_alt = model.objective(TwoGroupModel::to_theta(res.control, res.treatment));
    const double kernel_null = model.objective(TwoGroupModel::to_theta(res.null_control, res.null_treatment));
    res.log_lr = -(kernel_null - kernel_alt) / model.scale();
    res.stat = -2.0 * res.log_lr;
    res.p_value = dist::chi2_sf(std::max(res.stat, 0.0), 1);
    res.critical = dist::chi2_quantile(1.0 - alpha, 1);
    res.reject = res.p_value < alpha;
    return res;
}

}  // namespace rpvtest
