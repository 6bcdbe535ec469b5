#pragma once

// Normal and chi-square distribution functions used for every threshold and
// p-value in the library. All of them are closed-form or rational
// approximations so thresholds are reproducible on any IEEE-754 platform.

#include <cmath>
#include <limits>
#include <numbers>

#include "rpvtest/errors.hpp"

namespace rpvtest::dist {

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Upper tail 1 - Phi(z), accurate far into the tail.
inline double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/*
 * Inverse of the standard normal CDF.
 *
 * Wichura's algorithm AS 241 (PPND16). Three rational approximations cover
 * |p - 0.5| <= 0.425, the tail down to exp(-25), and the far tail. The
 * published relative accuracy is about 1e-16.
 *
 * p == 0 and p == 1 map to -inf and +inf; p outside [0,1] or NaN returns NaN.
 */
inline double normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (p == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p == 1.0) {
        return std::numeric_limits<double>::infinity();
    }

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                 4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                 2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }

    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

/// Two-sided critical value: Phi^-1(1 - alpha/2). 1.959964 at alpha = 0.05.
inline double two_sided_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("alpha must lie in (0,1)");
    }
    return normal_quantile(1.0 - 0.5 * alpha);
}

// Chi-square with one or two degrees of freedom is all the tests need; both
// have closed forms in terms of erfc / exp.

/// Upper tail P(X > x) for X ~ chi-square(df), df in {1, 2}.
inline double chi2_sf(double x, int df) {
    if (std::isnan(x)) {
        return x;
    }
    if (x <= 0.0) {
        return 1.0;
    }
    switch (df) {
        case 1:
            return std::erfc(std::sqrt(0.5 * x));
        case 2:
            return std::exp(-0.5 * x);
        default:
            throw InputError("chi2_sf: only df 1 and 2 are supported");
    }
}

inline double chi2_cdf(double x, int df) {
    if (x <= 0.0) {
        return 0.0;
    }
    switch (df) {
        case 1:
            return std::erf(std::sqrt(0.5 * x));
        case 2:
            return -std::expm1(-0.5 * x);
        default:
            throw InputError("chi2_cdf: only df 1 and 2 are supported");
    }
}

/// Quantile of chi-square(df) at probability p, df in {1, 2}.
inline double chi2_quantile(double p, int df) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw InputError("chi2_quantile: p must lie in [0,1)");
    }
    switch (df) {
        case 1: {
            const double z = normal_quantile(0.5 + 0.5 * p);
            return z * z;
        }
        case 2:
            return -2.0 * std::log1p(-p);
        default:
            throw InputError("chi2_quantile: only df 1 and 2 are supported");
    }
}

}  // namespace rpvtest::dist
