#include "histrisk/stats.hpp"

#include "histrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace histrisk {

namespace {

constexpr double kPivotTolerance = 1e-10;
constexpr double kFractionTolerance = 1e-12;
constexpr int kFractionIterations = 300;
constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta (modified Lentz).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kFractionIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kFractionTolerance) return h;
    }
    return h;
}

double two_sided_p(double coefficient, double variance, double sigma2, std::size_t df) {
    const double se = std::sqrt(std::max(0.0, variance * sigma2));
    if (se == 0.0) return coefficient == 0.0 ? 1.0 : 0.0;
    const double t = std::abs(coefficient / se);
    if (!std::isfinite(t)) return 0.0;
    return std::clamp(2.0 * student_t_sf(t, static_cast<long>(df)), 0.0, 1.0);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta needs positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta argument must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, long df) {
    if (df < 1) {
        std::ostringstream msg;
        msg << "t distribution needs df >= 1, got " << df;
        throw InputError(msg.str());
    }
    if (!std::isfinite(t)) throw InputError("t statistic must be finite");
    const double nu = static_cast<double>(df);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
    return t >= 0.0 ? tail : 1.0 - tail;
}

RegressionSummary ols2(std::span<const RegressionRow> rows) {
    const std::size_t n = rows.size();
    if (n < 4) {
        std::ostringstream msg;
        msg << "insufficient rows: regression on duration and level needs at least 4, got " << n;
        throw InputError(msg.str());
    }
    for (const auto& r : rows) {
        if (!std::isfinite(r.error) || !std::isfinite(r.duration) || !std::isfinite(r.level)) {
            throw InputError("regression rows must be finite");
        }
    }

    const double count = static_cast<double>(n);
    double mean_d = 0.0, mean_l = 0.0, mean_y = 0.0;
    double raw_dd = 0.0, raw_ll = 0.0;
    for (const auto& r : rows) {
        mean_d += r.duration;
        mean_l += r.level;
        mean_y += r.error;
        raw_dd += r.duration * r.duration;
        raw_ll += r.level * r.level;
    }
    mean_d /= count;
    mean_l /= count;
    mean_y /= count;

    double sdd = 0.0, sll = 0.0, sdl = 0.0, sdy = 0.0, sly = 0.0, syy = 0.0;
    for (const auto& r : rows) {
        const double d = r.duration - mean_d;
        const double l = r.level - mean_l;
        const double y = r.error - mean_y;
        sdd += d * d;
        sll += l * l;
        sdl += d * l;
        sdy += d * y;
        sly += l * y;
        syy += y * y;
    }

    // A regressor that is constant duplicates the intercept column.
    if (!(sdd > kPivotTolerance * raw_dd)) {
        throw SingularityError("singular design: column 'duration' is constant", "duration");
    }
    if (!(sll > kPivotTolerance * raw_ll)) {
        throw SingularityError("singular design: column 'level' is constant", "level");
    }
    // Second pivot of the unit-diagonal (correlation) matrix.
    const double corr = sdl / std::sqrt(sdd * sll);
    if (1.0 - corr * corr < kPivotTolerance) {
        throw SingularityError("singular design: column 'level' is collinear with 'duration'", "level");
    }

    RegressionSummary out;
    out.observations = n;
    out.residual_df = n - 3;

    const bool constant_response = std::all_of(
        rows.begin(), rows.end(), [&](const RegressionRow& r) { return r.error == rows.front().error; });
    if (constant_response) {
        out.intercept = rows.front().error;
        return out;
    }

    const double det = sdd * sll - sdl * sdl;
    out.coef_duration = (sll * sdy - sdl * sly) / det;
    out.coef_level = (sdd * sly - sdl * sdy) / det;
    out.intercept = mean_y - out.coef_duration * mean_d - out.coef_level * mean_l;

    double sse = 0.0;
    for (const auto& r : rows) {
        const double fitted = out.intercept + out.coef_duration * r.duration + out.coef_level * r.level;
        sse += (r.error - fitted) * (r.error - fitted);
    }
    out.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
    out.multiple_r = std::sqrt(out.r_squared);

    const double sigma2 = sse / static_cast<double>(out.residual_df);
    out.p_duration = two_sided_p(out.coef_duration, sll / det, sigma2, out.residual_df);
    out.p_level = two_sided_p(out.coef_level, sdd / det, sigma2, out.residual_df);
    return out;
}

}  // namespace histrisk
