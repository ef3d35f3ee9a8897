#pragma once

#include <cstddef>
#include <span>

namespace histrisk {

struct RegressionRow {
    double error = 0.0;
    double duration = 0.0;  // days
    double level = 0.0;     // fraction, e.g. 0.95
};

struct RegressionSummary {
    double intercept = 0.0;
    double coef_duration = 0.0;
    double coef_level = 0.0;
    double r_squared = 0.0;
    double multiple_r = 0.0;
    double p_duration = 1.0;  // two-sided
    double p_level = 1.0;
    std::size_t observations = 0;
    std::size_t residual_df = 0;
};

// OLS of error on (1, duration, level). Throws InputError for fewer than four
// rows and SingularityError (naming the column) for a rank-deficient design.
RegressionSummary ols2(std::span<const RegressionRow> rows);

// P(T > t) for Student's t with df degrees of freedom.
double student_t_sf(double t, long df);

// I_x(a, b), the regularized incomplete beta function.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace histrisk
