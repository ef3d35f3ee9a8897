#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace histrisk {

// Which inf-based quantile a VaR is read from.
//   Largest:  q_a  = inf{x | P[X <= x] >  1 - a}
//   Smallest: q_a- = inf{x | P[X <= x] >= 1 - a}
enum class QuantileConvention { Largest, Smallest };

inline constexpr QuantileConvention kDefaultConvention = QuantileConvention::Smallest;

const char* to_string(QuantileConvention conv) noexcept;

// Confidence level alpha, strictly inside (0, 1).
class Level {
public:
    explicit Level(double alpha);

    double alpha() const noexcept { return alpha_; }
    double tail_probability() const noexcept { return 1.0 - alpha_; }

    friend bool operator==(Level, Level) = default;
    friend auto operator<=>(Level, Level) = default;

private:
    double alpha_;
};

// Non-empty sequence of finite returns, viewed as an empirical distribution
// with weight 1/n per observation.
class Sample {
public:
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    Sample shifted(double amount) const;
    Sample scaled(double factor) const;

private:
    std::vector<double> values_;
};

struct Outcome {
    double value = 0.0;
    double probability = 0.0;
};

// Finite distribution. Outcomes are stored sorted by value with equal values
// merged; probabilities must sum to one within 1e-12.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<Outcome> outcomes);

    static DiscreteDistribution point_mass(double value);
    // n equiprobable outcomes, one per sample value.
    static DiscreteDistribution empirical(const Sample& sample);

    std::span<const Outcome> outcomes() const noexcept { return outcomes_; }

    // Distribution of X + Y for X ~ *this and Y ~ other independent.
    DiscreteDistribution independent_sum(const DiscreteDistribution& other) const;

private:
    std::vector<Outcome> outcomes_;
};

// Zero-based order-statistic index of the selected quantile in a sorted
// sample of size n. n * (1 - alpha) is snapped to the nearest integer when it
// lies within 1e-9 of one, so decimal levels such as 0.9 behave as exact.
std::size_t quantile_rank(std::size_t n, Level level, QuantileConvention conv);

double largest_alpha_quantile(const Sample& sample, Level level);
double smallest_alpha_quantile(const Sample& sample, Level level);
double quantile(const Sample& sample, Level level, QuantileConvention conv);

// VaR_a(X) = -q_a(X) under the chosen convention.
double var(const Sample& sample, Level level, QuantileConvention conv = kDefaultConvention);

// TCE_a(X) = -E[X | X <= -VaR_a(X)], or with strict conditioning
// -E[X | X < -VaR_a(X)]. Empty conditioning set yields nullopt.
std::optional<double> tce(const Sample& sample, Level level,
                          QuantileConvention conv = kDefaultConvention, bool strict = false);

// Same measures on a window that is already sorted ascending. No validation
// beyond a non-empty check; used on the backtest hot path.
double var_sorted(std::span<const double> sorted, Level level, QuantileConvention conv);
std::optional<double> tce_sorted(std::span<const double> sorted, Level level,
                                 QuantileConvention conv, bool strict);

double var_discrete(const DiscreteDistribution& dist, Level level,
                    QuantileConvention conv = kDefaultConvention);
std::optional<double> tce_discrete(const DiscreteDistribution& dist, Level level,
                                   QuantileConvention conv = kDefaultConvention,
                                   bool strict = false);

inline constexpr std::array<double, 4> kAxiomLevelGrid{0.5, 0.9, 0.95, 0.99};

struct AxiomReport {
    bool translation_invariance = false;  // var(X + a) == var(X) - a
    bool positive_homogeneity = false;    // var(l X) == l var(X)
    bool monotone_in_level = false;       // var non-decreasing along the level grid
    bool monotonicity = false;            // X >= 0 implies var(X) <= 0 (vacuous otherwise)
    bool tce_dominates_var = false;       // tce >= var whenever tce exists

    bool all() const noexcept {
        return translation_invariance && positive_homogeneity && monotone_in_level &&
               monotonicity && tce_dominates_var;
    }
};

// Evaluates both sides of each identity directly; comparisons are exact.
AxiomReport axiom_report(const Sample& sample, Level level, QuantileConvention conv,
                         double shift, double scale,
                         std::span<const double> level_grid = kAxiomLevelGrid);

struct SubadditivityCheck {
    double combined = 0.0;  // rho(X1 + X2)
    double first = 0.0;     // rho(X1)
    double second = 0.0;    // rho(X2)
    bool holds = false;     // combined <= first + second
};

struct DiversificationReport {
    SubadditivityCheck var;
    std::optional<SubadditivityCheck> tce;  // absent if any of the three TCEs is undefined
};

// Subadditivity of VaR and TCE for two independent positions.
DiversificationReport subadditivity_check(const DiscreteDistribution& first,
                                          const DiscreteDistribution& second, Level level,
                                          QuantileConvention conv = kDefaultConvention);

}  // namespace histrisk
