#include "histrisk/measures.hpp"

#include "histrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace histrisk {

namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kRankSnapTolerance = 1e-9;

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Mean taken about the anchor so that a set of values all <= anchor never
// averages above it after rounding.
double mean_about(std::span<const double> values, double anchor) {
    double excess = 0.0;
    for (double v : values) excess += v - anchor;
    return anchor + excess / static_cast<double>(values.size());
}

double discrete_quantile(const DiscreteDistribution& dist, Level level, QuantileConvention conv) {
    const double threshold = level.tail_probability();
    double cumulative = 0.0;
    for (const Outcome& o : dist.outcomes()) {
        cumulative += o.probability;
        const bool reached = conv == QuantileConvention::Largest
                                 ? cumulative > threshold + kProbabilityTolerance
                                 : cumulative >= threshold - kProbabilityTolerance;
        if (reached) return o.value;
    }
    return dist.outcomes().back().value;
}

}  // namespace

const char* to_string(QuantileConvention conv) noexcept {
    return conv == QuantileConvention::Largest ? "largest" : "smallest";
}

Level::Level(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream msg;
        msg << "level must lie strictly inside (0, 1), got " << alpha;
        throw InputError(msg.str());
    }
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InputError("sample must contain at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "sample value at index " << i << " is not finite";
            throw InputError(msg.str());
        }
    }
}

Sample Sample::shifted(double amount) const {
    std::vector<double> out(values_);
    for (double& v : out) v += amount;
    return Sample(std::move(out));
}

Sample Sample::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= factor;
    return Sample(std::move(out));
}

DiscreteDistribution::DiscreteDistribution(std::vector<Outcome> outcomes) {
    if (outcomes.empty()) throw InputError("distribution must have at least one outcome");
    std::map<double, double> merged;
    double total = 0.0;
    for (const Outcome& o : outcomes) {
        if (!std::isfinite(o.value)) throw InputError("distribution outcome value is not finite");
        if (!(o.probability >= 0.0 && o.probability <= 1.0)) {
            std::ostringstream msg;
            msg << "outcome probability must lie in [0, 1], got " << o.probability;
            throw InputError(msg.str());
        }
        total += o.probability;
        if (o.probability > 0.0) merged[o.value] += o.probability;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "outcome probabilities must sum to 1, got " << total;
        throw InputError(msg.str());
    }
    outcomes_.reserve(merged.size());
    for (const auto& [value, probability] : merged) outcomes_.push_back({value, probability});
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
    return DiscreteDistribution({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::empirical(const Sample& sample) {
    const double weight = 1.0 / static_cast<double>(sample.size());
    std::vector<Outcome> outcomes;
    outcomes.reserve(sample.size());
    for (double v : sample.values()) outcomes.push_back({v, weight});
    return DiscreteDistribution(std::move(outcomes));
}

DiscreteDistribution DiscreteDistribution::independent_sum(const DiscreteDistribution& other) const {
    std::vector<Outcome> joint;
    joint.reserve(outcomes_.size() * other.outcomes_.size());
    for (const Outcome& a : outcomes_) {
        for (const Outcome& b : other.outcomes_) {
            joint.push_back({a.value + b.value, a.probability * b.probability});
        }
    }
    return DiscreteDistribution(std::move(joint));
}

std::size_t quantile_rank(std::size_t n, Level level, QuantileConvention conv) {
    if (n == 0) throw InputError("quantile of an empty sample");
    double threshold = static_cast<double>(n) * level.tail_probability();
    const double nearest = std::round(threshold);
    if (std::abs(threshold - nearest) <= kRankSnapTolerance * std::max(1.0, threshold)) {
        threshold = nearest;
    }
    // Largest: first k with (k + 1) / n >  1 - alpha  ->  k = floor(n (1 - alpha)).
    // Smallest: first k with (k + 1) / n >= 1 - alpha ->  k = ceil(n (1 - alpha)) - 1.
    double rank = conv == QuantileConvention::Largest ? std::floor(threshold)
                                                      : std::ceil(threshold) - 1.0;
    rank = std::clamp(rank, 0.0, static_cast<double>(n - 1));
    return static_cast<std::size_t>(rank);
}

double quantile(const Sample& sample, Level level, QuantileConvention conv) {
    const auto sorted = sorted_copy(sample.values());
    return sorted[quantile_rank(sorted.size(), level, conv)];
}

double largest_alpha_quantile(const Sample& sample, Level level) {
    return quantile(sample, level, QuantileConvention::Largest);
}

double smallest_alpha_quantile(const Sample& sample, Level level) {
    return quantile(sample, level, QuantileConvention::Smallest);
}

double var(const Sample& sample, Level level, QuantileConvention conv) {
    return var_sorted(sorted_copy(sample.values()), level, conv);
}

std::optional<double> tce(const Sample& sample, Level level, QuantileConvention conv, bool strict) {
    return tce_sorted(sorted_copy(sample.values()), level, conv, strict);
}

double var_sorted(std::span<const double> sorted, Level level, QuantileConvention conv) {
    return 0.0 - sorted[quantile_rank(sorted.size(), level, conv)];
}

std::optional<double> tce_sorted(std::span<const double> sorted, Level level,
                                 QuantileConvention conv, bool strict) {
    const double q = sorted[quantile_rank(sorted.size(), level, conv)];
    const auto end = strict ? std::lower_bound(sorted.begin(), sorted.end(), q)
                            : std::upper_bound(sorted.begin(), sorted.end(), q);
    if (end == sorted.begin()) return std::nullopt;
    return -mean_about(std::span<const double>(sorted.begin(), end), q);
}

double var_discrete(const DiscreteDistribution& dist, Level level, QuantileConvention conv) {
    return 0.0 - discrete_quantile(dist, level, conv);
}

std::optional<double> tce_discrete(const DiscreteDistribution& dist, Level level,
                                   QuantileConvention conv, bool strict) {
    const double q = discrete_quantile(dist, level, conv);
    double mass = 0.0;
    double excess = 0.0;
    for (const Outcome& o : dist.outcomes()) {
        if (strict ? !(o.value < q) : !(o.value <= q)) break;
        mass += o.probability;
        excess += o.probability * (o.value - q);
    }
    if (mass <= 0.0) return std::nullopt;
    return -(q + excess / mass);
}

AxiomReport axiom_report(const Sample& sample, Level level, QuantileConvention conv,
                         double shift, double scale, std::span<const double> level_grid) {
    if (!std::isfinite(shift)) throw InputError("axiom shift must be finite");
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw InputError("axiom scale must be a finite non-negative number");
    }

    AxiomReport report;
    const double base = var(sample, level, conv);
    report.translation_invariance = var(sample.shifted(shift), level, conv) == base - shift;
    report.positive_homogeneity = var(sample.scaled(scale), level, conv) == scale * base;

    std::vector<double> grid(level_grid.begin(), level_grid.end());
    std::sort(grid.begin(), grid.end());
    report.monotone_in_level = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (var(sample, Level(grid[i - 1]), conv) > var(sample, Level(grid[i]), conv)) {
            report.monotone_in_level = false;
        }
    }

    const auto values = sample.values();
    const bool nonnegative = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
    report.monotonicity = !nonnegative || base <= 0.0;

    const auto tail = tce(sample, level, conv, false);
    report.tce_dominates_var = !tail || *tail >= base;
    return report;
}

DiversificationReport subadditivity_check(const DiscreteDistribution& first,
                                          const DiscreteDistribution& second, Level level,
                                          QuantileConvention conv) {
    const DiscreteDistribution combined = first.independent_sum(second);

    DiversificationReport report;
    report.var.combined = var_discrete(combined, level, conv);
    report.var.first = var_discrete(first, level, conv);
    report.var.second = var_discrete(second, level, conv);
    report.var.holds = report.var.combined <= report.var.first + report.var.second;

    const auto tc = tce_discrete(combined, level, conv);
    const auto t1 = tce_discrete(first, level, conv);
    const auto t2 = tce_discrete(second, level, conv);
    if (tc && t1 && t2) {
        report.tce = SubadditivityCheck{*tc, *t1, *t2, *tc <= *t1 + *t2};
    }
    return report;
}

}  // namespace histrisk
