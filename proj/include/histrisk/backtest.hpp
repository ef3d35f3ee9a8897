#pragma once

#include "histrisk/measures.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace histrisk {

using Date = std::chrono::year_month_day;

// Daily returns of one asset, strictly increasing in date.
class ReturnSeries {
public:
    ReturnSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> returns);

    const std::string& asset_id() const noexcept { return asset_id_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> returns() const noexcept { return returns_; }
    std::size_t size() const noexcept { return returns_.size(); }

private:
    std::string asset_id_;
    std::vector<Date> dates_;
    std::vector<double> returns_;
};

// One (duration, level) configuration of the historical estimator.
struct RiskSpec {
    std::size_t duration = 0;  // trailing window length in observations
    Level level{0.9};
    QuantileConvention convention = kDefaultConvention;
    bool strict_violation = true;  // violation: r < -VaR (strict) or r <= -VaR
    bool strict_tail = false;      // in-window TCE conditioning: X < -VaR instead of X <= -VaR

    void validate() const;

    // "250,95%"
    std::string label() const;
};

bool spec_less(const RiskSpec& a, const RiskSpec& b);

// The thirteen (duration, level) pairs of the study, in table order.
std::vector<RiskSpec> default_grid(QuantileConvention conv = kDefaultConvention,
                                   bool strict_violation = true);

struct Forecast {
    Date date;
    double var = 0.0;
    std::optional<double> tce;
};

// Forecast for every day t in [n, len) from the window of returns t-n .. t-1.
// Day t itself is never part of its own window.
std::vector<Forecast> rolling_var_forecasts(const ReturnSeries& series, const RiskSpec& spec);

struct VarBacktestRow {
    std::string asset_id;
    RiskSpec spec;
    std::size_t evaluation_days = 0;
    std::size_t violations = 0;
    double observed_rate = 0.0;
    // (observed_rate - (1 - alpha)) / (1 - alpha); negative means conservative.
    double relative_error = 0.0;
};

struct TceBacktestRow {
    std::string asset_id;
    RiskSpec spec;
    std::size_t blocks_total = 0;        // blocks that entered the rates
    std::size_t blocks_nonexistent = 0;  // blocks without a single violation
    std::size_t blocks_excluded = 0;     // violation days lacking a predicted TCE
    std::optional<double> nonexistence_rate;
    // Average over existent blocks of (mean violating return + mean predicted TCE);
    // negative means the prediction was not conservative enough.
    std::optional<double> mean_error;
};

VarBacktestRow var_backtest(const ReturnSeries& series, const RiskSpec& spec);

// Evaluation days [n, len) are cut into consecutive non-overlapping blocks of
// n days; a trailing partial block is dropped. Each day is judged against its
// own rolling forecast. Requires len >= 2n.
TceBacktestRow tce_backtest(const ReturnSeries& series, const RiskSpec& spec);

enum class BacktestTable { Var, Tce };

struct SkippedPair {
    std::string asset_id;
    RiskSpec spec;
    BacktestTable table = BacktestTable::Var;
    std::string reason;
};

struct SuiteReport {
    std::vector<std::string> assets;  // lexicographic
    std::vector<RiskSpec> specs;      // duration, then level ascending
    std::vector<VarBacktestRow> var_rows;
    std::vector<TceBacktestRow> tce_rows;
    std::vector<SkippedPair> skipped;

    const VarBacktestRow* find_var(const std::string& asset, const RiskSpec& spec) const;
    const TceBacktestRow* find_tce(const std::string& asset, const RiskSpec& spec) const;
};

// Runs every asset against every spec. Pairs whose series is too short are
// logged in `skipped` instead of failing. threads == 0 picks the hardware
// concurrency; the result does not depend on the thread count.
SuiteReport run_suite(std::span<const ReturnSeries> series_set, std::span<const RiskSpec> specs,
                      unsigned threads = 0);

}  // namespace histrisk
