#include "histrisk/backtest.hpp"

#include "histrisk/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace histrisk {

namespace {

std::string date_text(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string percent_text(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", alpha * 100.0);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

void require_length(const ReturnSeries& series, std::size_t minimum, const char* what) {
    if (series.size() < minimum) {
        std::ostringstream msg;
        msg << what << " for asset '" << series.asset_id() << "' needs at least " << minimum
            << " returns, got " << series.size();
        throw InputError(msg.str());
    }
}

bool is_violation(double r, const Forecast& f, bool strict) {
    const double threshold = -f.var;
    return strict ? r < threshold : r <= threshold;
}

VarBacktestRow var_row_from(const ReturnSeries& series, const RiskSpec& spec,
                            const std::vector<Forecast>& forecasts) {
    VarBacktestRow row;
    row.asset_id = series.asset_id();
    row.spec = spec;
    row.evaluation_days = forecasts.size();
    const auto returns = series.returns();
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if (is_violation(returns[spec.duration + i], forecasts[i], spec.strict_violation)) {
            ++row.violations;
        }
    }
    const double expected = spec.level.tail_probability();
    row.observed_rate = static_cast<double>(row.violations) / static_cast<double>(row.evaluation_days);
    row.relative_error = (row.observed_rate - expected) / expected;
    return row;
}

TceBacktestRow tce_row_from(const ReturnSeries& series, const RiskSpec& spec,
                            const std::vector<Forecast>& forecasts) {
    TceBacktestRow row;
    row.asset_id = series.asset_id();
    row.spec = spec;
    const std::size_t n = spec.duration;
    const std::size_t blocks = forecasts.size() / n;
    const auto returns = series.returns();

    double error_sum = 0.0;
    std::size_t existent = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        double realized = 0.0;
        double predicted = 0.0;
        std::size_t violations = 0;
        bool missing_prediction = false;
        for (std::size_t i = b * n; i < (b + 1) * n; ++i) {
            const double r = returns[n + i];
            if (!is_violation(r, forecasts[i], spec.strict_violation)) continue;
            ++violations;
            if (!forecasts[i].tce) {
                missing_prediction = true;
                continue;
            }
            realized += r;
            predicted += *forecasts[i].tce;
        }
        if (violations == 0) {
            ++row.blocks_total;
            ++row.blocks_nonexistent;
        } else if (missing_prediction) {
            ++row.blocks_excluded;
        } else {
            ++row.blocks_total;
            ++existent;
            const double count = static_cast<double>(violations);
            error_sum += realized / count + predicted / count;
        }
    }
    if (row.blocks_total > 0) {
        row.nonexistence_rate =
            static_cast<double>(row.blocks_nonexistent) / static_cast<double>(row.blocks_total);
    }
    if (existent > 0) row.mean_error = error_sum / static_cast<double>(existent);
    return row;
}

}  // namespace

ReturnSeries::ReturnSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> returns)
    : asset_id_(std::move(asset_id)), dates_(std::move(dates)), returns_(std::move(returns)) {
    if (asset_id_.empty()) throw InputError("asset id must not be empty");
    if (dates_.size() != returns_.size()) {
        std::ostringstream msg;
        msg << "asset '" << asset_id_ << "': " << dates_.size() << " dates but " << returns_.size()
            << " returns";
        throw InputError(msg.str());
    }
    if (returns_.empty()) throw InputError("asset '" + asset_id_ + "': no returns");
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (!dates_[i].ok()) throw InputError("asset '" + asset_id_ + "': invalid calendar date");
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw InputError("asset '" + asset_id_ + "': dates not strictly increasing (" +
                             date_text(dates_[i - 1]) + " then " + date_text(dates_[i]) + ")");
        }
        if (!std::isfinite(returns_[i])) {
            throw InputError("asset '" + asset_id_ + "': non-finite return on " + date_text(dates_[i]));
        }
    }
}

void RiskSpec::validate() const {
    if (duration < 2) {
        std::ostringstream msg;
        msg << "spec duration must be at least 2, got " << duration;
        throw InputError(msg.str());
    }
}

std::string RiskSpec::label() const {
    return std::to_string(duration) + "," + percent_text(level.alpha()) + "%";
}

bool spec_less(const RiskSpec& a, const RiskSpec& b) {
    return std::tuple(a.duration, a.level.alpha(), a.convention, a.strict_violation, a.strict_tail) <
           std::tuple(b.duration, b.level.alpha(), b.convention, b.strict_violation, b.strict_tail);
}

std::vector<RiskSpec> default_grid(QuantileConvention conv, bool strict_violation) {
    static constexpr std::pair<std::size_t, double> kGrid[] = {
        {10, 0.90},  {20, 0.90},  {20, 0.95},  {50, 0.90},  {100, 0.90},
        {100, 0.95}, {100, 0.99}, {250, 0.90}, {250, 0.95}, {250, 0.99},
        {500, 0.90}, {500, 0.95}, {500, 0.99},
    };
    std::vector<RiskSpec> grid;
    for (const auto& [n, alpha] : kGrid) {
        RiskSpec spec;
        spec.duration = n;
        spec.level = Level(alpha);
        spec.convention = conv;
        spec.strict_violation = strict_violation;
        grid.push_back(spec);
    }
    return grid;
}

std::vector<Forecast> rolling_var_forecasts(const ReturnSeries& series, const RiskSpec& spec) {
    spec.validate();
    const std::size_t n = spec.duration;
    require_length(series, n + 1, "rolling forecast");

    const auto returns = series.returns();
    const auto dates = series.dates();
    std::vector<double> window(returns.begin(), returns.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(window.begin(), window.end());

    std::vector<Forecast> out;
    out.reserve(series.size() - n);
    for (std::size_t t = n; t < series.size(); ++t) {
        out.push_back({dates[t], var_sorted(window, spec.level, spec.convention),
                       tce_sorted(window, spec.level, spec.convention, spec.strict_tail)});
        // Slide: drop day t - n, admit day t.
        window.erase(std::lower_bound(window.begin(), window.end(), returns[t - n]));
        window.insert(std::upper_bound(window.begin(), window.end(), returns[t]), returns[t]);
    }
    return out;
}

VarBacktestRow var_backtest(const ReturnSeries& series, const RiskSpec& spec) {
    return var_row_from(series, spec, rolling_var_forecasts(series, spec));
}

TceBacktestRow tce_backtest(const ReturnSeries& series, const RiskSpec& spec) {
    spec.validate();
    require_length(series, 2 * spec.duration, "TCE backtest");
    return tce_row_from(series, spec, rolling_var_forecasts(series, spec));
}

const VarBacktestRow* SuiteReport::find_var(const std::string& asset, const RiskSpec& spec) const {
    for (const auto& row : var_rows) {
        if (row.asset_id == asset && !spec_less(row.spec, spec) && !spec_less(spec, row.spec)) return &row;
    }
    return nullptr;
}

const TceBacktestRow* SuiteReport::find_tce(const std::string& asset, const RiskSpec& spec) const {
    for (const auto& row : tce_rows) {
        if (row.asset_id == asset && !spec_less(row.spec, spec) && !spec_less(spec, row.spec)) return &row;
    }
    return nullptr;
}

SuiteReport run_suite(std::span<const ReturnSeries> series_set, std::span<const RiskSpec> specs,
                      unsigned threads) {
    if (series_set.empty()) throw InputError("backtest suite needs at least one series");
    if (specs.empty()) throw InputError("backtest suite needs at least one spec");

    std::map<std::string, const ReturnSeries*> by_asset;
    for (const auto& s : series_set) {
        if (!by_asset.emplace(s.asset_id(), &s).second) {
            throw InputError("duplicate asset id '" + s.asset_id() + "'");
        }
    }

    SuiteReport report;
    for (const auto& [id, _] : by_asset) report.assets.push_back(id);
    report.specs.assign(specs.begin(), specs.end());
    for (const auto& spec : report.specs) spec.validate();
    std::sort(report.specs.begin(), report.specs.end(), spec_less);
    report.specs.erase(std::unique(report.specs.begin(), report.specs.end(),
                                   [](const RiskSpec& a, const RiskSpec& b) {
                                       return !spec_less(a, b) && !spec_less(b, a);
                                   }),
                       report.specs.end());

    // One task per (asset, spec), laid out in final row order.
    struct Task {
        const ReturnSeries* series;
        const RiskSpec* spec;
        std::optional<VarBacktestRow> var;
        std::optional<TceBacktestRow> tce;
        std::exception_ptr failure;
    };
    std::vector<Task> tasks;
    for (const auto& [id, series] : by_asset) {
        for (const auto& spec : report.specs) tasks.push_back({series, &spec, {}, {}, {}});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            Task& task = tasks[i];
            try {
                const std::size_t n = task.spec->duration;
                if (task.series->size() <= n) continue;
                const auto forecasts = rolling_var_forecasts(*task.series, *task.spec);
                task.var = var_row_from(*task.series, *task.spec, forecasts);
                if (task.series->size() >= 2 * n) {
                    task.tce = tce_row_from(*task.series, *task.spec, forecasts);
                }
            } catch (...) {
                task.failure = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }

    for (auto& task : tasks) {
        if (task.failure) std::rethrow_exception(task.failure);
        const std::size_t len = task.series->size();
        const std::size_t n = task.spec->duration;
        if (task.var) {
            report.var_rows.push_back(std::move(*task.var));
        } else {
            report.skipped.push_back({task.series->asset_id(), *task.spec, BacktestTable::Var,
                                      "needs " + std::to_string(n + 1) + " returns, has " +
                                          std::to_string(len)});
        }
        if (task.tce) {
            report.tce_rows.push_back(std::move(*task.tce));
        } else {
            report.skipped.push_back({task.series->asset_id(), *task.spec, BacktestTable::Tce,
                                      "needs " + std::to_string(2 * n) + " returns, has " +
                                          std::to_string(len)});
        }
    }
    return report;
}

}  // namespace histrisk
