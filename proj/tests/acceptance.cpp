// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "histrisk/backtest.hpp"
#include "histrisk/cli.hpp"
#include "histrisk/ingestion.hpp"
#include "histrisk/measures.hpp"
#include "histrisk/report.hpp"
#include "histrisk/stats.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace histrisk;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    double limit_seconds;
    std::function<Verdict()> body;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

Verdict c1_loans() {
    const Level level(0.95);
    const DiscreteDistribution asset({{2.0, 0.95}, {-1.0, 0.05}});
    const DiscreteDistribution loan_1m({{0.0, 0.96}, {-1.0, 0.04}});
    const DiscreteDistribution loan_2m({{0.0, 0.96}, {-2.0, 0.04}});
    const double v_asset = var_discrete(asset, level, QuantileConvention::Smallest);
    const double v_conc = var_discrete(loan_2m, level);
    const double v_div = var_discrete(loan_1m.independent_sum(loan_1m), level);
    Verdict o;
    o.ok = v_asset == 1.0 && v_conc == 0.0 && v_div == 1.0;
    o.detail = fmt("asset %.6f, concentrated %.6f, diversified %.6f", v_asset, v_conc, v_div);
    return o;
}

Verdict c2_quantile_oracle() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> length(1, 200);
    std::uniform_int_distribution<int> coarse(-8, 8);
    std::normal_distribution<double> fine(0.0, 0.02);
    const int denominators[] = {10, 20, 40, 100, 1000};
    int mismatches = 0;
    const int cases = 2000;
    for (int trial = 0; trial < cases; ++trial) {
        std::vector<double> v(length(rng));
        for (auto& x : v) x = trial % 2 ? fine(rng) : coarse(rng) * 0.01;
        const int den = denominators[trial % 5];
        const oracle::RationalLevel lvl{std::uniform_int_distribution<int>(1, den - 1)(rng), den};
        const Sample s(v);
        const Level level(lvl.alpha());
        if (largest_alpha_quantile(s, level) != oracle::scan_quantile(v, lvl, true)) ++mismatches;
        if (smallest_alpha_quantile(s, level) != oracle::scan_quantile(v, lvl, false)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches"};
}

Verdict c3_axioms() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> value(-500, 500);
    std::uniform_int_distribution<int> shift(-100, 100);
    std::uniform_int_distribution<int> scale(0, 20);
    std::uniform_int_distribution<int> length(1, 120);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(length(rng));
        for (auto& x : v) x = value(rng);
        const Sample s(v);
        const double a = shift(rng);
        const double l = scale(rng);
        for (QuantileConvention conv : {QuantileConvention::Largest, QuantileConvention::Smallest}) {
            for (double alpha : kAxiomLevelGrid) {
                const Level level(alpha);
                const double base = var(s, level, conv);
                if (var(s.shifted(a), level, conv) != base - a) ++failures;
                if (var(s.scaled(l), level, conv) != l * base) ++failures;
                for (bool strict : {false, true}) {
                    const auto t = tce(s, level, conv, strict);
                    if (t && *t < base) ++failures;
                }
            }
            for (std::size_t i = 1; i < kAxiomLevelGrid.size(); ++i) {
                if (var(s, Level(kAxiomLevelGrid[i - 1]), conv) > var(s, Level(kAxiomLevelGrid[i]), conv)) ++failures;
            }
        }
    }
    return {failures == 0, "1000 samples x 2 conventions x 4 levels, " + std::to_string(failures) + " failures"};
}

Verdict c4_binomial_calibration() {
    const auto series = oracle::iid_series("iid", 50000, std::normal_distribution<double>(0.0, 0.01), 4);
    RiskSpec spec;
    spec.duration = 100;
    spec.level = Level(0.90);
    const auto row = var_backtest(series, spec);
    const double se = std::sqrt(0.10 * 0.90 / static_cast<double>(row.evaluation_days));
    const double z = (row.observed_rate - 0.10) / se;
    Verdict o;
    o.ok = std::abs(z) <= 3.0 && std::abs(row.relative_error) <= 0.04;
    o.detail = fmt("rate %.5f (z = %+.2f), relative error %+.4f", row.observed_rate, z, row.relative_error);
    return o;
}

Verdict c5_nonexistence_calibration() {
    // Seed fixed in advance; both series drawn from one stream.
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 0.01);
    struct Case {
        std::size_t n;
        double alpha;
        double table_lo, table_hi;
    };
    const Case cases[] = {{100, 0.99, 0.289, 0.433}, {20, 0.95, 0.320, 0.348}};
    Verdict o;
    for (const auto& c : cases) {
        const std::size_t blocks = 400;
        std::vector<double> r(c.n * (blocks + 1));
        for (auto& x : r) x = g(rng);
        RiskSpec spec;
        spec.duration = c.n;
        spec.level = Level(c.alpha);
        const auto row = tce_backtest(oracle::make_series("iid", r), spec);
        const double target = std::pow(c.alpha, static_cast<double>(c.n));
        const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(row.blocks_total));
        const double rate = row.nonexistence_rate.value_or(NAN);
        const double z = (rate - target) / se;
        const bool ok = row.blocks_total >= 400 && std::abs(z) <= 3.0;
        o.ok = o.ok && ok;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += "(" + spec.label() + ") " + std::to_string(row.blocks_total) + " blocks, " +
                    fmt("rate %.4f vs %.4f (z = %+.2f)", rate, target, z) +
                    fmt(", reference range %.3f-%.3f", c.table_lo, c.table_hi) + (ok ? "" : " [out of band]");
    }
    return o;
}

Verdict c6_tce_error_magnitude() {
    const std::size_t n = 250;
    const auto series = oracle::iid_series("iid", n * 401, std::normal_distribution<double>(0.0, 0.01), 6);
    RiskSpec spec;
    spec.duration = n;
    spec.level = Level(0.90);
    const auto row = tce_backtest(series, spec);
    Verdict o;
    o.ok = row.mean_error && std::abs(*row.mean_error) <= 0.005;
    o.detail = row.mean_error ? fmt("mean error %+.6f over %.0f blocks", *row.mean_error,
                                    static_cast<double>(row.blocks_total - row.blocks_nonexistent))
                              : "mean error absent";
    return o;
}

Verdict c7_regression() {
    Verdict o;
    std::vector<std::string> notes;

    // Planted exact model on the default grid.
    std::vector<RegressionRow> planted;
    for (const auto& spec : default_grid()) {
        const double d = static_cast<double>(spec.duration);
        const double l = spec.level.alpha();
        planted.push_back({-0.4 + 0.0007 * d + 0.25 * l, d, l});
    }
    const auto fit = ols2(planted);
    const bool planted_ok = std::abs(fit.multiple_r - 1.0) <= 1e-9 && std::abs(fit.intercept + 0.4) <= 1e-9 &&
                            std::abs(fit.coef_duration - 0.0007) <= 1e-9 && std::abs(fit.coef_level - 0.25) <= 1e-9;
    notes.push_back(std::string("planted model ") + (planted_ok ? "exact" : "NOT recovered"));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::uniform_int_distribution<int> duration(2, 600);
    std::uniform_real_distribution<double> level(0.5, 0.999);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<RegressionRow> rows(4 + trial % 60);
        for (auto& r : rows) r = {noise(rng), static_cast<double>(duration(rng)), level(rng)};
        const auto s = ols2(rows);
        const auto ref = oracle::normal_equations(rows);
        worst = std::max({worst, std::abs(s.intercept - ref.intercept), std::abs(s.coef_duration - ref.duration),
                          std::abs(s.coef_level - ref.level)});
    }
    const bool oracle_ok = worst <= 1e-9;
    notes.push_back(fmt("normal-equations max diff %.2e", worst));

    double cauchy = 0.0;
    for (double t = -30.0; t <= 30.0; t += 0.01) {
        cauchy = std::max(cauchy, std::abs(student_t_sf(t, 1) - (0.5 - std::atan(t) / std::numbers::pi)));
    }
    const bool cauchy_ok = cauchy <= 1e-12;
    notes.push_back(fmt("df=1 max diff %.2e", cauchy));

    double normal = 0.0, at = 0.0;
    for (double t = 0.0; t <= 6.0 + 1e-9; t += 0.01) {
        const double d = std::abs(student_t_sf(t, 60) - 0.5 * std::erfc(t / std::numbers::sqrt2));
        if (d > normal) normal = d, at = t;
    }
    const bool normal_ok = normal <= 1e-3;
    notes.push_back(fmt("df=60 vs normal tail max diff %.5f at t=%.2f", normal, at) + (normal_ok ? "" : " [> 1e-3]"));

    o.ok = planted_ok && oracle_ok && cauchy_ok && normal_ok;
    for (const auto& n : notes) o.detail += (o.detail.empty() ? "" : ", ") + n;
    return o;
}

Verdict c8_end_to_end() {
    const fs::path root = fs::temp_directory_path() / "histrisk_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    cli::SuiteConfig config;
    for (int i = 0; i < 8; ++i) {
        std::mt19937_64 rng(800 + i);
        std::student_t_distribution<double> shocks(4.0);
        const auto dates = oracle::consecutive_dates(1600);
        std::ostringstream csv;
        csv.precision(17);
        csv << "date,price\n";
        double price = 50.0 + 10.0 * i;
        for (const auto& d : dates) {
            csv << format_iso_date(d) << ',' << price << '\n';
            price *= std::exp(0.008 * shocks(rng));
        }
        const fs::path path = root / ("asset" + std::to_string(i) + ".csv");
        std::ofstream(path, std::ios::binary) << csv.str();
        config.price_paths.push_back(path);
    }

    std::ostringstream sink;
    Verdict o;
    for (const char* run : {"run1", "run2"}) {
        config.out_dir = root / run;
        if (cli::cmd_backtest(config, sink, sink) != cli::kOk) return {false, "backtest failed: " + sink.str()};
    }

    for (const char* name : {cli::kNonexistenceTable, cli::kVarErrorTable, cli::kTceErrorTable}) {
        const std::string file = std::string(name) + ".csv";
        const std::string a = read_text_file(root / "run1" / file);
        const std::string b = read_text_file(root / "run2" / file);
        const auto table = parse_error_table(a);
        const bool shape = table.assets.size() == 8 && table.rows.size() == 13;
        if (a != b || !shape) {
            o.ok = false;
            o.detail += file + (a != b ? " differs; " : " has wrong shape; ");
        }
    }
    if (o.ok) o.detail = "3 tables byte-identical, 13 rows x 8 assets each";
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"C1", "loan-example exactness", 0.001, c1_loans},
        {"C2", "quantile oracle equivalence", 1.0, c2_quantile_oracle},
        {"C3", "axiom suite", 1.0, c3_axioms},
        {"C4", "binomial VaR calibration", 5.0, c4_binomial_calibration},
        {"C5", "TCE nonexistence calibration", 30.0, c5_nonexistence_calibration},
        {"C6", "TCE error magnitude", 30.0, c6_tce_error_magnitude},
        {"C7", "regression and t distribution", 1.0, c7_regression},
        {"C8", "end-to-end determinism", 60.0, c8_end_to_end},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.limit_seconds;
        const bool pass = o.ok && in_time;
        if (!pass) ++failed;
        std::printf("[%s] %s %s: %s (%.3f s, limit %g s%s)\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                    o.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", too slow");
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
