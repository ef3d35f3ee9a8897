#include "histrisk/cli.hpp"

#include "histrisk/error.hpp"
#include "histrisk/measures.hpp"
#include "histrisk/stats.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>

namespace histrisk::cli {

namespace fs = std::filesystem;

namespace {

std::vector<ReturnSeries> load_inputs(const SuiteConfig& config) {
    std::vector<ReturnSeries> series;
    auto load = [&](const fs::path& path, bool prices) {
        const std::string id = path.stem().string();
        try {
            const std::string text = read_text_file(path);
            if (prices) {
                series.push_back(to_returns(parse_prices(text, id), config.method));
            } else {
                series.push_back(parse_returns(text, id));
            }
        } catch (const InputError& e) {
            throw InputError(path.string() + ": " + e.what());
        }
    };
    for (const auto& p : config.price_paths) load(p, true);
    for (const auto& p : config.return_paths) load(p, false);
    return series;
}

void write_atomically(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> staged;
    try {
        for (const auto& [path, content] : files) {
            fs::path tmp = path;
            tmp += ".tmp";
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            staged.push_back(tmp);
            if (!out) throw InputError("cannot write '" + tmp.string() + "'");
            out << content;
            out.close();
            if (!out) throw InputError("failed writing '" + tmp.string() + "'");
        }
        for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);
    } catch (...) {
        std::error_code ignored;
        for (const auto& tmp : staged) fs::remove(tmp, ignored);
        throw;
    }
}

void print_summary(std::ostream& out, const std::string& name, std::size_t rows,
                   const RegressionSummary& s) {
    out << "[" << name << "] rows=" << rows << '\n'
        << "  multiple_r     " << format_fixed(s.multiple_r) << '\n'
        << "  intercept      " << format_fixed(s.intercept, true) << '\n'
        << "  coef_duration  " << format_fixed(s.coef_duration, true) << '\n'
        << "  coef_level     " << format_fixed(s.coef_level, true) << '\n'
        << "  p_duration     " << format_fixed(s.p_duration) << '\n'
        << "  p_level        " << format_fixed(s.p_level) << '\n'
        << "  residual_df    " << s.residual_df << '\n';
}

std::vector<RegressionRow> collect_rows(const ErrorTable& table, const std::vector<std::size_t>& columns) {
    std::vector<RegressionRow> rows;
    for (const auto& r : table.rows) {
        for (std::size_t c : columns) {
            if (r.cells[c]) rows.push_back({*r.cells[c], r.duration, r.level});
        }
    }
    return rows;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

void SuiteConfig::validate() const {
    if (price_paths.empty() && return_paths.empty()) {
        throw InputError("at least one --prices or --returns input is required");
    }
    for (const auto& spec : specs) spec.validate();
}

RiskSpec parse_spec_argument(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("spec '" + text + "' is not of the form <n>:<alpha>");
    std::size_t n = 0;
    double alpha = 0.0;
    const char* begin = text.data();
    const char* mid = begin + colon;
    const char* end = begin + text.size();
    auto [p1, e1] = std::from_chars(begin, mid, n);
    auto [p2, e2] = std::from_chars(mid + 1, end, alpha);
    if (e1 != std::errc{} || p1 != mid || e2 != std::errc{} || p2 != end || colon == 0) {
        throw InputError("spec '" + text + "' is not of the form <n>:<alpha>");
    }
    RiskSpec spec;
    spec.duration = n;
    spec.level = Level(alpha);
    spec.validate();
    return spec;
}

int cmd_backtest(const SuiteConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        const auto series = load_inputs(config);

        std::vector<RiskSpec> specs = config.specs.empty() ? default_grid() : config.specs;
        for (auto& spec : specs) {
            spec.convention = config.convention;
            spec.strict_violation = config.strict_violation;
            spec.strict_tail = config.strict_tail;
        }
        const SuiteReport report = run_suite(series, specs, config.threads);

        ReportMetadata meta;
        meta.tool_version = kVersion;
        meta.input_kind = config.price_paths.empty() ? "returns"
                          : config.return_paths.empty() ? "prices"
                                                         : "prices+returns";
        meta.method = config.method;
        meta.convention = config.convention;
        meta.strict_violation = config.strict_violation;
        meta.strict_tail = config.strict_tail;

        const std::string ext = file_extension(config.format);
        fs::create_directories(config.out_dir);
        const std::vector<std::pair<fs::path, std::string>> files = {
            {config.out_dir / (std::string(kNonexistenceTable) + ext),
             render_nonexistence_table(report, config.format)},
            {config.out_dir / (std::string(kVarErrorTable) + ext), render_var_error_table(report, config.format)},
            {config.out_dir / (std::string(kTceErrorTable) + ext), render_tce_error_table(report, config.format)},
            {config.out_dir / (std::string(kMetadataFile) + ext), render_metadata(meta, report, config.format)},
        };
        write_atomically(files);

        for (const auto& s : report.skipped) {
            err << "warning: skipped " << s.asset_id << ' ' << s.spec.label() << ' '
                << (s.table == BacktestTable::Var ? "var" : "tce") << " (" << s.reason << ")\n";
        }
        out << "wrote " << files.size() << " files to " << config.out_dir.string() << " ("
            << report.assets.size() << " assets x " << report.specs.size() << " specs)\n";
        return kOk;
    });
}

int cmd_regress(const RegressConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ErrorTable table = parse_error_table(read_text_file(config.table_path));

        std::map<std::string, std::size_t> column_of;
        for (std::size_t i = 0; i < table.assets.size(); ++i) column_of[table.assets[i]] = i;
        auto column = [&](const std::string& asset) {
            const auto it = column_of.find(asset);
            if (it == column_of.end()) throw InputError("asset '" + asset + "' is not a column of the table");
            return it->second;
        };

        std::vector<std::string> selected = config.assets.empty() ? table.assets : config.assets;
        std::vector<std::size_t> all_columns;
        for (const auto& a : selected) all_columns.push_back(column(a));

        auto regress = [&](const std::string& name, const std::vector<std::size_t>& columns) {
            const auto rows = collect_rows(table, columns);
            try {
                print_summary(out, name, rows.size(), ols2(rows));
            } catch (const InputError& e) {
                throw InputError(name + ": " + e.what());
            }
        };

        for (std::size_t i = 0; i < selected.size(); ++i) regress(selected[i], {all_columns[i]});
        if (config.groups.empty() && selected.size() > 1) regress("pooled:all", all_columns);
        for (const auto& [name, members] : config.groups) {
            std::vector<std::size_t> columns;
            for (const auto& m : members) columns.push_back(column(m));
            regress("pooled:" + name, columns);
        }
        return kOk;
    });
}

int cmd_axioms(std::ostream& out) {
    using QC = QuantileConvention;
    const Level level95(0.95);

    const DiscreteDistribution asset({{2.0, 0.95}, {-1.0, 0.05}});
    const DiscreteDistribution heavy_asset({{2.0, 0.95}, {-1.0, 0.01}, {-1000.0, 0.04}});
    out << "Two assets without initial cost (US$ millions), 95% level\n"
        << "  asset A: +2 w.p. 0.95, -1 w.p. 0.05\n"
        << "    VaR(A) = " << format_fixed(var_discrete(asset, level95, QC::Smallest))
        << "  [smallest quantile; largest quantile gives "
        << format_fixed(var_discrete(asset, level95, QC::Largest)) << "]\n"
        << "    TCE(A) = " << format_fixed(*tce_discrete(asset, level95, QC::Smallest)) << '\n'
        << "  asset B: +2 w.p. 0.95, -1 w.p. 0.01, -1000 w.p. 0.04\n"
        << "    VaR(B) = " << format_fixed(var_discrete(heavy_asset, level95, QC::Smallest)) << '\n'
        << "    TCE(B) = " << format_fixed(*tce_discrete(heavy_asset, level95, QC::Smallest)) << "\n\n";

    const DiscreteDistribution loan_1m({{0.0, 0.96}, {-1.0, 0.04}});
    const DiscreteDistribution loan_2m({{0.0, 0.96}, {-2.0, 0.04}});
    const DiversificationReport div = subadditivity_check(loan_1m, loan_1m, level95, kDefaultConvention);
    out << "Loans with default probability 0.04, pairwise independent (US$ millions), 95% level\n"
        << "  VaR(concentrated) = " << format_fixed(var_discrete(loan_2m, level95)) << '\n'
        << "  TCE(concentrated) = " << format_fixed(*tce_discrete(loan_2m, level95)) << '\n'
        << "  VaR(diversified) = " << format_fixed(div.var.combined) << '\n'
        << "  TCE(diversified) = " << format_fixed(div.tce ? div.tce->combined : 0.0) << '\n'
        << "  VaR(single $1M loan) = " << format_fixed(div.var.first) << '\n'
        << "  VaR subadditive: " << flag(div.var.holds) << " (" << format_fixed(div.var.combined)
        << " vs " << format_fixed(div.var.first) << " + " << format_fixed(div.var.second) << ")\n";
    if (div.tce) {
        out << "  TCE subadditive: " << flag(div.tce->holds) << " (" << format_fixed(div.tce->combined)
            << " vs " << format_fixed(div.tce->first) << " + " << format_fixed(div.tce->second) << ")\n";
    }
    out << '\n';

    const Sample sample({-0.03, -0.02, -0.01, 0.00, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06});
    const Level level90(0.9);
    out << "Axiom checks on a 10-point return sample, 90% level, shift 0.01, scale 2\n";
    for (QC conv : {QC::Smallest, QC::Largest}) {
        const AxiomReport r = axiom_report(sample, level90, conv, 0.01, 2.0);
        out << "  [" << to_string(conv) << " quantile] VaR = " << format_fixed(var(sample, level90, conv)) << '\n'
            << "    translation invariance: " << flag(r.translation_invariance) << '\n'
            << "    positive homogeneity: " << flag(r.positive_homogeneity) << '\n'
            << "    monotone in level: " << flag(r.monotone_in_level) << '\n'
            << "    monotonicity: " << flag(r.monotonicity) << '\n'
            << "    TCE >= VaR: " << flag(r.tce_dominates_var) << '\n';
    }
    out << "  VaR subadditivity (two $1M loans): " << flag(div.var.holds) << '\n';
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Historical VaR / TCE backtesting"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SuiteConfig suite;
    std::vector<std::string> price_args, return_args, spec_args;
    bool default_grid_flag = false;
    std::string method = "simple", convention = to_string(kDefaultConvention), violation = "strict",
                tail = "nonstrict", format = "csv", out_dir = ".";
    auto* backtest = app.add_subcommand("backtest", "Backtest VaR and TCE over a (duration, level) grid");
    backtest->add_option("--prices", price_args, "Price CSV files (date,price)")->check(CLI::ExistingFile);
    backtest->add_option("--returns", return_args, "Return CSV files (date,return)")->check(CLI::ExistingFile);
    backtest->add_option("--method", method, "Return method for price inputs")
        ->check(CLI::IsMember({"simple", "log"}));
    backtest->add_option("--spec", spec_args, "Extra <n>:<alpha> spec (repeatable)");
    backtest->add_flag("--default-grid", default_grid_flag, "Include the default 13-spec grid");
    backtest->add_option("--convention", convention, "Quantile convention")
        ->check(CLI::IsMember({"largest", "smallest"}));
    backtest->add_option("--violation", violation, "Violation inequality")
        ->check(CLI::IsMember({"strict", "nonstrict"}));
    backtest->add_option("--tail", tail, "In-window TCE conditioning")
        ->check(CLI::IsMember({"strict", "nonstrict"}));
    backtest->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "md"}));
    backtest->add_option("--out", out_dir, "Output directory");
    backtest->add_option("--threads", suite.threads, "Worker threads (0 = hardware)");

    RegressConfig regress;
    std::string table_path;
    std::vector<std::string> group_args;
    auto* regress_cmd = app.add_subcommand("regress", "Regress VaR error on duration and level");
    regress_cmd->add_option("--table,table", table_path, "VaR error table CSV")
        ->required()
        ->check(CLI::ExistingFile);
    regress_cmd->add_option("--assets", regress.assets, "Asset columns to use")->delimiter(',');
    regress_cmd->add_option("--group", group_args, "Pooled group <name>=<a1,a2,...> (repeatable)");

    auto* axioms = app.add_subcommand("axioms", "Print the risk-measure axiom demonstrations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    if (*backtest) {
        return guarded(err, [&] {
            suite.price_paths.assign(price_args.begin(), price_args.end());
            suite.return_paths.assign(return_args.begin(), return_args.end());
            suite.method = method == "log" ? ReturnMethod::Log : ReturnMethod::Simple;
            suite.convention = convention == "largest" ? QuantileConvention::Largest : QuantileConvention::Smallest;
            suite.strict_violation = violation == "strict";
            suite.strict_tail = tail == "strict";
            suite.format = format == "md" ? OutputFormat::Markdown : OutputFormat::Csv;
            suite.out_dir = out_dir;
            if (default_grid_flag || spec_args.empty()) suite.specs = default_grid();
            for (const auto& s : spec_args) suite.specs.push_back(parse_spec_argument(s));
            return cmd_backtest(suite, out, err);
        });
    }
    if (*regress_cmd) {
        return guarded(err, [&] {
            regress.table_path = table_path;
            for (const auto& g : group_args) {
                const auto eq = g.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw InputError("group '" + g + "' is not of the form <name>=<a1,a2,...>");
                }
                std::vector<std::string> members;
                std::string rest = g.substr(eq + 1);
                for (std::size_t pos = 0; pos <= rest.size();) {
                    const auto comma = rest.find(',', pos);
                    const auto end = comma == std::string::npos ? rest.size() : comma;
                    if (end > pos) members.push_back(rest.substr(pos, end - pos));
                    pos = end + 1;
                }
                if (members.empty()) throw InputError("group '" + g + "' has no members");
                regress.groups.emplace_back(g.substr(0, eq), std::move(members));
            }
            return cmd_regress(regress, out, err);
        });
    }
    if (*axioms) return cmd_axioms(out);
    return kInputError;
}

}  // namespace histrisk::cli
