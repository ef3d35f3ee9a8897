#include "histrisk/report.hpp"

#include "histrisk/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace histrisk {

namespace {

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

using CellFn = std::function<std::string(const std::string& asset, const RiskSpec& spec)>;

std::string render_table(const SuiteReport& report, OutputFormat format, std::string_view title,
                         const CellFn& cell) {
    std::ostringstream out;
    if (format == OutputFormat::Csv) {
        out << "asset";
        for (const auto& a : report.assets) out << ',' << csv_field(a);
        out << '\n';
        for (const auto& spec : report.specs) {
            out << csv_field(spec.label());
            for (const auto& a : report.assets) out << ',' << cell(a, spec);
            out << '\n';
        }
        return out.str();
    }

    out << "## " << title << "\n\n| asset |";
    for (const auto& a : report.assets) out << ' ' << a << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.assets.size(); ++i) out << "---:|";
    out << '\n';
    for (const auto& spec : report.specs) {
        out << "| " << spec.label() << " |";
        for (const auto& a : report.assets) out << ' ' << cell(a, spec) << " |";
        out << '\n';
    }
    return out.str();
}

std::optional<double> parse_cell_number(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

const char* strictness_text(bool b) { return b ? "strict" : "nonstrict"; }

}  // namespace

const char* file_extension(OutputFormat format) noexcept {
    return format == OutputFormat::Csv ? ".csv" : ".md";
}

std::string format_fixed(double value, bool with_sign) {
    char buf[64];
    std::snprintf(buf, sizeof buf, with_sign ? "%+.6f" : "%.6f", value);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    if (with_sign && s == "0.000000") s = "+0.000000";
    return s;
}

std::string render_nonexistence_table(const SuiteReport& report, OutputFormat format) {
    return render_table(report, format, "TCE nonexistence rate",
                        [&](const std::string& asset, const RiskSpec& spec) {
                            const auto* row = report.find_tce(asset, spec);
                            if (!row) return std::string(kSkippedCell);
                            if (!row->nonexistence_rate) return std::string(kAbsentCell);
                            return format_fixed(*row->nonexistence_rate);
                        });
}

std::string render_var_error_table(const SuiteReport& report, OutputFormat format) {
    return render_table(report, format, "VaR relative error",
                        [&](const std::string& asset, const RiskSpec& spec) {
                            const auto* row = report.find_var(asset, spec);
                            if (!row) return std::string(kSkippedCell);
                            return format_fixed(row->relative_error, true);
                        });
}

std::string render_tce_error_table(const SuiteReport& report, OutputFormat format) {
    return render_table(report, format, "TCE mean error",
                        [&](const std::string& asset, const RiskSpec& spec) {
                            const auto* row = report.find_tce(asset, spec);
                            if (!row) return std::string(kSkippedCell);
                            if (!row->mean_error) return std::string(kAbsentCell);
                            return format_fixed(*row->mean_error, true);
                        });
}

std::string render_metadata(const ReportMetadata& meta, const SuiteReport& report, OutputFormat format) {
    const std::vector<std::pair<std::string, std::string>> entries = {
        {"tool_version", meta.tool_version},
        {"input", meta.input_kind},
        {"return_method", to_string(meta.method)},
        {"quantile_convention", to_string(meta.convention)},
        {"violation", strictness_text(meta.strict_violation)},
        {"tail_conditioning", strictness_text(meta.strict_tail)},
        {"assets", std::to_string(report.assets.size())},
        {"specs", std::to_string(report.specs.size())},
        {"skipped", std::to_string(report.skipped.size())},
    };

    std::ostringstream out;
    if (format == OutputFormat::Csv) {
        out << "key,value\n";
        for (const auto& [k, v] : entries) out << k << ',' << csv_field(v) << '\n';
        for (const auto& s : report.skipped) {
            out << "skip," << csv_field(s.asset_id + " " + s.spec.label() + " " +
                                        (s.table == BacktestTable::Var ? "var" : "tce") + ": " + s.reason)
                << '\n';
        }
        return out.str();
    }

    out << "## Run metadata\n\n| key | value |\n|---|---|\n";
    for (const auto& [k, v] : entries) out << "| " << k << " | " << v << " |\n";
    if (!report.skipped.empty()) {
        out << "\n### Skipped\n\n";
        for (const auto& s : report.skipped) {
            out << "- " << s.asset_id << ' ' << s.spec.label() << ' '
                << (s.table == BacktestTable::Var ? "var" : "tce") << ": " << s.reason << '\n';
        }
    }
    return out.str();
}

std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) throw InputError("unterminated quoted field in '" + std::string(line) + "'");
    fields.push_back(std::move(current));
    return fields;
}

ErrorTable parse_error_table(std::string_view csv) {
    ErrorTable table;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (!csv.empty()) {
        ++line_no;
        const std::size_t eol = csv.find('\n');
        std::string_view line = csv.substr(0, eol);
        csv = eol == std::string_view::npos ? std::string_view{} : csv.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        auto fields = split_csv_record(line);
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (!header_seen) {
            if (fields.size() < 2) throw InputError(where + "error table header needs at least one asset column");
            table.assets.assign(fields.begin() + 1, fields.end());
            header_seen = true;
            continue;
        }
        if (fields.size() != table.assets.size() + 1) {
            throw InputError(where + "expected " + std::to_string(table.assets.size() + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }

        ErrorTable::Row row;
        row.label = fields[0];
        const std::size_t comma = row.label.find(',');
        const auto duration = parse_cell_number(std::string_view(row.label).substr(0, comma));
        std::optional<double> percent;
        if (comma != std::string::npos && !row.label.empty() && row.label.back() == '%') {
            percent = parse_cell_number(
                std::string_view(row.label).substr(comma + 1, row.label.size() - comma - 2));
        }
        if (!duration || !percent) throw InputError(where + "row label '" + row.label + "' is not of the form n,level%");
        row.duration = *duration;
        row.level = *percent / 100.0;

        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i] == kAbsentCell || fields[i] == kSkippedCell) {
                row.cells.emplace_back();
                continue;
            }
            const auto value = parse_cell_number(fields[i]);
            if (!value) throw InputError(where + "malformed cell '" + fields[i] + "'");
            row.cells.push_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) throw InputError("error table is empty");
    return table;
}

}  // namespace histrisk
