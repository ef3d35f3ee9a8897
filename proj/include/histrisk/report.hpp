#pragma once

#include "histrisk/backtest.hpp"
#include "histrisk/ingestion.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace histrisk {

enum class OutputFormat { Csv, Markdown };

const char* file_extension(OutputFormat format) noexcept;

// Six decimals; with_sign prefixes '+' on non-negative values. Negative zero
// prints as zero.
std::string format_fixed(double value, bool with_sign = false);

inline constexpr std::string_view kAbsentCell = "NA";
inline constexpr std::string_view kSkippedCell = "skipped";

// Tables have one row per spec (row label "n,level%") and one column per asset.
std::string render_nonexistence_table(const SuiteReport& report, OutputFormat format);
std::string render_var_error_table(const SuiteReport& report, OutputFormat format);
std::string render_tce_error_table(const SuiteReport& report, OutputFormat format);

struct ReportMetadata {
    std::string tool_version;
    std::string input_kind;  // "prices" or "returns"
    ReturnMethod method = kDefaultReturnMethod;
    QuantileConvention convention = kDefaultConvention;
    bool strict_violation = true;
    bool strict_tail = false;
};

// Key/value block plus the skip log. Deterministic: no timestamps or paths.
std::string render_metadata(const ReportMetadata& meta, const SuiteReport& report, OutputFormat format);

// A table in the layout written by render_var_error_table (CSV form).
struct ErrorTable {
    struct Row {
        std::string label;
        double duration = 0.0;
        double level = 0.0;
        std::vector<std::optional<double>> cells;  // NA / skipped -> nullopt
    };
    std::vector<std::string> assets;
    std::vector<Row> rows;
};

ErrorTable parse_error_table(std::string_view csv);

// RFC 4180 field splitting for one CSV record.
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace histrisk
