#pragma once

#include "histrisk/backtest.hpp"
#include "histrisk/ingestion.hpp"
#include "histrisk/report.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace histrisk::cli {

inline constexpr const char* kVersion = "histrisk 1.0.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInternalError = 2;

inline constexpr const char* kNonexistenceTable = "table1_tce_nonexistence";
inline constexpr const char* kVarErrorTable = "table2_var_errors";
inline constexpr const char* kTceErrorTable = "table3_tce_errors";
inline constexpr const char* kMetadataFile = "metadata";

struct SuiteConfig {
    std::vector<std::filesystem::path> price_paths;   // asset id = file stem
    std::vector<std::filesystem::path> return_paths;
    ReturnMethod method = kDefaultReturnMethod;
    std::vector<RiskSpec> specs;  // the default grid when empty
    QuantileConvention convention = kDefaultConvention;
    bool strict_violation = true;
    bool strict_tail = false;
    OutputFormat format = OutputFormat::Csv;
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;

    void validate() const;
};

// "100:0.99" -> duration 100, level 0.99.
RiskSpec parse_spec_argument(const std::string& text);

// Reads every input first; nothing is written unless the whole run succeeds.
int cmd_backtest(const SuiteConfig& config, std::ostream& out, std::ostream& err);

struct RegressConfig {
    std::filesystem::path table_path;
    std::vector<std::string> assets;  // empty: every asset column
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
};

int cmd_regress(const RegressConfig& config, std::ostream& out, std::ostream& err);

int cmd_axioms(std::ostream& out);

// Full command-line entry point: `backtest`, `regress`, `axioms`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace histrisk::cli
