#pragma once

#include "histrisk/backtest.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace histrisk {

// Daily price levels of one asset; prices strictly positive, dates strictly increasing.
class PriceSeries {
public:
    PriceSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> prices);

    const std::string& asset_id() const noexcept { return asset_id_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return prices_.size(); }

private:
    std::string asset_id_;
    std::vector<Date> dates_;
    std::vector<double> prices_;
};

enum class ReturnMethod { Simple, Log };

inline constexpr ReturnMethod kDefaultReturnMethod = ReturnMethod::Simple;

const char* to_string(ReturnMethod method) noexcept;

// Strict YYYY-MM-DD.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

// CSV with header `date,price`. LF or CRLF line endings; blank lines ignored.
// Errors carry the 1-based line number.
PriceSeries parse_prices(std::string_view text, std::string asset_id);

// CSV with header `date,return`.
ReturnSeries parse_returns(std::string_view text, std::string asset_id);

// Simple: P_t / P_{t-1} - 1. Log: ln(P_t / P_{t-1}). Dated by the later day.
ReturnSeries to_returns(const PriceSeries& prices, ReturnMethod method = kDefaultReturnMethod);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace histrisk
