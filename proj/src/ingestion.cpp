#include "histrisk/ingestion.hpp"

#include "histrisk/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace histrisk {

namespace {

struct Row {
    std::size_t line = 0;
    Date date;
    double value = 0.0;
};

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw InputError("line " + std::to_string(line) + ": " + what);
}

bool parse_unsigned(std::string_view text, int& out) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

double parse_number(std::string_view text, std::size_t line) {
    const std::string shown(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) fail_at(line, "value '" + shown + "' is not finite");
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        fail_at(line, "malformed number '" + shown + "'");
    }
    if (!std::isfinite(value)) fail_at(line, "value '" + shown + "' is not finite");
    return value;
}

// Splits on LF, strips CR, checks the header, and returns data rows with
// strictly increasing dates.
std::vector<Row> parse_table(std::string_view text, std::string_view value_column) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<Row> rows;
    bool header_seen = false;
    std::size_t line = 0;
    while (!text.empty()) {
        ++line;
        const std::size_t eol = text.find('\n');
        std::string_view raw = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty()) continue;

        if (!header_seen) {
            const std::string expected = "date," + std::string(value_column);
            if (raw != expected) {
                fail_at(line, "expected header '" + expected + "', got '" + std::string(raw) + "'");
            }
            header_seen = true;
            continue;
        }

        const std::size_t comma = raw.find(',');
        if (comma == std::string_view::npos || raw.find(',', comma + 1) != std::string_view::npos) {
            fail_at(line, "malformed row '" + std::string(raw) + "': expected 2 fields");
        }
        Row row;
        row.line = line;
        try {
            row.date = parse_iso_date(raw.substr(0, comma));
        } catch (const InputError& e) {
            fail_at(line, e.what());
        }
        row.value = parse_number(raw.substr(comma + 1), line);
        if (!rows.empty() && !(rows.back().date < row.date)) {
            fail_at(line, "date " + format_iso_date(row.date) + " does not follow " +
                              format_iso_date(rows.back().date) + " (dates must be strictly increasing)");
        }
        rows.push_back(row);
    }
    if (!header_seen) throw InputError("missing header 'date," + std::string(value_column) + "'");
    if (rows.empty()) throw InputError("no rows");
    return rows;
}

}  // namespace

const char* to_string(ReturnMethod method) noexcept {
    return method == ReturnMethod::Simple ? "simple" : "log";
}

Date parse_iso_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    const bool shaped = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shaped || !parse_unsigned(text.substr(0, 4), y) || !parse_unsigned(text.substr(5, 2), m) ||
        !parse_unsigned(text.substr(8, 2), d)) {
        throw InputError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_iso_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

PriceSeries::PriceSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> prices)
    : asset_id_(std::move(asset_id)), dates_(std::move(dates)), prices_(std::move(prices)) {
    if (asset_id_.empty()) throw InputError("asset id must not be empty");
    if (dates_.size() != prices_.size()) throw InputError("asset '" + asset_id_ + "': dates and prices differ in length");
    if (prices_.empty()) throw InputError("asset '" + asset_id_ + "': no prices");
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
            throw InputError("asset '" + asset_id_ + "': price on " + format_iso_date(dates_[i]) +
                             " must be positive and finite");
        }
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw InputError("asset '" + asset_id_ + "': dates not strictly increasing (" +
                             format_iso_date(dates_[i - 1]) + " then " + format_iso_date(dates_[i]) + ")");
        }
    }
}

PriceSeries parse_prices(std::string_view text, std::string asset_id) {
    const auto rows = parse_table(text, "price");
    std::vector<Date> dates;
    std::vector<double> prices;
    dates.reserve(rows.size());
    prices.reserve(rows.size());
    for (const Row& row : rows) {
        if (!(row.value > 0.0)) {
            std::ostringstream msg;
            msg << "price must be positive, got " << row.value;
            fail_at(row.line, msg.str());
        }
        dates.push_back(row.date);
        prices.push_back(row.value);
    }
    return PriceSeries(std::move(asset_id), std::move(dates), std::move(prices));
}

ReturnSeries parse_returns(std::string_view text, std::string asset_id) {
    const auto rows = parse_table(text, "return");
    std::vector<Date> dates;
    std::vector<double> returns;
    dates.reserve(rows.size());
    returns.reserve(rows.size());
    for (const Row& row : rows) {
        dates.push_back(row.date);
        returns.push_back(row.value);
    }
    return ReturnSeries(std::move(asset_id), std::move(dates), std::move(returns));
}

ReturnSeries to_returns(const PriceSeries& prices, ReturnMethod method) {
    if (prices.size() < 2) {
        throw InputError("asset '" + prices.asset_id() + "': returns need at least 2 prices, got " +
                         std::to_string(prices.size()));
    }
    const auto p = prices.prices();
    const auto d = prices.dates();
    std::vector<Date> dates(d.begin() + 1, d.end());
    std::vector<double> returns;
    returns.reserve(p.size() - 1);
    for (std::size_t t = 1; t < p.size(); ++t) {
        const double ratio = p[t] / p[t - 1];
        returns.push_back(method == ReturnMethod::Simple ? ratio - 1.0 : std::log(ratio));
    }
    return ReturnSeries(prices.asset_id(), std::move(dates), std::move(returns));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw InputError("error while reading file '" + path.string() + "'");
    return buf.str();
}

}  // namespace histrisk
