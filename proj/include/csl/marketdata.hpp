#pragma once

#include <chrono>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csl::marketdata {

using Date = std::chrono::year_month_day;

Date parse_date(std::string_view iso);
std::string format_date(Date d);

struct Observation {
    Date date;
    double close;
};

// Dated closing prices of one asset. Dates strictly increasing, closes > 0.
class PriceSeries {
public:
    PriceSeries(std::string symbol, std::vector<Observation> observations);

    const std::string& symbol() const noexcept { return symbol_; }
    const std::vector<Observation>& observations() const noexcept { return obs_; }
    std::size_t size() const noexcept { return obs_.size(); }
    std::vector<double> closes() const;

    // Convenience for synthetic data: consecutive calendar days from `start`.
    static PriceSeries from_closes(std::string symbol, const std::vector<double>& closes,
                                   Date start = Date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}});

private:
    std::string symbol_;
    std::vector<Observation> obs_;
};

struct ReturnPoint {
    Date date;
    double r;
};

struct ReturnSeries {
    std::string symbol;
    std::vector<ReturnPoint> returns;

    std::size_t size() const noexcept { return returns.size(); }
    std::vector<double> values() const;

    static ReturnSeries from_values(std::string symbol, const std::vector<double>& values,
                                    Date start = Date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{2}});
};

// A dated value that may be undefined (e.g. a zero-variance correlation window).
struct SeriesPoint {
    Date date;
    std::optional<double> value;
};
using Series = std::vector<SeriesPoint>;

enum class RollingStat { volatility, mean };

struct Drawdown {
    double max_drawdown;
    Series path;
};

struct Moments {
    double mean;
    double stdev;     // sample, divisor n-1
    double skewness;  // m3 / m2^1.5
    double excess_kurtosis;  // m4 / m2^2 - 3
};

struct RiskReport {
    double annualized_vol;
    double var_95;
    double mvar;
    double max_drawdown;
    Series drawdown_path;
};

constexpr double kTradingDays = 252.0;

ReturnSeries log_returns(const PriceSeries& p);
double annualized_volatility(const ReturnSeries& r);
Series rolling_stat(const ReturnSeries& r, std::size_t window, RollingStat stat);

// Empirical quantile with linear interpolation between order statistics,
// h = n·p on 1-based ranks (Hyndman-Fan type 4).
double empirical_quantile(std::vector<double> values, double p);

// Minimum sample for historical_var at `confidence`: ceil(1 / (1 - confidence)).
std::size_t historical_var_min_obs(double confidence);
double historical_var(const ReturnSeries& r, double confidence);

Moments moments(const std::vector<double>& x);
double cornish_fisher_z(double z, double skew, double excess_kurt);
double modified_var(double mean, double stdev, double skew, double excess_kurt, double confidence);
double cornish_fisher_mvar(const ReturnSeries& r, double confidence);

ReturnSeries blend_returns(const ReturnSeries& a, const ReturnSeries& b, double w);
Drawdown max_drawdown(const PriceSeries& p);
Series rolling_correlation(const ReturnSeries& a, const ReturnSeries& b, std::size_t window);

RiskReport risk_report(const PriceSeries& p, double var_confidence = 0.95, double mvar_confidence = 0.99);

// Long-format CSV with header `date,symbol,close`. Returns one series per symbol.
std::map<std::string, PriceSeries> read_price_csv(std::istream& in);
std::map<std::string, PriceSeries> read_price_csv_file(const std::string& path);

} // namespace csl::marketdata
