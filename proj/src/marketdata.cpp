#include "csl/marketdata.hpp"

#include "csl/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace csl::marketdata {

namespace {

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
}

double mean_of(const double* first, const double* last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

double sample_stdev(const double* first, const double* last, double mean) {
    double ss = 0.0;
    for (const double* it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
    return std::sqrt(ss / static_cast<double>(last - first - 1));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Inner join on calendar day. Both inputs are date-ordered.
std::vector<std::pair<double, double>> align(const ReturnSeries& a, const ReturnSeries& b, std::vector<Date>& dates) {
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0, j = 0;
    while (i < a.returns.size() && j < b.returns.size()) {
        const auto& da = a.returns[i].date;
        const auto& db = b.returns[j].date;
        if (da < db) {
            ++i;
        } else if (db < da) {
            ++j;
        } else {
            out.emplace_back(a.returns[i].r, b.returns[j].r);
            dates.push_back(da);
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

Date parse_date(std::string_view iso) {
    iso = trim(iso);
    int y = 0;
    unsigned m = 0, d = 0;
    auto field = [&](std::size_t pos, std::size_t len, auto& out) {
        const char* first = iso.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc() && ptr == first + len;
    };
    const bool shape = iso.size() >= 10 && iso[4] == '-' && iso[7] == '-' &&
                       (iso.size() == 10 || iso[10] == 'T' || iso[10] == ' ');
    require(shape && field(0, 4, y) && field(5, 2, m) && field(8, 2, d), ErrorKind::parse,
            "invalid ISO-8601 date '" + std::string(iso) + "'");
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    require(date.ok(), ErrorKind::parse, "invalid calendar date '" + std::string(iso) + "'");
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

PriceSeries::PriceSeries(std::string symbol, std::vector<Observation> observations)
    : symbol_(std::move(symbol)), obs_(std::move(observations)) {
    for (std::size_t i = 0; i < obs_.size(); ++i) {
        require(std::isfinite(obs_[i].close) && obs_[i].close > 0.0, ErrorKind::domain,
                "close prices must be strictly positive (" + symbol_ + " at " + format_date(obs_[i].date) + ")");
        if (i > 0)
            require(obs_[i - 1].date < obs_[i].date, ErrorKind::domain,
                    "dates must be strictly increasing (" + symbol_ + " at " + format_date(obs_[i].date) + ")");
    }
}

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(obs_.size());
    for (const auto& o : obs_) out.push_back(o.close);
    return out;
}

PriceSeries PriceSeries::from_closes(std::string symbol, const std::vector<double>& closes, Date start) {
    std::vector<Observation> obs;
    obs.reserve(closes.size());
    std::chrono::sys_days day{start};
    for (double c : closes) {
        obs.push_back({Date{day}, c});
        day += std::chrono::days{1};
    }
    return PriceSeries(std::move(symbol), std::move(obs));
}

std::vector<double> ReturnSeries::values() const {
    std::vector<double> out;
    out.reserve(returns.size());
    for (const auto& p : returns) out.push_back(p.r);
    return out;
}

ReturnSeries ReturnSeries::from_values(std::string symbol, const std::vector<double>& values, Date start) {
    ReturnSeries out{std::move(symbol), {}};
    out.returns.reserve(values.size());
    std::chrono::sys_days day{start};
    for (double v : values) {
        out.returns.push_back({Date{day}, v});
        day += std::chrono::days{1};
    }
    return out;
}

ReturnSeries log_returns(const PriceSeries& p) {
    require(p.size() >= 2, ErrorKind::empty_input, "log returns need at least 2 prices");
    const auto& obs = p.observations();
    ReturnSeries out{p.symbol(), {}};
    out.returns.reserve(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i)
        out.returns.push_back({obs[i].date, std::log(obs[i].close / obs[i - 1].close)});
    return out;
}

double annualized_volatility(const ReturnSeries& r) {
    require(r.size() >= 2, ErrorKind::insufficient_data, "annualized volatility needs at least 2 returns");
    const auto v = r.values();
    const double m = mean_of(v.data(), v.data() + v.size());
    return sample_stdev(v.data(), v.data() + v.size(), m) * std::sqrt(kTradingDays);
}

Series rolling_stat(const ReturnSeries& r, std::size_t window, RollingStat stat) {
    require(window >= 1, ErrorKind::domain, "rolling window must be positive");
    require(window <= r.size(), ErrorKind::insufficient_data, "rolling window longer than series");
    require(stat != RollingStat::volatility || window >= 2, ErrorKind::insufficient_data,
            "rolling volatility needs a window of at least 2");
    const auto v = r.values();
    Series out;
    out.reserve(v.size() - window + 1);
    for (std::size_t end = window; end <= v.size(); ++end) {
        const double* first = v.data() + end - window;
        const double* last = v.data() + end;
        const double m = mean_of(first, last);
        const double value = stat == RollingStat::mean ? m : sample_stdev(first, last, m) * std::sqrt(kTradingDays);
        out.push_back({r.returns[end - 1].date, value});
    }
    return out;
}

double empirical_quantile(std::vector<double> values, double p) {
    require(!values.empty(), ErrorKind::empty_input, "quantile of empty sample");
    require(p >= 0.0 && p <= 1.0, ErrorKind::domain, "quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double h = n * p;
    if (h <= 1.0) return values.front();
    if (h >= n) return values.back();
    const auto lo = static_cast<std::size_t>(std::floor(h));  // 1-based rank
    const double frac = h - static_cast<double>(lo);
    return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

std::size_t historical_var_min_obs(double confidence) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(1.0 / (1.0 - confidence) - 1e-9)));
}

double historical_var(const ReturnSeries& r, double confidence) {
    require(confidence > 0.0 && confidence < 1.0, ErrorKind::domain, "confidence must lie in (0, 1)");
    const std::size_t need = historical_var_min_obs(confidence);
    require(r.size() >= need, ErrorKind::insufficient_data,
            "historical VaR at this confidence needs at least " + std::to_string(need) + " returns");
    const double q = empirical_quantile(r.values(), 1.0 - confidence);
    return std::max(0.0, -q);
}

Moments moments(const std::vector<double>& x) {
    require(x.size() >= 2, ErrorKind::insufficient_data, "moments need at least 2 observations");
    const double n = static_cast<double>(x.size());
    const double m = mean_of(x.data(), x.data() + x.size());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    Moments out{m, std::sqrt(m2 * n / (n - 1.0)), 0.0, 0.0};
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

double cornish_fisher_z(double z, double s, double k) {
    return z + (z * z - 1.0) * s / 6.0 + (z * z * z - 3.0 * z) * k / 24.0 - (2.0 * z * z * z - 5.0 * z) * s * s / 36.0;
}

double modified_var(double mean, double stdev, double skew, double excess_kurt, double confidence) {
    require(confidence > 0.0 && confidence < 1.0, ErrorKind::domain, "confidence must lie in (0, 1)");
    if (stdev == 0.0) return std::max(0.0, -mean);
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - confidence);
    return -(mean + stdev * cornish_fisher_z(z, skew, excess_kurt));
}

double cornish_fisher_mvar(const ReturnSeries& r, double confidence) {
    require(r.size() >= 30, ErrorKind::insufficient_data, "modified VaR needs at least 30 returns");
    const auto mo = moments(r.values());
    return modified_var(mo.mean, mo.stdev, mo.skewness, mo.excess_kurtosis, confidence);
}

ReturnSeries blend_returns(const ReturnSeries& a, const ReturnSeries& b, double w) {
    require(w >= 0.0 && w <= 1.0, ErrorKind::domain, "blend weight must lie in [0, 1]");
    std::vector<Date> dates;
    const auto pairs = align(a, b, dates);
    require(!pairs.empty(), ErrorKind::alignment, "series '" + a.symbol + "' and '" + b.symbol + "' share no dates");
    ReturnSeries out{a.symbol + "+" + b.symbol, {}};
    out.returns.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out.returns.push_back({dates[i], (1.0 - w) * pairs[i].first + w * pairs[i].second});
    return out;
}

Drawdown max_drawdown(const PriceSeries& p) {
    Drawdown out{0.0, {}};
    out.path.reserve(p.size());
    double peak = 0.0;
    for (const auto& o : p.observations()) {
        peak = std::max(peak, o.close);
        const double dd = 1.0 - o.close / peak;
        out.path.push_back({o.date, dd});
        out.max_drawdown = std::max(out.max_drawdown, dd);
    }
    return out;
}

Series rolling_correlation(const ReturnSeries& a, const ReturnSeries& b, std::size_t window) {
    require(window >= 2, ErrorKind::domain, "correlation window must be at least 2");
    std::vector<Date> dates;
    const auto pairs = align(a, b, dates);
    require(!pairs.empty(), ErrorKind::alignment, "series '" + a.symbol + "' and '" + b.symbol + "' share no dates");
    require(window <= pairs.size(), ErrorKind::insufficient_data, "correlation window longer than aligned series");
    Series out;
    out.reserve(pairs.size() - window + 1);
    for (std::size_t end = window; end <= pairs.size(); ++end) {
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = end - window; i < end; ++i) {
            ma += pairs[i].first;
            mb += pairs[i].second;
        }
        ma /= static_cast<double>(window);
        mb /= static_cast<double>(window);
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = end - window; i < end; ++i) {
            const double da = pairs[i].first - ma;
            const double db = pairs[i].second - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        // A window of identical values leaves only rounding noise in the centred sums.
        const double w = static_cast<double>(window);
        const auto flat = [w](double ss, double m) {
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(m);
            return ss <= w * noise * noise;
        };
        std::optional<double> value;
        if (!flat(saa, ma) && !flat(sbb, mb)) value = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
        out.push_back({dates[end - 1], value});
    }
    return out;
}

RiskReport risk_report(const PriceSeries& p, double var_confidence, double mvar_confidence) {
    const auto r = log_returns(p);
    auto dd = max_drawdown(p);
    return RiskReport{annualized_volatility(r), historical_var(r, var_confidence), cornish_fisher_mvar(r, mvar_confidence),
                      dd.max_drawdown, std::move(dd.path)};
}

std::map<std::string, PriceSeries> read_price_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::parse, "price CSV is empty");
    std::string_view header = trim(line);
    if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
    require(header == "date,symbol,close", ErrorKind::parse, "price CSV header must be 'date,symbol,close'");

    std::map<std::string, std::vector<Observation>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto c1 = sv.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
        require(c2 != std::string_view::npos && sv.find(',', c2 + 1) == std::string_view::npos, ErrorKind::parse,
                "line " + std::to_string(lineno) + ": expected 3 fields");
        const auto date_f = trim(sv.substr(0, c1));
        const auto sym_f = trim(sv.substr(c1 + 1, c2 - c1 - 1));
        const auto close_f = trim(sv.substr(c2 + 1));
        require(!sym_f.empty(), ErrorKind::parse, "line " + std::to_string(lineno) + ": empty symbol");
        double close = 0.0;
        auto [ptr, ec] = std::from_chars(close_f.data(), close_f.data() + close_f.size(), close);
        require(ec == std::errc() && ptr == close_f.data() + close_f.size(), ErrorKind::parse,
                "line " + std::to_string(lineno) + ": invalid close '" + std::string(close_f) + "'");
        Date date;
        try {
            date = parse_date(date_f);
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
        }
        rows[std::string(sym_f)].push_back({date, close});
    }
    std::map<std::string, PriceSeries> out;
    for (auto& [sym, obs] : rows) {
        std::stable_sort(obs.begin(), obs.end(), [](const auto& x, const auto& y) { return x.date < y.date; });
        try {
            out.emplace(sym, PriceSeries(sym, std::move(obs)));
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, e.what());
        }
    }
    require(!out.empty(), ErrorKind::parse, "price CSV has no rows");
    return out;
}

std::map<std::string, PriceSeries> read_price_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open '" + path + "'");
    return read_price_csv(in);
}

} // namespace csl::marketdata
