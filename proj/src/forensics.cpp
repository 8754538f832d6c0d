#include "csl/forensics.hpp"

#include "csl/error.hpp"
#include "csl/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace csl::forensics {

namespace {

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::vector<double> field_values(const TradeTape& tape, Field field) {
    return field == Field::price ? tape.prices() : tape.sizes();
}

} // namespace

TradeTape::TradeTape(std::vector<Trade> trades) : trades_(std::move(trades)) {
    for (std::size_t i = 0; i < trades_.size(); ++i) {
        const auto& t = trades_[i];
        require(std::isfinite(t.price) && t.price > 0.0, ErrorKind::domain, "trade prices must be positive");
        require(std::isfinite(t.size) && t.size > 0.0, ErrorKind::domain, "trade sizes must be positive");
        require(i == 0 || trades_[i - 1].timestamp <= t.timestamp, ErrorKind::domain,
                "trade timestamps must be non-decreasing");
    }
}

TradeTape TradeTape::from_sizes(const std::vector<double>& sizes) {
    std::vector<Trade> trades;
    trades.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) trades.push_back({static_cast<double>(i), 1.0, sizes[i]});
    return TradeTape(std::move(trades));
}

std::vector<double> TradeTape::sizes() const {
    std::vector<double> out;
    out.reserve(trades_.size());
    for (const auto& t : trades_) out.push_back(t.size);
    return out;
}

std::vector<double> TradeTape::prices() const {
    std::vector<double> out;
    out.reserve(trades_.size());
    for (const auto& t : trades_) out.push_back(t.price);
    return out;
}

double parse_timestamp(const std::string& raw) {
    const std::string s = trim(raw);
    if (auto v = to_double(s)) return *v;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    char tail[8] = {0};
    const int got = std::sscanf(s.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d:%lf%7s", &y, &mo, &d, &h, &mi, &sec, tail);
    const bool date_only = got < 4 && std::sscanf(s.c_str(), "%4d-%2d-%2d%7s", &y, &mo, &d, tail) == 3;
    require(date_only || got == 6 || (got == 7 && std::string(tail) == "Z"), ErrorKind::parse,
            "unrecognized timestamp '" + s + "'");
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    require(ymd.ok() && h >= 0 && h < 24 && mi >= 0 && mi < 60 && sec >= 0.0 && sec < 61.0, ErrorKind::parse,
            "invalid timestamp '" + s + "'");
    const auto days = sys_days(ymd).time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

TradeTape read_trade_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::parse, "trade file is empty");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    require(trim(line) == "timestamp,price,size", ErrorKind::parse, "trade file header must be 'timestamp,price,size'");
    std::vector<Trade> trades;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = "trade file line " + std::to_string(lineno);
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(trim(col));
        require(cols.size() == 3, ErrorKind::parse, where + ": expected 3 columns");
        const auto price = to_double(cols[1]);
        const auto size = to_double(cols[2]);
        require(price && size, ErrorKind::parse, where + ": price and size must be numeric");
        double ts = 0.0;
        try {
            ts = parse_timestamp(cols[0]);
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, where + ": " + e.what());
        }
        require(*price > 0.0 && *size > 0.0, ErrorKind::parse, where + ": price and size must be positive");
        require(trades.empty() || trades.back().timestamp <= ts, ErrorKind::parse,
                where + ": timestamps must be non-decreasing");
        trades.push_back({ts, *price, *size});
    }
    return TradeTape(std::move(trades));
}

double benford_expected(int digit) {
    require(digit >= 1 && digit <= 9, ErrorKind::domain, "digit must lie in 1..9");
    return std::log10(1.0 + 1.0 / digit);
}

int first_digit(double x) {
    require(std::isfinite(x) && x > 0.0, ErrorKind::domain, "first digit needs a positive finite value");
    const double e = std::floor(std::log10(x));
    double m = x / std::pow(10.0, e);
    // log10 can land one decade off near exact powers of ten.
    if (m >= 10.0) m /= 10.0;
    if (m < 1.0) m *= 10.0;
    return std::clamp(static_cast<int>(m), 1, 9);
}

BenfordResult benford_test(const std::vector<double>& values) {
    require(values.size() >= kMinTrades, ErrorKind::insufficient_data,
            "Benford test needs at least " + std::to_string(kMinTrades) + " trades");
    std::array<std::size_t, 9> counts{};
    for (double v : values) ++counts[static_cast<std::size_t>(first_digit(v) - 1)];
    BenfordResult r{0.0, 8, false, {}, values.size()};
    const double n = static_cast<double>(values.size());
    for (int d = 1; d <= 9; ++d) {
        const double obs = static_cast<double>(counts[static_cast<std::size_t>(d - 1)]) / n;
        const double p = benford_expected(d);
        r.observed[static_cast<std::size_t>(d - 1)] = obs;
        r.chi2 += (obs - p) * (obs - p) / p;
    }
    r.chi2 *= n;
    r.pass = r.chi2 < kBenfordCritical;
    return r;
}

BenfordResult benford_test(const TradeTape& tape, Field field) { return benford_test(field_values(tape, field)); }

void ClusteringConfig::validate() const {
    require(!grid.empty(), ErrorKind::config, "round-size grid is empty");
    for (double g : grid) require(std::isfinite(g) && g > 0.0, ErrorKind::config, "grid sizes must be positive");
    require(tolerance > 0.0 && shoulder_width > 0.0, ErrorKind::config, "tolerance and shoulder width must be positive");
    const double g_min = *std::min_element(grid.begin(), grid.end());
    require((1.0 + shoulder_width) * tolerance < g_min / 2.0, ErrorKind::config,
            "tolerance bands overlap between neighbouring grid points");
}

double grid_distance(double x, const std::vector<double>& grid) {
    double best = std::numeric_limits<double>::infinity();
    for (double g : grid) {
        const double r = std::fmod(x, g);
        best = std::min(best, std::min(r, g - r));
    }
    return best;
}

ClusteringResult size_clustering_test(const std::vector<double>& sizes, const ClusteringConfig& config) {
    config.validate();
    require(sizes.size() >= kMinTrades, ErrorKind::insufficient_data,
            "clustering test needs at least " + std::to_string(kMinTrades) + " trades");
    const double tol = config.tolerance;
    const double outer = (1.0 + config.shoulder_width) * tol;
    std::size_t round = 0, shoulder = 0;
    for (double s : sizes) {
        const double d = grid_distance(s, config.grid);
        if (d <= tol)
            ++round;
        else if (d <= outer)
            ++shoulder;
    }
    const double n = static_cast<double>(sizes.size());
    ClusteringResult r{};
    r.round_fraction = static_cast<double>(round) / n;
    r.shoulder_fraction = static_cast<double>(shoulder) / n;
    // Locally uniform sizes put 1/W of the shoulder mass inside the round band.
    r.benchmark_fraction = std::min(1.0, r.shoulder_fraction / config.shoulder_width);
    r.excess = r.round_fraction - r.benchmark_fraction;
    const double pooled = 0.5 * (r.round_fraction + r.benchmark_fraction);
    const double se = std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
    if (se > 0.0)
        r.z = r.excess / se;
    else
        r.z = r.excess > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.pass = r.z > config.z_critical;
    return r;
}

ClusteringResult size_clustering_test(const TradeTape& tape, const ClusteringConfig& config) {
    return size_clustering_test(tape.sizes(), config);
}

std::size_t default_hill_k(std::size_t n) { return std::max<std::size_t>(10, n / 20); }

HillResult hill_tail_index(const std::vector<double>& sizes, std::size_t k) {
    for (double s : sizes) require(std::isfinite(s) && s > 0.0, ErrorKind::domain, "Hill estimator needs positive sizes");
    require(k >= 10, ErrorKind::domain, "Hill estimator needs k >= 10");
    require(2 * k < sizes.size(), ErrorKind::insufficient_data, "Hill estimator needs k < n/2");
    std::vector<double> x = sizes;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), std::greater<>());
    const double threshold = x[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(x[i] / threshold);
    const double xi = sum / static_cast<double>(k);
    return {xi, xi > 0.0 ? 1.0 / xi : std::numeric_limits<double>::infinity(), k};
}

HillResult hill_tail_index(const TradeTape& tape, std::size_t k) { return hill_tail_index(tape.sizes(), k); }

double suspicious_volume_fraction(double reported, double predicted_real, bool* clamped) {
    require(std::isfinite(reported) && reported > 0.0, ErrorKind::domain, "reported volume must be positive");
    require(std::isfinite(predicted_real), ErrorKind::domain, "predicted volume must be finite");
    const double p = std::clamp(predicted_real, 0.0, reported);
    if (clamped) *clamped = p != predicted_real;
    return 1.0 - p / reported;
}

void ForensicConfig::validate() const {
    clustering.validate();
    require(tail_min < tail_max, ErrorKind::config, "tail exponent range is empty");
    require(fail_threshold >= 1 && fail_threshold <= 3, ErrorKind::config, "fail threshold must lie in 1..3");
}

std::string to_string(Verdict v) { return v == Verdict::consistent ? "consistent" : "suspicious"; }

ForensicReport forensic_verdict(const TradeTape& tape, const ForensicConfig& config,
                                std::optional<std::pair<double, double>> volumes) {
    config.validate();
    ForensicReport r{};
    r.benford = benford_test(tape, config.benford_field);
    r.clustering = size_clustering_test(tape, config.clustering);
    r.tail = hill_tail_index(tape, config.hill_k.value_or(default_hill_k(tape.size())));
    r.tail_pass = r.tail.exponent >= config.tail_min && r.tail.exponent <= config.tail_max;
    r.failed_tests = int{!r.benford.pass} + int{!r.clustering.pass} + int{!r.tail_pass};
    r.verdict = r.failed_tests >= config.fail_threshold ? Verdict::suspicious : Verdict::consistent;
    if (volumes) r.suspicious_volume_fraction = suspicious_volume_fraction(volumes->first, volumes->second);
    return r;
}

std::vector<double> synthetic_authentic_sizes(std::size_t n, std::uint64_t seed, double alpha, double round_share) {
    require(alpha > 0.0, ErrorKind::domain, "tail exponent must be positive");
    require(round_share >= 0.0 && round_share <= 1.0, ErrorKind::domain, "round share must lie in [0, 1]");
    Rng rng(seed);
    const double step_up = std::pow(10.0, -alpha);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int decades = 0;
        while (rng.uniform() < step_up) ++decades;
        double x = std::pow(10.0, 1.0 + decades + rng.uniform());
        if (rng.uniform() < round_share) x = std::floor(x);
        out.push_back(x);
    }
    return out;
}

std::vector<double> synthetic_wash_sizes(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rng.uniform(1.0, 9.99));
    return out;
}

} // namespace csl::forensics
