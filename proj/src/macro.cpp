#include "csl/macro.hpp"

#include "csl/error.hpp"

#include <cmath>

namespace csl::macro {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::domain, msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void FisherScenario::validate() const {
    require(M > 0 && V0 > 0 && years > 0, "money stock, velocity and horizon must be positive");
    require(finite(M) && finite(V0) && g_Y > -1.0 && g_V > -1.0, "growth rates must exceed -100%");
}

std::vector<FisherPoint> fisher_price_path(const FisherScenario& s) {
    s.validate();
    const double y0 = s.M * s.V0;
    std::vector<FisherPoint> out;
    out.reserve(static_cast<std::size_t>(s.years) + 1);
    for (int t = 0; t <= s.years; ++t) {
        const double v = s.V0 * std::pow(1.0 + s.g_V, t);
        const double y = y0 * std::pow(1.0 + s.g_Y, t);
        out.push_back({t, s.M * v / y, v, y});
    }
    return out;
}

void CongestionParams::validate() const {
    require(c0 >= 0 && T_max > 0 && kappa >= 0, "congestion parameters need c0 >= 0, T_max > 0, kappa >= 0");
    require(gamma > 1.0, "congestion exponent gamma must exceed 1");
}

double congestion_fee(double demand, const CongestionParams& p) {
    p.validate();
    require(demand >= 0 && finite(demand), "demand must be nonnegative");
    if (demand <= p.T_max) return p.c0;
    return p.c0 * (1.0 + p.kappa * std::pow((demand - p.T_max) / p.T_max, p.gamma));
}

double velocity_from_holding_times(const std::vector<double>& holding_times, double bin_width) {
    if (holding_times.empty()) throw Error(ErrorKind::insufficient_data, "holding-time sample is empty");
    require(bin_width > 0 && finite(bin_width), "bin width must be positive");
    std::size_t near_zero = 0;
    for (double h : holding_times) {
        require(h >= 0 && finite(h), "holding times must be nonnegative");
        if (h < bin_width) ++near_zero;
    }
    return static_cast<double>(near_zero) / (static_cast<double>(holding_times.size()) * bin_width);
}

void MortgageScenario::validate() const {
    require(deflation_rate >= 0.0 && deflation_rate < 1.0, "deflation rate must lie in [0, 1)");
    require(years >= 0, "horizon must be nonnegative");
}

YearSeries real_payment_burden(const MortgageScenario& s) {
    s.validate();
    YearSeries out;
    for (int t = 0; t <= s.years; ++t) out.push_back({t, std::pow(1.0 - s.deflation_rate, -t)});
    return out;
}

std::string to_string(DeflationRegime r) {
    switch (r) {
    case DeflationRegime::general: return "general";
    case DeflationRegime::expansionary: return "expansionary";
    case DeflationRegime::recessionary: return "recessionary";
    }
    return "unknown";
}

DeflationRegime parse_regime(const std::string& s) {
    if (s == "general") return DeflationRegime::general;
    if (s == "expansionary") return DeflationRegime::expansionary;
    if (s == "recessionary") return DeflationRegime::recessionary;
    throw Error(ErrorKind::config, "unknown deflation regime '" + s + "'");
}

double default_coefficient(DeflationRegime r) {
    switch (r) {
    case DeflationRegime::general: return 1.732;
    case DeflationRegime::expansionary: return 0.435;
    case DeflationRegime::recessionary: return 3.279;
    }
    return 0.0;
}

double DeflationDebtScenario::effective_coefficient() const { return coefficient.value_or(default_coefficient(regime)); }

void DeflationDebtScenario::validate() const {
    require(years >= 0, "horizon must be nonnegative");
    require(finite(initial_debt_ratio) && finite(effective_coefficient()), "debt scenario inputs must be finite");
}

YearSeries debt_ratio_path(const DeflationDebtScenario& s) {
    s.validate();
    const double k = s.effective_coefficient();
    YearSeries out;
    for (int t = 0; t <= s.years; ++t) out.push_back({t, s.initial_debt_ratio + k * t});
    return out;
}

double diff_in_diff(double treat_pre, double treat_post, double control_pre, double control_post) {
    require(finite(treat_pre) && finite(treat_post) && finite(control_pre) && finite(control_post),
            "difference-in-differences inputs must be finite");
    return (treat_post - treat_pre) - (control_post - control_pre);
}

} // namespace csl::macro
