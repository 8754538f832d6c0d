#pragma once

#include <optional>
#include <string>
#include <vector>

namespace csl::macro {

struct YearValue {
    int year;
    double value;
};
using YearSeries = std::vector<YearValue>;

struct FisherScenario {
    double M = 21e6;
    double V0 = 1.0;
    double g_Y = 0.03;
    double g_V = 0.0;
    int years = 10;
    void validate() const;
};

struct FisherPoint {
    int year;
    double price;
    double velocity;
    double output;
};

// P_t = M V_t / Y_t with Y_0 = M V_0 so that P_0 = 1.
std::vector<FisherPoint> fisher_price_path(const FisherScenario& s);

struct CongestionParams {
    double c0 = 1.0;
    double T_max = 7.0;
    double kappa = 1.0;
    double gamma = 2.0;
    void validate() const;
};

// c0 up to T_max, c0 (1 + kappa ((D - T_max)/T_max)^gamma) above it.
double congestion_fee(double demand, const CongestionParams& p);

// One-sided histogram density at zero: count(h < bin_width) / (N bin_width).
double velocity_from_holding_times(const std::vector<double>& holding_times, double bin_width);

struct MortgageScenario {
    double nominal_payment = 1.0;
    double deflation_rate = 0.03;
    int years = 30;
    void validate() const;
};

// Multiplier (1 - d)^-t on the real value of a fixed nominal payment.
YearSeries real_payment_burden(const MortgageScenario& s);

enum class DeflationRegime { general, expansionary, recessionary };
std::string to_string(DeflationRegime r);
DeflationRegime parse_regime(const std::string& s);
// Percentage points of debt-to-GDP per year.
double default_coefficient(DeflationRegime r);

struct DeflationDebtScenario {
    DeflationRegime regime = DeflationRegime::general;
    std::optional<double> coefficient;  // overrides the regime default
    int years = 10;
    double initial_debt_ratio = 60.0;  // percent of GDP
    double effective_coefficient() const;
    void validate() const;
};

YearSeries debt_ratio_path(const DeflationDebtScenario& s);

double diff_in_diff(double treat_pre, double treat_post, double control_pre, double control_post);

} // namespace csl::macro
