#include "csl/error.hpp"
#include "csl/macro.hpp"
#include "csl/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace csl;
using namespace csl::macro;

namespace {

std::vector<double> exponential_sample(std::size_t n, double rate, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& h : out) h = rng.exponential(rate);
    return out;
}

} // namespace

TEST(Fisher, ClosedForms) {
    FisherScenario s;
    const auto path = fisher_price_path(s);
    ASSERT_EQ(path.size(), 11u);
    EXPECT_DOUBLE_EQ(path[0].price, 1.0);
    EXPECT_NEAR(path[10].price, std::pow(1.03, -10), 1e-12);
    EXPECT_NEAR(path[10].price, 0.7441, 5e-5);
    s.g_V = 0.03;
    for (const auto& pt : fisher_price_path(s)) EXPECT_NEAR(pt.price, 1.0, 1e-12);
    s.g_V = s.g_Y = 0.0;
    for (const auto& pt : fisher_price_path(s)) EXPECT_EQ(pt.price, 1.0);
}

TEST(Fisher, IdentityHoldsEverywhere) {
    for (double gy : {-0.02, 0.0, 0.03, 0.1})
        for (double gv : {-0.05, 0.0, 0.02}) {
            FisherScenario s;
            s.g_Y = gy;
            s.g_V = gv;
            s.years = 50;
            for (const auto& pt : fisher_price_path(s))
                EXPECT_LT(std::abs(s.M * pt.velocity - pt.price * pt.output) / (s.M * pt.velocity), 1e-12);
        }
}

TEST(Fisher, Validation) {
    FisherScenario s;
    s.M = 0.0;
    EXPECT_THROW(fisher_price_path(s), Error);
    s = {};
    s.years = -1;
    EXPECT_THROW(fisher_price_path(s), Error);
}

TEST(Congestion, BoundaryAndShape) {
    const CongestionParams p;
    EXPECT_EQ(congestion_fee(p.T_max, p), p.c0);
    EXPECT_EQ(congestion_fee(0.5 * p.T_max, p), p.c0);
    EXPECT_DOUBLE_EQ(congestion_fee(2 * p.T_max, p), 2 * p.c0);
    const double f15 = congestion_fee(1.5 * p.T_max, p), f2 = congestion_fee(2 * p.T_max, p),
                 f25 = congestion_fee(2.5 * p.T_max, p);
    EXPECT_LT(f2, 0.5 * (f15 + f25));
    EXPECT_NEAR(congestion_fee(p.T_max + 1e-9, p), p.c0, 1e-12);
    double prev = 0.0;
    for (double d = 0.0; d < 30.0; d += 0.25) {
        EXPECT_GE(congestion_fee(d, p), prev);
        prev = congestion_fee(d, p);
    }
    CongestionParams linear;
    linear.gamma = 1.0;
    EXPECT_THROW(congestion_fee(10.0, linear), Error);
}

TEST(Velocity, ExponentialDensityAtZero) {
    const auto h = exponential_sample(100000, 2.0, 31);
    const double est = velocity_from_holding_times(h, 0.01);
    EXPECT_NEAR(est, 2.0, 0.1);
    EXPECT_NEAR(velocity_from_holding_times(h, 0.005) / est, 1.0, 0.1);
}

TEST(Velocity, EdgeCases) {
    EXPECT_EQ(velocity_from_holding_times({1.0, 2.0, 3.0}, 0.5), 0.0);
    try {
        velocity_from_holding_times({}, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
    EXPECT_THROW(velocity_from_holding_times({1.0}, 0.0), Error);
    EXPECT_THROW(velocity_from_holding_times({-1.0}, 0.1), Error);
}

TEST(Velocity, DuplicationInvariant) {
    auto h = exponential_sample(5000, 1.0, 2);
    const double once = velocity_from_holding_times(h, 0.05);
    const auto copy = h;
    h.insert(h.end(), copy.begin(), copy.end());
    EXPECT_DOUBLE_EQ(velocity_from_holding_times(h, 0.05), once);
}

TEST(Mortgage, Burden) {
    const auto path = real_payment_burden(MortgageScenario{});
    ASSERT_EQ(path.size(), 31u);
    EXPECT_EQ(path[0].value, 1.0);
    EXPECT_NEAR(path[30].value, std::pow(0.97, -30), 1e-12);
    EXPECT_NEAR(path[30].value, 2.4936, 1e-3);
    for (std::size_t t = 1; t < path.size(); ++t) EXPECT_GT(path[t].value, path[t - 1].value);
    for (const auto& pt : real_payment_burden({1.0, 0.0, 30})) EXPECT_EQ(pt.value, 1.0);
    EXPECT_THROW(real_payment_burden({1.0, 1.0, 30}), Error);
}

TEST(DebtRatio, RegimePaths) {
    DeflationDebtScenario s;
    s.regime = DeflationRegime::recessionary;
    const auto rec = debt_ratio_path(s);
    ASSERT_EQ(rec.size(), 11u);
    EXPECT_NEAR(rec.back().value, 92.79, 1e-9);
    for (std::size_t t = 1; t < rec.size(); ++t) EXPECT_NEAR(rec[t].value - rec[t - 1].value, 3.279, 1e-12);
    s.regime = DeflationRegime::general;
    s.years = 1;
    EXPECT_NEAR(debt_ratio_path(s)[1].value - 60.0, 1.732, 1e-12);
    s.coefficient = 0.0;
    for (const auto& pt : debt_ratio_path(s)) EXPECT_EQ(pt.value, 60.0);
    EXPECT_EQ(default_coefficient(DeflationRegime::expansionary), 0.435);
}

TEST(DebtRatio, RegimeNames) {
    for (auto r : {DeflationRegime::general, DeflationRegime::expansionary, DeflationRegime::recessionary})
        EXPECT_EQ(parse_regime(to_string(r)), r);
    try {
        parse_regime("stagflation");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(DiffInDiff, Arithmetic) {
    EXPECT_DOUBLE_EQ(diff_in_diff(1.0, 3.0, 2.0, 4.0), 0.0);
    EXPECT_NEAR(diff_in_diff(0.0, 5.0, 0.0, 0.855), 4.145, 1e-12);
    EXPECT_NEAR(diff_in_diff(0.0, 0.855, 0.0, 5.0), -4.145, 1e-12);
    EXPECT_NEAR(diff_in_diff(10.0, 15.0, 10.0, 10.855), 4.145, 1e-12);
}
