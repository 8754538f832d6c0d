#include "csl/error.hpp"
#include "csl/marketdata.hpp"
#include "csl/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

using namespace csl;
using namespace csl::marketdata;

namespace {

ReturnSeries rs(const std::vector<double>& v) { return ReturnSeries::from_values("X", v); }

std::vector<double> gaussian(std::size_t n, double mu, double sd, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = mu + sd * rng.normal();
    return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected csl::Error";
    return ErrorKind::io;
}

} // namespace

TEST(LogReturns, ConstantSeriesGivesZeros) {
    const auto r = log_returns(PriceSeries::from_closes("X", {100, 100, 100}));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r.values(), (std::vector<double>{0.0, 0.0}));
}

TEST(LogReturns, EulerStep) {
    const auto r = log_returns(PriceSeries::from_closes("X", {100, 100 * std::exp(1.0)}));
    EXPECT_NEAR(r.values()[0], 1.0, 1e-15);
}

TEST(LogReturns, HandComputed) {
    const auto r = log_returns(PriceSeries::from_closes("X", {100, 110, 99})).values();
    EXPECT_NEAR(r[0], 0.0953102, 5e-7);
    EXPECT_NEAR(r[1], -0.1053605, 5e-7);
}

TEST(LogReturns, TooShortIsEmptyInput) {
    EXPECT_EQ(kind_of([] { log_returns(PriceSeries::from_closes("X", {100})); }), ErrorKind::empty_input);
}

TEST(LogReturns, CumulativeSumRecoversPriceRatios) {
    Rng rng(11);
    std::vector<double> closes{100.0};
    for (int i = 0; i < 500; ++i) closes.push_back(closes.back() * std::exp(0.03 * rng.normal()));
    const auto r = log_returns(PriceSeries::from_closes("X", closes)).values();
    double cum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        cum += r[i];
        const double expected = closes[i + 1] / closes[0];
        EXPECT_NEAR(std::exp(cum) / expected, 1.0, 1e-12);
    }
}

TEST(PriceSeriesTest, RejectsNonIncreasingDatesAndNonPositiveCloses) {
    const Date d = parse_date("2024-01-02");
    EXPECT_EQ(kind_of([&] { PriceSeries("X", {{d, 1.0}, {d, 2.0}}); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([&] { PriceSeries("X", {{d, 0.0}}); }), ErrorKind::domain);
}

TEST(AnnualizedVol, ZeroAndConstantReturns) {
    EXPECT_EQ(annualized_volatility(rs(std::vector<double>(10, 0.0))), 0.0);
    EXPECT_NEAR(annualized_volatility(rs(std::vector<double>(10, 0.02))), 0.0, 1e-15);
}

TEST(AnnualizedVol, AlternatingSeriesClosedForm) {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(i % 2 ? -0.01 : 0.01);
    EXPECT_NEAR(annualized_volatility(rs(v)), 0.01 * std::sqrt(100.0 / 99.0) * std::sqrt(252.0), 1e-12);
    EXPECT_NEAR(annualized_volatility(rs(v)), 0.15954, 1e-5);
}

TEST(AnnualizedVol, NeedsTwoReturns) {
    EXPECT_EQ(kind_of([] { annualized_volatility(rs({0.1})); }), ErrorKind::insufficient_data);
}

TEST(RollingStat, WindowEqualsLengthMatchesWholeSample) {
    const auto v = gaussian(40, 0.0, 0.02, 3);
    const auto out = rolling_stat(rs(v), v.size(), RollingStat::volatility);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(*out[0].value, annualized_volatility(rs(v)), 1e-14);
}

TEST(RollingStat, WindowTwoOnThreePoints) {
    const auto out = rolling_stat(rs({1.0, 3.0, 8.0}), 2, RollingStat::mean);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_DOUBLE_EQ(*out[0].value, 2.0);
    EXPECT_DOUBLE_EQ(*out[1].value, 5.5);
    const auto vol = rolling_stat(rs({1.0, 3.0, 8.0}), 2, RollingStat::volatility);
    EXPECT_NEAR(*vol[0].value, std::sqrt(2.0) * std::sqrt(252.0), 1e-12);
    EXPECT_NEAR(*vol[1].value, std::sqrt(12.5) * std::sqrt(252.0), 1e-12);
}

TEST(RollingStat, RegimeSwitchCrossesMidpointQuickly) {
    auto v = gaussian(300, 0.0, 0.01, 21);
    const auto hi = gaussian(300, 0.0, 0.02, 22);
    v.insert(v.end(), hi.begin(), hi.end());
    const std::size_t window = 15, sw = 300;
    const auto out = rolling_stat(rs(v), window, RollingStat::volatility);
    EXPECT_EQ(out.size(), v.size() - window + 1);
    const double mid = 0.015 * std::sqrt(252.0);
    // out[i] covers returns [i, i + window); the first window touching the new regime ends at sw.
    bool crossed = false;
    for (std::size_t t = sw; t <= sw + window && !crossed; ++t) crossed = *out[t - window + 1].value >= mid;
    EXPECT_TRUE(crossed);
}

TEST(RollingStat, WindowLongerThanSeries) {
    EXPECT_EQ(kind_of([] { rolling_stat(rs({0.1, 0.2}), 3, RollingStat::mean); }), ErrorKind::insufficient_data);
}

TEST(HistoricalVar, SortBasedOracle) {
    std::vector<double> v(5, -0.05);
    v.insert(v.end(), 95, 0.01);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(4));
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    // 5th percentile of 100 observations is the 5th order statistic.
    EXPECT_NEAR(historical_var(rs(v), 0.95), -sorted[4], 1e-12);
    EXPECT_NEAR(historical_var(rs(v), 0.95), 0.05, 1e-12);
}

TEST(HistoricalVar, SymmetricMedianIsNearZero) {
    std::vector<double> v;
    for (int i = 1; i <= 200; ++i) {
        v.push_back(0.0001 * i);
        v.push_back(-0.0001 * i);
    }
    EXPECT_NEAR(historical_var(rs(v), 0.5), 0.0, 1e-4);
}

TEST(HistoricalVar, GainsOnlyFloorsAtZero) {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(0.001 * (i + 1));
    EXPECT_EQ(historical_var(rs(v), 0.95), 0.0);
}

TEST(HistoricalVar, MinimumSample) {
    EXPECT_EQ(historical_var_min_obs(0.95), 20u);
    EXPECT_EQ(kind_of([] { historical_var(rs(std::vector<double>(19, -0.01)), 0.95); }), ErrorKind::insufficient_data);
    EXPECT_NO_THROW(historical_var(rs(std::vector<double>(20, -0.01)), 0.95));
}

TEST(HistoricalVar, AddingWorseLossNeverDecreases) {
    auto v = gaussian(250, 0.0, 0.02, 8);
    double prev = historical_var(rs(v), 0.95);
    for (int k = 0; k < 20; ++k) {
        v.push_back(*std::min_element(v.begin(), v.end()) - 0.01);
        const double now = historical_var(rs(v), 0.95);
        EXPECT_GE(now, prev - 1e-15);
        prev = now;
    }
}

TEST(Quantile, InterpolatesBetweenOrderStatistics) {
    // h = n p on 1-based order statistics.
    const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.625), 2.5);
    EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(x, 1.0), 4.0);
}

TEST(CornishFisher, CollapsesToGaussianWhenMomentsVanish) {
    for (double z : {-2.5, -1.0, 0.3}) EXPECT_DOUBLE_EQ(cornish_fisher_z(z, 0.0, 0.0), z);
    const double z01 = -2.3263478740408408;
    EXPECT_NEAR(modified_var(0.001, 0.02, 0.0, 0.0, 0.99), -(0.001 + 0.02 * z01), 1e-12);
}

TEST(CornishFisher, PlugInArithmetic) {
    const double z = -2.3263478740408408;
    const double zcf = z + (z * z - 1.0) * (-1.0) / 6.0 - (2 * z * z * z - 5 * z) * 1.0 / 36.0;
    EXPECT_NEAR(modified_var(0.0, 0.02, -1.0, 0.0, 0.99), -0.02 * zcf, 1e-12);
}

TEST(CornishFisher, GaussianSampleNearGaussianVar) {
    const auto v = gaussian(20000, 0.0005, 0.02, 5);
    const auto m = moments(v);
    const double gauss = -(m.mean + m.stdev * -2.3263478740408408);
    EXPECT_NEAR(cornish_fisher_mvar(rs(v), 0.99), gauss, 0.05 * gauss);
}

TEST(CornishFisher, DegenerateSigma) {
    EXPECT_DOUBLE_EQ(modified_var(-0.01, 0.0, 0.0, 0.0, 0.99), 0.01);
    EXPECT_DOUBLE_EQ(modified_var(0.01, 0.0, 0.0, 0.0, 0.99), 0.0);
    EXPECT_EQ(kind_of([] { cornish_fisher_mvar(rs(std::vector<double>(29, 0.01)), 0.99); }), ErrorKind::insufficient_data);
}

TEST(Moments, BiasUncorrectedRatios) {
    const std::vector<double> x{1, 2, 3, 10};
    const double mean = 4.0;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        m2 += std::pow(v - mean, 2) / 4;
        m3 += std::pow(v - mean, 3) / 4;
        m4 += std::pow(v - mean, 4) / 4;
    }
    const auto m = moments(x);
    EXPECT_DOUBLE_EQ(m.mean, mean);
    EXPECT_NEAR(m.stdev, std::sqrt(m2 * 4 / 3), 1e-12);
    EXPECT_NEAR(m.skewness, m3 / std::pow(m2, 1.5), 1e-12);
    EXPECT_NEAR(m.excess_kurtosis, m4 / (m2 * m2) - 3.0, 1e-12);
}

TEST(Blend, EndpointsAndArithmetic) {
    const auto a = ReturnSeries::from_values("A", {0.01, 0.02, 0.03});
    const auto b = ReturnSeries::from_values("B", {-0.05, 0.04});
    EXPECT_EQ(blend_returns(a, b, 0.0).values(), (std::vector<double>{0.01, 0.02}));
    EXPECT_EQ(blend_returns(a, b, 1.0).values(), (std::vector<double>{-0.05, 0.04}));
    EXPECT_NEAR(blend_returns(a, b, 0.1).values()[0], 0.004, 1e-15);
}

TEST(Blend, IdenticalSeriesKeepsMvar) {
    const auto r = rs(gaussian(500, 0.0, 0.03, 9));
    EXPECT_NEAR(cornish_fisher_mvar(blend_returns(r, r, 0.1), 0.99), cornish_fisher_mvar(r, 0.99), 1e-12);
}

TEST(Blend, DisjointDatesIsAlignmentError) {
    const auto a = ReturnSeries::from_values("A", {0.01}, parse_date("2020-01-01"));
    const auto b = ReturnSeries::from_values("B", {0.01}, parse_date("2021-01-01"));
    EXPECT_EQ(kind_of([&] { blend_returns(a, b, 0.5); }), ErrorKind::alignment);
}

TEST(Drawdown, HandTrace) {
    const auto dd = max_drawdown(PriceSeries::from_closes("X", {100, 50, 75}));
    EXPECT_DOUBLE_EQ(dd.max_drawdown, 0.5);
    ASSERT_EQ(dd.path.size(), 3u);
    EXPECT_DOUBLE_EQ(*dd.path[0].value, 0.0);
    EXPECT_DOUBLE_EQ(*dd.path[1].value, 0.5);
    EXPECT_DOUBLE_EQ(*dd.path[2].value, 0.25);
}

TEST(Drawdown, MonotoneAndFlat) {
    EXPECT_EQ(max_drawdown(PriceSeries::from_closes("X", {1, 2, 3, 4})).max_drawdown, 0.0);
    EXPECT_EQ(max_drawdown(PriceSeries::from_closes("X", {100, 100})).max_drawdown, 0.0);
}

TEST(Drawdown, ScaleInvariant) {
    Rng rng(12);
    std::vector<double> a{50.0};
    for (int i = 0; i < 300; ++i) a.push_back(a.back() * std::exp(0.04 * rng.normal()));
    auto b = a;
    for (auto& x : b) x *= 37.5;
    const double da = max_drawdown(PriceSeries::from_closes("A", a)).max_drawdown;
    EXPECT_NEAR(max_drawdown(PriceSeries::from_closes("B", b)).max_drawdown, da, 1e-12);
    EXPECT_GE(da, 0.0);
    EXPECT_LE(da, 1.0);
}

TEST(RollingCorrelation, IdentityAndNegation) {
    const auto v = gaussian(100, 0.0, 0.01, 1);
    std::vector<double> neg(v.size());
    std::transform(v.begin(), v.end(), neg.begin(), [](double x) { return -x; });
    for (const auto& pt : rolling_correlation(rs(v), rs(v), 20)) EXPECT_NEAR(*pt.value, 1.0, 1e-12);
    for (const auto& pt : rolling_correlation(rs(v), rs(neg), 20)) EXPECT_NEAR(*pt.value, -1.0, 1e-12);
}

TEST(RollingCorrelation, IndependentNoiseIsSmall) {
    const auto a = rs(gaussian(1000, 0.0, 0.01, 31));
    const auto b = rs(gaussian(1000, 0.0, 0.01, 32));
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& pt : rolling_correlation(a, b, 60)) {
        ASSERT_TRUE(pt.value.has_value());
        EXPECT_LE(std::abs(*pt.value), 1.0 + 1e-12);
        sum += std::abs(*pt.value);
        ++n;
    }
    EXPECT_LT(sum / n, 0.2);
}

TEST(RollingCorrelation, ZeroVarianceWindowUndefined) {
    std::vector<double> flat(30, 0.01);
    const auto out = rolling_correlation(rs(flat), rs(gaussian(30, 0, 0.01, 2)), 10);
    for (const auto& pt : out) EXPECT_FALSE(pt.value.has_value());
}

TEST(PriceCsv, ParsesLongFormatWithBom) {
    std::istringstream in("\xEF\xBB\xBF" "date,symbol,close\n2024-01-03,BTC,42000\n2024-01-02,BTC,41000.5\n2024-01-02,SPX,4700\r\n");
    const auto m = read_price_csv(in);
    ASSERT_EQ(m.size(), 2u);
    const auto& btc = m.at("BTC");
    ASSERT_EQ(btc.size(), 2u);
    EXPECT_EQ(format_date(btc.observations()[0].date), "2024-01-02");
    EXPECT_DOUBLE_EQ(btc.observations()[0].close, 41000.5);
}

TEST(PriceCsv, Malformed) {
    for (const char* text : {"", "date,close\n", "date,symbol,close\n2024-01-02,BTC,abc\n",
                             "date,symbol,close\n2024-13-02,BTC,1\n", "date,symbol,close\n2024-01-02,BTC,1\n2024-01-02,BTC,2\n",
                             "date,symbol,close\n2024-01-02,BTC,-1\n"}) {
        std::istringstream in(text);
        EXPECT_EQ(kind_of([&] { read_price_csv(in); }), ErrorKind::parse) << text;
    }
}

TEST(RiskReportTest, BundledSampleFields) {
    const char* dir = std::getenv("CSL_DATA_DIR");
    ASSERT_NE(dir, nullptr);
    const auto m = read_price_csv_file(std::string(dir) + "/sample_prices.csv");
    const auto& p = m.at("BTC");
    const auto rep = risk_report(p);
    const auto r = log_returns(p);
    EXPECT_DOUBLE_EQ(rep.annualized_vol, annualized_volatility(r));
    EXPECT_DOUBLE_EQ(rep.var_95, historical_var(r, 0.95));
    EXPECT_DOUBLE_EQ(rep.max_drawdown, max_drawdown(p).max_drawdown);
    EXPECT_GT(rep.annualized_vol, 0.0);
    EXPECT_GT(rep.var_95, 0.0);
}
