#include "csl/error.hpp"
#include "csl/forensics.hpp"
#include "csl/random.hpp"
#include "csl/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

using namespace csl;
using namespace csl::forensics;

namespace {

std::vector<double> log_uniform(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = std::pow(10.0, rng.uniform(0.0, 3.0));
    return out;
}

std::vector<double> pareto(std::size_t n, double alpha, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = std::pow(1.0 - rng.uniform(), -1.0 / alpha);
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

TEST(Benford, ExpectedShares) {
    EXPECT_NEAR(benford_expected(1), 0.30103, 1e-5);
    double total = 0.0;
    for (int d = 1; d <= 9; ++d) total += benford_expected(d);
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_THROW(benford_expected(0), Error);
}

TEST(Benford, FirstDigit) {
    EXPECT_EQ(first_digit(1.0), 1);
    EXPECT_EQ(first_digit(9.999), 9);
    EXPECT_EQ(first_digit(10.0), 1);
    EXPECT_EQ(first_digit(1000.0), 1);
    EXPECT_EQ(first_digit(0.00345), 3);
    EXPECT_EQ(first_digit(999999.0), 9);
    for (int e = -20; e <= 20; ++e) EXPECT_EQ(first_digit(std::pow(10.0, e)), 1) << e;
    EXPECT_THROW(first_digit(0.0), Error);
}

TEST(Benford, LogUniformPassesUniformFails) {
    const auto pass = benford_test(log_uniform(100000, 3));
    EXPECT_TRUE(pass.pass) << pass.chi2;
    EXPECT_EQ(pass.n, 100000u);
    const auto fail = benford_test(synthetic_wash_sizes(100000, 3));
    EXPECT_FALSE(fail.pass);
    EXPECT_GT(fail.chi2, 1000.0);
}

TEST(Benford, ChiSquareOracle) {
    const auto x = log_uniform(2000, 8);
    std::array<double, 9> counts{};
    for (double v : x) {
        std::ostringstream s;
        s.precision(17);
        s << std::scientific << v;
        counts[s.str()[0] - '1'] += 1.0;
    }
    double chi2 = 0.0;
    for (int d = 0; d < 9; ++d) {
        const double p = std::log10(1.0 + 1.0 / (d + 1));
        chi2 += std::pow(counts[d] / x.size() - p, 2) / p;
    }
    chi2 *= x.size();
    EXPECT_NEAR(benford_test(x).chi2, chi2, 1e-9);
}

TEST(Benford, PowerOfTenInvariant) {
    auto x = log_uniform(3000, 4);
    const double base = benford_test(x).chi2;
    for (auto& v : x) v *= 1000.0;
    EXPECT_NEAR(benford_test(x).chi2, base, 1e-9);
}

TEST(Benford, MinimumTrades) {
    EXPECT_EQ(kind_of([] { benford_test(std::vector<double>(kMinTrades - 1, 1.0)); }), ErrorKind::insufficient_data);
}

TEST(Clustering, AllRound) {
    const auto r = size_clustering_test(std::vector<double>(1000, 1.0), ClusteringConfig{{1.0}});
    EXPECT_EQ(r.round_fraction, 1.0);
    EXPECT_EQ(r.shoulder_fraction, 0.0);
    EXPECT_TRUE(r.pass);
}

TEST(Clustering, UniformMatchesBandMeasure) {
    Rng rng(5);
    std::vector<double> x(100000);
    for (auto& v : x) v = rng.uniform(1.0, 100.0);
    const ClusteringConfig cfg;
    const auto r = size_clustering_test(x, cfg);
    // Multiples of 0.5 are a superset of the other grid points.
    EXPECT_NEAR(r.round_fraction, 2 * cfg.tolerance / 0.5, 0.003);
    EXPECT_NEAR(r.excess, 0.0, 0.005);
    EXPECT_FALSE(r.pass);
}

TEST(Clustering, MixtureExcess) {
    Rng rng(6);
    std::vector<double> x(50000);
    for (auto& v : x) v = rng.bernoulli(0.2) ? static_cast<double>(1 + rng.below(50)) : rng.uniform(1.0, 50.0);
    const auto r = size_clustering_test(x);
    EXPECT_NEAR(r.excess, 0.20, 0.02);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.z, 1.645);
}

TEST(Clustering, GridDistance) {
    EXPECT_NEAR(grid_distance(2.49, {0.5}), 0.01, 1e-12);
    EXPECT_NEAR(grid_distance(7.3, {5.0, 10.0}), 2.3, 1e-12);
    EXPECT_NEAR(grid_distance(9.9, {5.0, 10.0}), 0.1, 1e-12);
}

TEST(Clustering, DegenerateConfigs) {
    for (const auto& cfg : {ClusteringConfig{{}}, ClusteringConfig{{0.0}}, ClusteringConfig{{0.05}, 0.01, 5.0}})
        EXPECT_EQ(kind_of([&] { size_clustering_test(std::vector<double>(600, 1.0), cfg); }), ErrorKind::config);
}

TEST(Hill, ParetoTwo) {
    const auto r = hill_tail_index(pareto(100000, 2.0, 7), 1000);
    EXPECT_NEAR(r.exponent, 2.0, 0.2);
    EXPECT_EQ(r.k, 1000u);
}

TEST(Hill, SortedOracle) {
    auto x = pareto(5000, 1.5, 2);
    const std::size_t k = 250;
    const double got = hill_tail_index(x, k).xi;
    std::sort(x.begin(), x.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / x[k]);
    EXPECT_NEAR(got, s / k, 1e-12);
}

TEST(Hill, ExponentialDriftsWithK) {
    Rng rng(3);
    std::vector<double> x(100000);
    for (auto& v : x) v = rng.exponential(1.0);
    // Memorylessness: excesses over the threshold t = ln(n / k) are Exp(1), so
    // xi is close to E[ln(1 + E / t)].
    const auto expected_exponent = [](double t) {
        double sum = 0.0;
        const double h = 1e-3;
        for (double u = 0.5 * h; u < 60.0; u += h) sum += std::log1p(u / t) * std::exp(-u) * h;
        return 1.0 / sum;
    };
    const double small_k = hill_tail_index(x, 100).exponent;
    const double large_k = hill_tail_index(x, 5000).exponent;
    EXPECT_NEAR(small_k / expected_exponent(std::log(1000.0)), 1.0, 0.15);
    EXPECT_NEAR(large_k / expected_exponent(std::log(20.0)), 1.0, 0.05);
    EXPECT_GT(small_k, large_k);
}

TEST(Hill, DegenerateAndErrors) {
    const auto flat = hill_tail_index(std::vector<double>(200, 3.0), 20);
    EXPECT_EQ(flat.xi, 0.0);
    EXPECT_TRUE(std::isinf(flat.exponent));
    EXPECT_EQ(kind_of([] { hill_tail_index(std::vector<double>{1.0, -1.0}, 10); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([] { hill_tail_index(std::vector<double>(100, 1.0), 9); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([] { hill_tail_index(std::vector<double>(20, 1.0), 10); }), ErrorKind::insufficient_data);
    EXPECT_EQ(default_hill_k(100000), 5000u);
    EXPECT_EQ(default_hill_k(100), 10u);
}

TEST(Hill, ScaleInvariant) {
    auto x = pareto(4000, 2.5, 9);
    const double base = hill_tail_index(x, 200).xi;
    for (auto& v : x) v *= 0.37;
    EXPECT_NEAR(hill_tail_index(x, 200).xi, base, 1e-12);
}

TEST(SuspiciousVolume, TableRows) {
    EXPECT_NEAR(suspicious_volume_fraction(110554502, 1030878), 0.9907, 1e-4);
    for (const auto& row : report::wash_trading_reference()) {
        const double f = suspicious_volume_fraction(row.reported, row.predicted_real);
        EXPECT_NEAR(f, 1.0 - row.predicted_real / row.reported, 1e-15);
        EXPECT_NEAR(f, row.printed_fraction, 0.02) << row.exchange;
    }
}

TEST(SuspiciousVolume, Clamping) {
    EXPECT_EQ(suspicious_volume_fraction(10, 10), 0.0);
    EXPECT_EQ(suspicious_volume_fraction(10, 0), 1.0);
    bool clamped = false;
    EXPECT_EQ(suspicious_volume_fraction(10, 12, &clamped), 0.0);
    EXPECT_TRUE(clamped);
    EXPECT_EQ(suspicious_volume_fraction(10, -3, &clamped), 1.0);
    EXPECT_TRUE(clamped);
    suspicious_volume_fraction(10, 3, &clamped);
    EXPECT_FALSE(clamped);
    EXPECT_EQ(kind_of([] { suspicious_volume_fraction(0, 1); }), ErrorKind::domain);
}

TEST(Verdict, AuthenticAndWashTapes) {
    const auto authentic = forensic_verdict(TradeTape::from_sizes(synthetic_authentic_sizes(20000, 1)));
    EXPECT_EQ(authentic.verdict, Verdict::consistent);
    EXPECT_LE(authentic.failed_tests, 1);
    const auto wash = forensic_verdict(TradeTape::from_sizes(synthetic_wash_sizes(20000, 1)), {}, {{100.0, 2.0}});
    EXPECT_EQ(wash.verdict, Verdict::suspicious);
    EXPECT_EQ(wash.failed_tests, 3);
    ASSERT_TRUE(wash.suspicious_volume_fraction);
    EXPECT_DOUBLE_EQ(*wash.suspicious_volume_fraction, 0.98);
}

TEST(Verdict, SingleFailureIsConsistent) {
    // No round-size clustering, but Benford digits and a power-law tail.
    const auto r = forensic_verdict(TradeTape::from_sizes(synthetic_authentic_sizes(20000, 2, 1.5, 0.0)));
    EXPECT_FALSE(r.clustering.pass);
    EXPECT_EQ(r.failed_tests, 1);
    EXPECT_EQ(r.verdict, Verdict::consistent);
    ForensicConfig strict;
    strict.fail_threshold = 1;
    EXPECT_EQ(forensic_verdict(TradeTape::from_sizes(synthetic_authentic_sizes(20000, 2, 1.5, 0.0)), strict).verdict,
              Verdict::suspicious);
}

TEST(Verdict, Deterministic) {
    const auto tape = TradeTape::from_sizes(synthetic_authentic_sizes(5000, 4));
    const auto a = forensic_verdict(tape), b = forensic_verdict(tape);
    EXPECT_EQ(a.benford.chi2, b.benford.chi2);
    EXPECT_EQ(a.clustering.z, b.clustering.z);
    EXPECT_EQ(a.tail.xi, b.tail.xi);
    EXPECT_EQ(synthetic_authentic_sizes(100, 9), synthetic_authentic_sizes(100, 9));
}

TEST(TradeCsv, ParsesEpochAndIso) {
    std::istringstream in("timestamp,price,size\n1700000000,100.5,2\n2023-11-14T22:13:21Z,101,0.5\n2023-11-15,99,3\n");
    const auto tape = read_trade_csv(in);
    ASSERT_EQ(tape.size(), 3u);
    EXPECT_EQ(tape.trades()[0].timestamp, 1700000000.0);
    EXPECT_EQ(tape.trades()[1].timestamp, 1700000001.0);
    EXPECT_EQ(tape.trades()[2].timestamp, 1700006400.0);
    EXPECT_DOUBLE_EQ(parse_timestamp("1970-01-01T00:00:01.5"), 1.5);
}

TEST(TradeCsv, Malformed) {
    for (const char* text : {"", "time,price,size\n", "timestamp,price,size\n1,2\n", "timestamp,price,size\n1,x,2\n",
                             "timestamp,price,size\n5,1,1\n4,1,1\n", "timestamp,price,size\n1,1,0\n",
                             "timestamp,price,size\n2023-02-30,1,1\n"}) {
        std::istringstream in(text);
        EXPECT_EQ(kind_of([&] { read_trade_csv(in); }), ErrorKind::parse) << text;
    }
}
