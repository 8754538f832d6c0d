#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace csl::forensics {

struct Trade {
    double timestamp;  // epoch seconds
    double price;
    double size;
};

class TradeTape {
public:
    TradeTape() = default;
    explicit TradeTape(std::vector<Trade> trades);

    static TradeTape from_sizes(const std::vector<double>& sizes);

    const std::vector<Trade>& trades() const noexcept { return trades_; }
    std::size_t size() const noexcept { return trades_.size(); }
    std::vector<double> sizes() const;
    std::vector<double> prices() const;

private:
    std::vector<Trade> trades_;
};

// Header `timestamp,price,size`; timestamps are epoch seconds or ISO-8601
// (YYYY-MM-DD[THH:MM:SS[.fff]][Z]).
TradeTape read_trade_csv(std::istream& in);
double parse_timestamp(const std::string& s);

enum class Field { price, size };

constexpr std::size_t kMinTrades = 500;
constexpr double kBenfordCritical = 15.507;  // chi-square, 8 df, 5%

double benford_expected(int digit);
// First significant digit of a positive finite value.
int first_digit(double x);

struct BenfordResult {
    double chi2;
    int df = 8;
    bool pass;
    std::array<double, 9> observed;  // shares of digits 1..9
    std::size_t n;
};

BenfordResult benford_test(const TradeTape& tape, Field field = Field::size);
BenfordResult benford_test(const std::vector<double>& values);

struct ClusteringConfig {
    std::vector<double> grid = {0.5, 1.0, 5.0, 10.0};  // sizes on any multiple are "round"
    double tolerance = 0.01;
    double shoulder_width = 5.0;  // shoulder band spans (tol, (1 + W) tol]
    double z_critical = 1.645;
    void validate() const;
};

struct ClusteringResult {
    double round_fraction;
    double shoulder_fraction;
    double benchmark_fraction;
    double excess;
    double z;
    bool pass;
};

// Distance from x to the nearest multiple of any grid size.
double grid_distance(double x, const std::vector<double>& grid);

ClusteringResult size_clustering_test(const TradeTape& tape, const ClusteringConfig& config = {});
ClusteringResult size_clustering_test(const std::vector<double>& sizes, const ClusteringConfig& config = {});

struct HillResult {
    double xi;
    double exponent;  // 1/xi, +inf when xi = 0
    std::size_t k;
};

HillResult hill_tail_index(const std::vector<double>& sizes, std::size_t k);
HillResult hill_tail_index(const TradeTape& tape, std::size_t k);
std::size_t default_hill_k(std::size_t n);

// Clamps predicted_real into [0, reported]; `clamped` reports whether that happened.
double suspicious_volume_fraction(double reported, double predicted_real, bool* clamped = nullptr);

struct ForensicConfig {
    Field benford_field = Field::size;
    ClusteringConfig clustering;
    std::optional<std::size_t> hill_k;  // default: top 5%
    double tail_min = 1.0;
    double tail_max = 3.0;
    int fail_threshold = 2;
    void validate() const;
};

enum class Verdict { consistent, suspicious };
std::string to_string(Verdict v);

struct ForensicReport {
    BenfordResult benford;
    ClusteringResult clustering;
    HillResult tail;
    bool tail_pass;
    int failed_tests;
    Verdict verdict;
    std::optional<double> suspicious_volume_fraction;
};

ForensicReport forensic_verdict(const TradeTape& tape, const ForensicConfig& config = {},
                                std::optional<std::pair<double, double>> volumes = std::nullopt);

// Authentic-like sizes: log10(size) = 1 + G + V with V ~ U[0, 1) and G geometric,
// P(G >= j) = 10^(-alpha j). V makes the first digit exactly Benford; G gives a
// power-law envelope with exponent alpha. A share of trades is floored to whole
// units, which keeps the first digit but adds round-size clustering.
std::vector<double> synthetic_authentic_sizes(std::size_t n, std::uint64_t seed, double alpha = 1.5,
                                              double round_share = 0.2);
// Wash-like sizes: uniform on [1, 9.99]. Flat digits, no clustering, thin tail.
std::vector<double> synthetic_wash_sizes(std::size_t n, std::uint64_t seed);

} // namespace csl::forensics
