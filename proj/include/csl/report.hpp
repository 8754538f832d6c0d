#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace csl::report {

using nlohmann::json;

// ---- throughput ----

enum class RateUnit { per_second, per_year };

struct ThroughputEntry {
    std::string name;
    double value;
    RateUnit unit = RateUnit::per_second;
};

struct ThroughputRow {
    std::string name;
    double tps;
    double ratio;  // relative to the slowest entry
};

constexpr double kSecondsPerYear = 365.25 * 86400.0;

std::vector<ThroughputRow> throughput_report(const std::vector<ThroughputEntry>& entries);
std::vector<ThroughputEntry> default_throughput_entries();

// ---- charts ----

enum class ChartType { line, bar };

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartSpec {
    ChartType type = ChartType::line;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 420;
};

// Fixed canvas, fixed number formatting, no timestamps: identical inputs give
// identical bytes.
std::string render_chart(const std::vector<ChartSeries>& series, const ChartSpec& spec);

// ---- reference tables ----

// Table constants with their identifier and citation.
json reference_tables();

struct NakamotoRow {
    double q;
    int z;
    double p;
};
std::vector<NakamotoRow> nakamoto_reference();
// (q, z) for P < 0.1%.
std::vector<std::pair<double, int>> nakamoto_ladder_reference();

struct BudishCell {
    double A;
    int e;
    double alpha;
};
std::vector<BudishCell> budish_reference();

struct WashRow {
    std::string exchange;
    double reported;
    double predicted_real;
    double printed_fraction;
};
std::vector<WashRow> wash_trading_reference();

// ---- output ----

// Writes to a temporary sibling then renames over the target.
void write_atomic(const std::string& path, const std::string& contents);
std::string dump_json(const json& j);

// Compact shortest round-trip rendering used in CSV cells.
std::string format_number(double v);

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace csl::report
