#include "csl/report.hpp"

#include "csl/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace csl::report {

std::vector<ThroughputRow> throughput_report(const std::vector<ThroughputEntry>& entries) {
    if (entries.empty()) throw Error(ErrorKind::empty_input, "throughput report needs at least one entry");
    std::vector<ThroughputRow> rows;
    for (const auto& e : entries) {
        if (!(e.value > 0.0) || !std::isfinite(e.value))
            throw Error(ErrorKind::domain, "throughput for '" + e.name + "' must be positive");
        rows.push_back({e.name, e.unit == RateUnit::per_year ? e.value / kSecondsPerYear : e.value, 0.0});
    }
    const double slowest =
        std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.tps < b.tps; })->tps;
    for (auto& r : rows) r.ratio = r.tps / slowest;
    return rows;
}

std::vector<ThroughputEntry> default_throughput_entries() {
    return {{"Bitcoin", 6.0, RateUnit::per_second},
            {"Visa", 303e9, RateUnit::per_year},
            {"Mastercard", 159.4e9, RateUnit::per_year}};
}

namespace {

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen() {
        if (hi > lo) return;
        const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
};

} // namespace

std::string render_chart(const std::vector<ChartSeries>& series, const ChartSpec& spec) {
    if (series.empty()) throw Error(ErrorKind::config, "chart needs at least one series");
    if (spec.width < 200 || spec.height < 150) throw Error(ErrorKind::config, "chart canvas is too small");
    std::size_t points = 0;
    for (const auto& s : series) {
        if (s.y.empty()) throw Error(ErrorKind::config, "chart series '" + s.name + "' is empty");
        if (spec.type == ChartType::line && s.x.size() != s.y.size())
            throw Error(ErrorKind::config, "chart series '" + s.name + "' has mismatched x/y lengths");
        for (double v : s.y) {
            if (!std::isfinite(v)) throw Error(ErrorKind::config, "chart values must be finite");
            if (spec.log_y && !(v > 0.0)) throw Error(ErrorKind::config, "log-scale chart needs positive values");
        }
        points = std::max(points, s.y.size());
    }
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.y) yr.add(ty(v));
        if (spec.type == ChartType::line)
            for (double v : s.x) xr.add(v);
    }
    if (spec.type == ChartType::bar && !spec.log_y) yr.add(0.0);
    if (spec.type == ChartType::bar) {
        xr.lo = 0.0;
        xr.hi = static_cast<double>(points);
    }
    xr.widen();
    yr.widen();
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n";
    if (!spec.title.empty())
        out << "<text x=\"" << fmt2(spec.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
            << escape(spec.title) << "</text>\n";
    out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top + ph) << "\" x2=\"" << fmt2(left + pw) << "\" y2=\""
        << fmt2(top + ph) << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left) << "\" y2=\""
        << fmt2(top + ph) << "\" stroke=\"#000000\"/>\n";

    auto ylabel = [&](double t) { return spec.log_y ? format_number(std::pow(10.0, t)) : format_number(t); };
    out << "<text x=\"" << fmt2(left - 6) << "\" y=\"" << fmt2(top + ph) << "\" text-anchor=\"end\" font-size=\"11\">"
        << escape(ylabel(yr.lo)) << "</text>\n";
    out << "<text x=\"" << fmt2(left - 6) << "\" y=\"" << fmt2(top + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << escape(ylabel(yr.hi)) << "</text>\n";
    if (spec.type == ChartType::line) {
        out << "<text x=\"" << fmt2(left) << "\" y=\"" << fmt2(top + ph + 16) << "\" text-anchor=\"start\" font-size=\"11\">"
            << escape(format_number(xr.lo)) << "</text>\n";
        out << "<text x=\"" << fmt2(left + pw) << "\" y=\"" << fmt2(top + ph + 16)
            << "\" text-anchor=\"end\" font-size=\"11\">" << escape(format_number(xr.hi)) << "</text>\n";
    }
    if (!spec.x_label.empty())
        out << "<text x=\"" << fmt2(left + pw / 2) << "\" y=\"" << fmt2(spec.height - 12.0)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(spec.x_label) << "</text>\n";
    if (!spec.y_label.empty())
        out << "<text x=\"16\" y=\"" << fmt2(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
            << fmt2(top + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* colour = kPalette[si % std::size(kPalette)];
        if (spec.type == ChartType::line) {
            out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.y.size(); ++i) {
                if (i) out << ' ';
                out << fmt2(px(s.x[i])) << ',' << fmt2(py(s.y[i]));
            }
            out << "\"/>\n";
        } else {
            const double slot = pw / static_cast<double>(points);
            const double bw = slot * 0.8 / static_cast<double>(series.size());
            const double base = spec.log_y ? top + ph : py(0.0);
            for (std::size_t i = 0; i < s.y.size(); ++i) {
                const double x0 = left + slot * (static_cast<double>(i) + 0.1) + bw * static_cast<double>(si);
                const double y1 = py(s.y[i]);
                out << "<rect x=\"" << fmt2(x0) << "\" y=\"" << fmt2(std::min(y1, base)) << "\" width=\"" << fmt2(bw)
                    << "\" height=\"" << fmt2(std::abs(base - y1)) << "\" fill=\"" << colour << "\"/>\n";
            }
        }
        if (series.size() > 1) {
            const double ly = top + 14.0 * static_cast<double>(si);
            out << "<text x=\"" << fmt2(left + pw - 4) << "\" y=\"" << fmt2(ly + 10) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
                << colour << "\">" << escape(s.name) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

namespace {

// Two-element rows would otherwise be read as key/value pairs.
json pair_rows(std::initializer_list<std::pair<const char*, double>> rows) {
    json out = json::array();
    for (const auto& [k, v] : rows) out.push_back(json::array({k, v}));
    return out;
}

} // namespace

json reference_tables() {
    json t = json::object();
    t["nakamoto_attack_prob"] = {
        {"citation", "Nakamoto (2008), attacker success probability by hashrate share q and confirmations z"},
        {"columns", {"q", "z", "P"}},
        {"rows", json::array()},
        {"ladder_columns", {"q", "z_for_P_below_0.001"}},
        {"ladder", json::array()}};
    for (const auto& r : nakamoto_reference()) t["nakamoto_attack_prob"]["rows"].push_back({r.q, r.z, r.p});
    for (const auto& [q, z] : nakamoto_ladder_reference()) t["nakamoto_attack_prob"]["ladder"].push_back({q, z});

    t["budish_attack_cost"] = {{"citation", "Budish (2018), expected net attack cost alpha in block rewards"},
                               {"columns", {"A", "e", "alpha"}},
                               {"rows", json::array()}};
    for (const auto& c : budish_reference()) t["budish_attack_cost"]["rows"].push_back({c.A, c.e, c.alpha});

    t["51_attack_cost"] = {
        {"citation", "Harvey (2025), cost of a one-week 51% attack"},
        {"columns", {"component", "value"}},
        {"rows",
         pair_rows({{"total_hashrate_ehs", 600},
          {"hashrate_needed_ehs", 306},
          {"hashrate_per_unit_ths", 200},
          {"units_required", 1530000},
          {"total_hardware_cost_usd", 4590000000.0},
          {"datacenter_capex_usd", 1340000000.0},
          {"total_capex_usd", 5930000000.0},
          {"total_power_gw", 5.355},
          {"electricity_cost_usd", 44982000.0},
          {"datacenter_opex_usd", 80300000.0},
          {"total_opex_usd", 125282000.0},
          {"total_attack_cost_usd", 6.06e9}})}};

    t["garch_params"] = {{"citation", "GARCH(1,1) on daily Bitcoin returns, 2020-2025"},
                         {"columns", {"parameter", "coefficient", "p_value"}},
                         {"rows", {{"omega", 0.3375, "0.0213"}, {"alpha1", 0.0614, "0.0007"}, {"beta1", 0.9257, "<0.0001"}}}};

    t["imf_deflation_impact"] = {
        {"citation", "End et al. (2015), Table 3: change in debt-to-GDP under deflation regimes"},
        {"columns", {"regime", "coefficient_pp_per_year", "stderr", "observations", "r_squared"}},
        {"rows",
         {{"general", 1.732, 0.593, 2171, 0.491},
          {"expansionary", 0.435, 0.360, 2171, 0.486},
          {"recessionary", 3.279, 0.803, 2171, 0.495}}}};

    t["charfi_did_summary"] = {{"citation", "Charfi (2024), difference-in-differences estimates, El Salvador"},
                               {"columns", {"variable", "did_coefficient_pct"}},
                               {"rows",
                                pair_rows({{"gdp_growth_rate", 0.779},
                                 {"employment_rate", -0.465},
                                 {"investment_rate", -0.645},
                                 {"inflation_rate", 4.145},
                                 {"remittance_inflows", 1.805},
                                 {"government_bond_rate", 0.482}})}};

    t["cong_wash_trading"] = {{"citation", "Cong et al. (2022), wash trading share of reported volume, unregulated exchanges"},
                              {"columns", {"category", "equal_weighted_pct", "volume_weighted_pct"}},
                              {"rows",
                               {{"all_unregulated", 70.85, 77.50},
                                {"unregulated_tier1", 53.41, 61.86},
                                {"unregulated_tier2", 81.76, 86.26}}}};

    t["wash_trading"] = {{"citation", "Le Pennec, Fiedler and Ante (2021), suspicious volume on select exchanges"},
                         {"columns", {"exchange", "reported_usd", "predicted_real_usd", "printed_suspicious_pct"}},
                         {"rows", json::array()}};
    for (const auto& w : wash_trading_reference())
        t["wash_trading"]["rows"].push_back({w.exchange, w.reported, w.predicted_real, w.printed_fraction * 100.0});

    t["downside_risk_covid"] = {
        {"citation", "Conlon, Corbet and McGee (2020), 1% MVaR with a 10% Bitcoin allocation"},
        {"columns", {"index", "equity_only_mvar_pct", "with_bitcoin_mvar_pct", "change_pct"}},
        {"rows",
         {{"S&P 500", 9.09, 11.57, 27.3},
          {"MSCI World", 9.92, 11.84, 19.4},
          {"FTSE 100", 11.57, 14.52, 25.5},
          {"CSI 300", 5.37, 4.77, -11.2}}}};

    for (auto& [id, table] : t.items()) table["id"] = id;
    return t;
}

std::vector<NakamotoRow> nakamoto_reference() {
    return {{0.1, 0, 1.0000000},  {0.1, 1, 0.2045873},  {0.1, 2, 0.0509779},  {0.1, 5, 0.0009137},
            {0.1, 10, 0.0000012}, {0.3, 0, 1.0000000},  {0.3, 5, 0.1773523},  {0.3, 10, 0.0416605},
            {0.3, 15, 0.0101008}, {0.3, 20, 0.0024804}};
}

std::vector<std::pair<double, int>> nakamoto_ladder_reference() {
    return {{0.10, 5}, {0.15, 8}, {0.20, 11}, {0.25, 15}, {0.30, 24}, {0.35, 41}, {0.40, 89}, {0.45, 340}};
}

std::vector<BudishCell> budish_reference() {
    return {{1.05, 6, 2.33},   {1.05, 100, 9.2},   {1.05, 1000, 53.5}, {1.25, 6, 3.35},
            {1.25, 100, 25.9}, {1.25, 1000, 250.5}, {1.5, 6, 4.88},    {1.5, 100, 51.0},
            {1.5, 1000, 501.0}, {2.0, 6, 8.39},     {2.0, 100, 102.0}, {2.0, 1000, 1002.0}};
}

std::vector<WashRow> wash_trading_reference() {
    return {{"Exchange C (WTG)", 110554502.0, 1030878.0, 0.98},
            {"Exchange F (WTG)", 104211641.0, 3053750.0, 0.96},
            {"Exchange H (WTG)", 91207546.0, 1581087.0, 0.97}};
}

void write_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw OutputError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw OutputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw OutputError("cannot move output into place at '" + target.string() + "'");
    }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

} // namespace csl::report
