#include "csl/app.hpp"

#include "csl/error.hpp"
#include "csl/forensics.hpp"
#include "csl/garch.hpp"
#include "csl/macro.hpp"
#include "csl/marketdata.hpp"
#include "csl/netgame.hpp"
#include "csl/random.hpp"
#include "csl/report.hpp"
#include "csl/routing.hpp"
#include "csl/security.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace csl::app {

namespace fs = std::filesystem;
using report::format_number;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::config, msg); }

// A JSON object with a fixed set of permitted keys.
class Block {
public:
    Block(const json* j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j_) return;
        if (!j_->is_object()) config_error(path_ + " must be an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!ok.count(it.key())) config_error("unknown key '" + it.key() + "' in " + path_);
    }

    bool has(const char* key) const { return j_ && j_->contains(key) && !(*j_)[key].is_null(); }
    const json* raw(const char* key) const { return has(key) ? &(*j_)[key] : nullptr; }
    std::string child_path(const char* key) const { return path_ + "." + key; }

    template <class T>
    T get(const char* key, T fallback) const {
        if (!has(key)) return fallback;
        try {
            return (*j_)[key].get<T>();
        } catch (const json::exception&) {
            config_error(child_path(key) + " has the wrong type");
        }
    }

    template <class T>
    T required(const char* key) const {
        if (!has(key)) config_error(child_path(key) + " is required");
        return get<T>(key, T{});
    }

private:
    const json* j_;
    std::string path_;
};

struct Context {
    const Request& req;
    const Scenario& scenario;
    std::optional<std::uint64_t> seed;
    std::vector<Artifact> artifacts;

    const json* section(const char* name) const {
        if (!scenario.sections.contains(name)) return nullptr;
        return &scenario.sections[name];
    }
    std::uint64_t need_seed() const {
        if (!seed) config_error("command '" + req.command + "' is stochastic and needs a seed (scenario 'seed' or --seed)");
        return *seed;
    }
    void add(std::string name, std::string contents) { artifacts.push_back({std::move(name), std::move(contents)}); }
};

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { row_strings(header); }
    template <class... Cells>
    void row(const Cells&... cells) {
        std::vector<std::string> out;
        (out.push_back(cell(cells)), ...);
        row_strings(out);
    }
    std::string str() const { return buf_.str(); }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(unsigned long long v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) buf_ << (i ? "," : "") << cells[i];
        buf_ << '\n';
    }
    std::size_t width_;
    std::ostringstream buf_;
};

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::string base_name(const std::string& path) { return fs::path(path).filename().string(); }

void require_data_file(const std::string& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::io, "data file '" + path + "' does not exist");
}

std::ifstream open_data(const std::string& path) {
    require_data_file(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read data file '" + path + "'");
    return in;
}

std::string safe_name(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

std::vector<double> index_axis(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    return x;
}

// ---------------------------------------------------------------- risk

std::map<std::string, marketdata::PriceSeries> load_prices(const Context& ctx) {
    if (ctx.req.data_paths.empty()) throw Error(ErrorKind::io, "command '" + ctx.req.command + "' needs --data <prices.csv>");
    std::map<std::string, marketdata::PriceSeries> all;
    for (const auto& path : ctx.req.data_paths) {
        require_data_file(path);
        for (auto& [sym, series] : marketdata::read_price_csv_file(path)) {
            if (all.count(sym)) throw Error(ErrorKind::parse, "symbol '" + sym + "' appears in more than one data file");
            all.emplace(sym, std::move(series));
        }
    }
    return all;
}

json cmd_risk(Context& ctx) {
    Block b(ctx.section("risk"), "sections.risk", {"rolling_window", "correlation_window", "blend"});
    const auto window = b.get<std::size_t>("rolling_window", 30);
    const auto corr_window = b.get<std::size_t>("correlation_window", 60);
    const auto prices = load_prices(ctx);

    json assets = json::object();
    std::map<std::string, marketdata::ReturnSeries> returns;
    std::vector<report::ChartSeries> dd_chart;
    for (const auto& [sym, p] : prices) {
        const auto r = marketdata::log_returns(p);
        returns.emplace(sym, r);
        const auto m = marketdata::moments(r.values());
        const auto dd = marketdata::max_drawdown(p);
        json a;
        a["n_prices"] = p.size();
        a["first_date"] = marketdata::format_date(p.observations().front().date);
        a["last_date"] = marketdata::format_date(p.observations().back().date);
        a["annualized_vol"] = num(marketdata::annualized_volatility(r));
        a["var_95"] = num(marketdata::historical_var(r, 0.95));
        a["mvar_99"] = r.size() >= 30 ? num(marketdata::cornish_fisher_mvar(r, 0.99)) : json(nullptr);
        a["max_drawdown"] = num(dd.max_drawdown);
        a["moments"] = {{"mean", num(m.mean)},
                        {"stdev", num(m.stdev)},
                        {"skewness", num(m.skewness)},
                        {"excess_kurtosis", num(m.excess_kurtosis)}};
        assets[sym] = a;

        Csv dd_csv({"date", "drawdown"});
        report::ChartSeries cs{sym, {}, {}};
        for (std::size_t i = 0; i < dd.path.size(); ++i) {
            const double v = dd.path[i].value.value_or(0.0);
            dd_csv.row(marketdata::format_date(dd.path[i].date), v);
            cs.x.push_back(static_cast<double>(i));
            cs.y.push_back(-v);
        }
        ctx.add("drawdown_" + safe_name(sym) + ".csv", dd_csv.str());
        dd_chart.push_back(std::move(cs));

        if (r.size() >= window && window >= 2) {
            Csv vol_csv({"date", "rolling_vol"});
            for (const auto& pt : marketdata::rolling_stat(r, window, marketdata::RollingStat::volatility))
                vol_csv.row(marketdata::format_date(pt.date), pt.value ? format_number(*pt.value) : std::string());
            ctx.add("rolling_vol_" + safe_name(sym) + ".csv", vol_csv.str());
        }
    }
    ctx.add("drawdown.svg", report::render_chart(dd_chart, {report::ChartType::line, "Drawdown from running peak",
                                                             "observation", "drawdown", false}));

    json results;
    results["assets"] = assets;
    results["rolling_window"] = window;

    if (returns.size() >= 2) {
        const auto& [sa, ra] = *returns.begin();
        const auto& [sb, rb] = *std::next(returns.begin());
        if (ra.size() >= corr_window && rb.size() >= corr_window && corr_window >= 2) {
            Csv corr({"date", "correlation"});
            for (const auto& pt : marketdata::rolling_correlation(ra, rb, corr_window))
                corr.row(marketdata::format_date(pt.date), pt.value ? format_number(*pt.value) : std::string());
            ctx.add("rolling_corr.csv", corr.str());
            results["correlation"] = {{"pair", {sa, sb}}, {"window", corr_window}};
        }
    }

    if (const json* bl = b.raw("blend")) {
        Block blend(bl, b.child_path("blend"), {"base", "overlay", "weight"});
        const auto base = blend.required<std::string>("base");
        const auto overlay = blend.required<std::string>("overlay");
        const auto w = blend.get<double>("weight", 0.1);
        if (!returns.count(base) || !returns.count(overlay))
            config_error("sections.risk.blend refers to a symbol not present in the data");
        const auto mixed = marketdata::blend_returns(returns.at(base), returns.at(overlay), w);
        const double before = marketdata::cornish_fisher_mvar(returns.at(base), 0.99);
        const double after = marketdata::cornish_fisher_mvar(mixed, 0.99);
        results["blend"] = {{"base", base},
                            {"overlay", overlay},
                            {"weight", w},
                            {"base_mvar_99", num(before)},
                            {"blended_mvar_99", num(after)},
                            {"change_pct", before > 0 ? num(100.0 * (after - before) / before) : json(nullptr)}};
    }
    return results;
}

// ---------------------------------------------------------------- garch

json params_json(const garch::GarchParams& p) {
    json alpha = json::array(), beta = json::array();
    for (double a : p.alpha) alpha.push_back(num(a));
    for (double v : p.beta) beta.push_back(num(v));
    return {{"mu", num(p.mu)}, {"omega", num(p.omega)}, {"alpha", alpha}, {"beta", beta}};
}

garch::MeanModel parse_mean(const std::string& s) {
    if (s == "constant") return garch::MeanModel::constant;
    if (s == "zero") return garch::MeanModel::zero;
    config_error("mean model must be 'constant' or 'zero'");
}

json fit_json(const garch::GarchFit& f) {
    return {{"p", f.spec.p},
            {"q", f.spec.q},
            {"mean", f.spec.mean == garch::MeanModel::constant ? "constant" : "zero"},
            {"params", params_json(f.params)},
            {"loglik", num(f.loglik)},
            {"aic", num(f.criteria.aic)},
            {"bic", num(f.criteria.bic)},
            {"aic_per_obs", num(f.criteria.aic_per_obs)},
            {"bic_per_obs", num(f.criteria.bic_per_obs)},
            {"persistence", num(f.persistence)},
            {"half_life", num(f.half_life)},
            {"n", f.n},
            {"iterations", f.iterations}};
}

json cmd_garch(Context& ctx) {
    Block b(ctx.section("garch"), "sections.garch", {"symbol", "p", "q", "mean", "select", "simulate", "annualize"});
    garch::GarchSpec spec{b.get<int>("p", 1), b.get<int>("q", 1), parse_mean(b.get<std::string>("mean", "constant"))};
    spec.validate();
    const bool annualize = b.get<bool>("annualize", true);

    json results;
    marketdata::ReturnSeries r;
    if (!ctx.req.data_paths.empty()) {
        const auto prices = load_prices(ctx);
        std::string sym = b.get<std::string>("symbol", "");
        if (sym.empty()) {
            if (prices.size() != 1) config_error("sections.garch.symbol is required when the data has several symbols");
            sym = prices.begin()->first;
        }
        auto it = prices.find(sym);
        if (it == prices.end()) config_error("symbol '" + sym + "' is not in the data");
        r = marketdata::log_returns(it->second);
        results["source"] = {{"kind", "data"}, {"symbol", sym}};
    } else {
        Block sim(b.raw("simulate"), b.child_path("simulate"), {"mu", "omega", "alpha", "beta", "n", "burn_in"});
        garch::GarchParams truth{sim.get<double>("mu", 0.0), sim.get<double>("omega", 0.2),
                                 sim.get<std::vector<double>>("alpha", {0.1}), sim.get<std::vector<double>>("beta", {0.8})};
        const auto n = sim.get<std::size_t>("n", 5000);
        const auto seed = ctx.need_seed();
        r = marketdata::ReturnSeries::from_values("SIM", garch::simulate(truth, n, seed, sim.get<std::size_t>("burn_in", 500)));
        results["source"] = {{"kind", "simulated"}, {"truth", params_json(truth)}, {"n", n}};
    }

    garch::GarchFit f;
    if (const json* sel = b.raw("select")) {
        Block s(sel, b.child_path("select"), {"max_p", "max_q"});
        const auto selection = garch::select_order(r, s.get<int>("max_p", 3), s.get<int>("max_q", 3), spec.mean);
        json grid = json::array();
        for (const auto& c : selection.grid)
            grid.push_back({{"p", c.spec.p},
                            {"q", c.spec.q},
                            {"ok", c.ok},
                            {"aic_per_obs", c.ok ? num(c.criteria.aic_per_obs) : json(nullptr)},
                            {"bic_per_obs", c.ok ? num(c.criteria.bic_per_obs) : json(nullptr)}});
        results["selection"] = {{"best", {{"p", selection.best.p}, {"q", selection.best.q}}}, {"grid", grid}};
        f = selection.best_fit;
    } else {
        f = garch::fit(r, spec);
    }
    results["fit"] = fit_json(f);

    const auto vol = garch::conditional_vol_path(f, annualize);
    Csv csv({"t", annualize ? "annualized_vol" : "daily_vol"});
    for (std::size_t t = 0; t < vol.size(); ++t) csv.row(t, vol[t]);
    ctx.add("cond_vol.csv", csv.str());
    ctx.add("cond_vol.svg", report::render_chart({{"conditional volatility", index_axis(vol.size()), vol}},
                                                 {report::ChartType::line, "GARCH conditional volatility", "t",
                                                  annualize ? "annualized volatility" : "daily volatility", false}));
    return results;
}

// ---------------------------------------------------------------- security

json nakamoto_rows(const std::vector<double>& qs, const std::vector<int>& zs) {
    json rows = json::array();
    for (double q : qs)
        for (int z : zs) rows.push_back({{"q", q}, {"z", z}, {"p", num(security::attacker_success_probability({q, z}))}});
    return rows;
}

json ladder_rows(const std::vector<double>& qs, double target) {
    json rows = json::array();
    for (double q : qs) rows.push_back({{"q", q}, {"z", security::min_confirmations(q, target)}});
    return rows;
}

json attack_cost_json(const security::AttackCostReport& a) {
    return {{"attack_hashrate_ehs", num(a.attack_hashrate_ehs)},
            {"units", a.units},
            {"hardware_cost", num(a.hardware_cost)},
            {"power_gw", num(a.power_gw)},
            {"energy_cost", num(a.energy_cost)},
            {"datacenter_capex", num(a.datacenter_capex)},
            {"datacenter_opex", num(a.datacenter_opex)},
            {"total_capex", num(a.total_capex)},
            {"total_opex", num(a.total_opex)},
            {"total", num(a.total)}};
}

json cmd_security(Context& ctx) {
    Block b(ctx.section("security"), "sections.security", {"nakamoto", "attack_cost", "budish", "economic_limit", "budget"});
    json results;

    {
        Block n(b.raw("nakamoto"), b.child_path("nakamoto"), {"q", "z", "ladder_q", "target"});
        const auto qs = n.get<std::vector<double>>("q", {0.1, 0.3});
        const auto zs = n.get<std::vector<int>>("z", {0, 1, 2, 5, 10, 15, 20});
        const auto ladder_q = n.get<std::vector<double>>("ladder_q", {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45});
        const double target = n.get<double>("target", 0.001);
        results["nakamoto"] = {{"rows", nakamoto_rows(qs, zs)}, {"ladder", ladder_rows(ladder_q, target)}, {"target", target}};
        Csv csv({"q", "z", "p"});
        for (const auto& row : results["nakamoto"]["rows"])
            csv.row(row["q"].get<double>(), row["z"].get<int>(), row["p"].get<double>());
        ctx.add("nakamoto.csv", csv.str());
    }

    {
        Block a(b.raw("attack_cost"), b.child_path("attack_cost"),
                {"network_hashrate_ehs", "attack_share", "unit_hashrate_ths", "unit_price", "unit_power_w",
                 "datacenter_capex", "datacenter_opex_per_week", "electricity_price_per_kwh", "duration_hours"});
        security::AttackCostModel m;
        m.network_hashrate_ehs = a.get("network_hashrate_ehs", m.network_hashrate_ehs);
        m.attack_share = a.get("attack_share", m.attack_share);
        m.unit_hashrate_ths = a.get("unit_hashrate_ths", m.unit_hashrate_ths);
        m.unit_price = a.get("unit_price", m.unit_price);
        m.unit_power_w = a.get("unit_power_w", m.unit_power_w);
        m.datacenter_capex = a.get("datacenter_capex", m.datacenter_capex);
        m.datacenter_opex_per_week = a.get("datacenter_opex_per_week", m.datacenter_opex_per_week);
        m.electricity_price_per_kwh = a.get("electricity_price_per_kwh", m.electricity_price_per_kwh);
        m.duration_hours = a.get("duration_hours", m.duration_hours);
        results["attack_cost"] = attack_cost_json(security::attack_cost(m));
    }

    if (const json* bj = b.raw("budish")) {
        Block bu(bj, b.child_path("budish"), {"A", "e", "replicas"});
        const auto As = bu.get<std::vector<double>>("A", {1.05, 1.25, 1.5, 2.0});
        const auto es = bu.get<std::vector<int>>("e", {6, 100});
        const auto replicas = bu.get<std::size_t>("replicas", 100000);
        const auto seed = ctx.need_seed();
        json cells = json::array();
        Csv csv({"A", "e", "alpha", "stderr", "replicas"});
        std::uint64_t cell = 0;
        for (double A : As) {
            for (int e : es) {
                // Each cell gets its own stream so adding cells leaves others unchanged.
                const auto est = security::simulate_attack_alpha(A, e, replicas, splitmix64(seed ^ splitmix64(++cell)));
                json c{{"A", A}, {"e", e}, {"alpha", num(est.alpha_hat)}, {"stderr", num(est.stderr_)}, {"replicas", replicas}};
                for (const auto& ref : report::budish_reference())
                    if (ref.A == A && ref.e == e) c["reference"] = ref.alpha;
                csv.row(A, e, est.alpha_hat, est.stderr_, replicas);
                cells.push_back(c);
            }
        }
        results["budish"] = cells;
        ctx.add("budish.csv", csv.str());
    }

    if (const json* ej = b.raw("economic_limit")) {
        Block el(ej, b.child_path("economic_limit"), {"p_block", "v_attack", "alpha"});
        const auto lim = security::economic_limit(el.required<double>("p_block"), el.required<double>("v_attack"),
                                                  el.required<double>("alpha"));
        results["economic_limit"] = {{"secure", lim.secure}, {"min_p_block", num(lim.min_p_block)}};
    }

    if (const json* bj = b.raw("budget")) {
        Block bg(bj, b.child_path("budget"), {"heights", "price", "fee_per_block", "elasticity"});
        security::BudgetScenario s;
        s.heights = bg.required<std::vector<std::uint64_t>>("heights");
        s.price_path = bg.required<std::vector<double>>("price");
        s.fee_per_block_path = bg.required<std::vector<double>>("fee_per_block");
        s.elasticity = bg.get<double>("elasticity", s.elasticity);
        json pts = json::array();
        Csv csv({"height", "subsidy", "budget", "security_index"});
        report::ChartSeries cs{"security index", {}, {}};
        for (const auto& p : security::project_security_budget(s)) {
            pts.push_back({{"height", p.height}, {"subsidy", p.subsidy}, {"budget", num(p.budget)}, {"security_index", opt(p.security_index)}});
            csv.row(p.height, p.subsidy, p.budget, p.security_index ? format_number(*p.security_index) : std::string());
            if (p.security_index) {
                cs.x.push_back(static_cast<double>(p.height));
                cs.y.push_back(*p.security_index);
            }
        }
        results["budget"] = {{"elasticity", s.elasticity}, {"points", pts}};
        ctx.add("budget.csv", csv.str());
        if (!cs.y.empty())
            ctx.add("budget.svg", report::render_chart({cs}, {report::ChartType::line, "Security budget index",
                                                              "block height", "index", false}));
    }
    return results;
}

json cmd_nakamoto_table(Context& ctx) {
    json rows = json::array();
    Csv csv({"q", "z", "p", "reference", "abs_diff"});
    bool all_match = true;
    for (const auto& ref : report::nakamoto_reference()) {
        const double p = security::attacker_success_probability({ref.q, ref.z});
        const double rounded = std::round(p * 1e7) / 1e7;
        const bool match = std::abs(rounded - ref.p) < 5e-8;
        all_match = all_match && match;
        rows.push_back({{"q", ref.q}, {"z", ref.z}, {"p", p}, {"p_7dp", rounded}, {"reference", ref.p}, {"match", match}});
        csv.row(ref.q, ref.z, p, ref.p, std::abs(p - ref.p));
    }
    json ladder = json::array();
    for (const auto& [q, z_ref] : report::nakamoto_ladder_reference()) {
        const int z = security::min_confirmations(q, 0.001);
        all_match = all_match && z == z_ref;
        ladder.push_back({{"q", q}, {"z", z}, {"reference", z_ref}, {"match", z == z_ref}});
    }
    ctx.add("nakamoto.csv", csv.str());
    return {{"rows", rows}, {"ladder", ladder}, {"all_match", all_match}, {"table", "nakamoto_attack_prob"}};
}

// ---------------------------------------------------------------- netgame

netgame::CentralityKind parse_metric(const std::string& s) {
    if (s == "betweenness") return netgame::CentralityKind::betweenness;
    if (s == "closeness") return netgame::CentralityKind::closeness;
    if (s == "degree") return netgame::CentralityKind::degree;
    if (s == "eigenvector") return netgame::CentralityKind::eigenvector;
    config_error("unknown centrality metric '" + s + "'");
}

json cmd_netgame(Context& ctx) {
    Block b(ctx.section("netgame"), "sections.netgame", {"n", "b_grid", "c_grid", "null_model"});
    const int n = b.get<int>("n", 5);
    const auto bs = b.get<std::vector<double>>("b_grid", {0.0, 0.25, 0.5, 0.75, 1.0});
    const auto cs = b.get<std::vector<double>>("c_grid", {0.1, 0.2, 0.4, 0.8, 1.6});
    if (bs.empty() || cs.empty()) config_error("sections.netgame grids must be nonempty");

    json cells = json::array();
    Csv csv({"b", "c", "winner", "social_cost", "star_is_nash"});
    std::optional<json> witness;
    for (const auto& cell : netgame::social_optimum_map(n, bs, cs)) {
        json c{{"b", cell.b}, {"c", cell.c}, {"winner", netgame::to_string(cell.winner)}, {"social_cost", num(cell.cost)}};
        std::string nash_cell;
        if (cell.winner == netgame::Topology::star && n <= netgame::kMaxNashNodes) {
            const auto res = netgame::is_nash(netgame::make_topology(netgame::Topology::star, n), {cell.b, cell.c});
            c["star_is_nash"] = res.is_equilibrium;
            nash_cell = res.is_equilibrium ? "true" : "false";
            if (res.is_equilibrium && !witness) witness = json{{"b", cell.b}, {"c", cell.c}};
        } else {
            c["star_is_nash"] = nullptr;
        }
        csv.row(cell.b, cell.c, netgame::to_string(cell.winner), cell.cost, nash_cell);
        cells.push_back(c);
    }
    ctx.add("optimum_map.csv", csv.str());
    json results{{"n", n}, {"optimum_map", cells}, {"star_equilibrium_cell", witness ? *witness : json(nullptr)}};

    if (const json* nm = b.raw("null_model")) {
        Block m(nm, b.child_path("null_model"), {"n", "m", "samples", "swaps_factor", "metric"});
        const auto metric_name = m.get<std::string>("metric", "betweenness");
        const auto metric = parse_metric(metric_name);
        const auto seed = ctx.need_seed();
        netgame::Graph g;
        json source;
        if (!ctx.req.data_paths.empty()) {
            auto in = open_data(ctx.req.data_paths.front());
            g = netgame::read_edge_list(in);
            source = {{"kind", "edge_list"}, {"file", base_name(ctx.req.data_paths.front())}};
        } else {
            const int gn = m.get<int>("n", 200);
            const int gm = m.get<int>("m", 2);
            g = netgame::preferential_attachment(gn, gm, seed);
            source = {{"kind", "preferential_attachment"}, {"n", gn}, {"m", gm}};
        }
        const auto res = netgame::null_model_comparison(g, metric, m.get<double>("swaps_factor", 10.0),
                                                        m.get<std::size_t>("samples", 100), splitmix64(seed + 1));
        results["null_model"] = {{"source", source},
                                 {"metric", metric_name},
                                 {"nodes", g.size()},
                                 {"edges", g.edge_count()},
                                 {"observed_gini", num(res.observed_gini)},
                                 {"expected_gini", num(res.expected_gini)},
                                 {"stdev", num(res.stdev)},
                                 {"zscore", num(res.zscore)},
                                 {"samples", res.samples},
                                 {"swaps_applied", res.swaps_applied}};
        ctx.add("gini.svg", report::render_chart({{"gini", {0, 1}, {res.observed_gini, res.expected_gini}}},
                                                 {report::ChartType::bar, "Centrality Gini: observed vs null",
                                                  "observed | null mean", "gini", false}));
    }
    return results;
}

// ---------------------------------------------------------------- route

json cmd_route(Context& ctx) {
    Block b(ctx.section("route"), "sections.route", {"calibration", "probe"});
    Block cal(b.raw("calibration"), b.child_path("calibration"),
              {"n", "k", "rewire", "capacity_log_mean", "capacity_log_sd", "balance_alpha"});
    Block pr(b.raw("probe"), b.child_path("probe"),
             {"n_sources", "amounts", "amount_fractions", "payments_per_amount", "offline_prob", "max_retries"});
    const auto seed = ctx.need_seed();

    routing::ChannelGraph g;
    json source;
    if (!ctx.req.data_paths.empty()) {
        auto in = open_data(ctx.req.data_paths.front());
        g = routing::read_channel_graph(in);
        source = {{"kind", "channel_list"}, {"file", base_name(ctx.req.data_paths.front())}};
    } else {
        routing::CalibrationConfig c;
        c.n = cal.get("n", c.n);
        c.k = cal.get("k", c.k);
        c.rewire = cal.get("rewire", c.rewire);
        c.capacity_log_mean = cal.get("capacity_log_mean", c.capacity_log_mean);
        c.capacity_log_sd = cal.get("capacity_log_sd", c.capacity_log_sd);
        c.balance_alpha = cal.get("balance_alpha", c.balance_alpha);
        c.seed = seed;
        g = routing::small_world_graph(c);
        source = {{"kind", "small_world"}, {"n", c.n}, {"k", c.k}, {"rewire", c.rewire},
                  {"capacity_log_mean", c.capacity_log_mean}, {"capacity_log_sd", c.capacity_log_sd},
                  {"balance_alpha", c.balance_alpha}};
    }

    routing::ProbeConfig p;
    p.n_sources = pr.get("n_sources", p.n_sources);
    p.payments_per_amount = pr.get<std::size_t>("payments_per_amount", 1000);
    p.offline_prob = pr.get("offline_prob", 0.05);
    p.max_retries = pr.get("max_retries", p.max_retries);
    p.seed = splitmix64(seed + 1);
    const double mean_cap = g.mean_capacity();
    if (pr.has("amounts") && pr.has("amount_fractions"))
        config_error("sections.route.probe: give either amounts or amount_fractions");
    if (pr.has("amounts")) {
        p.amounts = pr.get<std::vector<double>>("amounts", {});
    } else {
        for (double f : pr.get<std::vector<double>>("amount_fractions", {0.001, 0.01, 0.05, 0.1, 0.2, 0.5}))
            p.amounts.push_back(f * mean_cap);
    }

    const auto stats = routing::probe_experiment(g, p);
    json rows = json::array();
    Csv csv({"amount", "success_rate", "tcf_share", "unp_share", "no_route_share", "nodes_reached"});
    std::vector<double> xs, ys;
    for (const auto& s : stats) {
        const double tcf = s.error_share[static_cast<std::size_t>(routing::PaymentError::temporary_channel_failure)];
        const double unp = s.error_share[static_cast<std::size_t>(routing::PaymentError::unknown_next_peer)];
        const double nr = s.error_share[static_cast<std::size_t>(routing::PaymentError::no_route)];
        rows.push_back({{"amount", num(s.amount)},
                        {"payments", s.payments},
                        {"success_rate", num(s.success_rate)},
                        {"tcf_share", num(tcf)},
                        {"unp_share", num(unp)},
                        {"no_route_share", num(nr)},
                        {"nodes_reached", num(s.nodes_reached)}});
        csv.row(s.amount, s.success_rate, tcf, unp, nr, s.nodes_reached);
        xs.push_back(static_cast<double>(xs.size()));
        ys.push_back(s.success_rate);
    }
    ctx.add("route.csv", csv.str());
    ctx.add("route_success.svg", report::render_chart({{"success rate", xs, ys}},
                                                      {report::ChartType::line, "Payment success by amount",
                                                       "amount step", "success rate", false}));
    return {{"graph", {{"source", source}, {"nodes", g.size()}, {"channels", g.channel_count()}, {"mean_capacity", num(mean_cap)}}},
            {"probe",
             {{"n_sources", p.n_sources}, {"payments_per_amount", p.payments_per_amount},
              {"offline_prob", p.offline_prob}, {"max_retries", p.max_retries}}},
            {"amounts", rows}};
}

// ---------------------------------------------------------------- macro

std::vector<double> read_holding_times(const std::string& path) {
    auto in = open_data(path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line == "holding_time")) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing");
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, "holding-time file line " + std::to_string(lineno) + ": not a number");
        }
    }
    return out;
}

json cmd_macro(Context& ctx) {
    Block b(ctx.section("macro"), "sections.macro", {"fisher", "congestion", "velocity", "mortgage", "debt", "did"});
    json results;

    {
        Block f(b.raw("fisher"), b.child_path("fisher"), {"M", "V0", "g_Y", "g_V", "years"});
        macro::FisherScenario s;
        s.M = f.get("M", s.M);
        s.V0 = f.get("V0", s.V0);
        s.g_Y = f.get("g_Y", s.g_Y);
        s.g_V = f.get("g_V", s.g_V);
        s.years = f.get("years", s.years);
        const auto path = macro::fisher_price_path(s);
        double resid = 0.0;
        json pts = json::array();
        Csv csv({"year", "price", "velocity", "output"});
        for (const auto& p : path) {
            resid = std::max(resid, std::abs(s.M * p.velocity - p.price * p.output) / (s.M * p.velocity));
            pts.push_back({{"year", p.year}, {"price", num(p.price)}});
            csv.row(p.year, p.price, p.velocity, p.output);
        }
        results["fisher"] = {{"path", pts}, {"max_identity_residual", num(resid)}, {"g_Y", s.g_Y}, {"g_V", s.g_V}};
        ctx.add("fisher.csv", csv.str());
    }

    {
        Block c(b.raw("congestion"), b.child_path("congestion"), {"c0", "T_max", "kappa", "gamma", "demand"});
        macro::CongestionParams p;
        p.c0 = c.get("c0", p.c0);
        p.T_max = c.get("T_max", p.T_max);
        p.kappa = c.get("kappa", p.kappa);
        p.gamma = c.get("gamma", p.gamma);
        std::vector<double> demand = c.get<std::vector<double>>("demand", {});
        if (demand.empty())
            for (int i = 0; i <= 12; ++i) demand.push_back(p.T_max * 0.25 * i);
        json pts = json::array();
        Csv csv({"demand", "fee"});
        for (double d : demand) {
            const double fee = macro::congestion_fee(d, p);
            pts.push_back({{"demand", d}, {"fee", num(fee)}});
            csv.row(d, fee);
        }
        results["congestion"] = {{"T_max", p.T_max}, {"kappa", p.kappa}, {"gamma", p.gamma}, {"curve", pts}};
        ctx.add("congestion.csv", csv.str());
    }

    if (const json* vj = b.raw("velocity"); vj || !ctx.req.data_paths.empty()) {
        Block v(vj, b.child_path("velocity"), {"bin_width", "synthetic_rate", "synthetic_n"});
        const double bw = v.get<double>("bin_width", 0.01);
        std::vector<double> h;
        json source;
        if (!ctx.req.data_paths.empty()) {
            h = read_holding_times(ctx.req.data_paths.front());
            source = {{"kind", "data"}, {"file", base_name(ctx.req.data_paths.front())}};
        } else {
            const double rate = v.get<double>("synthetic_rate", 2.0);
            const auto n = v.get<std::size_t>("synthetic_n", 100000);
            if (!(rate > 0.0)) config_error("sections.macro.velocity.synthetic_rate must be positive");
            Rng rng(ctx.need_seed());
            h.reserve(n);
            for (std::size_t i = 0; i < n; ++i) h.push_back(rng.exponential(rate));
            source = {{"kind", "synthetic_exponential"}, {"rate", rate}, {"n", n}};
        }
        results["velocity"] = {{"source", source}, {"bin_width", bw}, {"estimate", num(macro::velocity_from_holding_times(h, bw))}};
    }

    {
        Block m(b.raw("mortgage"), b.child_path("mortgage"), {"nominal_payment", "deflation_rate", "years"});
        macro::MortgageScenario s;
        s.nominal_payment = m.get("nominal_payment", s.nominal_payment);
        s.deflation_rate = m.get("deflation_rate", s.deflation_rate);
        s.years = m.get("years", s.years);
        const auto path = macro::real_payment_burden(s);
        Csv csv({"year", "multiplier", "real_payment"});
        report::ChartSeries cs{"burden", {}, {}};
        for (const auto& p : path) {
            csv.row(p.year, p.value, p.value * s.nominal_payment);
            cs.x.push_back(p.year);
            cs.y.push_back(p.value);
        }
        results["mortgage"] = {{"deflation_rate", s.deflation_rate}, {"years", s.years}, {"final_multiplier", num(path.back().value)}};
        ctx.add("burden.csv", csv.str());
        ctx.add("burden.svg", report::render_chart({cs}, {report::ChartType::line, "Real burden of a fixed payment",
                                                         "year", "multiplier", false}));
    }

    {
        Block d(b.raw("debt"), b.child_path("debt"), {"regimes", "coefficient", "years", "initial_debt_ratio"});
        const auto regimes = d.get<std::vector<std::string>>("regimes", {"general", "expansionary", "recessionary"});
        const int years = d.get<int>("years", 10);
        const double initial = d.get<double>("initial_debt_ratio", 60.0);
        json paths = json::object();
        Csv csv({"regime", "year", "debt_ratio"});
        std::vector<report::ChartSeries> chart;
        for (const auto& name : regimes) {
            macro::DeflationDebtScenario s;
            s.regime = macro::parse_regime(name);
            if (d.has("coefficient")) s.coefficient = d.get<double>("coefficient", 0.0);
            s.years = years;
            s.initial_debt_ratio = initial;
            const auto path = macro::debt_ratio_path(s);
            report::ChartSeries cs{name, {}, {}};
            for (const auto& p : path) {
                csv.row(name, p.year, p.value);
                cs.x.push_back(p.year);
                cs.y.push_back(p.value);
            }
            chart.push_back(cs);
            paths[name] = {{"coefficient", s.effective_coefficient()}, {"final_ratio", num(path.back().value)}};
        }
        results["debt"] = {{"years", years}, {"initial_debt_ratio", initial}, {"regimes", paths}};
        ctx.add("debt.csv", csv.str());
        ctx.add("debt.svg", report::render_chart(chart, {report::ChartType::line, "Debt-to-GDP under deflation", "year",
                                                         "percent of GDP", false}));
    }

    {
        Block d(b.raw("did"), b.child_path("did"), {"treat_pre", "treat_post", "control_pre", "control_post"});
        const double tp = d.get("treat_pre", 0.0), tq = d.get("treat_post", 5.0);
        const double cp = d.get("control_pre", 0.0), cq = d.get("control_post", 0.855);
        results["did"] = {{"treat_pre", tp}, {"treat_post", tq}, {"control_pre", cp}, {"control_post", cq},
                          {"coefficient", num(macro::diff_in_diff(tp, tq, cp, cq))}};
    }
    return results;
}

// ---------------------------------------------------------------- forensics

json forensic_json(const forensics::ForensicReport& r) {
    json digits = json::array();
    for (double d : r.benford.observed) digits.push_back(num(d));
    json out{{"benford", {{"chi2", num(r.benford.chi2)}, {"df", r.benford.df}, {"pass", r.benford.pass}, {"observed", digits}, {"n", r.benford.n}}},
             {"clustering",
              {{"round_fraction", num(r.clustering.round_fraction)},
               {"benchmark_fraction", num(r.clustering.benchmark_fraction)},
               {"excess", num(r.clustering.excess)},
               {"z", num(r.clustering.z)},
               {"pass", r.clustering.pass}}},
             {"tail", {{"hill_index", num(r.tail.exponent)}, {"xi", num(r.tail.xi)}, {"k_used", r.tail.k}, {"pass", r.tail_pass}}},
             {"failed_tests", r.failed_tests},
             {"verdict", forensics::to_string(r.verdict)}};
    out["suspicious_volume_fraction"] = opt(r.suspicious_volume_fraction);
    return out;
}

json cmd_forensics(Context& ctx) {
    Block b(ctx.section("forensics"), "sections.forensics",
            {"clustering", "hill_k", "tail_min", "tail_max", "fail_threshold", "benford_field", "synthetic", "volumes"});
    forensics::ForensicConfig cfg;
    if (const json* cj = b.raw("clustering")) {
        Block c(cj, b.child_path("clustering"), {"grid", "tolerance", "shoulder_width", "z_critical"});
        cfg.clustering.grid = c.get("grid", cfg.clustering.grid);
        cfg.clustering.tolerance = c.get("tolerance", cfg.clustering.tolerance);
        cfg.clustering.shoulder_width = c.get("shoulder_width", cfg.clustering.shoulder_width);
        cfg.clustering.z_critical = c.get("z_critical", cfg.clustering.z_critical);
    }
    if (b.has("hill_k")) cfg.hill_k = b.get<std::size_t>("hill_k", 0);
    cfg.tail_min = b.get("tail_min", cfg.tail_min);
    cfg.tail_max = b.get("tail_max", cfg.tail_max);
    cfg.fail_threshold = b.get("fail_threshold", cfg.fail_threshold);
    const auto field = b.get<std::string>("benford_field", "size");
    if (field != "size" && field != "price") config_error("sections.forensics.benford_field must be 'size' or 'price'");
    cfg.benford_field = field == "size" ? forensics::Field::size : forensics::Field::price;
    cfg.validate();

    std::optional<std::pair<double, double>> volumes;
    if (const json* vj = b.raw("volumes")) {
        Block v(vj, b.child_path("volumes"), {"reported", "predicted_real"});
        volumes = std::make_pair(v.required<double>("reported"), v.required<double>("predicted_real"));
    }

    std::vector<std::pair<std::string, forensics::TradeTape>> tapes;
    if (!ctx.req.data_paths.empty()) {
        for (const auto& path : ctx.req.data_paths) {
            auto in = open_data(path);
            tapes.emplace_back(base_name(path), forensics::read_trade_csv(in));
        }
    } else {
        Block s(b.raw("synthetic"), b.child_path("synthetic"), {"n", "alpha", "round_share"});
        const auto n = s.get<std::size_t>("n", 20000);
        const auto seed = ctx.need_seed();
        tapes.emplace_back("synthetic_authentic",
                           forensics::TradeTape::from_sizes(forensics::synthetic_authentic_sizes(
                               n, splitmix64(seed + 1), s.get("alpha", 1.5), s.get("round_share", 0.2))));
        tapes.emplace_back("synthetic_wash",
                           forensics::TradeTape::from_sizes(forensics::synthetic_wash_sizes(n, splitmix64(seed + 2))));
    }

    json per_tape = json::object();
    Csv csv({"tape", "digit", "observed", "benford"});
    std::vector<report::ChartSeries> chart;
    chart.push_back({"benford", index_axis(9), {}});
    for (int d = 1; d <= 9; ++d) chart[0].y.push_back(forensics::benford_expected(d));
    for (const auto& [name, tape] : tapes) {
        const auto r = forensics::forensic_verdict(tape, cfg, volumes);
        per_tape[name] = forensic_json(r);
        per_tape[name]["trades"] = tape.size();
        report::ChartSeries cs{name, index_axis(9), {}};
        for (int d = 1; d <= 9; ++d) {
            csv.row(name, d, r.benford.observed[static_cast<std::size_t>(d - 1)], forensics::benford_expected(d));
            cs.y.push_back(r.benford.observed[static_cast<std::size_t>(d - 1)]);
        }
        chart.push_back(cs);
    }
    ctx.add("digits.csv", csv.str());
    ctx.add("digits.svg", report::render_chart(chart, {report::ChartType::bar, "First significant digit shares",
                                                       "digit 1..9", "share", false}));

    json wash = json::array();
    for (const auto& w : report::wash_trading_reference())
        wash.push_back({{"exchange", w.exchange},
                        {"suspicious_volume_fraction", num(forensics::suspicious_volume_fraction(w.reported, w.predicted_real))},
                        {"printed_fraction", w.printed_fraction}});
    return {{"tapes", per_tape}, {"wash_trading_table", wash}};
}

// ---------------------------------------------------------------- tables / throughput / chart

json throughput_json(const std::vector<report::ThroughputRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) out.push_back({{"name", r.name}, {"tps", num(r.tps)}, {"ratio", num(r.ratio)}});
    return out;
}

json cmd_tables(Context& ctx) {
    json results;
    results["tables"] = report::reference_tables();

    json recomputed;
    {
        Context sub{ctx.req, ctx.scenario, ctx.seed, {}};
        recomputed["nakamoto_attack_prob"] = cmd_nakamoto_table(sub);
    }
    const auto cost = security::attack_cost({});
    recomputed["51_attack_cost"] = attack_cost_json(cost);
    const double persistence = 0.0614 + 0.9257;
    recomputed["garch_params"] = {{"persistence", persistence}, {"half_life", num(garch::half_life(persistence))}};
    json wash = json::array();
    for (const auto& w : report::wash_trading_reference())
        wash.push_back({{"exchange", w.exchange},
                        {"computed_fraction", num(forensics::suspicious_volume_fraction(w.reported, w.predicted_real))},
                        {"printed_fraction", w.printed_fraction}});
    recomputed["wash_trading"] = wash;
    recomputed["charfi_did_summary"] = {{"inflation_plugin", num(macro::diff_in_diff(0.0, 5.0, 0.0, 0.855))}};
    recomputed["throughput"] = throughput_json(report::throughput_report(report::default_throughput_entries()));
    results["recomputed"] = recomputed;
    return results;
}

json cmd_throughput(Context& ctx) {
    Block b(ctx.section("throughput"), "sections.throughput", {"entries"});
    std::vector<report::ThroughputEntry> entries;
    if (const json* ej = b.raw("entries")) {
        if (!ej->is_array()) config_error("sections.throughput.entries must be an array");
        for (std::size_t i = 0; i < ej->size(); ++i) {
            Block e(&(*ej)[i], "sections.throughput.entries[" + std::to_string(i) + "]", {"name", "value", "unit"});
            const auto unit = e.get<std::string>("unit", "per_second");
            if (unit != "per_second" && unit != "per_year") config_error("throughput unit must be 'per_second' or 'per_year'");
            entries.push_back({e.required<std::string>("name"), e.required<double>("value"),
                               unit == "per_year" ? report::RateUnit::per_year : report::RateUnit::per_second});
        }
    } else {
        entries = report::default_throughput_entries();
    }
    const auto rows = report::throughput_report(entries);
    Csv csv({"name", "tps", "ratio"});
    std::vector<double> ys;
    for (const auto& r : rows) {
        csv.row(r.name, r.tps, r.ratio);
        ys.push_back(r.tps);
    }
    ctx.add("throughput.csv", csv.str());
    ctx.add("throughput.svg", report::render_chart({{"tx/s", index_axis(ys.size()), ys}},
                                                   {report::ChartType::bar, "Throughput (tx/s, log scale)", "", "tx/s", true}));
    return {{"entries", throughput_json(rows)}};
}

json cmd_chart(Context& ctx) {
    Block b(ctx.section("chart"), "sections.chart", {"type", "title", "x_label", "y_label", "log_y"});
    if (ctx.req.data_paths.empty()) throw Error(ErrorKind::io, "command 'chart' needs --data <series.csv>");
    report::ChartSpec spec;
    const auto type = b.get<std::string>("type", "line");
    if (type != "line" && type != "bar") config_error("sections.chart.type must be 'line' or 'bar'");
    spec.type = type == "line" ? report::ChartType::line : report::ChartType::bar;
    spec.title = b.get<std::string>("title", "");
    spec.x_label = b.get<std::string>("x_label", "");
    spec.y_label = b.get<std::string>("y_label", "");
    spec.log_y = b.get<bool>("log_y", false);

    auto in = open_data(ctx.req.data_paths.front());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::parse, "chart data is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) header.push_back(col);
    }
    if (header.size() < 2) throw Error(ErrorKind::parse, "chart data needs a header 'x,<series>...'");
    std::vector<report::ChartSeries> series;
    for (std::size_t i = 1; i < header.size(); ++i) series.push_back({header[i], {}, {}});
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string col;
        try {
            while (std::getline(ss, col, ',')) {
                std::size_t used = 0;
                cells.push_back(std::stod(col, &used));
                if (used != col.size()) throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, "chart data line " + std::to_string(lineno) + ": not numeric");
        }
        if (cells.size() != header.size())
            throw Error(ErrorKind::parse, "chart data line " + std::to_string(lineno) + ": wrong column count");
        for (std::size_t i = 1; i < cells.size(); ++i) {
            series[i - 1].x.push_back(cells[0]);
            series[i - 1].y.push_back(cells[i]);
        }
    }
    ctx.add("chart.svg", report::render_chart(series, spec));
    json names = json::array();
    for (const auto& s : series) names.push_back(s.name);
    return {{"series", names}, {"points", series.front().y.size()}, {"type", type}, {"log_y", spec.log_y}};
}

using Handler = std::function<json(Context&)>;

const std::map<std::string, std::pair<Handler, bool>>& handlers() {
    // bool: the command always needs a seed
    static const std::map<std::string, std::pair<Handler, bool>> table{
        {"risk", {cmd_risk, false}},           {"garch", {cmd_garch, false}},
        {"security", {cmd_security, false}},   {"netgame", {cmd_netgame, false}},
        {"route", {cmd_route, true}},           {"macro", {cmd_macro, false}},
        {"forensics", {cmd_forensics, false}}, {"tables", {cmd_tables, false}},
        {"chart", {cmd_chart, false}},         {"nakamoto-table", {cmd_nakamoto_table, false}},
        {"throughput", {cmd_throughput, false}}};
    return table;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::config: return kScenario;
    case ErrorKind::parse:
    case ErrorKind::io: return kData;
    case ErrorKind::estimation_failure: return kEstimation;
    default: return kDomain;
    }
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        std::string v = j.is_string() ? j.get<std::string>() : j.dump();
        if (v.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            v = q + "\"";
        }
        out << prefix << ',' << v << '\n';
    }
}

} // namespace

Scenario parse_scenario(const json& j) {
    Block top(&j, "scenario", {"version", "seed", "sections"});
    Scenario s;
    s.version = top.get<std::string>("version", kScenarioVersion);
    if (s.version != kScenarioVersion) config_error("unsupported scenario version '" + s.version + "'");
    if (top.has("seed")) {
        const json& sj = j["seed"];
        if (!sj.is_number_unsigned() && !(sj.is_number_integer() && sj.get<std::int64_t>() >= 0))
            config_error("scenario.seed must be a nonnegative integer");
        s.seed = sj.get<std::uint64_t>();
    }
    if (const json* sec = top.raw("sections")) {
        Block allowed(sec, "scenario.sections",
                      {"risk", "garch", "security", "netgame", "route", "macro", "forensics", "chart", "throughput"});
        s.sections = *sec;
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot read scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(j);
}

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : handlers()) v.push_back(k);
        return v;
    }();
    return names;
}

Outcome execute(const Request& req) {
    auto it = handlers().find(req.command);
    if (it == handlers().end()) config_error("unknown command '" + req.command + "'");
    Scenario scenario;
    if (req.scenario)
        scenario = *req.scenario;
    else if (req.scenario_path)
        scenario = load_scenario(*req.scenario_path);
    Context ctx{req, scenario, req.seed ? req.seed : scenario.seed, {}};
    if (it->second.second) ctx.need_seed();

    json results;
    try {
        results = it->second.first(ctx);
    } catch (const json::exception& e) {
        config_error(std::string("scenario value error: ") + e.what());
    }

    json inputs{{"scenario", req.scenario_path ? json(base_name(*req.scenario_path)) : json(nullptr)}, {"data", json::array()}};
    for (const auto& p : req.data_paths) inputs["data"].push_back(base_name(p));

    std::vector<std::string> names;
    for (const auto& a : ctx.artifacts) names.push_back(a.name);
    names.push_back("report.json");
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw std::logic_error("duplicate artifact name");

    Outcome out;
    out.report = {{"schema", kReportVersion},
                  {"command", req.command},
                  {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)},
                  {"inputs", inputs},
                  {"results", results},
                  {"artifacts", names}};
    out.artifacts = std::move(ctx.artifacts);
    out.artifacts.push_back({"report.json", report::dump_json(out.report)});
    return out;
}

std::string flatten_csv(const json& j) {
    std::ostringstream out;
    out << "key,value\n";
    flatten(j, "", out);
    return out.str();
}

int run(const Request& req, std::ostream& out, std::ostream& err) {
    if (req.format != "json" && req.format != "csv") {
        err << "error: --format must be 'json' or 'csv'\n";
        return kUsage;
    }
    Outcome outcome;
    try {
        outcome = execute(req);
    } catch (const EstimationFailure& e) {
        err << "error [estimation_failure]: " << e.what() << '\n';
        return kEstimation;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error [internal]: " << e.what() << '\n';
        return kDomain;
    }

    try {
        std::error_code ec;
        fs::create_directories(req.out_dir, ec);
        if (!fs::is_directory(req.out_dir)) throw report::OutputError("cannot create output directory '" + req.out_dir + "'");
        // report.json goes last so that its presence implies a complete run.
        for (const auto& a : outcome.artifacts)
            if (a.name != "report.json") report::write_atomic((fs::path(req.out_dir) / a.name).string(), a.contents);
        report::write_atomic((fs::path(req.out_dir) / "report.json").string(), outcome.artifacts.back().contents);
    } catch (const report::OutputError& e) {
        err << "error [io]: " << e.what() << '\n';
        return kOutput;
    }

    if (req.format == "json")
        out << report::dump_json(outcome.report);
    else
        out << flatten_csv(outcome.report["results"]);
    return kOk;
}

} // namespace csl::app
