#include "csl/security.hpp"

#include "csl/error.hpp"
#include "csl/parallel.hpp"
#include "csl/random.hpp"

#include <cmath>
#include <string>

namespace csl::security {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::domain, msg);
}

} // namespace

void DoubleSpendParams::validate() const {
    require(q >= 0.0 && q < 1.0, "attacker share q must lie in [0, 1)");
    require(z >= 0, "confirmations z must be nonnegative");
}

double catch_up_probability(const DoubleSpendParams& params) {
    params.validate();
    const double p = params.p();
    if (params.q >= p) return 1.0;
    return std::pow(params.q / p, params.z);
}

double attacker_success_probability(const DoubleSpendParams& params) {
    params.validate();
    const double p = params.p();
    const double q = params.q;
    if (q >= p) return 1.0;
    const double lambda = params.z * (q / p);
    double sum = 1.0;
    double poisson = std::exp(-lambda);  // lambda^k e^-lambda / k!, updated per k
    for (int k = 0; k <= params.z; ++k) {
        if (k > 0) poisson *= lambda / k;
        sum -= poisson * (1.0 - std::pow(q / p, params.z - k));
    }
    return std::max(0.0, sum);
}

int min_confirmations(double q, double target) {
    if (!(q < 0.5)) throw Error(ErrorKind::domain, "no finite confirmation count exists for q >= 0.5");
    require(q >= 0.0, "attacker share q must be nonnegative");
    require(target > 0.0 && target < 1.0, "target probability must lie in (0, 1)");
    for (int z = 0;; ++z) {
        if (attacker_success_probability({q, z}) < target) return z;
    }
}

EconomicLimit economic_limit(double p_block, double v_attack, double alpha) {
    require(alpha > 0.0, "net attack cost alpha must be positive");
    require(p_block > 0.0 && v_attack > 0.0, "block prize and attack value must be positive");
    const double min_p = v_attack / alpha;
    return {p_block > min_p, min_p};
}

double rent_seeking_check(double flow_cost, double p_block) {
    require(flow_cost > 0.0 && p_block > 0.0, "flow cost and block prize must be positive");
    return flow_cost - p_block;
}

AlphaEstimate simulate_attack_alpha(double A, int e, std::size_t replicas, std::uint64_t seed) {
    require(A > 1.0, "attacker hashrate multiple A must exceed 1");
    require(e >= 1, "escrow depth e must be at least 1");
    require(replicas >= 1000, "at least 1000 replicas are required");
    const long honest_needed = static_cast<long>(e) + 2;

    std::vector<double> durations(replicas);
    const std::size_t chunks = std::min<std::size_t>(replicas, 64);
    parallel_for(chunks, [&](std::size_t c) {
        for (std::size_t i = c; i < replicas; i += chunks) {
            Rng rng = Rng::substream(seed, i);
            long honest = 0, attacker = 0;
            double next_honest = rng.exponential(1.0);
            double next_attacker = rng.exponential(A);
            double t = 0.0;
            while (!(attacker > honest && honest >= honest_needed)) {
                if (next_honest < next_attacker) {
                    t = next_honest;
                    ++honest;
                    next_honest = t + rng.exponential(1.0);
                } else {
                    t = next_attacker;
                    ++attacker;
                    next_attacker = t + rng.exponential(A);
                }
            }
            durations[i] = t;
        }
    });

    double sum = 0.0;
    for (double t : durations) sum += t;
    const double n = static_cast<double>(replicas);
    const double mean_t = sum / n;
    double ss = 0.0;
    for (double t : durations) ss += (t - mean_t) * (t - mean_t);
    const double sd_t = std::sqrt(ss / (n - 1.0));
    return {(A - 1.0) * mean_t, (A - 1.0) * sd_t / std::sqrt(n), mean_t, replicas};
}

void AttackCostModel::validate() const {
    require(network_hashrate_ehs > 0 && attack_share > 0 && unit_hashrate_ths > 0 && unit_price > 0 &&
                unit_power_w > 0 && datacenter_capex > 0 && datacenter_opex_per_week > 0 &&
                electricity_price_per_kwh > 0 && duration_hours > 0,
            "attack cost model inputs must all be positive");
}

AttackCostReport attack_cost(const AttackCostModel& m) {
    m.validate();
    AttackCostReport r{};
    r.attack_hashrate_ehs = m.network_hashrate_ehs * m.attack_share;
    // EH/s -> TH/s. The relative guard keeps an exact quotient such as
    // 1,530,000.0000000002 from rounding up to the next whole machine.
    const double units = r.attack_hashrate_ehs * 1e6 / m.unit_hashrate_ths;
    r.units = static_cast<std::uint64_t>(std::ceil(units * (1.0 - 1e-12)));
    const double count = static_cast<double>(r.units);
    r.hardware_cost = count * m.unit_price;
    const double power_w = count * m.unit_power_w;
    r.power_gw = power_w / 1e9;
    r.energy_cost = power_w / 1e3 * m.duration_hours * m.electricity_price_per_kwh;
    r.datacenter_capex = m.datacenter_capex;
    r.datacenter_opex = m.datacenter_opex_per_week * m.duration_hours / 168.0;
    r.total_capex = r.hardware_cost + r.datacenter_capex;
    r.total_opex = r.energy_cost + r.datacenter_opex;
    r.total = r.total_capex + r.total_opex;
    return r;
}

double hashrate_equilibrium(double marginal_cost, double fee_revenue, double subsidy) {
    require(marginal_cost > 0.0, "marginal mining cost must be positive");
    return (fee_revenue + subsidy) / marginal_cost;
}

double subsidy_at(std::uint64_t height) {
    const std::uint64_t halvings = height / 210000;
    if (halvings >= 64) return 0.0;
    return std::ldexp(50.0, -static_cast<int>(halvings));
}

void BudgetScenario::validate() const {
    require(!heights.empty(), "budget scenario needs at least one height");
    require(price_path.size() == heights.size() && fee_per_block_path.size() == heights.size(),
            "price and fee paths must match the height range in length");
    require(elasticity > 0.0, "elasticity must be positive");
    for (std::size_t i = 1; i < heights.size(); ++i) require(heights[i - 1] < heights[i], "heights must increase");
}

std::vector<BudgetPoint> project_security_budget(const BudgetScenario& s) {
    s.validate();
    std::vector<BudgetPoint> out;
    out.reserve(s.heights.size());
    std::optional<double> index;
    double prev_budget = 0.0;
    bool broken = false;
    for (std::size_t i = 0; i < s.heights.size(); ++i) {
        const double subsidy = subsidy_at(s.heights[i]);
        const double budget = (subsidy + s.fee_per_block_path[i]) * s.price_path[i];
        if (!(budget > 0.0)) broken = true;
        if (broken) {
            index.reset();
        } else if (i == 0) {
            index = 1.0;
        } else {
            index = *index * std::pow(budget / prev_budget, s.elasticity);
        }
        prev_budget = budget;
        out.push_back({s.heights[i], subsidy, budget, index});
    }
    return out;
}

} // namespace csl::security
