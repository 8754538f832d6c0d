#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace csl::security {

// Attacker hashrate share q in [0, 1) racing from z blocks behind.
struct DoubleSpendParams {
    double q;
    int z;

    double p() const { return 1.0 - q; }
    void validate() const;
};

// Gambler's-ruin catch-up probability: 1 if q >= p, else (q/p)^z.
double catch_up_probability(const DoubleSpendParams& params);

// Probability that the attacker ever catches up, with the attacker's progress
// while the merchant waits for z confirmations modelled as Poisson(z q / p).
double attacker_success_probability(const DoubleSpendParams& params);

// Smallest z with attacker_success_probability(q, z) < target. Requires q < 0.5.
int min_confirmations(double q, double target);

struct EconomicLimit {
    bool secure;
    double min_p_block;
};

// Secure iff P_block > V_attack / alpha.
EconomicLimit economic_limit(double p_block, double v_attack, double alpha);

// N*c - P_block; zero at the free-entry equilibrium.
double rent_seeking_check(double flow_cost, double p_block);

struct AlphaEstimate {
    double alpha_hat;
    double stderr_;
    double mean_duration;  // E[T] in honest block times
    std::size_t replicas;
};

/// Monte Carlo estimate of the net attack cost in block rewards.
///
/// Honest blocks arrive at rate 1 and attacker blocks at rate A (exponential
/// inter-arrivals). The attack ends at the first time T at which the attacker
/// chain is strictly longer than the honest chain and the honest chain holds at
/// least e + 2 blocks (the transaction's block, e escrow confirmations, and the
/// block on which goods are released). Net cost is (A - 1) T: the attacker pays
/// A flow-cost units per block time and recovers one block reward per block time
/// on the winning chain. Replica i draws from substream (seed, i) so the result
/// is independent of thread scheduling.
AlphaEstimate simulate_attack_alpha(double A, int e, std::size_t replicas, std::uint64_t seed);

struct AttackCostModel {
    double network_hashrate_ehs = 600.0;     // EH/s
    double attack_share = 0.51;
    double unit_hashrate_ths = 200.0;        // TH/s per machine
    double unit_price = 3000.0;              // currency per machine
    double unit_power_w = 3500.0;            // watts per machine
    double datacenter_capex = 1.34e9;
    double datacenter_opex_per_week = 8.03e7;
    double electricity_price_per_kwh = 0.05;
    double duration_hours = 168.0;

    void validate() const;
};

struct AttackCostReport {
    double attack_hashrate_ehs;
    std::uint64_t units;
    double hardware_cost;
    double power_gw;
    double energy_cost;
    double datacenter_capex;
    double datacenter_opex;
    double total_capex;
    double total_opex;
    double total;
};

AttackCostReport attack_cost(const AttackCostModel& model);

// H_total = (fee_revenue + B) / C_M, fee_revenue standing in for K ∫ β dG*(β).
double hashrate_equilibrium(double marginal_cost, double fee_revenue, double subsidy);

// 50 / 2^floor(height / 210000), zero after 64 halvings.
double subsidy_at(std::uint64_t height);

struct BudgetScenario {
    std::vector<std::uint64_t> heights;
    std::vector<double> price_path;          // currency per coin, per height
    std::vector<double> fee_per_block_path;  // coin per block, per height
    double elasticity = 1.38;

    void validate() const;
};

struct BudgetPoint {
    std::uint64_t height;
    double subsidy;
    double budget;
    std::optional<double> security_index;  // unset once the budget is non-positive
};

std::vector<BudgetPoint> project_security_budget(const BudgetScenario& scenario);

} // namespace csl::security
