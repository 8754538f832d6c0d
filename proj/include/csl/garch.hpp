#pragma once

#include "csl/marketdata.hpp"

#include <cstdint>
#include <vector>

namespace csl::garch {

enum class MeanModel { zero, constant };

// p GARCH lags (beta), q ARCH lags (alpha). 1 <= p+q, p,q <= 3.
struct GarchSpec {
    int p = 1;
    int q = 1;
    MeanModel mean = MeanModel::constant;

    int parameter_count() const { return 1 + p + q + (mean == MeanModel::constant ? 1 : 0); }
    void validate() const;
};

// Parameters in percent-return units (returns ×100).
struct GarchParams {
    double mu = 0.0;
    double omega = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;

    double persistence() const;
};

struct InformationCriteria {
    double aic;
    double bic;
    double aic_per_obs;
    double bic_per_obs;
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    double loglik;         // density of the original (unscaled) returns
    double loglik_scaled;  // objective actually maximized, percent units
    InformationCriteria criteria;
    std::vector<double> cond_variance;  // sigma_t^2, percent^2
    double persistence;
    double half_life;  // days; +inf when persistence >= 1, 0 when persistence == 0
    std::size_t n;
    int iterations = 0;
};

constexpr double kScale = 100.0;
constexpr int kIterationCap = 10000;

double half_life(double persistence);
InformationCriteria information_criteria(double loglik, int k, std::size_t n);

// Variance recursion for given parameters on percent-scaled returns. Pre-sample
// squared residuals and variances are seeded with the sample variance.
std::vector<double> variance_path(const std::vector<double>& scaled_returns, const GarchParams& params);
double log_likelihood(const std::vector<double>& scaled_returns, const GarchParams& params);

// Builds a fit record from fixed parameters without optimization.
GarchFit evaluate(const marketdata::ReturnSeries& r, const GarchSpec& spec, const GarchParams& params);

GarchParams initial_params(const std::vector<double>& scaled_returns, const GarchSpec& spec);

// Gaussian maximum-likelihood fit. Requires >= 250 observations.
GarchFit fit(const marketdata::ReturnSeries& r, const GarchSpec& spec);

struct GridCell {
    GarchSpec spec;
    bool ok = false;
    InformationCriteria criteria{};
    double loglik = 0.0;
};

struct OrderSelection {
    GarchSpec best;
    GarchFit best_fit;
    std::vector<GridCell> grid;
};

// Fits every (p, q) in [1, max_p] x [1, max_q]; picks minimal AIC, BIC tie-break.
OrderSelection select_order(const marketdata::ReturnSeries& r, int max_p, int max_q,
                            MeanModel mean = MeanModel::constant);

// sqrt(sigma_t^2) in return units; optionally annualized by sqrt(252).
std::vector<double> conditional_vol_path(const GarchFit& fit, bool annualize = false);

// Simulates returns (in return units, i.e. already divided by kScale) from a
// GARCH process defined in percent units. Burn-in draws are discarded.
std::vector<double> simulate(const GarchParams& params, std::size_t n, std::uint64_t seed, std::size_t burn_in = 500);

} // namespace csl::garch
