#include "csl/garch.hpp"

#include "csl/error.hpp"
#include "csl/optimize.hpp"
#include "csl/parallel.hpp"
#include "csl/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace csl::garch {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<double> scaled(const marketdata::ReturnSeries& r) {
    auto v = r.values();
    for (auto& x : v) x *= kScale;
    return v;
}

double sample_variance(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / (n - 1.0);
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Unconstrained coordinates: [mu] log(omega), logit(persistence), then p+q-1
// softmax logits sharing the persistence budget among alpha_1..q, beta_1..p
// (the last component is the reference).
struct Transform {
    GarchSpec spec;

    std::size_t size() const { return static_cast<std::size_t>(spec.parameter_count()); }

    GarchParams to_params(const std::vector<double>& th) const {
        std::size_t i = 0;
        GarchParams out;
        if (spec.mean == MeanModel::constant) out.mu = th[i++];
        out.omega = std::exp(th[i++]);
        const double s = logistic(th[i++]);
        const auto m = static_cast<std::size_t>(spec.p + spec.q);
        std::vector<double> w(m, 1.0);
        double denom = 1.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            w[k] = std::exp(th[i + k]);
            denom += w[k];
        }
        for (auto& x : w) x *= s / denom;
        out.alpha.assign(w.begin(), w.begin() + spec.q);
        out.beta.assign(w.begin() + spec.q, w.end());
        return out;
    }

    std::vector<double> from_params(const GarchParams& p) const {
        std::vector<double> th;
        if (spec.mean == MeanModel::constant) th.push_back(p.mu);
        th.push_back(std::log(p.omega));
        std::vector<double> comps = p.alpha;
        comps.insert(comps.end(), p.beta.begin(), p.beta.end());
        const double s = std::accumulate(comps.begin(), comps.end(), 0.0);
        th.push_back(std::log(s / (1.0 - s)));
        for (std::size_t k = 0; k + 1 < comps.size(); ++k) th.push_back(std::log(comps[k] / comps.back()));
        return th;
    }
};

GarchFit make_fit(const std::vector<double>& x, const GarchSpec& spec, GarchParams params) {
    GarchFit out;
    out.spec = spec;
    out.n = x.size();
    out.cond_variance = variance_path(x, params);
    double ll = 0.0;
    const double mu = spec.mean == MeanModel::constant ? params.mu : 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double e = x[t] - mu;
        ll += -0.5 * (kLog2Pi + std::log(out.cond_variance[t]) + e * e / out.cond_variance[t]);
    }
    out.loglik_scaled = ll;
    out.loglik = ll + static_cast<double>(x.size()) * std::log(kScale);
    out.persistence = params.persistence();
    out.half_life = half_life(out.persistence);
    out.criteria = information_criteria(out.loglik, spec.parameter_count(), x.size());
    out.params = std::move(params);
    return out;
}

} // namespace

void GarchSpec::validate() const {
    if (p < 0 || q < 0 || p + q < 1 || p > 3 || q > 3)
        throw Error(ErrorKind::domain, "GARCH orders must satisfy 0 <= p,q <= 3 and p+q >= 1");
}

double GarchParams::persistence() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) + std::accumulate(beta.begin(), beta.end(), 0.0);
}

double half_life(double persistence) {
    if (persistence <= 0.0) return 0.0;
    if (persistence >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(0.5) / std::log(persistence);
}

InformationCriteria information_criteria(double loglik, int k, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double aic = -2.0 * loglik + 2.0 * k;
    const double bic = -2.0 * loglik + k * std::log(nn);
    return {aic, bic, aic / nn, bic / nn};
}

std::vector<double> variance_path(const std::vector<double>& x, const GarchParams& params) {
    const std::size_t n = x.size();
    const std::size_t q = params.alpha.size(), p = params.beta.size();
    const double seed = sample_variance(x);
    std::vector<double> sig2(n);
    std::vector<double> e2(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double e = x[t] - params.mu;
        e2[t] = e * e;
    }
    for (std::size_t t = 0; t < n; ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= q; ++i) v += params.alpha[i - 1] * (t >= i ? e2[t - i] : seed);
        for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * (t >= j ? sig2[t - j] : seed);
        sig2[t] = v;
    }
    return sig2;
}

double log_likelihood(const std::vector<double>& x, const GarchParams& params) {
    const auto sig2 = variance_path(x, params);
    double ll = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double e = x[t] - params.mu;
        if (!(sig2[t] > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += -0.5 * (kLog2Pi + std::log(sig2[t]) + e * e / sig2[t]);
    }
    return ll;
}

GarchFit evaluate(const marketdata::ReturnSeries& r, const GarchSpec& spec, const GarchParams& params) {
    spec.validate();
    if (r.size() < 2) throw Error(ErrorKind::insufficient_data, "GARCH evaluation needs at least 2 returns");
    if (params.alpha.size() != static_cast<std::size_t>(spec.q) || params.beta.size() != static_cast<std::size_t>(spec.p))
        throw Error(ErrorKind::domain, "parameter vector lengths do not match the GARCH orders");
    GarchParams p = params;
    if (spec.mean == MeanModel::zero) p.mu = 0.0;
    return make_fit(scaled(r), spec, std::move(p));
}

GarchParams initial_params(const std::vector<double>& x, const GarchSpec& spec) {
    GarchParams p;
    const double var = sample_variance(x);
    p.mu = spec.mean == MeanModel::constant ? std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()) : 0.0;
    p.omega = 0.05 * var;
    p.alpha.assign(static_cast<std::size_t>(spec.q), spec.q > 0 ? 0.05 / spec.q : 0.0);
    p.beta.assign(static_cast<std::size_t>(spec.p), spec.p > 0 ? 0.90 / spec.p : 0.0);
    return p;
}

GarchFit fit(const marketdata::ReturnSeries& r, const GarchSpec& spec) {
    spec.validate();
    if (r.size() < 250) throw Error(ErrorKind::insufficient_data, "GARCH fitting needs at least 250 returns");
    const auto x = scaled(r);
    const Transform tr{spec};
    const double nn = static_cast<double>(x.size());
    const optimize::Objective objective = [&](const std::vector<double>& th) {
        const double ll = log_likelihood(x, tr.to_params(th));
        return std::isfinite(ll) ? -ll / nn : std::numeric_limits<double>::max();
    };

    // Two starts: the documented near-persistent point and a low-persistence one.
    // With no ARCH effect beta is unidentified along a flat ridge; among starts
    // whose per-observation likelihoods tie, the lower-persistence optimum wins.
    auto low = initial_params(x, spec);
    for (auto& a : low.alpha) a = 0.05 / spec.q;
    for (auto& b : low.beta) b = 0.05 / spec.p;

    struct Run {
        optimize::Result result;
        int iterations;
        bool converged;
    };
    std::vector<Run> runs;
    for (const auto& start : {initial_params(x, spec), low}) {
        const auto simplex = optimize::nelder_mead(objective, tr.from_params(start), 0.5, 1e-10, 4000);
        const auto refined = optimize::bfgs(objective, simplex.x, 1e-8, kIterationCap - simplex.iterations);
        const bool use_refined = refined.value <= simplex.value;
        runs.push_back({use_refined ? refined : simplex, simplex.iterations + refined.iterations, refined.converged});
    }
    std::size_t pick = runs[1].result.value < runs[0].result.value ? 1 : 0;
    const std::size_t other = 1 - pick;
    if (runs[other].converged && std::abs(runs[other].result.value - runs[pick].result.value) < 1e-7 &&
        tr.to_params(runs[other].result.x).persistence() < tr.to_params(runs[pick].result.x).persistence())
        pick = other;
    const auto& best = runs[pick];
    auto params = tr.to_params(best.result.x);

    if (!best.converged) {
        std::vector<double> point;
        if (spec.mean == MeanModel::constant) point.push_back(params.mu);
        point.push_back(params.omega);
        point.insert(point.end(), params.alpha.begin(), params.alpha.end());
        point.insert(point.end(), params.beta.begin(), params.beta.end());
        throw EstimationFailure("GARCH optimizer did not converge within the iteration cap", std::move(point),
                                -best.result.value * nn + nn * std::log(kScale));
    }
    auto out = make_fit(x, spec, std::move(params));
    out.iterations = best.iterations;
    return out;
}

OrderSelection select_order(const marketdata::ReturnSeries& r, int max_p, int max_q, MeanModel mean) {
    if (max_p < 1 || max_q < 1 || max_p > 3 || max_q > 3)
        throw Error(ErrorKind::domain, "order grid bounds must lie in [1, 3]");
    std::vector<GarchSpec> specs;
    for (int p = 1; p <= max_p; ++p)
        for (int q = 1; q <= max_q; ++q) specs.push_back({p, q, mean});

    std::vector<std::optional<GarchFit>> fits(specs.size());
    parallel_for(specs.size(), [&](std::size_t i) {
        try {
            fits[i] = fit(r, specs[i]);
        } catch (const EstimationFailure&) {
        }
    });

    OrderSelection out;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        GridCell cell{specs[i], fits[i].has_value(), {}, 0.0};
        if (fits[i]) {
            cell.criteria = fits[i]->criteria;
            cell.loglik = fits[i]->loglik;
            if (!best) {
                best = i;
            } else {
                const auto& b = fits[*best]->criteria;
                const auto& c = fits[i]->criteria;
                if (c.aic < b.aic || (c.aic == b.aic && c.bic < b.bic)) best = i;
            }
        }
        out.grid.push_back(cell);
    }
    if (!best) throw Error(ErrorKind::estimation_failure, "every GARCH fit in the order grid failed");
    out.best = specs[*best];
    out.best_fit = std::move(*fits[*best]);
    return out;
}

std::vector<double> conditional_vol_path(const GarchFit& fit, bool annualize) {
    std::vector<double> out(fit.cond_variance.size());
    const double factor = (annualize ? std::sqrt(marketdata::kTradingDays) : 1.0) / kScale;
    std::transform(fit.cond_variance.begin(), fit.cond_variance.end(), out.begin(),
                   [factor](double v) { return std::sqrt(v) * factor; });
    return out;
}

std::vector<double> simulate(const GarchParams& params, std::size_t n, std::uint64_t seed, std::size_t burn_in) {
    const double pers = params.persistence();
    if (!(params.omega > 0.0) || pers >= 1.0)
        throw Error(ErrorKind::domain, "simulation needs omega > 0 and a stationary parameter set");
    Rng rng(seed);
    const std::size_t q = params.alpha.size(), p = params.beta.size();
    const double uncond = params.omega / (1.0 - pers);
    const std::size_t total = n + burn_in;
    std::vector<double> e(total), sig2(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= q; ++i) v += params.alpha[i - 1] * (t >= i ? e[t - i] * e[t - i] : uncond);
        for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * (t >= j ? sig2[t - j] : uncond);
        sig2[t] = v;
        e[t] = std::sqrt(v) * rng.normal();
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = (params.mu + e[t + burn_in]) / kScale;
    return out;
}

} // namespace csl::garch
