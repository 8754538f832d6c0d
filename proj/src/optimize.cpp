#include "csl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace csl::optimize {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::max(); }

} // namespace

Result nelder_mead(const Objective& f, std::vector<double> x0, double step, double ftol, int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) values[i] = safe(f(simplex[i]));

    std::vector<std::size_t> order(n + 1);
    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        if (std::abs(values[worst] - values[best]) < ftol) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };
        auto reflected = along(-1.0);
        const double fr = safe(f(reflected));
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = safe(f(expanded));
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        auto contracted = along(outside ? -0.5 : 0.5);
        const double fc = safe(f(contracted));
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = std::move(contracted);
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            values[i] = safe(f(simplex[i]));
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], iter, converged};
}

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + hi;
        const double fp = f(xp);
        xp[i] = x[i] - hi;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * hi);
    }
    return g;
}

Result bfgs(const Objective& f, std::vector<double> x, double ftol, int max_iter) {
    const std::size_t n = x.size();
    auto identity = [n] {
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
        return m;
    };
    auto hinv = identity();
    double fx = safe(f(x));
    auto g = numeric_gradient(f, x);
    bool reset = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= hinv[i][j] * g[j];
        double slope = dot(d, g);
        if (slope >= 0.0) {
            hinv = identity();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = dot(d, g);
        }

        double t = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * d[i];
            fn = safe(f(xn));
            if (fn <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!reset) {
                hinv = identity();
                reset = true;
                continue;
            }
            return {x, fx, iter, inf_norm(g) < 1e-4};
        }
        reset = false;

        auto gn = numeric_gradient(f, xn);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        const double improvement = fx - fn;
        x = std::move(xn);
        fx = fn;
        g = std::move(gn);

        const double sy = dot(s, y);
        if (sy > 1e-12) {
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hy[i] += hinv[i][j] * y[j];
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    hinv[i][j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
        if (improvement < ftol && inf_norm(g) < 1e-5) return {x, fx, iter + 1, true};
    }
    return {x, fx, max_iter, false};
}

} // namespace csl::optimize
