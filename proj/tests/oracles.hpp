#pragma once

// Slow reference implementations shared by the unit tests and the acceptance
// binary. They deliberately avoid the library's own graph code.

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace oracle {

using Adj = std::vector<std::vector<bool>>;

inline std::vector<int> bfs(const Adj& a, int s) {
    const int n = static_cast<int>(a.size());
    std::vector<int> d(n, -1);
    std::queue<int> q;
    d[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v)
            if (a[u][v] && d[v] < 0) {
                d[v] = d[u] + 1;
                q.push(v);
            }
    }
    return d;
}

// Enumerates every shortest s-t path and credits interior nodes with their
// share of paths. Unordered pairs.
inline std::vector<double> betweenness(const Adj& a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> out(n, 0.0);
    for (int s = 0; s < n; ++s) {
        const auto ds = bfs(a, s);
        for (int t = s + 1; t < n; ++t) {
            if (ds[t] <= 0) continue;
            const auto dt = bfs(a, t);
            std::vector<double> through(n, 0.0);
            double paths = 0.0;
            std::vector<int> stack{s};
            std::function<void(int)> walk = [&](int u) {
                if (u == t) {
                    paths += 1.0;
                    for (int w : stack)
                        if (w != s && w != t) through[w] += 1.0;
                    return;
                }
                for (int v = 0; v < n; ++v)
                    if (a[u][v] && ds[v] == ds[u] + 1 && dt[v] == dt[u] - 1) {
                        stack.push_back(v);
                        walk(v);
                        stack.pop_back();
                    }
            };
            walk(s);
            for (int w = 0; w < n; ++w) out[w] += through[w] / paths;
        }
    }
    return out;
}

// Strategy of node u encoded as a bitmask over peers (bit v = u opens to v).
struct Game {
    int n;
    double b;
    double c;
};

inline Adj induced(const std::vector<unsigned>& masks) {
    const int n = static_cast<int>(masks.size());
    Adj a(n, std::vector<bool>(n, false));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (masks[u] >> v & 1u) a[u][v] = a[v][u] = true;
    return a;
}

inline std::vector<double> costs(const Game& g, const std::vector<unsigned>& masks) {
    const auto a = induced(masks);
    std::vector<double> out(g.n, std::numeric_limits<double>::infinity());
    std::vector<double> dist(g.n, 0.0);
    for (int u = 0; u < g.n; ++u) {
        for (int d : bfs(a, u)) {
            if (d < 0) return out;
            dist[u] += d;
        }
    }
    const auto btw = betweenness(a);
    for (int u = 0; u < g.n; ++u) {
        int opened = 0;
        for (unsigned m = masks[u]; m; m &= m - 1) ++opened;
        out[u] = opened - g.b * btw[u] + g.c * dist[u];
    }
    return out;
}

inline bool strictly_better(double candidate, double base) {
    if (std::isinf(base)) return !std::isinf(candidate);
    return candidate < base - 1e-9 * std::max(1.0, std::abs(base));
}

// Tabulates every joint profile once, then checks each profile against all
// profiles that differ in a single player's strategy.
inline std::vector<bool> all_equilibria(const Game& g) {
    const unsigned per = 1u << g.n;
    std::size_t total = 1;
    for (int i = 0; i < g.n; ++i) total *= per;
    auto decode = [&](std::size_t code) {
        std::vector<unsigned> m(g.n);
        for (int u = 0; u < g.n; ++u) {
            m[u] = static_cast<unsigned>(code % per) & ~(1u << u);
            code /= per;
        }
        return m;
    };
    std::vector<std::vector<double>> table(total);
    std::vector<bool> valid(total, true);
    for (std::size_t code = 0; code < total; ++code) {
        auto m = decode(code);
        std::size_t back = 0, mul = 1;
        for (int u = 0; u < g.n; ++u, mul *= per) back += m[u] * mul;
        if (back != code) {
            valid[code] = false;  // self bit set; not a legal strategy
            continue;
        }
        table[code] = costs(g, m);
    }
    std::vector<bool> eq(total, false);
    for (std::size_t code = 0; code < total; ++code) {
        if (!valid[code]) continue;
        bool stable = true;
        std::size_t mul = 1;
        for (int u = 0; u < g.n && stable; ++u, mul *= per) {
            const std::size_t own = code / mul % per;
            for (unsigned alt = 0; alt < per && stable; ++alt) {
                const std::size_t other = code - own * mul + alt * mul;
                if (alt == own || !valid[other]) continue;
                if (strictly_better(table[other][u], table[code][u])) stable = false;
            }
        }
        eq[code] = stable;
    }
    return eq;
}

} // namespace oracle
