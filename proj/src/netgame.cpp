#include "csl/netgame.hpp"

#include "csl/error.hpp"
#include "csl/parallel.hpp"
#include "csl/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace csl::netgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
}

} // namespace

Graph::Graph(int n) : adj_(static_cast<std::size_t>(std::max(0, n))) {}

bool Graph::has_edge(Node u, Node v) const {
    const auto& a = adj_.at(static_cast<std::size_t>(u));
    return std::binary_search(a.begin(), a.end(), v);
}

bool Graph::add_edge(Node u, Node v) {
    require(u != v, ErrorKind::domain, "self-channels are not allowed");
    require(u >= 0 && v >= 0 && u < size() && v < size(), ErrorKind::domain, "edge endpoint out of range");
    auto& a = adj_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it != a.end() && *it == v) return false;
    a.insert(it, v);
    auto& b = adj_[static_cast<std::size_t>(v)];
    b.insert(std::lower_bound(b.begin(), b.end(), u), u);
    ++edges_;
    return true;
}

bool Graph::remove_edge(Node u, Node v) {
    auto& a = adj_.at(static_cast<std::size_t>(u));
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) return false;
    a.erase(it);
    auto& b = adj_.at(static_cast<std::size_t>(v));
    b.erase(std::lower_bound(b.begin(), b.end(), u));
    --edges_;
    return true;
}

std::vector<std::pair<Node, Node>> Graph::edges() const {
    std::vector<std::pair<Node, Node>> out;
    out.reserve(edges_);
    for (int u = 0; u < size(); ++u)
        for (Node v : adj_[static_cast<std::size_t>(u)])
            if (u < v) out.emplace_back(u, v);
    return out;
}

std::vector<int> Graph::degrees() const {
    std::vector<int> out;
    out.reserve(adj_.size());
    for (const auto& a : adj_) out.push_back(static_cast<int>(a.size()));
    return out;
}

std::vector<int> Graph::distances_from(Node src) const {
    std::vector<int> dist(adj_.size(), -1);
    std::queue<Node> frontier;
    dist[static_cast<std::size_t>(src)] = 0;
    frontier.push(src);
    while (!frontier.empty()) {
        const Node u = frontier.front();
        frontier.pop();
        for (Node v : adj_[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

bool Graph::connected() const {
    if (adj_.size() <= 1) return true;
    const auto d = distances_from(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

Graph read_edge_list(std::istream& in) {
    std::vector<std::pair<Node, Node>> pairs;
    int max_node = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long u = 0, v = 0;
        if (!(ls >> u)) continue;
        require(static_cast<bool>(ls >> v) && u >= 0 && v >= 0, ErrorKind::parse,
                "edge list line " + std::to_string(lineno) + ": expected two 0-indexed node ids");
        std::string rest;
        require(!(ls >> rest), ErrorKind::parse, "edge list line " + std::to_string(lineno) + ": trailing fields");
        pairs.emplace_back(static_cast<Node>(u), static_cast<Node>(v));
        max_node = std::max<int>(max_node, static_cast<int>(std::max(u, v)));
    }
    Graph g(max_node + 1);
    for (auto [u, v] : pairs) {
        require(u != v, ErrorKind::parse, "edge list contains a self-loop");
        g.add_edge(u, v);
    }
    return g;
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void StrategyProfile::validate() const {
    require(n >= 1 && opens.size() == static_cast<std::size_t>(n), ErrorKind::domain,
            "strategy profile needs one open-set per node");
    for (int u = 0; u < n; ++u) {
        auto s = opens[static_cast<std::size_t>(u)];
        std::sort(s.begin(), s.end());
        require(std::adjacent_find(s.begin(), s.end()) == s.end(), ErrorKind::domain, "duplicate channel in open-set");
        for (Node v : s) {
            require(v != u, ErrorKind::domain, "self-channels are not allowed");
            require(v >= 0 && v < n, ErrorKind::domain, "channel target out of range");
        }
    }
}

Graph StrategyProfile::graph() const {
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (Node v : opens[static_cast<std::size_t>(u)]) g.add_edge(u, v);
    return g;
}

std::vector<double> betweenness(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<double> cb(n, 0.0);
    std::vector<double> sigma(n), delta(n);
    std::vector<int> dist(n);
    std::vector<Node> order;
    order.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        std::queue<Node> frontier;
        frontier.push(static_cast<Node>(s));
        while (!frontier.empty()) {
            const Node v = frontier.front();
            frontier.pop();
            order.push_back(v);
            for (Node w : g.neighbors(v)) {
                const auto wi = static_cast<std::size_t>(w);
                if (dist[wi] < 0) {
                    dist[wi] = dist[static_cast<std::size_t>(v)] + 1;
                    frontier.push(w);
                }
                if (dist[wi] == dist[static_cast<std::size_t>(v)] + 1) sigma[wi] += sigma[static_cast<std::size_t>(v)];
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = static_cast<std::size_t>(*it);
            for (Node v : g.neighbors(*it)) {
                const auto vi = static_cast<std::size_t>(v);
                if (dist[vi] == dist[w] - 1) delta[vi] += sigma[vi] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) cb[w] += delta[w];
        }
    }
    for (auto& x : cb) x *= 0.5;  // each unordered pair was counted from both ends
    return cb;
}

std::optional<double> distance_sum(const Graph& g, Node u) {
    const auto d = g.distances_from(u);
    double sum = 0.0;
    for (int x : d) {
        if (x < 0) return std::nullopt;
        sum += x;
    }
    return sum;
}

CentralityVector centrality(const Graph& g, CentralityKind kind) {
    const auto n = static_cast<std::size_t>(g.size());
    CentralityVector out{std::vector<double>(n, 0.0), kind};
    switch (kind) {
    case CentralityKind::betweenness:
        out.values = betweenness(g);
        break;
    case CentralityKind::degree:
        for (std::size_t u = 0; u < n; ++u) out.values[u] = static_cast<double>(g.neighbors(static_cast<Node>(u)).size());
        break;
    case CentralityKind::closeness:
        for (std::size_t u = 0; u < n; ++u) {
            const auto d = g.distances_from(static_cast<Node>(u));
            double sum = 0.0;
            for (int x : d)
                if (x > 0) sum += x;
            out.values[u] = sum > 0.0 ? 1.0 / sum : 0.0;
        }
        break;
    case CentralityKind::eigenvector: {
        // Power iteration on A + I, which shares A's leading eigenvector and
        // avoids oscillation on bipartite graphs.
        std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)))), y(n);
        for (int iter = 0; iter < 10000; ++iter) {
            for (std::size_t u = 0; u < n; ++u) {
                y[u] = x[u];
                for (Node v : g.neighbors(static_cast<Node>(u))) y[u] += x[static_cast<std::size_t>(v)];
            }
            double norm = 0.0;
            for (double v : y) norm += v * v;
            norm = std::sqrt(norm);
            double change = 0.0;
            for (std::size_t u = 0; u < n; ++u) {
                y[u] /= norm;
                change = std::max(change, std::abs(y[u] - x[u]));
            }
            std::swap(x, y);
            if (change < 1e-12) break;
        }
        out.values = x;
        break;
    }
    }
    return out;
}

double player_cost(const StrategyProfile& profile, Node u, const GameParams& params) {
    profile.validate();
    require(u >= 0 && u < profile.n, ErrorKind::domain, "player out of range");
    const Graph g = profile.graph();
    if (!g.connected()) return kInf;
    const double opened = static_cast<double>(profile.opens[static_cast<std::size_t>(u)].size());
    double cost = opened;
    if (params.b != 0.0) cost -= params.b * betweenness(g)[static_cast<std::size_t>(u)];
    if (params.c != 0.0) cost += params.c * *distance_sum(g, u);
    return cost;
}

NashResult is_nash(const StrategyProfile& profile, const GameParams& params) {
    profile.validate();
    require(profile.n <= kMaxNashNodes, ErrorKind::capacity,
            "exhaustive equilibrium check supports at most " + std::to_string(kMaxNashNodes) + " nodes");
    const int n = profile.n;
    StrategyProfile trial = profile;
    for (int u = 0; u < n; ++u) {
        const double base = player_cost(profile, u, params);
        std::vector<Node> peers;
        for (int v = 0; v < n; ++v)
            if (v != u) peers.push_back(v);
        const std::uint32_t subsets = 1u << peers.size();
        for (std::uint32_t mask = 0; mask < subsets; ++mask) {
            auto& set = trial.opens[static_cast<std::size_t>(u)];
            set.clear();
            for (std::size_t k = 0; k < peers.size(); ++k)
                if (mask & (1u << k)) set.push_back(peers[k]);
            const double cost = player_cost(trial, u, params);
            if (cost < base - 1e-9 * std::max(1.0, std::abs(base)) || (std::isinf(base) && std::isfinite(cost)))
                return {false, u, set, base, cost};
        }
        trial.opens[static_cast<std::size_t>(u)] = profile.opens[static_cast<std::size_t>(u)];
    }
    return {true, std::nullopt, {}, 0.0, 0.0};
}

std::string to_string(Topology t) {
    switch (t) {
    case Topology::star: return "star";
    case Topology::path: return "path";
    case Topology::cycle: return "cycle";
    case Topology::complete: return "complete";
    }
    return "unknown";
}

StrategyProfile make_topology(Topology t, int n) {
    require(n >= 1, ErrorKind::domain, "topology needs at least one node");
    StrategyProfile p{n, std::vector<std::vector<Node>>(static_cast<std::size_t>(n))};
    switch (t) {
    case Topology::star:
        for (int v = 1; v < n; ++v) p.opens[0].push_back(v);
        break;
    case Topology::path:
        for (int v = 0; v + 1 < n; ++v) p.opens[static_cast<std::size_t>(v)].push_back(v + 1);
        break;
    case Topology::cycle:
        for (int v = 0; v + 1 < n; ++v) p.opens[static_cast<std::size_t>(v)].push_back(v + 1);
        if (n >= 3) p.opens[static_cast<std::size_t>(n - 1)].push_back(0);
        break;
    case Topology::complete:
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) p.opens[static_cast<std::size_t>(u)].push_back(v);
        break;
    }
    return p;
}

double social_cost(const StrategyProfile& profile, const GameParams& params) {
    profile.validate();
    const Graph g = profile.graph();
    if (!g.connected()) return kInf;
    const auto bc = betweenness(g);
    double total = 0.0;
    for (int u = 0; u < profile.n; ++u) {
        total += static_cast<double>(profile.opens[static_cast<std::size_t>(u)].size());
        total -= params.b * bc[static_cast<std::size_t>(u)];
        total += params.c * *distance_sum(g, u);
    }
    return total;
}

std::vector<OptimumCell> social_optimum_map(int n, const std::vector<double>& b_grid, const std::vector<double>& c_grid,
                                            std::vector<Topology> candidates) {
    require(n >= 1 && n <= 12, ErrorKind::capacity, "social optimum map supports 1 <= n <= 12");
    require(!candidates.empty(), ErrorKind::config, "at least one candidate topology is required");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<StrategyProfile> profiles;
    for (auto t : candidates) profiles.push_back(make_topology(t, n));

    std::vector<OptimumCell> out;
    out.reserve(b_grid.size() * c_grid.size());
    for (double b : b_grid) {
        for (double c : c_grid) {
            OptimumCell cell{b, c, candidates.front(), kInf};
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                const double cost = social_cost(profiles[i], {b, c});
                if (cost < cell.cost) {
                    cell.cost = cost;
                    cell.winner = candidates[i];
                }
            }
            out.push_back(cell);
        }
    }
    return out;
}

Graph preferential_attachment(int n, int m, std::uint64_t seed) {
    require(m >= 1 && n > m, ErrorKind::domain, "preferential attachment needs n > m >= 1");
    Graph g(n);
    std::vector<Node> endpoints;  // each node repeated once per incident edge
    for (int u = 0; u <= m; ++u)
        for (int v = u + 1; v <= m; ++v) {
            g.add_edge(u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    Rng rng(seed);
    std::vector<Node> targets;
    for (int v = m + 1; v < n; ++v) {
        targets.clear();
        while (static_cast<int>(targets.size()) < m) {
            const Node t = endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (Node t : targets) {
            g.add_edge(v, t);
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    return g;
}

double gini(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    std::vector<double> x = values;
    for (double v : x) require(v >= 0.0 && std::isfinite(v), ErrorKind::domain, "gini needs nonnegative values");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (total == 0.0) return 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
    return weighted / (n * total);
}

bool try_double_edge_swap(Graph& g, std::vector<std::pair<Node, Node>>& edges, std::uint64_t draw_a,
                          std::uint64_t draw_b, bool orientation) {
    const std::size_t i = draw_a % edges.size();
    const std::size_t j = draw_b % edges.size();
    if (i == j) return false;
    auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (orientation) std::swap(c, d);
    // (a,b),(c,d) -> (a,d),(c,b)
    if (a == d || c == b || a == c || b == d) return false;
    if (g.has_edge(a, d) || g.has_edge(c, b)) return false;
    g.remove_edge(a, b);
    g.remove_edge(c, d);
    g.add_edge(a, d);
    g.add_edge(c, b);
    if (!g.connected()) {
        g.remove_edge(a, d);
        g.remove_edge(c, b);
        g.add_edge(a, b);
        g.add_edge(c, d);
        return false;
    }
    edges[i] = {a, d};
    edges[j] = {c, b};
    return true;
}

NullModelResult null_model_comparison(const Graph& g, CentralityKind metric, double swaps_factor, std::size_t samples,
                                      std::uint64_t seed) {
    require(samples >= 20, ErrorKind::domain, "null model needs at least 20 samples");
    require(swaps_factor > 0.0, ErrorKind::domain, "swaps factor must be positive");
    require(g.edge_count() >= 2, ErrorKind::degenerate_graph, "graph has fewer than two edges; nothing to swap");
    require(g.connected(), ErrorKind::degenerate_graph, "null model needs a connected graph");

    const double observed = gini(centrality(g, metric).values);
    const auto degrees = g.degrees();
    const auto target = static_cast<std::size_t>(std::ceil(swaps_factor * static_cast<double>(g.edge_count())));
    const std::size_t max_attempts = std::max<std::size_t>(100, 20 * target);

    std::vector<double> sample_gini(samples);
    std::vector<std::size_t> applied(samples, 0);
    parallel_for(samples, [&](std::size_t s) {
        Rng rng = Rng::substream(seed, s);
        Graph h = g;
        auto edges = h.edges();
        std::size_t done = 0;
        for (std::size_t attempt = 0; attempt < max_attempts && done < target; ++attempt) {
            const auto a = rng.engine()();
            const auto b = rng.engine()();
            const bool flip = rng.bernoulli(0.5);
            if (try_double_edge_swap(h, edges, a, b, flip)) ++done;
        }
        if (h.degrees() != degrees) throw std::logic_error("double-edge swap changed the degree sequence");
        applied[s] = done;
        sample_gini[s] = gini(centrality(h, metric).values);
    });

    const double ns = static_cast<double>(samples);
    const double expected = std::accumulate(sample_gini.begin(), sample_gini.end(), 0.0) / ns;
    double ss = 0.0;
    for (double v : sample_gini) ss += (v - expected) * (v - expected);
    const double sd = std::sqrt(ss / (ns - 1.0));
    double z = 0.0;
    if (sd > 1e-15) z = (observed - expected) / sd;
    return {observed, expected, sd, z, samples, std::accumulate(applied.begin(), applied.end(), std::size_t{0})};
}

} // namespace csl::netgame
