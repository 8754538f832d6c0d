#include "csl/routing.hpp"

#include "csl/error.hpp"
#include "csl/parallel.hpp"
#include "csl/random.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace csl::routing {

namespace {

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
}

bool excluded(const std::vector<char>& flags, std::size_t i) { return i < flags.size() && flags[i] != 0; }

} // namespace

std::string to_string(PaymentError e) {
    switch (e) {
    case PaymentError::none: return "none";
    case PaymentError::temporary_channel_failure: return "temporary_channel_failure";
    case PaymentError::unknown_next_peer: return "unknown_next_peer";
    case PaymentError::no_route: return "no_route";
    }
    return "unknown";
}

ChannelGraph::ChannelGraph(int n)
    : online_(static_cast<std::size_t>(std::max(0, n)), 1), adj_(static_cast<std::size_t>(std::max(0, n))) {}

std::size_t ChannelGraph::add_channel(Node a, Node b, double capacity, std::optional<double> balance_ab) {
    require(a != b, ErrorKind::domain, "channel endpoints must differ");
    require(a >= 0 && b >= 0 && a < size() && b < size(), ErrorKind::domain, "channel endpoint out of range");
    require(std::isfinite(capacity) && capacity >= 0.0, ErrorKind::domain, "channel capacity must be nonnegative");
    const double bal = balance_ab.value_or(capacity / 2.0);
    require(bal >= 0.0 && bal <= capacity, ErrorKind::domain, "channel balance must lie in [0, capacity]");
    const std::size_t id = channels_.size();
    channels_.push_back({a, b, capacity, bal});
    auto insert = [&](Node u, Node v) {
        auto& list = adj_[static_cast<std::size_t>(u)];
        const std::pair<Node, std::size_t> entry{v, id};
        list.insert(std::lower_bound(list.begin(), list.end(), entry), entry);
    };
    insert(a, b);
    insert(b, a);
    return id;
}

const std::vector<std::pair<Node, std::size_t>>& ChannelGraph::adjacent(Node u) const {
    return adj_.at(static_cast<std::size_t>(u));
}

double ChannelGraph::outbound(std::size_t id, Node from) const {
    const Channel& c = channels_.at(id);
    return from == c.a ? c.balance_ab : c.balance_ba();
}

void ChannelGraph::shift(std::size_t id, Node from, double amount) {
    Channel& c = channels_.at(id);
    if (from == c.a) {
        require(c.balance_ab >= amount, ErrorKind::domain, "insufficient outbound balance");
        c.balance_ab -= amount;
    } else {
        require(c.balance_ba() >= amount, ErrorKind::domain, "insufficient outbound balance");
        c.balance_ab = std::min(c.capacity, c.balance_ab + amount);
    }
}

double ChannelGraph::mean_capacity() const {
    if (channels_.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : channels_) sum += c.capacity;
    return sum / static_cast<double>(channels_.size());
}

double ChannelGraph::conservation_error() const {
    // balance_ba is derived, so conservation reduces to 0 <= balance_ab <= capacity.
    double worst = 0.0;
    for (const auto& c : channels_) {
        worst = std::max(worst, -c.balance_ab);
        worst = std::max(worst, c.balance_ab - c.capacity);
    }
    return worst;
}

ChannelGraph read_channel_graph(std::istream& in) {
    struct Row {
        Node u, v;
        double cap;
        std::optional<double> bal;
    };
    std::vector<Row> rows;
    int max_node = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long u = 0, v = 0;
        double cap = 0.0;
        if (!(ls >> u)) continue;
        const std::string where = "channel list line " + std::to_string(lineno);
        require(static_cast<bool>(ls >> v >> cap) && u >= 0 && v >= 0, ErrorKind::parse,
                where + ": expected 'u v capacity [balance_uv]'");
        Row r{static_cast<Node>(u), static_cast<Node>(v), cap, std::nullopt};
        double bal = 0.0;
        if (ls >> bal) r.bal = bal;
        std::string rest;
        require(!(ls >> rest), ErrorKind::parse, where + ": trailing fields");
        rows.push_back(r);
        max_node = std::max<int>(max_node, static_cast<int>(std::max(u, v)));
    }
    ChannelGraph g(max_node + 1);
    for (const auto& r : rows) g.add_channel(r.u, r.v, r.cap, r.bal);
    return g;
}

std::optional<Route> route(const ChannelGraph& g, Node src, Node dst, double amount, const Pruned* pruned) {
    require(src != dst, ErrorKind::domain, "source and destination must differ");
    require(src >= 0 && dst >= 0 && src < g.size() && dst < g.size(), ErrorKind::domain, "node out of range");
    auto usable_node = [&](Node u) { return !pruned || !excluded(pruned->nodes, static_cast<std::size_t>(u)); };
    auto usable_channel = [&](std::size_t id) {
        return g.channel(id).capacity >= amount && (!pruned || !excluded(pruned->channels, id));
    };
    if (!usable_node(dst) || !usable_node(src)) return std::nullopt;

    std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
    std::queue<Node> frontier;
    dist[static_cast<std::size_t>(dst)] = 0;
    frontier.push(dst);
    while (!frontier.empty()) {
        const Node u = frontier.front();
        frontier.pop();
        if (u == src) break;
        for (auto [v, id] : g.adjacent(u)) {
            if (dist[static_cast<std::size_t>(v)] >= 0 || !usable_channel(id) || !usable_node(v)) continue;
            dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
            frontier.push(v);
        }
    }
    if (dist[static_cast<std::size_t>(src)] < 0) return std::nullopt;

    // Walking downhill and always taking the smallest admissible neighbour
    // yields the lexicographically smallest shortest path.
    Route r;
    r.nodes.push_back(src);
    Node u = src;
    while (u != dst) {
        const int want = dist[static_cast<std::size_t>(u)] - 1;
        for (auto [v, id] : g.adjacent(u)) {
            if (dist[static_cast<std::size_t>(v)] == want && usable_channel(id) && usable_node(v)) {
                r.nodes.push_back(v);
                r.channels.push_back(id);
                u = v;
                break;
            }
        }
    }
    return r;
}

PaymentOutcome attempt_payment(ChannelGraph& g, Node src, Node dst, double amount, int max_retries) {
    require(amount >= 0.0 && std::isfinite(amount), ErrorKind::domain, "payment amount must be nonnegative");
    require(max_retries >= 0, ErrorKind::domain, "max_retries must be nonnegative");
    Pruned pruned{std::vector<char>(static_cast<std::size_t>(g.size()), 0),
                  std::vector<char>(g.channel_count(), 0)};
    PaymentOutcome out;
    PaymentError last = PaymentError::no_route;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const auto r = route(g, src, dst, amount, &pruned);
        if (!r) break;
        ++out.attempts;
        bool failed = false;
        for (std::size_t hop = 0; hop < r->channels.size(); ++hop) {
            const Node from = r->nodes[hop];
            const Node next = r->nodes[hop + 1];
            const std::size_t id = r->channels[hop];
            if (!g.online(next)) {
                last = PaymentError::unknown_next_peer;
                pruned.nodes[static_cast<std::size_t>(next)] = 1;
                failed = true;
                break;
            }
            if (g.outbound(id, from) < amount) {
                last = PaymentError::temporary_channel_failure;
                pruned.channels[id] = 1;
                failed = true;
                break;
            }
        }
        if (failed) continue;
        for (std::size_t hop = 0; hop < r->channels.size(); ++hop) g.shift(r->channels[hop], r->nodes[hop], amount);
        out.success = true;
        out.error = PaymentError::none;
        out.path = r->nodes;
        return out;
    }
    out.error = last;
    return out;
}

std::vector<AmountStats> probe_experiment(const ChannelGraph& g, const ProbeConfig& config) {
    require(!config.amounts.empty(), ErrorKind::domain, "probe needs at least one amount");
    require(config.offline_prob >= 0.0 && config.offline_prob <= 1.0, ErrorKind::domain,
            "offline probability must lie in [0, 1]");
    require(g.size() >= 2, ErrorKind::degenerate_graph, "probe needs at least two nodes");
    require(config.n_sources >= 1 && config.payments_per_amount >= 1, ErrorKind::domain,
            "probe needs sources and payments");
    for (double a : config.amounts) require(a >= 0.0 && std::isfinite(a), ErrorKind::domain, "amounts must be nonnegative");

    const auto n = static_cast<std::uint64_t>(g.size());
    // Sources are shared by all amounts.
    std::vector<Node> sources;
    {
        Rng rng = Rng::substream(config.seed, 0);
        std::vector<Node> all(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Node>(i);
        const std::size_t take = std::min<std::size_t>(config.n_sources, all.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(all[i], all[i + rng.below(all.size() - i)]);
            sources.push_back(all[i]);
        }
    }

    std::vector<AmountStats> out(config.amounts.size());
    parallel_for(config.amounts.size(), [&](std::size_t ai) {
        ChannelGraph replica = g;
        const double amount = config.amounts[ai];
        std::array<std::size_t, kErrorKinds> counts{};
        std::size_t ok = 0;
        std::set<Node> reached;
        for (std::size_t p = 0; p < config.payments_per_amount; ++p) {
            // Payment p draws the same pair and liveness under every amount.
            Rng rng = Rng::substream(config.seed, 1 + p);
            const Node src = sources[p % sources.size()];
            Node dst = static_cast<Node>(rng.below(n - 1));
            if (dst >= src) ++dst;
            for (Node u = 0; u < replica.size(); ++u) replica.set_online(u, !rng.bernoulli(config.offline_prob));
            replica.set_online(src, true);
            const auto outcome = attempt_payment(replica, src, dst, amount, config.max_retries);
            ++counts[static_cast<std::size_t>(outcome.error)];
            if (outcome.success) {
                ++ok;
                reached.insert(dst);
            }
        }
        const double total = static_cast<double>(config.payments_per_amount);
        AmountStats s{amount, config.payments_per_amount, static_cast<double>(ok) / total, {}, 0.0};
        for (std::size_t k = 1; k < kErrorKinds; ++k) s.error_share[k] = static_cast<double>(counts[k]) / total;
        s.nodes_reached = static_cast<double>(reached.size()) / static_cast<double>(n);
        out[ai] = s;
    });
    return out;
}

ChannelGraph small_world_graph(const CalibrationConfig& c) {
    require(c.n >= 4 && c.k >= 2 && c.k % 2 == 0 && c.k < c.n, ErrorKind::domain,
            "small-world graph needs even k with 2 <= k < n");
    require(c.rewire >= 0.0 && c.rewire <= 1.0, ErrorKind::domain, "rewire probability must lie in [0, 1]");
    require(c.capacity_log_sd >= 0.0 && c.balance_alpha > 0.0, ErrorKind::domain, "invalid capacity or balance parameters");
    Rng rng(c.seed);
    std::set<std::pair<Node, Node>> edges;
    auto key = [](Node a, Node b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (Node u = 0; u < c.n; ++u)
        for (int j = 1; j <= c.k / 2; ++j) edges.insert(key(u, (u + j) % c.n));
    std::vector<std::pair<Node, Node>> ring(edges.begin(), edges.end());
    for (auto& e : ring) {
        if (!rng.bernoulli(c.rewire)) continue;
        for (int tries = 0; tries < 32; ++tries) {
            const Node w = static_cast<Node>(rng.below(static_cast<std::uint64_t>(c.n)));
            if (w == e.first || edges.count(key(e.first, w))) continue;
            edges.erase(key(e.first, e.second));
            edges.insert(key(e.first, w));
            break;
        }
    }
    ChannelGraph g(c.n);
    for (auto [a, b] : edges) {
        const double cap = std::exp(c.capacity_log_mean + c.capacity_log_sd * rng.normal());
        g.add_channel(a, b, cap, cap * rng.beta(c.balance_alpha, c.balance_alpha));
    }
    return g;
}

} // namespace csl::routing
