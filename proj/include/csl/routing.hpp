#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace csl::routing {

using Node = int;

enum class PaymentError { none, temporary_channel_failure, unknown_next_peer, no_route };
std::string to_string(PaymentError e);
constexpr std::size_t kErrorKinds = 4;

struct Channel {
    Node a;
    Node b;
    double capacity;
    double balance_ab;  // spendable from a towards b
    double balance_ba() const { return capacity - balance_ab; }
};

class ChannelGraph {
public:
    explicit ChannelGraph(int n = 0);

    int size() const noexcept { return static_cast<int>(online_.size()); }
    std::size_t channel_count() const noexcept { return channels_.size(); }

    // balance_ab defaults to an even split.
    std::size_t add_channel(Node a, Node b, double capacity, std::optional<double> balance_ab = std::nullopt);

    const Channel& channel(std::size_t id) const { return channels_.at(id); }
    const std::vector<Channel>& channels() const noexcept { return channels_; }
    // (neighbour, channel id), sorted by neighbour then id.
    const std::vector<std::pair<Node, std::size_t>>& adjacent(Node u) const;

    bool online(Node u) const { return online_.at(static_cast<std::size_t>(u)) != 0; }
    void set_online(Node u, bool up) { online_.at(static_cast<std::size_t>(u)) = up ? 1 : 0; }

    // Spendable balance on channel id in the direction from -> other end.
    double outbound(std::size_t id, Node from) const;
    // Moves amount from `from`'s side to the other side.
    void shift(std::size_t id, Node from, double amount);

    double mean_capacity() const;
    // Largest |balance_ab + balance_ba - capacity| or negative-balance magnitude.
    double conservation_error() const;

private:
    std::vector<char> online_;
    std::vector<Channel> channels_;
    std::vector<std::vector<std::pair<Node, std::size_t>>> adj_;
};

// Edge list lines "u v capacity [balance_uv]"; '#' starts a comment.
ChannelGraph read_channel_graph(std::istream& in);

struct Route {
    std::vector<Node> nodes;
    std::vector<std::size_t> channels;
};

// Elements excluded from routing after a failure.
struct Pruned {
    std::vector<char> nodes;
    std::vector<char> channels;
};

// Fewest-hop path over channels with capacity >= amount. Ties go to the
// lexicographically smallest node sequence. Balances and liveness are not
// consulted.
std::optional<Route> route(const ChannelGraph& g, Node src, Node dst, double amount, const Pruned* pruned = nullptr);

struct PaymentOutcome {
    bool success = false;
    PaymentError error = PaymentError::no_route;
    int attempts = 0;
    std::vector<Node> path;
};

PaymentOutcome attempt_payment(ChannelGraph& g, Node src, Node dst, double amount, int max_retries);

struct AmountStats {
    double amount;
    std::size_t payments;
    double success_rate;
    std::array<double, kErrorKinds> error_share;  // indexed by PaymentError; [none] is always 0
    double nodes_reached;                          // unique successful destinations / n
};

struct ProbeConfig {
    std::size_t n_sources = 10;
    std::vector<double> amounts;
    std::size_t payments_per_amount = 100;
    double offline_prob = 0.0;
    int max_retries = 25;
    std::uint64_t seed = 1;
};

// Each amount runs on its own copy of the graph so that sweeps do not depend on
// the order amounts are listed in.
std::vector<AmountStats> probe_experiment(const ChannelGraph& g, const ProbeConfig& config);

struct CalibrationConfig {
    int n = 200;
    int k = 4;                    // ring lattice degree (even)
    double rewire = 0.1;          // Watts-Strogatz rewiring probability
    double capacity_log_mean = 0.0;
    double capacity_log_sd = 1.0;
    double balance_alpha = 0.4;   // Beta(a, a) split; a < 1 skews channels towards one side
    std::uint64_t seed = 7;
};

ChannelGraph small_world_graph(const CalibrationConfig& config);

} // namespace csl::routing
