#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace csl::netgame {

using Node = int;

// Simple undirected graph with sorted adjacency lists.
class Graph {
public:
    explicit Graph(int n = 0);

    int size() const noexcept { return static_cast<int>(adj_.size()); }
    std::size_t edge_count() const noexcept { return edges_; }
    const std::vector<Node>& neighbors(Node u) const { return adj_.at(static_cast<std::size_t>(u)); }
    bool has_edge(Node u, Node v) const;

    // Returns false if the edge already exists. Self-loops are rejected.
    bool add_edge(Node u, Node v);
    bool remove_edge(Node u, Node v);

    std::vector<std::pair<Node, Node>> edges() const;
    std::vector<int> degrees() const;
    bool connected() const;

    // BFS hop distances from src; -1 where unreachable.
    std::vector<int> distances_from(Node src) const;

private:
    std::vector<std::vector<Node>> adj_;
    std::size_t edges_ = 0;
};

// Edge-list text: one "u v" pair per line, 0-indexed; '#' starts a comment.
Graph read_edge_list(std::istream& in);
void write_edge_list(const Graph& g, std::ostream& out);

struct StrategyProfile {
    int n = 0;
    std::vector<std::vector<Node>> opens;  // opens[u]: peers u opened a channel to

    void validate() const;
    Graph graph() const;
};

struct GameParams {
    double b = 0.0;  // weight on betweenness
    double c = 0.0;  // weight on closeness (distance sum)
};

enum class CentralityKind { betweenness, closeness, degree, eigenvector };

struct CentralityVector {
    std::vector<double> values;
    CentralityKind kind;
};

// Unordered-pair betweenness with fractional splitting across equal-length
// shortest paths (Brandes).
std::vector<double> betweenness(const Graph& g);
// Σ_v dist(u, v); nullopt when some node is unreachable from u.
std::optional<double> distance_sum(const Graph& g, Node u);

CentralityVector centrality(const Graph& g, CentralityKind kind);

// |s_u| - b·betweenness_u + c·closeness_u; +inf for a disconnected induced graph.
double player_cost(const StrategyProfile& profile, Node u, const GameParams& params);

struct NashResult {
    bool is_equilibrium;
    std::optional<Node> deviator;
    std::vector<Node> deviation;  // improving replacement open-set
    double cost_before = 0.0;
    double cost_after = 0.0;
};

constexpr int kMaxNashNodes = 10;

// Exhaustive unilateral deviation search over every subset of peers.
NashResult is_nash(const StrategyProfile& profile, const GameParams& params);

enum class Topology { star, path, cycle, complete };
std::string to_string(Topology t);

// Canonical profile for a topology: star centre opens to all leaves; path and
// cycle nodes open to their successor; complete graph nodes open to higher peers.
StrategyProfile make_topology(Topology t, int n);
double social_cost(const StrategyProfile& profile, const GameParams& params);

struct OptimumCell {
    double b;
    double c;
    Topology winner;
    double cost;
};

// Grid of social-optimum topologies. Ties resolved by candidate order
// star > path > cycle > complete.
std::vector<OptimumCell> social_optimum_map(int n, const std::vector<double>& b_grid, const std::vector<double>& c_grid,
                                            std::vector<Topology> candidates = {Topology::star, Topology::path,
                                                                                Topology::cycle, Topology::complete});

Graph preferential_attachment(int n, int m, std::uint64_t seed);

// Σ_i Σ_j |x_i - x_j| / (2 n² mean); 0 when all values are zero.
double gini(const std::vector<double>& values);

// One degree-preserving double-edge swap attempt that also keeps the graph
// connected. Returns true when a swap was applied.
bool try_double_edge_swap(Graph& g, std::vector<std::pair<Node, Node>>& edges, std::uint64_t draw_a,
                          std::uint64_t draw_b, bool orientation);

struct NullModelResult {
    double observed_gini;
    double expected_gini;
    double stdev;
    double zscore;
    std::size_t samples;
    std::size_t swaps_applied;  // summed over samples
};

NullModelResult null_model_comparison(const Graph& g, CentralityKind metric, double swaps_factor, std::size_t samples,
                                      std::uint64_t seed);

} // namespace csl::netgame
