#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mevir/agent.hpp"

namespace mevir {

/// Undirected weighted graph over agent indices. Edge weight is the
/// per-step interaction probability.
class Network {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  explicit Network(std::size_t size = 0) : size_(size) {}

  std::size_t size() const { return size_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Throws ValidationError on self-loops, out-of-range endpoints or weights outside [0,1].
  void add_edge(std::size_t a, std::size_t b, double weight);
  void remove_edge(std::size_t a, std::size_t b);
  bool has_edge(std::size_t a, std::size_t b) const;
  double weight(std::size_t a, std::size_t b) const;
  /// Canonical (low, high) order.
  const std::map<Edge, double>& edges() const { return edges_; }
  std::vector<std::size_t> neighbors(std::size_t a) const;

  static Network complete(std::size_t n, double weight);
  /// Each node linked to its k nearest successors on a ring.
  static Network ring(std::size_t n, std::size_t k, double weight);
  static Network erdos_renyi(std::size_t n, double p, double weight, std::uint64_t seed);
  /// Blocks are consecutive index ranges of the given sizes.
  static Network stochastic_block(std::span<const std::size_t> block_sizes, double p_in, double p_out, double weight,
                                  std::uint64_t seed);

  friend bool operator==(const Network&, const Network&) = default;

 private:
  static Edge canonical(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  std::size_t size_;
  std::map<Edge, double> edges_;
};

/// Root label of the agent's current view of a claim; Undecided if never evaluated.
Label claim_label(const Agent& agent, const std::string& claim_id);

/// Fraction of claims on which two agents hold the same label (1 for an empty claim set).
double label_agreement(const Agent& a, const Agent& b, std::span<const std::string> claims);

struct TribeSettings {
  double lambda = 0.5;
  double tau = 0.2;
  LayerWeights layer_weights;
};

struct TribeAssignment {
  /// tribe_of[i] is the tribe of agent i; ids are contiguous from 0 in order of first member.
  std::vector<std::size_t> tribe_of;
  std::size_t tribe_count = 0;
};

/// Single-linkage clustering of a symmetric distance matrix: i and j share a
/// cluster iff a chain of pairs with distance < tau links them.
TribeAssignment single_linkage(const std::vector<std::vector<double>>& distance, double tau);

/// lambda*profile_distance + (1-lambda)*(1 - label_agreement).
double combined_distance(const Agent& a, const Agent& b, std::span<const std::string> claims,
                         const TribeSettings& settings = {});

TribeAssignment detect_tribes(std::span<const Agent> population, std::span<const std::string> claims,
                              const TribeSettings& settings = {});

struct PolarizationMetrics {
  std::size_t tribe_count = 0;
  double within_agreement = 1.0;
  double cross_agreement = 1.0;
  double polarization_index = 0.0;
  double rejected_correction_rate = 0.0;
};

/// Mean pairwise label agreement inside and across tribes; index = max(0, within - cross).
/// With no within-tribe pairs within is 1; with one tribe the index is 0.
PolarizationMetrics polarization_index(std::span<const Agent> population, const TribeAssignment& assignment,
                                       std::span<const std::string> claims);

/// w*accuracy + (1-w)*cohesion over the given members. Throws on an empty tribe.
double tribe_fitness(std::span<const Agent* const> members, const World& world, std::span<const std::string> claims,
                     double w);

/// bias*neighbor_fraction + (1-bias)*population_fraction of agents sharing
/// the agent's label on the claim; isolated agents see unanimous neighbours.
double perceived_consensus(std::size_t agent, std::span<const Agent> population, const Network& network,
                           const std::string& claim_id);

/// Moves each edge endpoint, with probability rate*distance, to a random
/// non-neighbour closer in profile. Edge count is preserved.
Network rewire_homophily(const Network& network, std::span<const Agent> population, double rate,
                         std::uint64_t seed, const LayerWeights& weights = {});

}  // namespace mevir
