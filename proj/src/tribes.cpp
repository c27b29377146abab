#include "mevir/tribes.hpp"

#include <algorithm>
#include <numeric>

namespace mevir {

void Network::add_edge(std::size_t a, std::size_t b, double weight) {
  if (a == b) throw ValidationError("network self-loop");
  if (a >= size_ || b >= size_) throw ValidationError("network endpoint out of range");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ValidationError("edge weight outside [0,1]");
  edges_[canonical(a, b)] = weight;
}

void Network::remove_edge(std::size_t a, std::size_t b) { edges_.erase(canonical(a, b)); }

bool Network::has_edge(std::size_t a, std::size_t b) const { return a != b && edges_.contains(canonical(a, b)); }

double Network::weight(std::size_t a, std::size_t b) const {
  auto it = edges_.find(canonical(a, b));
  return it == edges_.end() ? 0.0 : it->second;
}

std::vector<std::size_t> Network::neighbors(std::size_t a) const {
  std::vector<std::size_t> out;
  for (const auto& [e, w] : edges_) {
    if (e.first == a) out.push_back(e.second);
    else if (e.second == a) out.push_back(e.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network Network::complete(std::size_t n, double weight) {
  Network net(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) net.add_edge(a, b, weight);
  return net;
}

Network Network::ring(std::size_t n, std::size_t k, double weight) {
  Network net(n);
  if (n < 2) return net;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 1; j <= k && j < n; ++j) {
      const std::size_t b = (a + j) % n;
      if (a != b) net.add_edge(a, b, weight);
    }
  return net;
}

Network Network::erdos_renyi(std::size_t n, double p, double weight, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("edge probability outside [0,1]");
  Network net(n);
  Rng rng(derive_seed(seed, {0x4e45ULL}));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (rng.bernoulli(p)) net.add_edge(a, b, weight);
  return net;
}

Network Network::stochastic_block(std::span<const std::size_t> block_sizes, double p_in, double p_out, double weight,
                                  std::uint64_t seed) {
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
    throw ValidationError("edge probability outside [0,1]");
  std::vector<std::size_t> block;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) block.insert(block.end(), block_sizes[b], b);
  Network net(block.size());
  Rng rng(derive_seed(seed, {0x5342ULL}));
  for (std::size_t a = 0; a < block.size(); ++a)
    for (std::size_t b = a + 1; b < block.size(); ++b)
      if (rng.bernoulli(block[a] == block[b] ? p_in : p_out)) net.add_edge(a, b, weight);
  return net;
}

Label claim_label(const Agent& agent, const std::string& claim_id) {
  auto it = agent.views.find(claim_id);
  if (it == agent.views.end()) return Label::Undecided;
  return it->second.labels.at(it->second.lattice.root().id).label;
}

double label_agreement(const Agent& a, const Agent& b, std::span<const std::string> claims) {
  if (claims.empty()) return 1.0;
  std::size_t same = 0;
  for (const auto& c : claims) same += claim_label(a, c) == claim_label(b, c) ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(claims.size());
}

TribeAssignment single_linkage(const std::vector<std::vector<double>>& distance, double tau) {
  const std::size_t n = distance.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (distance[i].size() != n) throw ValidationError("distance matrix is not square");
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance[i][j] < tau) parent[find(i)] = find(j);
  }
  TribeAssignment out;
  out.tribe_of.resize(n);
  std::map<std::size_t, std::size_t> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = ids.emplace(find(i), ids.size());
    out.tribe_of[i] = it->second;
  }
  out.tribe_count = ids.size();
  return out;
}

double combined_distance(const Agent& a, const Agent& b, std::span<const std::string> claims,
                         const TribeSettings& settings) {
  return settings.lambda * profile_distance(a, b, settings.layer_weights) +
         (1.0 - settings.lambda) * (1.0 - label_agreement(a, b, claims));
}

TribeAssignment detect_tribes(std::span<const Agent> population, std::span<const std::string> claims,
                              const TribeSettings& settings) {
  if (population.empty()) throw ValidationError("detect_tribes needs at least one agent");
  const std::size_t n = population.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = combined_distance(population[i], population[j], claims, settings);
  return single_linkage(d, settings.tau);
}

PolarizationMetrics polarization_index(std::span<const Agent> population, const TribeAssignment& assignment,
                                       std::span<const std::string> claims) {
  if (assignment.tribe_of.size() != population.size()) throw ValidationError("assignment does not cover population");
  PolarizationMetrics m;
  m.tribe_count = assignment.tribe_count;
  double within = 0.0, cross = 0.0;
  std::size_t within_n = 0, cross_n = 0;
  for (std::size_t i = 0; i < population.size(); ++i)
    for (std::size_t j = i + 1; j < population.size(); ++j) {
      const double agree = label_agreement(population[i], population[j], claims);
      if (assignment.tribe_of[i] == assignment.tribe_of[j]) {
        within += agree;
        ++within_n;
      } else {
        cross += agree;
        ++cross_n;
      }
    }
  m.within_agreement = within_n ? within / static_cast<double>(within_n) : 1.0;
  m.cross_agreement = cross_n ? cross / static_cast<double>(cross_n) : m.within_agreement;
  m.polarization_index = assignment.tribe_count <= 1 ? 0.0 : std::max(0.0, m.within_agreement - m.cross_agreement);
  return m;
}

double tribe_fitness(std::span<const Agent* const> members, const World& world, std::span<const std::string> claims,
                     double w) {
  if (members.empty()) throw ValidationError("tribe_fitness needs a non-empty tribe");
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("fitness weight outside [0,1]");
  std::size_t accepted = 0, correct = 0;
  for (const Agent* a : members)
    for (const auto& c : claims)
      if (claim_label(*a, c) == Label::Accepted) {
        ++accepted;
        correct += ground_truth(world, c) ? 1 : 0;
      }
  const double accuracy = accepted ? static_cast<double>(correct) / static_cast<double>(accepted) : 0.0;

  double cohesion = 1.0;
  if (members.size() > 1) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j, ++pairs)
        sum += label_agreement(*members[i], *members[j], claims);
    cohesion = sum / static_cast<double>(pairs);
  }
  return w * accuracy + (1.0 - w) * cohesion;
}

double perceived_consensus(std::size_t agent, std::span<const Agent> population, const Network& network,
                           const std::string& claim_id) {
  if (agent >= population.size() || agent >= network.size()) throw LookupError("agent not in network");
  const Label own = claim_label(population[agent], claim_id);
  const auto neighbors = network.neighbors(agent);
  double neighbor_fraction = 1.0;
  if (!neighbors.empty()) {
    std::size_t same = 0;
    for (auto n : neighbors) same += claim_label(population[n], claim_id) == own ? 1 : 0;
    neighbor_fraction = static_cast<double>(same) / static_cast<double>(neighbors.size());
  }
  std::size_t same = 0;
  for (const auto& a : population) same += claim_label(a, claim_id) == own ? 1 : 0;
  const double population_fraction = static_cast<double>(same) / static_cast<double>(population.size());
  const double bias = population[agent].biases.false_consensus;
  return bias * neighbor_fraction + (1.0 - bias) * population_fraction;
}

Network rewire_homophily(const Network& network, std::span<const Agent> population, double rate,
                         std::uint64_t seed, const LayerWeights& weights) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("rewiring rate outside [0,1]");
  if (population.size() != network.size()) throw ValidationError("network and population sizes differ");
  Network out = network;
  if (rate == 0.0) return out;
  Rng rng(derive_seed(seed, {0x5257ULL}));
  const std::size_t n = population.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = profile_distance(population[i], population[j], weights);

  const auto snapshot = network.edges();
  for (const auto& [edge, w] : snapshot) {
    const auto [a, b] = edge;
    if (!rng.bernoulli(rate * d[a][b])) continue;
    std::vector<std::size_t> closer;
    for (std::size_t c = 0; c < n; ++c)
      if (c != a && c != b && !out.has_edge(a, c) && d[a][c] < d[a][b]) closer.push_back(c);
    if (closer.empty() || !out.has_edge(a, b)) continue;
    const std::size_t c = closer[rng.index(closer.size())];
    out.remove_edge(a, b);
    out.add_edge(a, c, w);
  }
  return out;
}

}  // namespace mevir
