#ifndef NRP_GENERATOR_HPP_
#define NRP_GENERATOR_HPP_

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"
#include "nrp/instance_io.hpp"
#include "nrp/interaction_graph.hpp"
#include "nrp/rng.hpp"

namespace nrp {

/// Dataset shape families mirrored by the generator: small instances with
/// 1-10 efforts and 1-5 client scores, or agile-sized ones with 1-20 efforts
/// and coarse {1,2,3} scores.
enum class ValueScale { nrp20, nrp100 };

inline const char* to_string(ValueScale scale) {
  return scale == ValueScale::nrp20 ? "nrp20" : "nrp100";
}

struct GeneratorOptions {
  std::size_t n_requirements = 20;
  std::size_t n_clients = 5;
  double interaction_density = 0.2;  // interactions per requirement
  ValueScale scale = ValueScale::nrp20;
  std::uint64_t seed = 1;
  std::vector<double> effort_ratios = {0.3, 0.5, 0.75};
  double client_coverage = 0.6;  // probability a client scores a requirement
  std::string name;              // default: derived from parameters
};

namespace detail {

inline std::string padded_id(char prefix, std::size_t index, std::size_t total) {
  std::size_t width = 2;
  for (std::size_t v = 100; v <= total; v *= 10) ++width;
  std::string digits = std::to_string(index);
  std::string out(1, prefix);
  out.append(width > digits.size() ? width - digits.size() : 0, '0');
  out += digits;
  return out;
}

inline InstanceFile draft_instance(const GeneratorOptions& options, Rng& rng) {
  InstanceFile file;
  file.name = options.name;
  file.effort_ratios = options.effort_ratios;

  const bool small_scale = options.scale == ValueScale::nrp20;
  const std::uint64_t max_effort = small_scale ? 10 : 20;
  const std::uint64_t max_score = small_scale ? 5 : 3;

  for (std::size_t c = 1; c <= options.n_clients; ++c) {
    Client client;
    client.id = padded_id('c', c, options.n_clients);
    client.weight = static_cast<double>(rng.uniform_int(1, 5));
    file.clients.push_back(std::move(client));
  }

  for (std::size_t i = 1; i <= options.n_requirements; ++i) {
    Requirement req;
    req.id = padded_id('r', i, options.n_requirements);
    req.effort = static_cast<double>(rng.uniform_int(1, max_effort));
    std::size_t valued = 0;
    for (const auto& client : file.clients) {
      if (rng.next_double() < options.client_coverage) {
        req.client_values[client.id] = static_cast<double>(rng.uniform_int(1, max_score));
        ++valued;
      }
    }
    if (valued == 0 && !file.clients.empty()) {
      const auto& client = file.clients[rng.uniform_int(0, file.clients.size() - 1)];
      req.client_values[client.id] = static_cast<double>(rng.uniform_int(1, max_score));
    }
    file.requirements.push_back(std::move(req));
  }

  // Interactions: implications oriented along a hidden permutation so the
  // raw implication graph is acyclic by construction.
  const std::size_t n = options.n_requirements;
  const std::size_t total =
      static_cast<std::size_t>(options.interaction_density * static_cast<double>(n) + 0.5);
  if (total == 0 || n < 2) return file;

  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(rank[i], rank[rng.uniform_int(0, i)]);
  }

  std::size_t n_implications = static_cast<std::size_t>(0.6 * total + 0.5);
  std::size_t n_combinations = static_cast<std::size_t>(0.2 * total + 0.5);
  std::size_t n_exclusions = total - std::min(total, n_implications + n_combinations);
  n_implications = std::min(n_implications, total);
  n_combinations = std::min(n_combinations, total - n_implications);

  std::set<IdPair> used;  // normalized pairs across all three sets
  auto draw_pair = [&]() -> std::pair<std::size_t, std::size_t> {
    std::size_t a = rng.uniform_int(0, n - 1);
    std::size_t b = rng.uniform_int(0, n - 1);
    return {a, b};
  };
  auto try_insert = [&](std::size_t a, std::size_t b, std::vector<IdPair>& target,
                        bool oriented) {
    if (a == b) return false;
    const auto& ra = file.requirements[a].id;
    const auto& rb = file.requirements[b].id;
    auto norm = detail::normalized_pair({ra, rb});
    if (!used.insert(norm).second) return false;
    if (oriented && rank[a] > rank[b]) {
      target.emplace_back(rb, ra);
    } else {
      target.emplace_back(ra, rb);
    }
    return true;
  };

  const std::size_t max_attempts = 50 * (total + 1);
  std::size_t attempts = 0;
  auto fill = [&](std::size_t want, std::vector<IdPair>& target, bool oriented) {
    std::size_t placed = 0;
    while (placed < want && attempts < max_attempts) {
      ++attempts;
      auto [a, b] = draw_pair();
      if (try_insert(a, b, target, oriented)) ++placed;
    }
  };
  fill(n_implications, file.interactions.implications, true);
  fill(n_combinations, file.interactions.combinations, false);
  fill(n_exclusions, file.interactions.exclusions, false);
  return file;
}

}  // namespace detail

/// Deterministic synthetic instance. Drafts are re-drawn (bounded) when the
/// interaction mix transforms to a contradiction or an implication cycle,
/// so every returned file builds a valid interaction graph.
inline InstanceFile generate_instance(GeneratorOptions options) {
  if (options.n_requirements == 0) {
    throw ValidationError("generator: n_requirements must be >= 1");
  }
  if (options.interaction_density < 0.0 || options.interaction_density > 1.0) {
    throw ValidationError("generator: interaction_density must lie in [0, 1]");
  }
  if (options.name.empty()) {
    options.name = std::string("gen-") + to_string(options.scale) + "-n" +
                   std::to_string(options.n_requirements) + "-s" +
                   std::to_string(options.seed);
  }

  constexpr int kMaxRetries = 64;
  std::uint64_t stream = options.seed;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Rng rng(attempt == 0 ? options.seed : splitmix64(stream));
    auto file = detail::draft_instance(options, rng);
    try {
      auto instance = file.make_instance(options.effort_ratios.empty()
                                             ? 1.0
                                             : options.effort_ratios.front());
      auto graph = build_interaction_graph(instance);
      ancestral_ordering(graph);
      return file;
    } catch (const ContradictionError&) {
      continue;
    } catch (const CycleError&) {
      continue;
    }
  }
  throw GenerationError("generator: no contradiction-free draw after " +
                        std::to_string(kMaxRetries) + " attempts (density too high?)");
}

}  // namespace nrp

#endif  // NRP_GENERATOR_HPP_
