#ifndef NRP_EDA_HPP_
#define NRP_EDA_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"
#include "nrp/interaction_graph.hpp"
#include "nrp/metrics.hpp"
#include "nrp/rng.hpp"

namespace nrp {

enum class InitMethod { random, pls, maxprob };
enum class Sampler { pls, maxprob };

inline const char* to_string(InitMethod m) {
  switch (m) {
    case InitMethod::random: return "random";
    case InitMethod::pls: return "pls";
    case InitMethod::maxprob: return "maxprob";
  }
  return "?";
}

inline const char* to_string(Sampler s) {
  return s == Sampler::pls ? "pls" : "maxprob";
}

struct EdaConfig {
  std::size_t population_size = 0;
  std::size_t max_iterations = 100;
  std::size_t stall_iterations = 10;
  InitMethod init_method = InitMethod::pls;
  Sampler sampler = Sampler::pls;
  double m_equivalent_size = 1.0;
  double prior_p = 0.5;
  std::size_t sample_size = 0;  // 0 -> population_size
  std::uint64_t seed = 1;
  std::size_t maxprob_expansion_limit = 4'000'000;

  std::size_t effective_sample_size() const {
    return sample_size == 0 ? population_size : sample_size;
  }

  /// Parameter defaults scaled to the instance size: population 5n, 100
  /// iterations (5n once instances reach 100 requirements), stall after a
  /// tenth of the iterations without change.
  static EdaConfig defaults_for(std::size_t n_requirements) {
    EdaConfig config;
    const std::size_t n = std::max<std::size_t>(n_requirements, 1);
    config.population_size = 5 * n;
    config.max_iterations = n >= 100 ? 5 * n : 100;
    config.stall_iterations = std::max<std::size_t>(1, config.max_iterations / 10);
    return config;
  }

  void validate() const {
    if (population_size == 0) throw ValidationError("population_size must be positive");
    if (max_iterations == 0) throw ValidationError("max_iterations must be positive");
    if (stall_iterations == 0) throw ValidationError("stall_iterations must be positive");
    if (stall_iterations > max_iterations) {
      throw ValidationError("stall_iterations must not exceed max_iterations");
    }
    if (effective_sample_size() > population_size) {
      throw ValidationError("sample_size must not exceed population_size");
    }
    if (m_equivalent_size < 0.0) throw ValidationError("m_equivalent_size must be >= 0");
    if (prior_p < 0.0 || prior_p > 1.0) throw ValidationError("prior_p must lie in [0, 1]");
  }
};

/// One conditional probability table. Only the configuration with every
/// parent active is satisfiable; in it the node may be 1 with probability
/// `p_satisfied`. Every other configuration has probability exactly 0 and is
/// never touched by learning.
struct ConditionalTable {
  struct ParentRef {
    int node = -1;       // parent node index in the graph
    bool indicator = false;
    int source = -1;     // decision node whose genes determine the value
  };

  int node = -1;
  std::vector<ParentRef> parents;
  double p_satisfied = 0.5;

  std::uint32_t full_mask() const {
    return parents.size() == 32 ? 0xffffffffu
                                : (std::uint32_t{1} << parents.size()) - 1;
  }

  /// p(node = 1 | configuration). Bit i of `config` is parent i's value,
  /// indicator parents included.
  double probability_one(std::uint32_t config) const {
    return config == full_mask() ? p_satisfied : 0.0;
  }

  std::uint32_t config_for(const std::vector<std::uint8_t>& genes) const {
    std::uint32_t config = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const auto& p = parents[i];
      const bool value = p.indicator ? genes[p.source] == 0 : genes[p.source] == 1;
      if (value) config |= std::uint32_t{1} << i;
    }
    return config;
  }

  bool satisfied(const std::vector<std::uint8_t>& genes) const {
    for (const auto& p : parents) {
      if (p.indicator ? genes[p.source] != 0 : genes[p.source] != 1) return false;
    }
    return true;
  }
};

/// An interaction-valid selection in decision-node space, with cached
/// objective values.
struct Individual {
  std::vector<std::uint8_t> genes;  // indexed by decision node
  double satisfaction = 0.0;
  double effort = 0.0;
};

inline bool operator==(const Individual& a, const Individual& b) {
  return a.genes == b.genes;
}

struct Population {
  std::vector<Individual> individuals;
  std::size_t capacity = 0;
};

/// Fixed-structure probabilistic model over the transformed interaction
/// graph: the edge set never changes, learning only refreshes the
/// satisfiable-configuration probabilities.
struct ProbabilisticModel {
  InteractionGraph graph;
  AncestralOrdering ordering;
  std::vector<ConditionalTable> tables;  // indexed by decision node
};

namespace detail {

constexpr std::size_t kMaxParents = 20;

inline Individual make_individual(std::vector<std::uint8_t> genes,
                                  const InteractionGraph& graph) {
  Individual ind;
  ind.genes = std::move(genes);
  for (std::size_t v = 0; v < ind.genes.size(); ++v) {
    if (!ind.genes[v]) continue;
    ind.satisfaction += graph.nodes[v].satisfaction;
    ind.effort += graph.nodes[v].effort;
  }
  return ind;
}

}  // namespace detail

/// Expands an individual back to original requirement ids.
inline Solution solution_from_individual(const Individual& ind,
                                         const InteractionGraph& graph) {
  Solution s;
  s.satisfaction = ind.satisfaction;
  s.effort = ind.effort;
  for (std::size_t v = 0; v < ind.genes.size(); ++v) {
    if (!ind.genes[v]) continue;
    const auto& node = graph.nodes[v];
    s.selected.insert(s.selected.end(), node.members.begin(), node.members.end());
  }
  std::sort(s.selected.begin(), s.selected.end());
  return s;
}

/// Initial model: every satisfiable parent configuration gets probability
/// 1/2, every violating configuration 0.
inline ProbabilisticModel build_initial_model(const InteractionGraph& graph,
                                              const AncestralOrdering& ordering) {
  ProbabilisticModel model;
  model.graph = graph;
  model.ordering = ordering;
  const std::size_t n = graph.decision_count();
  model.tables.resize(n);

  for (std::size_t v = 0; v < n; ++v) {
    auto& table = model.tables[v];
    table.node = static_cast<int>(v);
    table.p_satisfied = 0.5;
    for (const auto& [p, c] : graph.edges) {
      if (c != static_cast<int>(v)) continue;
      ConditionalTable::ParentRef ref;
      ref.node = p;
      if (graph.nodes[p].is_decision()) {
        ref.indicator = false;
        ref.source = p;
      } else {
        // The indicator's member is the excluded node's id.
        ref.indicator = true;
        ref.source = graph.index_of(graph.nodes[p].members.front());
        if (ref.source < 0) {
          throw ValidationError("indicator '" + graph.nodes[p].id +
                                "' references an unknown node");
        }
      }
      table.parents.push_back(ref);
    }
    std::sort(table.parents.begin(), table.parents.end(),
              [](const auto& a, const auto& b) {
                if (a.indicator != b.indicator) return !a.indicator;
                return a.node < b.node;
              });
    if (table.parents.size() > detail::kMaxParents) {
      throw ValidationError("node '" + graph.nodes[v].id + "' has in-degree " +
                            std::to_string(table.parents.size()) +
                            " above the table guard of " +
                            std::to_string(detail::kMaxParents));
    }
  }
  return model;
}

/// m-estimator update of every satisfiable configuration:
/// p = (N(node, pa) + m*p0) / (N(pa) + m), counted over the population with
/// indicator values derived from each individual. Violating configurations
/// stay at probability 0.
inline ProbabilisticModel learn_parameters(const ProbabilisticModel& model,
                                           const Population& population,
                                           const EdaConfig& config) {
  ProbabilisticModel learned = model;
  const double m = config.m_equivalent_size;
  for (auto& table : learned.tables) {
    std::uint64_t n_config = 0, n_one = 0;
    for (const auto& ind : population.individuals) {
      if (!table.satisfied(ind.genes)) continue;
      ++n_config;
      if (ind.genes[table.node]) ++n_one;
    }
    if (m == 0.0) {
      table.p_satisfied = n_config == 0
                              ? config.prior_p
                              : static_cast<double>(n_one) / static_cast<double>(n_config);
    } else {
      table.p_satisfied = (static_cast<double>(n_one) + m * config.prior_p) /
                          (static_cast<double>(n_config) + m);
    }
  }
  return learned;
}

/// Joint probability of a complete assignment under the sampling semantics:
/// an indicator flips to 0 from the point its member is instantiated, so it
/// only de-activates the configurations of nodes that come later in the
/// ordering. This is exactly the path product assigned by PLS and by the
/// maximum probability search.
inline double joint_probability(const ProbabilisticModel& model,
                                const std::vector<std::uint8_t>& genes) {
  const auto pos = model.ordering.positions(model.graph);
  double prob = 1.0;
  for (int v : model.ordering.order) {
    const auto& table = model.tables[v];
    bool active = true;
    for (const auto& parent : table.parents) {
      const bool value = parent.indicator
                             ? !(genes[parent.source] && pos[parent.source] < pos[v])
                             : genes[parent.source] == 1;
      if (!value) {
        active = false;
        break;
      }
    }
    const double p_one = active ? table.p_satisfied : 0.0;
    prob *= genes[v] ? p_one : 1.0 - p_one;
  }
  return prob;
}

/// Probabilistic logic sampling: instantiate each node forwards along the
/// ancestral ordering. Indicators start at 1 and flip when their member is
/// instantiated to 1, so every sample is interaction-valid by construction.
inline std::vector<Individual> sample_pls(const ProbabilisticModel& model,
                                          std::size_t count, Rng& rng) {
  std::vector<Individual> sample;
  sample.reserve(count);
  const std::size_t n = model.graph.decision_count();
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::uint8_t> genes(n, 0);
    for (int v : model.ordering.order) {
      const auto& table = model.tables[v];
      const double p = table.satisfied(genes) ? table.p_satisfied : 0.0;
      if (rng.next_double() < p) genes[v] = 1;
    }
    sample.push_back(detail::make_individual(std::move(genes), model.graph));
  }
  return sample;
}

/// Deterministic best-first expansion of the assignment tree by joint
/// probability; returns the `count` most probable complete assignments
/// (fewer when the model admits fewer valid ones). Ties prefer the 0-branch
/// and then lexicographic order. Throws ResourceError past the expansion
/// guard; the method degenerates to breadth-first search on flat models.
inline std::vector<Individual> sample_maxprob(const ProbabilisticModel& model,
                                              std::size_t count,
                                              std::size_t expansion_limit = 4'000'000) {
  struct State {
    double prob;
    std::size_t depth;
    std::vector<std::uint8_t> genes;
  };
  // Max-heap: higher probability first, lexicographically smaller assignment
  // prefix (along the ordering) on ties.
  const auto& order = model.ordering.order;
  auto prefix_less = [&order](const State& a, const State& b) {
    const std::size_t common = std::min(a.depth, b.depth);
    for (std::size_t i = 0; i < common; ++i) {
      const auto ga = a.genes[order[i]];
      const auto gb = b.genes[order[i]];
      if (ga != gb) return ga < gb;
    }
    return a.depth < b.depth;
  };
  auto cmp = [prefix_less](const State& a, const State& b) {
    if (a.prob != b.prob) return a.prob < b.prob;
    return prefix_less(b, a);
  };
  std::priority_queue<State, std::vector<State>, decltype(cmp)> queue(cmp);

  const std::size_t n = model.graph.decision_count();
  const std::size_t k = model.ordering.order.size();
  queue.push(State{1.0, 0, std::vector<std::uint8_t>(n, 0)});

  std::vector<Individual> results;
  std::size_t expansions = 0;
  while (!queue.empty() && results.size() < count) {
    State state = queue.top();
    queue.pop();
    if (state.depth == k) {
      results.push_back(detail::make_individual(std::move(state.genes), model.graph));
      continue;
    }
    if (++expansions > expansion_limit) {
      throw ResourceError("maximum probability search exceeded the expansion guard of " +
                          std::to_string(expansion_limit) + " states");
    }
    const int v = model.ordering.order[state.depth];
    const auto& table = model.tables[v];
    const double p = table.satisfied(state.genes) ? table.p_satisfied : 0.0;
    if (1.0 - p > 0.0) {
      State zero = state;
      zero.prob *= 1.0 - p;
      ++zero.depth;
      queue.push(std::move(zero));
    }
    if (p > 0.0) {
      State one = std::move(state);
      one.prob *= p;
      one.genes[v] = 1;
      ++one.depth;
      queue.push(std::move(one));
    }
  }
  return results;
}

/// Population initialization per the configured method. `random` draws a
/// fair coin per node along the ancestral ordering, repairing unsatisfiable
/// configurations to 0; the other two sample the provided (initial) model.
inline Population initialize_population(const InteractionGraph& graph,
                                        const ProbabilisticModel& model,
                                        const EdaConfig& config, Rng& rng) {
  Population population;
  population.capacity = config.population_size;
  switch (config.init_method) {
    case InitMethod::random: {
      const std::size_t n = graph.decision_count();
      for (std::size_t i = 0; i < config.population_size; ++i) {
        std::vector<std::uint8_t> genes(n, 0);
        for (int v : model.ordering.order) {
          if (!model.tables[v].satisfied(genes)) continue;  // repair: forced 0
          if (rng.next_double() < 0.5) genes[v] = 1;
        }
        population.individuals.push_back(detail::make_individual(std::move(genes), graph));
      }
      break;
    }
    case InitMethod::pls:
      population.individuals = sample_pls(model, config.population_size, rng);
      break;
    case InitMethod::maxprob:
      population.individuals =
          sample_maxprob(model, config.population_size, config.maxprob_expansion_limit);
      break;
  }
  return population;
}

struct ReplaceInfo {
  bool first_layer_fit = true;
  std::size_t layers_taken = 0;
};

namespace detail {

// Non-dominated subset of `pool` (indices), pool sorted by
// (effort asc, satisfaction desc, genes).
inline std::vector<std::size_t> nondominated_layer(const std::vector<Individual>& pool,
                                                   const std::vector<std::size_t>& alive) {
  std::vector<std::size_t> order = alive;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pool[a].effort != pool[b].effort) return pool[a].effort < pool[b].effort;
    if (pool[a].satisfaction != pool[b].satisfaction) {
      return pool[a].satisfaction > pool[b].satisfaction;
    }
    return pool[a].genes < pool[b].genes;
  });
  std::vector<std::size_t> layer;
  double best_sat = -1.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_max = best_sat;
    while (j < order.size() && pool[order[j]].effort == pool[order[i]].effort) {
      group_max = std::max(group_max, pool[order[j]].satisfaction);
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      if (pool[order[k]].satisfaction >= group_max) layer.push_back(order[k]);
    }
    best_sat = group_max;
    i = j;
  }
  return layer;
}

}  // namespace detail

/// Elitist replacement: merge population and sample (deduplicating identical
/// selections, dropping over-budget individuals), then copy successive
/// non-dominated layers into the new population. A layer that does not fit
/// is cut to its highest-satisfaction members.
inline Population replace(const Population& current, const std::vector<Individual>& sample,
                          double effort_limit, ReplaceInfo* info = nullptr) {
  std::vector<Individual> pool = current.individuals;
  pool.insert(pool.end(), sample.begin(), sample.end());
  std::sort(pool.begin(), pool.end(),
            [](const Individual& a, const Individual& b) { return a.genes < b.genes; });
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::erase_if(pool, [&](const Individual& ind) { return ind.effort > effort_limit; });

  Population next;
  next.capacity = current.capacity;
  ReplaceInfo local;
  std::vector<std::size_t> alive(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) alive[i] = i;

  while (next.individuals.size() < next.capacity && !alive.empty()) {
    auto layer = detail::nondominated_layer(pool, alive);
    const std::size_t room = next.capacity - next.individuals.size();
    if (layer.size() <= room) {
      for (std::size_t idx : layer) next.individuals.push_back(pool[idx]);
      std::set<std::size_t> taken(layer.begin(), layer.end());
      std::erase_if(alive, [&](std::size_t idx) { return taken.count(idx) != 0; });
      ++local.layers_taken;
    } else {
      if (local.layers_taken == 0) local.first_layer_fit = false;
      std::sort(layer.begin(), layer.end(), [&](std::size_t a, std::size_t b) {
        if (pool[a].satisfaction != pool[b].satisfaction) {
          return pool[a].satisfaction > pool[b].satisfaction;
        }
        if (pool[a].effort != pool[b].effort) return pool[a].effort < pool[b].effort;
        return pool[a].genes < pool[b].genes;
      });
      for (std::size_t i = 0; i < room; ++i) next.individuals.push_back(pool[layer[i]]);
      ++local.layers_taken;
      break;
    }
  }

  // Canonical order so population comparison is plain equality.
  std::sort(next.individuals.begin(), next.individuals.end(),
            [](const Individual& a, const Individual& b) { return a.genes < b.genes; });
  if (info) *info = local;
  return next;
}

struct IterationTrace {
  std::size_t iteration = 0;
  double hypervolume = 0.0;
  std::size_t population_count = 0;
  bool changed = true;
  bool first_layer_fit = true;
};

struct RunReport {
  std::size_t iterations = 0;
  double wall_ms = 0.0;
  std::size_t front_size = 0;
  std::string stop_reason;
  std::vector<IterationTrace> trace;
};

namespace detail {

inline Front population_front(const Population& population, const InteractionGraph& graph,
                              double effort_limit, const std::string& name) {
  std::vector<Solution> feasible;
  for (const auto& ind : population.individuals) {
    if (ind.effort <= effort_limit) {
      feasible.push_back(solution_from_individual(ind, graph));
    }
  }
  return nondominated_filter(std::move(feasible), name);
}

// Stall criterion compares selected-requirement sets, not storage order.
inline bool same_selection_sets(const Population& a, const Population& b) {
  auto canonical = [](const Population& p) {
    std::vector<std::vector<std::uint8_t>> genes;
    genes.reserve(p.individuals.size());
    for (const auto& ind : p.individuals) genes.push_back(ind.genes);
    std::sort(genes.begin(), genes.end());
    genes.erase(std::unique(genes.begin(), genes.end()), genes.end());
    return genes;
  };
  return canonical(a) == canonical(b);
}

}  // namespace detail

/// The full EDA loop: initialize, then sample / replace / learn until the
/// iteration budget is spent or the population is unchanged for
/// `stall_iterations` consecutive iterations. Deterministic given the seed.
inline std::pair<Front, RunReport> run_eda(const NrpInstance& instance,
                                           const InteractionGraph& graph,
                                           const AncestralOrdering& ordering,
                                           const EdaConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const double budget = instance.effort_limit;

  Rng rng(config.seed);
  ProbabilisticModel model = build_initial_model(graph, ordering);
  Population population = initialize_population(graph, model, config, rng);
  model = learn_parameters(model, population, config);

  RunReport report;
  std::size_t stall = 0;
  while (report.iterations < config.max_iterations) {
    std::vector<Individual> sample =
        config.sampler == Sampler::pls
            ? sample_pls(model, config.effective_sample_size(), rng)
            : sample_maxprob(model, config.effective_sample_size(),
                             config.maxprob_expansion_limit);
    ReplaceInfo info;
    Population next = replace(population, sample, budget, &info);
    model = learn_parameters(model, next, config);

    const bool changed = !detail::same_selection_sets(next, population);
    stall = changed ? 0 : stall + 1;
    population = std::move(next);
    ++report.iterations;

    IterationTrace trace;
    trace.iteration = report.iterations;
    trace.population_count = population.individuals.size();
    trace.changed = changed;
    trace.first_layer_fit = info.first_layer_fit;
    trace.hypervolume = hypervolume(
        detail::population_front(population, graph, budget, instance.name), budget);
    report.trace.push_back(trace);

    if (stall >= config.stall_iterations) {
      report.stop_reason = "stalled";
      break;
    }
  }
  if (report.stop_reason.empty()) report.stop_reason = "max_iterations";

  Front front = detail::population_front(population, graph, budget, instance.name);
  report.front_size = front.size();
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return {std::move(front), std::move(report)};
}

}  // namespace nrp

#endif  // NRP_EDA_HPP_
