#ifndef NRP_EXACT_HPP_
#define NRP_EXACT_HPP_

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"
#include "nrp/interaction_graph.hpp"
#include "nrp/metrics.hpp"

namespace nrp {

/// Search-tree accounting. The full binary tree over k decision variables
/// has 2^(k+1) - 1 nodes including the empty root. `explored` counts every
/// node examined (root and rejected branch nodes included); the pruned
/// counters accumulate the subtree nodes skipped below each rejected
/// 1-branch, split by cause. explored + total_pruned() always equals the
/// full tree size.
struct SearchStats {
  std::uint64_t explored = 0;
  std::uint64_t pruned_interaction = 0;
  std::uint64_t pruned_effort = 0;

  std::uint64_t total_pruned() const { return pruned_interaction + pruned_effort; }
};

struct ExactOptions {
  std::size_t max_enumeration_bits = 30;  // brute-force refusal guard
  bool effort_prune = true;               // bound 1-branches on the budget too
};

enum class ExactSolver { brute_force, branch_and_bound };

namespace detail {

// Precomputed per-decision-node data for mask-based enumeration.
struct DecisionTables {
  std::size_t count = 0;
  std::vector<std::uint64_t> parent_mask;   // decision parents of v
  std::vector<std::uint64_t> partner_mask;  // nodes excluding v
  std::vector<double> satisfaction;
  std::vector<double> effort;
};

inline DecisionTables decision_tables(const InteractionGraph& graph) {
  DecisionTables t;
  t.count = graph.decision_count();
  t.parent_mask.assign(t.count, 0);
  t.partner_mask.assign(t.count, 0);
  t.satisfaction.resize(t.count);
  t.effort.resize(t.count);
  for (std::size_t v = 0; v < t.count; ++v) {
    for (int p : graph.requirement_parents(static_cast<int>(v))) {
      t.parent_mask[v] |= std::uint64_t{1} << p;
    }
    for (int q : graph.exclusion_partners(static_cast<int>(v))) {
      t.partner_mask[v] |= std::uint64_t{1} << q;
    }
    t.satisfaction[v] = graph.nodes[v].satisfaction;
    t.effort[v] = graph.nodes[v].effort;
  }
  return t;
}

inline Solution expand_selection(std::uint64_t mask, const InteractionGraph& graph) {
  Solution s;
  for (std::size_t v = 0; v < graph.decision_count(); ++v) {
    if (!(mask >> v & 1)) continue;
    const auto& node = graph.nodes[v];
    s.selected.insert(s.selected.end(), node.members.begin(), node.members.end());
    s.satisfaction += node.satisfaction;
    s.effort += node.effort;
  }
  std::sort(s.selected.begin(), s.selected.end());
  return s;
}

// Streams all masks that satisfy the interactions and the budget.
template <typename Fn>
void for_each_valid_mask(const DecisionTables& t, double budget, Fn&& fn) {
  const std::uint64_t end = std::uint64_t{1} << t.count;
  for (std::uint64_t mask = 0; mask < end; ++mask) {
    bool ok = true;
    double effort = 0.0;
    for (std::size_t v = 0; v < t.count && ok; ++v) {
      if (!(mask >> v & 1)) continue;
      ok = (t.parent_mask[v] & ~mask) == 0 && (t.partner_mask[v] & mask) == 0;
      effort += t.effort[v];
    }
    if (!ok || effort > budget) continue;
    fn(mask);
  }
}

inline void guard_enumeration(std::size_t k, std::size_t max_bits) {
  if (k > max_bits) {
    throw SizeGuardError("exhaustive enumeration refused for " + std::to_string(k) +
                         " decision variables (guard " + std::to_string(max_bits) +
                         "); divide the instance and use split_and_combine");
  }
}

}  // namespace detail

/// Exact front by exhaustive enumeration of all requirement combinations.
/// Refuses instances above the enumeration guard.
inline Front brute_force_front(const NrpInstance& instance, const InteractionGraph& graph,
                               const ExactOptions& options = {}) {
  const auto tables = detail::decision_tables(graph);
  detail::guard_enumeration(tables.count, options.max_enumeration_bits);

  std::vector<Solution> buffer;
  constexpr std::size_t kCompactAt = 1 << 16;
  detail::for_each_valid_mask(tables, instance.effort_limit, [&](std::uint64_t mask) {
    buffer.push_back(detail::expand_selection(mask, graph));
    if (buffer.size() >= kCompactAt) {
      buffer = nondominated_filter(std::move(buffer)).solutions;
    }
  });
  auto front = nondominated_filter(std::move(buffer), instance.name);
  return front;
}

/// All interaction-valid solutions within the budget (no dominance filter).
/// Used by the split/recombine protocol.
inline std::vector<Solution> enumerate_valid_solutions(const NrpInstance& instance,
                                                       const InteractionGraph& graph,
                                                       const ExactOptions& options = {}) {
  const auto tables = detail::decision_tables(graph);
  detail::guard_enumeration(tables.count, options.max_enumeration_bits);
  std::vector<Solution> out;
  detail::for_each_valid_mask(tables, instance.effort_limit, [&](std::uint64_t mask) {
    out.push_back(detail::expand_selection(mask, graph));
  });
  return out;
}

namespace detail {

struct PartialSolution {
  std::vector<std::uint8_t> genes;  // by ordering position
  double effort = 0.0;
  double satisfaction = 0.0;
};

struct LevelSearchResult {
  std::vector<PartialSolution> complete;
  SearchStats stats;
};

// Algorithm core shared by branch_and_bound_front and the split protocol:
// walk the ancestral ordering, extending every partial solution with 0
// (always) and with 1 (only while interactions, and optionally the budget,
// hold). Returns the surviving complete assignments.
inline LevelSearchResult level_search(const NrpInstance& instance,
                                      const InteractionGraph& graph,
                                      const AncestralOrdering& ordering,
                                      const ExactOptions& options) {
  const std::size_t k = ordering.order.size();
  if (k != graph.decision_count()) {
    throw ValidationError("ordering does not cover every decision node");
  }
  const auto pos = ordering.positions(graph);

  // Parent / partner lookups in ordering positions. Partners later in the
  // ordering are unassigned when a node is decided; the exclusion fires at
  // the pair's second endpoint.
  std::vector<std::vector<int>> parent_pos(k), partner_pos(k);
  std::vector<double> effort(k), satisfaction(k);
  for (std::size_t i = 0; i < k; ++i) {
    int v = ordering.order[i];
    for (int p : graph.requirement_parents(v)) parent_pos[i].push_back(pos[p]);
    for (int q : graph.exclusion_partners(v)) {
      if (pos[q] < static_cast<int>(i)) partner_pos[i].push_back(pos[q]);
    }
    effort[i] = graph.nodes[v].effort;
    satisfaction[i] = graph.nodes[v].satisfaction;
  }

  LevelSearchResult result;
  result.stats.explored = 1;  // the empty root

  std::vector<PartialSolution> level;
  level.push_back(PartialSolution{});
  for (std::size_t i = 0; i < k; ++i) {
    // Nodes skipped below a branch rejected after deciding variable i.
    const std::uint64_t skipped_subtree = (std::uint64_t{1} << (k - i)) - 2;
    std::vector<PartialSolution> next;
    next.reserve(level.size() * 2);
    for (auto& partial : level) {
      PartialSolution zero = partial;
      zero.genes.push_back(0);
      result.stats.explored += 1;

      PartialSolution one = std::move(partial);
      one.genes.push_back(1);
      one.effort += effort[i];
      one.satisfaction += satisfaction[i];
      result.stats.explored += 1;

      bool interactions_ok = true;
      for (int p : parent_pos[i]) {
        if (!one.genes[p]) { interactions_ok = false; break; }
      }
      if (interactions_ok) {
        for (int q : partner_pos[i]) {
          if (one.genes[q]) { interactions_ok = false; break; }
        }
      }

      if (!interactions_ok) {
        result.stats.pruned_interaction += skipped_subtree;
      } else if (options.effort_prune && one.effort > instance.effort_limit) {
        result.stats.pruned_effort += skipped_subtree;
      } else {
        next.push_back(std::move(one));
      }
      next.push_back(std::move(zero));
    }
    level = std::move(next);
  }
  result.complete = std::move(level);
  return result;
}

inline Solution expand_partial(const PartialSolution& partial,
                               const InteractionGraph& graph,
                               const AncestralOrdering& ordering) {
  Solution s;
  s.effort = partial.effort;
  s.satisfaction = partial.satisfaction;
  for (std::size_t i = 0; i < partial.genes.size(); ++i) {
    if (!partial.genes[i]) continue;
    const auto& node = graph.nodes[ordering.order[i]];
    s.selected.insert(s.selected.end(), node.members.begin(), node.members.end());
  }
  std::sort(s.selected.begin(), s.selected.end());
  return s;
}

}  // namespace detail

/// Branch and bound guided by an ancestral ordering: 0-branches are always
/// kept, 1-branches only while every implication parent is already selected,
/// no exclusion fires, and (unless disabled) the budget still holds. The
/// front is identical to brute_force_front; only the stats depend on the
/// ordering and options.
inline std::pair<Front, SearchStats> branch_and_bound_front(
    const NrpInstance& instance, const InteractionGraph& graph,
    const AncestralOrdering& ordering, const ExactOptions& options = {}) {
  auto result = detail::level_search(instance, graph, ordering, options);
  std::vector<Solution> feasible;
  feasible.reserve(result.complete.size());
  for (const auto& partial : result.complete) {
    if (partial.effort > instance.effort_limit) continue;  // effort pruning disabled
    feasible.push_back(detail::expand_partial(partial, graph, ordering));
  }
  return {nondominated_filter(std::move(feasible), instance.name), result.stats};
}

namespace detail {

inline NrpInstance block_instance(const NrpInstance& instance,
                                  const std::set<std::string>& block,
                                  std::size_t block_index) {
  NrpInstance sub;
  sub.name = instance.name + "#b" + std::to_string(block_index);
  sub.clients = instance.clients;
  sub.effort_limit = instance.effort_limit;
  for (const auto& r : instance.requirements) {
    if (block.count(r.id)) sub.requirements.push_back(r);
  }
  auto keep = [&](const IdPair& p) { return block.count(p.first) && block.count(p.second); };
  for (const auto& p : instance.interactions.implications) {
    if (keep(p)) sub.interactions.implications.push_back(p);
  }
  for (const auto& p : instance.interactions.combinations) {
    if (keep(p)) sub.interactions.combinations.push_back(p);
  }
  for (const auto& p : instance.interactions.exclusions) {
    if (keep(p)) sub.interactions.exclusions.push_back(p);
  }
  return sub;
}

inline std::vector<Solution> block_valid_solutions(const NrpInstance& block,
                                                   ExactSolver solver,
                                                   const ExactOptions& options) {
  auto graph = build_interaction_graph(block);
  if (solver == ExactSolver::brute_force) {
    return enumerate_valid_solutions(block, graph, options);
  }
  ExactOptions bnb = options;
  bnb.effort_prune = true;  // enumeration wants exactly the within-budget set
  auto ordering = ancestral_ordering(graph);
  auto result = level_search(block, graph, ordering, bnb);
  std::vector<Solution> out;
  out.reserve(result.complete.size());
  for (const auto& partial : result.complete) {
    out.push_back(expand_partial(partial, graph, ordering));
  }
  return out;
}

}  // namespace detail

/// Exact front for instances too large to enumerate whole: each partition
/// block is solved independently, the per-block valid solution sets are
/// concatenated via Cartesian product (dropping combinations over budget)
/// and the result is reduced to the non-dominated set. Blocks must be
/// disjoint, cover every requirement and share no interaction.
inline Front split_and_combine(const NrpInstance& instance,
                               const std::vector<std::vector<std::string>>& partition,
                               ExactSolver solver = ExactSolver::branch_and_bound,
                               const ExactOptions& options = {}) {
  std::map<std::string, std::size_t> block_of;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    for (const auto& id : partition[b]) {
      if (!instance.find_requirement(id)) {
        throw PartitionError("partition names unknown requirement '" + id + "'");
      }
      if (!block_of.emplace(id, b).second) {
        throw PartitionError("requirement '" + id + "' appears in more than one block");
      }
    }
  }
  for (const auto& r : instance.requirements) {
    if (!block_of.count(r.id)) {
      throw PartitionError("requirement '" + r.id + "' is not covered by the partition");
    }
  }
  auto check_local = [&](const std::vector<IdPair>& pairs, const char* kind) {
    for (const auto& p : pairs) {
      if (block_of.at(p.first) != block_of.at(p.second)) {
        throw PartitionError(std::string(kind) + " (" + p.first + ", " + p.second +
                             ") crosses partition blocks");
      }
    }
  };
  check_local(instance.interactions.implications, "implication");
  check_local(instance.interactions.combinations, "combination");
  check_local(instance.interactions.exclusions, "exclusion");

  // Blocks are independent; solve them concurrently.
  std::vector<std::future<std::vector<Solution>>> futures;
  futures.reserve(partition.size());
  for (std::size_t b = 0; b < partition.size(); ++b) {
    std::set<std::string> members(partition[b].begin(), partition[b].end());
    auto block = detail::block_instance(instance, members, b);
    futures.push_back(std::async(
        partition.size() > 1 ? std::launch::async : std::launch::deferred,
        [block = std::move(block), solver, options]() {
          return detail::block_valid_solutions(block, solver, options);
        }));
  }
  std::vector<std::vector<Solution>> block_sets;
  block_sets.reserve(futures.size());
  for (auto& f : futures) block_sets.push_back(f.get());

  std::vector<Solution> combined;
  combined.push_back(Solution{});
  for (const auto& block_set : block_sets) {
    std::vector<Solution> next;
    next.reserve(combined.size());
    for (const auto& acc : combined) {
      for (const auto& sol : block_set) {
        double effort = acc.effort + sol.effort;
        if (effort > instance.effort_limit) continue;
        Solution merged;
        merged.effort = effort;
        merged.satisfaction = acc.satisfaction + sol.satisfaction;
        merged.selected.reserve(acc.selected.size() + sol.selected.size());
        merged.selected = acc.selected;
        merged.selected.insert(merged.selected.end(), sol.selected.begin(),
                               sol.selected.end());
        next.push_back(std::move(merged));
      }
    }
    combined = std::move(next);
  }
  for (auto& s : combined) std::sort(s.selected.begin(), s.selected.end());
  return nondominated_filter(std::move(combined), instance.name);
}

}  // namespace nrp

#endif  // NRP_EXACT_HPP_
