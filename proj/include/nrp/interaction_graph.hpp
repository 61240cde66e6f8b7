#ifndef NRP_INTERACTION_GRAPH_HPP_
#define NRP_INTERACTION_GRAPH_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"

namespace nrp {

enum class NodeKind { requirement, merged, indicator };

inline const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::requirement: return "requirement";
    case NodeKind::merged: return "merged";
    case NodeKind::indicator: return "indicator";
  }
  return "?";
}

/// A graph vertex. Plain and merged nodes are decision variables carrying
/// the (summed) satisfaction/effort of their members; indicator nodes carry
/// nothing and flip to 0 once their single member enters the solution.
struct GraphNode {
  NodeKind kind = NodeKind::requirement;
  std::string id;
  std::vector<std::string> members;  // sorted original requirement ids
  double satisfaction = 0.0;
  double effort = 0.0;

  bool is_decision() const { return kind != NodeKind::indicator; }
};

/// Directed interaction graph. Decision nodes occupy indices
/// [0, decision_count()); indicator nodes are appended after them by
/// transform_exclusions. `exclusions` holds pairs still awaiting the
/// indicator transformation (normalized node-index pairs).
struct InteractionGraph {
  std::string origin;
  std::vector<GraphNode> nodes;
  std::vector<std::pair<int, int>> edges;       // (parent, child) node indices
  std::vector<std::pair<int, int>> exclusions;  // pending unordered pairs

  std::size_t decision_count() const {
    std::size_t n = 0;
    while (n < nodes.size() && nodes[n].is_decision()) ++n;
    return n;
  }

  int index_of(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }

  /// Decision-node parents of `v` that are themselves decision nodes.
  std::vector<int> requirement_parents(int v) const {
    std::vector<int> out;
    for (const auto& [p, c] : edges) {
      if (c == v && nodes[p].is_decision()) out.push_back(p);
    }
    return out;
  }

  /// Nodes whose selection forbids `v`: the excluded nodes behind v's
  /// indicator parents. An indicator's member is the excluded node's id
  /// (compound for merged nodes).
  std::vector<int> exclusion_partners(int v) const {
    std::vector<int> out;
    for (const auto& [p, c] : edges) {
      if (c != v || nodes[p].is_decision()) continue;
      int partner = index_of(nodes[p].members.front());
      if (partner >= 0 && nodes[partner].is_decision()) out.push_back(partner);
    }
    return out;
  }

  std::set<std::string> node_ids() const {
    std::set<std::string> ids;
    for (const auto& n : nodes) ids.insert(n.id);
    return ids;
  }

  std::set<std::pair<std::string, std::string>> edge_ids() const {
    std::set<std::pair<std::string, std::string>> ids;
    for (const auto& [p, c] : edges) ids.emplace(nodes[p].id, nodes[c].id);
    return ids;
  }

  std::set<std::pair<std::string, std::string>> exclusion_ids() const {
    std::set<std::pair<std::string, std::string>> ids;
    for (const auto& [a, b] : exclusions) {
      auto pa = nodes[a].id;
      auto pb = nodes[b].id;
      if (pb < pa) std::swap(pa, pb);
      ids.emplace(pa, pb);
    }
    return ids;
  }
};

/// Topological order over the decision nodes only. Indicator values are
/// derived state and never appear in orderings or solution encodings.
struct AncestralOrdering {
  std::vector<int> order;  // node indices

  std::vector<std::string> ids(const InteractionGraph& graph) const {
    std::vector<std::string> out;
    out.reserve(order.size());
    for (int v : order) out.push_back(graph.nodes[v].id);
    return out;
  }

  /// position[node index] = rank in the ordering, -1 for indicators.
  std::vector<int> positions(const InteractionGraph& graph) const {
    std::vector<int> pos(graph.nodes.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    return pos;
  }
};

enum class TieBreak { lowest_id_first, highest_id_first };

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Collapses combination interactions into merged nodes. Transitive
/// combination chains become one node per connected component; implication
/// and exclusion pairs are rewritten onto the merged nodes and de-duplicated.
/// The result carries no combination interactions.
inline InteractionGraph merge_combinations(const NrpInstance& instance) {
  validate_instance(instance);

  const auto& reqs = instance.requirements;
  std::map<std::string, std::size_t> req_index;
  for (std::size_t i = 0; i < reqs.size(); ++i) req_index[reqs[i].id] = i;

  detail::UnionFind components(reqs.size());
  for (const auto& [a, b] : instance.interactions.combinations) {
    components.unite(req_index.at(a), req_index.at(b));
  }

  // Emit one node per component at the first occurrence in instance order.
  InteractionGraph graph;
  graph.origin = instance.name;
  std::map<std::size_t, int> node_of_component;
  std::vector<int> node_of_req(reqs.size(), -1);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    std::size_t root = components.find(i);
    auto it = node_of_component.find(root);
    if (it == node_of_component.end()) {
      std::vector<std::string> members;
      double sat = 0.0, eff = 0.0;
      for (std::size_t j = 0; j < reqs.size(); ++j) {
        if (components.find(j) == root) {
          members.push_back(reqs[j].id);
          sat += reqs[j].satisfaction;
          eff += reqs[j].effort;
        }
      }
      std::sort(members.begin(), members.end());
      std::string id;
      for (const auto& m : members) {
        if (!id.empty()) id += '+';
        id += m;
      }
      GraphNode node;
      node.kind = members.size() > 1 ? NodeKind::merged : NodeKind::requirement;
      node.id = std::move(id);
      node.members = std::move(members);
      node.satisfaction = sat;
      node.effort = eff;
      graph.nodes.push_back(std::move(node));
      it = node_of_component.emplace(root, static_cast<int>(graph.nodes.size()) - 1).first;
    }
    node_of_req[i] = it->second;
  }

  auto node_of = [&](const std::string& id) { return node_of_req[req_index.at(id)]; };

  // Rewrite implications; intra-node pairs are vacuous and dropped.
  std::set<std::pair<int, int>> edge_set;
  for (const auto& [a, b] : instance.interactions.implications) {
    int u = node_of(a), v = node_of(b);
    if (u == v) continue;
    edge_set.emplace(u, v);
  }
  graph.edges.assign(edge_set.begin(), edge_set.end());

  // Rewrite exclusions; a pair folded into one node is unsatisfiable.
  std::set<std::pair<int, int>> excl_set;
  for (const auto& [a, b] : instance.interactions.exclusions) {
    int u = node_of(a), v = node_of(b);
    if (u == v) {
      throw ContradictionError("exclusion (" + a + ", " + b +
                               ") falls inside merged node '" + graph.nodes[u].id + "'");
    }
    excl_set.emplace(std::min(u, v), std::max(u, v));
  }
  for (const auto& [u, v] : excl_set) {
    if (edge_set.count({u, v}) || edge_set.count({v, u})) {
      throw ContradictionError("pair (" + graph.nodes[u].id + ", " + graph.nodes[v].id +
                               ") is both an implication and an exclusion after merging");
    }
  }
  graph.exclusions.assign(excl_set.begin(), excl_set.end());
  return graph;
}

/// Replaces each pending exclusion (u, v) by indicator nodes I_u, I_v with
/// edges I_u -> v and I_v -> u. Idempotent: a graph without pending
/// exclusions passes through unchanged.
inline InteractionGraph transform_exclusions(InteractionGraph graph) {
  if (graph.exclusions.empty()) return graph;

  // Sort pairs by id so indicator numbering is deterministic.
  std::sort(graph.exclusions.begin(), graph.exclusions.end(),
            [&](const auto& x, const auto& y) {
              auto key = [&](const std::pair<int, int>& p) {
                auto a = graph.nodes[p.first].id;
                auto b = graph.nodes[p.second].id;
                if (b < a) std::swap(a, b);
                return std::make_pair(a, b);
              };
              return key(x) < key(y);
            });

  std::map<int, int> occurrences;  // node -> #exclusion pairs it joins
  for (const auto& [u, v] : graph.exclusions) {
    ++occurrences[u];
    ++occurrences[v];
  }

  auto add_indicator = [&](int member, int target) {
    GraphNode ind;
    ind.kind = NodeKind::indicator;
    ind.id = "I_" + graph.nodes[member].id;
    if (occurrences[member] > 1) ind.id += ":" + graph.nodes[target].id;
    ind.members = {graph.nodes[member].id};
    graph.nodes.push_back(std::move(ind));
    int idx = static_cast<int>(graph.nodes.size()) - 1;
    graph.edges.emplace_back(idx, target);
  };

  auto pending = std::move(graph.exclusions);
  graph.exclusions.clear();
  for (const auto& [u, v] : pending) {
    add_indicator(u, v);
    add_indicator(v, u);
  }
  return graph;
}

/// Full transformation pipeline: combinations merged, exclusions turned into
/// indicators. The result contains only directed implication edges.
inline InteractionGraph build_interaction_graph(const NrpInstance& instance) {
  return transform_exclusions(merge_combinations(instance));
}

namespace detail {

// Reports one implication cycle among the given decision nodes.
[[noreturn]] inline void raise_cycle_error(const InteractionGraph& graph,
                                           const std::vector<int>& remaining) {
  std::set<int> active(remaining.begin(), remaining.end());
  std::map<int, std::vector<int>> children;
  for (const auto& [p, c] : graph.edges) {
    if (active.count(p) && active.count(c)) children[p].push_back(c);
  }
  // DFS from any remaining node must revisit the stack.
  std::vector<int> stack;
  std::map<int, int> state;  // 0 unseen, 1 on stack, 2 done
  std::string cycle_text;
  std::function<bool(int)> visit = [&](int v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (int c : children[v]) {
      if (state[c] == 1) {
        auto it = std::find(stack.begin(), stack.end(), c);
        std::ostringstream oss;
        for (; it != stack.end(); ++it) oss << graph.nodes[*it].id << " -> ";
        oss << graph.nodes[c].id;
        cycle_text = oss.str();
        return true;
      }
      if (state[c] == 0 && visit(c)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (int v : remaining) {
    if (state[v] == 0 && visit(v)) break;
  }
  throw CycleError("implication cycle: " + cycle_text);
}

}  // namespace detail

/// Topological ordering of the decision nodes under a deterministic
/// tie-break on node ids. Throws CycleError when the implication edges are
/// cyclic, listing one offending cycle.
inline AncestralOrdering ancestral_ordering(const InteractionGraph& graph,
                                            TieBreak tie_break = TieBreak::lowest_id_first) {
  const std::size_t n_decision = graph.decision_count();
  std::vector<int> in_degree(graph.nodes.size(), 0);
  std::map<int, std::vector<int>> children;
  for (const auto& [p, c] : graph.edges) {
    if (graph.nodes[p].is_decision() && graph.nodes[c].is_decision()) {
      ++in_degree[c];
      children[p].push_back(c);
    }
  }

  auto id_less = [&](int a, int b) {
    return tie_break == TieBreak::lowest_id_first ? graph.nodes[a].id < graph.nodes[b].id
                                                  : graph.nodes[b].id < graph.nodes[a].id;
  };
  // Min-heap on the tie-break order; comparator is inverted for the heap.
  auto heap_cmp = [&](int a, int b) { return id_less(b, a); };
  std::priority_queue<int, std::vector<int>, decltype(heap_cmp)> ready(heap_cmp);
  for (std::size_t v = 0; v < n_decision; ++v) {
    if (in_degree[v] == 0) ready.push(static_cast<int>(v));
  }

  AncestralOrdering ordering;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    ordering.order.push_back(v);
    for (int c : children[v]) {
      if (--in_degree[c] == 0) ready.push(c);
    }
  }

  if (ordering.order.size() != n_decision) {
    std::set<int> placed(ordering.order.begin(), ordering.order.end());
    std::vector<int> remaining;
    for (std::size_t v = 0; v < n_decision; ++v) {
      if (!placed.count(static_cast<int>(v))) remaining.push_back(static_cast<int>(v));
    }
    detail::raise_cycle_error(graph, remaining);
  }
  return ordering;
}

/// Validity of a decision-node selection: every selected node has all its
/// decision parents selected and none of its exclusion partners selected.
/// `selected[v]` indexes decision nodes.
inline bool valid_selection(const std::vector<std::uint8_t>& selected,
                            const InteractionGraph& graph) {
  const std::size_t n_decision = graph.decision_count();
  for (std::size_t v = 0; v < n_decision; ++v) {
    if (!selected[v]) continue;
    for (int p : graph.requirement_parents(static_cast<int>(v))) {
      if (!selected[p]) return false;
    }
    for (int q : graph.exclusion_partners(static_cast<int>(v))) {
      if (selected[q]) return false;
    }
  }
  return true;
}

/// Validity of a selection given by decision-node ids.
inline bool is_valid(const std::set<std::string>& selected_ids,
                     const InteractionGraph& graph) {
  std::vector<std::uint8_t> selected(graph.decision_count(), 0);
  for (const auto& id : selected_ids) {
    int v = graph.index_of(id);
    if (v < 0 || !graph.nodes[v].is_decision()) {
      throw ValidationError("is_valid: unknown decision node '" + id + "'");
    }
    selected[v] = 1;
  }
  return valid_selection(selected, graph);
}

/// Maps a set of original requirement ids onto decision nodes. Returns false
/// when the set splits a merged node (combination violated) or names an
/// unknown requirement.
inline bool selection_from_requirements(const std::vector<std::string>& requirement_ids,
                                        const InteractionGraph& graph,
                                        std::vector<std::uint8_t>& out) {
  const std::size_t n_decision = graph.decision_count();
  std::map<std::string, int> node_of_member;
  for (std::size_t v = 0; v < n_decision; ++v) {
    for (const auto& m : graph.nodes[v].members) node_of_member[m] = static_cast<int>(v);
  }
  out.assign(n_decision, 0);
  std::vector<std::size_t> hits(n_decision, 0);
  for (const auto& id : requirement_ids) {
    auto it = node_of_member.find(id);
    if (it == node_of_member.end()) return false;
    out[it->second] = 1;
    ++hits[it->second];
  }
  for (std::size_t v = 0; v < n_decision; ++v) {
    if (out[v] && hits[v] != graph.nodes[v].members.size()) return false;
  }
  return true;
}

/// Feasibility per the problem statement: within budget and consistent with
/// every interaction (combination membership included).
inline bool is_feasible(const Solution& solution, const NrpInstance& instance,
                        const InteractionGraph& graph) {
  if (solution.effort > instance.effort_limit) return false;
  std::vector<std::uint8_t> selected;
  if (!selection_from_requirements(solution.selected, graph, selected)) return false;
  return valid_selection(selected, graph);
}

/// DOT export of the transformed graph; nodes are labelled with their kind.
inline std::string to_dot(const InteractionGraph& graph) {
  std::ostringstream oss;
  oss << "digraph interactions {\n";
  oss << "  rankdir=TB;\n";
  for (const auto& node : graph.nodes) {
    oss << "  \"" << node.id << "\" [label=\"" << node.id << "\\n(" << to_string(node.kind)
        << ")\"";
    if (node.kind == NodeKind::indicator) {
      oss << ", shape=box, style=dashed";
    } else if (node.kind == NodeKind::merged) {
      oss << ", shape=ellipse, peripheries=2";
    }
    oss << "];\n";
  }
  auto edges = graph.edge_ids();
  for (const auto& [p, c] : edges) {
    oss << "  \"" << p << "\" -> \"" << c << "\";\n";
  }
  for (const auto& [a, b] : graph.exclusion_ids()) {
    oss << "  \"" << a << "\" -> \"" << b << "\" [dir=none, style=dotted, label=\"excl\"];\n";
  }
  oss << "}\n";
  return oss.str();
}

}  // namespace nrp

#endif  // NRP_INTERACTION_GRAPH_HPP_
