#ifndef NRP_CORE_HPP_
#define NRP_CORE_HPP_

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrp/errors.hpp"

namespace nrp {

/// A stakeholder with a non-negative importance weight.
struct Client {
  std::string id;
  double weight = 0.0;
};

/// A candidate requirement. `satisfaction` is the client-weighted aggregate
/// of `client_values`; requirements loaded with a direct satisfaction keep
/// `client_values` empty.
struct Requirement {
  std::string id;
  double effort = 0.0;
  std::map<std::string, double> client_values;  // client id -> revenue
  double satisfaction = 0.0;
};

using IdPair = std::pair<std::string, std::string>;

/// Functional interactions over requirement ids. Implication pairs are
/// ordered (prerequisite, dependent); combinations and exclusions are
/// unordered.
struct InteractionSet {
  std::vector<IdPair> implications;
  std::vector<IdPair> combinations;
  std::vector<IdPair> exclusions;

  bool empty() const {
    return implications.empty() && combinations.empty() && exclusions.empty();
  }
  std::size_t size() const {
    return implications.size() + combinations.size() + exclusions.size();
  }
};

struct NrpInstance {
  std::string name;
  std::vector<Client> clients;
  std::vector<Requirement> requirements;
  InteractionSet interactions;
  double effort_limit = 0.0;

  const Requirement* find_requirement(const std::string& id) const {
    for (const auto& r : requirements) {
      if (r.id == id) return &r;
    }
    return nullptr;
  }

  double total_effort() const {
    double sum = 0.0;
    for (const auto& r : requirements) sum += r.effort;
    return sum;
  }

  double total_satisfaction() const {
    double sum = 0.0;
    for (const auto& r : requirements) sum += r.satisfaction;
    return sum;
  }
};

/// A selected subset of requirements with cached objective values.
/// `selected` is kept sorted so solutions compare and hash cheaply.
struct Solution {
  std::vector<std::string> selected;
  double satisfaction = 0.0;
  double effort = 0.0;
};

inline bool operator==(const Solution& a, const Solution& b) {
  return a.selected == b.selected;
}

inline bool operator<(const Solution& a, const Solution& b) {
  return a.selected < b.selected;
}

namespace detail {

inline IdPair normalized_pair(const IdPair& p) {
  return p.first <= p.second ? p : IdPair{p.second, p.first};
}

}  // namespace detail

/// Structural invariants: unique ids, positive efforts, non-negative weights
/// and budget, and interaction pairs that reference existing requirements
/// without self-pairs or overlap between the three interaction sets.
inline void validate_instance(const NrpInstance& instance) {
  std::set<std::string> client_ids;
  for (const auto& c : instance.clients) {
    if (c.weight < 0.0) {
      throw ValidationError("client '" + c.id + "' has negative weight");
    }
    if (!client_ids.insert(c.id).second) {
      throw ValidationError("duplicate client id '" + c.id + "'");
    }
  }
  std::set<std::string> requirement_ids;
  for (const auto& r : instance.requirements) {
    if (r.effort <= 0.0) {
      throw ValidationError("requirement '" + r.id + "' must have positive effort");
    }
    if (r.satisfaction < 0.0) {
      throw ValidationError("requirement '" + r.id + "' has negative satisfaction");
    }
    if (!requirement_ids.insert(r.id).second) {
      throw ValidationError("duplicate requirement id '" + r.id + "'");
    }
  }
  if (instance.effort_limit < 0.0) {
    throw ValidationError("effort limit must be non-negative");
  }

  auto check_pair = [&](const IdPair& p, const char* kind) {
    if (p.first == p.second) {
      throw ValidationError(std::string(kind) + " pair (" + p.first + ", " +
                            p.second + ") is a self-pair");
    }
    for (const auto& id : {p.first, p.second}) {
      if (!requirement_ids.count(id)) {
        throw ValidationError(std::string(kind) + " pair references unknown requirement '" +
                              id + "'");
      }
    }
  };

  std::map<IdPair, const char*> seen;
  auto check_overlap = [&](const IdPair& p, const char* kind) {
    auto norm = detail::normalized_pair(p);
    auto [it, inserted] = seen.emplace(norm, kind);
    if (!inserted) {
      throw ValidationError("pair (" + norm.first + ", " + norm.second +
                            ") appears in both " + it->second + " and " + kind);
    }
  };

  for (const auto& p : instance.interactions.implications) {
    check_pair(p, "implication");
    check_overlap(p, "implications");
  }
  for (const auto& p : instance.interactions.combinations) {
    check_pair(p, "combination");
    check_overlap(p, "combinations");
  }
  for (const auto& p : instance.interactions.exclusions) {
    check_pair(p, "exclusion");
    check_overlap(p, "exclusions");
  }
}

/// Fills every requirement's satisfaction with the client-weighted sum of its
/// values. Requirements without client values keep their direct satisfaction
/// (identity case). Missing client entries contribute 0.
inline NrpInstance aggregate_satisfaction(NrpInstance instance) {
  std::map<std::string, double> weight_of;
  for (const auto& c : instance.clients) weight_of[c.id] = c.weight;
  for (auto& r : instance.requirements) {
    if (r.client_values.empty()) continue;
    double sum = 0.0;
    for (const auto& [client_id, value] : r.client_values) {
      auto it = weight_of.find(client_id);
      if (it == weight_of.end()) {
        throw ValidationError("requirement '" + r.id + "' values unknown client '" +
                              client_id + "'");
      }
      if (value < 0.0) {
        throw ValidationError("requirement '" + r.id + "' has negative value for client '" +
                              client_id + "'");
      }
      sum += it->second * value;
    }
    r.satisfaction = sum;
  }
  return instance;
}

/// Evaluates a requirement subset to a Solution with cached objective sums.
/// The empty set yields (0, 0).
inline Solution evaluate(const std::vector<std::string>& selected,
                         const NrpInstance& instance) {
  std::map<std::string, const Requirement*> by_id;
  for (const auto& r : instance.requirements) by_id[r.id] = &r;

  Solution s;
  std::set<std::string> unique(selected.begin(), selected.end());
  s.selected.assign(unique.begin(), unique.end());
  for (const auto& id : s.selected) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError("evaluate: unknown requirement id '" + id + "'");
    }
    s.satisfaction += it->second->satisfaction;
    s.effort += it->second->effort;
  }
  return s;
}

/// Bi-objective dominance: u is preferred to v when it costs no more effort
/// and yields strictly more satisfaction.
inline bool dominates(double sat_u, double eff_u, double sat_v, double eff_v) {
  return eff_u <= eff_v && sat_u > sat_v;
}

inline bool dominates(const Solution& u, const Solution& v) {
  return dominates(u.satisfaction, u.effort, v.satisfaction, v.effort);
}

}  // namespace nrp

#endif  // NRP_CORE_HPP_
