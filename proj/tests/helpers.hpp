#ifndef NRP_TESTS_HELPERS_HPP_
#define NRP_TESTS_HELPERS_HPP_

// Shared fixtures and independent oracles. The oracles deliberately work on
// the *untransformed* instance (raw implication/combination/exclusion
// semantics) so they share no code path with the graph-based solvers they
// check.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/generator.hpp"
#include "nrp/metrics.hpp"
#include "nrp/rng.hpp"

namespace nrptest {

inline nrp::Requirement req(std::string id, double effort, double satisfaction) {
  nrp::Requirement r;
  r.id = std::move(id);
  r.effort = effort;
  r.satisfaction = satisfaction;
  return r;
}

/// The 5-requirement worked example:
/// I = {(r01,r03),(r01,r04),(r04,r02)}, J = {(r01,r05)}, X = {(r03,r02)}.
inline nrp::NrpInstance fig_instance(double effort_limit = 6.0) {
  nrp::NrpInstance instance;
  instance.name = "fig5";
  instance.requirements = {req("r01", 2, 4), req("r02", 3, 6), req("r03", 4, 5),
                           req("r04", 1, 5), req("r05", 2, 2)};
  instance.interactions.implications = {{"r01", "r03"}, {"r01", "r04"}, {"r04", "r02"}};
  instance.interactions.combinations = {{"r01", "r05"}};
  instance.interactions.exclusions = {{"r03", "r02"}};
  instance.effort_limit = effort_limit;
  return instance;
}

/// Raw-semantics validity oracle: checks I/J/X directly on original ids.
inline bool raw_valid(const std::set<std::string>& selected, const nrp::NrpInstance& instance) {
  for (const auto& [a, b] : instance.interactions.implications) {
    if (selected.count(b) && !selected.count(a)) return false;
  }
  for (const auto& [a, b] : instance.interactions.combinations) {
    if (selected.count(a) != selected.count(b)) return false;
  }
  for (const auto& [a, b] : instance.interactions.exclusions) {
    if (selected.count(a) && selected.count(b)) return false;
  }
  return true;
}

/// Quadratic all-pairs non-dominated filter (independent of the library's
/// sweep implementation).
inline std::vector<nrp::Solution> naive_nondominated(std::vector<nrp::Solution> pool) {
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::vector<nrp::Solution> front;
  for (const auto& candidate : pool) {
    bool dominated = false;
    for (const auto& other : pool) {
      if (nrp::dominates(other, candidate)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(candidate);
  }
  return front;
}

/// Exhaustive raw-semantics exact front over original requirement ids.
inline std::vector<nrp::Solution> raw_exact_front(const nrp::NrpInstance& instance) {
  const std::size_t n = instance.requirements.size();
  std::vector<nrp::Solution> feasible;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::set<std::string> ids;
    double effort = 0.0, satisfaction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      ids.insert(instance.requirements[i].id);
      effort += instance.requirements[i].effort;
      satisfaction += instance.requirements[i].satisfaction;
    }
    if (effort > instance.effort_limit || !raw_valid(ids, instance)) continue;
    nrp::Solution s;
    s.selected.assign(ids.begin(), ids.end());
    s.effort = effort;
    s.satisfaction = satisfaction;
    feasible.push_back(std::move(s));
  }
  return naive_nondominated(std::move(feasible));
}

/// Canonical comparison key: set of (sorted ids, satisfaction, effort).
inline std::set<std::vector<std::string>> selection_sets(const std::vector<nrp::Solution>& v) {
  std::set<std::vector<std::string>> out;
  for (const auto& s : v) out.insert(s.selected);
  return out;
}

inline std::set<std::pair<double, double>> objective_set(const std::vector<nrp::Solution>& v) {
  std::set<std::pair<double, double>> out;
  for (const auto& s : v) out.emplace(s.effort, s.satisfaction);
  return out;
}

/// Seeded random instance via the toolkit generator, solved at one ratio.
inline nrp::NrpInstance random_instance(std::size_t n, double density, double ratio,
                                        std::uint64_t seed) {
  nrp::GeneratorOptions options;
  options.n_requirements = n;
  options.n_clients = 4;
  options.interaction_density = density;
  options.seed = seed;
  options.effort_ratios = {ratio};
  auto file = nrp::generate_instance(options);
  return file.make_instance(ratio);
}

}  // namespace nrptest

#endif  // NRP_TESTS_HELPERS_HPP_
