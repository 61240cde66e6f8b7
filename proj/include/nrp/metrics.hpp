#ifndef NRP_METRICS_HPP_
#define NRP_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"

namespace nrp {

/// A set of mutually non-dominated solutions, kept sorted by
/// (effort, satisfaction, selected ids) for stable output.
struct Front {
  std::vector<Solution> solutions;
  std::string instance;

  std::size_t size() const { return solutions.size(); }
  bool empty() const { return solutions.empty(); }

  /// Unique (effort, satisfaction) points sorted by ascending effort.
  std::vector<std::pair<double, double>> objective_points() const {
    std::set<std::pair<double, double>> points;
    for (const auto& s : solutions) points.emplace(s.effort, s.satisfaction);
    return {points.begin(), points.end()};
  }
};

namespace detail {

inline void sort_canonical(std::vector<Solution>& solutions) {
  std::sort(solutions.begin(), solutions.end(), [](const Solution& a, const Solution& b) {
    if (a.effort != b.effort) return a.effort < b.effort;
    if (a.satisfaction != b.satisfaction) return a.satisfaction < b.satisfaction;
    return a.selected < b.selected;
  });
}

}  // namespace detail

/// Extracts the non-dominated subset. Solutions with equal objectives but
/// different requirement sets are all retained (they are indistinguishable
/// on a front plot but distinct as release candidates).
inline Front nondominated_filter(std::vector<Solution> solutions,
                                 std::string instance = {}) {
  detail::sort_canonical(solutions);
  solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());

  // Sorted by ascending effort, a solution survives iff no cheaper-or-equal
  // solution has strictly greater satisfaction.
  Front front;
  front.instance = std::move(instance);
  double best_sat = -1.0;
  std::size_t i = 0;
  while (i < solutions.size()) {
    std::size_t j = i;
    double group_max = best_sat;
    while (j < solutions.size() && solutions[j].effort == solutions[i].effort) {
      group_max = std::max(group_max, solutions[j].satisfaction);
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      if (solutions[k].satisfaction >= group_max) front.solutions.push_back(solutions[k]);
    }
    best_sat = group_max;
    i = j;
  }
  return front;
}

/// 2-D hypervolume against the nadir point (B, 0): the area dominated by the
/// front inside [effort, B] x [0, satisfaction].
inline double hypervolume(const Front& front, double effort_limit) {
  auto points = front.objective_points();
  for (const auto& [eff, sat] : points) {
    if (eff > effort_limit) {
      throw DomainError("hypervolume: front point with effort above the limit");
    }
  }
  double area = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double next_eff = (i + 1 < points.size()) ? points[i + 1].first : effort_limit;
    area += points[i].second * (next_eff - points[i].first);
  }
  return area;
}

/// Number of objective points of `front` lying on `reference`.
inline std::size_t coincident_solutions(const Front& front, const Front& reference) {
  auto ref = reference.objective_points();
  std::set<std::pair<double, double>> ref_set(ref.begin(), ref.end());
  std::size_t count = 0;
  for (const auto& p : front.objective_points()) count += ref_set.count(p);
  return count;
}

/// Strict variant: counts requirement sets of `front` present in `reference`.
inline std::size_t coincident_solution_sets(const Front& front, const Front& reference) {
  std::set<std::vector<std::string>> ref_sets;
  for (const auto& s : reference.solutions) ref_sets.insert(s.selected);
  std::size_t count = 0;
  std::set<std::vector<std::string>> seen;
  for (const auto& s : front.solutions) {
    if (ref_sets.count(s.selected) && seen.insert(s.selected).second) ++count;
  }
  return count;
}

/// Dispersion summary of repeated runs: mean, sample standard deviation,
/// coefficient of variation and the Tukey five-number summary. `stable`
/// applies the 5% coefficient-of-variation bar.
struct RunStatistics {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;
  double cv = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  bool stable = false;
};

inline RunStatistics run_statistics(std::vector<double> values) {
  if (values.empty()) {
    throw DomainError("run_statistics: empty sequence");
  }
  RunStatistics stats;
  stats.values = values;

  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.sd = std::sqrt(ss / (n - 1.0));
  }
  stats.cv = stats.mean != 0.0 ? stats.sd / stats.mean : 0.0;
  stats.stable = stats.cv <= 0.05;

  std::sort(values.begin(), values.end());
  // Tukey hinges, as in R's fivenum().
  auto at = [&](double pos) {  // 1-based fractional index
    double lo = std::floor(pos), hi = std::ceil(pos);
    return 0.5 * (values[static_cast<std::size_t>(lo) - 1] +
                  values[static_cast<std::size_t>(hi) - 1]);
  };
  const double n4 = std::floor((n + 3.0) / 2.0) / 2.0;
  stats.min = values.front();
  stats.q1 = at(n4);
  stats.median = at((n + 1.0) / 2.0);
  stats.q3 = at(n + 1.0 - n4);
  stats.max = values.back();
  return stats;
}

}  // namespace nrp

#endif  // NRP_METRICS_HPP_
