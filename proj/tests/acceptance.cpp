// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
// Every tolerance and threshold is pinned here; the checks intentionally
// favour independent oracles (raw-constraint enumeration, rectangle unions,
// naive counting) over the code paths they verify.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nrp/nrp.hpp"

namespace fs = std::filesystem;
using namespace nrp;

namespace {

struct CheckFailure {
  std::string detail;
};

void require(bool condition, const std::string& detail) {
  if (!condition) throw CheckFailure{detail};
}

std::string fmt(double v) { return format_number(v); }

using IdSet = std::set<std::string>;
using EdgeSet = std::set<std::pair<std::string, std::string>>;

// ---------------------------------------------------------------------------
// Criterion 1: transformation fidelity on the five-requirement example.
void criterion_transformation(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  auto instance = nrptest::fig_instance(6.0);

  auto merged = merge_combinations(instance);
  require(merged.node_ids() == IdSet{"r01+r05", "r02", "r03", "r04"},
          "merged node set mismatch");
  require(merged.edge_ids() ==
              EdgeSet{{"r01+r05", "r03"}, {"r01+r05", "r04"}, {"r04", "r02"}},
          "merged edge set mismatch");
  require(merged.exclusion_ids() == EdgeSet{{"r02", "r03"}},
          "exclusion (r03, r02) not retained by the merge");

  auto final_graph = transform_exclusions(merged);
  require(final_graph.node_ids() ==
              IdSet{"r01+r05", "r02", "r03", "r04", "I_r02", "I_r03"},
          "final node set mismatch");
  require(final_graph.edge_ids() == EdgeSet{{"r01+r05", "r03"},
                                            {"r01+r05", "r04"},
                                            {"r04", "r02"},
                                            {"I_r03", "r02"},
                                            {"I_r02", "r03"}},
          "final edge set mismatch");
  require(final_graph.exclusions.empty(), "exclusions must be empty after transformation");

  auto sigma1 = ancestral_ordering(final_graph, TieBreak::lowest_id_first);
  require(sigma1.ids(final_graph) ==
              std::vector<std::string>{"r01+r05", "r03", "r04", "r02"},
          "sigma1 mismatch under lowest-id tie-breaking");

  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  require(ms < 1000.0, "transformation took " + fmt(ms) + " ms (budget 1000)");
  log << "figs 1-3 reproduced, sigma1 ok, " << fmt(ms) << " ms";
}

// ---------------------------------------------------------------------------
// Criterion 2: pruning count replication (23 explored / 8 pruned of 31).
void criterion_pruning_count(std::ostream& log) {
  auto instance = nrptest::fig_instance(6.0);
  auto graph = build_interaction_graph(instance);
  auto sigma1 = ancestral_ordering(graph, TieBreak::lowest_id_first);

  ExactOptions options;
  options.effort_prune = false;
  auto [front, stats] = branch_and_bound_front(instance, graph, sigma1, options);
  (void)front;

  require(stats.explored == 23,
          "explored " + std::to_string(stats.explored) + ", expected 23");
  require(stats.pruned_interaction == 8,
          "pruned " + std::to_string(stats.pruned_interaction) + ", expected 8");
  require(stats.pruned_effort == 0, "effort pruning must be disabled");
  require(stats.explored + stats.total_pruned() == 31, "tree accounting mismatch");
  log << "explored 23/31, pruned 8 (25.81%)";
}

// ---------------------------------------------------------------------------
// Criterion 3: branch and bound equals brute force on >= 100 random instances.
void criterion_exact_equivalence(std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> densities = {0.0, 0.1, 0.3};
  const std::vector<double> ratios = {0.3, 0.5, 0.75};
  const std::vector<std::size_t> sizes = {8, 12, 16};

  std::size_t instances = 0, mismatches = 0;
  std::uint64_t seed = 1;
  for (std::size_t rep = 0; rep < 4; ++rep) {
    for (double density : densities) {
      for (double ratio : ratios) {
        for (std::size_t n : sizes) {
          ++seed;
          auto instance = nrptest::random_instance(n, density, ratio, seed);
          auto graph = build_interaction_graph(instance);
          auto ordering = ancestral_ordering(graph);
          auto expected = brute_force_front(instance, graph);
          auto [actual, stats] = branch_and_bound_front(instance, graph, ordering);
          (void)stats;
          ++instances;
          if (nrptest::selection_sets(actual.solutions) !=
                  nrptest::selection_sets(expected.solutions) ||
              nrptest::objective_set(actual.solutions) !=
                  nrptest::objective_set(expected.solutions)) {
            ++mismatches;
          }
        }
      }
    }
  }
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  require(instances >= 100, "only " + std::to_string(instances) + " instances");
  require(mismatches == 0, std::to_string(mismatches) + " front mismatches");
  require(ms < 300'000.0, "took " + fmt(ms) + " ms (budget 300000)");
  log << instances << " instances, 0 mismatches, " << fmt(ms) << " ms";
}

// ---------------------------------------------------------------------------
// Criterion 4: split/recombine equals whole-instance brute force.
NrpInstance two_block_instance(std::uint64_t seed, std::vector<std::string>& left_ids,
                               std::vector<std::string>& right_ids) {
  auto left = nrptest::random_instance(8, 0.3, 1.0, seed);
  auto right = nrptest::random_instance(8, 0.3, 1.0, seed + 5000);

  NrpInstance whole;
  whole.name = "blocks-" + std::to_string(seed);
  left_ids.clear();
  right_ids.clear();
  auto add_block = [&](const NrpInstance& block, const std::string& prefix,
                       std::vector<std::string>& ids) {
    for (auto r : block.requirements) {
      r.id = prefix + r.id;
      r.client_values.clear();
      ids.push_back(r.id);
      whole.requirements.push_back(r);
    }
    auto copy_pairs = [&](const std::vector<IdPair>& src, std::vector<IdPair>& dst) {
      for (const auto& [a, b] : src) dst.emplace_back(prefix + a, prefix + b);
    };
    copy_pairs(block.interactions.implications, whole.interactions.implications);
    copy_pairs(block.interactions.combinations, whole.interactions.combinations);
    copy_pairs(block.interactions.exclusions, whole.interactions.exclusions);
  };
  add_block(left, "L", left_ids);
  add_block(right, "R", right_ids);
  whole.effort_limit = 0.5 * whole.total_effort();
  return whole;
}

void criterion_split_recombine(std::ostream& log) {
  std::size_t instances = 0, mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<std::string> left_ids, right_ids;
    auto whole = two_block_instance(seed, left_ids, right_ids);
    auto graph = build_interaction_graph(whole);
    auto expected = brute_force_front(whole, graph);

    for (auto solver : {ExactSolver::brute_force, ExactSolver::branch_and_bound}) {
      auto actual = split_and_combine(whole, {left_ids, right_ids}, solver);
      if (nrptest::selection_sets(actual.solutions) !=
              nrptest::selection_sets(expected.solutions) ||
          nrptest::objective_set(actual.solutions) !=
              nrptest::objective_set(expected.solutions)) {
        ++mismatches;
      }
    }
    ++instances;
  }
  require(instances >= 20, "too few instances");
  require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  log << instances << " two-block instances x2 solvers, 0 mismatches";
}

// ---------------------------------------------------------------------------
// Criterion 5: PLS validity and the analytic two-node distribution.
void criterion_sampling(std::ostream& log) {
  // Validity on the worked example and on a denser random graph.
  for (int which = 0; which < 2; ++which) {
    auto instance = which == 0 ? nrptest::fig_instance(12.0)
                               : nrptest::random_instance(12, 0.4, 0.75, 33);
    auto graph = build_interaction_graph(instance);
    auto ordering = ancestral_ordering(graph);
    auto model = build_initial_model(graph, ordering);
    Rng rng(17 + which);
    std::size_t invalid = 0;
    for (const auto& ind : sample_pls(model, 10'000, rng)) {
      if (!valid_selection(ind.genes, graph)) ++invalid;
    }
    require(invalid == 0, std::to_string(invalid) + " invalid samples");
  }

  // Two-node chain a -> b: P = (1/2, 1/4, 1/4) for (empty, {a}, {a,b}).
  NrpInstance chain;
  chain.name = "chain";
  chain.requirements = {nrptest::req("a", 1, 1), nrptest::req("b", 1, 1)};
  chain.interactions.implications = {{"a", "b"}};
  chain.effort_limit = 2.0;
  auto graph = build_interaction_graph(chain);
  auto ordering = ancestral_ordering(graph);
  auto model = build_initial_model(graph, ordering);

  const std::size_t n = 10'000;
  Rng rng(4242);
  std::map<std::pair<int, int>, std::size_t> counts;
  const int a = graph.index_of("a"), b = graph.index_of("b");
  for (const auto& ind : sample_pls(model, n, rng)) {
    ++counts[{ind.genes[a], ind.genes[b]}];
  }
  require(counts.find({0, 1}) == counts.end(), "sampled the invalid set {b}");

  auto check_frequency = [&](std::pair<int, int> key, double p, const char* label) {
    const double observed = static_cast<double>(counts[key]);
    const double sigma = std::sqrt(p * (1.0 - p) * static_cast<double>(n));
    const double delta = std::abs(observed - p * static_cast<double>(n));
    require(delta <= 3.0 * sigma, std::string(label) + " off by " + fmt(delta) +
                                      " (> 3 sigma " + fmt(3.0 * sigma) + ")");
  };
  check_frequency({0, 0}, 0.5, "P(empty)");
  check_frequency({1, 0}, 0.25, "P({a})");
  check_frequency({1, 1}, 0.25, "P({a,b})");
  log << "20000 valid samples; chain frequencies within 3 sigma";
}

// ---------------------------------------------------------------------------
// Criterion 6: zero preservation and structure invariance over 100 cycles.
void criterion_zero_preservation(std::ostream& log) {
  auto instance = nrptest::random_instance(12, 0.3, 0.5, 77);
  auto graph = build_interaction_graph(instance);
  auto ordering = ancestral_ordering(graph);
  auto model = build_initial_model(graph, ordering);
  const auto initial_edges = model.graph.edge_ids();
  const auto initial_nodes = model.graph.node_ids();

  EdaConfig config;
  config.population_size = 40;
  Rng rng(88);
  Population population;
  population.capacity = 40;
  population.individuals = sample_pls(model, 40, rng);

  for (int cycle = 0; cycle < 100; ++cycle) {
    model = learn_parameters(model, population, config);
    auto sample = sample_pls(model, 40, rng);
    population = replace(population, sample, instance.effort_limit);
  }

  require(model.graph.edge_ids() == initial_edges, "edge set changed");
  require(model.graph.node_ids() == initial_nodes, "node set changed");
  std::size_t zero_configs = 0;
  for (const auto& table : model.tables) {
    for (std::uint32_t bits = 0; bits < table.full_mask(); ++bits) {
      require(table.probability_one(bits) == 0.0,
              "violating configuration has nonzero probability");
      ++zero_configs;
    }
    require(table.p_satisfied > 0.0 && table.p_satisfied < 1.0,
            "m-estimator left (0,1)");
  }
  log << "100 cycles, " << zero_configs << " violating configs all exactly 0, edges fixed";
}

// ---------------------------------------------------------------------------
// Criterion 7: hypervolume against the rectangle-union oracle.
double rectangle_union_area(const std::vector<Solution>& points, double budget) {
  std::set<double> cuts;
  for (const auto& p : points) cuts.insert(p.effort);
  cuts.insert(budget);
  double area = 0.0, previous = 0.0;
  bool first = true;
  for (double x : cuts) {
    if (!first) {
      double height = 0.0;
      for (const auto& p : points) {
        if (p.effort <= previous) height = std::max(height, p.satisfaction);
      }
      area += height * (x - previous);
    }
    previous = x;
    first = false;
  }
  return area;
}

void criterion_hypervolume(std::ostream& log) {
  Rng rng(314159);
  const double budget = 1000.0;
  std::size_t fronts = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Solution> points;
    const std::size_t count = 1 + rng.uniform_int(0, 49);
    for (std::size_t i = 0; i < count; ++i) {
      Solution s;
      s.selected = {"p" + std::to_string(i)};
      s.satisfaction = static_cast<double>(rng.uniform_int(0, 500)) / 4.0;
      s.effort = static_cast<double>(rng.uniform_int(0, 4000)) / 4.0;
      points.push_back(std::move(s));
    }
    auto front = nondominated_filter(points);
    const double expected = rectangle_union_area(front.solutions, budget);
    const double actual = hypervolume(front, budget);
    const double rel =
        expected == 0.0 ? std::abs(actual) : std::abs(actual - expected) / expected;
    worst_rel = std::max(worst_rel, rel);
    require(rel <= 1e-9, "relative error " + fmt(rel) + " beyond 1e-9");
    ++fronts;
  }

  Front single;
  Solution s;
  s.selected = {"x"};
  s.satisfaction = 7.0;
  s.effort = 3.0;
  single.solutions = {s};
  require(hypervolume(single, 10.0) == 7.0 * (10.0 - 3.0),
          "single-point hypervolume not exact");
  require(fronts >= 1000, "too few fronts");
  log << fronts << " fronts, worst relative error " << fmt(worst_rel);
}

// ---------------------------------------------------------------------------
// Criteria 8 and 9: EDA quality and stability at desk scale.
struct QualityOutcome {
  double mean_coincident_ratio = 0.0;
  double mean_hypervolume_ratio = 0.0;
  double worst_cv = 0.0;
  bool stable_flags_consistent = true;
  double ms = 0.0;
};

QualityOutcome run_quality_experiment() {
  const auto start = std::chrono::steady_clock::now();
  QualityOutcome outcome;
  const std::size_t n_instances = 10, runs = 25;
  double sum_coincident_ratio = 0.0, sum_hv_ratio = 0.0;

  for (std::uint64_t inst = 0; inst < n_instances; ++inst) {
    auto instance = nrptest::random_instance(12, 0.2, 0.3, 1000 + inst);
    auto graph = build_interaction_graph(instance);
    auto ordering = ancestral_ordering(graph);
    auto exact = brute_force_front(instance, graph);
    const double exact_hv = hypervolume(exact, instance.effort_limit);
    const double exact_points = static_cast<double>(exact.objective_points().size());

    EdaConfig base = EdaConfig::defaults_for(instance.requirements.size());
    std::vector<double> hvs, ratios;
    for (std::size_t run = 0; run < runs; ++run) {
      EdaConfig config = base;
      config.seed = 10'000 * (inst + 1) + run;
      auto [front, report] = run_eda(instance, graph, ordering, config);
      (void)report;
      hvs.push_back(hypervolume(front, instance.effort_limit));
      ratios.push_back(static_cast<double>(coincident_solutions(front, exact)) /
                       exact_points);
    }
    auto hv_stats = run_statistics(hvs);
    auto ratio_stats = run_statistics(ratios);
    sum_coincident_ratio += ratio_stats.mean;
    sum_hv_ratio += hv_stats.mean / exact_hv;
    outcome.worst_cv = std::max(outcome.worst_cv, hv_stats.cv);
    if (hv_stats.stable != (hv_stats.cv <= 0.05)) {
      outcome.stable_flags_consistent = false;
    }
  }
  outcome.mean_coincident_ratio = sum_coincident_ratio / static_cast<double>(n_instances);
  outcome.mean_hypervolume_ratio = sum_hv_ratio / static_cast<double>(n_instances);
  outcome.ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  return outcome;
}

void criterion_eda_quality(const QualityOutcome& outcome, std::ostream& log) {
  require(outcome.mean_coincident_ratio >= 0.90,
          "mean coincident ratio " + fmt(outcome.mean_coincident_ratio) + " < 0.90");
  require(outcome.mean_hypervolume_ratio >= 0.98,
          "mean hypervolume ratio " + fmt(outcome.mean_hypervolume_ratio) + " < 0.98");
  require(outcome.ms < 600'000.0, "took " + fmt(outcome.ms) + " ms (budget 600000)");
  log << "coincident ratio " << fmt(outcome.mean_coincident_ratio) << ", hv ratio "
      << fmt(outcome.mean_hypervolume_ratio) << ", " << fmt(outcome.ms) << " ms";
}

void criterion_stability(const QualityOutcome& outcome, std::ostream& log) {
  require(outcome.worst_cv <= 0.05,
          "hypervolume cv " + fmt(outcome.worst_cv) + " above the 5% bar");
  require(outcome.stable_flags_consistent, "stability flag disagrees with cv");
  log << "worst hypervolume cv " << fmt(outcome.worst_cv) << ", flags consistent";
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical canonical replay.
void criterion_determinism(std::ostream& log) {
  const auto root = fs::temp_directory_path() / "nrpkit_acceptance_replay";
  fs::remove_all(root);
  fs::create_directories(root);

  GeneratorOptions gen;
  gen.n_requirements = 10;
  gen.n_clients = 4;
  gen.interaction_density = 0.3;
  gen.seed = 99;
  auto file = generate_instance(gen);
  const auto instance_path = root / "instance.json";
  write_instance_file(file, instance_path);

  auto make_plan = [&](const std::string& out) {
    ExperimentPlan plan;
    plan.instance_path = instance_path.string();
    plan.ratio = 0.5;
    plan.algorithms = {"brute", "bnb", "eda:random", "eda:pls"};
    plan.runs = 5;
    plan.seed = 31337;
    plan.canonical = true;
    plan.jobs = 3;
    plan.max_iterations = 25;
    plan.output_dir = (root / out).string();
    return plan;
  };
  run_experiment(make_plan("first"));
  run_experiment(make_plan("second"));

  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "first")) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), root / "first");
    auto twin = root / "second" / rel;
    require(fs::exists(twin), "missing replay file " + rel.string());
    require(read_file(entry.path()) == read_file(twin),
            "byte mismatch in " + rel.string());
    ++files;
  }
  require(files >= 10, "suspiciously few result files");
  fs::remove_all(root);
  log << files << " files byte-identical across reruns";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<void(std::ostream&)> run;
  };

  QualityOutcome quality;
  bool quality_ran = false;
  auto ensure_quality = [&]() {
    if (!quality_ran) {
      quality = run_quality_experiment();
      quality_ran = true;
    }
  };

  const std::vector<Criterion> criteria = {
      {1, "transformation fidelity (figs 1-3, sigma1)", criterion_transformation},
      {2, "pruning count replication (23/31, 8 pruned)", criterion_pruning_count},
      {3, "exact-solver oracle equivalence (>=100 instances)", criterion_exact_equivalence},
      {4, "split/recombine equivalence (>=20 instances)", criterion_split_recombine},
      {5, "sampling validity and distribution", criterion_sampling},
      {6, "zero preservation and structure invariance", criterion_zero_preservation},
      {7, "hypervolume oracle (>=1000 fronts)", criterion_hypervolume},
      {8, "EDA quality at desk scale",
       [&](std::ostream& log) {
         ensure_quality();
         criterion_eda_quality(quality, log);
       }},
      {9, "stability reporting (cv <= 5%)",
       [&](std::ostream& log) {
         ensure_quality();
         criterion_stability(quality, log);
       }},
      {10, "deterministic canonical replay", criterion_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::ostringstream detail;
    try {
      criterion.run(detail);
      std::cout << "[PASS] criterion " << criterion.id << ": " << criterion.name << " -- "
                << detail.str() << "\n";
    } catch (const CheckFailure& f) {
      ++failures;
      std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name << " -- "
                << f.detail << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name
                << " -- unexpected error: " << e.what() << "\n";
    }
  }
  std::cout << (failures == 0
                    ? std::string("ACCEPTANCE: all criteria passed")
                    : "ACCEPTANCE: " + std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
