#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nrp/experiment.hpp"
#include "nrp/generator.hpp"

using namespace nrp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("nrpkit_exp_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string write_test_instance(const fs::path& dir, std::size_t n, double density,
                                std::uint64_t seed) {
  GeneratorOptions options;
  options.n_requirements = n;
  options.n_clients = 4;
  options.interaction_density = density;
  options.seed = seed;
  auto file = generate_instance(options);
  auto path = dir / "instance.json";
  write_instance_file(file, path);
  return path.string();
}

std::map<fs::path, std::string> slurp_tree(const fs::path& root) {
  std::map<fs::path, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root)] = read_file(entry.path());
    }
  }
  return files;
}

}  // namespace

TEST_CASE("experiment plans load with overrides and defaults", "[experiment]") {
  TempDir tmp("plan");
  auto plan_path = tmp.path / "plan.json";
  {
    std::ofstream out(plan_path);
    out << R"({
      "instance": "instance.json",
      "ratio": 0.3,
      "algorithms": ["bnb", "eda:pls"],
      "runs": 4,
      "seed": 9,
      "output": "out",
      "eda": {"max_iterations": 20, "m": 2.0}
    })";
  }
  auto plan = load_plan(plan_path);
  CHECK(plan.instance_path == "instance.json");
  CHECK(plan.ratio == 0.3);
  CHECK(plan.runs == 4);
  CHECK(plan.seed == 9);
  CHECK(plan.algorithms == std::vector<std::string>{"bnb", "eda:pls"});

  auto config = plan.resolve_eda(10);
  CHECK(config.population_size == 50);  // default 5n
  CHECK(config.max_iterations == 20);   // override
  CHECK(config.m_equivalent_size == 2.0);
}

TEST_CASE("run_experiment writes the full result bundle", "[experiment]") {
  TempDir tmp("bundle");
  ExperimentPlan plan;
  plan.instance_path = write_test_instance(tmp.path, 10, 0.2, 41);
  plan.ratio = 0.5;
  plan.algorithms = {"brute", "bnb", "eda:pls"};
  plan.runs = 3;
  plan.seed = 5;
  plan.output_dir = (tmp.path / "out").string();
  plan.max_iterations = 15;

  auto result = run_experiment(plan);

  CHECK(fs::exists(tmp.path / "out" / "reference_front.csv"));
  CHECK(fs::exists(tmp.path / "out" / "brute_runs.csv"));
  CHECK(fs::exists(tmp.path / "out" / "bnb_runs.csv"));
  CHECK(fs::exists(tmp.path / "out" / "eda_pls_runs.csv"));
  CHECK(fs::exists(tmp.path / "out" / "summary.json"));
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d.csv", i);
    CHECK(fs::exists(tmp.path / "out" / "fronts" / "eda_pls" / name));
  }

  // Exact algorithms coincide with the reference completely.
  REQUIRE(result.algorithms.size() == 3);
  const auto reference_points = result.reference.objective_points().size();
  CHECK(result.algorithms[0].records[0].coincident == reference_points);
  CHECK(result.algorithms[0].records[0].hypervolume == result.reference_hypervolume);
  CHECK(result.algorithms[1].records[0].coincident == reference_points);

  // Summary carries the agreed fields.
  const auto& summary = result.summary;
  CHECK(summary["experiment"]["runs"] == 3);
  CHECK(summary["reference"]["front_size"] == result.reference.size());
  CHECK(summary["algorithms"].contains("eda_pls"));
  CHECK(summary["algorithms"]["eda_pls"]["seeds"].size() == 3);
  CHECK(summary["algorithms"]["eda_pls"]["hypervolume"].contains("cv"));
  CHECK(summary["algorithms"]["eda_pls"].contains("coincident_ratio_mean"));

  // The emitted reference front re-parses to the computed one.
  auto reparsed = front_from_csv(tmp.path / "out" / "reference_front.csv");
  CHECK(nrptest::selection_sets(reparsed.solutions) ==
        nrptest::selection_sets(result.reference.solutions));
}

TEST_CASE("canonical reruns are byte-identical", "[experiment]") {
  TempDir tmp("replay");
  auto instance_path = write_test_instance(tmp.path, 9, 0.3, 17);

  auto make_plan = [&](const std::string& out) {
    ExperimentPlan plan;
    plan.instance_path = instance_path;
    plan.ratio = 0.5;
    plan.algorithms = {"bnb", "eda:random", "eda:pls"};
    plan.runs = 3;
    plan.seed = 2024;
    plan.canonical = true;
    plan.jobs = 2;
    plan.output_dir = (tmp.path / out).string();
    plan.max_iterations = 10;
    return plan;
  };
  run_experiment(make_plan("a"));
  run_experiment(make_plan("b"));

  auto tree_a = slurp_tree(tmp.path / "a");
  auto tree_b = slurp_tree(tmp.path / "b");
  REQUIRE(!tree_a.empty());
  REQUIRE(tree_a.size() == tree_b.size());
  for (const auto& [rel, content] : tree_a) {
    INFO(rel.string());
    REQUIRE(tree_b.count(rel) == 1);
    CHECK(content == tree_b.at(rel));
  }
}

TEST_CASE("experiment uses split_and_combine when a partition is given", "[experiment]") {
  TempDir tmp("split");

  // Two independent blocks written as one instance.
  GeneratorOptions options;
  options.n_requirements = 6;
  options.n_clients = 3;
  options.interaction_density = 0.3;
  options.seed = 8;
  auto left = generate_instance(options);
  options.seed = 9;
  auto right = generate_instance(options);

  InstanceFile whole;
  whole.name = "two-block";
  whole.effort_ratios = {0.5};
  whole.clients = left.clients;
  std::vector<std::string> left_ids, right_ids;
  for (auto r : left.requirements) {
    r.id = "L" + r.id;
    left_ids.push_back(r.id);
    whole.requirements.push_back(r);
  }
  for (auto r : right.requirements) {
    r.id = "R" + r.id;
    r.client_values.clear();
    r.satisfaction = 3.0;
    right_ids.push_back(r.id);
    whole.requirements.push_back(r);
  }
  auto rename = [](std::vector<IdPair> pairs, const std::string& prefix) {
    for (auto& [a, b] : pairs) {
      a = prefix + a;
      b = prefix + b;
    }
    return pairs;
  };
  whole.interactions.implications = rename(left.interactions.implications, "L");
  auto right_imp = rename(right.interactions.implications, "R");
  whole.interactions.implications.insert(whole.interactions.implications.end(),
                                         right_imp.begin(), right_imp.end());
  whole.interactions.combinations = rename(left.interactions.combinations, "L");
  auto right_comb = rename(right.interactions.combinations, "R");
  whole.interactions.combinations.insert(whole.interactions.combinations.end(),
                                         right_comb.begin(), right_comb.end());
  whole.interactions.exclusions = rename(left.interactions.exclusions, "L");
  auto right_excl = rename(right.interactions.exclusions, "R");
  whole.interactions.exclusions.insert(whole.interactions.exclusions.end(),
                                       right_excl.begin(), right_excl.end());

  auto instance_path = tmp.path / "whole.json";
  write_instance_file(whole, instance_path);
  auto partition_path = tmp.path / "partition.json";
  {
    Json doc;
    doc["blocks"] = Json::array({left_ids, right_ids});
    std::ofstream out(partition_path);
    out << doc.dump(2);
  }

  ExperimentPlan plan;
  plan.instance_path = instance_path.string();
  plan.ratio = 0.5;
  plan.algorithms = {"brute"};
  plan.runs = 1;
  plan.partition_path = partition_path.string();
  plan.output_dir = (tmp.path / "out").string();

  auto result = run_experiment(plan);

  auto instance = parse_instance_file(instance_path).make_instance(0.5);
  auto graph = build_interaction_graph(instance);
  auto direct = brute_force_front(instance, graph);
  CHECK(nrptest::selection_sets(result.reference.solutions) ==
        nrptest::selection_sets(direct.solutions));
}

TEST_CASE("oversized instances without a partition are refused", "[experiment]") {
  TempDir tmp("guard");
  ExperimentPlan plan;
  plan.instance_path = write_test_instance(tmp.path, 12, 0.1, 3);
  plan.algorithms = {"bnb"};
  plan.runs = 1;
  plan.enumeration_guard = 8;
  plan.output_dir = (tmp.path / "out").string();
  CHECK_THROWS_MATCHES(run_experiment(plan), SizeGuardError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("partition")));
}

TEST_CASE("partition files reject malformed documents", "[experiment]") {
  TempDir tmp("badpart");
  auto path = tmp.path / "p.json";
  { std::ofstream out(path); out << R"({"not_blocks": []})"; }
  CHECK_THROWS_AS(load_partition(path), ParseError);
}
