// nrp: command-line front end of the bi-objective NRP toolkit.
//
// Subcommands: transform, solve-exact, solve-eda, gen, bench, metrics.
// All relative output paths resolve under $NRP_OUTPUT_ROOT (default: cwd).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrp/nrp.hpp"

namespace {

namespace fs = std::filesystem;

fs::path output_root() {
  if (const char* root = std::getenv("NRP_OUTPUT_ROOT")) return fs::path(root);
  return fs::path(".");
}

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p : output_root() / p;
}

nrp::NrpInstance load_instance(const std::string& path, double ratio) {
  auto file = nrp::parse_instance_file(path);
  return file.make_instance(ratio);
}

int exit_code_for(const std::string& category) {
  static const std::map<std::string, int> codes = {
      {"parse", 2},      {"validation", 3}, {"contradiction", 4},
      {"cycle", 5},      {"partition", 6},  {"size_guard", 7},
      {"resource", 8},   {"domain", 9},     {"io", 10},
      {"generation", 11}};
  auto it = codes.find(category);
  return it != codes.end() ? it->second : 1;
}

struct TransformArgs {
  std::string instance_path;
  std::string dot_path;
  std::string tie_break = "low";
};

int cmd_transform(const TransformArgs& args) {
  auto file = nrp::parse_instance_file(args.instance_path);
  auto instance = file.make_instance(file.effort_ratios.front());
  auto graph = nrp::build_interaction_graph(instance);
  auto ordering = nrp::ancestral_ordering(
      graph, args.tie_break == "high" ? nrp::TieBreak::highest_id_first
                                      : nrp::TieBreak::lowest_id_first);
  if (!args.dot_path.empty()) {
    nrp::atomic_write(resolve_output(args.dot_path), nrp::to_dot(graph));
  }
  std::cout << "nodes: " << graph.nodes.size() << " (decision "
            << graph.decision_count() << ")\n";
  std::cout << "edges: " << graph.edges.size() << "\n";
  std::cout << "ordering:";
  for (const auto& id : ordering.ids(graph)) std::cout << ' ' << id;
  std::cout << "\n";
  return 0;
}

struct SolveExactArgs {
  std::string instance_path;
  double ratio = 0.5;
  std::string algo = "bnb";
  std::string partition_path;
  std::string out_path;
  bool no_effort_prune = false;
  std::size_t guard = 30;
};

int cmd_solve_exact(const SolveExactArgs& args) {
  auto instance = load_instance(args.instance_path, args.ratio);
  auto graph = nrp::build_interaction_graph(instance);

  nrp::ExactOptions options;
  options.effort_prune = !args.no_effort_prune;
  options.max_enumeration_bits = args.guard;

  nrp::Front front;
  std::optional<nrp::SearchStats> stats;
  if (!args.partition_path.empty()) {
    auto partition = nrp::load_partition(args.partition_path);
    auto solver = args.algo == "brute" ? nrp::ExactSolver::brute_force
                                       : nrp::ExactSolver::branch_and_bound;
    front = nrp::split_and_combine(instance, partition, solver, options);
  } else if (args.algo == "brute") {
    front = nrp::brute_force_front(instance, graph, options);
  } else {
    auto ordering = nrp::ancestral_ordering(graph);
    auto [f, s] = nrp::branch_and_bound_front(instance, graph, ordering, options);
    front = std::move(f);
    stats = s;
  }

  std::cout << "instance: " << instance.name << "\n";
  std::cout << "budget: " << nrp::format_number(instance.effort_limit) << "\n";
  std::cout << "front_size: " << front.size() << "\n";
  std::cout << "hypervolume: "
            << nrp::format_number(nrp::hypervolume(front, instance.effort_limit)) << "\n";
  if (stats) {
    std::cout << "explored: " << stats->explored << "\n";
    std::cout << "pruned_interaction: " << stats->pruned_interaction << "\n";
    std::cout << "pruned_effort: " << stats->pruned_effort << "\n";
  }
  if (!args.out_path.empty()) {
    nrp::write_front_csv(front, resolve_output(args.out_path));
  }
  return 0;
}

struct SolveEdaArgs {
  std::string instance_path;
  double ratio = 0.5;
  std::string init = "pls";
  std::string sampler = "pls";
  std::size_t iters = 100;
  std::size_t pop = 0;  // 0 -> 5n default
  std::size_t stall = 0; // 0 -> iters / 10
  std::size_t samples = 0;
  double m = 1.0;
  double prior = 0.5;
  std::uint64_t seed = 1;
  std::string out_path;
  bool canonical = false;
};

int cmd_solve_eda(const SolveEdaArgs& args) {
  auto instance = load_instance(args.instance_path, args.ratio);
  auto graph = nrp::build_interaction_graph(instance);
  auto ordering = nrp::ancestral_ordering(graph);

  nrp::EdaConfig config = nrp::EdaConfig::defaults_for(instance.requirements.size());
  config.max_iterations = args.iters;
  config.stall_iterations = args.stall != 0 ? args.stall : std::max<std::size_t>(1, args.iters / 10);
  if (args.pop != 0) config.population_size = args.pop;
  config.sample_size = args.samples;
  config.m_equivalent_size = args.m;
  config.prior_p = args.prior;
  config.seed = args.seed;
  config.init_method = args.init == "random" ? nrp::InitMethod::random
                       : args.init == "maxprob" ? nrp::InitMethod::maxprob
                                                : nrp::InitMethod::pls;
  config.sampler = args.sampler == "maxprob" ? nrp::Sampler::maxprob : nrp::Sampler::pls;

  auto [front, report] = nrp::run_eda(instance, graph, ordering, config);

  std::cout << "instance: " << instance.name << "\n";
  std::cout << "budget: " << nrp::format_number(instance.effort_limit) << "\n";
  std::cout << "iterations: " << report.iterations << "\n";
  std::cout << "stop_reason: " << report.stop_reason << "\n";
  std::cout << "front_size: " << report.front_size << "\n";
  std::cout << "hypervolume: "
            << nrp::format_number(nrp::hypervolume(front, instance.effort_limit)) << "\n";
  std::cout << "wall_ms: " << nrp::format_number(args.canonical ? 0.0 : report.wall_ms)
            << "\n";
  if (!args.out_path.empty()) {
    nrp::write_front_csv(front, resolve_output(args.out_path));
  }
  return 0;
}

struct GenArgs {
  std::size_t n = 20;
  std::size_t clients = 5;
  double density = 0.2;
  std::string style = "nrp20";
  std::uint64_t seed = 1;
  std::string out_path;
  std::vector<double> ratios;
};

int cmd_gen(const GenArgs& args) {
  nrp::GeneratorOptions options;
  options.n_requirements = args.n;
  options.n_clients = args.clients;
  options.interaction_density = args.density;
  options.scale = args.style == "nrp100" ? nrp::ValueScale::nrp100 : nrp::ValueScale::nrp20;
  options.seed = args.seed;
  if (!args.ratios.empty()) options.effort_ratios = args.ratios;

  auto file = nrp::generate_instance(options);
  if (args.out_path.empty()) {
    std::cout << nrp::instance_file_to_json(file).dump(2) << "\n";
  } else {
    nrp::write_instance_file(file, resolve_output(args.out_path));
    std::cout << "wrote " << resolve_output(args.out_path).string() << "\n";
  }
  return 0;
}

struct BenchArgs {
  std::string plan_path;
  std::string out_dir;
  std::size_t jobs = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool canonical = false;
};

int cmd_bench(const BenchArgs& args) {
  auto plan = nrp::load_plan(args.plan_path);
  if (!args.out_dir.empty()) plan.output_dir = args.out_dir;
  if (args.jobs != 0) plan.jobs = args.jobs;
  if (args.runs != 0) plan.runs = args.runs;
  if (args.seed_set) plan.seed = args.seed;
  if (args.canonical) plan.canonical = true;
  plan.output_dir = resolve_output(plan.output_dir).string();

  auto result = nrp::run_experiment(plan);
  std::cout << "instance: " << result.instance.name << "\n";
  std::cout << "reference_front_size: " << result.reference.size() << "\n";
  std::cout << "reference_hypervolume: "
            << nrp::format_number(result.reference_hypervolume) << "\n";
  for (const auto& algo : result.algorithms) {
    std::cout << "algorithm " << algo.label << ": " << algo.records.size() << " run(s)";
    if (!algo.seeds.empty()) {
      std::cout << ", mean hypervolume "
                << nrp::format_number(algo.hypervolume_stats.mean) << " (cv "
                << nrp::format_number(algo.hypervolume_stats.cv) << ", "
                << (algo.hypervolume_stats.stable ? "stable" : "unstable") << ")";
    }
    std::cout << "\n";
  }
  std::cout << "results in " << result.output_dir.string() << "\n";
  return 0;
}

struct MetricsArgs {
  std::string front_path;
  std::string reference_path;
  double budget = 0.0;
  bool by_set = false;
};

int cmd_metrics(const MetricsArgs& args) {
  auto front = nrp::front_from_csv(args.front_path);
  auto reference = nrp::front_from_csv(args.reference_path);
  const auto coincident = args.by_set
                              ? nrp::coincident_solution_sets(front, reference)
                              : nrp::coincident_solutions(front, reference);
  const double hv_front = nrp::hypervolume(front, args.budget);
  const double hv_ref = nrp::hypervolume(reference, args.budget);
  std::cout << "front_size: " << front.size() << "\n";
  std::cout << "reference_size: " << reference.size() << "\n";
  std::cout << "hypervolume: " << nrp::format_number(hv_front) << "\n";
  std::cout << "reference_hypervolume: " << nrp::format_number(hv_ref) << "\n";
  std::cout << "hypervolume_ratio: "
            << nrp::format_number(hv_ref != 0.0 ? hv_front / hv_ref : 0.0) << "\n";
  std::cout << "coincident: " << coincident << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-objective Next Release Problem solver toolkit"};
  app.require_subcommand(1);

  TransformArgs transform_args;
  auto* transform = app.add_subcommand(
      "transform", "Build the interaction graph, print an ancestral ordering, export DOT");
  transform->add_option("--instance", transform_args.instance_path, "instance JSON file")
      ->required();
  transform->add_option("--dot", transform_args.dot_path, "write the transformed graph as DOT");
  transform->add_option("--tie-break", transform_args.tie_break, "low|high (default low)")
      ->check(CLI::IsMember({"low", "high"}));

  SolveExactArgs exact_args;
  auto* solve_exact = app.add_subcommand("solve-exact", "Exact Pareto front");
  solve_exact->add_option("--instance", exact_args.instance_path, "instance JSON file")
      ->required();
  solve_exact->add_option("--ratio", exact_args.ratio, "effort ratio for the budget");
  solve_exact->add_option("--algo", exact_args.algo, "brute|bnb")
      ->check(CLI::IsMember({"brute", "bnb"}));
  solve_exact->add_option("--partition", exact_args.partition_path,
                          "partition JSON for split_and_combine");
  solve_exact->add_option("--out", exact_args.out_path, "front CSV output path");
  solve_exact->add_flag("--no-effort-prune", exact_args.no_effort_prune,
                        "disable budget pruning (interaction-only bound)");
  solve_exact->add_option("--guard", exact_args.guard, "enumeration size guard");

  SolveEdaArgs eda_args;
  auto* solve_eda = app.add_subcommand("solve-eda", "Approximate front via the EDA");
  solve_eda->add_option("--instance", eda_args.instance_path, "instance JSON file")->required();
  solve_eda->add_option("--ratio", eda_args.ratio, "effort ratio for the budget");
  solve_eda->add_option("--init", eda_args.init, "random|pls|maxprob")
      ->check(CLI::IsMember({"random", "pls", "maxprob"}));
  solve_eda->add_option("--sampler", eda_args.sampler, "pls|maxprob")
      ->check(CLI::IsMember({"pls", "maxprob"}));
  solve_eda->add_option("--iters", eda_args.iters, "iteration budget");
  solve_eda->add_option("--pop", eda_args.pop, "population size (default 5n)");
  solve_eda->add_option("--stall", eda_args.stall, "stall iterations (default iters/10)");
  solve_eda->add_option("--samples", eda_args.samples, "sample size per iteration");
  solve_eda->add_option("--m", eda_args.m, "m-estimator equivalent data size");
  solve_eda->add_option("--prior", eda_args.prior, "m-estimator prior probability");
  solve_eda->add_option("--seed", eda_args.seed, "random seed");
  solve_eda->add_option("--out", eda_args.out_path, "front CSV output path");
  solve_eda->add_flag("--canonical", eda_args.canonical, "zero timing fields");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  gen->add_option("--n", gen_args.n, "number of requirements")->required();
  gen->add_option("--clients", gen_args.clients, "number of clients");
  gen->add_option("--density", gen_args.density, "interactions per requirement, in [0,1]");
  gen->add_option("--style", gen_args.style, "nrp20|nrp100 value scales")
      ->check(CLI::IsMember({"nrp20", "nrp100"}));
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out", gen_args.out_path, "output file (stdout when omitted)");
  gen->add_option("--ratios", gen_args.ratios, "effort ratios for the file");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a full experiment plan");
  bench->add_option("--plan", bench_args.plan_path, "experiment plan JSON")->required();
  bench->add_option("--out", bench_args.out_dir, "override the plan output directory");
  bench->add_option("--jobs", bench_args.jobs, "worker pool size");
  bench->add_option("--runs", bench_args.runs, "override the run count");
  bench->add_option("--seed", bench_args.seed, "override the base seed")
      ->each([&](const std::string&) { bench_args.seed_set = true; });
  bench->add_flag("--canonical", bench_args.canonical, "zero timing fields for replay");

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "Compare a front CSV against a reference");
  metrics->add_option("--front", metrics_args.front_path, "front CSV")->required();
  metrics->add_option("--reference", metrics_args.reference_path, "reference front CSV")
      ->required();
  metrics->add_option("--budget", metrics_args.budget, "effort limit B")->required();
  metrics->add_flag("--by-set", metrics_args.by_set,
                    "count coincidence by requirement set instead of objective point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (transform->parsed()) return cmd_transform(transform_args);
    if (solve_exact->parsed()) return cmd_solve_exact(exact_args);
    if (solve_eda->parsed()) return cmd_solve_eda(eda_args);
    if (gen->parsed()) return cmd_gen(gen_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (metrics->parsed()) return cmd_metrics(metrics_args);
  } catch (const nrp::Error& e) {
    std::cerr << "error category=" << e.category() << " message=\"" << e.what() << "\"\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error category=internal message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
