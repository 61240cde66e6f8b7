#ifndef NRP_EXPERIMENT_HPP_
#define NRP_EXPERIMENT_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nrp/core.hpp"
#include "nrp/eda.hpp"
#include "nrp/errors.hpp"
#include "nrp/exact.hpp"
#include "nrp/instance_io.hpp"
#include "nrp/interaction_graph.hpp"
#include "nrp/metrics.hpp"
#include "nrp/rng.hpp"

namespace nrp {

/// A reproducible experiment: one instance at one effort ratio, a reference
/// front, and a set of algorithms to run against it.
struct ExperimentPlan {
  std::string instance_path;
  double ratio = 0.5;
  std::vector<std::string> algorithms;  // "brute", "bnb", "eda:random|pls|maxprob"
  std::optional<std::size_t> runs;      // default: a quarter of the iterations
  std::optional<std::string> partition_path;
  std::string output_dir = "results";
  std::uint64_t seed = 1;
  std::size_t jobs = 0;  // 0 -> hardware concurrency
  bool canonical = false;
  std::string reference_algo = "bnb";  // or "brute"
  std::size_t enumeration_guard = 30;

  // EDA overrides; unset fields fall back to defaults_for(n).
  std::optional<std::size_t> population_size;
  std::optional<std::size_t> max_iterations;
  std::optional<std::size_t> stall_iterations;
  std::optional<std::size_t> sample_size;
  std::optional<double> m_equivalent_size;
  std::optional<double> prior_p;

  EdaConfig resolve_eda(std::size_t n_requirements) const {
    EdaConfig config = EdaConfig::defaults_for(n_requirements);
    if (population_size) config.population_size = *population_size;
    if (max_iterations) config.max_iterations = *max_iterations;
    if (stall_iterations) config.stall_iterations = *stall_iterations;
    if (sample_size) config.sample_size = *sample_size;
    if (m_equivalent_size) config.m_equivalent_size = *m_equivalent_size;
    if (prior_p) config.prior_p = *prior_p;
    return config;
  }
};

inline ExperimentPlan plan_from_json(const Json& doc) {
  ExperimentPlan plan;
  plan.instance_path = detail::require_string(doc, "instance", "plan");
  if (doc.contains("ratio")) plan.ratio = doc["ratio"].get<double>();
  if (doc.contains("algorithms")) {
    for (const auto& a : doc["algorithms"]) plan.algorithms.push_back(a.get<std::string>());
  }
  if (doc.contains("runs")) plan.runs = doc["runs"].get<std::size_t>();
  if (doc.contains("partition")) plan.partition_path = doc["partition"].get<std::string>();
  if (doc.contains("output")) plan.output_dir = doc["output"].get<std::string>();
  if (doc.contains("seed")) plan.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("jobs")) plan.jobs = doc["jobs"].get<std::size_t>();
  if (doc.contains("canonical")) plan.canonical = doc["canonical"].get<bool>();
  if (doc.contains("reference")) plan.reference_algo = doc["reference"].get<std::string>();
  if (doc.contains("enumeration_guard")) {
    plan.enumeration_guard = doc["enumeration_guard"].get<std::size_t>();
  }
  if (doc.contains("eda")) {
    const auto& e = doc["eda"];
    if (e.contains("population_size")) plan.population_size = e["population_size"].get<std::size_t>();
    if (e.contains("max_iterations")) plan.max_iterations = e["max_iterations"].get<std::size_t>();
    if (e.contains("stall_iterations")) plan.stall_iterations = e["stall_iterations"].get<std::size_t>();
    if (e.contains("sample_size")) plan.sample_size = e["sample_size"].get<std::size_t>();
    if (e.contains("m")) plan.m_equivalent_size = e["m"].get<double>();
    if (e.contains("prior")) plan.prior_p = e["prior"].get<double>();
  }
  return plan;
}

inline ExperimentPlan load_plan(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  auto plan = plan_from_json(doc);
  if (plan.runs == 0) throw ParseError(path.string() + ": runs must be >= 1");
  return plan;
}

/// Partition file: {"blocks": [["r01", ...], ...]}.
inline std::vector<std::vector<std::string>> load_partition(
    const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.contains("blocks") || !doc["blocks"].is_array()) {
    throw ParseError(path.string() + ": missing 'blocks' array");
  }
  std::vector<std::vector<std::string>> blocks;
  for (const auto& b : doc["blocks"]) {
    std::vector<std::string> block;
    for (const auto& id : b) block.push_back(id.get<std::string>());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double hypervolume = 0.0;
  std::size_t front_size = 0;
  std::size_t coincident = 0;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
};

struct AlgorithmResult {
  std::string label;
  std::vector<RunRecord> records;
  std::vector<std::uint64_t> seeds;
  RunStatistics hypervolume_stats;
  RunStatistics coincident_stats;
  RunStatistics front_size_stats;
  RunStatistics iterations_stats;
};

struct ExperimentResult {
  std::filesystem::path output_dir;
  NrpInstance instance;
  Front reference;
  double reference_hypervolume = 0.0;
  std::vector<AlgorithmResult> algorithms;
  Json summary;
};

namespace detail {

// Emitted fronts must re-validate before they are written.
inline void check_front_record(const Front& front, const NrpInstance& instance,
                               const InteractionGraph& graph, double recorded_hv) {
  for (const auto& s : front.solutions) {
    auto recomputed = evaluate(s.selected, instance);
    if (recomputed.satisfaction != s.satisfaction || recomputed.effort != s.effort) {
      throw ValidationError("front record failed objective re-validation");
    }
    if (!is_feasible(s, instance, graph)) {
      throw ValidationError("front record contains an infeasible solution");
    }
  }
  for (const auto& a : front.solutions) {
    for (const auto& b : front.solutions) {
      if (&a != &b && dominates(a, b)) {
        throw ValidationError("front record is not mutually non-dominated");
      }
    }
  }
  if (hypervolume(front, instance.effort_limit) != recorded_hv) {
    throw ValidationError("front record hypervolume mismatch");
  }
}

inline std::string runs_csv(const std::vector<RunRecord>& records, bool canonical) {
  std::ostringstream oss;
  oss << "run,seed,hypervolume,front_size,coincident,iterations,wall_ms\n";
  for (const auto& r : records) {
    oss << r.run << ',' << r.seed << ',' << format_number(r.hypervolume) << ','
        << r.front_size << ',' << r.coincident << ',' << r.iterations << ','
        << format_number(canonical ? 0.0 : r.wall_ms) << '\n';
  }
  return oss.str();
}

inline Json stats_to_json(const RunStatistics& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd},         {"cv", s.cv},
              {"min", s.min},   {"q1", s.q1},         {"median", s.median},
              {"q3", s.q3},     {"max", s.max},       {"stable", s.stable}};
}

inline Json eda_config_to_json(const EdaConfig& c) {
  return Json{{"population_size", c.population_size},
              {"max_iterations", c.max_iterations},
              {"stall_iterations", c.stall_iterations},
              {"init_method", to_string(c.init_method)},
              {"sampler", to_string(c.sampler)},
              {"m", c.m_equivalent_size},
              {"prior", c.prior_p},
              {"sample_size", c.effective_sample_size()}};
}

struct ParsedAlgorithm {
  std::string label;   // file-friendly: brute, bnb, eda_pls, ...
  bool exact = false;
  ExactSolver exact_solver = ExactSolver::branch_and_bound;
  InitMethod init = InitMethod::pls;
};

inline ParsedAlgorithm parse_algorithm(const std::string& text) {
  ParsedAlgorithm a;
  if (text == "brute") {
    a.label = "brute";
    a.exact = true;
    a.exact_solver = ExactSolver::brute_force;
  } else if (text == "bnb") {
    a.label = "bnb";
    a.exact = true;
    a.exact_solver = ExactSolver::branch_and_bound;
  } else if (text.rfind("eda:", 0) == 0) {
    const std::string init = text.substr(4);
    a.exact = false;
    if (init == "random") {
      a.init = InitMethod::random;
    } else if (init == "pls") {
      a.init = InitMethod::pls;
    } else if (init == "maxprob") {
      a.init = InitMethod::maxprob;
    } else {
      throw ValidationError("unknown EDA init method '" + init + "'");
    }
    a.label = "eda_" + init;
  } else {
    throw ValidationError("unknown algorithm '" + text + "'");
  }
  return a;
}

}  // namespace detail

/// Runs the whole plan: builds the reference front (direct exact solve, or
/// split/recombine when a partition is supplied), executes every algorithm,
/// aggregates per-run metrics and writes the result bundle (front CSVs, one
/// runs CSV per algorithm, summary JSON) under plan.output_dir. EDA runs are
/// dispatched to a worker pool; all emission is single-threaded and
/// deterministic. In canonical mode every timing field is zeroed so reruns
/// are byte-identical.
inline ExperimentResult run_experiment(const ExperimentPlan& plan) {
  namespace fs = std::filesystem;
  if (plan.runs == 0) throw ValidationError("plan: runs must be >= 1");

  const auto file = parse_instance_file(plan.instance_path);
  const auto instance = file.make_instance(plan.ratio);
  const auto graph = build_interaction_graph(instance);
  const auto ordering = ancestral_ordering(graph);

  ExactOptions exact_options;
  exact_options.max_enumeration_bits = plan.enumeration_guard;

  std::optional<std::vector<std::vector<std::string>>> partition;
  if (plan.partition_path) partition = load_partition(*plan.partition_path);

  ExperimentResult result;
  result.instance = instance;
  result.output_dir = plan.output_dir;

  // Reference front.
  const auto reference_solver = plan.reference_algo == "brute"
                                    ? ExactSolver::brute_force
                                    : ExactSolver::branch_and_bound;
  const auto ref_start = std::chrono::steady_clock::now();
  if (partition) {
    result.reference = split_and_combine(instance, *partition, reference_solver, exact_options);
  } else if (graph.decision_count() > plan.enumeration_guard) {
    throw SizeGuardError("instance has " + std::to_string(graph.decision_count()) +
                         " decision variables, above the exact guard of " +
                         std::to_string(plan.enumeration_guard) +
                         "; supply a partition for split_and_combine");
  } else if (reference_solver == ExactSolver::brute_force) {
    result.reference = brute_force_front(instance, graph, exact_options);
  } else {
    result.reference = branch_and_bound_front(instance, graph, ordering, exact_options).first;
  }
  const double ref_wall_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - ref_start)
                                 .count();
  result.reference_hypervolume = hypervolume(result.reference, instance.effort_limit);
  detail::check_front_record(result.reference, instance, graph, result.reference_hypervolume);

  const fs::path outdir(plan.output_dir);
  write_front_csv(result.reference, outdir / "reference_front.csv");

  const std::size_t reference_points = result.reference.objective_points().size();
  const EdaConfig base_config = plan.resolve_eda(instance.requirements.size());

  Json summary;
  summary["experiment"] = Json{{"instance", plan.instance_path},
                               {"name", instance.name},
                               {"ratio", plan.ratio},
                               {"budget", instance.effort_limit},
                               {"seed", plan.seed},
                               {"runs", plan.runs},
                               {"canonical", plan.canonical},
                               {"partitioned", partition.has_value()}};
  summary["reference"] = Json{{"algorithm", plan.reference_algo},
                              {"front_size", result.reference.size()},
                              {"objective_points", reference_points},
                              {"hypervolume", result.reference_hypervolume},
                              {"wall_ms", plan.canonical ? 0.0 : ref_wall_ms}};
  summary["algorithms"] = Json::object();

  for (const auto& algo_text : plan.algorithms) {
    const auto algo = detail::parse_algorithm(algo_text);
    AlgorithmResult algo_result;
    algo_result.label = algo.label;

    if (algo.exact) {
      const auto start = std::chrono::steady_clock::now();
      Front front;
      SearchStats stats;
      bool have_stats = false;
      if (partition) {
        front = split_and_combine(instance, *partition, algo.exact_solver, exact_options);
      } else if (algo.exact_solver == ExactSolver::brute_force) {
        front = brute_force_front(instance, graph, exact_options);
      } else {
        auto [f, s] = branch_and_bound_front(instance, graph, ordering, exact_options);
        front = std::move(f);
        stats = s;
        have_stats = true;
      }
      RunRecord record;
      record.run = 0;
      record.seed = 0;
      record.hypervolume = hypervolume(front, instance.effort_limit);
      record.front_size = front.size();
      record.coincident = coincident_solutions(front, result.reference);
      record.iterations = 0;
      record.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      detail::check_front_record(front, instance, graph, record.hypervolume);
      write_front_csv(front, outdir / "fronts" / algo.label / "run_000.csv");
      algo_result.records.push_back(record);

      Json entry;
      entry["hypervolume"] = record.hypervolume;
      entry["front_size"] = record.front_size;
      entry["coincident"] = record.coincident;
      entry["wall_ms"] = plan.canonical ? 0.0 : record.wall_ms;
      if (have_stats) {
        entry["search"] = Json{{"explored", stats.explored},
                               {"pruned_interaction", stats.pruned_interaction},
                               {"pruned_effort", stats.pruned_effort}};
      }
      summary["algorithms"][algo.label] = std::move(entry);
    } else {
      // Seed stream per algorithm, recorded for replay.
      std::uint64_t stream = plan.seed ^ fnv1a(algo.label);
      algo_result.seeds.resize(plan.runs);
      for (std::size_t i = 0; i < plan.runs; ++i) {
        algo_result.seeds[i] = splitmix64(stream);
      }

      std::vector<RunRecord> records(plan.runs);
      std::vector<Front> fronts(plan.runs);
      std::atomic<std::size_t> cursor{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;

      auto worker = [&]() {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= plan.runs) return;
          try {
            EdaConfig config = base_config;
            config.init_method = algo.init;
            config.seed = algo_result.seeds[i];
            auto [front, report] = run_eda(instance, graph, ordering, config);
            RunRecord record;
            record.run = i;
            record.seed = config.seed;
            record.hypervolume = hypervolume(front, instance.effort_limit);
            record.front_size = front.size();
            record.coincident = coincident_solutions(front, result.reference);
            record.iterations = report.iterations;
            record.wall_ms = report.wall_ms;
            records[i] = record;
            fronts[i] = std::move(front);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      };

      std::size_t n_jobs = plan.jobs != 0 ? plan.jobs : std::thread::hardware_concurrency();
      n_jobs = std::max<std::size_t>(1, std::min(n_jobs, plan.runs));
      std::vector<std::thread> threads;
      threads.reserve(n_jobs);
      for (std::size_t t = 0; t < n_jobs; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
      if (failure) std::rethrow_exception(failure);

      char run_name[32];
      for (std::size_t i = 0; i < plan.runs; ++i) {
        detail::check_front_record(fronts[i], instance, graph, records[i].hypervolume);
        std::snprintf(run_name, sizeof run_name, "run_%03zu.csv", i);
        write_front_csv(fronts[i], outdir / "fronts" / algo.label / run_name);
      }
      algo_result.records = std::move(records);

      auto collect = [&](auto field) {
        std::vector<double> values;
        values.reserve(algo_result.records.size());
        for (const auto& r : algo_result.records) values.push_back(field(r));
        return run_statistics(std::move(values));
      };
      algo_result.hypervolume_stats = collect([](const RunRecord& r) { return r.hypervolume; });
      algo_result.coincident_stats =
          collect([](const RunRecord& r) { return static_cast<double>(r.coincident); });
      algo_result.front_size_stats =
          collect([](const RunRecord& r) { return static_cast<double>(r.front_size); });
      algo_result.iterations_stats =
          collect([](const RunRecord& r) { return static_cast<double>(r.iterations); });

      EdaConfig config_echo = base_config;
      config_echo.init_method = algo.init;
      Json entry;
      entry["config"] = detail::eda_config_to_json(config_echo);
      entry["seeds"] = algo_result.seeds;
      entry["hypervolume"] = detail::stats_to_json(algo_result.hypervolume_stats);
      entry["coincident"] = detail::stats_to_json(algo_result.coincident_stats);
      entry["front_size"] = detail::stats_to_json(algo_result.front_size_stats);
      entry["iterations"] = detail::stats_to_json(algo_result.iterations_stats);
      entry["hypervolume_ratio_mean"] =
          result.reference_hypervolume != 0.0
              ? algo_result.hypervolume_stats.mean / result.reference_hypervolume
              : 0.0;
      entry["coincident_ratio_mean"] =
          reference_points != 0
              ? algo_result.coincident_stats.mean / static_cast<double>(reference_points)
              : 0.0;
      if (!plan.canonical) {
        std::vector<double> walls;
        for (const auto& r : algo_result.records) walls.push_back(r.wall_ms);
        entry["wall_ms"] = detail::stats_to_json(run_statistics(std::move(walls)));
      }
      summary["algorithms"][algo.label] = std::move(entry);
    }

    atomic_write(outdir / (algo.label + "_runs.csv"),
                 detail::runs_csv(algo_result.records, plan.canonical));
    result.algorithms.push_back(std::move(algo_result));
  }

  atomic_write(outdir / "summary.json", summary.dump(2) + "\n");
  result.summary = std::move(summary);
  return result;
}

}  // namespace nrp

#endif  // NRP_EXPERIMENT_HPP_
