// Command-line front end: decode, generate, induce-hierarchy, bench,
// render-map. Exit codes: 0 success, 1 usage error, 2 validation error,
// 3 internal invariant violation.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tav/tavhmm.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    tav::detail::write_file(path, content);
}

int run_decode(const std::string& model_path, const std::string& obs_path,
               const std::string& algorithm, const std::string& hierarchy_path,
               const std::string& heuristic, int presegments, const std::string& out_path,
               const std::string& map_path, const std::string& map_pgm_path,
               const std::string& record_path) {
  if ((algorithm == "tav" || algorithm == "cfdp") && hierarchy_path.empty())
    throw UsageError("--hierarchy is required for --algorithm " + algorithm);

  tav::HmmModel model = tav::load_model(model_path);
  tav::LogModel log_model = tav::validate_model(model);
  tav::ObservationSequence obs = tav::load_observations(obs_path);

  tav::AbstractionHierarchy hierarchy =
      hierarchy_path.empty() ? tav::AbstractionHierarchy::flat(model.num_states)
                             : tav::load_hierarchy(hierarchy_path);
  tav::validate_hierarchy(hierarchy, model.num_states);

  const bool want_record = !map_path.empty() || !map_pgm_path.empty() || !record_path.empty();
  tav::ExplorationRecord record;
  tav::ExplorationRecord* rec = want_record ? &record : nullptr;

  tav::DecodeResult result;
  if (algorithm == "viterbi") {
    result = tav::viterbi_decode(log_model, obs, rec);
  } else if (algorithm == "cfdp") {
    auto stack = tav::build_abstract_models(log_model, hierarchy);
    result = tav::cfdp_decode(stack, hierarchy, obs, {}, rec);
  } else if (algorithm == "tav") {
    auto stack = tav::build_abstract_models(log_model, hierarchy);
    tav::TavOptions opts;
    opts.heuristic = heuristic == "viterbi" ? tav::Heuristic::viterbi : tav::Heuristic::cheap;
    opts.presegments = presegments;
    result = tav::tav_decode(stack, hierarchy, obs, opts, rec);
  } else {
    throw UsageError("unknown algorithm \"" + algorithm + "\"");
  }

  write_or_print(out_path, tav::result_to_json(result).dump(2) + "\n");
  if (!map_path.empty())
    tav::detail::write_file(map_path, tav::render_exploration_map(record, hierarchy, result));
  if (!map_pgm_path.empty())
    tav::detail::write_file(map_pgm_path,
                            tav::render_exploration_pgm(record, hierarchy, result));
  if (!record_path.empty()) tav::save_record(record_path, record);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact HMM decoding with state and temporal abstraction"};
  app.require_subcommand(1);

  // decode
  auto* decode = app.add_subcommand("decode", "Decode an observation sequence");
  std::string model_path, obs_path, algorithm, hierarchy_path;
  std::string heuristic = "cheap";
  int presegments = 0;
  std::string out_path, map_path, map_pgm_path, record_path;
  decode->add_option("--model", model_path, "Model JSON file")->required();
  decode->add_option("--obs", obs_path, "Observation file")->required();
  decode->add_option("--algorithm", algorithm, "viterbi | cfdp | tav")
      ->required()
      ->check(CLI::IsMember({"viterbi", "cfdp", "tav"}));
  decode->add_option("--hierarchy", hierarchy_path, "Hierarchy JSON (required for cfdp/tav)");
  decode->add_option("--heuristic", heuristic, "cheap | viterbi (tav only)")
      ->check(CLI::IsMember({"cheap", "viterbi"}));
  decode->add_option("--presegments", presegments, "Initial equal segments, 0 = off (tav only)");
  decode->add_option("--out", out_path, "Result JSON output (default stdout)");
  decode->add_option("--map", map_path, "Write exploration map as text");
  decode->add_option("--map-pgm", map_pgm_path, "Write exploration map as PGM (P2)");
  decode->add_option("--record", record_path, "Write the exploration record as JSON");

  // generate dbn / cities
  auto* generate = app.add_subcommand("generate", "Generate a synthetic instance");
  generate->require_subcommand(1);
  auto* gen_dbn = generate->add_subcommand("dbn", "Coupled-variable instance with timescales");
  int vars = 0, card = 2, horizon = 0;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  std::vector<int> cards, hier_cards;
  std::string prefix = "instance";
  gen_dbn->add_option("--vars", vars, "Number of variables")->required();
  gen_dbn->add_option("--card", card, "Uniform per-variable cardinality (default 2)");
  gen_dbn->add_option("--cards", cards, "Per-variable cardinalities, fastest first");
  gen_dbn->add_option("--epsilon", epsilon, "Timescale ratio in (0,1)")->required();
  gen_dbn->add_option("--horizon", horizon, "Observation length T")->required();
  gen_dbn->add_option("--seed", seed, "Seed");
  gen_dbn->add_option("--hier-cards", hier_cards,
                      "Override hierarchy grouping cardinalities, fastest first");
  gen_dbn->add_option("--out-prefix", prefix, "Output file prefix (default \"instance\")");
  auto* gen_cities = generate->add_subcommand("cities", "27-city tracking instance (T = 50)");
  std::uint64_t cities_seed = 0;
  std::string cities_prefix = "instance";
  gen_cities->add_option("--seed", cities_seed, "Seed");
  gen_cities->add_option("--out-prefix", cities_prefix, "Output file prefix");

  // induce-hierarchy
  auto* induce = app.add_subcommand("induce-hierarchy",
                                    "Induce a hierarchy by recursive spectral bisection");
  std::string induce_model, induce_out;
  int min_leaf = 2, max_children = 2;
  std::uint64_t induce_seed = 0;
  induce->add_option("--model", induce_model, "Model JSON file")->required();
  induce->add_option("--out", induce_out, "Hierarchy JSON output")->required();
  induce->add_option("--min-leaf", min_leaf, "Stop splitting clusters at this size");
  induce->add_option("--max-children", max_children, "Maximum children per node");
  induce->add_option("--seed", induce_seed, "Seed for the clustering restarts");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark configuration");
  std::string bench_config, bench_out;
  bench->add_option("--config", bench_config, "Benchmark config JSON")->required();
  bench->add_option("--out", bench_out, "CSV output (default stdout)");

  // render-map
  auto* render = app.add_subcommand("render-map", "Render a saved exploration record");
  std::string render_record, render_hierarchy, render_result, render_out;
  bool render_pgm = false;
  render->add_option("--record", render_record, "Exploration record JSON")->required();
  render->add_option("--hierarchy", render_hierarchy, "Hierarchy JSON (default: flat)");
  render->add_option("--result", render_result, "Decode result JSON")->required();
  render->add_option("--out", render_out, "Output file (default stdout)");
  render->add_flag("--pgm", render_pgm, "Emit PGM (P2) instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    std::cerr << "Run with --help for usage.\n";
    return 1;
  }

  try {
    if (decode->parsed()) {
      return run_decode(model_path, obs_path, algorithm, hierarchy_path, heuristic, presegments,
                        out_path, map_path, map_pgm_path, record_path);
    }
    if (gen_dbn->parsed()) {
      tav::DbnSpec spec;
      spec.num_vars = vars;
      spec.cardinalities = cards.empty() ? std::vector<int>(vars, card) : cards;
      spec.epsilon = epsilon;
      spec.seed = seed;
      tav::DbnInstance inst = tav::generate_dbn_instance(spec, horizon);
      if (!hier_cards.empty()) {
        tav::DbnSpec hspec = spec;
        hspec.cardinalities = hier_cards;
        hspec.num_vars = static_cast<int>(hier_cards.size());
        if (hspec.num_states() != spec.num_states())
          throw tav::ValidationError(tav::Err::ConfigError,
                                     "--hier-cards must describe the same state count");
        inst.hierarchy = tav::hierarchy_from_dbn(hspec);
      }
      tav::save_model(prefix + ".model.json", inst.model);
      tav::save_hierarchy(prefix + ".hierarchy.json", inst.hierarchy);
      tav::save_observations(prefix + ".obs.txt", inst.obs);
      std::cerr << "wrote " << prefix << ".model.json, " << prefix << ".hierarchy.json, "
                << prefix << ".obs.txt\n";
      return 0;
    }
    if (gen_cities->parsed()) {
      tav::CityInstance inst = tav::generate_city_instance(cities_seed);
      tav::save_model(cities_prefix + ".model.json", inst.model);
      tav::save_hierarchy(cities_prefix + ".hierarchy.json", inst.hierarchy);
      tav::save_observations(cities_prefix + ".obs.txt", inst.obs);
      std::cerr << "wrote " << cities_prefix << ".model.json, " << cities_prefix
                << ".hierarchy.json, " << cities_prefix << ".obs.txt\n";
      return 0;
    }
    if (induce->parsed()) {
      tav::LogModel log_model = tav::validate_model(tav::load_model(induce_model));
      int degenerate = 0;
      tav::AbstractionHierarchy h = tav::induce_hierarchy_spectral(
          log_model, max_children, min_leaf, induce_seed, &degenerate);
      tav::save_hierarchy(induce_out, h);
      if (degenerate > 0)
        std::cerr << degenerate << " degenerate split(s) fell back to index bisection\n";
      return 0;
    }
    if (bench->parsed()) {
      tav::BenchConfig cfg = tav::parse_bench_config(tav::detail::load_json_file(bench_config));
      std::vector<tav::BenchRow> rows = tav::run_benchmark(cfg);
      write_or_print(bench_out, tav::bench_csv(rows));
      return 0;
    }
    if (render->parsed()) {
      tav::ExplorationRecord rec = tav::load_record(render_record);
      tav::AbstractionHierarchy h = render_hierarchy.empty()
                                        ? tav::AbstractionHierarchy::flat(rec.num_states)
                                        : tav::load_hierarchy(render_hierarchy);
      tav::DecodeResult result = tav::load_result(render_result);
      write_or_print(render_out, render_pgm ? tav::render_exploration_pgm(rec, h, result)
                                            : tav::render_exploration_map(rec, h, result));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const tav::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const tav::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
