#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tav/cfdp.hpp"
#include "tav/generators.hpp"
#include "tav/io.hpp"
#include "tav/tav.hpp"
#include "tav/viterbi.hpp"

namespace tav {

struct BenchRunSpec {
  json instance;  // {"type":"dbn"|...}, also the cache / agreement key
  std::string algorithm;
  Heuristic heuristic = Heuristic::cheap;
  int presegments = 0;
  int repetitions = 1;
};

struct BenchConfig {
  std::vector<BenchRunSpec> runs;
};

struct BenchRow {
  std::string algorithm;
  int num_states = 0;
  int horizon = 0;
  double epsilon = std::nan("");  // NaN when the instance has no epsilon
  std::string hierarchy;
  std::string heuristic;
  int presegments = 0;
  double loglik = kNegInf;
  long iterations = 0;
  long cells = 0;
  double wall_ms = 0.0;
};

inline BenchConfig parse_bench_config(const json& j) {
  BenchConfig cfg;
  if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").empty())
    throw ValidationError(Err::ConfigError, "config needs a non-empty \"runs\" array");
  for (const json& rj : j.at("runs")) {
    BenchRunSpec run;
    if (!rj.contains("instance"))
      throw ValidationError(Err::ConfigError, "run is missing \"instance\"");
    run.instance = rj.at("instance");
    run.algorithm = detail::get_field<std::string>(rj, "algorithm", "run");
    if (run.algorithm != "viterbi" && run.algorithm != "cfdp" && run.algorithm != "tav")
      throw ValidationError(Err::ConfigError, "unknown algorithm \"" + run.algorithm + "\"");
    if (rj.contains("heuristic")) {
      const std::string h = rj.at("heuristic").get<std::string>();
      if (h == "cheap")
        run.heuristic = Heuristic::cheap;
      else if (h == "viterbi")
        run.heuristic = Heuristic::viterbi;
      else
        throw ValidationError(Err::ConfigError, "unknown heuristic \"" + h + "\"");
    }
    run.presegments = rj.value("presegments", 0);
    run.repetitions = rj.value("repetitions", 1);
    if (run.repetitions < 1)
      throw ValidationError(Err::ConfigError, "repetitions must be >= 1");
    cfg.runs.push_back(std::move(run));
  }
  return cfg;
}

namespace detail {

struct ResolvedInstance {
  HmmModel model;
  LogModel log_model;
  AbstractionHierarchy hierarchy;
  ObservationSequence obs;
  double epsilon = std::nan("");
  std::unique_ptr<AbstractModelStack> stack;  // built on first cfdp/tav use

  const AbstractModelStack& get_stack() {
    if (!stack)
      stack = std::make_unique<AbstractModelStack>(build_abstract_models(log_model, hierarchy));
    return *stack;
  }
};

inline DbnSpec dbn_spec_from_json(const json& j) {
  DbnSpec spec;
  spec.num_vars = get_field<int>(j, "vars", "dbn instance");
  if (j.contains("cards"))
    spec.cardinalities = j.at("cards").get<std::vector<int>>();
  else
    spec.cardinalities.assign(spec.num_vars, get_field<int>(j, "card", "dbn instance"));
  spec.epsilon = get_field<double>(j, "epsilon", "dbn instance");
  spec.seed = j.value("seed", 0ULL);
  return spec;
}

inline ResolvedInstance resolve_instance(const json& j) {
  ResolvedInstance ri;
  const std::string type = get_field<std::string>(j, "type", "instance");
  if (type == "dbn") {
    DbnSpec spec = dbn_spec_from_json(j);
    const int horizon = get_field<int>(j, "horizon", "dbn instance");
    DbnInstance inst = generate_dbn_instance(spec, horizon);
    ri.model = std::move(inst.model);
    ri.hierarchy = std::move(inst.hierarchy);
    ri.obs = std::move(inst.obs);
    ri.epsilon = spec.epsilon;
    if (j.contains("hierarchy_cards")) {
      DbnSpec hspec = spec;
      hspec.cardinalities = j.at("hierarchy_cards").get<std::vector<int>>();
      hspec.num_vars = static_cast<int>(hspec.cardinalities.size());
      if (hspec.num_states() != spec.num_states())
        throw ValidationError(Err::ConfigError,
                              "hierarchy_cards state count differs from the instance");
      ri.hierarchy = hierarchy_from_dbn(hspec);
    }
  } else if (type == "cities") {
    CityInstance inst = generate_city_instance(j.value("seed", 0ULL));
    ri.model = std::move(inst.model);
    ri.hierarchy = std::move(inst.hierarchy);
    ri.obs = std::move(inst.obs);
  } else if (type == "files") {
    ri.model = load_model(get_field<std::string>(j, "model", "files instance"));
    if (j.contains("hierarchy"))
      ri.hierarchy = load_hierarchy(j.at("hierarchy").get<std::string>());
    else
      ri.hierarchy = AbstractionHierarchy::flat(ri.model.num_states);
    ri.obs = load_observations(get_field<std::string>(j, "obs", "files instance"));
  } else {
    throw ValidationError(Err::ConfigError, "unknown instance type \"" + type + "\"");
  }
  ri.log_model = validate_model(ri.model);
  validate_hierarchy(ri.hierarchy, ri.model.num_states);
  check_observations(ri.log_model, ri.obs);
  return ri;
}

}  // namespace detail

// Executes every run sequentially (decodes are single-threaded so wall
// times stay comparable) and hard-fails if two algorithms disagree on the
// log-likelihood of the same instance.
inline std::vector<BenchRow> run_benchmark(const BenchConfig& cfg) {
  std::map<std::string, detail::ResolvedInstance> instances;
  std::map<std::string, double> agreed;
  std::vector<BenchRow> rows;

  for (const BenchRunSpec& run : cfg.runs) {
    const std::string key = run.instance.dump();
    auto it = instances.find(key);
    if (it == instances.end())
      it = instances.emplace(key, detail::resolve_instance(run.instance)).first;
    detail::ResolvedInstance& inst = it->second;

    for (int rep = 0; rep < run.repetitions; ++rep) {
      DecodeResult res;
      std::string hierarchy_label_str = "flat";
      if (run.algorithm == "viterbi") {
        res = viterbi_decode(inst.log_model, inst.obs);
      } else if (run.algorithm == "cfdp") {
        res = cfdp_decode(inst.get_stack(), inst.hierarchy, inst.obs);
        hierarchy_label_str = hierarchy_label(inst.hierarchy);
      } else {
        TavOptions opts;
        opts.heuristic = run.heuristic;
        opts.presegments = run.presegments;
        res = tav_decode(inst.get_stack(), inst.hierarchy, inst.obs, opts);
        hierarchy_label_str = hierarchy_label(inst.hierarchy);
      }

      if (res.status == DecodeStatus::ok) {
        auto [ait, inserted] = agreed.emplace(key, res.log_likelihood);
        if (!inserted && std::abs(ait->second - res.log_likelihood) > 1e-9)
          throw InternalError(Err::AgreementFailure,
                              run.algorithm + " log-likelihood " +
                                  std::to_string(res.log_likelihood) + " differs from " +
                                  std::to_string(ait->second) + " on the same instance");
      }

      BenchRow row;
      row.algorithm = run.algorithm;
      row.num_states = inst.model.num_states;
      row.horizon = inst.obs.length();
      row.epsilon = inst.epsilon;
      row.hierarchy = hierarchy_label_str;
      row.heuristic =
          run.algorithm == "tav" ? (run.heuristic == Heuristic::cheap ? "cheap" : "viterbi") : "";
      row.presegments = run.algorithm == "tav" ? run.presegments : 0;
      row.loglik = res.log_likelihood;
      row.iterations = res.stats.iterations;
      row.cells = res.stats.cells_explored;
      row.wall_ms = res.stats.wall_time_ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "algorithm,N,T,epsilon,hierarchy,heuristic,presegments,loglik,iterations,cells,wall_ms\n";
  char buf[160];
  for (const BenchRow& r : rows) {
    out += r.algorithm;
    std::snprintf(buf, sizeof(buf), ",%d,%d,", r.num_states, r.horizon);
    out += buf;
    if (!std::isnan(r.epsilon)) {
      std::snprintf(buf, sizeof(buf), "%g", r.epsilon);
      out += buf;
    }
    out += "," + r.hierarchy + "," + r.heuristic + ",";
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%ld,%ld,%.3f", r.presegments, r.loglik,
                  r.iterations, r.cells, r.wall_ms);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace tav
