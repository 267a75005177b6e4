#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tav/exploration.hpp"
#include "tav/hierarchy.hpp"
#include "tav/model.hpp"

namespace tav {

using nlohmann::json;

namespace detail {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(Err::Io, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(Err::Io, path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError(Err::Io, "cannot open " + path + " for writing");
  out << content;
  if (!out) throw ValidationError(Err::Io, "failed writing " + path);
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw ValidationError(Err::Io, ctx + " is missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(Err::Io, ctx + " field \"" + key + "\": " + e.what());
  }
}

inline std::vector<double> flatten_matrix(const json& rows, int* nrows, int* ncols,
                                          const std::string& ctx) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ValidationError(Err::Io, ctx + " must be an array of rows");
  *nrows = static_cast<int>(rows.size());
  *ncols = static_cast<int>(rows[0].size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(*nrows) * *ncols);
  for (const json& row : rows) {
    if (static_cast<int>(row.size()) != *ncols)
      throw ValidationError(Err::Io, ctx + " has ragged rows");
    for (const json& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

inline json nest_matrix(const std::vector<double>& flat, int nrows, int ncols) {
  json rows = json::array();
  for (int i = 0; i < nrows; ++i) {
    json row = json::array();
    for (int j = 0; j < ncols; ++j) row.push_back(flat[static_cast<std::size_t>(i) * ncols + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline json model_to_json(const HmmModel& m) {
  return json{{"num_states", m.num_states},
              {"num_symbols", m.num_symbols},
              {"transition", detail::nest_matrix(m.transition, m.num_states, m.num_states)},
              {"emission", detail::nest_matrix(m.emission, m.num_states, m.num_symbols)},
              {"initial", m.initial}};
}

inline HmmModel model_from_json(const json& j) {
  HmmModel m;
  m.num_states = detail::get_field<int>(j, "num_states", "model");
  m.num_symbols = detail::get_field<int>(j, "num_symbols", "model");
  int r = 0, c = 0;
  m.transition = detail::flatten_matrix(j.at("transition"), &r, &c, "transition");
  if (r != m.num_states || c != m.num_states)
    throw ValidationError(Err::DimensionMismatch, "transition shape disagrees with num_states");
  m.emission = detail::flatten_matrix(j.at("emission"), &r, &c, "emission");
  if (r != m.num_states || c != m.num_symbols)
    throw ValidationError(Err::DimensionMismatch, "emission shape disagrees with declared sizes");
  m.initial = detail::get_field<std::vector<double>>(j, "initial", "model");
  if (static_cast<int>(m.initial.size()) != m.num_states)
    throw ValidationError(Err::DimensionMismatch, "initial length disagrees with num_states");
  return m;
}

inline void save_model(const std::string& path, const HmmModel& m) {
  detail::write_file(path, model_to_json(m).dump(2) + "\n");
}

inline HmmModel load_model(const std::string& path) {
  return model_from_json(detail::load_json_file(path));
}

inline json hierarchy_to_json(const AbstractionHierarchy& h) {
  return json{{"level_sizes", h.level_sizes()}, {"parent_maps", h.parent_maps()}};
}

inline AbstractionHierarchy hierarchy_from_json(const json& j) {
  auto sizes = detail::get_field<std::vector<std::int32_t>>(j, "level_sizes", "hierarchy");
  auto maps =
      detail::get_field<std::vector<std::vector<std::int32_t>>>(j, "parent_maps", "hierarchy");
  return AbstractionHierarchy(std::move(sizes), std::move(maps));
}

inline void save_hierarchy(const std::string& path, const AbstractionHierarchy& h) {
  detail::write_file(path, hierarchy_to_json(h).dump(2) + "\n");
}

inline AbstractionHierarchy load_hierarchy(const std::string& path) {
  return hierarchy_from_json(detail::load_json_file(path));
}

// Observation files are whitespace-separated 0-based symbols.
inline void save_observations(const std::string& path, const ObservationSequence& obs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < obs.symbols.size(); ++i) {
    if (i) out << (i % 20 == 0 ? '\n' : ' ');
    out << obs.symbols[i];
  }
  out << '\n';
  detail::write_file(path, out.str());
}

inline ObservationSequence load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(Err::Io, "cannot open " + path);
  ObservationSequence obs;
  long v;
  while (in >> v) {
    if (v < 0) throw ValidationError(Err::OutOfRange, "negative observation symbol in " + path);
    obs.symbols.push_back(static_cast<std::int32_t>(v));
  }
  if (!in.eof()) throw ValidationError(Err::Io, "non-integer token in " + path);
  return obs;
}

inline json result_to_json(const DecodeResult& r) {
  json stats{{"iterations", r.stats.iterations},
             {"links_created", r.stats.links_created},
             {"refinements_spatial", r.stats.refinements_spatial},
             {"refinements_temporal", r.stats.refinements_temporal},
             {"cells_explored", r.stats.cells_explored},
             {"wall_time_ms", r.stats.wall_time_ms}};
  json j{{"status", r.status == DecodeStatus::ok ? "ok" : "all_paths_impossible"},
         {"path", r.path},
         {"stats", std::move(stats)}};
  if (r.status == DecodeStatus::ok)
    j["log_likelihood"] = r.log_likelihood;
  else
    j["log_likelihood"] = nullptr;
  return j;
}

inline void save_result(const std::string& path, const DecodeResult& r) {
  detail::write_file(path, result_to_json(r).dump(2) + "\n");
}

inline DecodeResult result_from_json(const json& j) {
  DecodeResult r;
  const std::string status = detail::get_field<std::string>(j, "status", "result");
  r.status = status == "ok" ? DecodeStatus::ok : DecodeStatus::all_paths_impossible;
  r.path = detail::get_field<std::vector<std::int32_t>>(j, "path", "result");
  if (r.status == DecodeStatus::ok)
    r.log_likelihood = detail::get_field<double>(j, "log_likelihood", "result");
  return r;
}

inline DecodeResult load_result(const std::string& path) {
  return result_from_json(detail::load_json_file(path));
}

inline json record_to_json(const ExplorationRecord& rec) {
  json touched = json::array();
  for (const auto& col : rec.touched) {
    json c = json::array();
    for (const auto& [s, l] : col) c.push_back(json::array({s, l}));
    touched.push_back(std::move(c));
  }
  return json{{"num_states", rec.num_states}, {"touched", std::move(touched)}};
}

inline void save_record(const std::string& path, const ExplorationRecord& rec) {
  detail::write_file(path, record_to_json(rec).dump() + "\n");
}

inline ExplorationRecord record_from_json(const json& j) {
  ExplorationRecord rec;
  rec.num_states = detail::get_field<int>(j, "num_states", "record");
  const json& touched = j.at("touched");
  rec.touched.resize(touched.size());
  for (std::size_t t = 0; t < touched.size(); ++t)
    for (const json& pair : touched[t])
      rec.touched[t].emplace_back(pair.at(0).get<std::int32_t>(),
                                  pair.at(1).get<std::int32_t>());
  return rec;
}

inline ExplorationRecord load_record(const std::string& path) {
  return record_from_json(detail::load_json_file(path));
}

}  // namespace tav
