#pragma once

// Fleet data model: one dataset of (x, y) observations per monitored entity.
// Ingestion is CSV only; schema is a header row naming entity_id, x1..xp, y
// in any column order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fleetgroup/detail/numeric.hpp"
#include "fleetgroup/errors.hpp"

namespace fleetgroup {

struct Observation {
  std::vector<double> x;
  double y = 0.0;
};

struct EntityDataset {
  std::string entity_id;
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  std::size_t input_dim() const noexcept {
    return observations.empty() ? 0 : observations.front().x.size();
  }
};

// Immutable after construction; safe to share read-only across threads.
class FleetDataset {
 public:
  // Validates the structural invariants: at least two entities, unique ids,
  // every observation of every entity with the same input dimension, and no
  // empty entity. Finiteness is checked at CSV ingestion (hard error there)
  // and reported by validate_fleet for programmatic fleets.
  static FleetDataset from_entities(std::vector<EntityDataset> entities) {
    if (entities.size() < 2)
      raise(Errc::single_entity,
            "fleet needs at least 2 entities, got " + std::to_string(entities.size()));
    std::size_t p = 0;
    std::unordered_map<std::string_view, std::size_t> seen;
    for (const auto& e : entities) {
      if (e.observations.empty())
        raise(Errc::too_few_observations, "entity '" + e.entity_id + "' has no observations");
      if (!seen.emplace(e.entity_id, seen.size()).second)
        raise(Errc::invalid_config, "duplicate entity id '" + e.entity_id + "'");
      for (const auto& obs : e.observations) {
        if (p == 0) p = obs.x.size();
        if (obs.x.size() != p)
          raise(Errc::dimension_mismatch,
                "entity '" + e.entity_id + "' mixes input dimensions");
      }
    }
    if (p == 0) raise(Errc::missing_column, "fleet has no input columns");
    return FleetDataset(std::move(entities), p);
  }

  std::size_t entity_count() const noexcept { return entities_.size(); }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::span<const EntityDataset> entities() const noexcept { return entities_; }
  const EntityDataset& entity(std::size_t i) const { return entities_[i]; }

  std::vector<std::string> entity_ids() const {
    std::vector<std::string> ids;
    ids.reserve(entities_.size());
    for (const auto& e : entities_) ids.push_back(e.entity_id);
    return ids;
  }

  std::size_t total_observations() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entities_) n += e.size();
    return n;
  }

 private:
  FleetDataset(std::vector<EntityDataset> entities, std::size_t p)
      : entities_(std::move(entities)), input_dim_(p) {}

  std::vector<EntityDataset> entities_;
  std::size_t input_dim_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Loads a fleet from CSV. Rows are grouped by entity_id in first-appearance
// order; row order within an entity is preserved exactly. Any non-numeric or
// non-finite cell is a hard error, never silently dropped.
inline FleetDataset load_fleet_csv(std::istream& is, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) raise(Errc::empty_file, source + " is empty");

  auto header = detail::split_csv_line(detail::trim(line));
  long id_col = -1, y_col = -1;
  std::vector<long> x_cols;  // x_cols[j] = column index of x{j+1}
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto name = detail::trim(header[c]);
    if (name == "entity_id") {
      id_col = static_cast<long>(c);
    } else if (name == "y") {
      y_col = static_cast<long>(c);
    } else if (name.size() >= 2 && name.size() <= 8 && name.front() == 'x') {
      std::size_t k = 0;
      bool numeric = name[1] != '0';
      for (std::size_t i = 1; i < name.size() && numeric; ++i)
        numeric = name[i] >= '0' && name[i] <= '9';
      if (numeric) {
        k = static_cast<std::size_t>(std::stoul(std::string(name.substr(1))));
        if (x_cols.size() < k) x_cols.resize(k, -1);
        x_cols[k - 1] = static_cast<long>(c);
        continue;
      }
      raise(Errc::missing_column, source + ": unexpected column '" + std::string(name) +
                                      "' (schema is entity_id,x1..xp,y)");
    } else {
      raise(Errc::missing_column, source + ": unexpected column '" + std::string(name) +
                                      "' (schema is entity_id,x1..xp,y)");
    }
  }
  if (id_col < 0) raise(Errc::missing_column, source + ": missing column 'entity_id'");
  if (y_col < 0) raise(Errc::missing_column, source + ": missing column 'y'");
  if (x_cols.empty()) raise(Errc::missing_column, source + ": missing column 'x1'");
  for (std::size_t j = 0; j < x_cols.size(); ++j)
    if (x_cols[j] < 0)
      raise(Errc::missing_column, source + ": missing column 'x" + std::to_string(j + 1) + "'");

  const std::size_t p = x_cols.size();
  std::vector<EntityDataset> entities;
  std::unordered_map<std::string, std::size_t> index_of;
  std::size_t row = 1;  // header was row 1
  bool any_data = false;
  while (std::getline(is, line)) {
    ++row;
    auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    auto fields = detail::split_csv_line(trimmed);
    if (fields.size() != header.size())
      raise(Errc::non_numeric_cell, source + " row " + std::to_string(row) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    any_data = true;

    Observation obs;
    obs.x.resize(p);
    auto parse_cell = [&](long col, double& out) {
      if (!detail::parse_double(detail::trim(fields[static_cast<std::size_t>(col)]), out) ||
          !std::isfinite(out))
        raise(Errc::non_numeric_cell,
              source + " row " + std::to_string(row) + ": cell '" +
                  std::string(detail::trim(fields[static_cast<std::size_t>(col)])) +
                  "' in column '" + std::string(detail::trim(header[static_cast<std::size_t>(col)])) +
                  "' is not a finite number");
    };
    for (std::size_t j = 0; j < p; ++j) parse_cell(x_cols[j], obs.x[j]);
    parse_cell(y_col, obs.y);

    std::string id(detail::trim(fields[static_cast<std::size_t>(id_col)]));
    auto [it, inserted] = index_of.emplace(id, entities.size());
    if (inserted) entities.push_back(EntityDataset{std::move(id), {}});
    entities[it->second].observations.push_back(std::move(obs));
  }
  if (!any_data) raise(Errc::empty_file, source + " has no data rows");
  if (entities.size() < 2)
    raise(Errc::single_entity,
          source + " contains a single entity ('" + entities.front().entity_id + "')");
  return FleetDataset::from_entities(std::move(entities));
}

inline FleetDataset load_fleet_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) raise(Errc::io_failure, "cannot open '" + path + "'");
  return load_fleet_csv(f, path);
}

inline void save_fleet_csv(std::ostream& os, const FleetDataset& fleet) {
  os << "entity_id";
  for (std::size_t j = 1; j <= fleet.input_dim(); ++j) os << ",x" << j;
  os << ",y\n";
  for (const auto& e : fleet.entities()) {
    for (const auto& obs : e.observations) {
      os << e.entity_id;
      for (double v : obs.x) os << ',' << detail::format_double(v);
      os << ',' << detail::format_double(obs.y) << '\n';
    }
  }
}

inline void save_fleet_csv(const std::string& path, const FleetDataset& fleet) {
  std::ofstream f(path);
  if (!f) raise(Errc::io_failure, "cannot open '" + path + "' for writing");
  save_fleet_csv(f, fleet);
}

}  // namespace fleetgroup
