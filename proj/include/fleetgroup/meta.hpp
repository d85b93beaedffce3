#pragma once

// Scores a grouping by how well one model per group explains the merged
// member data: merge datasets, hold out a validation split, fit group
// models, and aggregate validation RMSE into the accuracy score
//   eta = 100 - sum_i |G_i| * e_i / N
// where |G_i| counts member entities. Sweeping the graph threshold produces
// the (k, best eta) accuracy curve whose elbow selects the group count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fleetgroup/community.hpp"
#include "fleetgroup/detail/numeric.hpp"
#include "fleetgroup/dissimilarity.hpp"
#include "fleetgroup/errors.hpp"
#include "fleetgroup/fleet.hpp"
#include "fleetgroup/regression.hpp"

namespace fleetgroup {

struct MemberSlice {
  std::string entity_id;
  std::size_t offset = 0;  // into MetaDataset::observations
  std::size_t count = 0;
};

// All member entities' observations of one detected group, concatenated in
// entity order then row order.
struct MetaDataset {
  int group_index = 0;
  std::vector<MemberSlice> members;
  std::vector<Observation> observations;
  std::size_t input_dim = 0;

  std::size_t unit_count() const noexcept { return members.size(); }
};

inline std::vector<MetaDataset> merge_groups(const FleetDataset& fleet,
                                             const CommunityPartition& partition) {
  const std::size_t n = fleet.entity_count();
  if (partition.assignment.size() != n)
    raise(Errc::length_mismatch, "partition covers " +
                                     std::to_string(partition.assignment.size()) +
                                     " entities, fleet has " + std::to_string(n));
  std::vector<MetaDataset> metas(static_cast<std::size_t>(partition.community_count));
  for (std::size_t g = 0; g < metas.size(); ++g) {
    metas[g].group_index = static_cast<int>(g);
    metas[g].input_dim = fleet.input_dim();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = fleet.entity(i);
    auto& meta = metas.at(static_cast<std::size_t>(partition.assignment[i]));
    meta.members.push_back({e.entity_id, meta.observations.size(), e.size()});
    meta.observations.insert(meta.observations.end(), e.observations.begin(),
                             e.observations.end());
  }
  return metas;
}

struct TrainValidation {
  std::vector<Observation> train;
  std::vector<Observation> validation;
};

// Stratified holdout: every member entity contributes floor(fraction * T_i)
// rows to training, clamped so both sides get at least one row when T_i >= 2.
// A single-row entity goes wholly to training. The selection is keyed on
// (seed, entity_id) only, so an entity's rows split identically no matter
// which group it lands in -- eta values stay comparable across partitions.
inline TrainValidation split_train_validation(const MetaDataset& meta, double fraction,
                                              std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    raise(Errc::invalid_config, "split fraction must lie in (0, 1)");
  TrainValidation out;
  for (const auto& member : meta.members) {
    const std::size_t t = member.count;
    std::vector<std::size_t> idx(t);
    for (std::size_t i = 0; i < t; ++i) idx[i] = i;
    std::mt19937_64 rng(detail::splitmix64(seed ^ detail::fnv1a64(member.entity_id)));
    detail::shuffle_indices(idx, rng);
    std::size_t n_train =
        t == 1 ? 1
               : std::clamp<std::size_t>(
                     static_cast<std::size_t>(std::floor(fraction * static_cast<double>(t))),
                     1, t - 1);
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    for (std::size_t i = 0; i < t; ++i) {
      const auto& obs = meta.observations[member.offset + idx[i]];
      (i < n_train ? out.train : out.validation).push_back(obs);
    }
  }
  if (out.validation.empty())
    raise(Errc::too_few_observations,
          "group " + std::to_string(meta.group_index) + " has no validation rows");
  return out;
}

struct GroupError {
  int group_index = 0;
  std::size_t unit_count = 0;
  double validation_rmse = 0.0;
};

struct MetaAccuracy {
  double eta = 0.0;
  std::vector<GroupError> per_group;
  // Eta mixes a percentage with an RMSE in y units; it goes negative when
  // group errors exceed the fleet size. Flagged rather than rescaled.
  bool scale_warning = false;
};

inline MetaAccuracy meta_accuracy(const FleetDataset& fleet, const CommunityPartition& partition,
                                  BasisSpec basis, double fraction, std::uint64_t seed) {
  MetaAccuracy out;
  double weighted = 0.0;
  for (const auto& meta : merge_groups(fleet, partition)) {
    TrainValidation tv = split_train_validation(meta, fraction, seed);
    RegressionModel g = fit_observations(tv.train, meta.input_dim, basis,
                                         "group " + std::to_string(meta.group_index));
    double e = rse(g, tv.validation);
    out.per_group.push_back({meta.group_index, meta.unit_count(), e});
    weighted += static_cast<double>(meta.unit_count()) * e;
  }
  out.eta = 100.0 - weighted / static_cast<double>(fleet.entity_count());
  out.scale_warning = out.eta < 0.0;
  return out;
}

struct SweepConfig {
  int quantiles = 40;           // lambda grid size over off-diagonal dissimilarities
  double split_fraction = 0.7;  // training share of each group dataset
  std::uint64_t seed = 1;
  // Explicit grid override; when absent the quantile grid is used, with one
  // extra point below the smallest dissimilarity so the edgeless graph
  // (every entity its own group) is reachable.
  std::optional<std::vector<double>> lambdas;
};

struct SweepRecord {
  double lambda = 0.0;
  int k = 0;
  CommunityPartition partition;
  double eta = std::numeric_limits<double>::quiet_NaN();
  std::vector<GroupError> per_group;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRecord> records;               // ordered by lambda
  std::map<int, std::size_t> best_per_k;          // k -> index of max-eta record
};

// Quantile grid over the off-diagonal entries of R': every distinct
// threshold graph in the family stays reachable, and each grid point is
// nudged up by 1e-12 so values tied with the quantile land inside the edge
// set.
inline std::vector<double> lambda_grid(const DissimilarityMatrix& dis, int quantiles,
                                       bool include_edgeless = true) {
  if (quantiles < 1) raise(Errc::invalid_config, "quantile count must be >= 1");
  const std::size_t n = dis.values.size();
  std::vector<double> vals;
  vals.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) vals.push_back(dis.values(i, j));
  if (vals.empty()) raise(Errc::single_entity, "dissimilarity matrix is smaller than 2x2");
  std::sort(vals.begin(), vals.end());

  std::vector<double> grid;
  if (include_edgeless)
    grid.push_back(std::nextafter(vals.front(), -std::numeric_limits<double>::infinity()));
  const std::size_t m = vals.size();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int q = 1; q <= quantiles; ++q) {
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(q) * static_cast<double>(m) / quantiles));
    rank = std::clamp<std::size_t>(rank, 1, m);
    double v = vals[rank - 1];
    if (v == prev) continue;  // deduplicate ties across quantile levels
    prev = v;
    grid.push_back(v + 1e-12);
  }
  return grid;
}

// Evaluates the full pipeline once per grid threshold. A group-level failure
// (for instance an underdetermined meta-model) marks that record failed and
// the sweep continues.
inline SweepResult lambda_sweep(const FleetDataset& fleet, const DissimilarityMatrix& dis,
                                BasisSpec basis, const SweepConfig& config = {}) {
  std::vector<double> grid =
      config.lambdas ? *config.lambdas : lambda_grid(dis, config.quantiles);
  std::sort(grid.begin(), grid.end());

  SweepResult result;
  for (double lambda : grid) {
    SweepRecord rec;
    rec.lambda = lambda;
    try {
      AdjacencyGraph graph = threshold_graph(dis, lambda);
      rec.partition = detect_communities(graph);
      rec.k = rec.partition.community_count;
      MetaAccuracy acc =
          meta_accuracy(fleet, rec.partition, basis, config.split_fraction, config.seed);
      rec.eta = acc.eta;
      rec.per_group = std::move(acc.per_group);
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    result.records.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    if (rec.failed) continue;
    auto it = result.best_per_k.find(rec.k);
    if (it == result.best_per_k.end() || rec.eta > result.records[it->second].eta)
      result.best_per_k[rec.k] = i;
  }
  return result;
}

enum class Grouping { clear_grouping, fuzzy_grouping, no_grouping };

inline const char* grouping_name(Grouping g) noexcept {
  switch (g) {
    case Grouping::clear_grouping: return "clear_grouping";
    case Grouping::fuzzy_grouping: return "fuzzy_grouping";
    case Grouping::no_grouping: return "no_grouping";
  }
  return "?";
}

struct ElbowConfig {
  double clear_threshold = 0.5;   // curvature at or above: clear grouping
  double fuzzy_threshold = 0.15;  // curvature at or above: fuzzy grouping
  // Candidate elbows must be preceded by a slope of at least this fraction
  // of the curve's total rise (per unit k); filters flat-tail noise.
  double min_slope_fraction = 0.05;
};

struct ElbowReport {
  Grouping verdict = Grouping::no_grouping;
  std::optional<int> k_star;
  double curvature_score = 0.0;  // in [0, 1]
};

struct CurvePoint {
  int k = 0;
  double eta = 0.0;
};

// The accuracy plot: best eta per observed community count, ascending k.
inline std::vector<CurvePoint> accuracy_curve(const SweepResult& sweep) {
  std::vector<CurvePoint> curve;
  curve.reserve(sweep.best_per_k.size());
  for (const auto& [k, idx] : sweep.best_per_k)
    curve.push_back({k, sweep.records[idx].eta});
  return curve;
}

// Elbow of the accuracy curve: the point where a steep rise collapses into a
// flat tail. Each interior point j is scored by
//   q_j = (pre_j - rest_j) / (pre_j + rest_j)
// where pre_j is the slope into the point (per unit k) and rest_j is the
// total rise still ahead of it. q is near 1 when the curve levels off at j
// and near 0 when as much rise remains after j as arrived at it, which is
// what smooth no-structure curves look like at every point.
inline ElbowReport find_elbow(std::span<const CurvePoint> curve, ElbowConfig config = {}) {
  if (curve.size() < 3)
    raise(Errc::too_few_points, "accuracy curve has " + std::to_string(curve.size()) +
                                    " points, elbow detection needs 3");
  for (std::size_t j = 1; j < curve.size(); ++j)
    if (curve[j].k <= curve[j - 1].k)
      raise(Errc::invalid_config, "accuracy curve must be strictly increasing in k");

  double lo = curve[0].eta, hi = curve[0].eta;
  for (const auto& pt : curve) {
    lo = std::min(lo, pt.eta);
    hi = std::max(hi, pt.eta);
  }
  const double range = hi - lo;
  ElbowReport report;
  if (!(range > 1e-9)) return report;  // flat curve: nothing to group

  // Rise still ahead of point j: toward the highest later point, so a dip
  // after j does not mask remaining structure.
  std::vector<double> ahead(curve.size(), 0.0);
  double peak = curve.back().eta;
  for (std::size_t j = curve.size(); j-- > 0;) {
    ahead[j] = std::max(0.0, peak - curve[j].eta);
    peak = std::max(peak, curve[j].eta);
  }

  double best_q = 0.0;
  int best_k = 0;
  for (std::size_t j = 1; j + 1 < curve.size(); ++j) {
    double pre = (curve[j].eta - curve[j - 1].eta) /
                 static_cast<double>(curve[j].k - curve[j - 1].k);
    if (pre < config.min_slope_fraction * range) continue;
    double q = (pre - ahead[j]) / (pre + ahead[j]);
    if (q > best_q) {
      best_q = q;
      best_k = curve[j].k;
    }
  }

  report.curvature_score = std::clamp(best_q, 0.0, 1.0);
  if (report.curvature_score >= config.clear_threshold) {
    report.verdict = Grouping::clear_grouping;
    report.k_star = best_k;
  } else if (report.curvature_score >= config.fuzzy_threshold) {
    report.verdict = Grouping::fuzzy_grouping;
    report.k_star = best_k;
  }
  return report;
}

inline ElbowReport find_elbow(const SweepResult& sweep, ElbowConfig config = {}) {
  auto curve = accuracy_curve(sweep);
  return find_elbow(std::span<const CurvePoint>(curve), config);
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "lambda,k,eta,failed\n";
  for (const auto& rec : sweep.records) {
    os << detail::format_double(rec.lambda) << ',' << rec.k << ',';
    if (!rec.failed) os << detail::format_double(rec.eta);
    os << ',' << (rec.failed ? 1 : 0) << '\n';
  }
}

inline void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "k,eta\n";
  for (const auto& pt : curve)
    os << pt.k << ',' << detail::format_double(pt.eta) << '\n';
}

}  // namespace fleetgroup
