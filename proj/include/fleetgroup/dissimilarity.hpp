#pragma once

// Cross-validation error matrix between entity models and entity datasets,
// its symmetrized form, and the family of threshold graphs derived from it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fleetgroup/errors.hpp"
#include "fleetgroup/fleet.hpp"
#include "fleetgroup/matrix.hpp"
#include "fleetgroup/regression.hpp"

namespace fleetgroup {

// r[i][j] = RSE of entity i's model evaluated on entity j's dataset. The
// diagonal reproduces each model's training RSE.
struct RawCrossMatrix {
  SquareMatrix values;
  std::vector<std::string> entity_ids;
};

// Symmetrized cross matrix (R + R^T) / 2; the fleet's dissimilarity measure.
struct DissimilarityMatrix {
  SquareMatrix values;
  std::vector<std::string> entity_ids;
};

// Simple undirected graph: edge between i and j iff their dissimilarity is
// at or below the threshold. Self-loops are removed.
class AdjacencyGraph {
 public:
  AdjacencyGraph(std::size_t n, double lambda)
      : n_(n), lambda_(lambda), bits_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  double lambda() const noexcept { return lambda_; }

  bool edge(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }

  void set_edge(std::size_t i, std::size_t j) {
    if (i == j) return;
    bits_[i * n_ + j] = 1;
    bits_[j * n_ + i] = 1;
  }

  std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < n_; ++j) d += bits_[i * n_ + j];
    return d;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (std::uint8_t b : bits_) twice += b;
    return twice / 2;
  }

 private:
  std::size_t n_;
  double lambda_;
  std::vector<std::uint8_t> bits_;
};

inline RawCrossMatrix cross_rse_matrix(std::span<const RegressionModel> models,
                                       const FleetDataset& fleet) {
  const std::size_t n = fleet.entity_count();
  if (models.size() != n)
    raise(Errc::length_mismatch, std::to_string(models.size()) + " models for " +
                                     std::to_string(n) + " entities");
  RawCrossMatrix out{SquareMatrix(n), fleet.entity_ids()};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.values(i, j) = rse(models[i], fleet.entity(j));
  return out;
}

inline DissimilarityMatrix symmetrize(const RawCrossMatrix& raw) {
  const std::size_t n = raw.values.size();
  DissimilarityMatrix out{SquareMatrix(n), raw.entity_ids};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.values(i, j) = 0.5 * (raw.values(i, j) + raw.values(j, i));
  return out;
}

// Edge present when r'[i][j] <= lambda; equality keeps the edge (the step
// function is 1 at zero).
inline AdjacencyGraph threshold_graph(const DissimilarityMatrix& dis, double lambda) {
  if (!std::isfinite(lambda))
    raise(Errc::invalid_config, "threshold lambda must be finite");
  const std::size_t n = dis.values.size();
  AdjacencyGraph g(n, lambda);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dis.values(i, j) <= lambda) g.set_edge(i, j);
  return g;
}

}  // namespace fleetgroup
