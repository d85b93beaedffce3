#pragma once

// Partition agreement scoring, used to check detected groups against known
// generator labels.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "fleetgroup/errors.hpp"

namespace fleetgroup {

// Adjusted Rand index between two labelings: 1 for identical partitions,
// ~0 for chance-level agreement. When the expected index equals the maximum
// (both partitions trivial the same way) the score is 1 by convention.
inline double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    raise(Errc::length_mismatch, "labelings have lengths " + std::to_string(a.size()) +
                                     " and " + std::to_string(b.size()));
  const std::size_t n = a.size();
  if (n < 2) raise(Errc::too_few_observations, "ARI needs at least 2 items");

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }
  auto choose2 = [](double c) { return c * (c - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_row = 0.0, sum_col = 0.0;
  for (const auto& [key, c] : joint) sum_joint += choose2(c);
  for (const auto& [key, c] : row) sum_row += choose2(c);
  for (const auto& [key, c] : col) sum_col += choose2(c);

  double total = choose2(static_cast<double>(n));
  double expected = sum_row * sum_col / total;
  double maximum = 0.5 * (sum_row + sum_col);
  if (maximum == expected) return 1.0;
  return (sum_joint - expected) / (maximum - expected);
}

}  // namespace fleetgroup
