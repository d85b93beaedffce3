#pragma once

// Community detection on the threshold graph via the leading-eigenvector
// method: build the modularity matrix B = A - P (P from the configuration
// model), bisect on the sign pattern of B's most positive eigenvector, and
// recurse with the generalized subgroup matrix while each split strictly
// increases total modularity.
//
// The eigenpair comes from power iteration on B + sigma*I with
// sigma = max_i sum_j |B_ij|. The shift bounds the spectrum into [0, 2*sigma],
// so the most positive eigenvalue of B becomes the dominant eigenvalue of the
// shifted matrix and iteration needs no deflation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fleetgroup/dissimilarity.hpp"
#include "fleetgroup/errors.hpp"
#include "fleetgroup/matrix.hpp"

namespace fleetgroup {

struct ModularityMatrix {
  SquareMatrix values;
};

struct CommunityPartition {
  std::vector<int> assignment;  // community index per vertex, 0..k-1, each used
  int community_count = 0;
  double modularity_q = 0.0;
};

inline ModularityMatrix modularity_matrix(const AdjacencyGraph& graph) {
  const std::size_t n = graph.size();
  const double two_m = 2.0 * static_cast<double>(graph.edge_count());
  if (two_m == 0.0) raise(Errc::empty_graph, "modularity matrix of an edgeless graph");
  std::vector<double> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = static_cast<double>(graph.degree(i));
  ModularityMatrix b{SquareMatrix(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b.values(i, j) = (graph.edge(i, j) ? 1.0 : 0.0) - degree[i] * degree[j] / two_m;
  return b;
}

// Newman's Q for an arbitrary labeling; 0 for the all-in-one partition.
inline double modularity(const AdjacencyGraph& graph, std::span<const int> assignment) {
  const std::size_t n = graph.size();
  if (assignment.size() != n)
    raise(Errc::length_mismatch, "assignment length " + std::to_string(assignment.size()) +
                                     " for graph of size " + std::to_string(n));
  const double two_m = 2.0 * static_cast<double>(graph.edge_count());
  if (two_m == 0.0) raise(Errc::empty_graph, "modularity of an edgeless graph");
  std::vector<double> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = static_cast<double>(graph.degree(i));
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (assignment[i] == assignment[j])
        q += (graph.edge(i, j) ? 1.0 : 0.0) - degree[i] * degree[j] / two_m;
  return q / two_m;
}

struct PowerIterationOptions {
  double convergence_tol = 1e-10;  // max-norm gap between successive iterates
  double positivity_tol = 1e-9;    // eigenvalue counts as positive above positivity_tol * sigma
  double zero_entry_tol = 1e-12;   // |v_i| below this joins the positive side
};

struct LeadingEigen {
  double value = 0.0;
  std::vector<double> vector;
  std::size_t iterations = 0;
};

// Most positive eigenpair of a symmetric matrix. Deterministic: fixed start
// pattern, and a single fixed perturbation if the iterate stalls (start
// orthogonal to the dominant eigenspace, or a zero image).
inline LeadingEigen leading_eigenpair(const SquareMatrix& sym,
                                      PowerIterationOptions opts = {}) {
  const std::size_t n = sym.size();
  if (n == 0) raise(Errc::invalid_config, "eigenpair of an empty matrix");

  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(sym(i, j));
    sigma = std::max(sigma, row);
  }
  if (sigma == 0.0) {
    std::vector<double> flat(n, 1.0 / std::sqrt(static_cast<double>(n)));
    return {0.0, std::move(flat), 0};
  }

  std::vector<double> v(n), w(n);
  auto renormalize = [](std::vector<double>& x) {
    double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    for (double& e : x) e /= norm;
  };
  // Fixed index-based start pattern instead of a random vector, so repeated
  // runs are bit-identical.
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i % 3) / 10.0;
  renormalize(v);

  const std::size_t cap = 100 * n + 10000;
  bool perturbed = false;
  for (std::size_t it = 1; it <= cap; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = sigma * v[i];
      for (std::size_t j = 0; j < n; ++j) s += sym(i, j) * v[j];
      w[i] = s;
    }
    double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    bool stalled = !(norm > sigma * 1e-14);
    if (!stalled) {
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] /= norm;
        diff = std::max(diff, std::abs(w[i] - v[i]));
      }
      v.swap(w);
      if (diff < opts.convergence_tol) return {norm - sigma, std::move(v), it};
    }
    if ((stalled || it == cap / 2) && !perturbed) {
      // Stagnation: the iterate sits in (or keeps drifting near) an invariant
      // subspace away from the dominant one. One deterministic nudge.
      v[0] += 1e-3;
      renormalize(v);
      perturbed = true;
    } else if (stalled) {
      raise(Errc::convergence_failure, "power iteration collapsed to the zero vector");
    }
  }
  raise(Errc::convergence_failure,
        "power iteration did not converge within " + std::to_string(cap) + " iterations");
}

// Sign bisection of a vertex group given its (generalized) modularity matrix.
// Returns +/-1 per vertex, or nothing when the leading eigenvalue is not
// positive or all entries share one sign -- no community structure to exploit.
inline std::optional<std::vector<int>> leading_eigenvector_split(
    const SquareMatrix& group_b, PowerIterationOptions opts = {}) {
  const std::size_t n = group_b.size();
  if (n < 2) raise(Errc::invalid_config, "cannot split a group of size " + std::to_string(n));

  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(group_b(i, j));
    sigma = std::max(sigma, row);
  }
  if (sigma == 0.0) return std::nullopt;

  LeadingEigen lead = leading_eigenpair(group_b, opts);
  if (!(lead.value > opts.positivity_tol * sigma)) return std::nullopt;

  std::vector<int> signs(n);
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = lead.vector[i] <= -opts.zero_entry_tol ? -1 : 1;
    (signs[i] > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) return std::nullopt;
  return signs;
}

// Generalized modularity matrix of a vertex subset g:
//   B(g)_ab = B_ab - delta_ab * sum_{l in g} B_al
// Rows of B(g) sum to zero, like the full matrix's.
inline SquareMatrix group_modularity_submatrix(const ModularityMatrix& b,
                                               std::span<const std::size_t> group) {
  const std::size_t k = group.size();
  SquareMatrix sub(k);
  for (std::size_t a = 0; a < k; ++a) {
    double row_sum = 0.0;
    for (std::size_t l = 0; l < k; ++l) row_sum += b.values(group[a], group[l]);
    for (std::size_t c = 0; c < k; ++c)
      sub(a, c) = b.values(group[a], group[c]) - (a == c ? row_sum : 0.0);
  }
  return sub;
}

// One accepted bisection during detection, for audit logs.
struct SplitStep {
  std::vector<std::size_t> group;
  double delta_q;
};

struct DetectTrace {
  std::vector<SplitStep> accepted;
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

inline constexpr double kDeltaQTolerance = 1e-12;

// Full pipeline: isolated vertices become singletons, every connected
// component with edges is bisected recursively, and a bisection is kept only
// when it strictly increases total Q. Community indices are contiguous,
// ordered by each community's smallest vertex. An edgeless graph yields all
// singletons with Q = 0 by convention (Q is otherwise undefined at m = 0).
inline CommunityPartition detect_communities(const AdjacencyGraph& graph,
                                             DetectTrace* trace = nullptr,
                                             PowerIterationOptions opts = {}) {
  const std::size_t n = graph.size();
  CommunityPartition out;
  out.assignment.resize(n);
  if (n == 0) return out;

  const std::size_t m = graph.edge_count();
  if (m == 0) {
    std::iota(out.assignment.begin(), out.assignment.end(), 0);
    out.community_count = static_cast<int>(n);
    out.modularity_q = 0.0;
    return out;
  }

  ModularityMatrix b = modularity_matrix(graph);
  const double two_m = 2.0 * static_cast<double>(m);
  // Sum of B over a vertex group; total Q is (1/2m) * sum over groups.
  auto group_sum = [&](std::span<const std::size_t> g) {
    double s = 0.0;
    for (std::size_t a : g)
      for (std::size_t c : g) s += b.values(a, c);
    return s;
  };

  detail::UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (graph.edge(i, j)) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> components(n);
  for (std::size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);

  std::vector<std::vector<std::size_t>> final_groups;
  std::vector<std::vector<std::size_t>> work;
  for (auto& comp : components)
    if (!comp.empty()) work.push_back(std::move(comp));

  while (!work.empty()) {
    std::vector<std::size_t> g = std::move(work.back());
    work.pop_back();
    if (g.size() < 2) {
      final_groups.push_back(std::move(g));
      continue;
    }
    SquareMatrix bg = group_modularity_submatrix(b, g);
    auto signs = leading_eigenvector_split(bg, opts);
    if (!signs) {
      final_groups.push_back(std::move(g));
      continue;
    }
    std::vector<std::size_t> plus, minus;
    for (std::size_t a = 0; a < g.size(); ++a)
      ((*signs)[a] > 0 ? plus : minus).push_back(g[a]);
    double delta_q = (group_sum(plus) + group_sum(minus) - group_sum(g)) / two_m;
    if (delta_q <= kDeltaQTolerance) {
      final_groups.push_back(std::move(g));
      continue;
    }
    if (trace) trace->accepted.push_back({g, delta_q});
    work.push_back(std::move(minus));
    work.push_back(std::move(plus));
  }

  std::sort(final_groups.begin(), final_groups.end(),
            [](const auto& a, const auto& c) { return a.front() < c.front(); });
  for (std::size_t idx = 0; idx < final_groups.size(); ++idx)
    for (std::size_t v : final_groups[idx]) out.assignment[v] = static_cast<int>(idx);
  out.community_count = static_cast<int>(final_groups.size());
  out.modularity_q = modularity(graph, out.assignment);
  return out;
}

inline void write_partition_csv(std::ostream& os, std::span<const std::string> entity_ids,
                                const CommunityPartition& partition) {
  if (entity_ids.size() != partition.assignment.size())
    raise(Errc::length_mismatch, "entity ids and assignment differ in length");
  os << "entity_id,community_index\n";
  for (std::size_t i = 0; i < entity_ids.size(); ++i)
    os << entity_ids[i] << ',' << partition.assignment[i] << '\n';
}

// Edge list for external graph viewers; pair with write_partition_csv output.
inline void write_edge_list_csv(std::ostream& os, const AdjacencyGraph& graph,
                                std::span<const std::string> entity_ids) {
  if (entity_ids.size() != graph.size())
    raise(Errc::length_mismatch, "entity ids and graph differ in length");
  os << "source,target\n";
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = i + 1; j < graph.size(); ++j)
      if (graph.edge(i, j)) os << entity_ids[i] << ',' << entity_ids[j] << '\n';
}

}  // namespace fleetgroup
