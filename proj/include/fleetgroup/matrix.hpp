#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fleetgroup/detail/numeric.hpp"
#include "fleetgroup/errors.hpp"

namespace fleetgroup {

// Dense row-major square matrix. Fleets in scope are a few thousand entities
// at most, so no sparse storage.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0)
      : n_(n), values_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  std::span<const double> data() const noexcept { return values_; }

  bool is_symmetric(double tol = 0.0) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Writes a labeled matrix as CSV: first row/column carry the labels, the
// top-left cell is empty.
inline void write_matrix_csv(std::ostream& os, const SquareMatrix& m,
                             std::span<const std::string> labels) {
  if (labels.size() != m.size())
    raise(Errc::length_mismatch, "matrix has " + std::to_string(m.size()) +
                                     " rows but " + std::to_string(labels.size()) +
                                     " labels");
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << labels[i];
    for (std::size_t j = 0; j < m.size(); ++j)
      os << ',' << detail::format_double(m(i, j));
    os << '\n';
  }
}

}  // namespace fleetgroup
