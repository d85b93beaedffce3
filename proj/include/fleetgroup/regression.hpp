#pragma once

// Per-entity behavior models: ordinary least squares on a polynomial basis,
// plus the residual standard error used throughout as the accuracy and
// dissimilarity measure. The RSE divisor is the sample count T, not T - m,
// so values stay comparable across entities with different history lengths.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fleetgroup/errors.hpp"
#include "fleetgroup/fleet.hpp"

namespace fleetgroup {

// Polynomial basis without cross terms: [1, x_1..x_p, x_1^2..x_p^2, ...].
// For p = 1 this is the usual [1, x, x^2, ..., x^d]; for degree 1 it is the
// linear-with-intercept basis [1, x_1, ..., x_p].
struct BasisSpec {
  int degree = 1;

  std::size_t coefficient_count(std::size_t input_dim) const {
    if (degree < 0) raise(Errc::invalid_config, "basis degree must be >= 0");
    return input_dim * static_cast<std::size_t>(degree) + 1;
  }
};

struct RegressionModel {
  BasisSpec basis;
  std::size_t input_dim = 0;
  std::vector<double> coefficients;  // [intercept | degree 1 block | degree 2 block | ...]
  double training_rse = 0.0;
};

inline double predict(const RegressionModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim)
    raise(Errc::dimension_mismatch, "input has dimension " + std::to_string(x.size()) +
                                        ", model expects " + std::to_string(model.input_dim));
  const std::size_t p = model.input_dim;
  double sum = model.coefficients[0];
  for (std::size_t j = 0; j < p; ++j) {
    double power = x[j];
    for (int e = 1; e <= model.basis.degree; ++e) {
      sum += model.coefficients[1 + static_cast<std::size_t>(e - 1) * p + j] * power;
      power *= x[j];
    }
  }
  return sum;
}

inline double rse(const RegressionModel& model, std::span<const Observation> observations) {
  if (observations.empty())
    raise(Errc::empty_validation, "RSE over an empty observation set");
  double sum_sq = 0.0;
  for (const auto& obs : observations) {
    double r = obs.y - predict(model, obs.x);
    sum_sq += r * r;
  }
  return std::sqrt(sum_sq / static_cast<double>(observations.size()));
}

inline double rse(const RegressionModel& model, const EntityDataset& data) {
  return rse(model, std::span<const Observation>(data.observations));
}

namespace detail {

// Pivots smaller than rank_tolerance times the largest column norm are
// treated as zero when deciding rank.
inline constexpr double kRankTolerance = 1e-10;

inline Eigen::MatrixXd design_matrix(std::span<const Observation> observations,
                                     std::size_t input_dim, BasisSpec basis) {
  const std::size_t m = basis.coefficient_count(input_dim);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(observations.size()),
                    static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < observations.size(); ++t) {
    const auto& x = observations[t].x;
    if (x.size() != input_dim)
      raise(Errc::dimension_mismatch, "observation " + std::to_string(t) +
                                          " has dimension " + std::to_string(x.size()) +
                                          ", expected " + std::to_string(input_dim));
    auto row = static_cast<Eigen::Index>(t);
    X(row, 0) = 1.0;
    for (std::size_t j = 0; j < input_dim; ++j) {
      double power = x[j];
      for (int e = 1; e <= basis.degree; ++e) {
        X(row, static_cast<Eigen::Index>(1 + static_cast<std::size_t>(e - 1) * input_dim + j)) =
            power;
        power *= x[j];
      }
    }
  }
  return X;
}

}  // namespace detail

// Least-squares fit over an observation span. Column-pivoted Householder QR
// keeps the solve stable when x values cluster.
inline RegressionModel fit_observations(std::span<const Observation> observations,
                                        std::size_t input_dim, BasisSpec basis,
                                        const std::string& what = "dataset") {
  const std::size_t m = basis.coefficient_count(input_dim);
  if (observations.size() < m)
    raise(Errc::underdetermined, what + " has " + std::to_string(observations.size()) +
                                     " observations, basis needs " + std::to_string(m));
  Eigen::MatrixXd X = detail::design_matrix(observations, input_dim, basis);
  Eigen::VectorXd y(static_cast<Eigen::Index>(observations.size()));
  for (std::size_t t = 0; t < observations.size(); ++t)
    y(static_cast<Eigen::Index>(t)) = observations[t].y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(detail::kRankTolerance);
  if (static_cast<std::size_t>(qr.rank()) < m)
    raise(Errc::rank_deficient, what + ": design matrix rank " + std::to_string(qr.rank()) +
                                    " < " + std::to_string(m));
  Eigen::VectorXd c = qr.solve(y);

  RegressionModel model;
  model.basis = basis;
  model.input_dim = input_dim;
  model.coefficients.assign(c.data(), c.data() + c.size());
  for (double v : model.coefficients)
    if (!std::isfinite(v))
      raise(Errc::rank_deficient, what + ": least-squares solve produced non-finite coefficients");
  model.training_rse = rse(model, observations);
  return model;
}

inline RegressionModel fit_entity_model(const EntityDataset& data, BasisSpec basis) {
  return fit_observations(data.observations, data.input_dim(), basis,
                          "entity '" + data.entity_id + "'");
}

struct ValidationIssue {
  enum class Kind { non_finite, unfittable, rank_deficient };
  std::string entity_id;
  Kind kind;
  std::string detail;
};

// Reports (without throwing) every entity that cannot back a model under the
// given basis: too few rows, rank-deficient design, or non-finite values.
inline std::vector<ValidationIssue> validate_fleet(const FleetDataset& fleet, BasisSpec basis) {
  std::vector<ValidationIssue> issues;
  const std::size_t m = basis.coefficient_count(fleet.input_dim());
  for (const auto& e : fleet.entities()) {
    bool finite = true;
    for (const auto& obs : e.observations) {
      if (!std::isfinite(obs.y)) finite = false;
      for (double v : obs.x)
        if (!std::isfinite(v)) finite = false;
    }
    if (!finite) {
      issues.push_back({e.entity_id, ValidationIssue::Kind::non_finite,
                        "dataset contains non-finite values"});
      continue;
    }
    if (e.size() < m) {
      issues.push_back({e.entity_id, ValidationIssue::Kind::unfittable,
                        "has " + std::to_string(e.size()) + " observations, basis needs " +
                            std::to_string(m)});
      continue;
    }
    Eigen::MatrixXd X = detail::design_matrix(e.observations, fleet.input_dim(), basis);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(detail::kRankTolerance);
    if (static_cast<std::size_t>(qr.rank()) < m)
      issues.push_back({e.entity_id, ValidationIssue::Kind::rank_deficient,
                        "design matrix rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(m) + " (duplicated or constant inputs)"});
  }
  return issues;
}

}  // namespace fleetgroup
