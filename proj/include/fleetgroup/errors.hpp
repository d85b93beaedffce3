#pragma once

#include <stdexcept>
#include <string>

namespace fleetgroup {

// Error categories surfaced by the library. Each operation documents which
// of these it may raise.
enum class Errc {
  missing_column,
  non_numeric_cell,
  empty_file,
  single_entity,
  underdetermined,
  rank_deficient,
  dimension_mismatch,
  length_mismatch,
  empty_graph,
  convergence_failure,
  too_few_observations,
  empty_validation,
  too_few_points,
  invalid_config,
  io_failure,
};

inline const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::non_numeric_cell: return "NonNumericCell";
    case Errc::empty_file: return "EmptyFile";
    case Errc::single_entity: return "SingleEntity";
    case Errc::underdetermined: return "Underdetermined";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_graph: return "EmptyGraph";
    case Errc::convergence_failure: return "ConvergenceFailure";
    case Errc::too_few_observations: return "TooFewObservations";
    case Errc::empty_validation: return "EmptyValidation";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fleetgroup
