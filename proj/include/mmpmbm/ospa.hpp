#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mmpmbm {

struct OspaParams {
  double cutoff = 100.0;  // meters
  double order = 1.0;
};

/// OSPA distance between two position sets. Both empty -> 0; one empty ->
/// cutoff. The inner assignment over injections reuses best_assignment.
double ospa(const std::vector<Eigen::VectorXd>& X,
            const std::vector<Eigen::VectorXd>& Y, const OspaParams& params);

struct CardinalityStats {
  std::vector<double> mean_estimated;  // per step, averaged over runs
  std::vector<double> truth;           // per step
};

/// Per-step mean estimated cardinality over Monte Carlo runs against the
/// (run-invariant) true cardinality.
CardinalityStats cardinality_error(
    const std::vector<std::vector<int>>& estimated_per_run,
    const std::vector<int>& truth_per_step);

}  // namespace mmpmbm
