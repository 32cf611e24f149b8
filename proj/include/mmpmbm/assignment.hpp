#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "mmpmbm/gaussian.hpp"
#include "mmpmbm/models.hpp"

namespace mmpmbm {

/// Sentinel for an infeasible pairing. Kept finite so dual-potential
/// arithmetic stays NaN-free; anything at or above kInfeasibleCost / 2 in a
/// solution marks it infeasible.
constexpr double kInfeasibleCost = 1e30;

/// Rectangular min-cost assignment: every row (measurement) takes exactly one
/// column (track or its own new-target column), columns used at most once.
struct AssignmentProblem {
  Eigen::MatrixXd costs;  // m x N, entries may be +inf / kInfeasibleCost
};

struct Assignment {
  std::vector<int> row_to_col;
  double total_cost = 0.0;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.row_to_col == b.row_to_col;
  }
};

/// Minimum-cost assignment via shortest augmenting paths; ties broken by the
/// lexicographically smallest row_to_col. Throws NumericError if no feasible
/// assignment exists.
Assignment best_assignment(const AssignmentProblem& p);

/// The k lowest-cost distinct assignments (fewer if fewer exist) by Murty
/// partitioning, costs nondecreasing; equal costs ordered lexicographically.
std::vector<Assignment> k_best_assignments(const AssignmentProblem& p, int k);

/// Indices of measurements whose minimum squared Mahalanobis innovation
/// distance over all mixture components (all models) is within gate_chi2.
std::vector<int> gate_measurements(
    const std::vector<GaussianMixture>& per_model,
    const std::vector<Eigen::Vector2d>& measurements,
    const MeasurementModel& meas, double gate_chi2);

}  // namespace mmpmbm
