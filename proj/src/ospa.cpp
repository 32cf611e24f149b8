#include "mmpmbm/ospa.hpp"

#include <cmath>

#include "mmpmbm/assignment.hpp"
#include "mmpmbm/errors.hpp"

namespace mmpmbm {

double ospa(const std::vector<Eigen::VectorXd>& X,
            const std::vector<Eigen::VectorXd>& Y, const OspaParams& params) {
  if (params.cutoff <= 0.0 || params.order < 1.0) {
    throw ConfigError("ospa: need cutoff > 0 and order >= 1");
  }
  const auto* small = &X;
  const auto* large = &Y;
  if (small->size() > large->size()) std::swap(small, large);
  const int m = static_cast<int>(small->size());
  const int n = static_cast<int>(large->size());
  if (n == 0) return 0.0;
  if (m == 0) return params.cutoff;

  for (const auto& x : *small) {
    if (x.size() != large->front().size()) {
      throw ConfigError("ospa: position dimension mismatch");
    }
  }

  Eigen::MatrixXd costs(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = ((*small)[i] - (*large)[j]).norm();
      costs(i, j) = std::pow(std::min(d, params.cutoff), params.order);
    }
  }
  const Assignment a = best_assignment({costs});
  const double cp = std::pow(params.cutoff, params.order);
  return std::pow((a.total_cost + cp * (n - m)) / n, 1.0 / params.order);
}

CardinalityStats cardinality_error(
    const std::vector<std::vector<int>>& estimated_per_run,
    const std::vector<int>& truth_per_step) {
  const std::size_t steps = truth_per_step.size();
  for (const auto& run : estimated_per_run) {
    if (run.size() != steps) {
      throw ConfigError("cardinality_error: horizon length mismatch");
    }
  }
  CardinalityStats stats;
  stats.truth.assign(truth_per_step.begin(), truth_per_step.end());
  stats.mean_estimated.assign(steps, 0.0);
  if (estimated_per_run.empty()) return stats;
  for (const auto& run : estimated_per_run) {
    for (std::size_t k = 0; k < steps; ++k) {
      stats.mean_estimated[k] += run[k];
    }
  }
  for (auto& v : stats.mean_estimated) v /= estimated_per_run.size();
  return stats;
}

}  // namespace mmpmbm
