#include "mmpmbm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

double clamp_cost(double c) {
  if (std::isinf(c) || c >= kInfeasibleCost) return kInfeasibleCost;
  return c;
}

bool is_feasible_cost(double c) { return c < kInfeasibleCost / 2.0; }

/// Shortest-augmenting-path LAP (dual potentials) on an m x N matrix,
/// m <= N. Returns nullopt when every completion uses a forbidden entry.
std::optional<Assignment> solve_lap(const Eigen::MatrixXd& costs) {
  const int m = static_cast<int>(costs.rows());
  const int N = static_cast<int>(costs.cols());
  if (m == 0) return Assignment{{}, 0.0};
  if (m > N) throw ConfigError("solve_lap: more rows than columns");

  // 1-indexed with a virtual column 0
  std::vector<double> u(m + 1, 0.0), v(N + 1, 0.0);
  std::vector<int> match(N + 1, 0);  // match[j] = row occupying column j

  for (int i = 1; i <= m; ++i) {
    std::vector<double> minv(N + 1, std::numeric_limits<double>::max());
    std::vector<int> way(N + 1, 0);
    std::vector<bool> used(N + 1, false);
    match[0] = i;
    int j0 = 0;
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = std::numeric_limits<double>::max();
      int j1 = 0;
      for (int j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double cur = clamp_cost(costs(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= N; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(m, -1);
  for (int j = 1; j <= N; ++j) {
    if (match[j] != 0) out.row_to_col[match[j] - 1] = j - 1;
  }
  out.total_cost = 0.0;
  for (int i = 0; i < m; ++i) {
    const double c = clamp_cost(costs(i, out.row_to_col[i]));
    if (!is_feasible_cost(c)) return std::nullopt;
    out.total_cost += c;
  }
  return out;
}

double tie_eps(double cost) { return 1e-9 * std::max(1.0, std::abs(cost)); }

bool lex_less(const Assignment& a, const Assignment& b) {
  return a.row_to_col < b.row_to_col;
}

/// (cost, lexicographic mapping) order with a tolerance on cost ties.
bool cost_lex_less(const Assignment& a, const Assignment& b) {
  if (std::abs(a.total_cost - b.total_cost) <=
      tie_eps(std::min(a.total_cost, b.total_cost))) {
    return lex_less(a, b);
  }
  return a.total_cost < b.total_cost;
}

}  // namespace

Assignment best_assignment(const AssignmentProblem& p) {
  auto base = solve_lap(p.costs);
  if (!base) throw NumericError("best_assignment: infeasible problem");
  const int m = static_cast<int>(p.costs.rows());
  const int N = static_cast<int>(p.costs.cols());
  const double optimal = base->total_cost;

  // lexicographic refinement: fix rows in order to the smallest column that
  // still admits the optimal total cost
  Eigen::MatrixXd masked = p.costs;
  Assignment result;
  result.row_to_col.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < N; ++c) {
      if (!is_feasible_cost(clamp_cost(masked(i, c)))) continue;
      Eigen::MatrixXd trial = masked;
      for (int cc = 0; cc < N; ++cc) {
        if (cc != c) trial(i, cc) = kInfeasibleCost;
      }
      auto sol = solve_lap(trial);
      if (sol && sol->total_cost <= optimal + tie_eps(optimal)) {
        result.row_to_col[i] = c;
        masked = trial;
        for (int rr = 0; rr < m; ++rr) {
          if (rr != i) masked(rr, c) = kInfeasibleCost;
        }
        break;
      }
    }
  }
  result.total_cost = optimal;
  return result;
}

namespace {

struct MurtyNode {
  std::vector<std::pair<int, int>> forced;
  std::vector<std::pair<int, int>> forbidden;
  Assignment solution;
};

Eigen::MatrixXd apply_constraints(const Eigen::MatrixXd& costs,
                                  const MurtyNode& node) {
  Eigen::MatrixXd out = costs;
  for (const auto& [r, c] : node.forbidden) out(r, c) = kInfeasibleCost;
  for (const auto& [r, c] : node.forced) {
    for (int cc = 0; cc < out.cols(); ++cc) {
      if (cc != c) out(r, cc) = kInfeasibleCost;
    }
    for (int rr = 0; rr < out.rows(); ++rr) {
      if (rr != r) out(rr, c) = kInfeasibleCost;
    }
  }
  return out;
}

}  // namespace

std::vector<Assignment> k_best_assignments(const AssignmentProblem& p, int k) {
  if (k < 1) throw ConfigError("k_best_assignments: k must be >= 1");
  const int m = static_cast<int>(p.costs.rows());
  if (m == 0) return {Assignment{{}, 0.0}};

  auto node_greater = [](const MurtyNode& a, const MurtyNode& b) {
    return cost_lex_less(b.solution, a.solution);
  };
  std::priority_queue<MurtyNode, std::vector<MurtyNode>,
                      decltype(node_greater)>
      queue(node_greater);

  MurtyNode root;
  auto root_sol = solve_lap(p.costs);
  if (!root_sol) throw NumericError("k_best_assignments: infeasible problem");
  root.solution = *root_sol;
  queue.push(std::move(root));

  std::vector<Assignment> results;
  // keep consuming cost ties past k so the final sort matches a brute-force
  // (cost, lexicographic) ranking exactly
  while (!queue.empty()) {
    if (static_cast<int>(results.size()) >= k) {
      const double kth = results[k - 1].total_cost;
      if (queue.top().solution.total_cost > kth + tie_eps(kth)) break;
    }
    MurtyNode node = queue.top();
    queue.pop();
    results.push_back(node.solution);

    // partition: force the solution's pairs row by row (in row order over
    // the rows not already forced), forbidding the next pair each time
    std::vector<bool> row_forced(m, false);
    for (const auto& [r, c] : node.forced) row_forced[r] = true;
    MurtyNode child_base = node;
    for (int r = 0; r < m; ++r) {
      if (row_forced[r]) continue;
      MurtyNode child = child_base;
      child.forbidden.emplace_back(r, node.solution.row_to_col[r]);
      auto sol = solve_lap(apply_constraints(p.costs, child));
      if (sol) {
        child.solution = *sol;
        queue.push(std::move(child));
      }
      child_base.forced.emplace_back(r, node.solution.row_to_col[r]);
    }
  }

  std::sort(results.begin(), results.end(), cost_lex_less);
  if (static_cast<int>(results.size()) > k) results.resize(k);
  return results;
}

std::vector<int> gate_measurements(
    const std::vector<GaussianMixture>& per_model,
    const std::vector<Eigen::Vector2d>& measurements,
    const MeasurementModel& meas, double gate_chi2) {
  if (gate_chi2 <= 0.0) throw ConfigError("gate_measurements: gate_chi2 <= 0");

  struct Gate {
    Eigen::Vector2d predicted;
    Eigen::Matrix2d s_inverse;
  };
  std::vector<Gate> gates;
  for (const auto& gm : per_model) {
    for (const auto& g : gm.components) {
      const Eigen::Matrix2d S = meas.H * g.cov * meas.H.transpose() + meas.R;
      gates.push_back({meas.H * g.mean, S.inverse()});
    }
  }

  std::vector<int> kept;
  for (int zi = 0; zi < static_cast<int>(measurements.size()); ++zi) {
    for (const auto& gate : gates) {
      const Eigen::Vector2d d = measurements[zi] - gate.predicted;
      if (d.dot(gate.s_inverse * d) <= gate_chi2) {
        kept.push_back(zi);
        break;
      }
    }
  }
  return kept;
}

}  // namespace mmpmbm
