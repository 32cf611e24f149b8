#include "mmpmbm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // ln(2*pi)

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& A) {
  return 0.5 * (A + A.transpose());
}

}  // namespace

double GaussianMixture::total_weight() const {
  return std::accumulate(components.begin(), components.end(), 0.0,
                         [](double s, const GaussianComponent& g) {
                           return s + g.weight;
                         });
}

Eigen::VectorXd GaussianMixture::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(components.front().dim());
  double total = 0.0;
  for (const auto& g : components) {
    m += g.weight * g.mean;
    total += g.weight;
  }
  return m / total;
}

bool is_valid_covariance(const Eigen::MatrixXd& P, double sym_tol,
                         double psd_tol) {
  if (P.rows() != P.cols()) return false;
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -psd_tol * std::abs(P.trace());
}

GaussianComponent propagate_gaussian(const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q,
                                     const GaussianComponent& g) {
  const Eigen::Index d = g.dim();
  if (F.rows() != d || F.cols() != d || Q.rows() != d || Q.cols() != d ||
      g.cov.rows() != d || g.cov.cols() != d) {
    throw ConfigError("propagate_gaussian: dimension mismatch");
  }
  GaussianComponent out;
  out.weight = g.weight;
  out.mean = F * g.mean;
  out.cov = symmetrize(Q + F * g.cov * F.transpose());
  return out;
}

double log_gaussian_density(const Eigen::VectorXd& z,
                            const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
  const Eigen::Index p = z.size();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("log_gaussian_density: covariance not positive definite");
  }
  const Eigen::VectorXd diff = z - mean;
  const Eigen::VectorXd alpha = llt.matrixL().solve(diff);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  return -0.5 * (p * kLogTwoPi + log_det + alpha.squaredNorm());
}

BayesUpdateResult bayes_update_gaussian(const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& R,
                                        const Eigen::VectorXd& z,
                                        const GaussianComponent& g) {
  const Eigen::Index d = g.dim();
  const Eigen::Index p = z.size();
  if (H.rows() != p || H.cols() != d || R.rows() != p || R.cols() != p) {
    throw ConfigError("bayes_update_gaussian: dimension mismatch");
  }
  const Eigen::MatrixXd S = symmetrize(H * g.cov * H.transpose() + R);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > 1e12) {
      throw NumericError("bayes_update_gaussian: singular innovation covariance");
    }
  }
  const Eigen::MatrixXd K = g.cov * H.transpose() * S.inverse();

  BayesUpdateResult res;
  res.log_likelihood = log_gaussian_density(z, H * g.mean, S);
  res.posterior.weight = g.weight;
  res.posterior.mean = g.mean + K * (z - H * g.mean);
  res.posterior.cov =
      symmetrize((Eigen::MatrixXd::Identity(d, d) - K * H) * g.cov);
  return res;
}

namespace {

/// Moment-preserving merge of a group of components into one.
GaussianComponent merge_components(const std::vector<const GaussianComponent*>&
                                       group) {
  GaussianComponent out;
  const Eigen::Index d = group.front()->dim();
  out.weight = 0.0;
  out.mean = Eigen::VectorXd::Zero(d);
  for (const auto* g : group) {
    out.weight += g->weight;
    out.mean += g->weight * g->mean;
  }
  out.mean /= out.weight;
  out.cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto* g : group) {
    const Eigen::VectorXd diff = g->mean - out.mean;
    out.cov += g->weight * (g->cov + diff * diff.transpose());
  }
  out.cov /= out.weight;
  return out;
}

}  // namespace

GaussianMixture reduce_mixture(const GaussianMixture& gm, double prune_threshold,
                               double merge_threshold, int max_components) {
  if (prune_threshold < 0.0 || merge_threshold < 0.0 || max_components < 1) {
    throw ConfigError("reduce_mixture: invalid reduction parameters");
  }
  if (gm.empty()) return gm;

  const double total_before = gm.total_weight();

  std::vector<const GaussianComponent*> alive;
  for (const auto& g : gm.components) {
    if (g.weight >= prune_threshold) alive.push_back(&g);
  }
  if (alive.empty()) {
    // keep the single heaviest component rather than dropping all mass
    alive.push_back(&*std::max_element(
        gm.components.begin(), gm.components.end(),
        [](const auto& a, const auto& b) { return a.weight < b.weight; }));
  }

  // greedy merge: pick heaviest survivor, absorb everything within the
  // Mahalanobis gate of its covariance
  std::sort(alive.begin(), alive.end(), [](const auto* a, const auto* b) {
    return a->weight > b->weight;
  });
  std::vector<bool> used(alive.size(), false);
  GaussianMixture out;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (used[i]) continue;
    std::vector<const GaussianComponent*> group{alive[i]};
    used[i] = true;
    const Eigen::LLT<Eigen::MatrixXd> llt(alive[i]->cov);
    for (std::size_t j = i + 1; j < alive.size(); ++j) {
      if (used[j]) continue;
      const Eigen::VectorXd diff = alive[j]->mean - alive[i]->mean;
      double d2;
      if (llt.info() == Eigen::Success) {
        d2 = llt.matrixL().solve(diff).squaredNorm();
      } else {
        // degenerate covariance: merge only coincident means
        d2 = diff.squaredNorm() > 0.0
                 ? std::numeric_limits<double>::infinity()
                 : 0.0;
      }
      if (d2 < merge_threshold) {
        group.push_back(alive[j]);
        used[j] = true;
      }
    }
    out.components.push_back(merge_components(group));
  }

  std::sort(out.components.begin(), out.components.end(),
            [](const auto& a, const auto& b) { return a.weight > b.weight; });
  if (static_cast<int>(out.components.size()) > max_components) {
    out.components.resize(max_components);
  }

  const double total_after = out.total_weight();
  if (total_after > 0.0) {
    const double scale = total_before / total_after;
    for (auto& g : out.components) g.weight *= scale;
  }
  return out;
}

}  // namespace mmpmbm
