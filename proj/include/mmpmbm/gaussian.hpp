#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace mmpmbm {

/// Weighted Gaussian component (w, m, P). The atom of every density in the
/// filter. Weight is unitless mass; mean/cov live in state coordinates.
struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianComponent() = default;
  GaussianComponent(double w, Eigen::VectorXd m, Eigen::MatrixXd P)
      : weight(w), mean(std::move(m)), cov(std::move(P)) {}

  Eigen::Index dim() const { return mean.size(); }
};

/// A sum of weighted Gaussian components sharing one state dimension.
/// Weights need not sum to 1: intensities carry mass, densities carry
/// probability.
struct GaussianMixture {
  std::vector<GaussianComponent> components;

  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<GaussianComponent> comps)
      : components(std::move(comps)) {}

  bool empty() const { return components.empty(); }
  std::size_t size() const { return components.size(); }

  double total_weight() const;

  /// Weighted first moment. Mixture must be nonempty.
  Eigen::VectorXd mean() const;
};

/// Checks symmetry (abs tol) and positive semi-definiteness
/// (lambda_min >= -psd_tol * trace) of a covariance candidate.
bool is_valid_covariance(const Eigen::MatrixXd& P, double sym_tol = 1e-9,
                         double psd_tol = 1e-9);

/// Chapman-Kolmogorov step for a linear-Gaussian transition:
/// N(x; Fm, Q + F P F^T) with the weight carried through unchanged.
/// Output covariance is re-symmetrized.
GaussianComponent propagate_gaussian(const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q,
                                     const GaussianComponent& g);

struct BayesUpdateResult {
  /// ln N(z; Hm, HPH^T + R) — kept in log domain, products of many small
  /// likelihoods underflow otherwise.
  double log_likelihood;
  GaussianComponent posterior;

  double likelihood() const { return std::exp(log_likelihood); }
};

/// Conjugate measurement update: N(z; Hx, R) N(x; m, P) = q(z) N(x; m^, P^).
/// Posterior weight equals the prior weight; q(z) is returned separately.
/// Throws NumericError if the innovation covariance is ill-conditioned.
BayesUpdateResult bayes_update_gaussian(const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& R,
                                        const Eigen::VectorXd& z,
                                        const GaussianComponent& g);

/// ln N(z; mean, cov) for a well-conditioned cov.
double log_gaussian_density(const Eigen::VectorXd& z,
                            const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov);

struct ReductionParams {
  double prune_threshold = 1e-5;
  double merge_threshold = 4.0;  // squared Mahalanobis distance
  int max_components = 100;
};

/// Standard prune / moment-preserving merge / cap reduction. The total
/// weight of the survivors is rescaled to the pre-reduction total.
GaussianMixture reduce_mixture(const GaussianMixture& gm, double prune_threshold,
                               double merge_threshold, int max_components);

inline GaussianMixture reduce_mixture(const GaussianMixture& gm,
                                      const ReductionParams& p) {
  return reduce_mixture(gm, p.prune_threshold, p.merge_threshold,
                        p.max_components);
}

}  // namespace mmpmbm
