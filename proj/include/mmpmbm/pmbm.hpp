#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mmpmbm/assignment.hpp"
#include "mmpmbm/gaussian.hpp"
#include "mmpmbm/models.hpp"

namespace mmpmbm {

/// Per-motion-model Gaussian mixtures representing a density or intensity
/// over the augmented state (x, xi). For a normalized Bernoulli density the
/// weights across all models and components sum to 1; PPP intensities carry
/// unnormalized mass.
struct ModelConditionedDensity {
  std::vector<GaussianMixture> per_model;

  int num_models() const { return static_cast<int>(per_model.size()); }
  double total_weight() const;
  int component_count() const;
  /// Per-model marginal weights (the model probabilities f(xi) when
  /// normalized).
  Eigen::VectorXd model_weights() const;
  /// Scales all weights so the total becomes 1. No-op on zero mass.
  void normalize();
};

/// One potentially detected target: existence probability, normalized
/// model-conditioned density, and the single-target hypothesis log weight.
struct BernoulliComponent {
  double r = 0.0;
  ModelConditionedDensity density;
  double log_weight = 0.0;
};

using BernoulliPtr = std::shared_ptr<const BernoulliComponent>;

/// One consistent association history: a weighted list of Bernoullis.
/// Bernoullis are shared immutable values; hypotheses with common history
/// alias the same components.
struct GlobalHypothesis {
  double log_weight = 0.0;
  std::vector<BernoulliPtr> bernoullis;
};

struct PmbmState {
  ModelConditionedDensity ppp;
  std::vector<GlobalHypothesis> hypotheses;
  int step = 0;
};

struct FilterParams {
  ReductionParams gm_reduction;  // per (track, model) and per PPP model
  double hypothesis_prune = 1e-4;
  int hypothesis_cap = 200;
  double bernoulli_prune = 1e-4;  // existence-probability prune
  int k_best_total = 100;         // Murty budget shared across parents
  double gate_chi2 = 13.82;       // 0.999 mass, 2 dof
  double r_threshold = 0.5;       // estimator threshold
  bool enable_reduction = true;   // off: keep every component and hypothesis
};

// -- prediction ------------------------------------------------------------

/// PPP intensity prediction: birth plus survival-and-switch propagation of
/// every prior component through every destination model.
ModelConditionedDensity predict_ppp(const ModelConditionedDensity& ppp,
                                    const JmsConfig& jms,
                                    const ModelConditionedDensity& birth);

/// Bernoulli prediction: log weight unchanged, existence scaled by expected
/// survival, density propagated per model pair and renormalized.
BernoulliComponent predict_bernoulli(const BernoulliComponent& b,
                                     const JmsConfig& jms);

/// Full prediction step (PPP + every Bernoulli in every hypothesis), with GM
/// reduction applied when enabled. Shared Bernoullis are predicted once.
PmbmState predict_step(const PmbmState& state, const JmsConfig& jms,
                       const ModelConditionedDensity& birth,
                       const FilterParams& params);

// -- update branches -------------------------------------------------------

/// Undetected-target update: every weight scaled by (1 - p_D(xi)).
ModelConditionedDensity update_undetected(const ModelConditionedDensity& ppp,
                                          const JmsConfig& jms);

struct FirstDetection {
  double rho_p = 0.0;  // e(z) + c(z)
  BernoulliComponent bernoulli;
};

/// First-detection update: a measurement either starts a new Bernoulli from
/// the PPP or is clutter; rho_p carries both masses. Throws on z outside the
/// surveillance region.
FirstDetection update_first_detection(const ModelConditionedDensity& ppp,
                                      const Eigen::Vector2d& z,
                                      const MeasurementModel& meas,
                                      const JmsConfig& jms);

/// Misdetection update of an existing Bernoulli; the returned log_weight
/// already includes ln rho(empty).
BernoulliComponent update_misdetection(const BernoulliComponent& b,
                                       const JmsConfig& jms);

/// rho(empty) = 1 - r + r * sum (1 - p_D) w, the misdetection mass by itself.
double misdetection_rho(const BernoulliComponent& b, const JmsConfig& jms);

struct MeasurementUpdate {
  double rho_z = 0.0;  // may be 0 when all likelihoods underflow
  BernoulliComponent bernoulli;
};

/// Measurement update of an existing Bernoulli: existence snaps to 1,
/// density reweighted by detection-and-likelihood, log weight extended by
/// ln rho_z.
MeasurementUpdate update_with_measurement(const BernoulliComponent& b,
                                          const Eigen::Vector2d& z,
                                          const MeasurementModel& meas,
                                          const JmsConfig& jms);

// -- association -----------------------------------------------------------

/// Cost matrix for one global hypothesis: m measurements against n tracks
/// plus m new-target columns. Inputs are log-domain rho values; -inf marks a
/// gated-out or zero-likelihood pairing.
/// Entry (i, j<n) = -(ln rho_z(i,j) - ln rho_empty(j)), entry (i, n+i) =
/// -ln rho_p(i), every other new-target entry infeasible.
Eigen::MatrixXd build_cost_matrix(const Eigen::MatrixXd& log_rho_z,
                                  const Eigen::VectorXd& log_rho_empty,
                                  const Eigen::VectorXd& log_rho_p);

/// Full measurement update: PPP thinning, per-hypothesis k-best association
/// via Murty, hypothesis normalization and reduction.
PmbmState update_step(const PmbmState& state,
                      const std::vector<Eigen::Vector2d>& measurements,
                      const MeasurementModel& meas, const JmsConfig& jms,
                      const FilterParams& params);

// -- extraction ------------------------------------------------------------

struct TargetEstimate {
  Eigen::VectorXd state;             // model-marginalized mean
  Eigen::VectorXd model_probability; // per-model marginals
  double r = 0.0;
};

/// Estimates from the highest-weight hypothesis: one entry per Bernoulli
/// with existence above the threshold.
std::vector<TargetEstimate> extract_estimates(const PmbmState& state,
                                              double r_threshold);

/// Gating overload for a Bernoulli density.
std::vector<int> gate_measurements(const BernoulliComponent& b,
                                   const std::vector<Eigen::Vector2d>& measurements,
                                   const MeasurementModel& meas,
                                   double gate_chi2);

}  // namespace mmpmbm
