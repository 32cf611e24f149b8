#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

namespace mmpmbm {

/// Nearly-constant-velocity descriptor: process noise sigma in m/s^2.
struct CvDescriptor {
  double sigma = 0.0;
};

/// Coordinated-turn descriptor: process noise sigma and turn rate in rad/s
/// (positive = counterclockwise).
struct CtDescriptor {
  double sigma = 0.0;
  double turn_rate = 0.0;
};

/// One motion model of the jump Markov system. State ordering is
/// [x1, vx1, x2, vx2].
struct MotionModel {
  Eigen::MatrixXd F;
  Eigen::MatrixXd Q;
  std::variant<CvDescriptor, CtDescriptor> descriptor;
};

/// Jump Markov system: model set, row-stochastic TPM, model distribution at
/// birth, per-model detection and survival probabilities.
struct JmsConfig {
  std::vector<MotionModel> models;
  Eigen::MatrixXd tpm;
  Eigen::VectorXd birth_model_dist;
  Eigen::VectorXd p_detect;
  Eigen::VectorXd p_survive;

  int num_models() const { return static_cast<int>(models.size()); }
  Eigen::Index state_dim() const { return models.front().F.rows(); }
};

/// Linear position measurement model plus the clutter PPP over an
/// axis-aligned surveillance box.
struct MeasurementModel {
  Eigen::MatrixXd H;
  Eigen::MatrixXd R;
  double clutter_rate = 0.0;  // expected clutter count per scan
  Eigen::Vector2d region_min = Eigen::Vector2d::Zero();
  Eigen::Vector2d region_max = Eigen::Vector2d::Zero();

  double region_area() const {
    return (region_max - region_min).prod();
  }
  /// Uniform clutter spatial density c(z) inside the region.
  double clutter_density() const { return clutter_rate / region_area(); }
  bool in_region(const Eigen::Vector2d& z) const {
    return (z.array() >= region_min.array()).all() &&
           (z.array() <= region_max.array()).all();
  }
};

/// CV model for sampling period T with white-acceleration sigma.
/// Q per axis is sigma^2 [T^4/4, T^3/2; T^3/2, T^2].
MotionModel cv_model(double T, double sigma);

/// CT model with turn rate omega (rad/s). |omega| < 1e-9 falls back to the
/// CV transition matrix. Q is structured like the CV noise.
MotionModel ct_model(double T, double sigma, double omega);

/// Validates all JmsConfig invariants; returns the config unchanged on
/// success, throws ConfigError naming the offending field otherwise.
const JmsConfig& validate_jms(const JmsConfig& config);

}  // namespace mmpmbm
