#include "mmpmbm/models.hpp"

#include <cmath>

#include "mmpmbm/errors.hpp"
#include "mmpmbm/gaussian.hpp"

namespace mmpmbm {

namespace {

Eigen::MatrixXd cv_transition(double T) {
  Eigen::MatrixXd F(4, 4);
  F << 1, T, 0, 0,
       0, 1, 0, 0,
       0, 0, 1, T,
       0, 0, 0, 1;
  return F;
}

Eigen::MatrixXd white_accel_noise(double T, double sigma) {
  Eigen::Matrix2d block;
  block << T * T * T * T / 4.0, T * T * T / 2.0,
           T * T * T / 2.0, T * T;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(4, 4);
  Q.topLeftCorner<2, 2>() = sigma * sigma * block;
  Q.bottomRightCorner<2, 2>() = sigma * sigma * block;
  return Q;
}

}  // namespace

MotionModel cv_model(double T, double sigma) {
  if (T <= 0.0) throw ConfigError("cv_model: T must be positive");
  if (sigma < 0.0) throw ConfigError("cv_model: sigma must be nonnegative");
  return MotionModel{cv_transition(T), white_accel_noise(T, sigma),
                     CvDescriptor{sigma}};
}

MotionModel ct_model(double T, double sigma, double omega) {
  if (T <= 0.0) throw ConfigError("ct_model: T must be positive");
  if (sigma < 0.0) throw ConfigError("ct_model: sigma must be nonnegative");
  Eigen::MatrixXd F;
  if (std::abs(omega) < 1e-9) {
    F = cv_transition(T);
  } else {
    const double s = std::sin(omega * T);
    const double c = std::cos(omega * T);
    F.resize(4, 4);
    F << 1, s / omega, 0, -(1 - c) / omega,
         0, c,         0, -s,
         0, (1 - c) / omega, 1, s / omega,
         0, s,         0, c;
  }
  return MotionModel{std::move(F), white_accel_noise(T, sigma),
                     CtDescriptor{sigma, omega}};
}

const JmsConfig& validate_jms(const JmsConfig& config) {
  const int M = config.num_models();
  if (M == 0) throw ConfigError("jms: empty model set");

  const Eigen::Index d = config.models.front().F.rows();
  for (int i = 0; i < M; ++i) {
    const auto& m = config.models[i];
    if (m.F.rows() != d || m.F.cols() != d || m.Q.rows() != d ||
        m.Q.cols() != d) {
      throw ConfigError("jms: model " + std::to_string(i) +
                        " has inconsistent dimensions");
    }
    if (!is_valid_covariance(m.Q)) {
      throw ConfigError("jms: model " + std::to_string(i) + " Q not PSD");
    }
  }

  if (config.tpm.rows() != M || config.tpm.cols() != M) {
    throw ConfigError("jms: tpm must be " + std::to_string(M) + "x" +
                      std::to_string(M));
  }
  for (int r = 0; r < M; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < M; ++c) {
      const double v = config.tpm(r, c);
      if (v < 0.0 || v > 1.0) {
        throw ConfigError("jms: tpm entry (" + std::to_string(r) + "," +
                          std::to_string(c) + ") outside [0,1]");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw ConfigError("jms: tpm row " + std::to_string(r) +
                        " sums to " + std::to_string(row_sum));
    }
  }

  if (config.birth_model_dist.size() != M) {
    throw ConfigError("jms: birth_model_dist length mismatch");
  }
  if (std::abs(config.birth_model_dist.sum() - 1.0) > 1e-9 ||
      config.birth_model_dist.minCoeff() < 0.0) {
    throw ConfigError("jms: birth_model_dist is not a distribution");
  }

  for (const auto& [vec, name] :
       {std::pair{&config.p_detect, "p_detect"},
        std::pair{&config.p_survive, "p_survive"}}) {
    if (vec->size() != M) {
      throw ConfigError(std::string("jms: ") + name + " length mismatch");
    }
    if (vec->minCoeff() < 0.0 || vec->maxCoeff() > 1.0) {
      throw ConfigError(std::string("jms: ") + name +
                        " entries outside [0,1]");
    }
  }
  return config;
}

}  // namespace mmpmbm
