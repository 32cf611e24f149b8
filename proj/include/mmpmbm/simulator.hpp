#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmpmbm/models.hpp"
#include "mmpmbm/ospa.hpp"
#include "mmpmbm/pmbm.hpp"

namespace mmpmbm {

/// Scripted one-shot model change drawn uniformly from a step window.
struct RandomSwitch {
  bool enabled = false;
  int window_lo = 0;
  int window_hi = 0;
  int model = 0;
};

/// One target's life and maneuver script. Alive for birth_step <= k <
/// death_step. The schedule lists (from_step, model_index) segments.
struct TargetScript {
  int birth_step = 1;
  int death_step = 61;
  Eigen::VectorXd initial_state;
  std::vector<std::pair<int, int>> schedule{{1, 0}};
  RandomSwitch random_switch;
};

struct ScenarioConfig {
  int horizon = 60;
  std::vector<TargetScript> targets;
  JmsConfig jms;
  MeasurementModel meas;           // R is overridden per noise-sweep cell
  GaussianMixture birth_gm;        // spatial birth components (w, m, P)
  std::vector<double> pd_sweep{0.95};
  std::vector<double> sigma_sweep{10.0};
  int num_runs = 100;
  std::uint64_t rng_seed = 1;
  /// Optional additive position jitter on truth propagation, off by default.
  double position_jitter_sigma = 0.0;
};

struct TruthEntry {
  int target_id = 0;
  Eigen::VectorXd state;
  int model = 0;
};

/// Per-step ground truth; index 0 corresponds to step k=1.
struct TruthRecord {
  std::vector<std::vector<TruthEntry>> steps;

  std::vector<int> cardinality() const;
  std::vector<Eigen::VectorXd> positions(int step_index,
                                         const Eigen::MatrixXd& H) const;
};

/// Scenario truth generation with scripted model switching; the only
/// randomness is process noise and each target's random-switch instant.
TruthRecord generate_truth(const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Detections (each live target independently with probability p_D, noise
/// sigma_eps per axis) plus Poisson clutter uniform over the region,
/// shuffled together. Detection, noise, and clutter draw from separate
/// streams so sweeps are common-random-number comparable.
std::vector<Eigen::Vector2d> generate_measurements(
    const std::vector<TruthEntry>& truth_step, const MeasurementModel& meas,
    double p_d, double sigma_eps, std::mt19937_64& detection_rng,
    std::mt19937_64& noise_rng, std::mt19937_64& clutter_rng);

/// Builds the model-conditioned birth intensity f_b(xi) * birth_gm.
ModelConditionedDensity birth_intensity(const GaussianMixture& birth_gm,
                                        const JmsConfig& jms);

/// The benchmark three-target maneuver scenario used as the CLI default.
ScenarioConfig default_scenario();

struct CampaignParams {
  FilterParams filter;
  OspaParams ospa;
  int threads = 1;
};

struct StepRecord {
  int run = 0;
  int step = 0;
  double ospa = 0.0;
  int card_est = 0;
  int card_true = 0;
  double pd = 0.0;
  double sigma_eps = 0.0;
  std::uint64_t seed = 0;
};

struct CellResult {
  double pd = 0.0;
  double sigma_eps = 0.0;
  int num_runs = 0;
  double mean_ospa = 0.0;               // over steps and runs
  std::vector<double> mean_ospa_per_step;
  std::vector<double> mean_card_per_step;
  std::vector<double> true_card_per_step;
};

struct RunFailure {
  double pd = 0.0;
  double sigma_eps = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct CampaignResult {
  std::vector<StepRecord> records;  // ordered by (cell, run, step)
  std::vector<CellResult> cells;
  std::vector<RunFailure> failures;
  double wall_seconds = 0.0;
};

/// Runs the full (p_D x sigma_eps) grid, num_runs Monte Carlo runs per cell,
/// a fresh truth and measurement draw per run, and aggregates OSPA and
/// cardinality. Per-run failures are recorded and the campaign continues.
CampaignResult run_monte_carlo(const ScenarioConfig& cfg,
                               const CampaignParams& params);

}  // namespace mmpmbm
