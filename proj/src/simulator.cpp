#include "mmpmbm/simulator.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

int model_at(const TargetScript& target, int step, int random_switch_step) {
  int model = target.schedule.front().second;
  for (const auto& [from, idx] : target.schedule) {
    if (from <= step) model = idx;
  }
  if (target.random_switch.enabled && random_switch_step > 0 &&
      step >= random_switch_step) {
    model = target.random_switch.model;
  }
  return model;
}

std::mt19937_64 stream(std::uint64_t base, int run, int purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(run),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<int> TruthRecord::cardinality() const {
  std::vector<int> card;
  card.reserve(steps.size());
  for (const auto& s : steps) card.push_back(static_cast<int>(s.size()));
  return card;
}

std::vector<Eigen::VectorXd> TruthRecord::positions(
    int step_index, const Eigen::MatrixXd& H) const {
  std::vector<Eigen::VectorXd> out;
  for (const auto& e : steps[step_index]) out.push_back(H * e.state);
  return out;
}

TruthRecord generate_truth(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  TruthRecord record;
  record.steps.resize(cfg.horizon);

  std::vector<Eigen::MatrixXd> noise_sqrt;
  for (const auto& m : cfg.jms.models) noise_sqrt.push_back(covariance_sqrt(m.Q));

  std::normal_distribution<double> gauss(0.0, 1.0);
  int target_id = 0;
  for (const auto& target : cfg.targets) {
    ++target_id;
    if (target.birth_step < 1 || target.birth_step >= target.death_step) {
      throw ConfigError("generate_truth: bad birth/death schedule");
    }
    int switch_step = 0;
    if (target.random_switch.enabled) {
      std::uniform_int_distribution<int> pick(target.random_switch.window_lo,
                                              target.random_switch.window_hi);
      switch_step = pick(rng);
    }

    Eigen::VectorXd x = target.initial_state;
    for (int k = target.birth_step;
         k < target.death_step && k <= cfg.horizon; ++k) {
      if (k > target.birth_step) {
        const int xi = model_at(target, k, switch_step);
        Eigen::VectorXd noise(x.size());
        for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = gauss(rng);
        x = cfg.jms.models[xi].F * x + noise_sqrt[xi] * noise;
        if (cfg.position_jitter_sigma > 0.0) {
          x(0) += cfg.position_jitter_sigma * gauss(rng);
          x(2) += cfg.position_jitter_sigma * gauss(rng);
        }
      }
      record.steps[k - 1].push_back(
          {target_id, x, model_at(target, k, switch_step)});
    }
  }
  return record;
}

std::vector<Eigen::Vector2d> generate_measurements(
    const std::vector<TruthEntry>& truth_step, const MeasurementModel& meas,
    double p_d, double sigma_eps, std::mt19937_64& detection_rng,
    std::mt19937_64& noise_rng, std::mt19937_64& clutter_rng) {
  std::uniform_real_distribution<double> uniform01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Eigen::Vector2d> out;
  for (const auto& entry : truth_step) {
    // noise is drawn unconditionally so detection-probability sweeps stay
    // common-random-number aligned
    const Eigen::Vector2d noise(gauss(noise_rng), gauss(noise_rng));
    if (uniform01(detection_rng) < p_d) {
      const Eigen::Vector2d z =
          Eigen::Vector2d(meas.H * entry.state) + sigma_eps * noise;
      // the sensor only reports returns inside its surveillance box
      if (meas.in_region(z)) out.push_back(z);
    }
  }

  std::poisson_distribution<int> clutter_count(meas.clutter_rate);
  const int n_clutter = meas.clutter_rate > 0.0
                            ? clutter_count(clutter_rng)
                            : 0;
  for (int i = 0; i < n_clutter; ++i) {
    Eigen::Vector2d z;
    for (int a = 0; a < 2; ++a) {
      z(a) = meas.region_min(a) +
             uniform01(clutter_rng) * (meas.region_max(a) - meas.region_min(a));
    }
    out.push_back(z);
  }

  // Fisher-Yates with explicit draws, platform-independent given the stream
  for (int i = static_cast<int>(out.size()) - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(out[i], out[pick(clutter_rng)]);
  }
  return out;
}

ModelConditionedDensity birth_intensity(const GaussianMixture& birth_gm,
                                        const JmsConfig& jms) {
  ModelConditionedDensity birth;
  birth.per_model.resize(jms.num_models());
  for (int xi = 0; xi < jms.num_models(); ++xi) {
    for (const auto& g : birth_gm.components) {
      GaussianComponent scaled = g;
      scaled.weight = g.weight * jms.birth_model_dist(xi);
      birth.per_model[xi].components.push_back(std::move(scaled));
    }
  }
  return birth;
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.horizon = 60;

  const double T = 1.0;
  const double turn = 10.0 * M_PI / 180.0;
  cfg.jms.models = {cv_model(T, 5.0), ct_model(T, 5.0, turn),
                    ct_model(T, 5.0, -turn)};
  cfg.jms.tpm.resize(3, 3);
  cfg.jms.tpm << 0.8, 0.1, 0.1,
                 0.1, 0.8, 0.1,
                 0.1, 0.1, 0.8;
  cfg.jms.birth_model_dist.resize(3);
  cfg.jms.birth_model_dist << 0.5, 0.25, 0.25;
  cfg.jms.p_detect = Eigen::VectorXd::Constant(3, 0.95);
  cfg.jms.p_survive = Eigen::VectorXd::Constant(3, 0.99);

  cfg.meas.H.resize(2, 4);
  cfg.meas.H << 1, 0, 0, 0,
                0, 0, 1, 0;
  cfg.meas.R = 100.0 * Eigen::Matrix2d::Identity();
  cfg.meas.clutter_rate = 10.0;
  cfg.meas.region_min = Eigen::Vector2d(0.0, 0.0);
  cfg.meas.region_max = Eigen::Vector2d(5000.0, 5000.0);

  const Eigen::MatrixXd birth_cov =
      Eigen::Vector4d(500, 100, 500, 100).array().square().matrix().asDiagonal();
  for (const auto& mean :
       {Eigen::Vector4d(0, 0, 1500, 0), Eigen::Vector4d(3000, 0, 1000, 0),
        Eigen::Vector4d(2500, 0, 3000, 0)}) {
    cfg.birth_gm.components.emplace_back(0.1, mean, birth_cov);
  }

  // CV until k=15, counterclockwise CT from 15, clockwise at a random step
  // in [15, 30]; initial velocities keep the trajectories inside the region.
  auto make_target = [](int birth, int death, Eigen::Vector4d x0) {
    TargetScript t;
    t.birth_step = birth;
    t.death_step = death;
    t.initial_state = std::move(x0);
    t.schedule = {{1, 0}, {15, 1}};
    t.random_switch = {true, 15, 30, 2};
    return t;
  };
  cfg.targets = {make_target(1, 40, {100, 40, 1500, 20}),
                 make_target(1, 50, {3000, -30, 1000, 30}),
                 make_target(10, 61, {2500, -20, 3000, -40})};

  cfg.pd_sweep = {0.95};
  cfg.sigma_sweep = {10.0};
  cfg.num_runs = 100;
  cfg.rng_seed = 1;
  return cfg;
}

namespace {

struct RunOutput {
  bool ok = false;
  std::string error;
  std::vector<StepRecord> records;
};

RunOutput execute_run(const ScenarioConfig& cfg, const CampaignParams& params,
                      double pd, double sigma_eps, int run) {
  RunOutput out;
  const std::uint64_t run_seed = cfg.rng_seed * 1000003ull + run;

  auto truth_rng = stream(cfg.rng_seed, run, 0);
  auto detection_rng = stream(cfg.rng_seed, run, 1);
  auto clutter_rng = stream(cfg.rng_seed, run, 2);
  auto noise_rng = stream(cfg.rng_seed, run, 3);

  try {
    JmsConfig jms = cfg.jms;
    jms.p_detect.setConstant(pd);
    validate_jms(jms);

    MeasurementModel meas = cfg.meas;
    meas.R = sigma_eps * sigma_eps *
             Eigen::MatrixXd::Identity(meas.R.rows(), meas.R.cols());

    const ModelConditionedDensity birth = birth_intensity(cfg.birth_gm, jms);
    const TruthRecord truth = generate_truth(cfg, truth_rng);

    PmbmState state;
    state.ppp.per_model.resize(jms.num_models());
    state.hypotheses.push_back(GlobalHypothesis{0.0, {}});

    for (int k = 1; k <= cfg.horizon; ++k) {
      state = predict_step(state, jms, birth, params.filter);
      const auto measurements =
          generate_measurements(truth.steps[k - 1], meas, pd, sigma_eps,
                                detection_rng, noise_rng, clutter_rng);
      state = update_step(state, measurements, meas, jms, params.filter);

      const auto estimates =
          extract_estimates(state, params.filter.r_threshold);
      std::vector<Eigen::VectorXd> est_positions;
      for (const auto& e : estimates) est_positions.push_back(meas.H * e.state);
      const auto true_positions = truth.positions(k - 1, meas.H);

      StepRecord rec;
      rec.run = run;
      rec.step = k;
      rec.ospa = ospa(est_positions, true_positions, params.ospa);
      rec.card_est = static_cast<int>(estimates.size());
      rec.card_true = static_cast<int>(true_positions.size());
      rec.pd = pd;
      rec.sigma_eps = sigma_eps;
      rec.seed = run_seed;
      out.records.push_back(rec);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
    out.records.clear();
  }
  return out;
}

}  // namespace

CampaignResult run_monte_carlo(const ScenarioConfig& cfg,
                               const CampaignParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  CampaignResult result;

  for (double sigma_eps : cfg.sigma_sweep) {
    for (double pd : cfg.pd_sweep) {
      std::vector<RunOutput> outputs(cfg.num_runs);
      const int threads = std::max(1, params.threads);
      if (threads == 1) {
        for (int run = 0; run < cfg.num_runs; ++run) {
          outputs[run] = execute_run(cfg, params, pd, sigma_eps, run);
        }
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            for (int run = t; run < cfg.num_runs; run += threads) {
              outputs[run] = execute_run(cfg, params, pd, sigma_eps, run);
            }
          });
        }
        for (auto& th : pool) th.join();
      }

      CellResult cell;
      cell.pd = pd;
      cell.sigma_eps = sigma_eps;
      cell.mean_ospa_per_step.assign(cfg.horizon, 0.0);
      cell.mean_card_per_step.assign(cfg.horizon, 0.0);
      cell.true_card_per_step.assign(cfg.horizon, 0.0);
      double ospa_sum = 0.0;
      for (int run = 0; run < cfg.num_runs; ++run) {
        auto& out = outputs[run];
        if (!out.ok) {
          result.failures.push_back({pd, sigma_eps, run,
                                     cfg.rng_seed * 1000003ull + run,
                                     out.error});
          continue;
        }
        ++cell.num_runs;
        for (const auto& rec : out.records) {
          cell.mean_ospa_per_step[rec.step - 1] += rec.ospa;
          cell.mean_card_per_step[rec.step - 1] += rec.card_est;
          cell.true_card_per_step[rec.step - 1] = rec.card_true;
          ospa_sum += rec.ospa;
          result.records.push_back(rec);
        }
      }
      if (cell.num_runs > 0) {
        for (auto& v : cell.mean_ospa_per_step) v /= cell.num_runs;
        for (auto& v : cell.mean_card_per_step) v /= cell.num_runs;
        cell.mean_ospa = ospa_sum / (cell.num_runs * cfg.horizon);
      }
      result.cells.push_back(std::move(cell));
    }
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace mmpmbm
