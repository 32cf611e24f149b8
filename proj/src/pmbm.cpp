#include "mmpmbm/pmbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// ln of the smallest representable positive-normal-ish mass; used to keep the
// cost matrix finite where a true weight is 0
constexpr double kLogFloor = -690.0;

double log_sum_exp(const std::vector<double>& terms) {
  double max_term = kNegInf;
  for (double t : terms) max_term = std::max(max_term, t);
  if (!std::isfinite(max_term)) return max_term;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - max_term);
  return max_term + std::log(s);
}

void reduce_density(ModelConditionedDensity& density,
                    const FilterParams& params) {
  if (!params.enable_reduction) return;
  for (auto& gm : density.per_model) {
    if (!gm.empty()) gm = reduce_mixture(gm, params.gm_reduction);
  }
}

}  // namespace

double ModelConditionedDensity::total_weight() const {
  double s = 0.0;
  for (const auto& gm : per_model) s += gm.total_weight();
  return s;
}

int ModelConditionedDensity::component_count() const {
  int n = 0;
  for (const auto& gm : per_model) n += static_cast<int>(gm.size());
  return n;
}

Eigen::VectorXd ModelConditionedDensity::model_weights() const {
  Eigen::VectorXd w(num_models());
  for (int i = 0; i < num_models(); ++i) w(i) = per_model[i].total_weight();
  return w;
}

void ModelConditionedDensity::normalize() {
  const double total = total_weight();
  if (total <= 0.0) return;
  for (auto& gm : per_model) {
    for (auto& g : gm.components) g.weight /= total;
  }
}

// -- prediction ------------------------------------------------------------

ModelConditionedDensity predict_ppp(const ModelConditionedDensity& ppp,
                                    const JmsConfig& jms,
                                    const ModelConditionedDensity& birth) {
  const int M = jms.num_models();
  if (ppp.num_models() != M || birth.num_models() != M) {
    throw ConfigError("predict_ppp: model count mismatch");
  }
  ModelConditionedDensity out;
  out.per_model.resize(M);
  for (int to = 0; to < M; ++to) {
    out.per_model[to] = birth.per_model[to];
    for (int from = 0; from < M; ++from) {
      const double factor = jms.p_survive(from) * jms.tpm(from, to);
      for (const auto& g : ppp.per_model[from].components) {
        GaussianComponent moved =
            propagate_gaussian(jms.models[to].F, jms.models[to].Q, g);
        moved.weight = g.weight * factor;
        out.per_model[to].components.push_back(std::move(moved));
      }
    }
  }
  return out;
}

BernoulliComponent predict_bernoulli(const BernoulliComponent& b,
                                     const JmsConfig& jms) {
  const int M = jms.num_models();
  BernoulliComponent out;
  out.log_weight = b.log_weight;
  out.density.per_model.resize(M);

  double survival = 0.0;
  for (int to = 0; to < M; ++to) {
    for (int from = 0; from < M; ++from) {
      const double factor = jms.p_survive(from) * jms.tpm(from, to);
      for (const auto& g : b.density.per_model[from].components) {
        survival += factor * g.weight;
        GaussianComponent moved =
            propagate_gaussian(jms.models[to].F, jms.models[to].Q, g);
        moved.weight = g.weight * factor;
        out.density.per_model[to].components.push_back(std::move(moved));
      }
    }
  }
  out.r = b.r * survival;
  out.density.normalize();
  return out;
}

PmbmState predict_step(const PmbmState& state, const JmsConfig& jms,
                       const ModelConditionedDensity& birth,
                       const FilterParams& params) {
  PmbmState out;
  out.step = state.step + 1;
  out.ppp = predict_ppp(state.ppp, jms, birth);
  reduce_density(out.ppp, params);

  std::unordered_map<const BernoulliComponent*, BernoulliPtr> predicted;
  out.hypotheses.reserve(state.hypotheses.size());
  for (const auto& hyp : state.hypotheses) {
    GlobalHypothesis child;
    child.log_weight = hyp.log_weight;
    child.bernoullis.reserve(hyp.bernoullis.size());
    for (const auto& b : hyp.bernoullis) {
      auto it = predicted.find(b.get());
      if (it == predicted.end()) {
        auto moved = std::make_shared<BernoulliComponent>(
            predict_bernoulli(*b, jms));
        reduce_density(moved->density, params);
        it = predicted.emplace(b.get(), std::move(moved)).first;
      }
      child.bernoullis.push_back(it->second);
    }
    out.hypotheses.push_back(std::move(child));
  }
  return out;
}

// -- update branches -------------------------------------------------------

ModelConditionedDensity update_undetected(const ModelConditionedDensity& ppp,
                                          const JmsConfig& jms) {
  ModelConditionedDensity out = ppp;
  for (int xi = 0; xi < out.num_models(); ++xi) {
    const double keep = 1.0 - jms.p_detect(xi);
    for (auto& g : out.per_model[xi].components) g.weight *= keep;
  }
  return out;
}

FirstDetection update_first_detection(const ModelConditionedDensity& ppp,
                                      const Eigen::Vector2d& z,
                                      const MeasurementModel& meas,
                                      const JmsConfig& jms) {
  if (!meas.in_region(z)) {
    throw ConfigError("update_first_detection: measurement outside region");
  }
  const int M = jms.num_models();
  FirstDetection out;
  out.bernoulli.density.per_model.resize(M);

  double e = 0.0;
  for (int xi = 0; xi < M; ++xi) {
    for (const auto& g : ppp.per_model[xi].components) {
      const auto upd = bayes_update_gaussian(meas.H, meas.R, z, g);
      const double w = jms.p_detect(xi) * g.weight * upd.likelihood();
      if (w <= 0.0) continue;
      e += w;
      GaussianComponent post = upd.posterior;
      post.weight = w;
      out.bernoulli.density.per_model[xi].components.push_back(
          std::move(post));
    }
  }
  const double c = meas.clutter_density();
  out.rho_p = e + c;
  out.bernoulli.r = out.rho_p > 0.0 ? e / out.rho_p : 0.0;
  out.bernoulli.density.normalize();
  out.bernoulli.log_weight =
      out.rho_p > 0.0 ? std::log(out.rho_p) : kNegInf;
  return out;
}

double misdetection_rho(const BernoulliComponent& b, const JmsConfig& jms) {
  double miss = 0.0;
  for (int xi = 0; xi < jms.num_models(); ++xi) {
    miss += (1.0 - jms.p_detect(xi)) *
            b.density.per_model[xi].total_weight();
  }
  return 1.0 - b.r + b.r * miss;
}

BernoulliComponent update_misdetection(const BernoulliComponent& b,
                                       const JmsConfig& jms) {
  const int M = jms.num_models();
  double miss = 0.0;
  BernoulliComponent out;
  out.density.per_model.resize(M);
  for (int xi = 0; xi < M; ++xi) {
    const double keep = 1.0 - jms.p_detect(xi);
    for (const auto& g : b.density.per_model[xi].components) {
      miss += keep * g.weight;
      GaussianComponent kept = g;
      kept.weight = g.weight * keep;
      out.density.per_model[xi].components.push_back(std::move(kept));
    }
  }
  const double rho = 1.0 - b.r + b.r * miss;
  out.r = rho > 0.0 ? b.r * miss / rho : 0.0;
  if (miss > 0.0) {
    out.density.normalize();
  } else {
    // p_D = 1 everywhere: the density factor vanishes along with r; keep the
    // prior shape so the component stays well formed until pruned
    out.density = b.density;
  }
  out.log_weight = b.log_weight + (rho > 0.0 ? std::log(rho) : kNegInf);
  return out;
}

MeasurementUpdate update_with_measurement(const BernoulliComponent& b,
                                          const Eigen::Vector2d& z,
                                          const MeasurementModel& meas,
                                          const JmsConfig& jms) {
  const int M = jms.num_models();
  MeasurementUpdate out;
  out.bernoulli.r = 1.0;
  out.bernoulli.density.per_model.resize(M);

  double detected = 0.0;
  for (int xi = 0; xi < M; ++xi) {
    for (const auto& g : b.density.per_model[xi].components) {
      const auto upd = bayes_update_gaussian(meas.H, meas.R, z, g);
      const double w = jms.p_detect(xi) * g.weight * upd.likelihood();
      if (w <= 0.0) continue;
      detected += w;
      GaussianComponent post = upd.posterior;
      post.weight = w;
      out.bernoulli.density.per_model[xi].components.push_back(
          std::move(post));
    }
  }
  out.rho_z = b.r * detected;
  if (detected > 0.0) {
    out.bernoulli.density.normalize();
  } else {
    out.bernoulli.density = b.density;
  }
  out.bernoulli.log_weight =
      b.log_weight + (out.rho_z > 0.0 ? std::log(out.rho_z) : kNegInf);
  return out;
}

// -- association -----------------------------------------------------------

Eigen::MatrixXd build_cost_matrix(const Eigen::MatrixXd& log_rho_z,
                                  const Eigen::VectorXd& log_rho_empty,
                                  const Eigen::VectorXd& log_rho_p) {
  const int m = static_cast<int>(log_rho_z.rows());
  const int n = static_cast<int>(log_rho_z.cols());
  if (log_rho_empty.size() != n || log_rho_p.size() != m) {
    throw ConfigError("build_cost_matrix: dimension mismatch");
  }
  Eigen::MatrixXd costs =
      Eigen::MatrixXd::Constant(m, n + m, kInfeasibleCost);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (log_rho_z(i, j) == kNegInf) continue;
      costs(i, j) = -(std::max(log_rho_z(i, j), kLogFloor) -
                      std::max(log_rho_empty(j), kLogFloor));
    }
    costs(i, n + i) = -std::max(log_rho_p(i), kLogFloor);
  }
  return costs;
}

namespace {

struct TrackUpdates {
  BernoulliPtr misdetected;
  double log_rho_empty = kNegInf;
  // per global measurement index, gated pairs only
  std::unordered_map<int, std::pair<double, BernoulliPtr>> by_measurement;
};

}  // namespace

PmbmState update_step(const PmbmState& state,
                      const std::vector<Eigen::Vector2d>& measurements,
                      const MeasurementModel& meas, const JmsConfig& jms,
                      const FilterParams& params) {
  const int m = static_cast<int>(measurements.size());

  PmbmState out;
  out.step = state.step;
  out.ppp = update_undetected(state.ppp, jms);
  reduce_density(out.ppp, params);

  // first-detection branch, shared by every parent hypothesis
  std::vector<double> log_rho_p(m);
  std::vector<BernoulliPtr> new_tracks(m);
  std::vector<bool> pure_clutter(m, false);
  const double c = meas.clutter_density();
  for (int i = 0; i < m; ++i) {
    FirstDetection fd =
        update_first_detection(state.ppp, measurements[i], meas, jms);
    log_rho_p[i] = fd.rho_p > 0.0 ? std::log(fd.rho_p) : kNegInf;
    // a measurement whose detection mass is negligible against clutter
    // contributes its weight but spawns no track
    pure_clutter[i] = fd.rho_p <= 0.0 || (fd.rho_p - c) < 1e-6 * fd.rho_p;
    if (!pure_clutter[i]) {
      reduce_density(fd.bernoulli.density, params);
      new_tracks[i] =
          std::make_shared<BernoulliComponent>(std::move(fd.bernoulli));
    }
  }

  // per unique predicted Bernoulli: misdetection plus gated measurement
  // updates, computed once and shared across hypotheses
  std::unordered_map<const BernoulliComponent*, TrackUpdates> updates;
  for (const auto& hyp : state.hypotheses) {
    for (const auto& b : hyp.bernoullis) {
      if (updates.count(b.get())) continue;
      TrackUpdates tu;
      BernoulliComponent mis = update_misdetection(*b, jms);
      tu.log_rho_empty = mis.log_weight - b->log_weight;
      reduce_density(mis.density, params);
      tu.misdetected = std::make_shared<BernoulliComponent>(std::move(mis));
      for (int zi : gate_measurements(*b, measurements, meas,
                                      params.gate_chi2)) {
        MeasurementUpdate mu =
            update_with_measurement(*b, measurements[zi], meas, jms);
        if (mu.rho_z <= 0.0) continue;
        reduce_density(mu.bernoulli.density, params);
        tu.by_measurement.emplace(
            zi, std::make_pair(std::log(mu.rho_z),
                               std::make_shared<BernoulliComponent>(
                                   std::move(mu.bernoulli))));
      }
      updates.emplace(b.get(), std::move(tu));
    }
  }

  // expand each parent hypothesis through its k best associations
  std::vector<GlobalHypothesis> children;
  for (const auto& hyp : state.hypotheses) {
    const int n = static_cast<int>(hyp.bernoullis.size());
    Eigen::MatrixXd log_rho_z = Eigen::MatrixXd::Constant(m, n, kNegInf);
    Eigen::VectorXd log_rho_empty(n);
    for (int j = 0; j < n; ++j) {
      const TrackUpdates& tu = updates.at(hyp.bernoullis[j].get());
      log_rho_empty(j) = tu.log_rho_empty;
      for (const auto& [zi, entry] : tu.by_measurement) {
        log_rho_z(zi, j) = entry.first;
      }
    }
    Eigen::VectorXd log_rho_p_vec =
        Eigen::Map<const Eigen::VectorXd>(log_rho_p.data(), m);
    const Eigen::MatrixXd costs =
        build_cost_matrix(log_rho_z, log_rho_empty, log_rho_p_vec);

    const int k = std::max(
        1, static_cast<int>(std::ceil(params.k_best_total *
                                      std::exp(hyp.log_weight))));
    for (const Assignment& a : k_best_assignments({costs}, k)) {
      GlobalHypothesis child;
      child.log_weight = hyp.log_weight;
      std::vector<int> col_to_row(n, -1);
      for (int i = 0; i < m; ++i) {
        if (a.row_to_col[i] < n) col_to_row[a.row_to_col[i]] = i;
      }
      for (int j = 0; j < n; ++j) {
        const TrackUpdates& tu = updates.at(hyp.bernoullis[j].get());
        BernoulliPtr next;
        if (col_to_row[j] >= 0) {
          const auto& entry = tu.by_measurement.at(col_to_row[j]);
          child.log_weight += entry.first;
          next = entry.second;
        } else {
          child.log_weight += tu.log_rho_empty;
          next = tu.misdetected;
        }
        if (!params.enable_reduction || next->r >= params.bernoulli_prune) {
          child.bernoullis.push_back(std::move(next));
        }
      }
      for (int i = 0; i < m; ++i) {
        if (a.row_to_col[i] < n) continue;
        child.log_weight += log_rho_p[i];
        if (!pure_clutter[i]) {
          if (!params.enable_reduction ||
              new_tracks[i]->r >= params.bernoulli_prune) {
            child.bernoullis.push_back(new_tracks[i]);
          }
        }
      }
      children.push_back(std::move(child));
    }
  }

  // normalize hypothesis weights, then prune and cap
  std::vector<double> lw;
  lw.reserve(children.size());
  for (const auto& h : children) lw.push_back(h.log_weight);
  const double lse = log_sum_exp(lw);
  if (std::isfinite(lse)) {
    for (auto& h : children) h.log_weight -= lse;
  } else {
    const double uniform = -std::log(static_cast<double>(children.size()));
    for (auto& h : children) h.log_weight = uniform;
  }

  if (params.enable_reduction) {
    std::stable_sort(children.begin(), children.end(),
                     [](const auto& a, const auto& b) {
                       return a.log_weight > b.log_weight;
                     });
    const double log_prune = std::log(params.hypothesis_prune);
    while (children.size() > 1 &&
           (children.back().log_weight < log_prune ||
            static_cast<int>(children.size()) > params.hypothesis_cap)) {
      children.pop_back();
    }
    std::vector<double> lw2;
    for (const auto& h : children) lw2.push_back(h.log_weight);
    const double lse2 = log_sum_exp(lw2);
    for (auto& h : children) h.log_weight -= lse2;
  }

  out.hypotheses = std::move(children);
  if (out.hypotheses.empty()) {
    out.hypotheses.push_back(GlobalHypothesis{0.0, {}});
  }
  return out;
}

// -- extraction ------------------------------------------------------------

std::vector<TargetEstimate> extract_estimates(const PmbmState& state,
                                              double r_threshold) {
  const GlobalHypothesis* best = nullptr;
  for (const auto& h : state.hypotheses) {
    if (!best || h.log_weight > best->log_weight) best = &h;
  }
  std::vector<TargetEstimate> estimates;
  if (!best) return estimates;
  for (const auto& b : best->bernoullis) {
    if (b->r <= r_threshold) continue;
    TargetEstimate est;
    est.r = b->r;
    const int M = b->density.num_models();
    est.model_probability = b->density.model_weights();
    Eigen::VectorXd mean;
    for (int xi = 0; xi < M; ++xi) {
      for (const auto& g : b->density.per_model[xi].components) {
        if (mean.size() == 0) mean = Eigen::VectorXd::Zero(g.dim());
        mean += g.weight * g.mean;
      }
    }
    est.state = std::move(mean);
    estimates.push_back(std::move(est));
  }
  return estimates;
}

std::vector<int> gate_measurements(const BernoulliComponent& b,
                                   const std::vector<Eigen::Vector2d>& measurements,
                                   const MeasurementModel& meas,
                                   double gate_chi2) {
  return gate_measurements(b.density.per_model, measurements, meas, gate_chi2);
}

}  // namespace mmpmbm
