#include "mmpmbm/serialize.hpp"

#include <nlohmann/json.hpp>

namespace mmpmbm {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j.at(0).size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c);
  }
  return m;
}

json component_to_json(const GaussianComponent& g) {
  return json{{"w", g.weight},
              {"mean", std::vector<double>(g.mean.data(),
                                           g.mean.data() + g.mean.size())},
              {"cov", matrix_to_json(g.cov)}};
}

GaussianComponent component_from_json(const json& j) {
  GaussianComponent g;
  g.weight = j.at("w");
  const auto mean = j.at("mean").get<std::vector<double>>();
  g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
  g.cov = matrix_from_json(j.at("cov"));
  return g;
}

json density_to_json(const ModelConditionedDensity& d) {
  json models = json::array();
  for (const auto& gm : d.per_model) {
    json comps = json::array();
    for (const auto& g : gm.components) comps.push_back(component_to_json(g));
    models.push_back(std::move(comps));
  }
  return models;
}

ModelConditionedDensity density_from_json(const json& j) {
  ModelConditionedDensity d;
  for (const auto& model : j) {
    GaussianMixture gm;
    for (const auto& comp : model) {
      gm.components.push_back(component_from_json(comp));
    }
    d.per_model.push_back(std::move(gm));
  }
  return d;
}

}  // namespace

json state_to_json(const PmbmState& state) {
  json hyps = json::array();
  for (const auto& h : state.hypotheses) {
    json bernoullis = json::array();
    for (const auto& b : h.bernoullis) {
      bernoullis.push_back(json{{"r", b->r},
                                {"log_weight", b->log_weight},
                                {"density", density_to_json(b->density)}});
    }
    hyps.push_back(json{{"log_weight", h.log_weight},
                        {"bernoullis", std::move(bernoullis)}});
  }
  return json{{"step", state.step},
              {"ppp", density_to_json(state.ppp)},
              {"hypotheses", std::move(hyps)}};
}

PmbmState state_from_json(const json& j) {
  PmbmState state;
  state.step = j.at("step");
  state.ppp = density_from_json(j.at("ppp"));
  for (const auto& h : j.at("hypotheses")) {
    GlobalHypothesis hyp;
    hyp.log_weight = h.at("log_weight");
    for (const auto& b : h.at("bernoullis")) {
      BernoulliComponent bc;
      bc.r = b.at("r");
      bc.log_weight = b.at("log_weight");
      bc.density = density_from_json(b.at("density"));
      hyp.bernoullis.push_back(
          std::make_shared<BernoulliComponent>(std::move(bc)));
    }
    state.hypotheses.push_back(std::move(hyp));
  }
  return state;
}

std::string state_to_json_string(const PmbmState& state, int indent) {
  return state_to_json(state).dump(indent);
}

}  // namespace mmpmbm
