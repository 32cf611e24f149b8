#include "mmpmbm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return &v;
    }
    return nullptr;
  }
  std::vector<std::string> find_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries) {
      if (k == key) out.push_back(v);
    }
    return out;
  }
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<Section> parse_sections(std::istream& in) {
  std::vector<Section> sections;
  sections.push_back({"", {}});
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                         trim(line.substr(eq + 1)));
  }
  return sections;
}

std::vector<double> parse_doubles(const std::string& text,
                                  const std::string& field) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string token;
  while (ss >> token) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("config field '" + field + "': bad number '" + token +
                        "'");
    }
  }
  if (out.empty()) throw ConfigError("config field '" + field + "': empty");
  return out;
}

double parse_double(const std::string& text, const std::string& field) {
  const auto v = parse_doubles(text, field);
  if (v.size() != 1) {
    throw ConfigError("config field '" + field + "': expected one number");
  }
  return v.front();
}

int parse_int(const std::string& text, const std::string& field) {
  const double v = parse_double(text, field);
  if (v != std::floor(v)) {
    throw ConfigError("config field '" + field + "': expected integer");
  }
  return static_cast<int>(v);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

Eigen::VectorXd broadcast(const std::vector<double>& v, int n,
                          const std::string& field) {
  if (static_cast<int>(v.size()) == 1) {
    return Eigen::VectorXd::Constant(n, v.front());
  }
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError("config field '" + field + "': expected 1 or " +
                      std::to_string(n) + " values");
  }
  return to_vector(v);
}

void require_keys(const Section& s,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : s.entries) {
    bool known = false;
    for (const char* a : allowed) known = known || k == a;
    if (!known) {
      throw ConfigError("config section [" + s.name + "]: unknown key '" + k +
                        "'");
    }
  }
}

void apply_scenario(const Section& s, ScenarioConfig& cfg) {
  require_keys(s, {"horizon", "num_runs", "rng_seed", "pd_sweep",
                   "sigma_sweep", "position_jitter_sigma"});
  if (auto* v = s.find("horizon")) cfg.horizon = parse_int(*v, "horizon");
  if (auto* v = s.find("num_runs")) cfg.num_runs = parse_int(*v, "num_runs");
  if (auto* v = s.find("rng_seed")) {
    cfg.rng_seed = static_cast<std::uint64_t>(parse_double(*v, "rng_seed"));
  }
  if (auto* v = s.find("pd_sweep")) cfg.pd_sweep = parse_doubles(*v, "pd_sweep");
  if (auto* v = s.find("sigma_sweep")) {
    cfg.sigma_sweep = parse_doubles(*v, "sigma_sweep");
  }
  if (auto* v = s.find("position_jitter_sigma")) {
    cfg.position_jitter_sigma = parse_double(*v, "position_jitter_sigma");
  }
}

void apply_jms(const Section& s, JmsConfig& jms) {
  require_keys(s, {"sampling_period", "model", "tpm", "birth_model_dist",
                   "p_detect", "p_survive"});
  double T = 1.0;
  if (auto* v = s.find("sampling_period")) {
    T = parse_double(*v, "sampling_period");
  }
  const auto model_lines = s.find_all("model");
  if (!model_lines.empty()) {
    jms.models.clear();
    for (const auto& line : model_lines) {
      std::istringstream ss(line);
      std::string kind;
      ss >> kind;
      if (kind == "cv") {
        double sigma;
        if (!(ss >> sigma)) throw ConfigError("config model: cv needs sigma");
        jms.models.push_back(cv_model(T, sigma));
      } else if (kind == "ct") {
        double sigma, turn_deg;
        if (!(ss >> sigma >> turn_deg)) {
          throw ConfigError("config model: ct needs sigma and turn rate");
        }
        jms.models.push_back(ct_model(T, sigma, turn_deg * M_PI / 180.0));
      } else {
        throw ConfigError("config model: unknown kind '" + kind + "'");
      }
    }
  }
  const int M = jms.num_models();
  if (auto* v = s.find("tpm")) {
    std::vector<std::vector<double>> rows;
    std::istringstream ss(*v);
    std::string row_text;
    while (std::getline(ss, row_text, ';')) {
      rows.push_back(parse_doubles(row_text, "tpm"));
    }
    if (static_cast<int>(rows.size()) != M) {
      throw ConfigError("config field 'tpm': expected " + std::to_string(M) +
                        " rows");
    }
    jms.tpm.resize(M, M);
    for (int r = 0; r < M; ++r) {
      if (static_cast<int>(rows[r].size()) != M) {
        throw ConfigError("config field 'tpm': row " + std::to_string(r) +
                          " has wrong length");
      }
      for (int c = 0; c < M; ++c) jms.tpm(r, c) = rows[r][c];
    }
  }
  if (auto* v = s.find("birth_model_dist")) {
    jms.birth_model_dist =
        broadcast(parse_doubles(*v, "birth_model_dist"), M, "birth_model_dist");
  }
  if (auto* v = s.find("p_detect")) {
    jms.p_detect = broadcast(parse_doubles(*v, "p_detect"), M, "p_detect");
  }
  if (auto* v = s.find("p_survive")) {
    jms.p_survive = broadcast(parse_doubles(*v, "p_survive"), M, "p_survive");
  }
}

void apply_measurement(const Section& s, MeasurementModel& meas) {
  require_keys(s, {"clutter_rate", "region"});
  if (auto* v = s.find("clutter_rate")) {
    meas.clutter_rate = parse_double(*v, "clutter_rate");
  }
  if (auto* v = s.find("region")) {
    const auto r = parse_doubles(*v, "region");
    if (r.size() != 4) {
      throw ConfigError("config field 'region': expected xmin xmax ymin ymax");
    }
    meas.region_min = Eigen::Vector2d(r[0], r[2]);
    meas.region_max = Eigen::Vector2d(r[1], r[3]);
  }
}

void apply_birth(const Section& s, GaussianMixture& birth) {
  require_keys(s, {"component_weight", "std_diag", "mean"});
  const auto means = s.find_all("mean");
  if (means.empty()) return;
  double w = 0.1;
  if (auto* v = s.find("component_weight")) {
    w = parse_double(*v, "component_weight");
  }
  Eigen::VectorXd std_diag;
  if (auto* v = s.find("std_diag")) {
    std_diag = to_vector(parse_doubles(*v, "std_diag"));
  } else {
    throw ConfigError("config [birth]: std_diag required with means");
  }
  birth.components.clear();
  for (const auto& text : means) {
    const Eigen::VectorXd m = to_vector(parse_doubles(text, "birth mean"));
    if (m.size() != std_diag.size()) {
      throw ConfigError("config [birth]: mean/std_diag length mismatch");
    }
    birth.components.emplace_back(
        w, m,
        Eigen::MatrixXd(std_diag.array().square().matrix().asDiagonal()));
  }
}

TargetScript parse_target(const Section& s) {
  require_keys(s, {"birth_step", "death_step", "initial_state", "schedule",
                   "random_switch"});
  TargetScript t;
  if (auto* v = s.find("birth_step")) t.birth_step = parse_int(*v, "birth_step");
  if (auto* v = s.find("death_step")) t.death_step = parse_int(*v, "death_step");
  if (auto* v = s.find("initial_state")) {
    t.initial_state = to_vector(parse_doubles(*v, "initial_state"));
  } else {
    throw ConfigError("config [target]: initial_state required");
  }
  if (auto* v = s.find("schedule")) {
    t.schedule.clear();
    std::istringstream ss(*v);
    std::string token;
    while (ss >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("config [target]: schedule entries are step:model");
      }
      t.schedule.emplace_back(parse_int(token.substr(0, colon), "schedule"),
                              parse_int(token.substr(colon + 1), "schedule"));
    }
    if (t.schedule.empty()) {
      throw ConfigError("config [target]: empty schedule");
    }
  }
  if (auto* v = s.find("random_switch")) {
    if (*v == "none") {
      t.random_switch.enabled = false;
    } else {
      const auto r = parse_doubles(*v, "random_switch");
      if (r.size() != 3) {
        throw ConfigError(
            "config [target]: random_switch = lo hi model (or none)");
      }
      t.random_switch = {true, static_cast<int>(r[0]), static_cast<int>(r[1]),
                         static_cast<int>(r[2])};
    }
  }
  return t;
}

void apply_filter(const Section& s, FilterParams& f) {
  require_keys(s, {"gm_prune", "gm_merge", "gm_cap", "hypothesis_prune",
                   "hypothesis_cap", "bernoulli_prune", "k_best_total",
                   "gate_chi2", "r_threshold"});
  if (auto* v = s.find("gm_prune")) {
    f.gm_reduction.prune_threshold = parse_double(*v, "gm_prune");
  }
  if (auto* v = s.find("gm_merge")) {
    f.gm_reduction.merge_threshold = parse_double(*v, "gm_merge");
  }
  if (auto* v = s.find("gm_cap")) {
    f.gm_reduction.max_components = parse_int(*v, "gm_cap");
  }
  if (auto* v = s.find("hypothesis_prune")) {
    f.hypothesis_prune = parse_double(*v, "hypothesis_prune");
  }
  if (auto* v = s.find("hypothesis_cap")) {
    f.hypothesis_cap = parse_int(*v, "hypothesis_cap");
  }
  if (auto* v = s.find("bernoulli_prune")) {
    f.bernoulli_prune = parse_double(*v, "bernoulli_prune");
  }
  if (auto* v = s.find("k_best_total")) {
    f.k_best_total = parse_int(*v, "k_best_total");
  }
  if (auto* v = s.find("gate_chi2")) f.gate_chi2 = parse_double(*v, "gate_chi2");
  if (auto* v = s.find("r_threshold")) {
    f.r_threshold = parse_double(*v, "r_threshold");
  }
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  cfg.scenario = default_scenario();

  const auto sections = parse_sections(in);
  bool targets_replaced = false;
  for (const auto& s : sections) {
    if (s.name.empty() && s.entries.empty()) continue;
    if (s.name == "scenario") {
      apply_scenario(s, cfg.scenario);
    } else if (s.name == "jms") {
      apply_jms(s, cfg.scenario.jms);
    } else if (s.name == "measurement") {
      apply_measurement(s, cfg.scenario.meas);
    } else if (s.name == "birth") {
      apply_birth(s, cfg.scenario.birth_gm);
    } else if (s.name == "target") {
      if (!targets_replaced) {
        cfg.scenario.targets.clear();
        targets_replaced = true;
      }
      cfg.scenario.targets.push_back(parse_target(s));
    } else if (s.name == "filter") {
      apply_filter(s, cfg.campaign.filter);
    } else if (s.name == "ospa") {
      require_keys(s, {"cutoff", "order"});
      if (auto* v = s.find("cutoff")) {
        cfg.campaign.ospa.cutoff = parse_double(*v, "ospa cutoff");
      }
      if (auto* v = s.find("order")) {
        cfg.campaign.ospa.order = parse_double(*v, "ospa order");
      }
    } else if (s.name == "output") {
      require_keys(s, {"dir", "formats"});
      if (auto* v = s.find("dir")) cfg.out_dir = *v;
      if (auto* v = s.find("formats")) {
        cfg.write_csv = v->find("csv") != std::string::npos;
        cfg.write_json = v->find("json") != std::string::npos;
        cfg.write_svg = v->find("svg") != std::string::npos;
      }
    } else if (!s.name.empty()) {
      throw ConfigError("config: unknown section [" + s.name + "]");
    }
  }
  return cfg;
}

void validate_run_config(const RunConfig& cfg) {
  validate_jms(cfg.scenario.jms);
  if (cfg.scenario.horizon < 1) throw ConfigError("scenario: horizon < 1");
  if (cfg.scenario.num_runs < 1) throw ConfigError("scenario: num_runs < 1");
  if (cfg.scenario.pd_sweep.empty() || cfg.scenario.sigma_sweep.empty()) {
    throw ConfigError("scenario: empty sweep list");
  }
  for (double pd : cfg.scenario.pd_sweep) {
    if (pd < 0.0 || pd > 1.0) throw ConfigError("scenario: pd outside [0,1]");
  }
  for (double sig : cfg.scenario.sigma_sweep) {
    if (sig <= 0.0) throw ConfigError("scenario: sigma_eps must be positive");
  }
  const int M = cfg.scenario.jms.num_models();
  const Eigen::Index d = cfg.scenario.jms.state_dim();
  int idx = 0;
  for (const auto& t : cfg.scenario.targets) {
    ++idx;
    const std::string tag = "target " + std::to_string(idx);
    if (t.birth_step < 1 || t.birth_step >= t.death_step ||
        t.birth_step > cfg.scenario.horizon ||
        t.death_step > cfg.scenario.horizon + 1) {
      throw ConfigError(tag + ": birth/death schedule invalid");
    }
    if (t.initial_state.size() != d) {
      throw ConfigError(tag + ": initial_state dimension mismatch");
    }
    for (const auto& [step, model] : t.schedule) {
      if (model < 0 || model >= M) {
        throw ConfigError(tag + ": schedule references model " +
                          std::to_string(model));
      }
    }
    if (t.random_switch.enabled &&
        (t.random_switch.model < 0 || t.random_switch.model >= M)) {
      throw ConfigError(tag + ": random_switch references invalid model");
    }
  }
  for (const auto& g : cfg.scenario.birth_gm.components) {
    if (g.mean.size() != d) {
      throw ConfigError("birth: component dimension mismatch");
    }
  }
  if (cfg.campaign.ospa.cutoff <= 0.0 || cfg.campaign.ospa.order < 1.0) {
    throw ConfigError("ospa: need cutoff > 0 and order >= 1");
  }
  const auto& f = cfg.campaign.filter;
  if (f.hypothesis_cap < 1 || f.k_best_total < 1 ||
      f.gm_reduction.max_components < 1 || f.gate_chi2 <= 0.0) {
    throw ConfigError("filter: invalid reduction/assignment parameters");
  }
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::string join(const Eigen::VectorXd& v) {
  std::ostringstream ss;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) ss << ' ';
    ss << v(i);
  }
  return ss.str();
}

}  // namespace

std::string run_config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& sc = cfg.scenario;
  out << "[scenario]\n";
  out << "horizon = " << sc.horizon << "\n";
  out << "num_runs = " << sc.num_runs << "\n";
  out << "rng_seed = " << sc.rng_seed << "\n";
  out << "pd_sweep =";
  for (double v : sc.pd_sweep) out << ' ' << fmt(v);
  out << "\nsigma_sweep =";
  for (double v : sc.sigma_sweep) out << ' ' << fmt(v);
  out << "\nposition_jitter_sigma = " << fmt(sc.position_jitter_sigma) << "\n";

  out << "\n[jms]\n";
  for (const auto& m : sc.jms.models) {
    if (const auto* cv = std::get_if<CvDescriptor>(&m.descriptor)) {
      out << "model = cv " << fmt(cv->sigma) << "\n";
    } else {
      const auto& ct = std::get<CtDescriptor>(m.descriptor);
      out << "model = ct " << fmt(ct.sigma) << ' '
          << fmt(ct.turn_rate * 180.0 / M_PI) << "\n";
    }
  }
  out << "tpm = ";
  for (int r = 0; r < sc.jms.num_models(); ++r) {
    if (r) out << " ; ";
    out << join(sc.jms.tpm.row(r));
  }
  out << "\nbirth_model_dist = " << join(sc.jms.birth_model_dist) << "\n";
  out << "p_detect = " << join(sc.jms.p_detect) << "\n";
  out << "p_survive = " << join(sc.jms.p_survive) << "\n";

  out << "\n[measurement]\n";
  out << "clutter_rate = " << fmt(sc.meas.clutter_rate) << "\n";
  out << "region = " << sc.meas.region_min(0) << ' ' << sc.meas.region_max(0)
      << ' ' << sc.meas.region_min(1) << ' ' << sc.meas.region_max(1) << "\n";

  if (!sc.birth_gm.components.empty()) {
    out << "\n[birth]\n";
    out << "component_weight = " << fmt(sc.birth_gm.components[0].weight)
        << "\n";
    out << "std_diag = "
        << join(sc.birth_gm.components[0].cov.diagonal().cwiseSqrt()) << "\n";
    for (const auto& g : sc.birth_gm.components) {
      out << "mean = " << join(g.mean) << "\n";
    }
  }

  for (const auto& t : sc.targets) {
    out << "\n[target]\n";
    out << "birth_step = " << t.birth_step << "\n";
    out << "death_step = " << t.death_step << "\n";
    out << "initial_state = " << join(t.initial_state) << "\n";
    out << "schedule =";
    for (const auto& [step, model] : t.schedule) {
      out << ' ' << step << ':' << model;
    }
    out << "\n";
    if (t.random_switch.enabled) {
      out << "random_switch = " << t.random_switch.window_lo << ' '
          << t.random_switch.window_hi << ' ' << t.random_switch.model << "\n";
    } else {
      out << "random_switch = none\n";
    }
  }

  const auto& f = cfg.campaign.filter;
  out << "\n[filter]\n";
  out << "gm_prune = " << fmt(f.gm_reduction.prune_threshold) << "\n";
  out << "gm_merge = " << fmt(f.gm_reduction.merge_threshold) << "\n";
  out << "gm_cap = " << f.gm_reduction.max_components << "\n";
  out << "hypothesis_prune = " << fmt(f.hypothesis_prune) << "\n";
  out << "hypothesis_cap = " << f.hypothesis_cap << "\n";
  out << "bernoulli_prune = " << fmt(f.bernoulli_prune) << "\n";
  out << "k_best_total = " << f.k_best_total << "\n";
  out << "gate_chi2 = " << fmt(f.gate_chi2) << "\n";
  out << "r_threshold = " << fmt(f.r_threshold) << "\n";

  out << "\n[ospa]\n";
  out << "cutoff = " << fmt(cfg.campaign.ospa.cutoff) << "\n";
  out << "order = " << fmt(cfg.campaign.ospa.order) << "\n";

  out << "\n[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  out << "formats =";
  if (cfg.write_csv) out << " csv";
  if (cfg.write_json) out << " json";
  if (cfg.write_svg) out << " svg";
  out << "\n";
  return out.str();
}

}  // namespace mmpmbm
