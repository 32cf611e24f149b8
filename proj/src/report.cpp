#include "mmpmbm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

#include "mmpmbm/errors.hpp"

namespace mmpmbm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_records_csv(const CampaignResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "run,step,ospa,card_est,card_true,pd,sigma_eps,seed\n";
  char buf[160];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%d,%d,%.4f,%.4f,%llu\n",
                  r.run, r.step, r.ospa, r.card_est, r.card_true, r.pd,
                  r.sigma_eps, static_cast<unsigned long long>(r.seed));
    out << buf;
  }
}

void write_summary_json(const CampaignResult& result, const std::string& path) {
  nlohmann::json j;
  j["wall_seconds"] = result.wall_seconds;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : result.cells) {
    j["cells"].push_back({{"pd", c.pd},
                          {"sigma_eps", c.sigma_eps},
                          {"num_runs", c.num_runs},
                          {"mean_ospa", c.mean_ospa},
                          {"mean_ospa_per_step", c.mean_ospa_per_step},
                          {"mean_card_per_step", c.mean_card_per_step},
                          {"true_card_per_step", c.true_card_per_step}});
  }
  j["failures"] = nlohmann::json::array();
  for (const auto& f : result.failures) {
    j["failures"].push_back({{"pd", f.pd},
                             {"sigma_eps", f.sigma_eps},
                             {"run", f.run},
                             {"seed", f.seed},
                             {"message", f.message}});
  }
  open_out(path) << j.dump(2) << "\n";
}

namespace {

/// Minimal line chart: axes, per-cell polyline, legend.
void write_line_chart(const CampaignResult& result, const std::string& path,
                      const std::string& title, bool cardinality) {
  constexpr int kW = 720, kH = 420;
  constexpr int kL = 60, kR = 20, kT = 40, kB = 50;

  std::size_t horizon = 0;
  double ymax = 1.0;
  for (const auto& c : result.cells) {
    const auto& series =
        cardinality ? c.mean_card_per_step : c.mean_ospa_per_step;
    horizon = std::max(horizon, series.size());
    for (double v : series) ymax = std::max(ymax, v);
    if (cardinality) {
      for (double v : c.true_card_per_step) ymax = std::max(ymax, v);
    }
  }
  ymax *= 1.05;

  auto xpix = [&](double k) {
    return kL + (k - 1.0) / std::max<double>(1.0, horizon - 1.0) *
                    (kW - kL - kR);
  };
  auto ypix = [&](double v) { return kH - kB - v / ymax * (kH - kT - kB); };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title
      << "</text>\n";
  out << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\""
      << kW - kR << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
      << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = ymax * tick / 4.0;
    out << "<text x=\"" << kL - 6 << "\" y=\"" << ypix(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << std::fixed << std::setprecision(1) << v << "</text>\n";
  }
  out << "<text x=\"" << (kW + kL) / 2 << "\" y=\"" << kH - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">time step k</text>\n";

  int color = 0;
  for (const auto& c : result.cells) {
    const auto& series =
        cardinality ? c.mean_card_per_step : c.mean_ospa_per_step;
    if (series.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << kColors[color % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series.size(); ++k) {
      out << xpix(k + 1) << ',' << ypix(series[k]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kW - kR - 4 << "\" y=\"" << kT + 16 * (color + 1)
        << "\" text-anchor=\"end\" fill=\"" << kColors[color % 8]
        << "\" font-family=\"sans-serif\" font-size=\"11\">pd=" << c.pd
        << " sigma=" << c.sigma_eps << "</text>\n";
    ++color;
  }
  if (cardinality && !result.cells.empty()) {
    const auto& truth = result.cells.front().true_card_per_step;
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" "
        << "stroke-dasharray=\"4 3\" points=\"";
    for (std::size_t k = 0; k < truth.size(); ++k) {
      out << xpix(k + 1) << ',' << ypix(truth[k]) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void write_ospa_svg(const CampaignResult& result, const std::string& path) {
  write_line_chart(result, path, "Mean OSPA vs time", false);
}

void write_cardinality_svg(const CampaignResult& result,
                           const std::string& path) {
  write_line_chart(result, path, "Mean cardinality vs time", true);
}

void print_summary_table(const CampaignResult& result, std::ostream& out) {
  out << std::left << std::setw(12) << "pd";
  for (const auto& c : result.cells) {
    out << std::right << std::setw(10) << std::fixed << std::setprecision(2)
        << c.pd;
  }
  out << "\n" << std::left << std::setw(12) << "sigma_eps";
  for (const auto& c : result.cells) {
    out << std::right << std::setw(10) << std::fixed << std::setprecision(2)
        << c.sigma_eps;
  }
  out << "\n" << std::left << std::setw(12) << "mean OSPA";
  for (const auto& c : result.cells) {
    out << std::right << std::setw(10) << std::fixed << std::setprecision(4)
        << c.mean_ospa;
  }
  out << "\n";
  if (!result.failures.empty()) {
    out << result.failures.size() << " run(s) failed; see JSON summary\n";
  }
}

}  // namespace mmpmbm
