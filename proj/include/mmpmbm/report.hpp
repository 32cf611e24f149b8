#pragma once

#include <iosfwd>
#include <string>

#include "mmpmbm/simulator.hpp"

namespace mmpmbm {

/// CSV schema: run,step,ospa,card_est,card_true,pd,sigma_eps,seed — one row
/// per step per run, fixed formatting so identical campaigns are
/// byte-identical.
void write_records_csv(const CampaignResult& result, const std::string& path);

/// JSON summary: per-cell aggregates, failures, wall-clock time.
void write_summary_json(const CampaignResult& result, const std::string& path);

/// Self-contained SVG line charts: per-step mean OSPA and mean cardinality
/// (one polyline per sweep cell).
void write_ospa_svg(const CampaignResult& result, const std::string& path);
void write_cardinality_svg(const CampaignResult& result,
                           const std::string& path);

/// Aggregate table on stdout: one column per sweep cell, one mean-OSPA row.
void print_summary_table(const CampaignResult& result, std::ostream& out);

}  // namespace mmpmbm
