#pragma once

#include <string>

#include "mmpmbm/simulator.hpp"

namespace mmpmbm {

/// Full CLI experiment parameterization. Defaults reproduce the bundled
/// maneuvering-targets scenario; a config file overrides fields.
struct RunConfig {
  ScenarioConfig scenario;
  CampaignParams campaign;
  std::string mode = "single";  // single | sweep-pd | sweep-noise | validate-config
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  bool write_svg = true;
};

/// Parses the INI-style config file (sections [scenario], [jms],
/// [measurement], [birth], repeated [target], [filter], [ospa], [output]).
/// Throws ConfigError with a field-level message on malformed input.
RunConfig load_run_config(const std::string& path);

/// Serializes a RunConfig back to config-file text (the round-trip surface
/// for JmsConfig and friends).
std::string run_config_to_text(const RunConfig& cfg);

/// Validates every invariant (JMS, scenario schedule, sweep lists); throws
/// ConfigError on the first violation.
void validate_run_config(const RunConfig& cfg);

}  // namespace mmpmbm
