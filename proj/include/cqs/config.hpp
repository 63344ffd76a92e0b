#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cqs/floquet.hpp"

namespace cqs {

struct ExperimentConfig {
  std::string model = "kicked";  // kicked | ac
  double j = 100.0;
  double ht = 0.1;
  double k = 0.3;
  double gt = 20.0;
  double omega_t = kTwoPi;
  int bins = 60;
  int n_max = 4000;
  double damping = 0.1;
  int doqs_grid = 2000;
  int steps = kDefaultAcSteps;
  int periods = 1000;
  int grid = 200;
  int raster = 400;
  int path_points = 10;
  double eh_max_ht = 0.5;
  double eh_max_k = 0.5;
  bool dump_matrix = false;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Keys in file order.
const std::vector<std::string>& config_keys();

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& cfg, const std::string& key);

// Throws ConfigError on bad ranges.
void validate_config(const ExperimentConfig& cfg);

// fig2a (kicked, j=100), fig2b (ac, j=100), fig3a (kicked, j=50), fig3b (ac, j=50).
ExperimentConfig preset_config(std::string_view name);

// Flat "key = value" lines; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string to_config_text(const ExperimentConfig& cfg);

DriveConfig drive_of(const ExperimentConfig& cfg);

}  // namespace cqs
