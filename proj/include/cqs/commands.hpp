#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "cqs/config.hpp"

namespace cqs {

struct CommandReport {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

// Each command writes into cfg.output_dir (created if missing).
CommandReport cmd_spectrum(const ExperimentConfig& cfg);
CommandReport cmd_doqs(const ExperimentConfig& cfg);
CommandReport cmd_protocol(const ExperimentConfig& cfg);
CommandReport cmd_landscape(const ExperimentConfig& cfg);

}  // namespace cqs
