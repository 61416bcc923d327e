#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace skyear {

// Resolved parameter tree for one command. Every command echoes it to
// <out>/config.json before producing anything else.
struct RunConfig {
  nlohmann::json tree;
  std::filesystem::path out;

  std::uint64_t seed() const { return tree.at("seed").get<std::uint64_t>(); }
  std::string scenario() const { return tree.at("scenario").get<std::string>(); }
};

nlohmann::json default_config();

// Defaults, overlaid with the file (keys must already exist in the defaults),
// then with the command-line overrides. Throws ConfigError or IoError.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file, std::optional<std::uint64_t> seed,
                         std::optional<std::string> scenario, const std::filesystem::path& out);

// Each returns the main artifact it wrote.
std::filesystem::path cmd_gen(const RunConfig& cfg);
std::filesystem::path cmd_pretrain(const RunConfig& cfg);
std::filesystem::path cmd_eval_detect(const RunConfig& cfg);
std::filesystem::path cmd_mission(const RunConfig& cfg);

// Checkpoint file name for a scenario and masking ratio, e.g. mae_desert_rho0.10.ckpt.
std::string checkpoint_name(const std::string& scenario, double rho);

// Entry point of the skyear executable; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace skyear
