#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "winsim/analysis.hpp"

namespace winsim {

/// Fully resolved config as canonical JSON text (SI units, sorted keys).
std::string config_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a over the canonical JSON, as 16 hex digits.
std::string config_fingerprint(const ExperimentConfig& cfg);

/// Column names of results.csv, in order.
const std::vector<std::string>& results_columns();

/// results.csv text: one row per sweep point (system, B_s, jitter, SNR).
std::string results_csv(const SweepResult& result, const ExperimentConfig& cfg);

/// Writes results.csv, meta.json and (if enabled) plot/*.dat into `dir`,
/// creating it if needed. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const ExperimentConfig& cfg,
                                                 const std::filesystem::path& dir);

}  // namespace winsim
