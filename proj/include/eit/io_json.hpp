#pragma once

#include "eit/measurements.hpp"
#include "eit/recon.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace eit {

nlohmann::json to_json(const Partition& part);
Partition partition_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Conductivity& sigma);
Conductivity conductivity_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MeasurementSet& ms);
MeasurementSet measurements_from_json(const nlohmann::json& j);

/// Mesh dump for debugging and plotting.
nlohmann::json to_json(const TriMesh& m);

nlohmann::json to_json(const IterationRecord& rec);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// One JSON object per line, one line per iteration.
void write_trace_jsonl(const std::filesystem::path& path,
                       const ReconTrace& trace);

/// iter, J, max_theta, effective_beta, background, then one column per value.
void write_convergence_csv(const std::filesystem::path& path,
                           const ReconTrace& trace);

/// First column the arclength of each boundary node, then one column per
/// pattern.
void write_traces_csv(const std::filesystem::path& path,
                      const MeasurementSet& ms);

/// FNV-1a hash of a canonical JSON dump, as fixed-width hex.
std::string config_hash(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace eit
