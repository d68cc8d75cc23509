#pragma once

// Experiment runner behind the command-line tool. Every task writes only
// inside its output directory; replicate work fans out to a worker pool
// while all file writes stay on the calling thread.

#include "hrsnn/config.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <vector>

namespace hrsnn {

inline constexpr const char* kToolVersion = "1.0.0";

struct OutputFile {
    std::string name; // relative to the output directory
    std::uint64_t hash = 0; // FNV-1a of the contents
};

struct RunSummary {
    std::vector<OutputFile> files;
    std::string manifest_path;
};

// Runs cfg.task and writes its artifacts plus manifest.json into out_dir.
// workers = 0 picks the hardware concurrency.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::size_t workers = 0);

// Rebuilds the configuration recorded in a manifest.
ExperimentConfig config_from_manifest(const std::string& manifest_path);

// Output files and hashes recorded in a manifest.
std::vector<OutputFile> manifest_outputs(const std::string& manifest_path);

// Exit status for an exception: 2 configuration, 3 numerical or data fault,
// 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);

// Calls fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// collected and the one with the lowest index is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

} // namespace hrsnn
