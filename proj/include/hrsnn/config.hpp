#pragma once

// Experiment configuration: a small INI dialect plus the schema that maps
// it onto the typed task configs.
//
//   # comment            ; comment
//   [section]
//   key = value
//
// Keys are unique per section; sections may not repeat. Values run to the
// end of the line (inline comments are not stripped). Distributions are
// written as normal(mean, sd), gamma(shape, scale), lognormal(mean, log_sd),
// degenerate(value) or a bare number.

#include "hrsnn/hawkes.hpp"
#include "hrsnn/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hrsnn {

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    std::vector<IniEntry> entries;
    int line = 0;
};

struct IniDocument {
    std::vector<IniSection> sections;

    const IniSection* find(const std::string& name) const;
    // Sets section.key, creating the section or key when missing.
    void set(const std::string& section, const std::string& key, const std::string& value);
};

// Throws ConfigError with the offending line number.
IniDocument parse_ini(std::istream& in, const std::string& source = "<input>");
// Throws IoError when the file cannot be read.
IniDocument parse_ini_file(const std::string& path);
// "section.key=value".
void apply_override(IniDocument& doc, const std::string& assignment);

DistributionSpec parse_distribution(const std::string& text);
std::string format_distribution(const DistributionSpec& d);

enum class Task { McEval, Predict, Classify, BoSearch, HawkesCompare, GenData };
std::string to_string(Task t);
Task task_from_string(const std::string& s);

struct McTaskConfig {
    McEvalConfig eval;
    // "network" runs the full pipeline; "delay-line" scores the synthetic
    // delay-line fixture with delay_k taps instead.
    std::string source = "network";
    std::size_t delay_k = 10;
};

struct BoTaskConfig {
    BoConfig bo;
    BoObjective objective = BoObjective::Efficiency;
};

struct HawkesTaskConfig {
    HawkesSpec homogeneous;
    HawkesSpec heterogeneous;
    double horizon = 2000.0;
    std::size_t n_seeds = 20;
};

struct GenDataConfig {
    std::string kind = "lorenz96"; // lorenz96 | lorenz63 | uniform | spike-classes
    std::size_t n = 4000;          // uniform stream length
};

struct ExperimentConfig {
    Task task = Task::McEval;
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::size_t workers = 0; // 0 = hardware concurrency
    ModelConfig model;
    McTaskConfig mc;
    PredictConfig predict;
    ClassifyConfig classify;
    BoTaskConfig bo;
    HawkesTaskConfig hawkes;
    GenDataConfig gen;
    // Every key set in the document, as "section.key" -> raw value.
    std::map<std::string, std::string> entries;

    std::vector<std::uint64_t> seeds() const;
};

struct ConfigLoad {
    ExperimentConfig config;
    std::vector<std::string> diagnostics; // empty = valid
};

// Checks every key and the cross-field invariants without running anything.
// `task` overrides run.task when given.
ConfigLoad load_config(const IniDocument& doc, std::optional<Task> task = std::nullopt);

// Throws ConfigError listing the diagnostics when the document is invalid.
ExperimentConfig build_config(const IniDocument& doc, std::optional<Task> task = std::nullopt);

// Sorted "section.key=value" lines; the hashed form of a configuration.
std::string canonical_text(const ExperimentConfig& cfg);
// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

std::vector<std::string> required_blocks(Task t);

} // namespace hrsnn
