// Command-line front end:
//   hrsnn <task> --config <path> [--set section.key=value]... --out <dir> --workers N --seed S
//   hrsnn validate --config <path> [--task <task>] [--set ...]
//   hrsnn replay --manifest <path> --out <dir> [--workers N]

#include "hrsnn/config.hpp"
#include "hrsnn/error.hpp"
#include "hrsnn/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct TaskArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string out = "out";
    std::size_t workers = 0;
    std::optional<std::uint64_t> seed;
    // bo-search shortcuts
    std::optional<std::string> objective;
    std::optional<std::size_t> budget;
    std::optional<std::size_t> n_init;
};

hrsnn::IniDocument load_document(const TaskArgs& a) {
    hrsnn::IniDocument doc = hrsnn::parse_ini_file(a.config);
    for (const auto& s : a.sets) hrsnn::apply_override(doc, s);
    if (a.seed) doc.set("run", "seed", std::to_string(*a.seed));
    if (a.objective) doc.set("bo", "objective", *a.objective);
    if (a.budget) doc.set("bo", "budget", std::to_string(*a.budget));
    if (a.n_init) doc.set("bo", "n_init", std::to_string(*a.n_init));
    return doc;
}

int run_task(hrsnn::Task task, const TaskArgs& a) {
    const auto cfg = hrsnn::build_config(load_document(a), task);
    const auto summary = hrsnn::run_experiment(cfg, a.out, a.workers);
    std::cout << "wrote " << summary.files.size() << " file(s) and " << summary.manifest_path << '\n';
    return 0;
}

int run_validate(const TaskArgs& a, const std::string& task) {
    std::optional<hrsnn::Task> t;
    if (!task.empty()) t = hrsnn::task_from_string(task);
    const auto load = hrsnn::load_config(load_document(a), t);
    for (const auto& d : load.diagnostics) std::cout << d << '\n';
    if (!load.diagnostics.empty()) return 2;
    std::cout << a.config << ": valid (" << hrsnn::to_string(load.config.task) << ")\n";
    return 0;
}

int run_replay(const std::string& manifest, const std::string& out, std::size_t workers) {
    const auto cfg = hrsnn::config_from_manifest(manifest);
    const auto expected = hrsnn::manifest_outputs(manifest);
    const auto summary = hrsnn::run_experiment(cfg, out, workers);
    std::size_t mismatches = 0;
    for (const auto& e : expected) {
        const auto it = std::find_if(summary.files.begin(), summary.files.end(),
                                     [&](const hrsnn::OutputFile& f) { return f.name == e.name; });
        if (it == summary.files.end()) {
            std::cout << "missing: " << e.name << '\n';
            ++mismatches;
        } else if (it->hash != e.hash) {
            std::cout << "differs: " << e.name << '\n';
            ++mismatches;
        }
    }
    if (mismatches == 0 && expected.size() == summary.files.size()) {
        std::cout << "replay identical: " << expected.size() << " file(s)\n";
        return 0;
    }
    std::cout << "replay differs in " << mismatches << " file(s)\n";
    return 1;
}

void add_common(CLI::App* sub, TaskArgs& a) {
    sub->add_option("--config", a.config, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", a.sets, "Override, section.key=value (repeatable)");
    sub->add_option("--seed", a.seed, "Base seed (overrides run.seed)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous recurrent spiking network experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hrsnn::kToolVersion));

    TaskArgs args;
    std::optional<hrsnn::Task> chosen;
    for (auto task : {hrsnn::Task::McEval, hrsnn::Task::Predict, hrsnn::Task::Classify, hrsnn::Task::BoSearch,
                      hrsnn::Task::HawkesCompare, hrsnn::Task::GenData}) {
        auto* sub = app.add_subcommand(hrsnn::to_string(task), "Run the " + hrsnn::to_string(task) + " task");
        add_common(sub, args);
        sub->add_option("--out", args.out, "Output directory")->capture_default_str();
        sub->add_option("--workers", args.workers, "Worker threads (0 = logical cores)")->capture_default_str();
        if (task == hrsnn::Task::BoSearch) {
            sub->add_option("--objective", args.objective, "capacity | spikes | efficiency");
            sub->add_option("--budget", args.budget, "Total objective evaluations");
            sub->add_option("--n-init", args.n_init, "Initial random design size");
        }
        sub->callback([&chosen, task] { chosen = task; });
    }

    std::string validate_task;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    add_common(validate, args);
    validate->add_option("--task", validate_task, "Task whose required blocks apply (default: run.task)");

    std::string manifest;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
    replay->add_option("--manifest", manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", args.out, "Output directory")->required();
    replay->add_option("--workers", args.workers, "Worker threads (0 = logical cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (chosen) return run_task(*chosen, args);
        if (validate->parsed()) return run_validate(args, validate_task);
        return run_replay(manifest, args.out, args.workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hrsnn::exit_code_for(e);
    }
}
