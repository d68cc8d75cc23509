#include "hrsnn/runner.hpp"

#include "hrsnn/error.hpp"
#include "hrsnn/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace hrsnn {

namespace fs = std::filesystem;
using json = nlohmann::json;

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const IoError*>(&e)) return 4;
    return 1;
}

namespace {

std::ostream& precise(std::ostream& os) {
    return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

// Collects artifacts in memory and writes them from the coordinating thread.
class OutputDir {
public:
    explicit OutputDir(const std::string& path) : root_(path) {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec || !fs::is_directory(root_)) throw IoError("cannot create output directory '" + path + "'");
    }

    void write(const std::string& name, const std::string& contents) {
        const fs::path target = root_ / name;
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        std::ofstream out(target, std::ios::binary);
        if (!out) throw IoError("cannot write '" + target.string() + "'");
        out << contents;
        out.close();
        if (!out) throw IoError("write failed for '" + target.string() + "'");
        files_.push_back({name, fnv1a64(contents)});
    }

    template <class F>
    void emit(const std::string& name, F&& writer) {
        std::ostringstream os;
        precise(os);
        writer(os);
        write(name, os.str());
    }

    const fs::path& root() const { return root_; }
    const std::vector<OutputFile>& files() const { return files_; }

private:
    fs::path root_;
    std::vector<OutputFile> files_;
};

std::string seed_tag(std::uint64_t s) { return "seed" + std::to_string(s); }

void log_progress(Task task, const std::string& msg) {
    static std::mutex m;
    std::lock_guard lock(m);
    std::cerr << "[" << to_string(task) << "] " << msg << '\n';
}

void write_states_header(std::ostream& os, const std::string& prefix, Eigen::Index cols) {
    for (Eigen::Index c = 0; c < cols; ++c) os << ',' << prefix << c;
}

// mc-eval ------------------------------------------------------------------

void run_mc(const ExperimentConfig& cfg, OutputDir& out, std::size_t workers) {
    const auto seeds = cfg.seeds();
    std::vector<std::optional<McEvalResult>> results(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t r) {
        McEvalResult res;
        if (cfg.mc.source == "delay-line") {
            // stream id kept clear of the ones used inside the pipeline
            const auto input = iid_uniform(cfg.mc.eval.samples, derive_seed(seeds[r], 100));
            const auto states = delay_line_states(input, cfg.mc.delay_k);
            res.capacity = memory_capacity(states, input, cfg.mc.eval.capacity);
            res.efficiency = std::numeric_limits<double>::quiet_NaN();
            res.eigen_heterogeneity = eigen_heterogeneity(state_covariance(states));
        } else {
            res = evaluate_memory_capacity(cfg.model, cfg.mc.eval, seeds[r]);
        }
        log_progress(cfg.task, "seed " + std::to_string(seeds[r]) + ": C = " + std::to_string(res.capacity.total));
        results[r] = std::move(res);
    });

    std::ostringstream summary;
    precise(summary) << "seed,capacity,total_spikes,mean_spikes,efficiency,eigen_heterogeneity\n";
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        const auto& res = *results[r];
        out.emit("capacity_" + seed_tag(seeds[r]) + ".csv", [&](std::ostream& os) { write_capacity_csv(os, res.capacity); });
        if (cfg.mc.source == "network")
            out.write("network_" + seed_tag(seeds[r]) + ".json", network_to_json(res.network, 1));
        summary << seeds[r] << ',' << res.capacity.total << ',' << res.spikes.total << ',' << res.spikes.per_neuron << ','
                << res.efficiency << ',' << res.eigen_heterogeneity << '\n';
    }
    out.write("summary.csv", summary.str());
}

// predict ------------------------------------------------------------------

void run_predict(const ExperimentConfig& cfg, OutputDir& out, std::size_t workers) {
    const auto seeds = cfg.seeds();
    std::vector<std::optional<PredictResult>> results(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t r) {
        results[r] = evaluate_prediction(cfg.model, cfg.predict, seeds[r]);
        log_progress(cfg.task, "seed " + std::to_string(seeds[r]) + ": test NRMSE = " +
                                   std::to_string(results[r]->nrmse_test));
    });

    std::ostringstream summary;
    precise(summary) << "seed,nrmse_train,nrmse_test,total_spikes,mean_spikes\n";
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        const auto& res = *results[r];
        out.emit("predictions_" + seed_tag(seeds[r]) + ".csv", [&](std::ostream& os) {
            os << "step";
            write_states_header(os, "target_", res.target.cols());
            write_states_header(os, "prediction_", res.prediction.cols());
            os << '\n';
            for (Eigen::Index t = 0; t < res.target.rows(); ++t) {
                os << t;
                for (Eigen::Index c = 0; c < res.target.cols(); ++c) os << ',' << res.target(t, c);
                for (Eigen::Index c = 0; c < res.prediction.cols(); ++c) os << ',' << res.prediction(t, c);
                os << '\n';
            }
        });
        out.write("network_" + seed_tag(seeds[r]) + ".json", network_to_json(res.network, 1));
        summary << seeds[r] << ',' << res.nrmse_train << ',' << res.nrmse_test << ',' << res.spikes.total << ','
                << res.spikes.per_neuron << '\n';
    }
    out.write("summary.csv", summary.str());
}

// classify -----------------------------------------------------------------

void run_classify(const ExperimentConfig& cfg, OutputDir& out, std::size_t workers) {
    const auto seeds = cfg.seeds();
    std::vector<std::optional<ClassifyResult>> results(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t r) {
        results[r] = evaluate_classification(cfg.model, cfg.classify, seeds[r]);
        log_progress(cfg.task, "seed " + std::to_string(seeds[r]) + ": test accuracy = " +
                                   std::to_string(results[r]->test_accuracy));
    });

    std::ostringstream summary;
    precise(summary) << "seed,train_accuracy,test_accuracy,chance,total_spikes,mean_spikes\n";
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        const auto& res = *results[r];
        out.emit("predictions_" + seed_tag(seeds[r]) + ".csv", [&](std::ostream& os) {
            os << "index,label,prediction\n";
            for (std::size_t i = 0; i < res.test_labels.size(); ++i)
                os << i << ',' << res.test_labels[i] << ',' << res.test_predictions[i] << '\n';
        });
        out.write("network_" + seed_tag(seeds[r]) + ".json", network_to_json(res.network, 1));
        summary << seeds[r] << ',' << res.train_accuracy << ',' << res.test_accuracy << ','
                << 1.0 / cfg.classify.data.n_classes << ',' << res.spikes.total << ',' << res.spikes.per_neuron << '\n';
    }
    out.write("summary.csv", summary.str());
}

// bo-search ----------------------------------------------------------------

json point_to_json(const SearchPoint& p) {
    json j;
    for (const auto& m : p.marginals)
        j["marginals"][m.name] = {{"family", to_string(m.dist.family)},
                                  {"a", m.dist.a},
                                  {"b", m.dist.b},
                                  {"mean", m.dist.mean()},
                                  {"sd", std::sqrt(m.dist.variance())},
                                  {"config", format_distribution(m.dist)}};
    for (const auto& [name, v] : p.scalars) j["scalars"][name] = v;
    return j;
}

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

void run_bo(const ExperimentConfig& cfg, OutputDir& out, std::size_t workers) {
    const SearchSpace space = default_hrsnn_space();
    std::ostringstream summary;
    precise(summary) << "seed,evaluations,failures,best_objective,capacity,mean_spikes,efficiency\n";
    for (const auto seed : cfg.seeds()) {
        BoConfig bo = cfg.bo.bo;
        bo.seed = seed;
        bo.workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
        std::atomic<std::size_t> evals{0};
        const Objective objective = [&](const SearchPoint& p) {
            const auto v = evaluate_point(cfg.model, cfg.mc.eval, p, seed);
            const std::size_t k = ++evals;
            log_progress(cfg.task, "seed " + std::to_string(seed) + " eval " + std::to_string(k) +
                                       ": C = " + std::to_string(v.capacity) +
                                       ", S = " + std::to_string(v.mean_spikes));
            return objective_value(cfg.bo.objective, v);
        };
        const BoResult result = bo_loop(objective, space, bo);

        // re-evaluate the incumbent to persist its network and raw metrics
        const ModelConfig best_model = apply_search_point(cfg.model, result.best);
        const McEvalResult best = evaluate_memory_capacity(best_model, cfg.mc.eval, seed);
        const std::size_t failures = static_cast<std::size_t>(
            std::count_if(result.history.begin(), result.history.end(), [](const BoRecord& r) { return r.failed; }));

        out.emit("history_" + seed_tag(seed) + ".csv", [&](std::ostream& os) { write_bo_history_csv(os, space, result); });
        json j;
        j["objective"] = to_string(cfg.bo.objective);
        j["seed"] = seed;
        j["best_value"] = json_number(result.best_value);
        j["best_point"] = point_to_json(result.best);
        j["capacity"] = best.capacity.total;
        j["mean_spikes"] = best.spikes.per_neuron;
        j["efficiency"] = json_number(best.efficiency);
        j["evaluations"] = result.history.size();
        j["failures"] = failures;
        out.write("best_" + seed_tag(seed) + ".json", j.dump(2) + "\n");
        out.write("network_" + seed_tag(seed) + ".json", network_to_json(best.network, 1));
        summary << seed << ',' << result.history.size() << ',' << failures << ',' << result.best_value << ','
                << best.capacity.total << ',' << best.spikes.per_neuron << ',' << best.efficiency << '\n';
    }
    out.write("summary.csv", summary.str());
}

// hawkes-compare -----------------------------------------------------------

void run_hawkes(const ExperimentConfig& cfg, OutputDir& out, std::size_t workers) {
    const auto& h = cfg.hawkes;
    std::ostringstream summary;
    precise(summary) << "seed,phi_m,phi_r,p_value,n_seeds\n";
    json all = json::array();
    for (const auto seed : cfg.seeds()) {
        const auto cmp = compare_sparsity(h.homogeneous, h.heterogeneous, h.horizon, h.n_seeds, seed, workers);
        log_progress(cfg.task, "seed " + std::to_string(seed) + ": phi_M = " + std::to_string(cmp.phi_m) +
                                   ", phi_R = " + std::to_string(cmp.phi_r) + ", p = " + std::to_string(cmp.p_value));
        out.emit("rates_" + seed_tag(seed) + ".csv", [&](std::ostream& os) {
            os << "replicate,seed,phi_m,phi_r\n";
            for (std::size_t i = 0; i < cmp.rates_m.size(); ++i)
                os << i << ',' << seed + i << ',' << cmp.rates_m[i] << ',' << cmp.rates_r[i] << '\n';
        });
        // event times of the first replicate of each arm
        const auto hom_events = simulate_hawkes(h.homogeneous.sample(seed), h.horizon, seed);
        const auto het_events = simulate_hawkes(h.heterogeneous.sample(seed), h.horizon, seed);
        out.emit("events_hom_" + seed_tag(seed) + ".csv", [&](std::ostream& os) { write_events_csv(os, hom_events); });
        out.emit("events_het_" + seed_tag(seed) + ".csv", [&](std::ostream& os) { write_events_csv(os, het_events); });
        summary << seed << ',' << cmp.phi_m << ',' << cmp.phi_r << ',' << cmp.p_value << ',' << h.n_seeds << '\n';
        all.push_back({{"seed", seed}, {"phi_m", cmp.phi_m}, {"phi_r", cmp.phi_r}, {"p_value", cmp.p_value},
                       {"n_seeds", h.n_seeds}, {"horizon", h.horizon}});
    }
    out.write("summary.csv", summary.str());
    out.write("summary.json", all.dump(2) + "\n");
}

// gen-data -----------------------------------------------------------------

void run_gen(const ExperimentConfig& cfg, OutputDir& out) {
    for (const auto seed : cfg.seeds()) {
        const std::string tag = seed_tag(seed);
        if (cfg.gen.kind == "lorenz96") {
            const auto traj = lorenz96_multiscale(cfg.predict.lorenz96, seed);
            out.emit("lorenz96_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        } else if (cfg.gen.kind == "lorenz63") {
            // lorenz63 is deterministic in its initial state
            const auto traj = lorenz63(cfg.predict.lorenz63);
            out.emit("lorenz63_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        } else if (cfg.gen.kind == "uniform") {
            const auto u = iid_uniform(cfg.gen.n, seed);
            out.emit("uniform_" + tag + ".csv", [&](std::ostream& os) {
                os << "index,u\n";
                for (std::size_t i = 0; i < u.size(); ++i) os << i << ',' << u[i] << '\n';
            });
        } else {
            const auto data = synthetic_spike_classes(cfg.classify.data, seed);
            const std::string dir = "spike_classes_" + tag + "/";
            std::ostringstream labels;
            labels << "split,index,label,file\n";
            const auto dump = [&](const std::string& split, const std::vector<SpikeRaster>& xs, const std::vector<int>& ys) {
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    std::ostringstream name;
                    name << split << '_' << std::setw(4) << std::setfill('0') << i << ".raster";
                    out.emit(dir + name.str(), [&](std::ostream& os) { write_raster(os, xs[i]); });
                    labels << split << ',' << i << ',' << ys[i] << ',' << name.str() << '\n';
                }
            };
            for (std::size_t c = 0; c < data.templates.size(); ++c)
                out.emit(dir + "template_" + std::to_string(c) + ".raster",
                         [&](std::ostream& os) { write_raster(os, data.templates[c]); });
            dump("train", data.train, data.train_labels);
            dump("test", data.test, data.test_labels);
            out.write(dir + "labels.csv", labels.str());
        }
        log_progress(cfg.task, "seed " + std::to_string(seed) + ": wrote " + cfg.gen.kind);
    }
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::size_t workers) {
    if (workers == 0 && cfg.workers > 0) workers = cfg.workers;
    OutputDir out(out_dir);
    switch (cfg.task) {
    case Task::McEval: run_mc(cfg, out, workers); break;
    case Task::Predict: run_predict(cfg, out, workers); break;
    case Task::Classify: run_classify(cfg, out, workers); break;
    case Task::BoSearch: run_bo(cfg, out, workers); break;
    case Task::HawkesCompare: run_hawkes(cfg, out, workers); break;
    case Task::GenData: run_gen(cfg, out); break;
    }

    const std::string canonical = canonical_text(cfg);
    json m;
    m["tool"] = "hrsnn";
    m["version"] = kToolVersion;
    m["task"] = to_string(cfg.task);
    m["config_hash"] = hex64(fnv1a64(canonical));
    m["config"] = json::object();
    for (const auto& [k, v] : cfg.entries) m["config"][k] = v;
    m["seeds"] = cfg.seeds();
    json files = json::array();
    for (const auto& f : out.files()) files.push_back({{"name", f.name}, {"fnv1a64", hex64(f.hash)}});
    m["outputs"] = files;

    RunSummary summary{out.files(), (out.root() / "manifest.json").string()};
    std::ofstream mf(summary.manifest_path);
    if (!mf) throw IoError("cannot write '" + summary.manifest_path + "'");
    mf << m.dump(2) << '\n';
    if (!mf) throw IoError("write failed for '" + summary.manifest_path + "'");
    return summary;
}

namespace {

json read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace

ExperimentConfig config_from_manifest(const std::string& manifest_path) {
    const json m = read_manifest(manifest_path);
    if (!m.contains("config") || !m["config"].is_object()) throw ConfigError("manifest has no config object");
    IniDocument doc;
    for (const auto& [key, value] : m["config"].items()) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) throw ConfigError("manifest key '" + key + "' lacks a section");
        doc.set(key.substr(0, dot), key.substr(dot + 1), value.get<std::string>());
    }
    ExperimentConfig cfg = build_config(doc);
    if (m.contains("config_hash") && m["config_hash"].get<std::string>() != hex64(fnv1a64(canonical_text(cfg))))
        throw ConfigError("manifest config hash does not match its config entries");
    return cfg;
}

std::vector<OutputFile> manifest_outputs(const std::string& manifest_path) {
    const json m = read_manifest(manifest_path);
    std::vector<OutputFile> out;
    for (const auto& f : m.value("outputs", json::array()))
        out.push_back({f.at("name").get<std::string>(), std::stoull(f.at("fnv1a64").get<std::string>(), nullptr, 16)});
    return out;
}

} // namespace hrsnn
