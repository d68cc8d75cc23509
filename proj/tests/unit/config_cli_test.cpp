#include "hrsnn/config.hpp"
#include "hrsnn/error.hpp"
#include "hrsnn/runner.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace hrsnn;
namespace fs = std::filesystem;

namespace {

IniDocument doc_of(const std::string& text) {
    std::istringstream in(text);
    return parse_ini(in, "test");
}

std::string example(const std::string& name) { return std::string(HRSNN_SOURCE_DIR) + "/configs/" + name; }

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hrsnn_cli_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HRSNN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Ini, ParsesSectionsCommentsAndWhitespace) {
    const auto d = doc_of("# top\n[run]\n  task = mc-eval \n; c\n\n[mc]\nsamples=10\n");
    ASSERT_EQ(d.sections.size(), 2u);
    EXPECT_EQ(d.find("run")->entries[0].value, "mc-eval");
    EXPECT_EQ(d.find("mc")->entries[0].line, 7);
}

TEST(Ini, SyntaxErrorsCarryLineNumbers) {
    try {
        doc_of("[run]\ntask mc-eval\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test:2"), std::string::npos);
    }
    EXPECT_THROW(doc_of("key = 1\n"), ConfigError);
    EXPECT_THROW(doc_of("[a]\nx=1\nx=2\n"), ConfigError);
    EXPECT_THROW(doc_of("[a]\n[a]\n"), ConfigError);
}

TEST(Ini, OverridesReplaceOrAdd) {
    auto d = doc_of("[run]\nseed = 1\n");
    apply_override(d, "run.seed=5");
    apply_override(d, "mc.samples = 100");
    EXPECT_EQ(d.find("run")->entries[0].value, "5");
    EXPECT_EQ(d.find("mc")->entries[0].value, "100");
    EXPECT_THROW(apply_override(d, "seed=5"), ConfigError);
}

TEST(Distributions, ParseAndFormatRoundTrip) {
    EXPECT_EQ(parse_distribution("normal(1, 2)"), DistributionSpec::normal(1, 2));
    EXPECT_EQ(parse_distribution(" gamma( 2.89 ,0.248 )"), DistributionSpec::gamma(2.89, 0.248));
    EXPECT_EQ(parse_distribution("3.5"), DistributionSpec::degenerate(3.5));
    for (const auto& d : {DistributionSpec::normal(0.1, 0.2), DistributionSpec::gamma(5.14, 0.313),
                          DistributionSpec::lognormal_with_mean(0.8, 2.0), DistributionSpec::degenerate(7.0)}) {
        const auto back = parse_distribution(format_distribution(d));
        EXPECT_EQ(back.family, d.family);
        EXPECT_NEAR(back.a, d.a, 1e-12);
        EXPECT_NEAR(back.b, d.b, 1e-12);
    }
    EXPECT_THROW(parse_distribution("cauchy(0, 1)"), ConfigError);
    EXPECT_THROW(parse_distribution("normal(1)"), ConfigError);
    EXPECT_THROW(parse_distribution("normal(0, -1)"), ConfigError);
}

TEST(Validate, BundledExamplesAreValid) {
    for (const auto& entry : fs::directory_iterator(std::string(HRSNN_SOURCE_DIR) + "/configs")) {
        const auto load = load_config(parse_ini_file(entry.path().string()));
        EXPECT_TRUE(load.diagnostics.empty()) << entry.path() << ": " << (load.diagnostics.empty() ? "" : load.diagnostics[0]);
    }
}

TEST(Validate, OutOfRangeProbabilityNamesKey) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    apply_override(d, "network.connection_prob=1.5");
    const auto load = load_config(d);
    ASSERT_EQ(load.diagnostics.size(), 1u);
    EXPECT_NE(load.diagnostics[0].find("network.connection_prob"), std::string::npos);
}

TEST(Validate, MissingBlockIsNamed) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    d.sections.erase(std::remove_if(d.sections.begin(), d.sections.end(), [](const IniSection& s) { return s.name == "codec"; }),
                     d.sections.end());
    const auto load = load_config(d);
    ASSERT_EQ(load.diagnostics.size(), 1u);
    EXPECT_NE(load.diagnostics[0].find("[codec]"), std::string::npos);
}

TEST(Validate, UnknownKeysAndBlocksRejected) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    apply_override(d, "network.n_neurons=5");
    apply_override(d, "extras.flag=1");
    const auto load = load_config(d);
    ASSERT_EQ(load.diagnostics.size(), 2u);
    EXPECT_NE(load.diagnostics[0].find("network.n_neurons: unknown key"), std::string::npos);
    EXPECT_NE(load.diagnostics[1].find("[extras]"), std::string::npos);
    EXPECT_THROW(build_config(d), ConfigError);
}

TEST(Validate, TypedValueErrors) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    apply_override(d, "network.n_exc=many");
    apply_override(d, "stdp.learning=perhaps");
    apply_override(d, "neuron.tau_m_exc=gamma(-1, 2)");
    EXPECT_EQ(load_config(d).diagnostics.size(), 3u);
}

TEST(Validate, CrossFieldInvariants) {
    auto d = parse_ini_file(example("bo_search.ini"));
    apply_override(d, "bo.budget=3");
    apply_override(d, "bo.n_init=5");
    EXPECT_FALSE(load_config(d).diagnostics.empty());
    auto e = parse_ini_file(example("mc_eval.ini"));
    apply_override(e, "neuron.v_reset=2");
    EXPECT_FALSE(load_config(e).diagnostics.empty());
}

TEST(Config, ValuesReachTypedFields) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    const auto cfg = build_config(d);
    EXPECT_EQ(cfg.task, Task::McEval);
    EXPECT_EQ(cfg.replicates, 5u);
    EXPECT_EQ(cfg.seeds(), (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(cfg.model.neurons.tau_m_exc, DistributionSpec::gamma(2.89, 0.248));
    EXPECT_EQ(cfg.model.neurons.base.t_ref, 5.0);
    EXPECT_EQ(cfg.model.topology.p_ie, 0.1);
    EXPECT_EQ(cfg.model.channels_per_dim, 50u);
    EXPECT_EQ(cfg.mc.eval.capacity.tau_max, 100u);
}

TEST(Config, CanonicalHashTracksOverrides) {
    auto d = parse_ini_file(example("mc_eval.ini"));
    const auto h1 = fnv1a64(canonical_text(build_config(d)));
    apply_override(d, "run.seed=2");
    EXPECT_NE(fnv1a64(canonical_text(build_config(d))), h1);
    EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Runner, ParallelForCoversAllIndicesAndRethrows) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                     if (i == 7) throw NumericalError("x");
                 }),
                 NumericalError);
}

TEST(Runner, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
    EXPECT_EQ(exit_code_for(NumericalError("x")), 3);
    EXPECT_EQ(exit_code_for(IoError("x")), 4);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Cli, DelayLineCapacityWithinOracleBounds) {
    const auto out = scratch("delay");
    ASSERT_EQ(run_cli("mc-eval --config " + example("mc_delay_line.ini") + " --out " + out.string()), 0);
    const auto summary = slurp(out / "summary.csv");
    const auto line = summary.substr(summary.find('\n') + 1);
    const double c = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(c, 9.5);
    EXPECT_LE(c, 10.5);
    EXPECT_TRUE(fs::exists(out / "capacity_seed1.csv"));
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST(Cli, BoShortcutsGiveRandomSearchHistory) {
    const auto out = scratch("bo");
    ASSERT_EQ(run_cli("bo-search --config " + example("bo_search.ini") +
                      " --objective efficiency --budget 5 --n-init 5 --set mc.samples=400 --set mc.tau_max=20 --out " +
                      out.string()),
              0);
    const auto hist = slurp(out / "history_seed1.csv");
    EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 6);
    EXPECT_TRUE(fs::exists(out / "best_seed1.json"));
    EXPECT_TRUE(fs::exists(out / "network_seed1.json"));
}

TEST(Cli, HawkesDegenerateArmsAgree) {
    const auto out = scratch("hawkes");
    const std::string args = "hawkes-compare --config " + example("hawkes_compare.ini") +
                             " --set hawkes.het_h1_amplitude=0.8 --set hawkes.horizon=100 --set hawkes.n_seeds=3 --out " +
                             out.string();
    ASSERT_EQ(run_cli(args), 0);
    const auto rates = slurp(out / "rates_seed7.csv");
    std::istringstream in(rates);
    std::string row;
    std::getline(in, row);
    while (std::getline(in, row)) {
        const auto a = row.rfind(',');
        const auto b = row.rfind(',', a - 1);
        EXPECT_EQ(row.substr(b + 1, a - b - 1), row.substr(a + 1));
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("validate --config " + example("mc_eval.ini")), 0);
    EXPECT_EQ(run_cli("validate --config " + example("mc_eval.ini") + " --set network.connection_prob=1.5"), 2);
    EXPECT_EQ(run_cli("mc-eval --config " + example("mc_eval.ini") + " --set network.bogus=1 --out " +
                      scratch("bad").string()),
              2);
    EXPECT_EQ(run_cli("mc-eval --config /nonexistent.ini --out " + scratch("x").string()), 2);
    EXPECT_EQ(run_cli("gen-data --config " + example("gen_lorenz96.ini") + " --out /proc/hrsnn_forbidden"), 4);
    EXPECT_EQ(run_cli("gen-data --config " + example("gen_lorenz96.ini") +
                      " --set lorenz96.x0=1e160 --set lorenz96.perturbation=1e159 --out " + scratch("blow").string()),
              3);
}

TEST(Cli, ReplayReproducesOutputsAndStaysInsideOutDir) {
    const auto out = scratch("replay_a");
    const auto again = scratch("replay_b");
    ASSERT_EQ(run_cli("gen-data --config " + example("gen_lorenz96.ini") +
                      " --set lorenz96.duration=0.5 --set lorenz96.burn_in=0.5 --seed 4 --out " + out.string()),
              0);
    for (const auto& e : fs::recursive_directory_iterator(out)) EXPECT_TRUE(e.path().string().starts_with(out.string()));
    ASSERT_EQ(run_cli("replay --manifest " + (out / "manifest.json").string() + " --out " + again.string()), 0);
    EXPECT_EQ(slurp(out / "lorenz96_seed4.csv"), slurp(again / "lorenz96_seed4.csv"));
    const auto cfg = config_from_manifest((out / "manifest.json").string());
    EXPECT_EQ(cfg.seed, 4u);
}
