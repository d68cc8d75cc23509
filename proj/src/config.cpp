#include "hrsnn/config.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

namespace hrsnn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + t + "'");
    }
    if (used != t.size()) throw ConfigError("expected a number, got '" + t + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ConfigError("expected a non-negative integer, got '" + t + "'");
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ConfigError("integer out of range: '" + t + "'");
    }
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    throw ConfigError("expected true or false, got '" + t + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

} // namespace

const IniSection* IniDocument::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

void IniDocument::set(const std::string& section, const std::string& key, const std::string& value) {
    auto it = std::find_if(sections.begin(), sections.end(), [&](const IniSection& s) { return s.name == section; });
    if (it == sections.end()) {
        sections.push_back({section, {}, 0});
        it = sections.end() - 1;
    }
    for (auto& e : it->entries)
        if (e.key == key) {
            e.value = value;
            return;
        }
    it->entries.push_back({key, value, 0});
}

IniDocument parse_ini(std::istream& in, const std::string& source) {
    IniDocument doc;
    std::string raw;
    int line_no = 0;
    IniSection* current = nullptr;
    const auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail("empty section name");
            if (doc.find(name)) fail("section [" + name + "] appears twice");
            doc.sections.push_back({name, {}, line_no});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        if (!current) fail("key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail("empty key");
        for (const auto& e : current->entries)
            if (e.key == key) fail("key '" + key + "' repeated in [" + current->name + "]");
        current->entries.push_back({key, trim(line.substr(eq + 1)), line_no});
    }
    return doc;
}

IniDocument parse_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    return parse_ini(in, path);
}

void apply_override(IniDocument& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    const std::string section = trim(assignment.substr(0, dot));
    const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
    if (section.empty() || key.empty()) throw ConfigError("override '" + assignment + "' has an empty section or key");
    doc.set(section, key, trim(assignment.substr(eq + 1)));
}

DistributionSpec parse_distribution(const std::string& text) {
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos) return DistributionSpec::degenerate(parse_number(t));
    if (t.back() != ')') throw ConfigError("malformed distribution '" + t + "'");
    const std::string name = trim(t.substr(0, open));
    std::vector<double> args;
    std::stringstream ss(t.substr(open + 1, t.size() - open - 2));
    std::string part;
    while (std::getline(ss, part, ',')) args.push_back(parse_number(part));
    const auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw ConfigError(name + "() takes " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
    };
    DistributionSpec d;
    if (name == "normal") {
        want(2);
        d = DistributionSpec::normal(args[0], args[1]);
    } else if (name == "gamma") {
        want(2);
        d = DistributionSpec::gamma(args[0], args[1]);
    } else if (name == "lognormal") {
        want(2);
        d = DistributionSpec::lognormal_with_mean(args[0], args[1]);
    } else if (name == "degenerate") {
        want(1);
        d = DistributionSpec::degenerate(args[0]);
    } else {
        throw ConfigError("unknown distribution family '" + name + "'");
    }
    d.validate();
    return d;
}

std::string format_distribution(const DistributionSpec& d) {
    switch (d.family) {
    case Family::Normal: return "normal(" + fmt(d.a) + ", " + fmt(d.b) + ")";
    case Family::Gamma: return "gamma(" + fmt(d.a) + ", " + fmt(d.b) + ")";
    case Family::LogNormal: return "lognormal(" + fmt(d.mean()) + ", " + fmt(d.b) + ")";
    default: return "degenerate(" + fmt(d.a) + ")";
    }
}

std::string to_string(Task t) {
    switch (t) {
    case Task::McEval: return "mc-eval";
    case Task::Predict: return "predict";
    case Task::Classify: return "classify";
    case Task::BoSearch: return "bo-search";
    case Task::HawkesCompare: return "hawkes-compare";
    default: return "gen-data";
    }
}

Task task_from_string(const std::string& s) {
    for (Task t : {Task::McEval, Task::Predict, Task::Classify, Task::BoSearch, Task::HawkesCompare, Task::GenData})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown task '" + s + "'");
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < replicates; ++i) out.push_back(seed + i);
    return out;
}

std::vector<std::string> required_blocks(Task t) {
    const std::vector<std::string> model = {"run", "network", "neuron", "stdp", "codec"};
    auto with = [&](std::initializer_list<const char*> extra) {
        auto v = model;
        for (const char* e : extra) v.emplace_back(e);
        return v;
    };
    switch (t) {
    case Task::McEval: return with({"mc"});
    case Task::Predict: return with({"predict"});
    case Task::Classify: return with({"classify"});
    case Task::BoSearch: return with({"mc", "bo"});
    case Task::HawkesCompare: return {"run", "hawkes"};
    default: return {"run", "gen"};
    }
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

void check_range(double v, double lo, double hi, bool lo_open = false) {
    const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi && !std::isnan(v);
    if (!ok) {
        std::ostringstream os;
        os << "must lie in " << (lo_open ? "(" : "[") << lo << ", " << hi << "], got " << v;
        throw ConfigError(os.str());
    }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

Setter number(std::function<void(ExperimentConfig&, double)> f, double lo = -kInf, double hi = kInf, bool lo_open = false) {
    return [=](ExperimentConfig& c, const std::string& v) {
        const double x = parse_number(v);
        check_range(x, lo, hi, lo_open);
        f(c, x);
    };
}

Setter positive(std::function<void(ExperimentConfig&, double)> f) { return number(std::move(f), 0.0, kInf, true); }
Setter probability(std::function<void(ExperimentConfig&, double)> f) { return number(std::move(f), 0.0, 1.0); }

Setter count(std::function<void(ExperimentConfig&, std::size_t)> f, std::uint64_t lo = 0) {
    return [=](ExperimentConfig& c, const std::string& v) {
        const auto x = parse_unsigned(v);
        if (x < lo) throw ConfigError("must be >= " + std::to_string(lo) + ", got " + std::to_string(x));
        f(c, static_cast<std::size_t>(x));
    };
}

Setter flag(std::function<void(ExperimentConfig&, bool)> f) {
    return [=](ExperimentConfig& c, const std::string& v) { f(c, parse_bool(v)); };
}

Setter dist(std::function<void(ExperimentConfig&, const DistributionSpec&)> f) {
    return [=](ExperimentConfig& c, const std::string& v) { f(c, parse_distribution(v)); };
}

Setter text(std::function<void(ExperimentConfig&, const std::string&)> f) {
    return [=](ExperimentConfig& c, const std::string& v) { f(c, trim(v)); };
}

void add_hawkes_kernels(std::map<std::string, Setter>& s, const std::string& prefix,
                        std::function<HawkesSpec&(ExperimentConfig&)> spec) {
    for (int k = 1; k <= 4; ++k) {
        const auto pick = [k](HawkesSpec& h) -> KernelDistribution& {
            return k == 1 ? h.h1 : k == 2 ? h.h2 : k == 3 ? h.h3 : h.h4;
        };
        const std::string base = prefix + "_h" + std::to_string(k);
        s[base + "_amplitude"] = dist([=](ExperimentConfig& c, const DistributionSpec& d) { pick(spec(c)).amplitude = d; });
        s[base + "_rate"] = dist([=](ExperimentConfig& c, const DistributionSpec& d) { pick(spec(c)).rate = d; });
    }
}

const Schema& schema() {
    static const Schema s = [] {
        Schema m;
        auto& run = m["run"];
        run["task"] = text([](ExperimentConfig& c, const std::string& v) { c.task = task_from_string(v); });
        run["seed"] = count([](ExperimentConfig& c, std::size_t v) { c.seed = v; });
        run["replicates"] = count([](ExperimentConfig& c, std::size_t v) { c.replicates = v; }, 1);
        run["workers"] = count([](ExperimentConfig& c, std::size_t v) { c.workers = v; });
        run["dt"] = positive([](ExperimentConfig& c, double v) { c.model.dt = v; });
        run["backend"] = text([](ExperimentConfig& c, const std::string& v) {
            if (v == "openmp") c.model.backend = Backend::OpenMP;
            else if (v == "serial") c.model.backend = Backend::Serial;
            else throw ConfigError("expected openmp or serial, got '" + v + "'");
        });

        auto& net = m["network"];
        net["n_exc"] = count([](ExperimentConfig& c, std::size_t v) { c.model.topology.n_exc = v; });
        net["n_inh"] = count([](ExperimentConfig& c, std::size_t v) { c.model.topology.n_inh = v; });
        net["connection_prob"] = probability([](ExperimentConfig& c, double v) {
            auto& t = c.model.topology;
            t.p_ee = t.p_ei = t.p_ie = t.p_ii = v;
        });
        net["p_ee"] = probability([](ExperimentConfig& c, double v) { c.model.topology.p_ee = v; });
        net["p_ei"] = probability([](ExperimentConfig& c, double v) { c.model.topology.p_ei = v; });
        net["p_ie"] = probability([](ExperimentConfig& c, double v) { c.model.topology.p_ie = v; });
        net["p_ii"] = probability([](ExperimentConfig& c, double v) { c.model.topology.p_ii = v; });
        net["a_ee"] = number([](ExperimentConfig& c, double v) { c.model.topology.a_ee = v; }, 0.0);
        net["a_ei"] = number([](ExperimentConfig& c, double v) { c.model.topology.a_ei = v; }, 0.0);
        net["a_ie"] = number([](ExperimentConfig& c, double v) { c.model.topology.a_ie = v; }, 0.0);
        net["a_ii"] = number([](ExperimentConfig& c, double v) { c.model.topology.a_ii = v; }, 0.0);
        net["w_min"] = number([](ExperimentConfig& c, double v) { c.model.topology.w_min = v; }, 0.0);
        net["w_max"] = number([](ExperimentConfig& c, double v) { c.model.topology.w_max = v; }, 0.0);
        net["input_fraction"] = probability([](ExperimentConfig& c, double v) { c.model.topology.input_fraction = v; });
        net["input_prob"] = probability([](ExperimentConfig& c, double v) { c.model.topology.input_prob = v; });
        net["input_scale"] = number([](ExperimentConfig& c, double v) { c.model.topology.input_scale = v; }, 0.0);
        net["input_w_min"] = number([](ExperimentConfig& c, double v) { c.model.topology.input_w_min = v; }, 0.0);
        net["input_w_max"] = number([](ExperimentConfig& c, double v) { c.model.topology.input_w_max = v; }, 0.0);
        net["bias_current"] = number([](ExperimentConfig& c, double v) { c.model.topology.bias_current = v; });
        net["plastic_inhibitory"] = flag([](ExperimentConfig& c, bool v) { c.model.topology.plastic_inhibitory = v; });

        auto& neu = m["neuron"];
        neu["tau_m_exc"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.neurons.tau_m_exc = d; });
        neu["tau_m_inh"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.neurons.tau_m_inh = d; });
        neu["tau_m_unit"] = positive([](ExperimentConfig& c, double v) { c.model.neurons.tau_m_unit = v; });
        neu["v_th"] = dist([](ExperimentConfig& c, const DistributionSpec& d) {
            if (d.family == Family::Degenerate) {
                c.model.neurons.base.v_th = d.a;
                c.model.neurons.v_th.reset();
            } else {
                c.model.neurons.v_th = d;
            }
        });
        neu["v_rest"] = number([](ExperimentConfig& c, double v) { c.model.neurons.base.v_rest = v; });
        neu["v_reset"] = number([](ExperimentConfig& c, double v) { c.model.neurons.base.v_reset = v; });
        neu["t_ref"] = number([](ExperimentConfig& c, double v) { c.model.neurons.base.t_ref = v; }, 0.0);

        auto& stdp = m["stdp"];
        stdp["tau_plus"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.stdp.tau_plus = d; });
        stdp["tau_minus"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.stdp.tau_minus = d; });
        stdp["eta_plus"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.stdp.eta_plus = d; });
        stdp["eta_minus"] = dist([](ExperimentConfig& c, const DistributionSpec& d) { c.model.stdp.eta_minus = d; });
        stdp["learning"] = flag([](ExperimentConfig& c, bool v) { c.model.learning = v; });
        stdp["warmup_samples"] = count([](ExperimentConfig& c, std::size_t v) { c.model.warmup_samples = v; });

        auto& codec = m["codec"];
        codec["encoding"] = text([](ExperimentConfig& c, const std::string& v) { c.model.encoding = encoding_from_string(v); });
        codec["sf_threshold"] = positive([](ExperimentConfig& c, double v) { c.model.codec.sf_threshold = v; });
        codec["rate_max"] = number([](ExperimentConfig& c, double v) { c.model.codec.rate_max = v; }, 0.0);
        codec["window"] = count([](ExperimentConfig& c, std::size_t v) { c.model.codec.window = v; }, 2);
        codec["window_leak"] = number([](ExperimentConfig& c, double v) { c.model.codec.window_leak = v; }, 0.0, 1.0, true);
        codec["channels_per_dim"] = count([](ExperimentConfig& c, std::size_t v) { c.model.channels_per_dim = v; }, 1);
        codec["hold"] = count([](ExperimentConfig& c, std::size_t v) { c.model.hold = v; }, 1);
        codec["decode"] = text([](ExperimentConfig& c, const std::string& v) {
            if (v == "excitatory") c.model.decode_excitatory_only = true;
            else if (v == "all") c.model.decode_excitatory_only = false;
            else throw ConfigError("expected excitatory or all, got '" + v + "'");
        });

        auto& mc = m["mc"];
        mc["source"] = text([](ExperimentConfig& c, const std::string& v) {
            if (v != "network" && v != "delay-line") throw ConfigError("expected network or delay-line, got '" + v + "'");
            c.mc.source = v;
        });
        mc["delay_k"] = count([](ExperimentConfig& c, std::size_t v) { c.mc.delay_k = v; }, 1);
        mc["samples"] = count([](ExperimentConfig& c, std::size_t v) { c.mc.eval.samples = v; }, 1);
        mc["tau_max"] = count([](ExperimentConfig& c, std::size_t v) { c.mc.eval.capacity.tau_max = v; }, 1);
        mc["ridge"] = number([](ExperimentConfig& c, double v) { c.mc.eval.capacity.ridge = v; }, 0.0);
        mc["train_fraction"] = number([](ExperimentConfig& c, double v) { c.mc.eval.capacity.train_fraction = v; }, 0.0, 1.0, true);
        mc["washout"] = count([](ExperimentConfig& c, std::size_t v) { c.mc.eval.capacity.washout = v; });

        auto& pr = m["predict"];
        pr["system"] = text([](ExperimentConfig& c, const std::string& v) { c.predict.system = system_from_string(v); });
        pr["dims"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.dims = v; }, 1);
        pr["horizon"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.horizon = v; }, 1);
        pr["train_fraction"] = number([](ExperimentConfig& c, double v) { c.predict.train_fraction = v; }, 0.0, 1.0, true);
        pr["washout"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.washout = v; });
        pr["ridge"] = number([](ExperimentConfig& c, double v) { c.predict.ridge = v; }, 0.0);

        auto& l96 = m["lorenz96"];
        l96["k"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.lorenz96.k = v; }, 4);
        l96["j"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.lorenz96.j = v; }, 4);
        l96["i"] = count([](ExperimentConfig& c, std::size_t v) { c.predict.lorenz96.i = v; }, 4);
        l96["forcing"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.forcing = v; });
        l96["b"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.b = v; });
        l96["c"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.c = v; });
        l96["d"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.d = v; });
        l96["e"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.e = v; });
        l96["g"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.g = v; });
        l96["h"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.h = v; });
        l96["x_damping"] = flag([](ExperimentConfig& c, bool v) { c.predict.lorenz96.x_damping = v; });
        l96["dt"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.dt = v; }, 0.0, 0.01, true);
        l96["duration"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.duration = v; }, 0.0);
        l96["burn_in"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.burn_in = v; }, 0.0);
        l96["sample_interval"] = positive([](ExperimentConfig& c, double v) { c.predict.lorenz96.sample_interval = v; });
        l96["x0"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.x0 = v; });
        l96["y0"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.y0 = v; });
        l96["z0"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.z0 = v; });
        l96["perturbation"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz96.perturbation = v; }, 0.0);

        auto& l63 = m["lorenz63"];
        l63["rho"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz63.rho = v; });
        l63["sigma"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz63.sigma = v; });
        l63["beta"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz63.beta = v; });
        l63["x0"] = text([](ExperimentConfig& c, const std::string& v) {
            std::stringstream ss(v);
            std::string part;
            std::vector<double> xs;
            while (std::getline(ss, part, ',')) xs.push_back(parse_number(part));
            if (xs.size() != 3) throw ConfigError("expected three comma-separated numbers");
            c.predict.lorenz63.x0 = {xs[0], xs[1], xs[2]};
        });
        l63["dt"] = positive([](ExperimentConfig& c, double v) { c.predict.lorenz63.dt = v; });
        l63["duration"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz63.duration = v; }, 0.0);
        l63["burn_in"] = number([](ExperimentConfig& c, double v) { c.predict.lorenz63.burn_in = v; }, 0.0);

        auto& cl = m["classify"];
        cl["n_classes"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.data.n_classes = static_cast<int>(v); }, 2);
        cl["samples_per_class"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.data.samples_per_class = v; }, 2);
        cl["n_channels"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.data.n_channels = v; }, 1);
        cl["duration"] = positive([](ExperimentConfig& c, double v) { c.classify.data.duration = v; });
        cl["template_rate"] = number([](ExperimentConfig& c, double v) { c.classify.data.template_rate = v; }, 0.0);
        cl["jitter"] = number([](ExperimentConfig& c, double v) { c.classify.data.jitter = v; }, 0.0);
        cl["deletion"] = probability([](ExperimentConfig& c, double v) { c.classify.data.deletion = v; });
        cl["test_fraction"] = number([](ExperimentConfig& c, double v) { c.classify.data.test_fraction = v; }, 0.0, 1.0, true);
        cl["feature_slices"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.feature_slices = v; }, 1);
        cl["readout"] = text([](ExperimentConfig& c, const std::string& v) { c.classify.readout = readout_from_string(v); });
        cl["ridge"] = number([](ExperimentConfig& c, double v) { c.classify.ridge = v; }, 0.0);
        cl["epochs"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.adam.epochs = v; }, 1);
        cl["lr"] = positive([](ExperimentConfig& c, double v) { c.classify.adam.lr = v; });
        cl["batch_size"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.adam.batch_size = v; });
        cl["warmup_samples"] = count([](ExperimentConfig& c, std::size_t v) { c.classify.warmup_samples = v; });
        cl["permute_labels"] = flag([](ExperimentConfig& c, bool v) { c.classify.permute_labels = v; });

        auto& bo = m["bo"];
        bo["objective"] = text([](ExperimentConfig& c, const std::string& v) { c.bo.objective = objective_from_string(v); });
        bo["budget"] = count([](ExperimentConfig& c, std::size_t v) { c.bo.bo.budget = v; }, 1);
        bo["n_init"] = count([](ExperimentConfig& c, std::size_t v) { c.bo.bo.n_init = v; }, 2);
        bo["candidates"] = count([](ExperimentConfig& c, std::size_t v) { c.bo.bo.candidates_per_iter = v; }, 1);
        bo["local_fraction"] = probability([](ExperimentConfig& c, double v) { c.bo.bo.local_fraction = v; });
        bo["local_sd"] = positive([](ExperimentConfig& c, double v) { c.bo.bo.local_sd = v; });
        bo["nu"] = number([](ExperimentConfig& c, double v) {
            if (v != 0.5 && v != 1.5 && v != 2.5) throw ConfigError("must be 0.5, 1.5 or 2.5");
            c.bo.bo.kernel.nu = v;
        });
        bo["noise"] = number([](ExperimentConfig& c, double v) { c.bo.bo.kernel.noise = v; }, 0.0);
        bo["fit_hyperparameters"] = flag([](ExperimentConfig& c, bool v) { c.bo.bo.kernel.fit_hyperparameters = v; });
        bo["ard"] = flag([](ExperimentConfig& c, bool v) { c.bo.bo.ard = v; });
        bo["grid_size"] = count([](ExperimentConfig& c, std::size_t v) { c.bo.bo.kernel.grid_size = v; }, 2);
        bo["failure_penalty"] = number([](ExperimentConfig& c, double v) { c.bo.bo.failure_penalty = v; });

        auto& hk = m["hawkes"];
        const auto both = [](std::function<void(HawkesSpec&, double)> f) {
            return [f](ExperimentConfig& c, double v) {
                f(c.hawkes.homogeneous, v);
                f(c.hawkes.heterogeneous, v);
            };
        };
        hk["n_total"] = count([](ExperimentConfig& c, std::size_t v) { c.hawkes.homogeneous.n_total = c.hawkes.heterogeneous.n_total = v; }, 2);
        hk["alpha"] = number(both([](HawkesSpec& h, double v) { h.alpha = v; }), 0.0, 1.0, true);
        hk["mu_a"] = number(both([](HawkesSpec& h, double v) { h.mu_a = v; }), 0.0);
        hk["mu_b"] = number(both([](HawkesSpec& h, double v) { h.mu_b = v; }), 0.0);
        hk["feedback_cap"] = number(both([](HawkesSpec& h, double v) { h.feedback_cap = v; }), 0.0);
        hk["horizon"] = positive([](ExperimentConfig& c, double v) { c.hawkes.horizon = v; });
        hk["n_seeds"] = count([](ExperimentConfig& c, std::size_t v) { c.hawkes.n_seeds = v; }, 2);
        add_hawkes_kernels(hk, "hom", [](ExperimentConfig& c) -> HawkesSpec& { return c.hawkes.homogeneous; });
        add_hawkes_kernels(hk, "het", [](ExperimentConfig& c) -> HawkesSpec& { return c.hawkes.heterogeneous; });

        auto& gen = m["gen"];
        gen["kind"] = text([](ExperimentConfig& c, const std::string& v) {
            if (v != "lorenz96" && v != "lorenz63" && v != "uniform" && v != "spike-classes")
                throw ConfigError("expected lorenz96, lorenz63, uniform or spike-classes, got '" + v + "'");
            c.gen.kind = v;
        });
        gen["n"] = count([](ExperimentConfig& c, std::size_t v) { c.gen.n = v; });
        return m;
    }();
    return s;
}

void collect(std::vector<std::string>& diags, const std::string& where, const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        diags.push_back(where + ": " + e.what());
    }
}

} // namespace

ConfigLoad load_config(const IniDocument& doc, std::optional<Task> task) {
    ConfigLoad out;
    auto& cfg = out.config;
    auto& diags = out.diagnostics;
    const Schema& sch = schema();

    // the task decides which blocks are required, so read it first
    if (const auto* run = doc.find("run"))
        for (const auto& e : run->entries)
            if (e.key == "task") collect(diags, "run.task", [&] { cfg.task = task_from_string(e.value); });
    if (task) cfg.task = *task;
    else if (!doc.find("run") || std::none_of(doc.find("run")->entries.begin(), doc.find("run")->entries.end(),
                                              [](const IniEntry& e) { return e.key == "task"; }))
        diags.push_back("run.task: missing (no task given on the command line either)");

    // the delay-line fixture needs no network
    bool delay_line = false;
    if (const auto* mc = doc.find("mc"))
        for (const auto& e : mc->entries)
            if (e.key == "source" && trim(e.value) == "delay-line") delay_line = true;
    const bool uses_model = cfg.task != Task::HawkesCompare && cfg.task != Task::GenData &&
                            !(cfg.task == Task::McEval && delay_line);
    auto blocks = required_blocks(cfg.task);
    if (!uses_model)
        std::erase_if(blocks, [](const std::string& b) {
            return b == "network" || b == "neuron" || b == "stdp" || b == "codec";
        });
    for (const auto& block : blocks)
        if (!doc.find(block)) diags.push_back("missing required block [" + block + "] for task " + to_string(cfg.task));

    for (const auto& sec : doc.sections) {
        const auto it = sch.find(sec.name);
        if (it == sch.end()) {
            diags.push_back("[" + sec.name + "]: unknown block");
            continue;
        }
        for (const auto& e : sec.entries) {
            const std::string where = sec.name + "." + e.key;
            const auto setter = it->second.find(e.key);
            if (setter == it->second.end()) {
                diags.push_back(where + ": unknown key");
                continue;
            }
            if (where == "run.task") {
                cfg.entries[where] = e.value;
                continue;
            }
            collect(diags, where, [&] { setter->second(cfg, e.value); });
            cfg.entries[where] = e.value;
        }
    }
    cfg.entries["run.task"] = to_string(cfg.task);
    if (!diags.empty()) return out;

    // cross-field invariants, checked only once every key parsed
    if (uses_model) collect(diags, "model", [&] { cfg.model.validate(); });
    if (uses_model) {
        collect(diags, "neuron", [&] {
            sample_neuron_population(cfg.model.neurons, 1, 1, 0);
            NeuronParams p = cfg.model.neurons.base;
            p.validate();
        });
        collect(diags, "stdp", [&] { sample_stdp_population(cfg.model.stdp, cfg.model.topology.w_min, cfg.model.topology.w_max, 1, 0); });
    }
    if (cfg.task == Task::BoSearch) {
        collect(diags, "bo", [&] { cfg.bo.bo.validate(); });
        if (cfg.bo.bo.budget < cfg.bo.bo.n_init) diags.push_back("bo.budget: must be >= bo.n_init");
    }
    if (cfg.task == Task::McEval || cfg.task == Task::BoSearch) {
        const auto& cc = cfg.mc.eval.capacity;
        if (cfg.mc.eval.samples <= cc.washout + cc.tau_max + 20)
            diags.push_back("mc.samples: must exceed washout + tau_max + 20");
    }
    if (cfg.task == Task::Predict || (cfg.task == Task::GenData && cfg.gen.kind == "lorenz96"))
        collect(diags, "lorenz96", [&] { cfg.predict.lorenz96.validate(); });
    if (cfg.task == Task::HawkesCompare) {
        collect(diags, "hawkes", [&] {
            cfg.hawkes.homogeneous.sample(0).validate();
            cfg.hawkes.heterogeneous.sample(0).validate();
        });
    }
    return out;
}

ExperimentConfig build_config(const IniDocument& doc, std::optional<Task> task) {
    auto r = load_config(doc, task);
    if (!r.diagnostics.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& d : r.diagnostics) msg += "\n  " + d;
        throw ConfigError(msg);
    }
    return r.config;
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.entries) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace hrsnn
