#include "hrsnn/pipeline.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hrsnn {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

enum Stream : std::uint64_t { kNeurons = 1, kWiring, kStdp, kWarmupInput, kWarmupEncode, kInput, kEncode, kData, kPermute };

const double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

std::string to_string(Encoding e) { return e == Encoding::Rate ? "rate" : "sf"; }

Encoding encoding_from_string(const std::string& s) {
    if (s == "rate") return Encoding::Rate;
    if (s == "sf" || s == "step-forward") return Encoding::StepForward;
    throw ConfigError("unknown encoding '" + s + "' (expected rate or sf)");
}

void ModelConfig::validate() const {
    topology.validate();
    codec.validate();
    if (hold == 0) throw ConfigError("hold must be >= 1");
    if (encoding == Encoding::Rate && channels_per_dim == 0) throw ConfigError("channels_per_dim must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(neurons.tau_m_unit > 0.0)) throw ConfigError("tau_m_unit must be > 0");
}

Network instantiate_network(const ModelConfig& model, std::size_t n_inputs, std::uint64_t seed) {
    model.validate();
    TopologyConfig topo = model.topology;
    topo.n_inputs = n_inputs;
    auto neurons = sample_neuron_population(model.neurons, topo.n_exc, topo.n_inh, derive_seed(seed, kNeurons));
    const std::uint64_t wiring_seed = derive_seed(seed, kWiring);

    const auto& d = model.stdp;
    const bool shared = d.tau_plus.family == Family::Degenerate && d.tau_minus.family == Family::Degenerate &&
                        d.eta_plus.family == Family::Degenerate && d.eta_minus.family == Family::Degenerate;
    std::vector<StdpParams> stdp;
    if (shared) {
        stdp = sample_stdp_population(d, topo.w_min, topo.w_max, 1, derive_seed(seed, kStdp));
    } else {
        const std::size_t n_syn = wire_network(topo, wiring_seed).topology.n_synapses();
        stdp = sample_stdp_population(d, topo.w_min, topo.w_max, std::max<std::size_t>(n_syn, 1), derive_seed(seed, kStdp));
        if (n_syn == 0) stdp.resize(1);
    }
    return build_network(std::move(neurons), std::move(stdp), topo, wiring_seed);
}

std::size_t encoded_channels(const ModelConfig& model, std::size_t dims) {
    return model.encoding == Encoding::Rate ? dims * model.channels_per_dim : 2 * dims;
}

SpikeRaster encode_signals(const ModelConfig& model, const Eigen::MatrixXd& signals, std::uint64_t seed) {
    const auto n_t = static_cast<std::size_t>(signals.rows());
    const auto dims = static_cast<std::size_t>(signals.cols());
    const std::size_t n_bins = n_t * model.hold;
    if (model.encoding == Encoding::StepForward) {
        Eigen::MatrixXd held(static_cast<Eigen::Index>(n_bins), signals.cols());
        for (std::size_t b = 0; b < n_bins; ++b) held.row(static_cast<Eigen::Index>(b)) = signals.row(static_cast<Eigen::Index>(b / model.hold));
        return sf_encode(held, model.codec.sf_threshold, model.dt);
    }
    const std::size_t per = model.channels_per_dim;
    SpikeRaster out(dims * per, n_bins, model.dt);
    std::vector<double> held(n_bins);
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t b = 0; b < n_bins; ++b)
            held[b] = signals(static_cast<Eigen::Index>(b / model.hold), static_cast<Eigen::Index>(d));
        const SpikeRaster one = rate_encode(held, model.codec.rate_max, per, model.dt, derive_seed(seed, d));
        for (std::size_t b = 0; b < n_bins; ++b)
            for (std::size_t c = 0; c < per; ++c)
                if (one.get(c, b)) out.set(d * per + c, b);
    }
    return out;
}

void train_stdp(Network& net, const SpikeRaster& input, const ModelConfig& model) {
    SimOptions opts{model.dt, true, model.backend};
    net.weights = simulate(net, input, input.duration(), opts).final_weights;
}

Eigen::MatrixXd sample_states(const ModelConfig& model, const Network& net, const SpikeRaster& raster,
                              std::size_t n_samples) {
    const std::size_t n_dec = model.decode_excitatory_only ? net.topology.n_exc : net.topology.n_neurons();
    const SpikeRaster sub = raster.select_neurons(0, n_dec);
    const Eigen::MatrixXd decoded = rate_decode(sub, model.codec.window, model.codec.gamma());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n_samples), decoded.cols());
    for (std::size_t t = 0; t < n_samples; ++t)
        out.row(static_cast<Eigen::Index>(t)) = decoded.row(static_cast<Eigen::Index>((t + 1) * model.hold - 1));
    return out;
}

Eigen::MatrixXd delay_line_states(const std::vector<double>& input, std::size_t k) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(input.size()), static_cast<Eigen::Index>(k));
    for (std::size_t t = 0; t < input.size(); ++t)
        for (std::size_t i = 0; i < k && i + 1 <= t; ++i)
            s(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = input[t - i - 1];
    return s;
}

namespace {

Eigen::MatrixXd uniform_signal(std::size_t n, std::uint64_t seed, std::vector<double>* raw = nullptr) {
    const auto u = iid_uniform(n, seed);
    if (raw) *raw = u;
    Eigen::MatrixXd s(static_cast<Eigen::Index>(n), 1);
    for (std::size_t t = 0; t < n; ++t) s(static_cast<Eigen::Index>(t), 0) = 0.5 * (u[t] + 1.0);
    return s;
}

} // namespace

McEvalResult evaluate_memory_capacity(const ModelConfig& model, const McEvalConfig& cfg, std::uint64_t seed) {
    McEvalResult res;
    res.network = instantiate_network(model, encoded_channels(model, 1), seed);
    if (model.learning && model.warmup_samples > 0) {
        const auto warm = uniform_signal(model.warmup_samples, derive_seed(seed, kWarmupInput));
        train_stdp(res.network, encode_signals(model, warm, derive_seed(seed, kWarmupEncode)), model);
    }
    std::vector<double> input;
    const auto signal = uniform_signal(cfg.samples, derive_seed(seed, kInput), &input);
    const SpikeRaster in = encode_signals(model, signal, derive_seed(seed, kEncode));
    const auto trace = simulate(res.network, in, in.duration(), SimOptions{model.dt, false, model.backend});
    const Eigen::MatrixXd states = sample_states(model, res.network, trace.raster, cfg.samples);

    CapacityConfig cc = cfg.capacity;
    cc.seed = seed;
    res.capacity = memory_capacity(states, input, cc);
    res.spikes = total_spike_count(trace.raster);
    res.efficiency = res.spikes.total > 0 ? spike_efficiency(res.capacity.total, res.spikes.per_neuron).efficiency : kNaN;
    try {
        res.eigen_heterogeneity = eigen_heterogeneity(state_covariance(states));
    } catch (const DataError&) {
        res.eigen_heterogeneity = kNaN;
    }
    return res;
}

std::string to_string(System s) { return s == System::Lorenz63 ? "lorenz63" : "lorenz96"; }

System system_from_string(const std::string& s) {
    if (s == "lorenz63") return System::Lorenz63;
    if (s == "lorenz96") return System::Lorenz96;
    throw ConfigError("unknown system '" + s + "' (expected lorenz63 or lorenz96)");
}

Eigen::MatrixXd prediction_signal(const PredictConfig& cfg, std::uint64_t seed) {
    Eigen::MatrixXd full;
    if (cfg.system == System::Lorenz63) {
        full = lorenz63(cfg.lorenz63).values;
    } else {
        full = lorenz96_multiscale(cfg.lorenz96, derive_seed(seed, kData)).columns_with_prefix("Y");
    }
    if (cfg.dims == 0 || cfg.dims > static_cast<std::size_t>(full.cols()))
        throw ConfigError("predict dims must lie in [1, " + std::to_string(full.cols()) + "]");
    return full.leftCols(static_cast<Eigen::Index>(cfg.dims));
}

PredictResult evaluate_prediction(const ModelConfig& model, const PredictConfig& cfg, std::uint64_t seed) {
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (cfg.horizon == 0) throw ConfigError("horizon must be >= 1");
    const Eigen::MatrixXd signal = prediction_signal(cfg, seed);
    const auto n = static_cast<std::size_t>(signal.rows());
    if (n <= cfg.washout + cfg.horizon + 20) throw DataError("trajectory too short for the washout and horizon");
    const std::size_t usable = n - cfg.horizon;
    const std::size_t n_train = cfg.washout + static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(usable - cfg.washout));

    // min-max scaling fitted on the training part, clamped for rate encoding
    Eigen::MatrixXd scaled = signal;
    for (Eigen::Index d = 0; d < signal.cols(); ++d) {
        const auto head = signal.col(d).head(static_cast<Eigen::Index>(n_train));
        const double lo = head.minCoeff(), hi = head.maxCoeff();
        const double span = hi > lo ? hi - lo : 1.0;
        scaled.col(d) = ((signal.col(d).array() - lo) / span).cwiseMax(0.0).cwiseMin(1.0).matrix();
    }

    PredictResult res;
    res.network = instantiate_network(model, encoded_channels(model, static_cast<std::size_t>(signal.cols())), seed);
    const SpikeRaster in = encode_signals(model, scaled, derive_seed(seed, kEncode));
    if (model.learning && model.warmup_samples > 0) {
        const std::size_t w = std::min(model.warmup_samples, n_train);
        train_stdp(res.network, encode_signals(model, scaled.topRows(static_cast<Eigen::Index>(w)), derive_seed(seed, kWarmupEncode)), model);
    }
    const auto trace = simulate(res.network, in, in.duration(), SimOptions{model.dt, false, model.backend});
    res.spikes = total_spike_count(trace.raster);
    const Eigen::MatrixXd states = sample_states(model, res.network, trace.raster, n);

    const auto rows = [&](std::size_t from, std::size_t to) {
        return std::make_pair(states.middleRows(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to - from)).eval(),
                              signal.middleRows(static_cast<Eigen::Index>(from + cfg.horizon), static_cast<Eigen::Index>(to - from)).eval());
    };
    const auto [x_train, y_train] = rows(cfg.washout, n_train);
    const auto [x_test, y_test] = rows(n_train, usable);
    const ReadoutModel readout = fit_ridge(x_train, y_train, cfg.ridge);
    res.nrmse_train = nrmse(predict(readout, x_train), y_train);
    res.prediction = predict(readout, x_test);
    res.target = y_test;
    res.nrmse_test = nrmse(res.prediction, y_test);
    return res;
}

std::string to_string(ReadoutKind k) { return k == ReadoutKind::Ridge ? "ridge" : "adam"; }

ReadoutKind readout_from_string(const std::string& s) {
    if (s == "ridge") return ReadoutKind::Ridge;
    if (s == "adam") return ReadoutKind::Adam;
    throw ConfigError("unknown readout '" + s + "' (expected ridge or adam)");
}

namespace {

// Decoded states averaged over equal time slices, flattened slice-major.
Eigen::RowVectorXd sample_features(const ModelConfig& model, const Network& net, const SpikeRaster& in,
                                   std::size_t slices, SpikeCount& count) {
    const auto trace = simulate(net, in, in.duration(), SimOptions{model.dt, false, model.backend});
    const auto c = total_spike_count(trace.raster);
    count.total += c.total;
    const std::size_t n_dec = model.decode_excitatory_only ? net.topology.n_exc : net.topology.n_neurons();
    const Eigen::MatrixXd decoded = rate_decode(trace.raster.select_neurons(0, n_dec), model.codec.window, model.codec.gamma());
    const auto n_bins = static_cast<std::size_t>(decoded.rows());
    Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(slices * n_dec));
    for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t lo = s * n_bins / slices, hi = (s + 1) * n_bins / slices;
        if (hi <= lo) continue;
        f.segment(static_cast<Eigen::Index>(s * n_dec), static_cast<Eigen::Index>(n_dec)) =
            decoded.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)).colwise().mean();
    }
    return f;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
    return a.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(a.size());
}

} // namespace

ClassifyResult evaluate_classification(const ModelConfig& model, const ClassifyConfig& cfg, std::uint64_t seed) {
    if (cfg.feature_slices == 0) throw ConfigError("feature_slices must be >= 1");
    SpikeClassConfig data_cfg = cfg.data;
    data_cfg.dt = model.dt;
    SpikeClassData data = synthetic_spike_classes(data_cfg, derive_seed(seed, kData));
    if (cfg.permute_labels) {
        Rng rng(derive_seed(seed, kPermute));
        std::shuffle(data.train_labels.begin(), data.train_labels.end(), rng);
    }

    ClassifyResult res;
    res.network = instantiate_network(model, data_cfg.n_channels, seed);
    if (model.learning && cfg.warmup_samples > 0 && !data.train.empty()) {
        const std::size_t w = std::min(cfg.warmup_samples, data.train.size());
        const std::size_t bins = data.train.front().n_bins();
        SpikeRaster joined(data_cfg.n_channels, w * bins, model.dt);
        for (std::size_t s = 0; s < w; ++s)
            for (std::size_t b = 0; b < bins; ++b)
                for (std::size_t c = 0; c < data_cfg.n_channels; ++c)
                    if (data.train[s].get(c, b)) joined.set(c, s * bins + b);
        train_stdp(res.network, joined, model);
    }

    const auto features = [&](const std::vector<SpikeRaster>& set, SpikeCount& count) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(set.size()), 0);
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto f = sample_features(model, res.network, set[i], cfg.feature_slices, count);
            if (i == 0) x.resize(static_cast<Eigen::Index>(set.size()), f.size());
            x.row(static_cast<Eigen::Index>(i)) = f;
        }
        return x;
    };
    SpikeCount train_count;
    Eigen::MatrixXd x_train = features(data.train, train_count);
    Eigen::MatrixXd x_test = features(data.test, res.spikes);
    const std::size_t n_test_neurons = res.network.topology.n_neurons() * std::max<std::size_t>(data.test.size(), 1);
    res.spikes.per_neuron = static_cast<double>(res.spikes.total) / static_cast<double>(n_test_neurons);

    // standardize with training statistics
    const Eigen::RowVectorXd mu = x_train.colwise().mean();
    Eigen::RowVectorXd sd = ((x_train.rowwise() - mu).array().square().colwise().mean()).sqrt();
    for (Eigen::Index c = 0; c < sd.size(); ++c)
        if (!(sd(c) > 1e-12)) sd(c) = 1.0;
    x_train = ((x_train.rowwise() - mu).array().rowwise() / sd.array()).matrix();
    x_test = ((x_test.rowwise() - mu).array().rowwise() / sd.array()).matrix();

    const Eigen::MatrixXd targets = one_hot(data.train_labels, data_cfg.n_classes);
    const ReadoutModel readout = cfg.readout == ReadoutKind::Ridge
                                     ? fit_ridge(x_train, targets, cfg.ridge)
                                     : train_readout(x_train, targets, cfg.adam, derive_seed(seed, kData + 100)).model;
    res.train_accuracy = accuracy(classify(readout, x_train), data.train_labels);
    res.test_predictions = classify(readout, x_test);
    res.test_labels = data.test_labels;
    res.test_accuracy = accuracy(res.test_predictions, res.test_labels);
    return res;
}

std::string to_string(BoObjective o) {
    switch (o) {
    case BoObjective::Capacity: return "capacity";
    case BoObjective::Spikes: return "spikes";
    default: return "efficiency";
    }
}

BoObjective objective_from_string(const std::string& s) {
    if (s == "capacity") return BoObjective::Capacity;
    if (s == "spikes") return BoObjective::Spikes;
    if (s == "efficiency") return BoObjective::Efficiency;
    throw ConfigError("unknown objective '" + s + "' (expected capacity, spikes or efficiency)");
}

ModelConfig apply_search_point(const ModelConfig& model, const SearchPoint& p) {
    ModelConfig m = model;
    for (const auto& mg : p.marginals) {
        if (mg.name == "tau_plus") m.stdp.tau_plus = mg.dist;
        else if (mg.name == "tau_minus") m.stdp.tau_minus = mg.dist;
        else if (mg.name == "eta_plus") m.stdp.eta_plus = mg.dist;
        else if (mg.name == "eta_minus") m.stdp.eta_minus = mg.dist;
        else if (mg.name == "tau_m_exc") m.neurons.tau_m_exc = mg.dist;
        else if (mg.name == "tau_m_inh") m.neurons.tau_m_inh = mg.dist;
        else throw InvalidArgument("unknown marginal '" + mg.name + "'");
    }
    for (const auto& [name, v] : p.scalars) {
        if (name == "a_ee") m.topology.a_ee = v;
        else if (name == "a_ei") m.topology.a_ei = v;
        else if (name == "a_ie") m.topology.a_ie = v;
        else if (name == "a_ii") m.topology.a_ii = v;
        else if (name == "input_scale") m.topology.input_scale = v;
        else if (name == "input_fraction") m.topology.input_fraction = v;
        else if (name == "connection_prob") m.topology.p_ee = m.topology.p_ei = m.topology.p_ie = m.topology.p_ii = v;
        else throw InvalidArgument("unknown scalar dimension '" + name + "'");
    }
    return m;
}

ObjectiveValues evaluate_point(const ModelConfig& model, const McEvalConfig& mc, const SearchPoint& p,
                               std::uint64_t seed) {
    const auto r = evaluate_memory_capacity(apply_search_point(model, p), mc, seed);
    return {r.capacity.total, r.spikes.per_neuron, r.efficiency};
}

double objective_value(BoObjective o, const ObjectiveValues& v) {
    switch (o) {
    case BoObjective::Capacity: return v.capacity > 0.0 ? 1.0 / v.capacity : kNaN;
    case BoObjective::Spikes: return v.mean_spikes > 0.0 ? v.mean_spikes : kNaN;
    default: return v.efficiency > 0.0 ? 1.0 / v.efficiency : kNaN;
    }
}

} // namespace hrsnn
