#include "hrsnn/error.hpp"
#include "hrsnn/network.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

namespace hrsnn {

using nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

json topology_config_json(const TopologyConfig& c) {
    return {{"n_exc", c.n_exc},
            {"n_inh", c.n_inh},
            {"p_ee", c.p_ee},
            {"p_ei", c.p_ei},
            {"p_ie", c.p_ie},
            {"p_ii", c.p_ii},
            {"a_ee", c.a_ee},
            {"a_ei", c.a_ei},
            {"a_ie", c.a_ie},
            {"a_ii", c.a_ii},
            {"w_min", c.w_min},
            {"w_max", c.w_max},
            {"n_inputs", c.n_inputs},
            {"input_fraction", c.input_fraction},
            {"input_prob", c.input_prob},
            {"input_scale", c.input_scale},
            {"input_w_min", c.input_w_min},
            {"input_w_max", c.input_w_max},
            {"bias_current", c.bias_current},
            {"plastic_inhibitory", c.plastic_inhibitory}};
}

TopologyConfig topology_config_from(const json& j) {
    TopologyConfig c;
    j.at("n_exc").get_to(c.n_exc);
    j.at("n_inh").get_to(c.n_inh);
    j.at("p_ee").get_to(c.p_ee);
    j.at("p_ei").get_to(c.p_ei);
    j.at("p_ie").get_to(c.p_ie);
    j.at("p_ii").get_to(c.p_ii);
    j.at("a_ee").get_to(c.a_ee);
    j.at("a_ei").get_to(c.a_ei);
    j.at("a_ie").get_to(c.a_ie);
    j.at("a_ii").get_to(c.a_ii);
    j.at("w_min").get_to(c.w_min);
    j.at("w_max").get_to(c.w_max);
    j.at("n_inputs").get_to(c.n_inputs);
    j.at("input_fraction").get_to(c.input_fraction);
    j.at("input_prob").get_to(c.input_prob);
    j.at("input_scale").get_to(c.input_scale);
    j.at("input_w_min").get_to(c.input_w_min);
    j.at("input_w_max").get_to(c.input_w_max);
    j.at("bias_current").get_to(c.bias_current);
    j.at("plastic_inhibitory").get_to(c.plastic_inhibitory);
    return c;
}

double block_gain(const TopologyConfig& c, std::size_t pre, std::size_t post) {
    const bool pe = pre < c.n_exc, qe = post < c.n_exc;
    if (pe) return qe ? c.a_ee : c.a_ei;
    return -(qe ? c.a_ie : c.a_ii);
}

} // namespace

std::string network_to_json(const Network& net, int indent) {
    const Topology& t = net.topology;
    json neurons = json::array();
    for (const auto& p : net.neurons)
        neurons.push_back({{"tau_m", p.tau_m},
                           {"v_th", p.v_th},
                           {"v_rest", p.v_rest},
                           {"v_reset", p.v_reset},
                           {"t_ref", p.t_ref},
                           {"excitatory", p.is_excitatory}});
    json stdp = json::array();
    for (const auto& s : net.stdp)
        stdp.push_back({{"tau_plus", s.tau_plus},
                        {"tau_minus", s.tau_minus},
                        {"eta_plus", s.eta_plus},
                        {"eta_minus", s.eta_minus},
                        {"w_min", s.w_min},
                        {"w_max", s.w_max}});
    std::vector<std::uint32_t> in_post;
    for (std::size_t i = 0; i < t.n_neurons(); ++i)
        for (auto k = t.in_row_ptr[i]; k < t.in_row_ptr[i + 1]; ++k) in_post.push_back(static_cast<std::uint32_t>(i));

    json doc = {{"format", "hrsnn-network"},
                {"version", kSnapshotVersion},
                {"seed", net.seed},
                {"topology", topology_config_json(net.config)},
                {"neurons", neurons},
                {"stdp", stdp},
                {"weights", {{"post", t.post}, {"pre", t.pre}, {"value", net.weights}}},
                {"input_weights", {{"post", in_post}, {"channel", t.in_channel}, {"value", t.in_weight}}}};
    return doc.dump(indent);
}

Network network_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("network snapshot is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format") != "hrsnn-network") throw DataError("not a network snapshot");
        if (doc.at("version").get<int>() != kSnapshotVersion)
            throw DataError("unsupported network snapshot version " + doc.at("version").dump());

        Network net;
        net.seed = doc.at("seed").get<std::uint64_t>();
        net.config = topology_config_from(doc.at("topology"));
        net.config.validate();
        for (const auto& j : doc.at("neurons")) {
            NeuronParams p;
            j.at("tau_m").get_to(p.tau_m);
            j.at("v_th").get_to(p.v_th);
            j.at("v_rest").get_to(p.v_rest);
            j.at("v_reset").get_to(p.v_reset);
            j.at("t_ref").get_to(p.t_ref);
            j.at("excitatory").get_to(p.is_excitatory);
            net.neurons.push_back(p);
        }
        for (const auto& j : doc.at("stdp")) {
            StdpParams s;
            j.at("tau_plus").get_to(s.tau_plus);
            j.at("tau_minus").get_to(s.tau_minus);
            j.at("eta_plus").get_to(s.eta_plus);
            j.at("eta_minus").get_to(s.eta_minus);
            j.at("w_min").get_to(s.w_min);
            j.at("w_max").get_to(s.w_max);
            net.stdp.push_back(s);
        }

        const std::size_t n = net.config.n_neurons();
        if (net.neurons.size() != n) throw DataError("snapshot neuron count does not match its topology");

        Topology& t = net.topology;
        t.n_exc = net.config.n_exc;
        t.n_inh = net.config.n_inh;
        t.n_inputs = net.config.n_inputs;

        const auto post = doc.at("weights").at("post").get<std::vector<std::uint32_t>>();
        const auto pre = doc.at("weights").at("pre").get<std::vector<std::uint32_t>>();
        const auto val = doc.at("weights").at("value").get<std::vector<double>>();
        if (post.size() != pre.size() || pre.size() != val.size()) throw DataError("ragged weight triplets");
        std::vector<std::size_t> order(pre.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            return std::tie(post[a], pre[a]) < std::tie(post[b], pre[b]);
        });
        t.row_ptr.assign(n + 1, 0);
        for (auto k : order) {
            if (post[k] >= n || pre[k] >= n || post[k] == pre[k]) throw DataError("invalid synapse in snapshot");
            t.pre.push_back(pre[k]);
            t.post.push_back(post[k]);
            t.gain.push_back(block_gain(net.config, pre[k], post[k]));
            net.weights.push_back(val[k]);
            ++t.row_ptr[post[k] + 1];
        }
        std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
        t.out_ptr.assign(n + 1, 0);
        for (auto p : t.pre) ++t.out_ptr[p + 1];
        std::partial_sum(t.out_ptr.begin(), t.out_ptr.end(), t.out_ptr.begin());
        t.out_syn.resize(t.pre.size());
        std::vector<std::uint32_t> fill(t.out_ptr.begin(), t.out_ptr.end() - 1);
        for (std::size_t s = 0; s < t.pre.size(); ++s) t.out_syn[fill[t.pre[s]]++] = static_cast<std::uint32_t>(s);

        const auto in_post = doc.at("input_weights").at("post").get<std::vector<std::uint32_t>>();
        t.in_channel = doc.at("input_weights").at("channel").get<std::vector<std::uint32_t>>();
        t.in_weight = doc.at("input_weights").at("value").get<std::vector<double>>();
        if (in_post.size() != t.in_channel.size() || in_post.size() != t.in_weight.size())
            throw DataError("ragged input weight triplets");
        t.in_row_ptr.assign(n + 1, 0);
        for (std::size_t k = 0; k < in_post.size(); ++k) {
            if (in_post[k] >= n || t.in_channel[k] >= t.n_inputs) throw DataError("invalid input synapse in snapshot");
            if (k > 0 && in_post[k] < in_post[k - 1]) throw DataError("input synapses must be sorted by neuron");
            ++t.in_row_ptr[in_post[k] + 1];
        }
        std::partial_sum(t.in_row_ptr.begin(), t.in_row_ptr.end(), t.in_row_ptr.begin());

        if (net.stdp.empty() || (net.stdp.size() != 1 && net.stdp.size() != t.n_synapses()))
            throw DataError("snapshot STDP parameter count does not match its synapses");
        return net;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed network snapshot: ") + e.what());
    }
}

void save_network(const std::string& path, const Network& net) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << network_to_json(net, 1) << '\n';
    if (!os) throw IoError("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return network_from_json(ss.str());
}

} // namespace hrsnn
