#pragma once

#include "hrsnn/distribution.hpp"
#include "hrsnn/gp.hpp"
#include "hrsnn/wasserstein.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hrsnn {

struct Marginal {
    std::string name;
    DistributionSpec dist;
};

// A candidate set of parameter distributions, plus optional scalar
// network-structure dimensions.
struct SearchPoint {
    std::vector<Marginal> marginals;
    std::vector<std::pair<std::string, double>> scalars;

    const DistributionSpec& get(const std::string& name) const;
    double scalar(const std::string& name) const;
};

// Names of the six optimized marginals, in order.
inline const std::vector<std::string>& hrsnn_marginal_names() {
    static const std::vector<std::string> names = {"tau_plus", "tau_minus", "eta_plus",
                                                   "eta_minus", "tau_m_exc", "tau_m_inh"};
    return names;
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct MarginalRange {
    std::string name;
    Family family = Family::Normal;
    Range a; // mean or shape
    Range b; // sd or scale
    // Divides this marginal's W2 in the aggregate distance. 0 = derive from
    // the range of the mean.
    double width = 0.0;

    double distance_width() const;
};

struct ScalarRange {
    std::string name;
    Range range;
};

struct SearchSpace {
    std::vector<MarginalRange> marginals;
    std::vector<ScalarRange> scalars;

    std::size_t dims() const { return 2 * marginals.size() + scalars.size(); }
    void validate() const;
    // Maps a point of the unit cube onto the space.
    SearchPoint decode(const std::vector<double>& unit) const;
    std::vector<double> encode(const SearchPoint& p) const;
    std::vector<double> widths() const;
};

// Default space for the six HRSNN marginals.
SearchSpace default_hrsnn_space();

// sqrt(sum_i (W2_i / width_i)^2 + sum_j ((s_j - s'_j) / width_j)^2): the
// 2-Wasserstein distance of the width-scaled product measures. Throws
// InvalidArgument when names or orderings differ.
double search_distance(const SearchPoint& p1, const SearchPoint& p2, const std::vector<double>& widths);
double search_distance(const SearchPoint& p1, const SearchPoint& p2);

struct BoConfig {
    std::size_t budget = 40;
    std::size_t n_init = 10;
    std::size_t candidates_per_iter = 2048;
    // Share of candidates drawn around the incumbent rather than uniformly.
    double local_fraction = 0.5;
    double local_sd = 0.1; // in unit-cube coordinates
    KernelConfig kernel{2.5, 1.0, 1.0, 1e-6, true, 20};
    // Fit one relevance weight per marginal and scalar on top of the shared
    // length scale, so objectives that ignore some marginals stay learnable.
    bool ard = true;
    // Objective value for failed evaluations; unset = 10x the worst observed.
    std::optional<double> failure_penalty;
    std::uint64_t seed = 0;
    std::size_t workers = 1; // parallel evaluations of the initial design

    void validate() const;
};

struct BoRecord {
    std::size_t iteration = 0; // 0-based evaluation index
    SearchPoint point;
    double objective = 0.0; // penalized value for failures
    bool failed = false;
    double incumbent = 0.0; // best objective so far
    double acquisition = 0.0; // EI of the chosen candidate (0 for the initial design)
};

struct BoResult {
    SearchPoint best;
    double best_value = 0.0;
    std::vector<BoRecord> history;
};

// Objective to minimize. NaN or a thrown hrsnn::Error marks a failure.
using Objective = std::function<double(const SearchPoint&)>;

BoResult bo_loop(const Objective& objective, const SearchSpace& space, const BoConfig& cfg);

// Latin hypercube sample of n points in [0, 1]^dims.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dims, Rng& rng);

// Header: iteration, <name>_a, <name>_b per marginal, scalars, objective,
// failed, incumbent.
void write_bo_history_csv(std::ostream& os, const SearchSpace& space, const BoResult& result);

} // namespace hrsnn
