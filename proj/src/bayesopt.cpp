#include "hrsnn/bayesopt.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace hrsnn {

const DistributionSpec& SearchPoint::get(const std::string& name) const {
    for (const auto& m : marginals)
        if (m.name == name) return m.dist;
    throw InvalidArgument("search point has no marginal '" + name + "'");
}

double SearchPoint::scalar(const std::string& name) const {
    for (const auto& [n, v] : scalars)
        if (n == name) return v;
    throw InvalidArgument("search point has no scalar '" + name + "'");
}

double MarginalRange::distance_width() const {
    if (width > 0.0) return width;
    double w = family == Family::Gamma ? a.hi * b.hi - a.lo * b.lo : a.width();
    return w > 0.0 ? w : 1.0;
}

void SearchSpace::validate() const {
    for (const auto& m : marginals) {
        if (!(m.a.lo <= m.a.hi) || !(m.b.lo <= m.b.hi))
            throw ConfigError("search range for '" + m.name + "' is inverted");
        if (m.family == Family::Gamma && !(m.a.lo > 0.0 && m.b.lo > 0.0))
            throw ConfigError("gamma ranges for '" + m.name + "' must be strictly positive");
        if (m.family == Family::Normal && m.b.lo < 0.0)
            throw ConfigError("sd range for '" + m.name + "' must be non-negative");
    }
    for (const auto& s : scalars)
        if (!(s.range.lo <= s.range.hi)) throw ConfigError("search range for '" + s.name + "' is inverted");
}

SearchPoint SearchSpace::decode(const std::vector<double>& u) const {
    if (u.size() != dims()) throw InvalidArgument("unit vector has the wrong dimension");
    SearchPoint p;
    std::size_t k = 0;
    for (const auto& m : marginals) {
        const double a = m.a.lo + u[k++] * m.a.width();
        const double b = m.b.lo + u[k++] * m.b.width();
        p.marginals.push_back({m.name, DistributionSpec{m.family, a, b}});
    }
    for (const auto& s : scalars) p.scalars.emplace_back(s.name, s.range.lo + u[k++] * s.range.width());
    return p;
}

std::vector<double> SearchSpace::encode(const SearchPoint& p) const {
    std::vector<double> u;
    const auto unit = [](double x, const Range& r) { return r.width() > 0.0 ? (x - r.lo) / r.width() : 0.5; };
    for (const auto& m : marginals) {
        const auto& d = p.get(m.name);
        u.push_back(unit(d.a, m.a));
        u.push_back(unit(d.b, m.b));
    }
    for (const auto& s : scalars) u.push_back(unit(p.scalar(s.name), s.range));
    return u;
}

std::vector<double> SearchSpace::widths() const {
    std::vector<double> w;
    for (const auto& m : marginals) w.push_back(m.distance_width());
    for (const auto& s : scalars) w.push_back(s.range.width() > 0.0 ? s.range.width() : 1.0);
    return w;
}

SearchSpace default_hrsnn_space() {
    SearchSpace s;
    s.marginals = {
        {"tau_plus", Family::Normal, {5.0, 40.0}, {0.0, 5.0}},
        {"tau_minus", Family::Normal, {5.0, 40.0}, {0.0, 5.0}},
        {"eta_plus", Family::Normal, {0.01, 1.0}, {0.0, 0.05}},
        {"eta_minus", Family::Normal, {0.01, 1.0}, {0.0, 0.05}},
        {"tau_m_exc", Family::Gamma, {1.0, 10.0}, {0.05, 0.5}},
        {"tau_m_inh", Family::Gamma, {1.0, 10.0}, {0.05, 0.5}},
    };
    return s;
}

namespace {

// Per-point cache of marginal sketches so repeated distances are cheap.
struct Sketched {
    std::vector<std::string> names;
    std::vector<MarginalSketch> sketches;
    std::vector<std::string> scalar_names;
    std::vector<double> scalars;

    explicit Sketched(const SearchPoint& p) {
        for (const auto& m : p.marginals) {
            names.push_back(m.name);
            sketches.push_back(MarginalSketch::of(m.dist));
        }
        for (const auto& [n, v] : p.scalars) {
            scalar_names.push_back(n);
            scalars.push_back(v);
        }
    }
};

double sketched_distance(const Sketched& a, const Sketched& b, const std::vector<double>& widths) {
    if (a.names != b.names || a.scalar_names != b.scalar_names)
        throw InvalidArgument("search points have different marginal orderings");
    if (widths.size() != a.sketches.size() + a.scalars.size())
        throw InvalidArgument("need one width per marginal and scalar");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.sketches.size(); ++i)
        acc += wasserstein2_squared(a.sketches[i], b.sketches[i]) / (widths[i] * widths[i]);
    for (std::size_t j = 0; j < a.scalars.size(); ++j) {
        const double d = (a.scalars[j] - b.scalars[j]) / widths[a.sketches.size() + j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// Squared per-component terms of sketched_distance: one per marginal, then
// one per scalar.
std::vector<double> component_terms(const Sketched& a, const Sketched& b, const std::vector<double>& widths) {
    std::vector<double> out;
    out.reserve(widths.size());
    for (std::size_t i = 0; i < a.sketches.size(); ++i)
        out.push_back(wasserstein2_squared(a.sketches[i], b.sketches[i]) / (widths[i] * widths[i]));
    for (std::size_t j = 0; j < a.scalars.size(); ++j) {
        const double d = (a.scalars[j] - b.scalars[j]) / widths[a.sketches.size() + j];
        out.push_back(d * d);
    }
    return out;
}

double weighted_distance(const std::vector<double>& terms, const std::vector<double>& relevance) {
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) acc += relevance[i] * terms[i];
    return std::sqrt(acc);
}

Eigen::MatrixXd weighted_distances(const std::vector<std::vector<std::vector<double>>>& terms,
                                   const std::vector<double>& relevance) {
    const auto n = static_cast<Eigen::Index>(terms.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j)
            d(i, j) = d(j, i) = weighted_distance(terms[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], relevance);
    }
    return d;
}

// Per-component relevance weights by coordinate search on the marginal
// likelihood, starting from the isotropic fit. Weight 1 everywhere is the
// plain product-measure distance.
std::vector<double> fit_relevance(const std::vector<std::vector<std::vector<double>>>& terms, const Eigen::VectorXd& y,
                                  const KernelConfig& kernel, std::size_t n_components) {
    std::vector<double> rel(n_components, 1.0);
    KernelConfig fixed = kernel;
    fixed.fit_hyperparameters = false;
    const auto lml = [&](const std::vector<double>& r, const KernelConfig& k) {
        try {
            return gp_fit(weighted_distances(terms, r), y, k).log_marginal_likelihood;
        } catch (const NumericalError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    static constexpr double kGrid[] = {1.0 / 256, 1.0 / 64, 1.0 / 16, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0};
    for (int sweep = 0; sweep < 2; ++sweep) {
        fixed = gp_fit(weighted_distances(terms, rel), y, kernel).kernel;
        fixed.fit_hyperparameters = false;
        for (std::size_t c = 0; c < n_components; ++c) {
            double best = lml(rel, fixed), keep = rel[c];
            for (double g : kGrid) {
                rel[c] = g;
                const double v = lml(rel, fixed);
                if (v > best + 1e-9) {
                    best = v;
                    keep = g;
                }
            }
            rel[c] = keep;
        }
    }
    return rel;
}

double penalty_for(const std::vector<BoRecord>& history, const BoConfig& cfg) {
    if (cfg.failure_penalty) return *cfg.failure_penalty;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : history)
        if (!r.failed) worst = std::max(worst, r.objective);
    if (!std::isfinite(worst)) return 1e6;
    return worst + 9.0 * std::abs(worst) + (worst == 0.0 ? 1.0 : 0.0);
}

std::optional<double> evaluate(const Objective& f, const SearchPoint& p) {
    try {
        const double v = f(p);
        if (std::isfinite(v)) return v;
    } catch (const Error&) {
    }
    return std::nullopt;
}

} // namespace

double search_distance(const SearchPoint& p1, const SearchPoint& p2, const std::vector<double>& widths) {
    return sketched_distance(Sketched(p1), Sketched(p2), widths);
}

double search_distance(const SearchPoint& p1, const SearchPoint& p2) {
    return search_distance(p1, p2, std::vector<double>(p1.marginals.size() + p1.scalars.size(), 1.0));
}

void BoConfig::validate() const {
    if (n_init < 2) throw ConfigError("BO needs n_init >= 2");
    if (budget < n_init) throw ConfigError("BO budget must be >= n_init");
    if (candidates_per_iter == 0) throw ConfigError("BO needs at least one candidate per iteration");
    if (!(local_fraction >= 0.0 && local_fraction <= 1.0)) throw ConfigError("local_fraction must lie in [0, 1]");
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dims, Rng& rng) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
        for (std::size_t i = 0; i < n; ++i)
            pts[i][d] = (static_cast<double>(perm[i]) + uniform01(rng)) / static_cast<double>(n);
    }
    return pts;
}

BoResult bo_loop(const Objective& objective, const SearchSpace& space, const BoConfig& cfg) {
    cfg.validate();
    space.validate();
    Rng rng(cfg.seed);
    const auto widths = space.widths();
    const std::size_t dims = space.dims();

    BoResult result;
    std::vector<Sketched> observed;
    std::vector<std::vector<double>> observed_unit;

    bool have_success = false;
    const auto record = [&](std::vector<double> unit, const SearchPoint& p, std::optional<double> value,
                            double acquisition) {
        BoRecord r;
        r.iteration = result.history.size();
        r.point = p;
        r.failed = !value.has_value();
        r.objective = value ? *value : penalty_for(result.history, cfg);
        r.acquisition = acquisition;
        // failures only hold the incumbent slot until something succeeds
        const bool replace = r.failed ? (!have_success && (result.history.empty() || r.objective < result.best_value))
                                      : (!have_success || r.objective < result.best_value);
        if (replace) {
            result.best = p;
            result.best_value = r.objective;
        }
        have_success = have_success || !r.failed;
        r.incumbent = result.best_value;
        result.history.push_back(std::move(r));
        observed.emplace_back(p);
        observed_unit.push_back(std::move(unit));
    };

    // initial Latin hypercube design, optionally evaluated in parallel
    const auto design = latin_hypercube(cfg.n_init, dims, rng);
    std::vector<SearchPoint> init_points;
    for (const auto& u : design) init_points.push_back(space.decode(u));
    std::vector<std::optional<double>> init_values(init_points.size());
    if (cfg.workers > 1) {
        std::size_t next = 0;
        while (next < init_points.size()) {
            std::vector<std::future<std::optional<double>>> batch;
            for (std::size_t w = 0; w < cfg.workers && next < init_points.size(); ++w, ++next)
                batch.push_back(std::async(std::launch::async, evaluate, std::cref(objective), std::cref(init_points[next])));
            const std::size_t base = next - batch.size();
            for (std::size_t k = 0; k < batch.size(); ++k) init_values[base + k] = batch[k].get();
        }
    } else {
        for (std::size_t i = 0; i < init_points.size(); ++i) init_values[i] = evaluate(objective, init_points[i]);
    }
    for (std::size_t i = 0; i < init_points.size(); ++i) record(design[i], init_points[i], init_values[i], 0.0);

    const std::size_t n_local = static_cast<std::size_t>(std::llround(cfg.local_fraction * static_cast<double>(cfg.candidates_per_iter)));
    std::normal_distribution<double> jitter(0.0, 1.0);
    // local candidates perturb a sparse subset of coordinates at one of
    // three step scales, so the incumbent can be refined as well as left
    const double perturb_prob = std::min(1.0, 2.0 / static_cast<double>(dims));

    const std::size_t n_components = widths.size();
    for (std::size_t it = cfg.n_init; it < cfg.budget; ++it) {
        const auto n = static_cast<Eigen::Index>(observed.size());
        Eigen::VectorXd y(n);
        std::vector<std::vector<std::vector<double>>> terms(observed.size(), std::vector<std::vector<double>>(observed.size()));
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = -result.history[static_cast<std::size_t>(i)].objective; // GP models the maximization form
            for (Eigen::Index j = 0; j < i; ++j)
                terms[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    component_terms(observed[static_cast<std::size_t>(i)], observed[static_cast<std::size_t>(j)], widths);
        }
        const std::vector<double> relevance =
            cfg.ard ? fit_relevance(terms, y, cfg.kernel, n_components) : std::vector<double>(n_components, 1.0);
        const GpSurrogate gp = gp_fit(weighted_distances(terms, relevance), y, cfg.kernel);
        const double f_best = -result.best_value;

        // incumbent in unit coordinates
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < result.history.size(); ++i)
            if (result.history[i].objective == result.best_value) {
                best_idx = i;
                break;
            }
        const auto& inc = observed_unit[best_idx];

        std::vector<std::vector<double>> cand(cfg.candidates_per_iter, std::vector<double>(dims));
        for (std::size_t c = 0; c < cand.size(); ++c) {
            if (c >= n_local) {
                for (std::size_t d = 0; d < dims; ++d) cand[c][d] = uniform01(rng);
                continue;
            }
            const double step = cfg.local_sd * std::pow(0.25, static_cast<double>(c % 3));
            cand[c] = inc;
            const std::size_t forced = static_cast<std::size_t>(rng() % dims);
            for (std::size_t d = 0; d < dims; ++d)
                if (d == forced || uniform01(rng) < perturb_prob)
                    cand[c][d] = std::clamp(inc[d] + step * jitter(rng), 0.0, 1.0);
        }

        std::vector<double> ei(cand.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 32)
        for (long c = 0; c < static_cast<long>(cand.size()); ++c) {
            const Sketched s(space.decode(cand[static_cast<std::size_t>(c)]));
            Eigen::VectorXd dq(n);
            for (Eigen::Index i = 0; i < n; ++i)
                dq(i) = weighted_distance(component_terms(s, observed[static_cast<std::size_t>(i)], widths), relevance);
            const GpPrediction p = gp_predict(gp, dq);
            ei[static_cast<std::size_t>(c)] = expected_improvement(p.mean, p.sd, f_best);
        }
        const auto pick = static_cast<std::size_t>(std::distance(ei.begin(), std::max_element(ei.begin(), ei.end())));
        const SearchPoint next = space.decode(cand[pick]);
        record(cand[pick], next, evaluate(objective, next), ei[pick]);
    }
    return result;
}

void write_bo_history_csv(std::ostream& os, const SearchSpace& space, const BoResult& result) {
    os << "iteration";
    for (const auto& m : space.marginals) os << ',' << m.name << "_a," << m.name << "_b";
    for (const auto& s : space.scalars) os << ',' << s.name;
    os << ",objective,failed,incumbent\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : result.history) {
        os << r.iteration;
        for (const auto& m : space.marginals) {
            const auto& d = r.point.get(m.name);
            os << ',' << d.a << ',' << d.b;
        }
        for (const auto& s : space.scalars) os << ',' << r.point.scalar(s.name);
        os << ',' << r.objective << ',' << (r.failed ? 1 : 0) << ',' << r.incumbent << '\n';
    }
}

} // namespace hrsnn
