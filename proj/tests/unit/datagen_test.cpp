#include "hrsnn/datagen.hpp"
#include "hrsnn/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hrsnn;

namespace {

Lorenz96Config small96() {
    Lorenz96Config c;
    c.k = c.j = c.i = 4;
    return c;
}

} // namespace

TEST(Lorenz96, ZeroForcingZeroStateStaysZero) {
    auto c = small96();
    c.forcing = 0.0;
    c.x0 = 0.0;
    c.perturbation = 0.0;
    c.burn_in = 0.0;
    c.duration = 1.0;
    const auto tr = lorenz96_multiscale(c, 1);
    EXPECT_TRUE(tr.values.isZero(0.0));
}

TEST(Lorenz96, LabelsAndYExtraction) {
    auto c = small96();
    c.burn_in = 0.0;
    c.duration = 0.1;
    const auto tr = lorenz96_multiscale(c, 1);
    EXPECT_EQ(static_cast<std::size_t>(tr.values.cols()), c.state_size());
    EXPECT_EQ(tr.labels.front(), "X0");
    EXPECT_EQ(tr.columns_with_prefix("Y").cols(), 16);
    EXPECT_EQ(tr.columns_with_prefix("Z").cols(), 64);
    EXPECT_EQ(tr.values.rows(), 11);
    EXPECT_NEAR(tr.times[10] - tr.times[0], 0.1, 1e-12);
}

TEST(Lorenz96, DerivativeMatchesHandWrittenTierEquations) {
    auto c = small96();
    const auto s = lorenz96_initial_state(c, 3);
    Eigen::VectorXd d(s.size());
    lorenz96_derivative(c, s, d);
    const int K = 4, J = 4, I = 4;
    const auto X = [&](int k) { return s(((k % K) + K) % K); };
    const auto Y = [&](int m) { return s(K + ((m % (J * K)) + J * K) % (J * K)); };
    const auto Z = [&](int m) { return s(K + J * K + ((m % (I * J * K)) + I * J * K) % (I * J * K)); };
    const double b = 10, cc = 10, dd = 10, e = 10, g = 10, h = 1, F = 20;
    for (int k = 0; k < K; ++k) {
        double sy = 0;
        for (int j = 0; j < J; ++j) sy += Y(j + J * k);
        const double dx = X(k - 1) * (X(k + 1) - X(k - 2)) + F - h * cc / b * sy;
        EXPECT_NEAR(d(k), dx, 1e-10);
    }
    for (int m = 0; m < J * K; ++m) {
        double sz = 0;
        for (int i = 0; i < I; ++i) sz += Z(i + I * m);
        const double dy = -cc * b * Y(m + 1) * (Y(m + 2) - Y(m - 1)) - cc * Y(m) + h * cc / b * X(m / J) - h * e / dd * sz;
        EXPECT_NEAR(d(K + m), dy, 1e-9);
    }
    for (int m = 0; m < I * J * K; ++m) {
        const double dz = e * dd * Z(m - 1) * (Z(m + 1) - Z(m - 2)) - g * e * Z(m) + h * e / dd * Y(m / I);
        EXPECT_NEAR(d(K + J * K + m), dz, 1e-9);
    }
}

TEST(Lorenz96, StepHalvingShowsFourthOrder) {
    Lorenz96Config c;
    const auto s0 = lorenz96_integrate(c, lorenz96_initial_state(c, 2), 2.0);
    const double horizon = 0.1;
    auto c1 = c, c2 = c, c4 = c;
    c1.dt = 0.002;
    c2.dt = 0.001;
    c4.dt = 0.0005;
    const auto a = lorenz96_integrate(c1, s0, horizon), b = lorenz96_integrate(c2, s0, horizon),
               r = lorenz96_integrate(c4, s0, horizon);
    const double e1 = (a - r).cwiseAbs().maxCoeff(), e2 = (b - r).cwiseAbs().maxCoeff();
    EXPECT_LT(e2 / r.cwiseAbs().maxCoeff(), 1e-4);
    // Richardson: error(dt) / error(dt/2) -> 16 for RK4 once referenced to dt/4
    EXPECT_GT(e1 / e2, 16.0 * 0.7 * 15.0 / 16.0);
}

TEST(Lorenz96, SmallPerturbationsGrow) {
    Lorenz96Config c;
    const auto s0 = lorenz96_integrate(c, lorenz96_initial_state(c, 5), 2.0);
    Eigen::VectorXd s1 = s0;
    s1(0) += 1e-8;
    const auto a = lorenz96_integrate(c, s0, 2.0), b = lorenz96_integrate(c, s1, 2.0);
    EXPECT_GE((a - b).norm(), 10.0 * 1e-8);
}

TEST(Lorenz96, InvalidConfigAndBlowUp) {
    auto c = small96();
    c.k = 3;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small96();
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    // a uniform state grows linearly under huge forcing, so blow up needs spread
    c = small96();
    c.x0 = 1e160;
    c.perturbation = 1e159;
    c.burn_in = 0.0;
    c.duration = 1.0;
    EXPECT_THROW(lorenz96_multiscale(c, 1), NumericalError);
}

TEST(Lorenz63, FixedPointHasZeroDerivative) {
    Lorenz63Config c;
    const double r = std::sqrt(c.beta * (c.rho - 1.0));
    const auto d = lorenz63_derivative(c, {r, r, c.rho - 1.0});
    EXPECT_LT(std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), 1e-9);
}

namespace {

double l63_halving_error(double dt) {
    Lorenz63Config a, b;
    a.dt = dt;
    b.dt = dt / 2.0;
    const auto x = lorenz63_integrate(a, a.x0, 1.0), y = lorenz63_integrate(b, b.x0, 1.0);
    double err = 0, scale = 0;
    for (int k = 0; k < 3; ++k) {
        err = std::max(err, std::abs(x[k] - y[k]));
        scale = std::max(scale, std::abs(y[k]));
    }
    return err / scale;
}

} // namespace

TEST(Lorenz63, StepHalvingConverges) {
    // the default 0.03 step is far from converged over one time unit; 0.01 is
    EXPECT_LT(l63_halving_error(0.01), 1e-5);
    const double ratio = l63_halving_error(0.002) / l63_halving_error(0.001);
    EXPECT_NEAR(ratio, 16.0, 0.3 * 16.0);
}

TEST(Lorenz63, BoundedOnAttractor) {
    Lorenz63Config c;
    const auto tr = lorenz63(c);
    EXPECT_EQ(tr.values.cols(), 3);
    EXPECT_LT(tr.values.rowwise().norm().maxCoeff(), 100.0);
    EXPECT_EQ(tr.values.row(0), Eigen::RowVector3d(1, 1, 1));
}

TEST(Uniform, MomentsAndDeterminism) {
    EXPECT_TRUE(iid_uniform(0, 1).empty());
    const std::size_t n = 100000;
    const auto u = iid_uniform(n, 4);
    double m = 0, v = 0;
    for (double x : u) {
        EXPECT_GE(x, -1.0);
        EXPECT_LT(x, 1.0);
        m += x;
    }
    m /= n;
    for (double x : u) v += (x - m) * (x - m);
    v /= (n - 1);
    EXPECT_NEAR(m, 0.0, 3.0 * std::sqrt(1.0 / 3.0 / n));
    // Var of x^2 for U[-1, 1] is 4/45
    EXPECT_NEAR(v, 1.0 / 3.0, 3.0 * std::sqrt(4.0 / 45.0 / n));
    EXPECT_EQ(u, iid_uniform(n, 4));
}

TEST(SpikeClasses, NoNoiseReproducesTemplates) {
    SpikeClassConfig c;
    c.jitter = 0.0;
    c.deletion = 0.0;
    const auto d = synthetic_spike_classes(c, 3);
    for (std::size_t i = 0; i < d.train.size(); ++i) EXPECT_EQ(d.train[i], d.templates[static_cast<std::size_t>(d.train_labels[i])]);
    for (std::size_t i = 0; i < d.test.size(); ++i) EXPECT_EQ(d.test[i], d.templates[static_cast<std::size_t>(d.test_labels[i])]);
}

TEST(SpikeClasses, StratifiedSplit) {
    SpikeClassConfig c;
    const auto d = synthetic_spike_classes(c, 5);
    EXPECT_EQ(d.train.size() + d.test.size(), 200u);
    std::vector<int> per(5, 0);
    for (int l : d.test_labels) per[static_cast<std::size_t>(l)]++;
    for (int p : per) EXPECT_EQ(p, 12);
    EXPECT_EQ(synthetic_spike_classes(c, 5).train, d.train);
}

TEST(SpikeClasses, DeletionThinsSpikes) {
    SpikeClassConfig c;
    c.jitter = 0.0;
    c.deletion = 0.5;
    const auto d = synthetic_spike_classes(c, 1);
    std::size_t kept = 0, orig = 0;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        kept += d.train[i].total_spikes();
        orig += d.templates[static_cast<std::size_t>(d.train_labels[i])].total_spikes();
    }
    EXPECT_NEAR(static_cast<double>(kept) / static_cast<double>(orig), 0.5, 0.05);
}

TEST(Trajectory, CsvLayout) {
    Trajectory t;
    t.times = {0.0, 0.5};
    t.values = Eigen::MatrixXd(2, 2);
    t.values << 1, 2, 3, 4;
    t.labels = {"a", "b"};
    std::ostringstream os;
    write_trajectory_csv(os, t);
    EXPECT_EQ(os.str(), "time,a,b\n0,1,2\n0.5,3,4\n");
}
