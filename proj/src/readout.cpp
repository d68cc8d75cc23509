#include "hrsnn/readout.hpp"

#include "hrsnn/distribution.hpp"
#include "hrsnn/error.hpp"

#include <cmath>
#include <numeric>

namespace hrsnn {

namespace {

void check_pair(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets) {
    if (states.rows() != targets.rows())
        throw InvalidArgument("states and targets have different row counts");
    if (!states.allFinite() || !targets.allFinite()) throw DataError("readout inputs contain NaN or Inf");
}

} // namespace

void AdamConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("Adam lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("Adam betas must lie in [0, 1)");
    if (!(eps > 0.0)) throw ConfigError("Adam eps must be > 0");
}

Eigen::MatrixXd predict(const ReadoutModel& model, const Eigen::MatrixXd& states) {
    if (states.cols() != model.n_inputs())
        throw InvalidArgument("readout expects " + std::to_string(model.n_inputs()) + " inputs, got " +
                              std::to_string(states.cols()));
    Eigen::MatrixXd out = states * model.weights.transpose();
    out.rowwise() += model.bias.transpose();
    return out;
}

std::vector<int> classify(const ReadoutModel& model, const Eigen::MatrixXd& states) {
    const Eigen::MatrixXd y = predict(model, states);
    std::vector<int> labels(static_cast<std::size_t>(y.rows()), 0);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < y.cols(); ++c)
            if (y(r, c) > y(r, best)) best = c;
        labels[static_cast<std::size_t>(r)] = static_cast<int>(best);
    }
    return labels;
}

double mse_loss(const ReadoutModel& model, const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets) {
    return (predict(model, states) - targets).squaredNorm() / static_cast<double>(states.rows());
}

MseGradient mse_gradient(const ReadoutModel& model, const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets) {
    const Eigen::MatrixXd residual = predict(model, states) - targets; // n x out
    const double scale = 2.0 / static_cast<double>(states.rows());
    return {scale * residual.transpose() * states, scale * residual.colwise().sum().transpose()};
}

TrainResult train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, const AdamConfig& cfg,
                          std::uint64_t seed) {
    cfg.validate();
    check_pair(states, targets);
    if (states.rows() < 2) throw DataError("readout training needs at least 2 samples");

    const Eigen::Index n = states.rows();
    Rng rng(seed);
    ReadoutModel model;
    model.weights = Eigen::MatrixXd::Zero(targets.cols(), states.cols());
    model.bias = Eigen::VectorXd::Zero(targets.cols());
    for (Eigen::Index r = 0; r < model.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < model.weights.cols(); ++c) model.weights(r, c) = 0.01 * (2.0 * uniform01(rng) - 1.0);

    Eigen::MatrixXd m_w = Eigen::MatrixXd::Zero(model.weights.rows(), model.weights.cols());
    Eigen::MatrixXd v_w = m_w;
    Eigen::VectorXd m_b = Eigen::VectorXd::Zero(model.bias.size());
    Eigen::VectorXd v_b = m_b;

    const auto batch = static_cast<Eigen::Index>(cfg.batch_size == 0 ? n : std::min<Eigen::Index>(cfg.batch_size, n));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    TrainResult result;
    const double initial = mse_loss(model, states, targets);
    long step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (batch < n)
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index len = std::min(batch, n - start);
            MseGradient g;
            if (len == n) {
                g = mse_gradient(model, states, targets);
            } else {
                Eigen::MatrixXd xb(len, states.cols()), yb(len, targets.cols());
                for (Eigen::Index k = 0; k < len; ++k) {
                    xb.row(k) = states.row(order[static_cast<std::size_t>(start + k)]);
                    yb.row(k) = targets.row(order[static_cast<std::size_t>(start + k)]);
                }
                g = mse_gradient(model, xb, yb);
            }
            ++step;
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            m_w = cfg.beta1 * m_w + (1.0 - cfg.beta1) * g.d_weights;
            v_w = cfg.beta2 * v_w + (1.0 - cfg.beta2) * g.d_weights.cwiseAbs2();
            m_b = cfg.beta1 * m_b + (1.0 - cfg.beta1) * g.d_bias;
            v_b = cfg.beta2 * v_b + (1.0 - cfg.beta2) * g.d_bias.cwiseAbs2();
            model.weights.array() -= cfg.lr * (m_w.array() / c1) / ((v_w.array() / c2).sqrt() + cfg.eps);
            model.bias.array() -= cfg.lr * (m_b.array() / c1) / ((v_b.array() / c2).sqrt() + cfg.eps);
        }
        const double loss = mse_loss(model, states, targets);
        if (!std::isfinite(loss) || loss > 1e6 * std::max(initial, 1e-300))
            throw NumericalError("readout training diverged at epoch " + std::to_string(epoch) + " (loss " +
                                 std::to_string(loss) + ")");
        result.loss_history.push_back(loss);
    }
    result.model = std::move(model);
    return result;
}

ReadoutModel fit_ridge(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double lambda) {
    check_pair(states, targets);
    if (!(lambda >= 0.0)) throw InvalidArgument("ridge lambda must be >= 0");
    if (states.rows() < 2) throw DataError("ridge regression needs at least 2 samples");
    const Eigen::RowVectorXd x_mean = states.colwise().mean();
    const Eigen::RowVectorXd y_mean = targets.colwise().mean();
    const Eigen::MatrixXd xc = states.rowwise() - x_mean;
    const Eigen::MatrixXd yc = targets.rowwise() - y_mean;
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    // LDLT copes with the singular Gram matrices of silent neurons when lambda = 0
    const Eigen::MatrixXd coef = gram.ldlt().solve(xc.transpose() * yc); // in x out
    ReadoutModel m;
    m.weights = coef.transpose();
    m.bias = (y_mean - x_mean * coef).transpose();
    if (!m.weights.allFinite()) {
        m.weights.setZero();
        m.bias = y_mean.transpose();
    }
    return m;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int n_classes) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw InvalidArgument("label out of range");
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return y;
}

} // namespace hrsnn
