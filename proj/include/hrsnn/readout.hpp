#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hrsnn {

// Single fully connected layer: y = W x + b.
struct ReadoutModel {
    Eigen::MatrixXd weights; // outputs x inputs
    Eigen::VectorXd bias;    // outputs

    Eigen::Index n_inputs() const { return weights.cols(); }
    Eigen::Index n_outputs() const { return weights.rows(); }
};

struct AdamConfig {
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t epochs = 2000;
    std::size_t batch_size = 0; // 0 = full batch

    void validate() const;
};

struct TrainResult {
    ReadoutModel model;
    std::vector<double> loss_history; // full-data MSE after each epoch
};

// Rows of states and targets are samples. Minimizes (1/n) sum ||y - y_hat||^2
// with Adam. Throws DataError on NaN input and NumericalError when the loss
// exceeds 1e6 times its initial value.
TrainResult train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, const AdamConfig& cfg,
                          std::uint64_t seed);

// Closed-form ridge regression with an unpenalized intercept.
ReadoutModel fit_ridge(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double lambda);

// Rows of the result are predictions for rows of states.
Eigen::MatrixXd predict(const ReadoutModel& model, const Eigen::MatrixXd& states);

// Per-row argmax; ties go to the lowest index.
std::vector<int> classify(const ReadoutModel& model, const Eigen::MatrixXd& states);

double mse_loss(const ReadoutModel& model, const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets);

struct MseGradient {
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_bias;
};
MseGradient mse_gradient(const ReadoutModel& model, const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets);

// One-hot rows for integer labels in [0, n_classes).
Eigen::MatrixXd one_hot(const std::vector<int>& labels, int n_classes);

} // namespace hrsnn
