#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loadpat/matrix.hpp"

namespace loadpat {

struct SoftmaxOptions {
    double l2 = 1.0;
    std::size_t max_iter = 500;
    double grad_tol = 1e-5;
    std::size_t history = 10;      // L-BFGS memory
    bool balance_classes = false;  // inverse-frequency sample weights
};

// Parameters are packed as [W (classes x features, row-major), bias (classes)].
// Objective: weighted mean cross-entropy + l2 / (2 N) * ||W||^2; biases are not
// penalized.
class SoftmaxObjective {
public:
    SoftmaxObjective(const Matrix& features, std::span<const int> classes, std::size_t n_classes, double l2,
                     std::vector<double> sample_weights = {});

    std::size_t n_params() const { return (features_.cols() + 1) * n_classes_; }
    double value_and_gradient(std::span<const double> params, std::vector<double>& gradient) const;
    double value(std::span<const double> params) const;

private:
    const Matrix& features_;
    std::span<const int> classes_;
    std::size_t n_classes_;
    double l2_;
    std::vector<double> weights_;
    double weight_sum_;
};

struct SoftmaxModel {
    std::vector<int> labels;  // class index -> original label, ascending
    Matrix coefficients;      // classes x features
    std::vector<double> bias;
    std::vector<double> loss_trace;  // objective after every accepted step, starting at the initial point
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t n_classes() const { return labels.size(); }
    std::size_t n_features() const { return coefficients.cols(); }

    std::vector<double> probabilities(std::span<const double> x) const;
    int predict(std::span<const double> x) const;  // original label
    // exp of the coefficient after removing its mean over classes.
    double odds_ratio(std::size_t class_index, std::size_t feature) const;
};

// Multinomial logistic regression fitted by L-BFGS with Armijo backtracking
// from a zero start, so the objective never increases. Throws ConfigError with
// fewer than two classes.
SoftmaxModel fit_softmax(const Matrix& features, std::span<const int> labels, const SoftmaxOptions& options = {});

}  // namespace loadpat
