#include "loadpat/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "loadpat/errors.hpp"

namespace loadpat {

namespace {

void softmax_inplace(std::span<double> z) {
    const double hi = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - hi);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

SoftmaxObjective::SoftmaxObjective(const Matrix& features, std::span<const int> classes, std::size_t n_classes,
                                   double l2, std::vector<double> sample_weights)
    : features_(features), classes_(classes), n_classes_(n_classes), l2_(l2), weights_(std::move(sample_weights)) {
    if (weights_.empty()) weights_.assign(features.rows(), 1.0);
    weight_sum_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double SoftmaxObjective::value_and_gradient(std::span<const double> params, std::vector<double>& gradient) const {
    const auto d = features_.cols();
    const auto k = n_classes_;
    const auto n = features_.rows();
    gradient.assign(n_params(), 0.0);
    const double* w = params.data();
    const double* b = params.data() + k * d;

    std::vector<double> z(k);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = features_.row(i);
        for (std::size_t c = 0; c < k; ++c) z[c] = b[c] + dot({w + c * d, d}, x);
        const double hi = *std::max_element(z.begin(), z.end());
        double lse = 0.0;
        for (double v : z) lse += std::exp(v - hi);
        lse = hi + std::log(lse);
        const auto y = static_cast<std::size_t>(classes_[i]);
        const double wi = weights_[i] / weight_sum_;
        loss += wi * (lse - z[y]);
        for (std::size_t c = 0; c < k; ++c) {
            const double r = wi * (std::exp(z[c] - lse) - (c == y ? 1.0 : 0.0));
            double* g = gradient.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
            gradient[k * d + c] += r;
        }
    }
    const double lambda = l2_ / static_cast<double>(n);
    double penalty = 0.0;
    for (std::size_t j = 0; j < k * d; ++j) {
        penalty += w[j] * w[j];
        gradient[j] += lambda * w[j];
    }
    return loss + 0.5 * lambda * penalty;
}

double SoftmaxObjective::value(std::span<const double> params) const {
    std::vector<double> g;
    return value_and_gradient(params, g);
}

std::vector<double> SoftmaxModel::probabilities(std::span<const double> x) const {
    std::vector<double> z(n_classes());
    for (std::size_t c = 0; c < z.size(); ++c) z[c] = bias[c] + dot(coefficients.row(c), x);
    softmax_inplace(z);
    return z;
}

int SoftmaxModel::predict(std::span<const double> x) const {
    const auto p = probabilities(x);
    return labels[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

double SoftmaxModel::odds_ratio(std::size_t class_index, std::size_t feature) const {
    double mean = 0.0;
    for (std::size_t c = 0; c < n_classes(); ++c) mean += coefficients(c, feature);
    mean /= static_cast<double>(n_classes());
    return std::exp(coefficients(class_index, feature) - mean);
}

SoftmaxModel fit_softmax(const Matrix& features, std::span<const int> labels, const SoftmaxOptions& options) {
    if (labels.size() != features.rows()) throw ConfigError("labels and features differ in length");
    std::map<int, std::size_t> class_of;
    for (int l : labels) class_of.emplace(l, 0);
    if (class_of.size() < 2) throw ConfigError("logistic regression needs at least two classes");

    SoftmaxModel model;
    for (auto& [label, idx] : class_of) {
        idx = model.labels.size();
        model.labels.push_back(label);
    }
    std::vector<int> classes;
    classes.reserve(labels.size());
    for (int l : labels) classes.push_back(static_cast<int>(class_of[l]));

    const auto k = model.labels.size();
    std::vector<double> sample_weights;
    if (options.balance_classes) {
        std::vector<double> freq(k, 0.0);
        for (int c : classes) freq[static_cast<std::size_t>(c)] += 1.0;
        for (int c : classes) sample_weights.push_back(static_cast<double>(classes.size()) / (static_cast<double>(k) * freq[static_cast<std::size_t>(c)]));
    }
    SoftmaxObjective objective(features, classes, k, options.l2, std::move(sample_weights));

    const auto np = objective.n_params();
    std::vector<double> x(np, 0.0), g, x_new(np), g_new;
    double f = objective.value_and_gradient(x, g);
    model.loss_trace.push_back(f);

    std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;  // (s, y)
    std::vector<double> dir(np);
    auto norm = [](const std::vector<double>& v) { return std::sqrt(dot(v, v)); };

    std::size_t it = 0;
    for (; it < options.max_iter; ++it) {
        if (norm(g) < options.grad_tol) {
            model.converged = true;
            break;
        }
        // Two-loop recursion for the L-BFGS direction.
        dir = g;
        std::vector<double> alpha(memory.size());
        for (std::size_t m = memory.size(); m-- > 0;) {
            const auto& [s, y] = memory[m];
            alpha[m] = dot(s, dir) / dot(y, s);
            for (std::size_t j = 0; j < np; ++j) dir[j] -= alpha[m] * y[j];
        }
        if (!memory.empty()) {
            const auto& [s, y] = memory.back();
            const double gamma = dot(s, y) / dot(y, y);
            for (double& v : dir) v *= gamma;
        }
        for (std::size_t m = 0; m < memory.size(); ++m) {
            const auto& [s, y] = memory[m];
            const double beta = dot(y, dir) / dot(y, s);
            for (std::size_t j = 0; j < np; ++j) dir[j] += s[j] * (alpha[m] - beta);
        }
        for (double& v : dir) v = -v;
        double slope = dot(g, dir);
        if (!(slope < 0.0)) {
            memory.clear();
            for (std::size_t j = 0; j < np; ++j) dir[j] = -g[j];
            slope = -dot(g, g);
        }

        double step = memory.empty() ? std::min(1.0, 1.0 / norm(g)) : 1.0;
        double f_new = f;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
            for (std::size_t j = 0; j < np; ++j) x_new[j] = x[j] + step * dir[j];
            f_new = objective.value_and_gradient(x_new, g_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        std::vector<double> s(np), y(np);
        for (std::size_t j = 0; j < np; ++j) {
            s[j] = x_new[j] - x[j];
            y[j] = g_new[j] - g[j];
        }
        if (dot(s, y) > 1e-12) {
            memory.emplace_back(std::move(s), std::move(y));
            if (memory.size() > options.history) memory.pop_front();
        }
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        model.loss_trace.push_back(f);
    }
    if (!model.converged && norm(g) < options.grad_tol) model.converged = true;
    model.iterations = it;
    model.gradient_norm = norm(g);

    const auto d = features.cols();
    model.coefficients = Matrix(k, d);
    model.bias.assign(x.begin() + static_cast<std::ptrdiff_t>(k * d), x.end());
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < d; ++j) model.coefficients(c, j) = x[c * d + j];
    }
    return model;
}

}  // namespace loadpat
