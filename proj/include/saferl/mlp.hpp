#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "saferl/rng.hpp"

namespace saferl {

inline constexpr double kLeakySlope = 0.01;

inline double leaky_relu(double x) { return x >= 0.0 ? x : kLeakySlope * x; }
inline double leaky_relu_grad(double x) { return x >= 0.0 ? 1.0 : kLeakySlope; }

// Fully-connected network: affine layers with leaky-ReLU hidden activations
// and a linear output layer. The same struct doubles as the gradient
// container (identical shapes).
struct MlpParams {
    std::vector<Eigen::MatrixXd> w;  // w[l] is (out_l x in_l)
    std::vector<Eigen::VectorXd> b;  // b[l] is (out_l)

    int input_dim() const { return static_cast<int>(w.front().cols()); }
    int output_dim() const { return static_cast<int>(w.back().rows()); }
    std::size_t layers() const { return w.size(); }
};

using MlpGrad = MlpParams;

inline MlpParams zeros_like(const MlpParams& p) {
    MlpParams g;
    g.w.reserve(p.w.size());
    g.b.reserve(p.b.size());
    for (const auto& w : p.w) g.w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : p.b) g.b.push_back(Eigen::VectorXd::Zero(b.rows()));
    return g;
}

inline MlpParams make_mlp(const std::vector<int>& dims) {
    if (dims.size() < 2) throw std::invalid_argument("mlp needs at least input and output dims");
    MlpParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        p.w.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
        p.b.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return p;
}

// Uniform fan-based init: weights ~ U(-sqrt(6/(fan_in+fan_out)), +), biases 0.
inline MlpParams init_mlp(const std::vector<int>& dims, std::uint64_t seed) {
    MlpParams p = make_mlp(dims);
    Rng rng = make_rng(seed);
    for (auto& w : p.w) {
        double bound = std::sqrt(6.0 / (static_cast<double>(w.cols()) + static_cast<double>(w.rows())));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform_real(rng, -bound, bound);
    }
    return p;
}

// Pre-activations and activations of one batched forward pass; a[0] is the
// input, a[l] the post-activation output of layer l-1.
struct MlpCache {
    std::vector<Eigen::MatrixXd> z;
    std::vector<Eigen::MatrixXd> a;
};

inline Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& input,
                                         MlpCache* cache = nullptr) {
    if (input.rows() != p.input_dim())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    if (cache) {
        cache->z.clear();
        cache->a.clear();
        cache->a.push_back(input);
    }
    Eigen::MatrixXd a = input;
    for (std::size_t l = 0; l < p.layers(); ++l) {
        Eigen::MatrixXd z = (p.w[l] * a).colwise() + p.b[l];
        if (l + 1 < p.layers())
            a = z.unaryExpr([](double v) { return leaky_relu(v); });
        else
            a = z;
        if (cache) {
            cache->z.push_back(std::move(z));
            cache->a.push_back(a);
        }
    }
    return a;
}

inline Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& input) {
    return mlp_forward_batch(p, input);
}

// Backpropagates dL/d(output) through a cached forward pass.
inline MlpGrad mlp_backward_batch(const MlpParams& p, const MlpCache& cache,
                                  const Eigen::MatrixXd& d_out) {
    MlpGrad g = zeros_like(p);
    Eigen::MatrixXd delta = d_out;  // output layer is linear
    for (std::size_t l = p.layers(); l-- > 0;) {
        g.w[l] = delta * cache.a[l].transpose();
        g.b[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = (p.w[l].transpose() * delta).cwiseProduct(
                cache.z[l - 1].unaryExpr([](double v) { return leaky_relu_grad(v); }));
        }
    }
    return g;
}

// Gradient of (target_value - Q(input)[target_index])^2 w.r.t. all parameters.
inline MlpGrad mlp_gradient(const MlpParams& p, const Eigen::VectorXd& input, int target_index,
                            double target_value) {
    if (target_index < 0 || target_index >= p.output_dim())
        throw std::invalid_argument("mlp_gradient: target index out of range");
    MlpCache cache;
    Eigen::VectorXd q = mlp_forward_batch(p, input, &cache);
    Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(p.output_dim(), 1);
    d_out(target_index, 0) = 2.0 * (q(target_index) - target_value);
    return mlp_backward_batch(p, cache, d_out);
}

}  // namespace saferl
