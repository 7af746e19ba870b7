#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "saferl/mlp.hpp"

namespace saferl {

// Single-layer simple recurrent cell with leaky-ReLU hidden activation and a
// linear readout of the final hidden state:
//   h_t = lrelu(wx * u_t + wh * h_{t-1} + bh),  h_0 = 0
//   out = wo * h_T + bo
// Inputs u_t are (state, one-hot action) pairs; the readout emits `horizon`
// future states stacked into one vector. Doubles as its own gradient
// container.
struct RnnParams {
    Eigen::MatrixXd wx;  // hidden x in
    Eigen::MatrixXd wh;  // hidden x hidden
    Eigen::VectorXd bh;  // hidden
    Eigen::MatrixXd wo;  // out x hidden
    Eigen::VectorXd bo;  // out
    int history = 0;     // required input sequence length
    int horizon = 0;     // predicted steps
    int state_dim = 0;   // per-step predicted state width; out = horizon * state_dim

    int hidden_dim() const { return static_cast<int>(wx.rows()); }
    int in_dim() const { return static_cast<int>(wx.cols()); }
    int out_dim() const { return static_cast<int>(wo.rows()); }
};

using RnnGrad = RnnParams;

inline RnnParams zeros_like(const RnnParams& p) {
    RnnParams g;
    g.wx = Eigen::MatrixXd::Zero(p.wx.rows(), p.wx.cols());
    g.wh = Eigen::MatrixXd::Zero(p.wh.rows(), p.wh.cols());
    g.bh = Eigen::VectorXd::Zero(p.bh.rows());
    g.wo = Eigen::MatrixXd::Zero(p.wo.rows(), p.wo.cols());
    g.bo = Eigen::VectorXd::Zero(p.bo.rows());
    g.history = p.history;
    g.horizon = p.horizon;
    g.state_dim = p.state_dim;
    return g;
}

inline RnnParams init_rnn(int hidden, int in_dim, int history, int horizon, int state_dim,
                          std::uint64_t seed) {
    if (hidden <= 0 || in_dim <= 0 || history <= 0 || horizon <= 0 || state_dim <= 0)
        throw std::invalid_argument("init_rnn: non-positive dimension");
    RnnParams p;
    p.history = history;
    p.horizon = horizon;
    p.state_dim = state_dim;
    int out = horizon * state_dim;
    Rng rng = make_rng(seed);
    auto fill = [&](Eigen::MatrixXd& m, int rows, int cols) {
        m.resize(rows, cols);
        double bound = std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = uniform_real(rng, -bound, bound);
    };
    fill(p.wx, hidden, in_dim);
    fill(p.wh, hidden, hidden);
    p.bh = Eigen::VectorXd::Zero(hidden);
    fill(p.wo, out, hidden);
    p.bo = Eigen::VectorXd::Zero(out);
    return p;
}

struct RnnCache {
    std::vector<Eigen::MatrixXd> z;  // pre-activations per step
    std::vector<Eigen::MatrixXd> h;  // h[0] = 0, h[t] post-activation
};

// Batched forward: inputs[t] is (in_dim x n). Returns (out_dim x n).
inline Eigen::MatrixXd rnn_forward_batch(const RnnParams& p,
                                         const std::vector<Eigen::MatrixXd>& inputs,
                                         RnnCache* cache = nullptr) {
    if (static_cast<int>(inputs.size()) != p.history)
        throw std::invalid_argument("rnn_forward: history length mismatch");
    for (const auto& u : inputs)
        if (u.rows() != p.in_dim()) throw std::invalid_argument("rnn_forward: input width mismatch");

    Eigen::Index n = inputs.front().cols();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.hidden_dim(), n);
    if (cache) {
        cache->z.clear();
        cache->h.clear();
        cache->h.push_back(h);
    }
    for (const auto& u : inputs) {
        Eigen::MatrixXd z = ((p.wx * u + p.wh * h).colwise() + p.bh);
        h = z.unaryExpr([](double v) { return leaky_relu(v); });
        if (cache) {
            cache->z.push_back(std::move(z));
            cache->h.push_back(h);
        }
    }
    return (p.wo * h).colwise() + p.bo;
}

inline Eigen::VectorXd rnn_forward(const RnnParams& p, const std::vector<Eigen::VectorXd>& inputs) {
    std::vector<Eigen::MatrixXd> cols;
    cols.reserve(inputs.size());
    for (const auto& u : inputs) cols.push_back(u);
    return rnn_forward_batch(p, cols);
}

// BPTT for the mean-squared-error loss over all output components (and over
// the batch, for the batched variant). targets is (out_dim x n).
inline RnnGrad rnn_gradient_batch(const RnnParams& p, const std::vector<Eigen::MatrixXd>& inputs,
                                  const Eigen::MatrixXd& targets) {
    RnnCache cache;
    Eigen::MatrixXd pred = rnn_forward_batch(p, inputs, &cache);
    if (targets.rows() != pred.rows() || targets.cols() != pred.cols())
        throw std::invalid_argument("rnn_gradient: target shape mismatch");

    double scale = 2.0 / (static_cast<double>(pred.rows()) * static_cast<double>(pred.cols()));
    Eigen::MatrixXd d_out = scale * (pred - targets);

    RnnGrad g = zeros_like(p);
    const int T = p.history;
    g.wo = d_out * cache.h[static_cast<std::size_t>(T)].transpose();
    g.bo = d_out.rowwise().sum();

    Eigen::MatrixXd dh = p.wo.transpose() * d_out;
    for (int t = T; t >= 1; --t) {
        Eigen::MatrixXd dz = dh.cwiseProduct(cache.z[static_cast<std::size_t>(t - 1)].unaryExpr(
            [](double v) { return leaky_relu_grad(v); }));
        g.wx += dz * inputs[static_cast<std::size_t>(t - 1)].transpose();
        g.wh += dz * cache.h[static_cast<std::size_t>(t - 1)].transpose();
        g.bh += dz.rowwise().sum();
        dh = p.wh.transpose() * dz;
    }
    return g;
}

inline RnnGrad rnn_gradient(const RnnParams& p, const std::vector<Eigen::VectorXd>& inputs,
                            const Eigen::VectorXd& target) {
    std::vector<Eigen::MatrixXd> cols;
    cols.reserve(inputs.size());
    for (const auto& u : inputs) cols.push_back(u);
    return rnn_gradient_batch(p, cols, target);
}

}  // namespace saferl
