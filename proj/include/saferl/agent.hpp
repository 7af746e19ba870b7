#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "saferl/adam.hpp"
#include "saferl/filter.hpp"
#include "saferl/mlp.hpp"
#include "saferl/replay.hpp"
#include "saferl/reward.hpp"

namespace saferl {

// Stream tags for derive_seed; every consumer of randomness gets its own.
inline constexpr std::uint64_t kStreamQInit = 1;
inline constexpr std::uint64_t kStreamExplore = 2;
inline constexpr std::uint64_t kStreamSample = 3;
inline constexpr std::uint64_t kStreamWorld = 4;
inline constexpr std::uint64_t kStreamPartialEval = 5;
inline constexpr std::uint64_t kStreamCollect = 6;
inline constexpr std::uint64_t kStreamRnnInit = 7;
inline constexpr std::uint64_t kStreamRnnShuffle = 8;
inline constexpr std::uint64_t kStreamEval = 9;

inline Eigen::VectorXd to_vector(const AffordanceVector& a) {
    return Eigen::Map<const Eigen::VectorXd>(a.data(), kAffordanceDim);
}

// Argmax over Q-values, ties broken by lowest action id.
inline Action argmax_action(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q(i) > q(best)) best = i;
    return Action(best);
}

// Epsilon-greedy selection over the 8 Q-values.
inline Action select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
    if (uniform_real(rng, 0.0, 1.0) < epsilon)
        return Action(uniform_int(rng, 0, Action::kCount - 1));
    return argmax_action(q);
}

// Linear decay from eps_start to eps_final over the first eps_decay_fraction
// of the episode budget, constant afterwards.
inline double epsilon_at(long episode, const SimConfig& cfg) {
    if (episode < 0) throw std::invalid_argument("episode index must be >= 0");
    double horizon = cfg.eps_decay_fraction * static_cast<double>(cfg.episodes);
    double frac = horizon > 0 ? std::min(1.0, static_cast<double>(episode) / horizon) : 1.0;
    return cfg.eps_start - (cfg.eps_start - cfg.eps_final) * frac;
}

// Two-case temporal-difference target. Terminal (collision-buffer) records
// never bootstrap; safe records use the double-Q rule: the online network
// picks the action, the target network values it.
inline double td_target(const Transition& t, const MlpParams& q_online, const MlpParams& q_target,
                        double gamma) {
    if (t.terminal) return t.reward;
    if (!t.s_next) throw std::logic_error("td_target: safe-buffer transition without s_next");
    Eigen::VectorXd s_next = to_vector(*t.s_next);
    Action best = argmax_action(mlp_forward(q_online, s_next));
    return t.reward + gamma * mlp_forward(q_target, s_next)(best.id());
}

// Draws n/2 from each buffer with replacement (safe half first). An empty
// collision buffer falls back to n safe draws; *all_safe reports that.
inline std::vector<Transition> sample_minibatch(const ReplayBuffer& safe,
                                                const ReplayBuffer& collision, int n, Rng& rng,
                                                bool* all_safe = nullptr) {
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("minibatch size must be positive and even");
    if (safe.size() == 0 && collision.size() == 0)
        throw std::logic_error("sample_minibatch: both buffers empty");
    if (safe.size() == 0) throw std::logic_error("sample_minibatch: safe buffer empty");
    std::vector<Transition> batch;
    batch.reserve(static_cast<std::size_t>(n));
    bool fallback = collision.size() == 0;
    if (all_safe) *all_safe = fallback;
    int from_safe = fallback ? n : n / 2;
    for (int i = 0; i < from_safe; ++i) batch.push_back(safe.sample(rng));
    for (int i = from_safe; i < n; ++i) batch.push_back(collision.sample(rng));
    return batch;
}

// One gradient step on the mean squared TD error of the batch (target
// network held fixed), applied with Adam.
inline void train_step(const std::vector<Transition>& batch, MlpParams& q_online,
                       const MlpParams& q_target, MlpAdam& adam, double gamma) {
    if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
    const int n = static_cast<int>(batch.size());
    const int in = q_online.input_dim();
    const int out = q_online.output_dim();

    Eigen::MatrixXd states(in, n);
    for (int i = 0; i < n; ++i) states.col(i) = to_vector(batch[static_cast<std::size_t>(i)].s);

    // batched bootstrap for the non-terminal samples
    std::vector<int> boot_cols;
    for (int i = 0; i < n; ++i)
        if (!batch[static_cast<std::size_t>(i)].terminal) boot_cols.push_back(i);
    Eigen::VectorXd targets(n);
    if (!boot_cols.empty()) {
        Eigen::MatrixXd next(in, static_cast<Eigen::Index>(boot_cols.size()));
        for (std::size_t j = 0; j < boot_cols.size(); ++j) {
            const auto& t = batch[static_cast<std::size_t>(boot_cols[j])];
            if (!t.s_next) throw std::logic_error("train_step: safe transition without s_next");
            next.col(static_cast<Eigen::Index>(j)) = to_vector(*t.s_next);
        }
        Eigen::MatrixXd q_next_online = mlp_forward_batch(q_online, next);
        Eigen::MatrixXd q_next_target = mlp_forward_batch(q_target, next);
        for (std::size_t j = 0; j < boot_cols.size(); ++j) {
            Eigen::Index col = static_cast<Eigen::Index>(j);
            int best = 0;
            for (int k = 1; k < out; ++k)
                if (q_next_online(k, col) > q_next_online(best, col)) best = k;
            targets(boot_cols[j]) =
                batch[static_cast<std::size_t>(boot_cols[j])].reward + gamma * q_next_target(best, col);
        }
    }
    for (int i = 0; i < n; ++i)
        if (batch[static_cast<std::size_t>(i)].terminal)
            targets(i) = batch[static_cast<std::size_t>(i)].reward;

    MlpCache cache;
    Eigen::MatrixXd q = mlp_forward_batch(q_online, states, &cache);
    Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(out, n);
    for (int i = 0; i < n; ++i) {
        int a = batch[static_cast<std::size_t>(i)].action;
        d_out(a, i) = 2.0 * (q(a, i) - targets(i)) / static_cast<double>(n);
    }
    MlpGrad grad = mlp_backward_batch(q_online, cache, d_out);
    adam_step(q_online, grad, adam);
}

// Hard copy of the online parameters.
inline MlpParams sync_target(const MlpParams& q_online) { return q_online; }

}  // namespace saferl
