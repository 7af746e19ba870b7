#pragma once

#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "saferl/agent.hpp"
#include "saferl/rnn.hpp"

namespace saferl {

// One recorded step of driving data: raw (denormalized) affordance state and
// the executed action.
struct DrivingStep {
    AffordanceVector state{};
    int action = 0;
};

struct DrivingEpisode {
    std::vector<DrivingStep> steps;
};

struct DrivingDataset {
    std::vector<DrivingEpisode> episodes;

    std::size_t total_steps() const {
        std::size_t n = 0;
        for (const auto& e : episodes) n += e.steps.size();
        return n;
    }
};

// Evaluates the gap rule on every present neighbor slot of a raw affordance
// state. Slots whose |dx| is within sentinel_frac of d_max count as absent.
// Returns the smallest TTC among present slots via *min_ttc when violating.
inline bool affordance_violates_gap_rule(const AffordanceVector& raw, const SimConfig& cfg,
                                         double sentinel_frac, double* min_ttc = nullptr) {
    const SafetyParams p = ego_safety(cfg);
    bool violated = false;
    double ttc_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kSlotCount; ++s) {
        double dx = raw[static_cast<std::size_t>(3 * s) + 0];
        double dv = raw[static_cast<std::size_t>(3 * s) + 1];
        if (std::abs(dx) >= cfg.d_max * (1.0 - sentinel_frac)) continue;  // absent
        double closing = slot_is_front(s) ? -dv : dv;
        if (!gap_rule(std::abs(dx), closing, p)) violated = true;
        ttc_min = std::min(ttc_min, time_to_collision(std::abs(dx), closing));
    }
    // collision proxy: a predicted/observed lead closer than one car length
    double cf_dx = raw[static_cast<std::size_t>(3 * slot_index(Slot::CenterFront))];
    if (std::abs(cf_dx) < cfg.d_max * (1.0 - sentinel_frac) && std::abs(cf_dx) < cfg.car_length) {
        violated = true;
        ttc_min = 0.0;
    }
    if (min_ttc) *min_ttc = ttc_min;
    return violated;
}

// Per-step safety labels: label[t] says whether the *next* true state
// violates the gap rule. One label per step except the last of each episode.
inline std::vector<std::vector<bool>> dataset_safety_labels(const DrivingDataset& d,
                                                            const SimConfig& cfg) {
    std::vector<std::vector<bool>> labels;
    labels.reserve(d.episodes.size());
    for (const auto& ep : d.episodes) {
        std::vector<bool> ep_labels;
        if (!ep.steps.empty()) ep_labels.reserve(ep.steps.size() - 1);
        for (std::size_t t = 0; t + 1 < ep.steps.size(); ++t)
            ep_labels.push_back(affordance_violates_gap_rule(ep.steps[t + 1].state, cfg, 0.0));
        labels.push_back(std::move(ep_labels));
    }
    return labels;
}

inline Eigen::VectorXd rnn_input(const AffordanceVector& state_norm, int action) {
    Eigen::VectorXd u(kAffordanceDim + Action::kCount);
    u.setZero();
    for (int i = 0; i < kAffordanceDim; ++i) u(i) = state_norm[static_cast<std::size_t>(i)];
    u(kAffordanceDim + action) = 1.0;
    return u;
}

// One supervised pair: h (state, one-hot action) inputs, k stacked
// normalized future states as the target.
struct TrainingWindow {
    std::vector<Eigen::VectorXd> inputs;
    Eigen::VectorXd target;
};

// Sliding windows; windows that would need data past an episode's end are
// dropped, so no window crosses an episode boundary.
inline std::vector<TrainingWindow> make_windows(const DrivingDataset& d, int h, int k,
                                                const SimConfig& cfg) {
    if (h < 1 || k < 1) throw std::invalid_argument("make_windows: h and k must be >= 1");
    std::vector<TrainingWindow> out;
    for (const auto& ep : d.episodes) {
        const long len = static_cast<long>(ep.steps.size());
        for (long t = 0; t + h + k <= len; ++t) {
            TrainingWindow w;
            w.inputs.reserve(static_cast<std::size_t>(h));
            for (long j = t; j < t + h; ++j) {
                const auto& step = ep.steps[static_cast<std::size_t>(j)];
                w.inputs.push_back(rnn_input(normalize(step.state, cfg), step.action));
            }
            w.target.resize(static_cast<Eigen::Index>(k) * kAffordanceDim);
            for (long j = 0; j < k; ++j) {
                AffordanceVector n = normalize(ep.steps[static_cast<std::size_t>(t + h + j)].state, cfg);
                for (int i = 0; i < kAffordanceDim; ++i)
                    w.target(j * kAffordanceDim + i) = n[static_cast<std::size_t>(i)];
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

// Runs the frozen greedy policy (handcrafted filter active) and records
// every (state, executed action) pair.
inline DrivingDataset collect_dataset(const MlpParams& policy, int n_episodes, std::uint64_t seed,
                                      const SimConfig& cfg) {
    DrivingDataset data;
    data.episodes.reserve(static_cast<std::size_t>(n_episodes));
    for (int ep = 0; ep < n_episodes; ++ep) {
        WorldState w = spawn_episode(cfg, derive_seed(seed, kStreamCollect, static_cast<std::uint64_t>(ep)));
        DrivingEpisode episode;
        while (!w.done) {
            AffordanceVector raw = extract_affordance(w, cfg);
            Action proposed = argmax_action(mlp_forward(policy, to_vector(normalize(raw, cfg))));
            Action executed = filter_action(w, proposed, cfg).executed;
            episode.steps.push_back(DrivingStep{raw, executed.id()});
            step_world(w, executed, cfg);
        }
        data.episodes.push_back(std::move(episode));
    }
    return data;
}

struct PredictorReport {
    RnnParams params;
    std::array<double, kAffordanceDim> per_feature_rmse{};  // one-step, normalized units
    double max_feature_rmse = 0.0;
    double overall_rmse = 0.0;  // across all horizon steps and features
    std::vector<double> epoch_train_loss;
    std::size_t train_windows = 0;
    std::size_t val_windows = 0;
};

// Minibatch MSE training with a seeded 90/10 train/validation split.
inline PredictorReport train_predictor(const std::vector<TrainingWindow>& windows, int epochs,
                                       std::uint64_t seed, const SimConfig& cfg) {
    if (windows.size() < 100)
        throw std::invalid_argument("train_predictor: need at least 100 windows");
    const int h = static_cast<int>(windows.front().inputs.size());
    const int out_dim = static_cast<int>(windows.front().target.size());
    const int k = out_dim / kAffordanceDim;

    std::vector<std::size_t> order(windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng = make_rng(derive_seed(seed, kStreamRnnShuffle));
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<std::size_t>(
                                uniform_int(shuffle_rng, 0, static_cast<int>(i)))]);

    std::size_t n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(cfg.rnn_val_fraction * static_cast<double>(windows.size()))));
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<long>(n_val));
    std::vector<std::size_t> train(order.begin() + static_cast<long>(n_val), order.end());

    RnnParams rnn = init_rnn(static_cast<int>(cfg.rnn_hidden), kAffordanceDim + Action::kCount, h, k,
                             kAffordanceDim, derive_seed(seed, kStreamRnnInit));
    RnnAdam adam = make_adam(rnn, AdamConfig{cfg.rnn_learning_rate, 0.9, 0.999, 1e-8});

    PredictorReport report;
    report.train_windows = train.size();
    report.val_windows = val.size();

    const int batch = static_cast<int>(std::min<long>(cfg.rnn_batch, static_cast<long>(train.size())));
    std::vector<Eigen::MatrixXd> inputs(static_cast<std::size_t>(h));
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = train.size() - 1; i > 0; --i)
            std::swap(train[i], train[static_cast<std::size_t>(
                                    uniform_int(shuffle_rng, 0, static_cast<int>(i)))]);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t start = 0; start + static_cast<std::size_t>(batch) <= train.size();
             start += static_cast<std::size_t>(batch)) {
            for (int t = 0; t < h; ++t) inputs[static_cast<std::size_t>(t)].resize(kAffordanceDim + Action::kCount, batch);
            Eigen::MatrixXd targets(out_dim, batch);
            for (int c = 0; c < batch; ++c) {
                const TrainingWindow& w = windows[train[start + static_cast<std::size_t>(c)]];
                for (int t = 0; t < h; ++t) inputs[static_cast<std::size_t>(t)].col(c) = w.inputs[static_cast<std::size_t>(t)];
                targets.col(c) = w.target;
            }
            RnnCache cache;
            Eigen::MatrixXd pred = rnn_forward_batch(rnn, inputs, &cache);
            loss_sum += (pred - targets).squaredNorm() /
                        (static_cast<double>(pred.rows()) * static_cast<double>(pred.cols()));
            loss_count += 1;
            RnnGrad g = rnn_gradient_batch(rnn, inputs, targets);
            adam_step(rnn, g, adam);
        }
        report.epoch_train_loss.push_back(loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0);
    }

    // held-out report: per-feature one-step RMSE + overall RMSE
    Eigen::VectorXd sq_step1 = Eigen::VectorXd::Zero(kAffordanceDim);
    double sq_all = 0.0;
    for (std::size_t vi : val) {
        const TrainingWindow& w = windows[vi];
        Eigen::VectorXd pred = rnn_forward(rnn, w.inputs);
        Eigen::VectorXd err = pred - w.target;
        sq_all += err.squaredNorm();
        sq_step1 += err.head(kAffordanceDim).cwiseProduct(err.head(kAffordanceDim));
    }
    for (int i = 0; i < kAffordanceDim; ++i) {
        report.per_feature_rmse[static_cast<std::size_t>(i)] =
            std::sqrt(sq_step1(i) / static_cast<double>(val.size()));
        report.max_feature_rmse =
            std::max(report.max_feature_rmse, report.per_feature_rmse[static_cast<std::size_t>(i)]);
    }
    report.overall_rmse = std::sqrt(sq_all / (static_cast<double>(val.size()) * out_dim));
    report.params = std::move(rnn);
    return report;
}

struct HistoryEntry {
    AffordanceVector state_norm{};  // network scale
    int action = 0;
};

using HistoryBuffer = std::deque<HistoryEntry>;

struct HorizonPrediction {
    std::vector<AffordanceVector> states;  // denormalized, indices 0..k-1 = t+1..t+k
    bool violation = false;
    std::optional<int> first_violation_step;  // 0-based offset into `states`
    double first_violation_ttc = std::numeric_limits<double>::infinity();
};

// Predicts k future states from the last h (state, action) pairs and flags
// gap-rule violations (plus the collision proxy) on each predicted state.
inline HorizonPrediction predict_horizon(const RnnParams& rnn, const HistoryBuffer& history,
                                         const SimConfig& cfg) {
    if (static_cast<int>(history.size()) != rnn.history)
        throw std::invalid_argument("predict_horizon: history length mismatch");
    std::vector<Eigen::VectorXd> inputs;
    inputs.reserve(history.size());
    for (const auto& e : history) inputs.push_back(rnn_input(e.state_norm, e.action));
    Eigen::VectorXd out = rnn_forward(rnn, inputs);

    HorizonPrediction hp;
    hp.states.reserve(static_cast<std::size_t>(rnn.horizon));
    for (int j = 0; j < rnn.horizon; ++j) {
        AffordanceVector norm{};
        for (int i = 0; i < kAffordanceDim; ++i)
            norm[static_cast<std::size_t>(i)] = out(j * kAffordanceDim + i);
        hp.states.push_back(denormalize(norm, cfg));
    }
    for (int j = 0; j < rnn.horizon; ++j) {
        double ttc = std::numeric_limits<double>::infinity();
        if (affordance_violates_gap_rule(hp.states[static_cast<std::size_t>(j)], cfg,
                                         cfg.sentinel_tol, &ttc)) {
            hp.violation = true;
            hp.first_violation_step = j;
            hp.first_violation_ttc = ttc;
            break;
        }
    }
    return hp;
}

// The training-time dynamic check: on a predicted violation returns the
// penalty record (s_t, a_t, s_hat_{t+1}, -R_dynamic), terminal for the
// collision buffer. Returns nothing during warm-up or when no violation is
// predicted.
inline std::optional<Transition> dynamic_check(const HistoryBuffer& history, const RnnParams& rnn,
                                               const SimConfig& cfg) {
    if (static_cast<int>(history.size()) < rnn.history) return std::nullopt;  // warm-up
    HistoryBuffer window(history.end() - rnn.history, history.end());
    HorizonPrediction hp = predict_horizon(rnn, window, cfg);
    if (!hp.violation) return std::nullopt;
    Transition t;
    t.s = history.back().state_norm;
    t.action = history.back().action;
    t.s_next = hp.states.front();
    t.reward = -cfg.r_dynamic;
    t.terminal = true;
    return t;
}

}  // namespace saferl
