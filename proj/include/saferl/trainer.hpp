#pragma once

#include <optional>

#include "saferl/agent.hpp"
#include "saferl/lookahead.hpp"

namespace saferl {

struct EpisodeMetrics {
    long episode = 0;
    double cum_reward = 0.0;
    int steps = 0;
    bool collided = false;
    std::size_t safe_size = 0;
    std::size_t collision_size = 0;
    double epsilon = 0.0;
    bool spawn_reduced = false;
    int filter_violations = 0;   // handcrafted replacements this episode
    int dynamic_flags = 0;       // lookahead penalty records this episode
    int all_safe_batches = 0;    // minibatches drawn before the collision buffer had data
};

// Everything the training loop mutates. The Q-networks, Adam state and both
// buffers live here; the world is rebuilt per episode.
struct Trainer {
    MlpParams online;
    MlpParams target;
    MlpAdam adam;
    ReplayBuffer safe;
    ReplayBuffer collision;
    long grad_steps = 0;
    Rng explore_rng;
    Rng sample_rng;
    std::optional<RnnParams> rnn;  // required for the "both" variant
};

inline std::vector<int> q_network_dims(const SimConfig& cfg) {
    std::vector<int> dims{kAffordanceDim};
    for (long l = 0; l < cfg.q_hidden_layers; ++l) dims.push_back(static_cast<int>(cfg.q_hidden_size));
    dims.push_back(Action::kCount);
    return dims;
}

inline Trainer make_trainer(const SimConfig& cfg, std::uint64_t seed,
                            std::optional<RnnParams> rnn = std::nullopt) {
    MlpParams online = init_mlp(q_network_dims(cfg), derive_seed(seed, kStreamQInit));
    MlpParams target = sync_target(online);
    MlpAdam adam = make_adam(online, AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
    std::size_t cap = static_cast<std::size_t>(cfg.buffer_capacity);
    Trainer tr{std::move(online),
               std::move(target),
               std::move(adam),
               ReplayBuffer(cap, BufferTag::Safe),
               ReplayBuffer(cap, BufferTag::Collision),
               0,
               make_rng(derive_seed(seed, kStreamExplore)),
               make_rng(derive_seed(seed, kStreamSample)),
               std::move(rnn)};
    if (cfg.safety_variant() == SafetyVariant::Both && !tr.rnn)
        throw std::invalid_argument("variant 'both' requires a trained lookahead predictor");
    return tr;
}

// One training episode of the full loop: epsilon-greedy proposal, handcrafted
// filter, world step, buffer stores, optional lookahead check, one train step
// per environment step, periodic target sync.
inline EpisodeMetrics run_episode(Trainer& tr, const SimConfig& cfg, long episode_index,
                                  std::uint64_t seed) {
    const SafetyVariant variant = cfg.safety_variant();
    WorldState w = spawn_episode(cfg, derive_seed(seed, kStreamWorld, static_cast<std::uint64_t>(episode_index)));
    const double epsilon = epsilon_at(episode_index, cfg);

    EpisodeMetrics m;
    m.episode = episode_index;
    m.epsilon = epsilon;
    m.spawn_reduced = w.spawn_reduced;

    HistoryBuffer history;
    while (!w.done) {
        AffordanceVector s_norm = normalize(extract_affordance(w, cfg), cfg);
        Eigen::VectorXd q = mlp_forward(tr.online, to_vector(s_norm));
        Action proposed = select_action(q, epsilon, tr.explore_rng);

        Action executed = proposed;
        if (variant != SafetyVariant::None) {
            FilterOutcome fo = filter_action(w, proposed, cfg);
            if (fo.violated) {
                tr.collision.push(Transition{s_norm, proposed.id(), std::nullopt, -cfg.r_handcraft, true});
                m.filter_violations += 1;
            }
            executed = fo.executed;
        }

        StepEvents ev = step_world(w, executed, cfg);
        double r;
        if (ev.collided) {
            r = -cfg.r_handcraft;
            tr.collision.push(Transition{s_norm, executed.id(), std::nullopt, -cfg.r_handcraft, true});
        } else {
            r = total_reward(w, cfg).total;
            AffordanceVector s_next = normalize(extract_affordance(w, cfg), cfg);
            tr.safe.push(Transition{s_norm, executed.id(), s_next, r, false});
        }
        m.cum_reward += r;
        m.steps += 1;

        if (variant == SafetyVariant::Both && tr.rnn && !ev.collided) {
            history.push_back(HistoryEntry{s_norm, executed.id()});
            if (static_cast<int>(history.size()) > tr.rnn->history) history.pop_front();
            if (auto rec = dynamic_check(history, *tr.rnn, cfg)) {
                tr.collision.push(*rec);
                m.dynamic_flags += 1;
            }
        }

        if (tr.safe.size() > 0) {
            bool all_safe = false;
            auto batch = sample_minibatch(tr.safe, tr.collision, static_cast<int>(cfg.batch_size),
                                          tr.sample_rng, &all_safe);
            if (all_safe) m.all_safe_batches += 1;
            train_step(batch, tr.online, tr.target, tr.adam, cfg.gamma);
            tr.grad_steps += 1;
            if (tr.grad_steps % cfg.target_sync_every == 0) tr.target = sync_target(tr.online);
        }

        if (ev.episode_done) {
            m.collided = ev.collided;
            break;
        }
    }
    m.safe_size = tr.safe.size();
    m.collision_size = tr.collision.size();
    return m;
}

struct EvalEpisodeResult {
    double cum_reward = 0.0;
    int steps = 0;
    bool collided = false;
};

// Frozen-policy greedy rollout. The handcrafted filter is active unless
// use_filter is false (the deployment mode of the "none" variant). If a
// predictor is supplied and dynamic_shield is on, predicted violations also
// override the action with the fallback ladder (config extension).
inline EvalEpisodeResult run_eval_episode(const MlpParams& policy, const SimConfig& cfg,
                                          std::uint64_t world_seed, bool use_filter,
                                          const RnnParams* shield_rnn = nullptr) {
    WorldState w = spawn_episode(cfg, world_seed);
    EvalEpisodeResult res;
    HistoryBuffer history;
    while (!w.done) {
        AffordanceVector s_norm = normalize(extract_affordance(w, cfg), cfg);
        Action executed = argmax_action(mlp_forward(policy, to_vector(s_norm)));
        if (use_filter) executed = filter_action(w, executed, cfg).executed;
        if (shield_rnn && cfg.dynamic_shield) {
            HistoryBuffer probe = history;
            probe.push_back(HistoryEntry{s_norm, executed.id()});
            if (static_cast<int>(probe.size()) > shield_rnn->history) probe.pop_front();
            if (static_cast<int>(probe.size()) == shield_rnn->history) {
                HorizonPrediction hp = predict_horizon(*shield_rnn, probe, cfg);
                if (hp.violation)
                    executed = safe_fallback(hp.first_violation_ttc, ego_safety(cfg));
            }
        }
        StepEvents ev = step_world(w, executed, cfg);
        res.cum_reward += ev.collided ? -cfg.r_handcraft : total_reward(w, cfg).total;
        res.steps += 1;
        res.collided = ev.collided;
        if (shield_rnn) {
            history.push_back(HistoryEntry{s_norm, executed.id()});
            if (static_cast<int>(history.size()) > shield_rnn->history) history.pop_front();
        }
        if (ev.episode_done) break;
    }
    return res;
}

}  // namespace saferl
