#pragma once

#include <Eigen/Dense>

#include "saferl/mlp.hpp"
#include "saferl/rnn.hpp"

namespace saferl {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

namespace detail {

// Standard bias-corrected Adam update for one parameter block.
template <class Mat>
inline void adam_update_block(Mat& theta, const Mat& g, Mat& m, Mat& v, double bc1, double bc2,
                              const AdamConfig& c) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = (c.beta2 * v.array() + (1.0 - c.beta2) * g.array().square()).matrix();
    theta.array() -= c.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
}

}  // namespace detail

struct MlpAdam {
    AdamConfig cfg;
    MlpGrad m, v;
    long steps = 0;
};

inline MlpAdam make_adam(const MlpParams& shape, AdamConfig cfg = {}) {
    return MlpAdam{cfg, zeros_like(shape), zeros_like(shape), 0};
}

inline void adam_step(MlpParams& p, const MlpGrad& g, MlpAdam& st) {
    st.steps += 1;
    double bc1 = 1.0 - std::pow(st.cfg.beta1, static_cast<double>(st.steps));
    double bc2 = 1.0 - std::pow(st.cfg.beta2, static_cast<double>(st.steps));
    for (std::size_t l = 0; l < p.w.size(); ++l) {
        detail::adam_update_block(p.w[l], g.w[l], st.m.w[l], st.v.w[l], bc1, bc2, st.cfg);
        detail::adam_update_block(p.b[l], g.b[l], st.m.b[l], st.v.b[l], bc1, bc2, st.cfg);
    }
}

struct RnnAdam {
    AdamConfig cfg;
    RnnGrad m, v;
    long steps = 0;
};

inline RnnAdam make_adam(const RnnParams& shape, AdamConfig cfg = {}) {
    return RnnAdam{cfg, zeros_like(shape), zeros_like(shape), 0};
}

inline void adam_step(RnnParams& p, const RnnGrad& g, RnnAdam& st) {
    st.steps += 1;
    double bc1 = 1.0 - std::pow(st.cfg.beta1, static_cast<double>(st.steps));
    double bc2 = 1.0 - std::pow(st.cfg.beta2, static_cast<double>(st.steps));
    detail::adam_update_block(p.wx, g.wx, st.m.wx, st.v.wx, bc1, bc2, st.cfg);
    detail::adam_update_block(p.wh, g.wh, st.m.wh, st.v.wh, bc1, bc2, st.cfg);
    detail::adam_update_block(p.bh, g.bh, st.m.bh, st.v.bh, bc1, bc2, st.cfg);
    detail::adam_update_block(p.wo, g.wo, st.m.wo, st.v.wo, bc1, bc2, st.cfg);
    detail::adam_update_block(p.bo, g.bo, st.m.bo, st.v.bo, bc1, bc2, st.cfg);
}

}  // namespace saferl
