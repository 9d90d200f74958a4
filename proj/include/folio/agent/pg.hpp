#pragma once

#include <iosfwd>

#include "folio/env/env.hpp"
#include "folio/policy/nets.hpp"

namespace folio::agent {

struct PgConfig {
    std::size_t epochs = 1000;
    double learning_rate = 1e-3;
    bool use_adam = true;
};

struct PgEpoch {
    double objective = 0.0; // mean over steps of (log reward - beta * risk)
    double log_apv = 0.0;   // sum of log rewards over the rollout
};

// Rolls the deterministic policy once over decision indices [begin, end) and
// accumulates the gradient of the mean per-step objective into `grads`,
// treating each step's realized previous-weight vector as data (the update
// does not differentiate through weight evolution). Gradients are seeded
// analytically at the weights output:
//   d obj_t / d w_i = (y_i - mu * sign(w_i - w_prev_i) * [i >= 1]) / z
// minus beta times the per-asset variance coefficients when the risk
// penalty is active.
PgEpoch pg_rollout_gradient(policy::Actor& actor, const market::Panel& panel,
                            std::size_t begin, std::size_t end, const env::EnvConfig& cfg,
                            nd::GradMap& grads);

struct PgResult {
    std::vector<double> apv;       // terminal portfolio value per epoch
    std::vector<double> objective; // mean risk-adjusted log reward per epoch
};

// Batch policy-gradient training: one full rollout per epoch, then one
// ascent step on the mean objective. When cfg.noise_sigma > 0 each epoch
// rolls on a freshly noise-perturbed copy of the panel.
PgResult pg_train(policy::Actor& actor, const market::Panel& panel, std::size_t begin,
                  std::size_t end, const env::EnvConfig& cfg, const PgConfig& pc, Rng& rng,
                  std::ostream* log = nullptr);

} // namespace folio::agent
