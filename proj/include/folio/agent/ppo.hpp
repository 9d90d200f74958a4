#pragma once

#include <iosfwd>

#include "folio/env/env.hpp"
#include "folio/policy/nets.hpp"

namespace folio::agent {

struct PpoConfig {
    std::size_t iterations = 200; // data-collection rounds
    std::size_t inner_epochs = 4; // gradient passes per round
    double clip = 0.2;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    bool use_adam = false; // plain gradient descent by default
};

// Discounted returns-to-go: G_t = r_t + gamma * G_{t+1}, G_T = 0.
std::vector<double> returns_to_go(const std::vector<double>& rewards, double gamma);

struct PpoResult {
    std::vector<double> apv;        // terminal portfolio value per iteration
    std::vector<double> surrogate;  // clipped surrogate at the last inner pass
    std::vector<double> mean_ratio; // mean probability ratio at the last pass
    std::vector<double> kl;         // mean(logp_old - logp_new) at the last pass
    std::vector<double> value_loss; // mean squared return-regression error
};

// Clipped-surrogate policy optimization with a diagonal Gaussian policy.
// Each iteration rolls the stochastic policy once over [begin, end), stores
// log-probabilities under the behavior policy, computes advantages
// A_t = G_t - V(s_t), then runs inner_epochs passes maximizing
//   mean_t min(ratio_t * A_t, clip(ratio_t, 1 -/+ clip) * A_t)
// and separately regressing the value head onto G by mean squared error.
// A non-finite probability ratio aborts with a diagnostic.
PpoResult ppo_train(policy::GaussianPolicy& policy, const market::Panel& panel,
                    std::size_t begin, std::size_t end, const env::EnvConfig& cfg,
                    const PpoConfig& pc, Rng& rng, std::ostream* log = nullptr);

} // namespace folio::agent
