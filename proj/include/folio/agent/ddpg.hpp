#pragma once

#include <iosfwd>

#include "folio/agent/replay.hpp"
#include "folio/env/env.hpp"
#include "folio/ndcore/optim.hpp"
#include "folio/policy/nets.hpp"

namespace folio::agent {

struct DdpgConfig {
    std::size_t episodes = 50;
    double actor_lr = 1e-3;
    double critic_lr = 1e-1;
    double tau = 0.01;
    std::size_t buffer_capacity = 10000;
    std::size_t batch_size = 64;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    double ou_dt = 1.0;
    bool use_adam = true;
};

// One critic regression step toward fixed targets on an explicit batch;
// returns the mean squared error before the step.
double critic_step(policy::Critic& critic, const std::vector<nd::Tensor>& states,
                   const std::vector<std::vector<double>>& actions,
                   const std::vector<double>& targets, nd::OptState& opt);

struct DdpgResult {
    std::vector<double> apv;            // terminal portfolio value per episode
    std::vector<double> episode_return; // sum of rewards per episode
    std::vector<double> critic_loss;    // mean minibatch loss per episode
};

// Off-policy actor-critic training: explores with OU noise added to the
// pre-softmax scores, stores transitions in a replay buffer, regresses the
// critic toward bootstrapped targets from lagged copies of both networks,
// ascends the critic value through the actor, and soft-updates the lagged
// copies each step. Updates are skipped while the buffer holds fewer than
// batch_size transitions.
DdpgResult ddpg_train(policy::Actor& actor, policy::Critic& critic,
                      const market::Panel& panel, std::size_t begin, std::size_t end,
                      const env::EnvConfig& cfg, const DdpgConfig& dc, Rng& rng,
                      std::ostream* log = nullptr);

} // namespace folio::agent
