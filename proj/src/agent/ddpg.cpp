#include "folio/agent/ddpg.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "folio/agent/ou_noise.hpp"
#include "folio/agent/target_net.hpp"
#include "folio/common.hpp"

namespace folio::agent {

double critic_step(policy::Critic& critic, const std::vector<nd::Tensor>& states,
                   const std::vector<std::vector<double>>& actions,
                   const std::vector<double>& targets, nd::OptState& opt) {
    const std::size_t n = states.size();
    require(n >= 1, "critic_step: empty batch");
    require(actions.size() == n && targets.size() == n,
            "critic_step: batch sizes disagree (", n, " states, ", actions.size(),
            " actions, ", targets.size(), " targets)");

    nd::Graph& net = critic.net();
    nd::GradMap grads;
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        net.set_input("state", states[i]);
        nd::Tensor a = nd::Tensor::zeros({actions[i].size(), 1});
        a.data = actions[i];
        net.set_input("action", a);
        net.run();
        double err = net.output("q").data[0] - targets[i];
        loss += err * err * inv_n;
        net.backward_into({{"q", nd::Tensor::scalar(2.0 * err * inv_n)}}, grads);
    }
    nd::opt_step(opt, net, grads, /*maximize=*/false);
    return loss;
}

DdpgResult ddpg_train(policy::Actor& actor, policy::Critic& critic,
                      const market::Panel& panel, std::size_t begin, std::size_t end,
                      const env::EnvConfig& cfg, const DdpgConfig& dc, Rng& rng,
                      std::ostream* log) {
    require(begin < end, "ddpg_train: empty decision span [", begin, ", ", end, ")");
    require(end < panel.num_days(), "ddpg_train: span end ", end,
            " needs relatives beyond the panel's ", panel.num_days(), " days");
    require(dc.batch_size >= 1, "ddpg_train: batch_size must be at least 1");

    const std::size_t m = panel.num_assets();
    nd::OptState opt_a = dc.use_adam ? nd::OptState::adam(dc.actor_lr)
                                     : nd::OptState::sgd(dc.actor_lr);
    nd::OptState opt_c = dc.use_adam ? nd::OptState::adam(dc.critic_lr)
                                     : nd::OptState::sgd(dc.critic_lr);
    TargetNet actor_target(actor.net(), dc.tau);
    TargetNet critic_target(critic.net(), dc.tau);
    ReplayBuffer buffer(dc.buffer_capacity);
    OUProcess ou(m + 1, dc.ou_theta, dc.ou_sigma, dc.ou_dt);

    DdpgResult res;
    std::vector<nd::Tensor> batch_states;
    std::vector<std::vector<double>> batch_actions;
    std::vector<double> batch_targets;

    for (std::size_t episode = 0; episode < dc.episodes; ++episode) {
        const market::Panel* data = &panel;
        market::Panel noisy;
        if (cfg.noise_sigma > 0.0) {
            noisy = env::inject_noise(panel, cfg.noise_sigma, rng);
            data = &noisy;
        }
        ou.reset();
        env::WeightVector w_prev = env::WeightVector::cash_only(m);
        double ep_return = 0.0;
        double ep_loss = 0.0;
        std::size_t updates = 0;

        for (std::size_t t = begin; t < end; ++t) {
            market::StateTensor obs =
                market::normalize_window(*data, t, cfg.window, cfg.features);
            nd::Tensor streams = policy::with_cash_stream(obs);

            std::vector<double> scores = actor.scores(obs);
            const std::vector<double>& noise = ou.step(rng);
            for (std::size_t i = 0; i < scores.size(); ++i) scores[i] += noise[i];
            env::WeightVector a;
            a.w = nd::stable_softmax(scores);

            std::vector<double> y = market::price_relatives(*data, t + 1);
            double r = env::reward(a, w_prev, y, cfg.cost_rate);
            ep_return += r;
            w_prev = env::evolve_weights(a, y);

            market::StateTensor next_obs =
                market::normalize_window(*data, t + 1, cfg.window, cfg.features);
            buffer.push(Transition{streams, a.w, r, policy::with_cash_stream(next_obs),
                                   t + 1 == end});

            auto picks = buffer.sample_indices(dc.batch_size, rng);
            if (!picks) continue; // warm-up: buffer not yet full enough

            batch_states.clear();
            batch_actions.clear();
            batch_targets.clear();
            for (std::size_t idx : *picks) {
                const Transition& tr = buffer[idx];
                double target = tr.reward;
                if (!tr.terminal) {
                    actor_target.net.set_input("state", tr.next_state);
                    actor_target.net.run();
                    nd::Tensor next_a =
                        nd::Tensor::zeros({actor_target.net.output("weights").numel(), 1});
                    next_a.data = actor_target.net.output("weights").data;
                    critic_target.net.set_input("state", tr.next_state);
                    critic_target.net.set_input("action", next_a);
                    critic_target.net.run();
                    target += cfg.gamma * critic_target.net.output("q").data[0];
                }
                batch_states.push_back(tr.state);
                batch_actions.push_back(tr.action);
                batch_targets.push_back(target);
            }
            ep_loss += critic_step(critic, batch_states, batch_actions, batch_targets, opt_c);
            ++updates;

            // Ascend the critic's value through the actor on the same batch.
            nd::GradMap actor_grads;
            const double inv_n = 1.0 / static_cast<double>(batch_states.size());
            for (std::size_t i = 0; i < batch_states.size(); ++i) {
                actor.net().set_input("state", batch_states[i]);
                actor.net().run();
                const nd::Tensor& w = actor.net().output("weights");
                nd::Tensor aw = nd::Tensor::zeros({w.numel(), 1});
                aw.data = w.data;
                critic.net().set_input("state", batch_states[i]);
                critic.net().set_input("action", aw);
                critic.net().run();
                critic.net().backward({{"q", nd::Tensor::scalar(1.0)}});
                nd::Tensor dq_da = critic.net().input_grad("action");
                nd::Tensor seed = nd::Tensor::zeros({1, dq_da.numel()});
                seed.data = dq_da.data;
                actor.net().backward_into({{"weights", seed}}, actor_grads, inv_n);
            }
            nd::opt_step(opt_a, actor.net(), actor_grads, /*maximize=*/true);

            actor_target.update_from(actor.net());
            critic_target.update_from(critic.net());
        }

        res.apv.push_back(std::exp(ep_return));
        res.episode_return.push_back(ep_return);
        res.critic_loss.push_back(updates ? ep_loss / static_cast<double>(updates) : 0.0);
        if (log) {
            nlohmann::json j{{"agent", "ddpg"},
                             {"episode", episode},
                             {"apv", res.apv.back()},
                             {"return", ep_return},
                             {"critic_loss", res.critic_loss.back()},
                             {"updates", updates}};
            *log << j.dump() << '\n';
        }
    }
    return res;
}

} // namespace folio::agent
