#include "folio/agent/ppo.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "folio/common.hpp"
#include "folio/ndcore/optim.hpp"

namespace folio::agent {

std::vector<double> returns_to_go(const std::vector<double>& rewards, double gamma) {
    require(gamma >= 0.0 && gamma <= 1.0, "returns_to_go: gamma must be in [0, 1], got ",
            gamma);
    std::vector<double> g(rewards.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        acc = rewards[i] + gamma * acc;
        g[i] = acc;
    }
    return g;
}

PpoResult ppo_train(policy::GaussianPolicy& policy, const market::Panel& panel,
                    std::size_t begin, std::size_t end, const env::EnvConfig& cfg,
                    const PpoConfig& pc, Rng& rng, std::ostream* log) {
    require(begin < end, "ppo_train: empty decision span [", begin, ", ", end, ")");
    require(end < panel.num_days(), "ppo_train: span end ", end,
            " needs relatives beyond the panel's ", panel.num_days(), " days");
    require(pc.clip > 0.0, "ppo_train: clip must be positive");
    require(pc.inner_epochs >= 1, "ppo_train: inner_epochs must be at least 1");

    const std::size_t m = panel.num_assets();
    const std::size_t steps = end - begin;
    const double inv_steps = 1.0 / static_cast<double>(steps);
    nd::OptState opt_a = pc.use_adam ? nd::OptState::adam(pc.actor_lr)
                                     : nd::OptState::sgd(pc.actor_lr);
    nd::OptState opt_v = pc.use_adam ? nd::OptState::adam(pc.critic_lr)
                                     : nd::OptState::sgd(pc.critic_lr);

    PpoResult res;
    std::vector<nd::Tensor> states(steps);
    std::vector<std::vector<double>> raws(steps);
    std::vector<double> logp_old(steps), rewards(steps);

    for (std::size_t iter = 0; iter < pc.iterations; ++iter) {
        const market::Panel* data = &panel;
        market::Panel noisy;
        if (cfg.noise_sigma > 0.0) {
            noisy = env::inject_noise(panel, cfg.noise_sigma, rng);
            data = &noisy;
        }

        // Collect one on-policy trajectory under the current (old) policy.
        env::WeightVector w_prev = env::WeightVector::cash_only(m);
        for (std::size_t k = 0; k < steps; ++k) {
            std::size_t t = begin + k;
            market::StateTensor obs =
                market::normalize_window(*data, t, cfg.window, cfg.features);
            states[k] = policy::with_cash_stream(obs);
            policy::GaussianPolicy::Moments mo = policy.moments(obs);
            raws[k] = policy::GaussianPolicy::sample(mo, rng);
            logp_old[k] = policy::GaussianPolicy::log_prob(raws[k], mo);
            env::WeightVector a = policy::GaussianPolicy::execute(raws[k]);
            std::vector<double> y = market::price_relatives(*data, t + 1);
            rewards[k] = env::reward(a, w_prev, y, cfg.cost_rate);
            w_prev = env::evolve_weights(a, y);
        }

        std::vector<double> returns = returns_to_go(rewards, cfg.gamma);
        std::vector<double> adv(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            policy.value_net().set_input("state", states[k]);
            policy.value_net().run();
            adv[k] = returns[k] - policy.value_net().output("value").data[0];
        }

        double surrogate = 0.0, mean_ratio = 0.0, kl = 0.0, value_loss = 0.0;
        for (std::size_t pass = 0; pass < pc.inner_epochs; ++pass) {
            surrogate = mean_ratio = kl = 0.0;
            nd::GradMap actor_grads;
            for (std::size_t k = 0; k < steps; ++k) {
                nd::Graph& net = policy.actor_net();
                net.set_input("state", states[k]);
                net.run();
                policy::GaussianPolicy::Moments mo;
                mo.mean = net.output("mean").data;
                mo.std = net.output("std").data;
                double logp = policy::GaussianPolicy::log_prob(raws[k], mo);
                double ratio = std::exp(logp - logp_old[k]);
                require(std::isfinite(ratio), "ppo_train: non-finite probability ratio at ",
                        "iteration ", iter, " step ", k, " (log prob ", logp,
                        ", behavior log prob ", logp_old[k], ")");
                mean_ratio += ratio * inv_steps;
                kl += (logp_old[k] - logp) * inv_steps;

                double a_k = adv[k];
                double clipped = std::clamp(ratio, 1.0 - pc.clip, 1.0 + pc.clip);
                surrogate += std::min(ratio * a_k, clipped * a_k) * inv_steps;

                bool clipped_out = (a_k > 0.0 && ratio > 1.0 + pc.clip) ||
                                   (a_k < 0.0 && ratio < 1.0 - pc.clip);
                if (clipped_out || a_k == 0.0) continue;

                nd::Tensor seed_mean = nd::Tensor::zeros({1, m + 1});
                nd::Tensor seed_std = nd::Tensor::zeros({1, m + 1});
                for (std::size_t i = 0; i <= m; ++i) {
                    double sd = mo.std[i];
                    double zi = (raws[k][i] - mo.mean[i]) / sd;
                    seed_mean.data[i] = a_k * ratio * zi / sd;
                    seed_std.data[i] = a_k * ratio * (zi * zi - 1.0) / sd;
                }
                net.backward_into({{"mean", seed_mean}, {"std", seed_std}}, actor_grads,
                                  inv_steps);
            }
            nd::opt_step(opt_a, policy.actor_net(), actor_grads, /*maximize=*/true);

            value_loss = 0.0;
            nd::GradMap value_grads;
            for (std::size_t k = 0; k < steps; ++k) {
                nd::Graph& net = policy.value_net();
                net.set_input("state", states[k]);
                net.run();
                double err = net.output("value").data[0] - returns[k];
                value_loss += err * err * inv_steps;
                net.backward_into({{"value", nd::Tensor::scalar(2.0 * err * inv_steps)}},
                                  value_grads);
            }
            nd::opt_step(opt_v, policy.value_net(), value_grads, /*maximize=*/false);
        }

        double log_apv = 0.0;
        for (double r : rewards) log_apv += r;
        res.apv.push_back(std::exp(log_apv));
        res.surrogate.push_back(surrogate);
        res.mean_ratio.push_back(mean_ratio);
        res.kl.push_back(kl);
        res.value_loss.push_back(value_loss);
        if (log) {
            nlohmann::json j{{"agent", "ppo"},          {"iteration", iter},
                             {"apv", res.apv.back()},   {"surrogate", surrogate},
                             {"mean_ratio", mean_ratio}, {"kl", kl},
                             {"value_loss", value_loss}};
            *log << j.dump() << '\n';
        }
    }
    return res;
}

} // namespace folio::agent
