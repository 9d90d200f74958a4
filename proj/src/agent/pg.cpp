#include "folio/agent/pg.hpp"

#include <cmath>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "folio/common.hpp"
#include "folio/ndcore/optim.hpp"

namespace folio::agent {

namespace {

// Per-asset population variance of relatives over (t-L+1 .. t); component 0
// (cash) is zero. These are the linear coefficients of the risk penalty in
// the portfolio weights.
std::vector<double> risk_coefficients(const market::Panel& panel, std::size_t t,
                                      std::size_t lookback) {
    const std::size_t m = panel.num_assets();
    const std::size_t T = panel.num_days();
    std::vector<double> c(m + 1, 0.0);
    std::vector<double> rel(lookback);
    for (std::size_t a = 0; a < m; ++a) {
        double mean = 0.0;
        for (std::size_t k = 0; k < lookback; ++k) {
            std::size_t tp = t - lookback + 1 + k;
            rel[k] = panel.close[a * T + tp] / panel.close[a * T + tp - 1];
            mean += rel[k];
        }
        mean /= static_cast<double>(lookback);
        double var = 0.0;
        for (double r : rel) var += (r - mean) * (r - mean);
        c[a + 1] = var / static_cast<double>(lookback);
    }
    return c;
}

} // namespace

PgEpoch pg_rollout_gradient(policy::Actor& actor, const market::Panel& panel,
                            std::size_t begin, std::size_t end, const env::EnvConfig& cfg,
                            nd::GradMap& grads) {
    require(begin < end, "pg_rollout_gradient: empty decision span [", begin, ", ", end, ")");
    require(end < panel.num_days(), "pg_rollout_gradient: span end ", end,
            " needs relatives beyond the panel's ", panel.num_days(), " days");

    const std::size_t m = panel.num_assets();
    const double inv_steps = 1.0 / static_cast<double>(end - begin);
    env::WeightVector w_prev = env::WeightVector::cash_only(m);
    PgEpoch ep;

    for (std::size_t t = begin; t < end; ++t) {
        market::StateTensor s = market::normalize_window(panel, t, cfg.window, cfg.features);
        env::WeightVector a = actor.act(s);
        std::vector<double> y = market::price_relatives(panel, t + 1);

        double gross = 0.0;
        for (std::size_t i = 0; i <= m; ++i) gross += a[i] * y[i];
        double turnover = 0.0;
        for (std::size_t i = 1; i <= m; ++i) turnover += std::abs(a[i] - w_prev[i]);
        double z = gross - cfg.cost_rate * turnover;
        require(z > 0.0, "pg_rollout_gradient: infeasible log argument ", z,
                " at decision index ", t);

        nd::Tensor seed = nd::Tensor::zeros({1, m + 1});
        for (std::size_t i = 0; i <= m; ++i) {
            double sgn = 0.0;
            if (i >= 1 && a[i] != w_prev[i]) sgn = a[i] > w_prev[i] ? 1.0 : -1.0;
            seed.data[i] = (y[i] - cfg.cost_rate * sgn) / z;
        }

        double step_obj = std::log(z);
        ep.log_apv += step_obj;
        if (cfg.risk_beta != 0.0 && t >= cfg.risk_window) {
            std::vector<double> c = risk_coefficients(panel, t, cfg.risk_window);
            double sigma2 = 0.0;
            for (std::size_t i = 0; i <= m; ++i) sigma2 += c[i] * a[i];
            step_obj -= cfg.risk_beta * sigma2;
            for (std::size_t i = 0; i <= m; ++i) seed.data[i] -= cfg.risk_beta * c[i];
        }
        ep.objective += step_obj * inv_steps;

        // The forward pass for this state is still live on the graph.
        actor.net().backward_into({{"weights", seed}}, grads, inv_steps);
        w_prev = env::evolve_weights(a, y);
    }
    return ep;
}

PgResult pg_train(policy::Actor& actor, const market::Panel& panel, std::size_t begin,
                  std::size_t end, const env::EnvConfig& cfg, const PgConfig& pc, Rng& rng,
                  std::ostream* log) {
    require(pc.learning_rate >= 0.0, "pg_train: negative learning rate ", pc.learning_rate);
    // A zero learning rate is a valid degenerate request: roll and log every
    // epoch but leave the parameters frozen.
    std::optional<nd::OptState> opt;
    if (pc.learning_rate > 0.0)
        opt = pc.use_adam ? nd::OptState::adam(pc.learning_rate)
                          : nd::OptState::sgd(pc.learning_rate);
    PgResult res;
    res.apv.reserve(pc.epochs);
    res.objective.reserve(pc.epochs);

    for (std::size_t epoch = 0; epoch < pc.epochs; ++epoch) {
        const market::Panel* data = &panel;
        market::Panel noisy;
        if (cfg.noise_sigma > 0.0) {
            noisy = env::inject_noise(panel, cfg.noise_sigma, rng);
            data = &noisy;
        }
        nd::GradMap grads;
        PgEpoch ep = pg_rollout_gradient(actor, *data, begin, end, cfg, grads);
        if (opt) nd::opt_step(*opt, actor.net(), grads, /*maximize=*/true);

        res.apv.push_back(std::exp(ep.log_apv));
        res.objective.push_back(ep.objective);
        if (log) {
            nlohmann::json j{{"agent", "pg"},
                             {"epoch", epoch},
                             {"apv", res.apv.back()},
                             {"objective", ep.objective}};
            *log << j.dump() << '\n';
        }
    }
    return res;
}

} // namespace folio::agent
