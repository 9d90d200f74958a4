#include "folio/eval/backtest.hpp"

#include <cmath>

#include "folio/common.hpp"

namespace folio::eval {

EquityCurve backtest(const WeightFn& agent, const market::Panel& panel, std::size_t begin,
                     std::size_t end, const env::EnvConfig& cfg) {
    env::PortfolioEnv env(panel, cfg, begin, end);
    EquityCurve curve;
    curve.dates.push_back(panel.calendar[begin]);
    curve.values.push_back(1.0);

    while (!env.done()) {
        std::size_t t = env.t();
        env::WeightVector a = agent(env.observe(), t);
        env::StepResult r = env.step(a);
        curve.dates.push_back(panel.calendar[t + 1]);
        curve.values.push_back(env.portfolio_value());
        curve.log_returns.push_back(r.reward);
        curve.weights.push_back(a.w);
        curve.turnover.push_back(r.turnover);
    }
    return curve;
}

env::WeightVector ucrp_weights(std::size_t m, bool include_cash) {
    return env::WeightVector::uniform(m, include_cash);
}

namespace {

env::WeightVector follow_extreme(const market::Panel& panel, std::size_t t,
                                 std::size_t lookback, bool best) {
    require(lookback >= 1, "momentum baseline: lookback must be at least 1");
    require(t >= lookback, "momentum baseline: t=", t, " has fewer than lookback=",
            lookback, " prior relatives");
    require(t < panel.num_days(), "momentum baseline: t=", t, " out of range");
    const std::size_t m = panel.num_assets();
    require(m >= 1, "momentum baseline: panel has no assets");
    const std::size_t T = panel.num_days();

    std::size_t pick = 0;
    double pick_score = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        double score = panel.close[a * T + t] / panel.close[a * T + t - lookback];
        if (a == 0 || (best ? score > pick_score : score < pick_score)) {
            pick = a;
            pick_score = score;
        }
    }
    env::WeightVector w;
    w.w.assign(m + 1, 0.0);
    w.w[pick + 1] = 1.0;
    return w;
}

} // namespace

env::WeightVector follow_winner(const market::Panel& panel, std::size_t t,
                                std::size_t lookback) {
    return follow_extreme(panel, t, lookback, /*best=*/true);
}

env::WeightVector follow_loser(const market::Panel& panel, std::size_t t,
                               std::size_t lookback) {
    return follow_extreme(panel, t, lookback, /*best=*/false);
}

} // namespace folio::eval
