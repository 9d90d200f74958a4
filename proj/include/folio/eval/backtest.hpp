#pragma once

#include <functional>

#include "folio/env/env.hpp"

namespace folio::eval {

// Realized out-of-sample trajectory: values[0] = 1 at the span start date,
// one compounded value per executed step after that.
struct EquityCurve {
    std::vector<market::Date> dates;          // size steps + 1
    std::vector<double> values;               // portfolio value P_t
    std::vector<double> log_returns;          // size steps
    std::vector<std::vector<double>> weights; // executed action per step
    std::vector<double> turnover;             // per-step traded fraction

    std::size_t steps() const { return log_returns.size(); }
};

using WeightFn =
    std::function<env::WeightVector(const market::StateTensor&, std::size_t t)>;

// Runs the weight function through the environment over decision indices
// [begin, end). The function sees only the observation ending at t.
EquityCurve backtest(const WeightFn& agent, const market::Panel& panel, std::size_t begin,
                     std::size_t end, const env::EnvConfig& cfg);

// Constantly rebalanced uniform portfolio (cash included by default).
env::WeightVector ucrp_weights(std::size_t m, bool include_cash = true);

// Momentum baselines: all-in on the asset with the best / worst cumulative
// price relative over the trailing lookback window (cash never selected;
// ties resolve to the lowest asset index). Requires t >= lookback.
env::WeightVector follow_winner(const market::Panel& panel, std::size_t t,
                                std::size_t lookback);
env::WeightVector follow_loser(const market::Panel& panel, std::size_t t,
                               std::size_t lookback);

} // namespace folio::eval
