#pragma once

#include <optional>
#include <vector>

#include "folio/market/panel.hpp"
#include "folio/market/state.hpp"

namespace folio::env {

// Portfolio weights over cash (component 0) and m risky assets; components
// are nonnegative and sum to 1.
struct WeightVector {
    std::vector<double> w;

    static WeightVector cash_only(std::size_t m);
    static WeightVector uniform(std::size_t m, bool include_cash = true);

    std::size_t size() const { return w.size(); }
    double operator[](std::size_t i) const { return w[i]; }
    double& operator[](std::size_t i) { return w[i]; }
    bool on_simplex(double tol = 1e-9) const;
};

struct EnvConfig {
    double cost_rate = 0.0025;   // proportional transaction cost mu
    double gamma = 0.99;         // discount factor
    double risk_beta = 0.0;      // weight of the risk penalty
    std::size_t risk_window = 10; // lookback L for the variance penalty
    std::size_t window = 10;     // observation window W
    std::vector<market::Feature> features{market::Feature::Close};
    double noise_sigma = 0.0;    // adversarial price-noise std
};

// Weights drift with relative price moves between decisions:
// w' = (y .* a) / (y . a).
WeightVector evolve_weights(const WeightVector& a, const std::vector<double>& y);

// One-period log return net of transaction costs:
// log(a.y - mu * sum_{i>=1} |a_i - w_i|). Fails if the argument is not
// positive (infeasible turnover cost).
double reward(const WeightVector& a, const WeightVector& w_prev,
              const std::vector<double>& y, double cost_rate);

// Weighted recent variance of price relatives: for each asset, the
// population variance of y over the window (t-L+1 .. t), weighted by w.
// Requires t >= L so that all L relatives exist.
double risk_penalty(const market::Panel& panel, std::size_t t, const WeightVector& w,
                    std::size_t lookback);

// Discounted risk-adjusted objective: sum_t gamma^t (r_t - beta * sigma2_t).
double risk_adjusted_return(const std::vector<double>& rewards,
                            const std::vector<double>& penalties, double gamma,
                            double beta);

// Multiplies every price cell (open/high/low/close) by (1 + eps) with
// eps ~ N(0, sigma^2) drawn independently per cell, clipping each factor to
// at least 1e-3. Volume is untouched. sigma = 0 returns an identical copy
// without consuming randomness.
market::Panel inject_noise(const market::Panel& panel, double sigma, Rng& rng);

struct StepResult {
    double reward = 0.0;
    bool done = false;
    std::vector<double> relatives; // y consumed by this step
    double cost = 0.0;             // mu * turnover actually charged
    double turnover = 0.0;         // sum_{i>=1} |a_i - w_prev_i|
    double risk = 0.0;             // variance penalty at the decision index
};

// Episode over panel decision indices [begin, end): each step executes the
// action at index t, consumes the relatives at t+1, and compounds the
// portfolio value. The initial position is all cash.
class PortfolioEnv {
public:
    PortfolioEnv(const market::Panel& panel, EnvConfig cfg, std::size_t begin,
                 std::size_t end);

    void reset();
    market::StateTensor observe() const; // observation for the pending decision
    StepResult step(const WeightVector& a);

    bool done() const { return t_ >= end_; }
    std::size_t t() const { return t_; }
    std::size_t begin() const { return begin_; }
    std::size_t end() const { return end_; }
    double portfolio_value() const { return value_; }
    const WeightVector& weights() const { return w_prev_; }
    const EnvConfig& config() const { return cfg_; }
    const market::Panel& panel() const { return *panel_; }

private:
    const market::Panel* panel_;
    EnvConfig cfg_;
    std::size_t begin_, end_;
    std::size_t t_;
    WeightVector w_prev_;
    double value_;
};

} // namespace folio::env
