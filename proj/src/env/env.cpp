#include "folio/env/env.hpp"

#include <cmath>

#include "folio/common.hpp"

namespace folio::env {

WeightVector WeightVector::cash_only(std::size_t m) {
    WeightVector v;
    v.w.assign(m + 1, 0.0);
    v.w[0] = 1.0;
    return v;
}

WeightVector WeightVector::uniform(std::size_t m, bool include_cash) {
    WeightVector v;
    v.w.assign(m + 1, 0.0);
    if (include_cash) {
        for (auto& x : v.w) x = 1.0 / static_cast<double>(m + 1);
    } else {
        require(m >= 1, "uniform weights excluding cash need at least one asset");
        for (std::size_t i = 1; i <= m; ++i) v.w[i] = 1.0 / static_cast<double>(m);
    }
    return v;
}

bool WeightVector::on_simplex(double tol) const {
    if (w.empty()) return false;
    double s = 0.0;
    for (double x : w) {
        if (!(x >= -tol)) return false;
        s += x;
    }
    return std::abs(s - 1.0) <= tol;
}

WeightVector evolve_weights(const WeightVector& a, const std::vector<double>& y) {
    require(a.size() == y.size(), "evolve_weights: action has ", a.size(),
            " components but relatives have ", y.size());
    double z = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) z += a[i] * y[i];
    require(z > 0.0, "evolve_weights: nonpositive portfolio relative ", z);
    WeightVector out;
    out.w.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out.w[i] = a[i] * y[i] / z;
    return out;
}

double reward(const WeightVector& a, const WeightVector& w_prev,
              const std::vector<double>& y, double cost_rate) {
    require(a.size() == y.size() && w_prev.size() == y.size(),
            "reward: mismatched sizes (action ", a.size(), ", previous weights ",
            w_prev.size(), ", relatives ", y.size(), ")");
    require(cost_rate >= 0.0, "reward: negative cost_rate");
    double gross = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) gross += a[i] * y[i];
    double turnover = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) turnover += std::abs(a[i] - w_prev[i]);
    double z = gross - cost_rate * turnover;
    require(z > 0.0, "reward: infeasible log argument ", z, " (gross ", gross,
            ", cost ", cost_rate * turnover, ")");
    return std::log(z);
}

double risk_penalty(const market::Panel& panel, std::size_t t, const WeightVector& w,
                    std::size_t lookback) {
    require(lookback >= 1, "risk_penalty: lookback must be at least 1");
    require(t >= lookback, "risk_penalty: t=", t, " has fewer than lookback=", lookback,
            " prior relatives");
    require(t < panel.num_days(), "risk_penalty: t=", t, " out of range");
    const std::size_t m = panel.num_assets();
    require(w.size() == m + 1, "risk_penalty: weights have ", w.size(),
            " components but the panel has ", m, " assets plus cash");

    const std::size_t T = panel.num_days();
    double total = 0.0;
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
        var /= static_cast<double>(lookback);
        total += w[a + 1] * var;
    }
    return total; // cash contributes nothing: its relative is constant
}

double risk_adjusted_return(const std::vector<double>& rewards,
                            const std::vector<double>& penalties, double gamma,
                            double beta) {
    require(rewards.size() == penalties.size(), "risk_adjusted_return: ", rewards.size(),
            " rewards but ", penalties.size(), " penalties");
    require(gamma > 0.0 && gamma <= 1.0, "risk_adjusted_return: gamma must be in (0,1], got ",
            gamma);
    double total = 0.0;
    double disc = 1.0;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
        total += disc * (rewards[t] - beta * penalties[t]);
        disc *= gamma;
    }
    return total;
}

market::Panel inject_noise(const market::Panel& panel, double sigma, Rng& rng) {
    require(sigma >= 0.0, "inject_noise: negative sigma");
    market::Panel out = panel;
    if (sigma == 0.0) return out;
    std::normal_distribution<double> gauss(0.0, sigma);
    const std::size_t T = panel.num_days();
    for (std::size_t a = 0; a < panel.num_assets(); ++a) {
        for (std::size_t t = 0; t < T; ++t) {
            for (auto* col : {&out.open, &out.high, &out.low, &out.close}) {
                double factor = std::max(1.0 + gauss(rng), 1e-3);
                (*col)[a * T + t] *= factor;
            }
        }
    }
    return out;
}

PortfolioEnv::PortfolioEnv(const market::Panel& panel, EnvConfig cfg, std::size_t begin,
                           std::size_t end)
    : panel_(&panel), cfg_(std::move(cfg)), begin_(begin), end_(end), t_(begin),
      w_prev_(WeightVector::cash_only(panel.num_assets())), value_(1.0) {
    require(cfg_.window >= 1, "PortfolioEnv: window must be at least 1");
    require(begin_ < end_, "PortfolioEnv: empty decision span [", begin_, ", ", end_, ")");
    require(begin_ + 1 >= cfg_.window, "PortfolioEnv: first decision index ", begin_,
            " has fewer than window=", cfg_.window, " days of history");
    require(end_ < panel.num_days(), "PortfolioEnv: last decision index ", end_ - 1,
            " needs relatives at ", end_, " but the panel has ", panel.num_days(), " days");
}

void PortfolioEnv::reset() {
    t_ = begin_;
    w_prev_ = WeightVector::cash_only(panel_->num_assets());
    value_ = 1.0;
}

market::StateTensor PortfolioEnv::observe() const {
    require(!done(), "PortfolioEnv::observe: episode is done");
    return market::normalize_window(*panel_, t_, cfg_.window, cfg_.features);
}

StepResult PortfolioEnv::step(const WeightVector& a) {
    StepResult res;
    if (done()) {
        res.done = true;
        return res;
    }
    require(a.size() == panel_->num_assets() + 1, "PortfolioEnv::step: action has ",
            a.size(), " components, expected ", panel_->num_assets() + 1);
    require(a.on_simplex(1e-6), "PortfolioEnv::step: action is not on the simplex");

    res.relatives = market::price_relatives(*panel_, t_ + 1);
    for (std::size_t i = 1; i < a.size(); ++i) res.turnover += std::abs(a[i] - w_prev_[i]);
    res.cost = cfg_.cost_rate * res.turnover;
    res.reward = reward(a, w_prev_, res.relatives, cfg_.cost_rate);
    if (cfg_.risk_beta != 0.0 && t_ >= cfg_.risk_window)
        res.risk = risk_penalty(*panel_, t_, a, cfg_.risk_window);

    value_ *= std::exp(res.reward);
    w_prev_ = evolve_weights(a, res.relatives);
    ++t_;
    res.done = done();
    return res;
}

} // namespace folio::env
