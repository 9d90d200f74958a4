#pragma once

#include "folio/eval/backtest.hpp"

namespace folio::eval {

struct MetricsReport {
    double final_apv = 0.0;
    double adr_pct = 0.0;       // mean simple daily return, in percent
    double sharpe = 0.0;        // mean / sample std of simple daily returns
    bool sharpe_defined = true; // false when the return std is zero
    double mdd = 0.0;           // maximum peak-relative drawdown, in [0, 1]
    double cvar = 0.0;          // mean of the worst (1-c) tail of daily returns
};

// Summary statistics of an equity curve. The Sharpe ratio is per-period by
// default; `annualize` multiplies it by sqrt(252). CVaR averages the worst
// ceil((1 - confidence) * n) simple daily returns (at least one).
MetricsReport compute_metrics(const EquityCurve& curve, double cvar_confidence = 0.95,
                              bool annualize = false);

} // namespace folio::eval
