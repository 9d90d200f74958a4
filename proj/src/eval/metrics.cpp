#include "folio/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "folio/common.hpp"

namespace folio::eval {

MetricsReport compute_metrics(const EquityCurve& curve, double cvar_confidence,
                              bool annualize) {
    const std::size_t n = curve.steps();
    require(n >= 1, "compute_metrics: curve has no steps");
    require(curve.values.size() == n + 1, "compute_metrics: curve has ",
            curve.values.size(), " values for ", n, " steps");
    require(cvar_confidence > 0.0 && cvar_confidence < 1.0,
            "compute_metrics: cvar confidence must be in (0, 1), got ", cvar_confidence);

    std::vector<double> simple(n);
    for (std::size_t t = 0; t < n; ++t)
        simple[t] = curve.values[t + 1] / curve.values[t] - 1.0;

    MetricsReport rep;
    rep.final_apv = curve.values.back();

    double mean = 0.0;
    for (double r : simple) mean += r;
    mean /= static_cast<double>(n);
    rep.adr_pct = mean * 100.0;

    if (n >= 2) {
        double ss = 0.0;
        for (double r : simple) ss += (r - mean) * (r - mean);
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd > 0.0) {
            rep.sharpe = mean / sd;
            if (annualize) rep.sharpe *= std::sqrt(252.0);
            rep.sharpe_defined = true;
        } else {
            rep.sharpe = 0.0;
            rep.sharpe_defined = false;
        }
    } else {
        rep.sharpe = 0.0;
        rep.sharpe_defined = false;
    }

    double peak = curve.values[0];
    double mdd = 0.0;
    for (double v : curve.values) {
        peak = std::max(peak, v);
        // 1 - v/peak, not (peak - v)/peak: the subtraction-first form loses
        // an ulp on values whose quotient is exact.
        mdd = std::max(mdd, 1.0 - v / peak);
    }
    rep.mdd = mdd;

    std::vector<double> sorted = simple;
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - cvar_confidence) * static_cast<double>(n)));
    k = std::max<std::size_t>(k, 1);
    double tail = 0.0;
    for (std::size_t i = 0; i < k; ++i) tail += sorted[i];
    rep.cvar = tail / static_cast<double>(k);

    return rep;
}

} // namespace folio::eval
