#include "folio/eval/stats.hpp"

#include <cmath>
#include <sstream>

#include "folio/common.hpp"

namespace folio::eval {

namespace {

// Continued-fraction core of the incomplete beta (modified Lentz iteration);
// converges for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int it = 1; it <= kMaxIter; ++it) {
        const int m2 = 2 * it;
        double aa = it * (b - it) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + it) * (qab + it) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    fail("incomplete beta continued fraction did not converge for a=", a, " b=", b,
         " x=", x);
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    require(a > 0.0 && b > 0.0, "incomplete beta: a and b must be positive, got a=", a,
            " b=", b);
    require(x >= 0.0 && x <= 1.0, "incomplete beta: x must be in [0, 1], got ", x);
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    require(df > 0.0, "t distribution: degrees of freedom must be positive, got ", df);
    const double z = df / (df + t * t);
    const double half_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, z);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() >= 2 && y.size() >= 2,
            "welch_t_test: each sample needs at least two observations (got ", x.size(),
            " and ", y.size(), ")");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double mx = sample_mean(x), my = sample_mean(y);
    const double vx = sample_var(x, mx), vy = sample_var(y, my);
    const double sx = vx / nx, sy = vy / ny;
    const double se2 = sx + sy;
    require(se2 > 0.0, "welch_t_test: both samples have zero variance");

    TTestResult r;
    r.t = (mx - my) / std::sqrt(se2);
    double denom = 0.0;
    if (vx > 0.0) denom += sx * sx / (nx - 1.0);
    if (vy > 0.0) denom += sy * sy / (ny - 1.0);
    r.df = se2 * se2 / denom;
    r.p = 1.0 - student_t_cdf(r.t, r.df); // upper tail: H1 is mean(x) > mean(y)
    return r;
}

std::vector<MetricComparison> compare_runs(const std::vector<MetricsReport>& a,
                                           const std::vector<MetricsReport>& b) {
    require(a.size() >= 2 && b.size() >= 2,
            "compare_runs: each group needs at least two runs (got ", a.size(), " and ",
            b.size(), ")");
    auto gather = [](const std::vector<MetricsReport>& g, auto field) {
        std::vector<double> out;
        out.reserve(g.size());
        for (const auto& r : g) out.push_back(field(r));
        return out;
    };

    std::vector<MetricComparison> rows;
    auto add = [&](const std::string& name, auto field) {
        std::vector<double> xa = gather(a, field);
        std::vector<double> xb = gather(b, field);
        MetricComparison row;
        row.metric = name;
        row.mean_a = sample_mean(xa);
        row.mean_b = sample_mean(xb);
        row.test = welch_t_test(xa, xb);
        rows.push_back(std::move(row));
    };
    add("adr_pct", [](const MetricsReport& r) { return r.adr_pct; });
    add("sharpe", [](const MetricsReport& r) { return r.sharpe; });
    add("mdd", [](const MetricsReport& r) { return r.mdd; });
    return rows;
}

std::string comparison_csv(const std::vector<MetricComparison>& rows) {
    std::string out = "metric,mean_a,mean_b,t,df,p\n";
    for (const auto& r : rows) {
        out += r.metric;
        for (double v : {r.mean_a, r.mean_b, r.test.t, r.test.df, r.test.p}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json comparison_json(const std::vector<MetricComparison>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"metric", r.metric},
                       {"mean_a", r.mean_a},
                       {"mean_b", r.mean_b},
                       {"t", r.test.t},
                       {"df", r.test.df},
                       {"p", r.test.p}});
    }
    return arr;
}

} // namespace folio::eval
