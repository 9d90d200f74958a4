#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "folio/eval/metrics.hpp"

namespace folio::eval {

// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1],
// evaluated by a Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with df > 0 degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 0.0; // one-sided, H1: mean(x) > mean(y)
};

// Welch's unequal-variance t-test with the Welch-Satterthwaite degrees of
// freedom. Requires at least two observations per sample and a nonzero
// pooled variance (identical constant samples are rejected).
TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y);

struct MetricComparison {
    std::string metric;
    double mean_a = 0.0;
    double mean_b = 0.0;
    TTestResult test;
};

// Three one-sided Welch tests (daily return, Sharpe, drawdown), each with
// alternative "group A exceeds group B". Requires equally many reports with
// at least two runs per group.
std::vector<MetricComparison> compare_runs(const std::vector<MetricsReport>& a,
                                           const std::vector<MetricsReport>& b);

std::string comparison_csv(const std::vector<MetricComparison>& rows);
nlohmann::json comparison_json(const std::vector<MetricComparison>& rows);

} // namespace folio::eval
