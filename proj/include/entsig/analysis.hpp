#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entsig/trec_io.hpp"

namespace entsig {

struct FrontierPoint {
    std::string run_id;
    double relcov = 0.0;
    double nonrelcov = 0.0;
    bool on_frontier = false;
};

// A point is dominated iff some other point has nonrelcov <= and relcov >=
// with at least one strict; duplicates are mutually non-dominating.
std::vector<FrontierPoint> pareto_frontier(std::vector<FrontierPoint> points);

enum class CorrelationMethod { pearson, spearman };

struct Correlation {
    std::optional<double> r;       // null when either input has zero variance
    std::optional<double> p_value; // two-sided, t approximation with n-2 df
    bool degenerate = false;
};

Correlation correlate(const std::vector<double>& xs, const std::vector<double>& ys,
                      CorrelationMethod method);

// Average ranks (ties share the mean of their positions), 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

// Sort by (value asc, qid asc), split into `buckets` groups; earlier buckets
// absorb the remainder. Returns 0-based bucket per qid.
std::map<std::string, int> stratify(const std::map<std::string, double>& per_query_values,
                                    int buckets = 3);

struct RegressionResult {
    std::vector<std::string> names;   // intercept first
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> p_values;     // two-sided t, n-p df
    double r_squared = 0.0;
    std::size_t n = 0;
};

// OLS of y on [1, columns...]; throws DataError naming collinear columns
// when the design matrix is rank deficient.
RegressionResult ols_regress(const std::vector<double>& y,
                             const std::vector<std::vector<double>>& columns,
                             const std::vector<std::string>& column_names);

// Residuals of y after regressing on [1, columns...].
std::vector<double> residualize(const std::vector<double>& y,
                                const std::vector<std::vector<double>>& columns,
                                const std::vector<std::string>& column_names);

struct Breakpoint {
    double tau = 0.0;
    double below_mean = 0.0; // x <= tau segment
    double above_mean = 0.0; // x > tau segment
    double p_value = 1.0;    // Welch two-sample t-test on the segments
    std::size_t below_n = 0;
    std::size_t above_n = 0;
};

// Two-segment-means sweep: picks the candidate tau minimizing pooled RSS
// (ties -> smallest tau). Candidates leaving fewer than min_side points on
// either side are inadmissible; no admissible tau is an error.
Breakpoint breakpoint_sweep(const std::vector<double>& y, const std::vector<double>& x,
                            const std::vector<double>& candidate_taus,
                            std::size_t min_side = 5);

} // namespace entsig
