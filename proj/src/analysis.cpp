#include "entsig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

namespace entsig {

std::vector<FrontierPoint> pareto_frontier(std::vector<FrontierPoint> points) {
    if (points.empty())
        throw UsageError("pareto_frontier requires at least one point");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].nonrelcov != points[b].nonrelcov)
            return points[a].nonrelcov < points[b].nonrelcov;
        return points[a].relcov > points[b].relcov;
    });

    // Sweep nonrelcov groups in ascending order; a point is dominated iff a
    // strictly cheaper group already reached its relcov, or its own group
    // strictly exceeds it.
    double best_lower = -1.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        double group_max = points[order[i]].relcov;
        while (j < order.size() &&
               points[order[j]].nonrelcov == points[order[i]].nonrelcov) {
            group_max = std::max(group_max, points[order[j]].relcov);
            ++j;
        }
        for (std::size_t k = i; k < j; ++k) {
            auto& p = points[order[k]];
            p.on_frontier = !(best_lower >= p.relcov || group_max > p.relcov);
        }
        best_lower = std::max(best_lower, group_max);
        i = j;
    }
    return points;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]])
            ++j;
        double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j)); // 1-based
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

namespace {

double two_sided_t_pvalue(double t, double df) {
    if (!std::isfinite(t))
        return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

Correlation pearson_impl(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t n = xs.size();
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Correlation c;
    if (sxx == 0.0 || syy == 0.0) {
        c.degenerate = true;
        return c;
    }
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    c.r = r;
    double df = static_cast<double>(n) - 2.0;
    if (1.0 - r * r <= 0.0) {
        c.p_value = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        c.p_value = two_sided_t_pvalue(t, df);
    }
    return c;
}

} // namespace

Correlation correlate(const std::vector<double>& xs, const std::vector<double>& ys,
                      CorrelationMethod method) {
    if (xs.size() != ys.size())
        throw UsageError("correlate: input lengths differ");
    if (xs.size() < 3)
        throw UsageError("correlate requires at least 3 observations");
    if (method == CorrelationMethod::pearson)
        return pearson_impl(xs, ys);
    return pearson_impl(average_ranks(xs), average_ranks(ys));
}

std::map<std::string, int> stratify(const std::map<std::string, double>& per_query_values,
                                    int buckets) {
    if (buckets < 1)
        throw UsageError("stratify requires buckets >= 1");
    if (per_query_values.size() < static_cast<std::size_t>(buckets))
        throw UsageError("stratify requires at least as many queries as buckets");
    std::vector<std::pair<double, std::string>> order;
    order.reserve(per_query_values.size());
    for (const auto& [qid, v] : per_query_values)
        order.emplace_back(v, qid);
    std::sort(order.begin(), order.end());

    std::size_t n = order.size();
    std::size_t base = n / buckets;
    std::size_t rem = n % buckets; // earlier buckets take the remainder
    std::map<std::string, int> out;
    std::size_t idx = 0;
    for (int b = 0; b < buckets; ++b) {
        std::size_t size = base + (static_cast<std::size_t>(b) < rem ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i)
            out[order[idx++].second] = b;
    }
    return out;
}

namespace {

Eigen::MatrixXd build_design(std::size_t n, const std::vector<std::vector<double>>& columns) {
    Eigen::MatrixXd X(n, columns.size() + 1);
    for (std::size_t i = 0; i < n; ++i)
        X(i, 0) = 1.0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != n)
            throw UsageError("ols_regress: column length mismatch");
        for (std::size_t i = 0; i < n; ++i)
            X(i, c + 1) = columns[c][i];
    }
    return X;
}

std::vector<std::string> design_names(const std::vector<std::vector<double>>& columns,
                                      const std::vector<std::string>& column_names) {
    std::vector<std::string> names{"intercept"};
    for (std::size_t c = 0; c < columns.size(); ++c)
        names.push_back(c < column_names.size() ? column_names[c]
                                                : "x" + std::to_string(c + 1));
    return names;
}

} // namespace

RegressionResult ols_regress(const std::vector<double>& y,
                             const std::vector<std::vector<double>>& columns,
                             const std::vector<std::string>& column_names) {
    std::size_t n = y.size();
    std::size_t p = columns.size() + 1;
    if (n <= p)
        throw UsageError("ols_regress requires more observations than coefficients");
    Eigen::MatrixXd X = build_design(n, columns);
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    auto names = design_names(columns, column_names);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        // Pivot order puts the dependent columns last.
        std::string collinear;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < static_cast<Eigen::Index>(p); ++k) {
            if (!collinear.empty())
                collinear += ", ";
            collinear += names[static_cast<std::size_t>(perm[k])];
        }
        throw DataError("ols_regress: design matrix is rank deficient; collinear column(s): " +
                        collinear);
    }

    Eigen::VectorXd beta = qr.solve(yv);
    Eigen::VectorXd resid = yv - X * beta;
    double ssr = resid.squaredNorm();
    double ymean = yv.mean();
    double sst = (yv.array() - ymean).square().sum();

    RegressionResult result;
    result.names = names;
    result.n = n;
    result.r_squared = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 ? 1.0 : 0.0);

    double df = static_cast<double>(n - p);
    double sigma2 = ssr / df;
    Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    for (std::size_t j = 0; j < p; ++j) {
        double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
        double b = beta(static_cast<Eigen::Index>(j));
        result.coefficients.push_back(b);
        result.std_errors.push_back(se);
        if (se == 0.0)
            result.p_values.push_back(b == 0.0 ? 1.0 : 0.0);
        else
            result.p_values.push_back(two_sided_t_pvalue(b / se, df));
    }
    return result;
}

std::vector<double> residualize(const std::vector<double>& y,
                                const std::vector<std::vector<double>>& columns,
                                const std::vector<std::string>& column_names) {
    auto fit = ols_regress(y, columns, column_names);
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double pred = fit.coefficients[0];
        for (std::size_t c = 0; c < columns.size(); ++c)
            pred += fit.coefficients[c + 1] * columns[c][i];
        out[i] = y[i] - pred;
    }
    return out;
}

namespace {

struct Segment {
    double mean = 0.0;
    double var = 0.0; // sample variance
    std::size_t n = 0;
};

Segment segment_stats(const std::vector<double>& y, const std::vector<bool>& pick, bool side) {
    Segment s;
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (pick[i] == side) {
            sum += y[i];
            ++s.n;
        }
    if (s.n == 0)
        return s;
    s.mean = sum / s.n;
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (pick[i] == side)
            ss += (y[i] - s.mean) * (y[i] - s.mean);
    s.var = s.n > 1 ? ss / (s.n - 1) : 0.0;
    return s;
}

double welch_pvalue(const Segment& a, const Segment& b) {
    double se2 = a.var / a.n + b.var / b.n;
    if (se2 <= 0.0)
        return a.mean == b.mean ? 1.0 : 0.0;
    double t = (a.mean - b.mean) / std::sqrt(se2);
    double df_num = se2 * se2;
    double df_den = (a.var / a.n) * (a.var / a.n) / (a.n > 1 ? a.n - 1 : 1) +
                    (b.var / b.n) * (b.var / b.n) / (b.n > 1 ? b.n - 1 : 1);
    if (df_den <= 0.0)
        return a.mean == b.mean ? 1.0 : 0.0;
    return two_sided_t_pvalue(t, df_num / df_den);
}

} // namespace

Breakpoint breakpoint_sweep(const std::vector<double>& y, const std::vector<double>& x,
                            const std::vector<double>& candidate_taus, std::size_t min_side) {
    if (y.size() != x.size())
        throw UsageError("breakpoint_sweep: input lengths differ");
    std::vector<double> taus = candidate_taus;
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    bool found = false;
    Breakpoint best;
    double best_rss = 0.0;
    for (double tau : taus) {
        std::vector<bool> below(y.size(), false);
        std::size_t n_below = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] <= tau) {
                below[i] = true;
                ++n_below;
            }
        std::size_t n_above = y.size() - n_below;
        if (n_below < min_side || n_above < min_side)
            continue;
        Segment lo = segment_stats(y, below, true);
        Segment hi = segment_stats(y, below, false);
        double rss = lo.var * (lo.n > 1 ? lo.n - 1 : 0) + hi.var * (hi.n > 1 ? hi.n - 1 : 0);
        if (!found || rss < best_rss) {
            found = true;
            best_rss = rss;
            best.tau = tau;
            best.below_mean = lo.mean;
            best.above_mean = hi.mean;
            best.below_n = lo.n;
            best.above_n = hi.n;
            best.p_value = welch_pvalue(lo, hi);
        }
    }
    if (!found)
        throw UsageError("breakpoint_sweep: no candidate tau leaves " + std::to_string(min_side) +
                         " points on each side");
    return best;
}

} // namespace entsig
