#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "advect/error.hpp"

namespace advect::stats {

/// True when every value equals the first; exact, unlike a variance test.
inline bool constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of an empty sample");
    if (constant(x)) return x.front();
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("standard deviation needs at least two values");
    if (constant(x)) return 0.0;
    double m = mean(x), ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// P(T <= t) for Student's t with df degrees of freedom.
inline double t_cdf(double t, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(dist, t);
}

/// P(T > t), accurate in the far tail.
inline double t_sf(double t, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

inline double t_quantile(double p, double df) {
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, p);
}

/// Simple least-squares fit y = intercept + slope * x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
    double p_value = 1.0; // two-sided, slope = 0
    std::size_t n = 0;

    double predict(double x) const { return intercept + slope * x; }
};

/// Closed-form OLS. Empty when n < 3 or either variable has zero variance.
inline std::optional<LinearFit> ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("regression inputs differ in length");
    const std::size_t n = x.size();
    if (n < 3 || constant(x) || constant(y)) return std::nullopt;
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    LinearFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = std::min(1.0, sxy * sxy / (sxx * syy));
    const double df = static_cast<double>(n - 2);
    double sse = std::max(0.0, syy - f.slope * sxy);
    if (sse <= 0.0) {
        f.p_value = 0.0;
    } else {
        double se = std::sqrt(sse / df / sxx);
        double t = f.slope / se;
        f.p_value = 2.0 * t_cdf(-std::abs(t), df);
    }
    return f;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    auto f = ols(x, y);
    if (!f) return std::nan("");
    return std::copysign(std::sqrt(f->r2), f->slope);
}

struct TTest {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// One-sample t-test of mean(x) > mu. Empty when the sample has zero variance.
inline std::optional<TTest> one_sample_t_greater(std::span<const double> x, double mu = 0.0) {
    if (x.size() < 2) throw DomainError("t-test needs at least two values");
    double sd = stddev(x);
    if (!(sd > 0.0)) return std::nullopt;
    TTest r;
    r.df = static_cast<double>(x.size() - 1);
    r.t = (mean(x) - mu) / (sd / std::sqrt(static_cast<double>(x.size())));
    r.p = t_sf(r.t, r.df);
    return r;
}

} // namespace advect::stats
