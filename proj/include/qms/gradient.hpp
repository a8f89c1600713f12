#pragma once

#include <utility>
#include <vector>

#include "qms/space.hpp"

namespace qms {

// Per-dyadic-level nonnegative functions {g_k}; levels not stored are
// identically zero. Level k carries the pairs with 2^{-k-1} <= d < 2^{-k}.
struct GradientSequence {
    std::vector<int> level_ids;               // sorted ascending
    std::vector<std::vector<double>> values;  // values[i] over points, aligned with level_ids[i]

    bool has(int k) const;
    const std::vector<double>* level(int k) const;  // nullptr when absent
    std::vector<double>& ensure(int k, int n);
    double at(int k, int x) const;
};

// Dyadic level of a positive distance: the unique k with 2^{-k-1} <= d < 2^{-k}.
int dyadic_level(double d);

// Levels carrying at least one ordered pair of distinct points.
std::vector<int> active_levels(const QuasiMetricSpace& s);
std::vector<int> active_levels_in(const Mat& metric);

struct GradientCheck {
    bool ok = true;
    double worst_ratio = 0.0;  // max over pairs of |u(x)-u(y)| / (d^s (g_k(x)+g_k(y)))
    int worst_x = -1, worst_y = -1, worst_level = 0;
};

// True iff |u(x)-u(y)| <= d(x,y)^s (g_k(x)+g_k(y)) for every ordered pair at
// its level; ratios above 1 + tol report the maximally violating pair.
GradientCheck check_gradient(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                             const GradientSequence& g, double tol = 1e-12);
GradientCheck check_gradient_in(const QuasiMetricSpace& s, const Mat& metric,
                                const std::vector<double>& u, double s_exp,
                                const GradientSequence& g, double tol = 1e-12);

// Median value on a point set: max{theta : mu({u < theta}) <= mu(E)/2};
// attained at a value of u on E.
double median(const QuasiMetricSpace& s, const std::vector<double>& u, const std::vector<int>& E);

// Returns (|m_u(B) - gamma|, (2 avg_B |u-gamma|^eta)^{1/eta}).
std::pair<double, double> median_bound_check(const QuasiMetricSpace& s,
                                             const std::vector<double>& u,
                                             const std::vector<int>& ball_members, double gamma,
                                             double eta);

// h_k = 2^{sN} sum_{j=-N..N} g_{k+j}; valid for any metric within a 2^N
// bi-Lipschitz factor of the original.
GradientSequence rescale_gradient(const GradientSequence& g, int N, double s_exp, int n_points);

// Exact uncentered maximal function over the given (symmetric) metric:
// sup over radii of the ball average of |f|.
std::vector<double> maximal_function(const QuasiMetricSpace& s, const Mat& metric,
                                     const std::vector<double>& f);

// lhs = sum_k (sum_j a^{-|j-k|} c_j)^b with analytic geometric tails;
// ratio = lhs / sum_j c_j^b (0 when the right side vanishes).
std::pair<double, double> heli_check(double a, double b, const std::vector<double>& c);

}  // namespace qms
