#include "qms/metrize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

RegularizedMetric regularize(const QuasiMetricSpace& s, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const int n = s.size();

    Mat pow_sym(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pow_sym.at(i, j) = (i == j) ? 0.0 : std::pow(s.rho_sym(i, j), alpha);

    // all-pairs shortest-path closure of the complete graph on (rho_sym)^alpha
    Mat d = pow_sym;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double dik = d.at(i, k);
            for (int j = 0; j < n; ++j) {
                double via = dik + d.at(k, j);
                if (via < d.at(i, j)) d.at(i, j) = via;
            }
        }

    RegularizedMetric r;
    r.alpha = alpha;
    r.matrix = Mat(n);
    const double inv = 1.0 / alpha;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double rs = s.rho_sym(i, j);
            // clamp: chaining never increases the direct edge, and pow/pow
            // round-trip must not push rho_# above rho_sym
            double v = std::min(std::pow(d.at(i, j), inv), rs);
            r.matrix.at(i, j) = v;
            if (v <= 0.0 || d.at(i, j) <= 0.0) {
                r.distortion = std::numeric_limits<double>::infinity();
                r.collapse = std::numeric_limits<double>::infinity();
                continue;
            }
            r.distortion = std::max(r.distortion, rs / v);
            r.collapse = std::max(r.collapse, pow_sym.at(i, j) / d.at(i, j));
        }
    return r;
}

IndexEstimate estimate_index(const QuasiMetricSpace& s, const std::vector<double>& alpha_grid,
                             double budget) {
    if (alpha_grid.empty()) throw std::invalid_argument("alpha grid must be nonempty");
    if (!(budget > 1.0)) throw std::invalid_argument("budget must exceed 1");
    if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()))
        throw std::invalid_argument("alpha grid must be ascending");

    IndexEstimate e;
    e.alpha_grid = alpha_grid;
    e.budget = budget;
    for (double a : alpha_grid) {
        RegularizedMetric r = regularize(s, a);
        e.distortion_curve.push_back(r.collapse);
        e.bilipschitz_curve.push_back(r.distortion);
        if (r.collapse <= budget) e.lower_bound = a;
    }
    e.infinite = e.distortion_curve.back() <= budget;
    return e;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g;
    const int m = 48;
    const double lo = std::log(0.25), hi = std::log(8.0);
    for (int i = 0; i < m; ++i) g.push_back(std::exp(lo + (hi - lo) * i / (m - 1)));
    return g;
}

}  // namespace qms
