#include "qms/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qms {

bool GradientSequence::has(int k) const {
    return std::binary_search(level_ids.begin(), level_ids.end(), k);
}

const std::vector<double>* GradientSequence::level(int k) const {
    auto it = std::lower_bound(level_ids.begin(), level_ids.end(), k);
    if (it == level_ids.end() || *it != k) return nullptr;
    return &values[it - level_ids.begin()];
}

std::vector<double>& GradientSequence::ensure(int k, int n) {
    auto it = std::lower_bound(level_ids.begin(), level_ids.end(), k);
    size_t pos = it - level_ids.begin();
    if (it == level_ids.end() || *it != k) {
        level_ids.insert(it, k);
        values.insert(values.begin() + pos, std::vector<double>(n, 0.0));
    }
    return values[pos];
}

double GradientSequence::at(int k, int x) const {
    const auto* v = level(k);
    return v ? (*v)[x] : 0.0;
}

int dyadic_level(double d) {
    if (!(d > 0.0)) throw std::invalid_argument("dyadic level needs a positive distance");
    int e;
    std::frexp(d, &e);  // d = m 2^e with m in [1/2, 1), so 2^{e-1} <= d < 2^e
    return -e;
}

std::vector<int> active_levels_in(const Mat& metric) {
    std::vector<int> ks;
    for (int i = 0; i < metric.n; ++i)
        for (int j = 0; j < metric.n; ++j) {
            if (i == j) continue;
            ks.push_back(dyadic_level(metric.at(i, j)));
        }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

std::vector<int> active_levels(const QuasiMetricSpace& s) { return active_levels_in(s.dist); }

GradientCheck check_gradient_in(const QuasiMetricSpace& s, const Mat& metric,
                                const std::vector<double>& u, double s_exp,
                                const GradientSequence& g, double tol) {
    (void)s;  // pairs and levels come from the metric alone
    GradientCheck out;
    const int n = metric.n;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            double d = metric.at(x, y);
            double diff = std::fabs(u[x] - u[y]);
            if (diff == 0.0) continue;
            int k = dyadic_level(d);
            double rhs = std::pow(d, s_exp) * (g.at(k, x) + g.at(k, y));
            double ratio = (rhs > 0.0) ? diff / rhs : std::numeric_limits<double>::infinity();
            if (ratio > out.worst_ratio) {
                out.worst_ratio = ratio;
                out.worst_x = x;
                out.worst_y = y;
                out.worst_level = k;
            }
        }
    out.ok = out.worst_ratio <= 1.0 + tol;
    return out;
}

GradientCheck check_gradient(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                             const GradientSequence& g, double tol) {
    return check_gradient_in(s, s.dist, u, s_exp, g, tol);
}

double median(const QuasiMetricSpace& s, const std::vector<double>& u, const std::vector<int>& E) {
    if (E.empty()) throw std::invalid_argument("median of an empty set");
    std::vector<std::pair<double, double>> vw;  // (value, weight)
    double total = 0.0;
    for (int i : E) {
        vw.emplace_back(u[i], s.weight[i]);
        total += s.weight[i];
    }
    std::sort(vw.begin(), vw.end());
    const double half = total / 2.0;
    // scan distinct values from above; strict sublevel mass = mass of smaller values
    double below = total;
    for (size_t i = vw.size(); i-- > 0;) {
        below -= vw[i].second;
        while (i > 0 && vw[i - 1].first == vw[i].first) {
            --i;
            below -= vw[i].second;
        }
        if (below <= half) return vw[i].first;
    }
    return vw.front().first;
}

std::pair<double, double> median_bound_check(const QuasiMetricSpace& s,
                                             const std::vector<double>& u,
                                             const std::vector<int>& ball_members, double gamma,
                                             double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    double lhs = std::fabs(median(s, u, ball_members) - gamma);
    double mass = 0.0, acc = 0.0;
    for (int i : ball_members) {
        mass += s.weight[i];
        acc += s.weight[i] * std::pow(std::fabs(u[i] - gamma), eta);
    }
    double rhs = std::pow(2.0 * acc / mass, 1.0 / eta);
    return {lhs, rhs};
}

GradientSequence rescale_gradient(const GradientSequence& g, int N, double s_exp, int n_points) {
    if (N < 0) throw std::invalid_argument("N must be nonnegative");
    GradientSequence h;
    if (g.level_ids.empty()) return h;
    const double scale = std::pow(2.0, s_exp * N);
    int lo = g.level_ids.front() - N, hi = g.level_ids.back() + N;
    for (int k = lo; k <= hi; ++k) {
        std::vector<double> acc(n_points, 0.0);
        bool nonzero = false;
        for (int j = -N; j <= N; ++j) {
            const auto* v = g.level(k + j);
            if (!v) continue;
            nonzero = true;
            for (int x = 0; x < n_points; ++x) acc[x] += (*v)[x];
        }
        if (!nonzero) continue;
        for (double& a : acc) a *= scale;
        h.ensure(k, n_points) = acc;
    }
    return h;
}

std::vector<double> maximal_function(const QuasiMetricSpace& s, const Mat& metric,
                                     const std::vector<double>& f) {
    const int n = metric.n;
    std::vector<double> out(n, 0.0);
    std::vector<int> order(n);
    for (int x = 0; x < n; ++x) {
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return metric.at(x, a) < metric.at(x, b); });
        double mass = 0.0, acc = 0.0, best = 0.0;
        for (int i = 0; i < n; ++i) {
            mass += s.weight[order[i]];
            acc += s.weight[order[i]] * std::fabs(f[order[i]]);
            // a ball realizes exactly the prefixes closed under distance ties
            if (i + 1 < n && metric.at(x, order[i + 1]) == metric.at(x, order[i])) continue;
            best = std::max(best, acc / mass);
        }
        out[x] = best;
    }
    return out;
}

std::pair<double, double> heli_check(double a, double b, const std::vector<double>& c) {
    if (!(a > 1.0) || !(b > 0.0)) throw std::invalid_argument("need a > 1 and b > 0");
    const int m = static_cast<int>(c.size());
    int lo = -1, hi = -1;
    for (int j = 0; j < m; ++j)
        if (c[j] > 0.0) {
            if (lo < 0) lo = j;
            hi = j;
        }
    double rhs = 0.0;
    for (double v : c) rhs += std::pow(v, b);
    if (lo < 0) return {0.0, 0.0};

    auto inner = [&](int k) {
        double t = 0.0;
        for (int j = lo; j <= hi; ++j) t += std::pow(a, -std::abs(j - k)) * c[j];
        return t;
    };
    double lhs = 0.0;
    for (int k = lo; k <= hi; ++k) lhs += std::pow(inner(k), b);
    // beyond the support the inner sum scales geometrically: closed-form tails
    double head = std::pow(inner(lo), b);   // k = lo; k = lo - t scales by a^{-tb}
    double tail = std::pow(inner(hi), b);   // k = hi + t likewise
    double geo = std::pow(a, -b) / (1.0 - std::pow(a, -b));
    lhs += (head + tail) * geo;
    return {lhs, lhs / rhs};
}

}  // namespace qms
