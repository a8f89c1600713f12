#include "qms/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qms {

namespace {

struct Con {
    int a, b;
    double bound;
};

double mixed_norm(const QuasiMetricSpace& s, const std::vector<double>& g, int n, int L, double p,
                  double q, NormFlavor flavor) {
    auto colq = [&](int x) {
        if (is_inf_exp(q)) {
            double m = 0.0;
            for (int l = 0; l < L; ++l) m = std::max(m, g[l * n + x]);
            return m;
        }
        double a = 0.0;
        for (int l = 0; l < L; ++l) a += std::pow(g[l * n + x], q);
        return std::pow(a, 1.0 / q);
    };
    if (flavor == NormFlavor::M) {
        if (is_inf_exp(p)) {
            double m = 0.0;
            for (int x = 0; x < n; ++x) m = std::max(m, colq(x));
            return m;
        }
        double acc = 0.0;
        for (int x = 0; x < n; ++x) acc += s.weight[x] * std::pow(colq(x), p);
        return std::pow(acc, 1.0 / p);
    }
    double acc = 0.0, mx = 0.0;
    for (int l = 0; l < L; ++l) {
        double lev;
        if (is_inf_exp(p)) {
            lev = 0.0;
            for (int x = 0; x < n; ++x) lev = std::max(lev, g[l * n + x]);
        } else {
            double a = 0.0;
            for (int x = 0; x < n; ++x) a += s.weight[x] * std::pow(g[l * n + x], p);
            lev = std::pow(a, 1.0 / p);
        }
        if (is_inf_exp(q))
            mx = std::max(mx, lev);
        else
            acc += std::pow(lev, q);
    }
    return is_inf_exp(q) ? mx : std::pow(acc, 1.0 / q);
}

}  // namespace

double oracle_min_gradient(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                           double p, double q, NormFlavor flavor, int grid_points, int passes) {
    const int n = s.size();
    if (n > 5) throw std::invalid_argument("oracle guarded to at most 5 points");

    bool constant = true;
    for (size_t i = 1; i < u.size(); ++i)
        if (u[i] != u[0]) constant = false;
    if (constant) return 0.0;

    // constraints per (level, pair)
    std::vector<std::tuple<int, int, int, double>> raw;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            double diff = std::fabs(u[x] - u[y]);
            if (diff == 0.0) continue;
            for (double d : {s.rho(x, y), s.rho(y, x)}) {
                raw.emplace_back(dyadic_level(d), x, y, diff / std::pow(d, s_exp));
            }
        }
    std::sort(raw.begin(), raw.end());
    std::vector<int> levels;
    for (auto& [k, a, b, bd] : raw) levels.push_back(k);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const int L = static_cast<int>(levels.size());
    if (L > 2) throw std::invalid_argument("oracle guarded to at most 2 active levels");

    std::vector<Con> cons;
    for (size_t i = 0; i < raw.size(); ++i) {
        auto [k, a, b, bd] = raw[i];
        if (i + 1 < raw.size()) {
            auto [k2, a2, b2, bd2] = raw[i + 1];
            if (k == k2 && a == a2 && b == b2) continue;
        }
        int li = static_cast<int>(std::lower_bound(levels.begin(), levels.end(), k) - levels.begin());
        cons.push_back({li * n + a, li * n + b, bd});
    }

    const int dims = L * n;
    int G = grid_points;
    if (dims > 4) G = std::min(G, 13);
    if (dims > 6) G = std::min(G, 7);
    if (dims > 8) throw std::invalid_argument("oracle dimension too large");

    std::vector<double> lo(dims, 0.0), hi(dims, 0.0);
    for (const auto& c : cons) {
        hi[c.a] = std::max(hi[c.a], c.bound);
        hi[c.b] = std::max(hi[c.b], c.bound);
    }

    // every grid point is lifted to exact feasibility by the smallest uniform
    // scale-up, so each evaluation is a true upper bound and no basin is lost
    // to boundary rounding
    std::vector<double> g(dims, 0.0), lifted(dims, 0.0), best_g;
    double best = std::numeric_limits<double>::infinity();
    auto lift_and_eval = [&]() {
        double nu = 1.0;
        for (const auto& c : cons) {
            double sum = g[c.a] + g[c.b];
            if (sum <= 0.0) return;  // unliftable direction, skip
            nu = std::max(nu, c.bound / sum);
        }
        for (int d = 0; d < dims; ++d) lifted[d] = g[d] * nu;
        double v = mixed_norm(s, lifted, n, L, p, q, flavor);
        if (v < best) {
            best = v;
            best_g = lifted;
        }
    };

    for (int pass = 0; pass < passes; ++pass) {
        std::vector<double> step(dims);
        for (int d = 0; d < dims; ++d) step[d] = (hi[d] - lo[d]) / (G - 1);

        std::vector<int> idx(dims, 0);
        while (true) {
            for (int d = 0; d < dims; ++d) g[d] = lo[d] + idx[d] * step[d];
            lift_and_eval();
            int d = 0;
            while (d < dims && ++idx[d] == G) idx[d++] = 0;
            if (d == dims) break;
        }
        for (int d = 0; d < dims; ++d) {
            double c = best_g.empty() ? (lo[d] + hi[d]) / 2.0 : best_g[d];
            double h = 2.0 * step[d];
            lo[d] = std::max(0.0, c - h);
            hi[d] = c + h;
        }
    }
    if (best_g.empty()) return best;

    // pairwise redistribution: per constraint, shrink the pair sum to its
    // envelope and ternary-search the split (the objective is convex along
    // the segment for p, q >= 1 and still unimodal enough to polish below)
    std::vector<std::vector<std::pair<int, double>>> touching(dims);
    for (size_t i = 0; i < cons.size(); ++i) {
        touching[cons[i].a].push_back({cons[i].b, cons[i].bound});
        touching[cons[i].b].push_back({cons[i].a, cons[i].bound});
    }
    auto envelope = [&](int v, int skip_other, double skip_bound) {
        double e = 0.0;
        for (auto [other, bound] : touching[v]) {
            if (other == skip_other && bound == skip_bound) continue;
            e = std::max(e, bound - best_g[other]);
        }
        return e;
    };
    for (int sweep = 0; sweep < 120; ++sweep) {
        double before = best;
        for (const auto& c : cons) {
            double la = envelope(c.a, c.b, c.bound);
            double lb = envelope(c.b, c.a, c.bound);
            double S = std::max(c.bound, la + lb);
            if (S - lb < la) continue;
            double gl = la, gr = S - lb;
            auto value_at = [&](double ga) {
                best_g[c.a] = ga;
                best_g[c.b] = S - ga;
                return mixed_norm(s, best_g, n, L, p, q, flavor);
            };
            for (int it = 0; it < 48; ++it) {
                double m1 = gl + (gr - gl) / 3.0, m2 = gr - (gr - gl) / 3.0;
                if (value_at(m1) <= value_at(m2))
                    gr = m2;
                else
                    gl = m1;
            }
            double vbest = value_at((gl + gr) / 2.0);
            best = std::min(best, vbest);
        }
        if (before - best <= 1e-13 * std::max(1.0, best)) break;
    }
    best = mixed_norm(s, best_g, n, L, p, q, flavor);
    return best;
}

}  // namespace qms
