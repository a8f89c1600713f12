#include "qms/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

namespace {

// distinct breakpoints of r -> (B(x,r), B(x,2r)) below r_max, plus r_max
std::vector<double> doubling_breakpoints(const QuasiMetricSpace& s, int x, double r_max) {
    std::vector<double> v;
    for (int j = 0; j < s.size(); ++j) {
        double d = s.rho(x, j);
        if (d <= 0.0) continue;
        if (d < r_max) v.push_back(d);
        if (d / 2.0 < r_max && d / 2.0 > 0.0) v.push_back(d / 2.0);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    v.push_back(r_max);
    return v;
}

double ball_mass(const QuasiMetricSpace& s, int x, double r) {
    double m = 0.0;
    for (int j = 0; j < s.size(); ++j)
        if (s.rho(x, j) < r) m += s.weight[j];
    return m;
}

}  // namespace

RegularityReport regularity(const QuasiMetricSpace& s, double r_max, std::optional<double> Q,
                            bool want_ahlfors, double r_min) {
    if (!(r_max > 0.0) || r_min >= r_max) throw std::invalid_argument("bad radius band");
    const int n = s.size();
    RegularityReport rep;
    rep.r_max = r_max;

    for (int x = 0; x < n; ++x)
        for (double r : doubling_breakpoints(s, x, r_max)) {
            if (r < r_min) continue;
            double inner = ball_mass(s, x, r);
            double outer = ball_mass(s, x, 2.0 * r);
            rep.c_doubling = std::max(rep.c_doubling, outer / inner);
        }

    rep.q_exponent = Q.value_or(std::max(std::log2(rep.c_doubling), 1e-12));
    const double q = rep.q_exponent;

    // kappa = min over nested ball pairs B(x,r) subset B(y,R), r <= R <= r_max,
    // of [mu(Bx,r)/mu(By,R)] (R/r)^Q, radii restricted to critical values.
    double kappa = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> crit(n);
    for (int y = 0; y < n; ++y) crit[y] = critical_radii(s, y, r_max);

    for (int y = 0; y < n; ++y) {
        const auto& R = crit[y];
        const int m = static_cast<int>(R.size());
        // suffix minima of R^Q / mu(B(y,R))
        std::vector<double> f(m), sufmin(m);
        for (int k = 0; k < m; ++k) f[k] = std::pow(R[k], q) / ball_mass(s, y, R[k]);
        for (int k = m - 1; k >= 0; --k)
            sufmin[k] = (k + 1 < m) ? std::min(f[k], sufmin[k + 1]) : f[k];

        for (int x = 0; x < n; ++x) {
            // points ordered by distance from x, with prefix maxima of rho(y, .)
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return s.rho(x, a) < s.rho(x, b); });
            double pref_max = 0.0, pref_mass = 0.0;
            size_t oi = 0;
            for (double r : crit[x]) {
                if (r < r_min) {
                    while (oi < order.size() && s.rho(x, order[oi]) < r) {
                        pref_max = std::max(pref_max, s.rho(y, order[oi]));
                        pref_mass += s.weight[order[oi]];
                        ++oi;
                    }
                    continue;
                }
                while (oi < order.size() && s.rho(x, order[oi]) < r) {
                    pref_max = std::max(pref_max, s.rho(y, order[oi]));
                    pref_mass += s.weight[order[oi]];
                    ++oi;
                }
                // B(x,r) subset B(y,R) iff R > max member distance from y; also R >= r
                double lo = std::max(pref_max, r);
                int k = static_cast<int>(std::lower_bound(R.begin(), R.end(), lo) - R.begin());
                while (k < m && R[k] <= pref_max) ++k;  // strict inclusion
                if (k >= m) continue;
                kappa = std::min(kappa, pref_mass / std::pow(r, q) * sufmin[k]);
            }
        }
    }
    rep.q_kappa = std::isfinite(kappa) ? kappa : 1.0;

    if (want_ahlfors) {
        AhlforsBounds ab;
        ab.Q = q;
        ab.kappa_low = std::numeric_limits<double>::infinity();
        ab.kappa_high = 0.0;
        for (int x = 0; x < n; ++x)
            for (double r : crit[x]) {
                double ratio = ball_mass(s, x, r) / std::pow(r, q);
                ab.kappa_low = std::min(ab.kappa_low, ratio);
                ab.kappa_high = std::max(ab.kappa_high, ratio);
            }
        rep.ahlfors = ab;
    }
    return rep;
}

DensityResult measure_density(const QuasiMetricSpace& s, const DomainMask& omega, double r_max) {
    if (omega.indices.empty()) throw std::invalid_argument("domain must be nonempty");
    DensityResult res;
    for (int x : omega.indices) {
        for (double r : critical_radii(s, x, r_max)) {
            double num = 0.0, den = 0.0;
            for (int j = 0; j < s.size(); ++j) {
                if (s.rho(x, j) < r) {
                    num += s.weight[j];
                    if (omega.contains(j)) den += s.weight[j];
                }
            }
            double ratio = num / den;  // den > 0: the center belongs
            if (ratio > res.c_mu) {
                res.c_mu = ratio;
                res.witness_center = x;
                res.witness_radius = r;
            }
        }
    }
    return res;
}

double phi_radius_in(const QuasiMetricSpace& s, const Mat& metric, const DomainMask& omega, int x,
                     double r) {
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    auto mass_below = [&](double t) {
        double m = 0.0;
        for (int j : omega.indices)
            if (metric.at(x, j) < t) m += s.weight[j];
        return m;
    };
    const double half = 0.5 * mass_below(r);
    std::vector<double> cand{0.0, r};
    for (int j : omega.indices) {
        double d = metric.at(x, j);
        if (d > 0.0 && d < r) cand.push_back(d);
    }
    std::sort(cand.begin(), cand.end());
    double phi = 0.0;
    for (double t : cand)
        if (mass_below(t) <= half) phi = t;
    return phi;
}

double phi_radius(const QuasiMetricSpace& s, const DomainMask& omega, int x, double r) {
    return phi_radius_in(s, s.dist, omega, x, r);
}

PerfectnessResult uniform_perfectness(const QuasiMetricSpace& s, const DomainMask& omega,
                                      double r_max) {
    if (omega.indices.empty()) throw std::invalid_argument("domain must be nonempty");
    PerfectnessResult res;
    double lambda = std::numeric_limits<double>::infinity();
    bool any = false;

    for (int x : omega.indices) {
        std::vector<double> d;
        for (int j : omega.indices)
            if (j != x) d.push_back(s.rho(x, j));
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        if (d.empty()) {
            ++res.vacuous_count;  // Omega = {x}
            continue;
        }
        // outermost representative radius at which Omega extends beyond the ball
        double rbar = (d.back() >= r_max) ? r_max : d.back();
        double fill = 0.0;
        for (double v : d)
            if (v < rbar) fill = std::max(fill, v);
        any = true;
        if (fill <= 0.0) {
            res.absent = true;
            res.witness_center = x;
            res.witness_radius = rbar;
            continue;
        }
        double ratio = fill / rbar;
        if (ratio < lambda) {
            lambda = ratio;
            if (!res.absent) {
                res.witness_center = x;
                res.witness_radius = rbar;
            }
        }
    }

    if (res.absent) return res;
    if (!any || !std::isfinite(lambda)) {
        res.lambda = 0.999;  // every tested configuration vacuous
        return res;
    }
    res.lambda = std::min(lambda, 0.999);
    return res;
}

}  // namespace qms
