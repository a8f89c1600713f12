#include "qms/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

namespace {

double dist_to_set(const Mat& metric, int x, const std::vector<int>& set) {
    double d = std::numeric_limits<double>::infinity();
    for (int y : set) d = std::min(d, metric.at(x, y));
    return d;
}

double chain_constant(const Mat& metric) {
    double c = 1.0;
    const int n = metric.n;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            for (int z = 0; z < n; ++z) {
                double den = std::max(metric.at(x, z), metric.at(z, y));
                if (den > 0.0) c = std::max(c, metric.at(x, y) / den);
            }
        }
    return c;
}

}  // namespace

double holder_seminorm(const Mat& metric, const std::vector<double>& f, double beta) {
    double s = 0.0;
    for (int x = 0; x < metric.n; ++x)
        for (int y = x + 1; y < metric.n; ++y) {
            double d = std::max(metric.at(x, y), metric.at(y, x));
            if (d > 0.0) s = std::max(s, std::fabs(f[x] - f[y]) / std::pow(d, beta));
        }
    return s;
}

WhitneyCover whitney_cover(const QuasiMetricSpace& s, const RegularizedMetric& reg,
                           const std::vector<int>& open_set, double theta, double eps_sep) {
    const Mat& m = reg.matrix;
    if (open_set.empty() || static_cast<int>(open_set.size()) == s.size())
        throw std::invalid_argument("open set must be a proper nonempty subset");
    const double c = chain_constant(m);
    if (!(theta > c * c)) throw std::invalid_argument("theta must exceed the squared chain constant");

    std::vector<int> closed;  // X \ O
    {
        std::vector<char> in(s.size(), 0);
        for (int i : open_set) in[i] = 1;
        for (int i = 0; i < s.size(); ++i)
            if (!in[i]) closed.push_back(i);
    }

    WhitneyCover w;
    w.theta = theta;
    w.open_set = open_set;
    std::sort(w.open_set.begin(), w.open_set.end());

    std::vector<double> bdist(s.size(), 0.0), rad(s.size(), 0.0);
    for (int x : w.open_set) {
        bdist[x] = dist_to_set(m, x, closed);
        rad[x] = bdist[x] / (2.0 * theta * c);
    }

    std::vector<int> order = w.open_set;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (bdist[a] != bdist[b]) return bdist[a] > bdist[b];
        return a < b;
    });

    for (int x : order) {
        bool ok = true;
        for (size_t j = 0; j < w.centers.size() && ok; ++j) {
            double sep = eps_sep * std::max(rad[x], w.radii[j]);
            if (m.at(x, w.centers[j]) < sep) ok = false;
        }
        if (ok) {
            w.centers.push_back(x);
            w.radii.push_back(rad[x]);
        }
    }

    // coverage; inflate uniformly if the greedy left a gap
    auto covered = [&](int z, double factor) {
        for (size_t j = 0; j < w.centers.size(); ++j)
            if (m.at(w.centers[j], z) < factor * w.radii[j]) return true;
        return false;
    };
    double needed = 1.0;
    for (int z : w.open_set) {
        if (covered(z, 1.0)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < w.centers.size(); ++j)
            best = std::min(best, m.at(w.centers[j], z) / w.radii[j]);
        needed = std::max(needed, best * (1.0 + 1e-12));
    }
    if (needed > 1.0) {
        if (needed > 2.0 * theta * c)
            throw std::runtime_error("cover inflation exceeded its cap");
        for (double& r : w.radii) r *= needed;
        w.inflate_factor = needed;
    }

    // verification: the construction is checked, not trusted
    for (int z : w.open_set)
        if (!covered(z, 1.0)) throw std::runtime_error("whitney cover misses an interior point");
    w.overlap = 0;
    for (int z : w.open_set) {
        int cnt = 0;
        for (size_t j = 0; j < w.centers.size(); ++j)
            if (m.at(w.centers[j], z) < theta * w.radii[j]) ++cnt;
        w.overlap = std::max(w.overlap, cnt);
    }
    std::vector<char> in_open(s.size(), 0);
    for (int i : w.open_set) in_open[i] = 1;
    for (size_t j = 0; j < w.centers.size(); ++j) {
        for (int z = 0; z < s.size(); ++z)
            if (m.at(w.centers[j], z) < theta * w.radii[j] && !in_open[z])
                throw std::runtime_error("theta-dilate leaks out of the open set");
        double reach = dist_to_set(m, w.centers[j], closed) / w.radii[j];
        w.lambda = std::max(w.lambda, reach * (1.0 + 1e-12));
    }
    for (size_t i = 0; i < w.centers.size(); ++i)
        for (size_t j = 0; j < w.centers.size(); ++j) {
            if (i == j) continue;
            bool meet = false;
            for (int z = 0; z < s.size() && !meet; ++z)
                if (m.at(w.centers[i], z) < theta * w.radii[i] &&
                    m.at(w.centers[j], z) < theta * w.radii[j])
                    meet = true;
            if (meet) w.neighbor_ratio = std::max(w.neighbor_ratio, w.radii[i] / w.radii[j]);
        }
    return w;
}

PartitionOfUnity partition_of_unity(const QuasiMetricSpace& s, const RegularizedMetric& reg,
                                    const WhitneyCover& cover, double alpha,
                                    double theta_prime) {
    const Mat& m = reg.matrix;
    const double c = chain_constant(m);
    if (!(alpha > 0.0) || c > std::pow(2.0, 1.0 / alpha) * (1.0 + 1e-12))
        throw std::invalid_argument("alpha exceeds the admissible smoothness for this metric");
    if (!(theta_prime > c) || !(theta_prime < cover.theta / c))
        throw std::invalid_argument("theta_prime outside (c, theta/c)");

    const int n = s.size();
    const size_t J = cover.centers.size();
    const double tpa = std::pow(theta_prime, alpha);

    std::vector<std::vector<double>> bump(J, std::vector<double>(n, 0.0));
    for (size_t j = 0; j < J; ++j) {
        double ra = std::pow(cover.radii[j], alpha);
        for (int z = 0; z < n; ++z) {
            double da = std::pow(m.at(cover.centers[j], z), alpha);
            double v = (tpa * ra - da) / ((tpa - 1.0) * ra);
            bump[j][z] = std::clamp(v, 0.0, 1.0);
        }
    }

    PartitionOfUnity pu;
    pu.alpha = alpha;
    pu.theta_prime = theta_prime;
    pu.psi.assign(J, std::vector<double>(n, 0.0));
    for (int z = 0; z < n; ++z) {
        bool in_union = false;
        for (size_t j = 0; j < J && !in_union; ++j)
            if (m.at(cover.centers[j], z) < cover.radii[j]) in_union = true;
        if (!in_union) continue;
        double sum = 0.0;
        for (size_t j = 0; j < J; ++j) sum += bump[j][z];
        pu.c_star = std::max(pu.c_star, sum);
        for (size_t j = 0; j < J; ++j) pu.psi[j][z] = bump[j][z] / sum;
    }

    // fold the measured smoothness of each piece into the recorded constant
    for (double beta : {alpha / 2.0, alpha}) {
        Mat dpow(n);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                dpow.at(x, y) = std::pow(m.at(x, y), beta);
        for (size_t j = 0; j < J; ++j) {
            double semi = 0.0;
            for (int x = 0; x < n; ++x)
                for (int y = x + 1; y < n; ++y) {
                    double diff = std::fabs(pu.psi[j][x] - pu.psi[j][y]);
                    if (diff > 0.0) semi = std::max(semi, diff / dpow.at(x, y));
                }
            pu.c_star = std::max(pu.c_star, semi * std::pow(cover.radii[j], beta));
        }
    }
    return pu;
}

HolderBumps holder_bumps(const QuasiMetricSpace& s, const RegularizedMetric& reg, int x, double r,
                         double s_exp, double p, double q, int count, double c0) {
    (void)p;
    (void)q;  // the norm bound is measured by the caller at these exponents
    if (count < 1) throw std::invalid_argument("need at least one bump");
    const double alpha = reg.alpha;
    if (s_exp > alpha * (1.0 + 1e-12))
        throw std::invalid_argument("smoothness exceeds the regularization exponent");

    // keep the regularized balls inside the original rho-ball; with c0 set,
    // additionally below the half-mass scale r / c0
    double equiv = std::max(reg.distortion, 1.0) * (1.0 + 1e-9);
    double top = r / equiv;
    if (c0 > 1.0) top = std::min(top, r / (c0 * equiv));
    const double delta = 0.5;
    HolderBumps hb;
    for (int j = 0; j <= count; ++j)
        hb.radii.push_back(top * std::pow(delta, static_cast<double>(j + 1) / (count + 1)));
    for (double rj : hb.radii) {
        if (!(rj > 0.0)) throw std::runtime_error("bump radii collapsed below resolution");
    }

    const Mat& m = reg.matrix;
    for (int j = 0; j < count; ++j) {
        double ra = std::pow(hb.radii[j], alpha), rb = std::pow(hb.radii[j + 1], alpha);
        std::vector<double> u(s.size(), 0.0);
        for (int z = 0; z < s.size(); ++z) {
            double da = std::pow(m.at(x, z), alpha);
            u[z] = std::clamp((ra - da) / (ra - rb), 0.0, 1.0);
        }
        hb.funcs.push_back(std::move(u));
    }
    return hb;
}

}  // namespace qms
