#include "qms/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qms {

bool DomainMask::contains(int i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
}

void validate(const QuasiMetricSpace& s) {
    const int n = s.size();
    if (n < 2) throw std::invalid_argument("space needs at least two points");
    if (static_cast<int>(s.weight.size()) != n)
        throw std::invalid_argument("weight length does not match matrix size");
    if (!s.labels.empty() && static_cast<int>(s.labels.size()) != n)
        throw std::invalid_argument("label count does not match matrix size");
    for (int i = 0; i < n; ++i) {
        if (!(s.weight[i] > 0.0)) throw std::invalid_argument("weights must be strictly positive");
        for (int j = 0; j < n; ++j) {
            double d = s.dist.at(i, j);
            if (!(d >= 0.0) || !std::isfinite(d))
                throw std::invalid_argument("distances must be finite and nonnegative");
            if (i == j && d != 0.0) throw std::invalid_argument("nonzero diagonal entry");
            if (i != j && d == 0.0) throw std::invalid_argument("zero distance between distinct points");
        }
    }
}

QuasiMetricConstants compute_constants(const QuasiMetricSpace& s) {
    const int n = s.size();
    if (n < 2) throw std::invalid_argument("degenerate space");
    QuasiMetricConstants c;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            double num = s.rho(x, y);
            c.c_tilde = std::max(c.c_tilde, s.rho(y, x) / num);
            for (int z = 0; z < n; ++z) {
                double den = std::max(s.rho(x, z), s.rho(z, y));
                // den == 0 would force z == x == y, excluded above
                c.c_rho = std::max(c.c_rho, num / den);
            }
        }
    }
    return c;
}

Ball ball_in(const QuasiMetricSpace& s, const Mat& metric, int center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    Ball b;
    b.center = center;
    b.radius = radius;
    for (int j = 0; j < metric.n; ++j) {
        if (metric.at(center, j) < radius) {
            b.members.push_back(j);
            b.mass += s.weight[j];
        }
    }
    return b;
}

Ball ball(const QuasiMetricSpace& s, int center, double radius) {
    return ball_in(s, s.dist, center, radius);
}

std::vector<double> critical_radii_in(const Mat& metric, int center, double r_max) {
    if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    std::vector<double> vals;
    for (int j = 0; j < metric.n; ++j) {
        double d = metric.at(center, j);
        if (d > 0.0 && d < r_max) vals.push_back(d);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    vals.push_back(r_max);
    return vals;
}

std::vector<double> critical_radii(const QuasiMetricSpace& s, int center, double r_max) {
    return critical_radii_in(s.dist, center, r_max);
}

QuasiMetricSpace subspace(const QuasiMetricSpace& s, const std::vector<int>& idx) {
    QuasiMetricSpace r;
    const int m = static_cast<int>(idx.size());
    r.dist = Mat(m);
    r.weight.resize(m);
    for (int i = 0; i < m; ++i) {
        if (!s.labels.empty()) r.labels.push_back(s.labels[idx[i]]);
        r.weight[i] = s.weight[idx[i]];
        for (int j = 0; j < m; ++j) r.dist.at(i, j) = s.dist.at(idx[i], idx[j]);
    }
    return r;
}

double diameter(const QuasiMetricSpace& s) {
    double d = 0.0;
    for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j) d = std::max(d, s.rho(i, j));
    return d;
}

double total_mass(const QuasiMetricSpace& s) {
    double m = 0.0;
    for (double w : s.weight) m += w;
    return m;
}

double set_mass(const QuasiMetricSpace& s, const std::vector<int>& idx) {
    double m = 0.0;
    for (int i : idx) m += s.weight[i];
    return m;
}

DomainMask full_mask(const QuasiMetricSpace& s) {
    DomainMask m;
    m.indices.resize(s.size());
    for (int i = 0; i < s.size(); ++i) m.indices[i] = i;
    return m;
}

DomainMask complement(const QuasiMetricSpace& s, const DomainMask& m) {
    DomainMask c;
    for (int i = 0; i < s.size(); ++i)
        if (!m.contains(i)) c.indices.push_back(i);
    return c;
}

}  // namespace qms
