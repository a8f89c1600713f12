#pragma once

#include <string>
#include <vector>

namespace qms {

// Dense row-major square matrix of distances.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int n_, double fill = 0.0) : n(n_), a(static_cast<size_t>(n_) * n_, fill) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

// Finite quasi-metric measure space: point labels, a distance matrix
// (possibly asymmetric, zero exactly on the diagonal) and strictly
// positive point masses. Immutable after construction by convention.
struct QuasiMetricSpace {
    std::vector<std::string> labels;
    Mat dist;
    std::vector<double> weight;

    int size() const { return dist.n; }
    double rho(int i, int j) const { return dist.at(i, j); }
    // symmetrized distance max(rho(i,j), rho(j,i))
    double rho_sym(int i, int j) const {
        double d = dist.at(i, j), e = dist.at(j, i);
        return d > e ? d : e;
    }
};

struct DomainMask {
    std::vector<int> indices;  // sorted, distinct

    bool contains(int i) const;
    int size() const { return static_cast<int>(indices.size()); }
};

struct QuasiMetricConstants {
    double c_rho = 1.0;    // best quasi-triangle constant
    double c_tilde = 1.0;  // best symmetry constant
};

struct Ball {
    int center = 0;
    double radius = 0.0;
    std::vector<int> members;  // { j : dist[center][j] < radius }, strict
    double mass = 0.0;
};

// Throws std::invalid_argument on malformed data (n < 2, nonpositive
// weight, nonzero diagonal, zero off-diagonal distance, negative entry).
void validate(const QuasiMetricSpace& s);

// Exact maxima of the defining ratios over all ordered triples / pairs.
QuasiMetricConstants compute_constants(const QuasiMetricSpace& s);

Ball ball(const QuasiMetricSpace& s, int center, double radius);

// Ball with respect to an arbitrary distance matrix over the same points.
Ball ball_in(const QuasiMetricSpace& s, const Mat& metric, int center, double radius);

// One representative radius per maximal interval of (0, r_max] on which
// the ball around `center` is constant: the distinct distance values
// below r_max plus r_max itself (balls use strict inequality, so each
// constancy interval is (d_i, d_{i+1}] and the right endpoint represents it).
std::vector<double> critical_radii(const QuasiMetricSpace& s, int center, double r_max);
std::vector<double> critical_radii_in(const Mat& metric, int center, double r_max);

// Restriction of the space to a subset of points (order preserved).
QuasiMetricSpace subspace(const QuasiMetricSpace& s, const std::vector<int>& idx);

double diameter(const QuasiMetricSpace& s);  // max over ordered pairs of rho
double total_mass(const QuasiMetricSpace& s);

double set_mass(const QuasiMetricSpace& s, const std::vector<int>& idx);

DomainMask full_mask(const QuasiMetricSpace& s);
DomainMask complement(const QuasiMetricSpace& s, const DomainMask& m);

}  // namespace qms
