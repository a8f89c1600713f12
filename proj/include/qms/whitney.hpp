#pragma once

#include <vector>

#include "qms/metrize.hpp"
#include "qms/norms.hpp"
#include "qms/space.hpp"

namespace qms {

// Whitney-type ball cover of an open subset O, built over a regularized
// symmetric quasi-metric. Construction is greedy on decreasing boundary
// distance; every structural property is re-verified after construction.
struct WhitneyCover {
    std::vector<int> centers;
    std::vector<double> radii;
    double theta = 0.0;
    double lambda = 0.0;          // max over balls of the smallest dilation reaching X \ O
    int overlap = 0;              // measured M: max multiplicity of the theta-dilates on O
    double neighbor_ratio = 1.0;  // max r_i/r_j over theta-dilate-intersecting pairs
    double inflate_factor = 1.0;  // applied uniform radius inflation (1 when none needed)
    std::vector<int> open_set;    // the covered O, sorted
};

struct PartitionOfUnity {
    std::vector<std::vector<double>> psi;  // per cover ball, over all points
    double alpha = 1.0;
    double theta_prime = 0.0;
    double c_star = 1.0;  // measured: sup of bump sums on the union, >= 1
};

struct HolderBumps {
    std::vector<double> radii;               // count+1 radii, decreasing
    std::vector<std::vector<double>> funcs;  // count functions
    double norm_constant = 0.0;              // measured constant in the norm bound
};

WhitneyCover whitney_cover(const QuasiMetricSpace& s, const RegularizedMetric& reg,
                           const std::vector<int>& open_set, double theta,
                           double eps_sep = 0.5);

PartitionOfUnity partition_of_unity(const QuasiMetricSpace& s, const RegularizedMetric& reg,
                                    const WhitneyCover& cover, double alpha, double theta_prime);

// c0 > 1 activates the half-mass adaptation: the whole ladder is then kept
// below the scale r / c0, so that deviation sets at any positive threshold
// carry at least the innermost closed ball;  requires r <= c0 phi(r).
HolderBumps holder_bumps(const QuasiMetricSpace& s, const RegularizedMetric& reg, int x, double r,
                         double s_exp, double p, double q, int count, double c0 = 0.0);

// Measured Hoelder seminorm sup |f(x)-f(y)| / metric(x,y)^beta.
double holder_seminorm(const Mat& metric, const std::vector<double>& f, double beta);

}  // namespace qms
