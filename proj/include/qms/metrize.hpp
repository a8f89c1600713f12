#pragma once

#include <vector>

#include "qms/space.hpp"

namespace qms {

// Symmetric regularization of a quasi-metric: rho_# is the quasi-metric
// whose alpha-th power is the shortest-path closure of (rho_sym)^alpha.
// (rho_#)^alpha satisfies the triangle inequality by construction and
// rho_# <= rho_sym pointwise.
struct RegularizedMetric {
    double alpha = 1.0;
    Mat matrix;               // rho_#
    double distortion = 1.0;  // max over pairs of max(rho_sym / rho_#, 1)
    double collapse = 1.0;    // same ratio measured in the alpha-power scale:
                              // max over pairs of max(rho_sym^alpha / d_alpha, 1)
};

struct IndexEstimate {
    double lower_bound = 0.0;  // largest tested alpha within budget (0 if none)
    bool infinite = false;     // budget met at the grid maximum
    std::vector<double> alpha_grid;
    std::vector<double> distortion_curve;   // alpha-power collapse per alpha; drives the budget test
    std::vector<double> bilipschitz_curve;  // plain max(rho_sym/rho_#) per alpha
    double budget = 2.0;
};

RegularizedMetric regularize(const QuasiMetricSpace& s, double alpha);

// Computable lower bound on the smoothness index: the largest alpha in the
// grid at which the chain construction stays within the distortion budget.
IndexEstimate estimate_index(const QuasiMetricSpace& s, const std::vector<double>& alpha_grid,
                             double budget);

// 48 log-spaced exponents in [0.25, 8].
std::vector<double> default_alpha_grid();

}  // namespace qms
