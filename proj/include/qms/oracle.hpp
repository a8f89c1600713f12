#pragma once

#include "qms/norms.hpp"
#include "qms/space.hpp"

namespace qms {

// Exhaustive grid-refinement minimizer for the pairwise-constrained norm,
// independent of the solver path in norms.cpp. Guarded to tiny instances
// (at most 5 points and 2 active constraint levels).
double oracle_min_gradient(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                           double p, double q, NormFlavor flavor, int grid_points = 15,
                           int passes = 3);

}  // namespace qms
