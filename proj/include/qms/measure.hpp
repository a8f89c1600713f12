#pragma once

#include <optional>
#include <vector>

#include "qms/space.hpp"

namespace qms {

struct AhlforsBounds {
    double Q = 0.0;
    double kappa_low = 0.0;   // min over centers and critical radii of mu(B)/r^Q
    double kappa_high = 0.0;  // max of the same ratio
};

struct RegularityReport {
    double c_doubling = 1.0;  // best C with mu(B(x,2r)) <= C mu(B(x,r)), r <= r_max
    double q_exponent = 0.0;  // Q used for the power form (log2 c_doubling when not supplied)
    double q_kappa = 0.0;     // best kappa with kappa (r/R)^Q <= mu(Bx,r)/mu(By,R) on nested pairs
    std::optional<AhlforsBounds> ahlfors;
    double r_max = 1.0;
};

struct DensityResult {
    double c_mu = 1.0;  // sup over centers in the domain and radii <= r_max of mu(B)/mu(B cap Omega)
    int witness_center = -1;
    double witness_radius = 0.0;
};

struct PerfectnessResult {
    std::optional<double> lambda;  // absent when some annulus is unfillable at every lambda
    bool absent = false;
    int vacuous_count = 0;  // centers whose every tested radius has Omega inside the ball
    int witness_center = -1;
    double witness_radius = 0.0;
};

// r_min > 0 restricts the scan to the band [r_min, r_max]; the default scans
// every scale (lattice effects below the point spacing then dominate the fit).
RegularityReport regularity(const QuasiMetricSpace& s, double r_max,
                            std::optional<double> Q = std::nullopt, bool want_ahlfors = false,
                            double r_min = 0.0);

DensityResult measure_density(const QuasiMetricSpace& s, const DomainMask& omega,
                              double r_max = 1.0);

// Half-mass radius: sup{ t in [0, r] : mu(B(x,t) cap Omega) <= mu(B(x,r) cap Omega)/2 }.
double phi_radius(const QuasiMetricSpace& s, const DomainMask& omega, int x, double r);
double phi_radius_in(const QuasiMetricSpace& s, const Mat& metric, const DomainMask& omega, int x,
                     double r);

// Largest annulus-population constant. For each center the scan uses the
// outermost radius at which Omega still extends beyond the ball; a center
// isolated at that scale makes the condition fail for every lambda (absent).
PerfectnessResult uniform_perfectness(const QuasiMetricSpace& s, const DomainMask& omega,
                                      double r_max = 1.0);

}  // namespace qms
