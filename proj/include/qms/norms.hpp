#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qms/gradient.hpp"
#include "qms/space.hpp"

namespace qms {

enum class NormFlavor { M, N };  // L^p(l^q) vs l^q(L^p) aggregation

enum class SolveStatus { exact, upper_bound, degraded };

struct NormResult {
    double value = 0.0;
    GradientSequence witness;
    SolveStatus status = SolveStatus::exact;
    double solver_tolerance = 0.0;
    // convex relaxation value; certified lower bound when the relaxation
    // was solved exactly (status upper_bound paths)
    std::optional<double> lower_bound;
};

struct SolveOptions {
    double tolerance = 1e-8;
    int iteration_cap = 100000;
    int lp_size_cap = 1000;  // row limit for the exact simplex path (vars limited to half)
};

// Weighted L^p norm of a point function (max norm when p = infinity).
double lp_norm(const QuasiMetricSpace& s, const std::vector<double>& f, double p);
double lp_norm_on(const QuasiMetricSpace& s, const std::vector<double>& f,
                  const std::vector<int>& subset, double p);

// Mixed norm of a level sequence in the stated flavor.
double sequence_norm(const QuasiMetricSpace& s, const GradientSequence& g, double p, double q,
                     NormFlavor flavor);
double sequence_norm_on(const QuasiMetricSpace& s, const GradientSequence& g, double p, double q,
                        NormFlavor flavor, const std::vector<int>& subset);

// Minimal mixed norm over all level sequences satisfying the pairwise
// difference constraints. Exact LP cases (p, q in {1, inf}) go through a
// simplex routine; other convex cases use a penalty ramp with a feasible
// polish; min(p,q) < 1 solves the exponent-clamped relaxation and then
// descends monotonically on the true objective (status upper_bound).
NormResult minimal_norm(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                        double p, double q, NormFlavor flavor, const SolveOptions& opts = {});

NormResult minimal_norm_in(const QuasiMetricSpace& s, const Mat& metric,
                           const std::vector<double>& u, double s_exp, double p, double q,
                           NormFlavor flavor, const SolveOptions& opts = {});

constexpr double kInf = 1e300;  // stand-in for an infinite exponent

inline bool is_inf_exp(double p) { return p >= kInf / 2; }

}  // namespace qms
