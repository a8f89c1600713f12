#pragma once

#include <optional>
#include <vector>

#include "qms/gradient.hpp"
#include "qms/metrize.hpp"
#include "qms/norms.hpp"
#include "qms/space.hpp"
#include "qms/whitney.hpp"

namespace qms {

enum class ExtendMode { median, average };

struct ExtensionConfig {
    double s = 0.5, p = 2.0, q = 2.0;
    ExtendMode mode = ExtendMode::median;
    // derived when unset (NaN): alpha in [s, admissible cap], epsilon in (0,s),
    // delta in [0, min(alpha-s, s-epsilon)), t in (0, min(p,q))
    double alpha = nan_marker();
    double epsilon = nan_marker();
    double delta = nan_marker();
    double t = nan_marker();
    double theta = nan_marker();        // cover dilation, default 2 c^2
    double theta_prime = nan_marker();  // default (c + theta/c)/2

    static double nan_marker();
};

// Everything that depends on (space, omega, config) but not on u; shared
// across a family of extensions.
struct ExtensionPipeline {
    const QuasiMetricSpace* space = nullptr;
    DomainMask omega;
    ExtensionConfig cfg;  // resolved values
    RegularizedMetric reg;
    double c = 1.0;  // chain constant of the regularized metric
    WhitneyCover cover;
    PartitionOfUnity partition;
    std::vector<int> star_center;               // nearest domain point per cover ball
    std::vector<std::vector<int>> star_members;  // B*_j cap Omega
    std::vector<double> dist_omega;              // regularized distance to Omega
    std::vector<double> cutoff;
    std::vector<int> V;  // cutoff neighborhood
    int k0 = 0;
    std::vector<int> active;  // active levels of the regularized metric
    bool trivial = false;     // Omega == X
    bool diameter_warning = false;
    bool density_warning = false;  // large measure-density constant
    double c_mu = 1.0;
};

struct ExtensionResult {
    std::vector<double> u_ext;   // local extension (identity on Omega)
    std::vector<double> cutoff;
    std::vector<double> u_tilde; // cutoff * u_ext
    GradientSequence grad_ext;
    double validity_scale = 0.0;
    double norm_ratio = 0.0;
    bool constant_input = false;
};

struct ExtensionReport {
    bool restriction_exact = false;
    bool constant_input = false;
    double validity_scale = 0.0;   // measured gradient-validity constant on V
    double lp_ratio = 0.0;         // local extension L^p control
    double grad_ratio_M = 0.0;     // mixed-norm control, L^p(l^q)
    double grad_ratio_N = 0.0;     // mixed-norm control, l^q(L^p)
    double norm_ratio = 0.0;       // end-to-end quotient of minimal norms
};

ExtensionPipeline build_extension(const QuasiMetricSpace& s, const DomainMask& omega,
                                  ExtensionConfig cfg);

// Whitney-type local extension glued by the partition of unity, multiplied
// by the cutoff. The restriction to Omega is exact.
ExtensionResult extend_with(const ExtensionPipeline& pipe, const std::vector<double>& u);

ExtensionResult extend(const QuasiMetricSpace& s, const DomainMask& omega,
                       const std::vector<double>& u, const ExtensionConfig& cfg);

// The explicit level sequence attached to the local extension: maximal
// averages of shifted powers above the cutoff level, scaled absolute values
// below it.
GradientSequence extension_gradient(const ExtensionPipeline& pipe, const std::vector<double>& fu,
                                    const GradientSequence& grad_in);

ExtensionReport verify_extension(const ExtensionPipeline& pipe, const std::vector<double>& u,
                                 NormFlavor flavor = NormFlavor::M,
                                 const SolveOptions& opts = {});

// Level sequence for a cutoff product: combines the factor's sequence with
// the cutoff's Hoelder data so that the result controls cutoff * f.
GradientSequence multiplier_gradient(const QuasiMetricSpace& s, const Mat& metric,
                                     const std::vector<double>& f, const GradientSequence& grad_f,
                                     const std::vector<double>& Psi, double s_exp, double alpha,
                                     const std::vector<int>& V);

}  // namespace qms
