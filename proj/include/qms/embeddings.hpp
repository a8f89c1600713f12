#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qms/extension.hpp"
#include "qms/measure.hpp"
#include "qms/norms.hpp"
#include "qms/space.hpp"

namespace qms {

enum class Regime { subcritical, critical, supercritical };

// p against Q/s (or Q/epsilon for the Besov variant)
Regime classify_regime(double p, double Q, double s_or_eps);

struct EmbeddingRow {
    int center = -1;
    double radius = 0.0;
    double lhs = 0.0;
    double rhs_core = 0.0;
    double constant = 0.0;  // lhs / rhs_core (0 when both vanish)
    Regime regime = Regime::subcritical;
    bool degenerate = false;  // zero-norm input or empty core
    std::string note;
};

// Exact one-dimensional convex minimization of gamma -> ||u - gamma||_{L^r(E)}
// over the value range (golden section, 1e-10 of the bracket).
double best_constant_shift(const QuasiMetricSpace& s, const std::vector<double>& u,
                           const std::vector<int>& E, double r);

// smallest mu(B)/r^Q over balls contained in the reference ball
double v_condition_bound(const QuasiMetricSpace& s, int center, double radius, double Q);

EmbeddingRow poincare_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                            double radius, double s_exp, double p, double q, double Q,
                            NormFlavor flavor, const SolveOptions& opts = {});

EmbeddingRow trudinger_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                             double radius, double s_exp, double q, double Q,
                             const std::vector<double>& c1_grid, double c2_cap = 10.0,
                             const SolveOptions& opts = {});

EmbeddingRow holder_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                          double radius, double s_exp, double p, double q, double Q,
                          const SolveOptions& opts = {});

// Besov-scale variant: same three regimes with critical exponent Q/epsilon.
EmbeddingRow besov_epsilon_check(const QuasiMetricSpace& s, const std::vector<double>& u,
                                 int center, double radius, double s_exp, double eps, double p,
                                 double q, double Q, const SolveOptions& opts = {});

EmbeddingRow global_check(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                          double p, double q, double Q, NormFlavor flavor,
                          const SolveOptions& opts = {});

struct EmbeddingReport {
    Regime regime = Regime::subcritical;
    std::vector<EmbeddingRow> rows;
    double max_constant = 0.0;
    double median_constant = 0.0;
    std::string family;  // description of the tested function family
};

// Runs the regime-routed ball check over a seeded family on a ball grid and
// aggregates the empirical constants.
EmbeddingReport embedding_report(const QuasiMetricSpace& s, double s_exp, double p, double q,
                                 NormFlavor flavor, int u_count, uint64_t seed,
                                 int ball_count = 4, const SolveOptions& opts = {});

struct MatrixCell {
    std::string name;
    double constant = 0.0;
    bool finite = true;
    std::string note;
};

struct MatrixParams {
    double s = 0.6, p = 2.0, q = 2.0;
    int u_count = 20;
    uint64_t seed = 1;
    int ball_count = 6;          // sampled domain balls per statement
    bool include_extension = true;
    double omega_exponent = 1.0; // exponential-integrability power
};

struct MatrixReport {
    double c_mu = 0.0;
    double Q = 0.0;
    std::optional<double> perfect_lambda;
    bool perfect_absent = false;
    std::vector<MatrixCell> cells;
    uint64_t seed = 0;
};

// Runs the density diagnostic, the extension with verification, and the
// ball-restricted embedding statements over a shared seeded function family.
MatrixReport characterization_matrix(const QuasiMetricSpace& s, const DomainMask& omega,
                                     const MatrixParams& params);

// seeded test family: constants, distance functions, random vectors
std::vector<std::vector<double>> seeded_family(const QuasiMetricSpace& s, int count,
                                               uint64_t seed);

}  // namespace qms
