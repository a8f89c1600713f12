#include "qms/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qms/generators.hpp"
#include "qms/whitney.hpp"

namespace qms {

Regime classify_regime(double p, double Q, double s_or_eps) {
    double crit = Q / s_or_eps;
    if (p < crit) return Regime::subcritical;
    if (p == crit) return Regime::critical;
    return Regime::supercritical;
}

namespace {

std::vector<int> members_of(const QuasiMetricSpace& s, int center, double radius) {
    std::vector<int> v;
    for (int j = 0; j < s.size(); ++j)
        if (s.rho(center, j) < radius) v.push_back(j);
    return v;
}

double avg_lr(const QuasiMetricSpace& s, const std::vector<double>& u, const std::vector<int>& E,
              double gamma, double r) {
    double mass = 0.0, acc = 0.0;
    for (int i : E) {
        mass += s.weight[i];
        acc += s.weight[i] * std::pow(std::fabs(u[i] - gamma), r);
    }
    return std::pow(acc / mass, 1.0 / r);
}

double weighted_mean(const QuasiMetricSpace& s, const std::vector<double>& u,
                     const std::vector<int>& E) {
    double mass = 0.0, acc = 0.0;
    for (int i : E) {
        mass += s.weight[i];
        acc += s.weight[i] * u[i];
    }
    return acc / mass;
}

// single-gradient vector controlling u on the sub-ball, from the minimal witness
std::vector<double> single_gradient_on(const QuasiMetricSpace& s, const std::vector<int>& subset,
                                       const std::vector<double>& u, double s_exp, double p,
                                       double q, NormFlavor flavor, const SolveOptions& opts) {
    QuasiMetricSpace sub = subspace(s, subset);
    std::vector<double> us(subset.size());
    for (size_t i = 0; i < subset.size(); ++i) us[i] = u[subset[i]];
    NormResult r = (flavor == NormFlavor::M)
                       ? minimal_norm(sub, us, s_exp, p, kInf, NormFlavor::M, opts)
                       : minimal_norm(sub, us, s_exp, p, q, NormFlavor::N, opts);
    std::vector<double> g(subset.size(), 0.0);
    for (const auto& lev : r.witness.values)
        for (size_t i = 0; i < g.size(); ++i) g[i] = std::max(g[i], lev[i]);
    return g;
}

double minimal_norm_on(const QuasiMetricSpace& s, const std::vector<int>& subset,
                       const std::vector<double>& u, double s_exp, double p, double q,
                       NormFlavor flavor, const SolveOptions& opts) {
    QuasiMetricSpace sub = subspace(s, subset);
    std::vector<double> us(subset.size());
    for (size_t i = 0; i < subset.size(); ++i) us[i] = u[subset[i]];
    return minimal_norm(sub, us, s_exp, p, q, flavor, opts).value;
}

}  // namespace

double best_constant_shift(const QuasiMetricSpace& s, const std::vector<double>& u,
                           const std::vector<int>& E, double r) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i : E) {
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    if (lo == hi) return 0.0;
    if (r < 1.0) {
        // concave between data values: the minimizer sits on a data value
        double best = std::numeric_limits<double>::infinity();
        for (int i : E) best = std::min(best, avg_lr(s, u, E, u[i], r));
        return best;
    }
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = avg_lr(s, u, E, c, r), fd = avg_lr(s, u, E, d, r);
    while (b - a > 1e-10 * std::max(1.0, hi - lo)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = avg_lr(s, u, E, c, r);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = avg_lr(s, u, E, d, r);
        }
    }
    return avg_lr(s, u, E, (a + b) / 2.0, r);
}

double v_condition_bound(const QuasiMetricSpace& s, int center, double radius, double Q) {
    std::vector<int> big = members_of(s, center, radius);
    std::vector<char> inside(s.size(), 0);
    for (int i : big) inside[i] = 1;
    double b = std::numeric_limits<double>::infinity();
    for (int x = 0; x < s.size(); ++x) {
        for (double r : critical_radii(s, x, radius)) {
            double mass = 0.0;
            bool contained = true;
            for (int j = 0; j < s.size(); ++j) {
                if (s.rho(x, j) < r) {
                    if (!inside[j]) {
                        contained = false;
                        break;
                    }
                    mass += s.weight[j];
                }
            }
            if (contained && mass > 0.0) b = std::min(b, mass / std::pow(r, Q));
        }
    }
    return b;
}

EmbeddingRow poincare_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                            double radius, double s_exp, double p, double q, double Q,
                            NormFlavor flavor, const SolveOptions& opts) {
    EmbeddingRow row;
    row.center = center;
    row.radius = radius;
    row.regime = classify_regime(p, Q, s_exp);
    if (row.regime != Regime::subcritical)
        throw std::invalid_argument("poincare check needs p < Q/s");

    const double sigma = compute_constants(s).c_rho;
    std::vector<int> b0 = members_of(s, center, radius);
    std::vector<int> sb0 = members_of(s, center, sigma * radius);
    double pstar = Q * p / (Q - s_exp * p);
    row.lhs = best_constant_shift(s, u, b0, pstar);

    std::vector<double> g = single_gradient_on(s, sb0, u, s_exp, p, q, flavor, opts);
    double gp = 0.0, mass = 0.0;
    for (size_t i = 0; i < sb0.size(); ++i) {
        mass += s.weight[sb0[i]];
        gp += s.weight[sb0[i]] * std::pow(g[i], p);
    }
    double b = v_condition_bound(s, center, sigma * radius, Q);
    row.rhs_core = std::pow(mass / (b * std::pow(radius, Q)), 1.0 / p) * std::pow(radius, s_exp) *
                   std::pow(gp / mass, 1.0 / p);
    if (row.rhs_core == 0.0) {
        row.degenerate = true;
        row.constant = 0.0;
    } else {
        row.constant = row.lhs / row.rhs_core;
    }
    return row;
}

EmbeddingRow trudinger_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                             double radius, double s_exp, double q, double Q,
                             const std::vector<double>& c1_grid, double c2_cap,
                             const SolveOptions& opts) {
    EmbeddingRow row;
    row.center = center;
    row.radius = radius;
    row.regime = Regime::critical;
    const double p = Q / s_exp;
    const double sigma = compute_constants(s).c_rho;
    std::vector<int> b0 = members_of(s, center, radius);
    std::vector<int> sb0 = members_of(s, center, sigma * radius);

    double norm = minimal_norm_on(s, sb0, u, s_exp, p, q, NormFlavor::M, opts);
    if (norm <= 0.0) {
        row.degenerate = true;
        row.note = "zero seminorm: constant input rejected";
        return row;
    }
    double smass = 0.0;
    for (int i : sb0) smass += s.weight[i];
    double mean = weighted_mean(s, u, b0);
    double b0mass = 0.0;
    for (int i : b0) b0mass += s.weight[i];

    double chosen = 0.0, ratio_at = 0.0;
    for (double c1 : c1_grid) {
        double integral = 0.0;
        for (int i : b0)
            integral += s.weight[i] * std::exp(c1 * std::pow(smass, s_exp / Q) *
                                               std::fabs(u[i] - mean) /
                                               (std::pow(radius, s_exp) * norm));
        double ratio = integral / b0mass;
        if (ratio <= c2_cap) {
            chosen = c1;
            ratio_at = ratio;
        }
    }
    row.constant = chosen;
    row.lhs = ratio_at;
    row.rhs_core = c2_cap;
    return row;
}

EmbeddingRow holder_check(const QuasiMetricSpace& s, const std::vector<double>& u, int center,
                          double radius, double s_exp, double p, double q, double Q,
                          const SolveOptions& opts) {
    EmbeddingRow row;
    row.center = center;
    row.radius = radius;
    row.regime = classify_regime(p, Q, s_exp);
    if (row.regime != Regime::supercritical)
        throw std::invalid_argument("holder check needs p > Q/s");
    const double sigma = compute_constants(s).c_rho;
    std::vector<int> b0 = members_of(s, center, radius);
    std::vector<int> sb0 = members_of(s, center, sigma * radius);
    double norm = minimal_norm_on(s, sb0, u, s_exp, p, q, NormFlavor::M, opts);
    if (norm <= 0.0) {
        row.constant = 0.0;  // constant function: exact zero
        return row;
    }
    double smass = 0.0;
    for (int i : sb0) smass += s.weight[i];
    double core = std::pow(radius, Q / p) * std::pow(smass, -1.0 / p) * norm;
    double worst = 0.0;
    for (int x : b0)
        for (int y : b0) {
            if (x == y) continue;
            double d = s.rho(x, y);
            worst = std::max(worst, std::fabs(u[x] - u[y]) /
                                        (std::pow(d, s_exp - Q / p) * core));
        }
    row.constant = worst;
    row.rhs_core = core;
    return row;
}

EmbeddingRow besov_epsilon_check(const QuasiMetricSpace& s, const std::vector<double>& u,
                                 int center, double radius, double s_exp, double eps, double p,
                                 double q, double Q, const SolveOptions& opts) {
    if (!(eps > 0.0) || !(eps < s_exp)) throw std::invalid_argument("epsilon outside (0, s)");
    EmbeddingRow row;
    row.center = center;
    row.radius = radius;
    row.regime = classify_regime(p, Q, eps);
    const double sigma = compute_constants(s).c_rho;
    std::vector<int> b0 = members_of(s, center, radius);
    std::vector<int> sb0 = members_of(s, center, sigma * radius);
    double norm = minimal_norm_on(s, sb0, u, s_exp, p, q, NormFlavor::N, opts);
    double smass = 0.0;
    for (int i : sb0) smass += s.weight[i];

    if (row.regime == Regime::subcritical) {
        double pstar = Q * p / (Q - eps * p);
        row.lhs = best_constant_shift(s, u, b0, pstar);
        row.rhs_core = std::pow(smass, -eps / Q) * std::pow(radius, s_exp) * norm;
    } else if (row.regime == Regime::critical) {
        if (norm <= 0.0) {
            row.degenerate = true;
            return row;
        }
        double mean = weighted_mean(s, u, b0);
        double b0mass = 0.0, integral = 0.0;
        for (int i : b0) {
            b0mass += s.weight[i];
            integral += s.weight[i] * std::exp(std::pow(smass, eps / Q) * std::fabs(u[i] - mean) /
                                               (std::pow(radius, s_exp) * norm));
        }
        row.lhs = integral / b0mass;
        row.rhs_core = 1.0;
        row.constant = row.lhs;
        return row;
    } else {
        if (norm <= 0.0) {
            row.constant = 0.0;
            return row;
        }
        double core = std::pow(radius, Q / p) * std::pow(smass, -1.0 / p) * norm;
        double worst = 0.0;
        for (int x : b0)
            for (int y : b0) {
                if (x == y) continue;
                worst = std::max(worst, std::fabs(u[x] - u[y]) /
                                            (std::pow(s.rho(x, y), s_exp - Q / p) * core));
            }
        row.constant = worst;
        row.rhs_core = core;
        return row;
    }
    row.constant = (row.rhs_core > 0.0) ? row.lhs / row.rhs_core : 0.0;
    row.degenerate = row.rhs_core == 0.0;
    return row;
}

EmbeddingRow global_check(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                          double p, double q, double Q, NormFlavor flavor,
                          const SolveOptions& opts) {
    EmbeddingRow row;
    row.regime = classify_regime(p, Q, s_exp);
    RegularityReport reg = regularity(s, diameter(s), Q, true);
    if (reg.ahlfors && reg.ahlfors->kappa_low > 0.0) {
        double spread = reg.ahlfors->kappa_high / reg.ahlfors->kappa_low;
        if (spread > 1e3) row.note = "weak volume regularity";
    }
    std::vector<int> all(s.size());
    for (int i = 0; i < s.size(); ++i) all[i] = i;
    double norm = minimal_norm(s, u, s_exp, p, q, flavor, opts).value;
    double diam = diameter(s);

    if (row.regime == Regime::subcritical) {
        double pstar = Q * p / (Q - s_exp * p);
        row.lhs = lp_norm(s, u, pstar);
        row.rhs_core = norm + std::pow(diam, -s_exp) * lp_norm(s, u, p);
    } else if (row.regime == Regime::critical) {
        if (norm <= 0.0) {
            row.degenerate = true;
            return row;
        }
        double mean = weighted_mean(s, u, all);
        double integral = 0.0;
        for (int i : all) integral += s.weight[i] * std::exp(std::fabs(u[i] - mean) / norm);
        row.lhs = integral;
        row.rhs_core = std::pow(diam, Q);
    } else {
        if (norm <= 0.0) {
            row.constant = 0.0;
            return row;
        }
        double worst = 0.0;
        for (int x = 0; x < s.size(); ++x)
            for (int y = 0; y < s.size(); ++y) {
                if (x == y) continue;
                worst = std::max(worst, std::fabs(u[x] - u[y]) /
                                            (std::pow(s.rho(x, y), s_exp - Q / p) * norm));
            }
        row.constant = worst;
        return row;
    }
    row.constant = (row.rhs_core > 0.0) ? row.lhs / row.rhs_core : 0.0;
    row.degenerate = row.rhs_core == 0.0 && row.lhs > 0.0;
    return row;
}

EmbeddingReport embedding_report(const QuasiMetricSpace& s, double s_exp, double p, double q,
                                 NormFlavor flavor, int u_count, uint64_t seed, int ball_count,
                                 const SolveOptions& opts) {
    EmbeddingReport rep;
    double Q = regularity(s, 1.0).q_exponent;
    rep.regime = classify_regime(p, Q, s_exp);
    rep.family = "constants, distance profiles, seeded uniform vectors (seed " +
                 std::to_string(seed) + ")";
    auto fam = seeded_family(s, u_count, seed);
    std::vector<std::pair<int, double>> balls;
    for (int b = 0; b < ball_count; ++b) {
        int x = (b * (s.size() - 1)) / std::max(1, ball_count - 1);
        auto crit = critical_radii(s, x, 1.0);
        balls.push_back({x, crit.back()});
        if (crit.size() > 2) balls.push_back({x, crit[crit.size() / 2]});
    }
    std::vector<double> constants;
    for (const auto& u : fam) {
        for (auto [x, R] : balls) {
            EmbeddingRow row;
            if (rep.regime == Regime::subcritical)
                row = poincare_check(s, u, x, R, s_exp, p, q, Q, flavor, opts);
            else if (rep.regime == Regime::critical)
                row = trudinger_check(s, u, x, R, s_exp, q, Q,
                                      {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2}, 10.0, opts);
            else
                row = holder_check(s, u, x, R, s_exp, p, q, Q, opts);
            if (!row.degenerate && row.constant > 0.0) constants.push_back(row.constant);
            rep.rows.push_back(std::move(row));
        }
    }
    if (!constants.empty()) {
        std::sort(constants.begin(), constants.end());
        rep.max_constant = constants.back();
        rep.median_constant = constants[constants.size() / 2];
    }
    return rep;
}

std::vector<std::vector<double>> seeded_family(const QuasiMetricSpace& s, int count,
                                               uint64_t seed) {
    std::vector<std::vector<double>> fam;
    const int n = s.size();
    fam.push_back(std::vector<double>(n, 1.0));
    for (int c = 0; c < 3 && static_cast<int>(fam.size()) < count; ++c) {
        int anchor = (c * n) / 3;
        std::vector<double> f(n);
        double dmax = 0.0;
        for (int i = 0; i < n; ++i) dmax = std::max(dmax, s.rho(anchor, i));
        for (int i = 0; i < n; ++i) f[i] = s.rho(anchor, i) / (dmax > 0 ? dmax : 1.0);
        fam.push_back(std::move(f));
    }
    if (static_cast<int>(fam.size()) + 2 <= count) {
        // two clamp-profile bumps; skipped when the space resists regularization
        try {
            double cap = 1.0 / std::max(std::log2(compute_constants(s).c_rho), 1e-9);
            double alpha = std::min(cap, 1.0);
            RegularizedMetric reg = regularize(s, alpha);
            double r = std::max(diameter(s) / 2.0, 1e-6);
            for (int c = 0; c < 2; ++c) {
                HolderBumps hb =
                    holder_bumps(s, reg, (c + 1) * n / 3, r, alpha / 2.0, 2.0, 2.0, 2);
                fam.push_back(hb.funcs.front());
            }
        } catch (const std::exception&) {
        }
    }
    Rng rng(seed);
    while (static_cast<int>(fam.size()) < count) {
        std::vector<double> f(n);
        for (double& v : f) v = rng.uniform(-1.0, 1.0);
        fam.push_back(std::move(f));
    }
    return fam;
}

MatrixReport characterization_matrix(const QuasiMetricSpace& s, const DomainMask& omega,
                                     const MatrixParams& params) {
    MatrixReport rep;
    rep.seed = params.seed;
    RegularityReport reg = regularity(s, 1.0);
    rep.Q = reg.q_exponent;
    DensityResult dens = measure_density(s, omega, 1.0);
    rep.c_mu = dens.c_mu;
    PerfectnessResult perf = uniform_perfectness(s, omega, 1.0);
    rep.perfect_lambda = perf.lambda;
    rep.perfect_absent = perf.absent;

    const double Q = rep.Q, sx = params.s;
    const double p_sub = 0.75 * Q / sx, p_crit = Q / sx, p_sup = 1.5 * Q / sx;

    // domain functions, restricted to Omega indices of the ambient space
    std::vector<std::vector<double>> fam = seeded_family(s, params.u_count, params.seed);

    // radius grid: a few critical radii per sampled center
    std::vector<std::pair<int, double>> balls;
    const int bc = std::min<int>(params.ball_count, omega.size());
    for (int b = 0; b < bc; ++b) {
        int x = omega.indices[(b * (omega.size() - 1)) / std::max(1, bc - 1)];
        auto crit = critical_radii(s, x, 1.0);
        balls.push_back({x, crit.back()});
        if (crit.size() > 2) balls.push_back({x, crit[crit.size() / 2]});
    }

    SolveOptions opts;
    opts.tolerance = 1e-7;

    auto domain_norm = [&](const std::vector<double>& u, double p) {
        QuasiMetricSpace dom = subspace(s, omega.indices);
        std::vector<double> ud(omega.size());
        for (int i = 0; i < omega.size(); ++i) ud[i] = u[omega.indices[i]];
        return minimal_norm(dom, ud, sx, p, params.q, NormFlavor::M, opts).value;
    };

    double c_sob = 0.0, c_poi = 0.0, c_tru = std::numeric_limits<double>::infinity(),
           c_hol = 0.0;
    bool tru_any = false;
    for (const auto& u : fam) {
        double norm_sub = domain_norm(u, p_sub);
        double norm_crit = domain_norm(u, p_crit);
        double norm_sup = domain_norm(u, p_sup);
        double lp_sub = lp_norm_on(s, u, omega.indices, p_sub);
        for (auto [x, R] : balls) {
            std::vector<int> bo;
            for (int j : omega.indices)
                if (s.rho(x, j) < R) bo.push_back(j);
            if (bo.empty()) continue;
            double bmass = 0.0;
            for (int j = 0; j < s.size(); ++j)
                if (s.rho(x, j) < R) bmass += s.weight[j];

            double pstar = Q * p_sub / (Q - sx * p_sub);
            double denom = std::pow(R, sx) * norm_sub + lp_sub;
            if (denom > 0.0)
                c_sob = std::max(c_sob, lp_norm_on(s, u, bo, pstar) *
                                            std::pow(bmass, sx / Q) / denom);
            if (norm_sub > 0.0)
                c_poi = std::max(c_poi, best_constant_shift(s, u, bo, pstar) *
                                            std::pow(bmass, sx / Q) /
                                            (std::pow(R, sx) * norm_sub));
            if (norm_crit > 0.0) {
                double mean = weighted_mean(s, u, bo);
                double bomass = 0.0;
                for (int j : bo) bomass += s.weight[j];
                double best_c1 = 0.0;
                for (double c1 : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
                    double integral = 0.0;
                    for (int j : bo)
                        integral += s.weight[j] *
                                    std::exp(std::pow(c1 * std::pow(bmass, sx / Q) *
                                                          std::fabs(u[j] - mean) /
                                                          (std::pow(R, sx) * norm_crit),
                                                      params.omega_exponent));
                    if (integral <= 10.0 * bmass) best_c1 = c1;
                }
                if (best_c1 > 0.0) {
                    c_tru = std::min(c_tru, best_c1);
                    tru_any = true;
                }
            }
            if (norm_sup > 0.0) {
                double core = std::pow(R, Q / p_sup) * std::pow(bmass, -1.0 / p_sup) * norm_sup;
                for (int a : bo)
                    for (int b2 : bo) {
                        if (a == b2) continue;
                        c_hol = std::max(c_hol, std::fabs(u[a] - u[b2]) /
                                                    (std::pow(s.rho(a, b2), sx - Q / p_sup) *
                                                     core));
                    }
            }
        }
    }
    rep.cells.push_back({"sobolev", c_sob, std::isfinite(c_sob), ""});
    rep.cells.push_back({"poincare", c_poi, std::isfinite(c_poi), ""});
    rep.cells.push_back({"trudinger_c1", tru_any ? c_tru : 0.0, tru_any,
                         tru_any ? "" : "no admissible exponent on the grid"});
    rep.cells.push_back({"holder", c_hol, std::isfinite(c_hol), ""});

    if (params.include_extension && omega.size() < s.size()) {
        ExtensionConfig cfg;
        cfg.s = sx;
        cfg.p = params.p;
        cfg.q = params.q;
        cfg.mode = ExtendMode::median;
        ExtensionPipeline pipe = build_extension(s, omega, cfg);
        double v_max = 0.0, nr_max = 0.0, lp_max = 0.0;
        for (const auto& u : fam) {
            ExtensionReport er = verify_extension(pipe, u, NormFlavor::M, opts);
            if (er.constant_input) continue;
            v_max = std::max(v_max, er.validity_scale);
            nr_max = std::max(nr_max, er.norm_ratio);
            lp_max = std::max(lp_max, er.lp_ratio);
        }
        rep.cells.push_back({"extension_validity", v_max, std::isfinite(v_max), ""});
        rep.cells.push_back({"extension_norm_ratio", nr_max, std::isfinite(nr_max), ""});
        rep.cells.push_back({"extension_lp_ratio", lp_max, std::isfinite(lp_max), ""});
    }
    return rep;
}

}  // namespace qms
