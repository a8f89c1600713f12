#include "qms/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

double lp_norm_on(const QuasiMetricSpace& s, const std::vector<double>& f,
                  const std::vector<int>& subset, double p) {
    if (is_inf_exp(p)) {
        double m = 0.0;
        for (int i : subset) m = std::max(m, std::fabs(f[i]));
        return m;
    }
    double acc = 0.0;
    for (int i : subset) acc += s.weight[i] * std::pow(std::fabs(f[i]), p);
    return std::pow(acc, 1.0 / p);
}

double lp_norm(const QuasiMetricSpace& s, const std::vector<double>& f, double p) {
    std::vector<int> all(s.size());
    for (int i = 0; i < s.size(); ++i) all[i] = i;
    return lp_norm_on(s, f, all, p);
}

double sequence_norm_on(const QuasiMetricSpace& s, const GradientSequence& g, double p, double q,
                        NormFlavor flavor, const std::vector<int>& subset) {
    const size_t L = g.level_ids.size();
    if (flavor == NormFlavor::M) {
        std::vector<double> col(subset.size(), 0.0);
        for (size_t i = 0; i < subset.size(); ++i) {
            int x = subset[i];
            if (is_inf_exp(q)) {
                for (size_t l = 0; l < L; ++l) col[i] = std::max(col[i], g.values[l][x]);
            } else {
                double a = 0.0;
                for (size_t l = 0; l < L; ++l) a += std::pow(g.values[l][x], q);
                col[i] = std::pow(a, 1.0 / q);
            }
        }
        if (is_inf_exp(p)) return *std::max_element(col.begin(), col.end());
        double acc = 0.0;
        for (size_t i = 0; i < subset.size(); ++i)
            acc += s.weight[subset[i]] * std::pow(col[i], p);
        return std::pow(acc, 1.0 / p);
    }
    // N flavor: L^p per level, then l^q across levels
    double acc = 0.0, mx = 0.0;
    for (size_t l = 0; l < L; ++l) {
        double lev;
        if (is_inf_exp(p)) {
            lev = 0.0;
            for (int x : subset) lev = std::max(lev, g.values[l][x]);
        } else {
            double a = 0.0;
            for (int x : subset) a += s.weight[x] * std::pow(g.values[l][x], p);
            lev = std::pow(a, 1.0 / p);
        }
        if (is_inf_exp(q))
            mx = std::max(mx, lev);
        else
            acc += std::pow(lev, q);
    }
    return is_inf_exp(q) ? mx : std::pow(acc, 1.0 / q);
}

double sequence_norm(const QuasiMetricSpace& s, const GradientSequence& g, double p, double q,
                     NormFlavor flavor) {
    std::vector<int> all(s.size());
    for (int i = 0; i < s.size(); ++i) all[i] = i;
    return sequence_norm_on(s, g, p, q, flavor, all);
}

namespace {

struct Constraint {
    int a = 0, b = 0;     // variable indices
    double bound = 0.0;   // g[a] + g[b] >= bound
};

struct Problem {
    int n_points = 0;
    std::vector<int> levels;          // level ids carrying variables
    std::vector<Constraint> cons;     // bound > 0 only
    bool single_gradient = false;     // one shared vector instead of per-level
    int n_vars = 0;

    int var(int level_idx, int x) const { return level_idx * n_points + x; }
};

// ---- exact simplex for  min c.z  s.t.  A z >= b, z >= 0  (dense two-phase) ----

struct LinearProgram {
    int nv = 0;
    std::vector<double> c;
    // rows: sparse (idx, coef) pairs, rhs >= 0
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> rhs;
};

bool simplex_solve(const LinearProgram& lp, std::vector<double>& z, double& value) {
    const int m = static_cast<int>(lp.rows.size());
    const int nv = lp.nv;
    const int cols = nv + m + m;  // vars, surplus, artificial
    std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        for (auto [j, v] : lp.rows[i]) T[i][j] += v;
        T[i][nv + i] = -1.0;      // surplus
        T[i][nv + m + i] = 1.0;   // artificial
        T[i][cols] = lp.rhs[i];
        basis[i] = nv + m + i;
    }

    auto pivot = [&](int r, int cidx) {
        double pv = T[r][cidx];
        for (double& v : T[r]) v /= pv;
        for (int i = 0; i < m; ++i) {
            if (i == r || T[i][cidx] == 0.0) continue;
            double f = T[i][cidx];
            for (int j = 0; j <= cols; ++j) T[i][j] -= f * T[r][j];
        }
        basis[r] = cidx;
    };

    auto run = [&](const std::vector<double>& cost, bool phase1) -> bool {
        std::vector<double> red(cols + 1, 0.0);
        for (int j = 0; j <= cols; ++j) {
            double v = (j < static_cast<int>(cost.size())) ? cost[j] : 0.0;
            for (int i = 0; i < m; ++i) {
                double cb = (basis[i] < static_cast<int>(cost.size())) ? cost[basis[i]] : 0.0;
                v -= cb * T[i][j];
            }
            red[j] = v;
        }
        const int limit = 2000 + 20 * (m + cols);
        for (int it = 0; it < limit; ++it) {
            int enter = -1;  // most negative reduced cost
            double most = -1e-10;
            int jmax = phase1 ? cols : nv + m;  // exclude artificials in phase 2
            for (int j = 0; j < jmax; ++j)
                if (red[j] < most) {
                    most = red[j];
                    enter = j;
                }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (T[i][enter] > 1e-12) {
                    double ratio = T[i][cols] / T[i][enter];
                    if (ratio < best - 1e-15 ||
                        (ratio < best + 1e-15 && (leave < 0 || basis[i] < basis[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded (cannot occur here)
            pivot(leave, enter);
            for (int j = 0; j <= cols; ++j) {
                double v = (j < static_cast<int>(cost.size())) ? cost[j] : 0.0;
                for (int i = 0; i < m; ++i) {
                    double cb = (basis[i] < static_cast<int>(cost.size())) ? cost[basis[i]] : 0.0;
                    v -= cb * T[i][j];
                }
                red[j] = v;
            }
        }
        return false;
    };

    std::vector<double> cost1(cols, 0.0);
    for (int i = 0; i < m; ++i) cost1[nv + m + i] = 1.0;
    if (!run(cost1, true)) return false;
    double art = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= nv + m) art += T[i][cols];
    if (art > 1e-7) return false;  // infeasible (cannot occur for these problems)
    // drive leftover zero-level artificials out of the basis
    for (int i = 0; i < m; ++i) {
        if (basis[i] < nv + m) continue;
        for (int j = 0; j < nv + m; ++j)
            if (std::fabs(T[i][j]) > 1e-9) {
                pivot(i, j);
                break;
            }
    }

    std::vector<double> cost2(cols, 0.0);
    for (int j = 0; j < nv; ++j) cost2[j] = lp.c[j];
    if (!run(cost2, false)) return false;

    z.assign(nv, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < nv) z[basis[i]] = std::max(0.0, T[i][cols]);
    value = 0.0;
    for (int j = 0; j < nv; ++j) value += lp.c[j] * z[j];
    return true;
}

// ---- objective evaluation and gradients on the flattened variable vector ----

struct Objective {
    const QuasiMetricSpace* s;
    const Problem* prob;
    double p, q;
    NormFlavor flavor;

    int levels() const { return prob->single_gradient ? 1 : static_cast<int>(prob->levels.size()); }

    double eval(const std::vector<double>& g) const {
        const int n = prob->n_points, L = levels();
        if (prob->single_gradient) {
            if (is_inf_exp(p)) {
                double m = 0.0;
                for (int x = 0; x < n; ++x) m = std::max(m, g[x]);
                return m;
            }
            double acc = 0.0;
            for (int x = 0; x < n; ++x) acc += s->weight[x] * std::pow(g[x], p);
            return std::pow(acc, 1.0 / p);
        }
        if (flavor == NormFlavor::M) {
            double acc = 0.0, mx = 0.0;
            for (int x = 0; x < n; ++x) {
                double col;
                if (is_inf_exp(q)) {
                    col = 0.0;
                    for (int l = 0; l < L; ++l) col = std::max(col, g[prob->var(l, x)]);
                } else {
                    double a = 0.0;
                    for (int l = 0; l < L; ++l) a += std::pow(g[prob->var(l, x)], q);
                    col = std::pow(a, 1.0 / q);
                }
                if (is_inf_exp(p))
                    mx = std::max(mx, col);
                else
                    acc += s->weight[x] * std::pow(col, p);
            }
            return is_inf_exp(p) ? mx : std::pow(acc, 1.0 / p);
        }
        double acc = 0.0, mx = 0.0;
        for (int l = 0; l < L; ++l) {
            double lev;
            if (is_inf_exp(p)) {
                lev = 0.0;
                for (int x = 0; x < n; ++x) lev = std::max(lev, g[prob->var(l, x)]);
            } else {
                double a = 0.0;
                for (int x = 0; x < n; ++x) a += s->weight[x] * std::pow(g[prob->var(l, x)], p);
                lev = std::pow(a, 1.0 / p);
            }
            if (is_inf_exp(q))
                mx = std::max(mx, lev);
            else
                acc += std::pow(lev, q);
        }
        return is_inf_exp(q) ? mx : std::pow(acc, 1.0 / q);
    }

    // (sub)gradient; exact where the objective is differentiable, a selected
    // subgradient at max-type kinks
    void grad(const std::vector<double>& g, std::vector<double>& out) const {
        const int n = prob->n_points, L = levels();
        std::fill(out.begin(), out.end(), 0.0);
        double F = eval(g);
        if (F <= 0.0) return;
        if (prob->single_gradient) {
            if (is_inf_exp(p)) {
                int arg = 0;
                for (int x = 1; x < n; ++x)
                    if (g[x] > g[arg]) arg = x;
                out[arg] = 1.0;
                return;
            }
            for (int x = 0; x < n; ++x)
                out[x] = std::pow(F, 1.0 - p) * s->weight[x] * std::pow(g[x], p - 1.0);
            return;
        }
        if (flavor == NormFlavor::M) {
            for (int x = 0; x < n; ++x) {
                double col, a = 0.0;
                int argl = 0;
                if (is_inf_exp(q)) {
                    col = 0.0;
                    for (int l = 0; l < L; ++l)
                        if (g[prob->var(l, x)] > col) {
                            col = g[prob->var(l, x)];
                            argl = l;
                        }
                } else {
                    for (int l = 0; l < L; ++l) a += std::pow(g[prob->var(l, x)], q);
                    col = std::pow(a, 1.0 / q);
                }
                if (col <= 0.0) continue;
                double outer;
                if (is_inf_exp(p)) {
                    // subgradient concentrated on the argmax column
                    double mx = 0.0;
                    int argx = 0;
                    for (int y = 0; y < n; ++y) {
                        double cy = 0.0;
                        if (is_inf_exp(q))
                            for (int l = 0; l < L; ++l) cy = std::max(cy, g[prob->var(l, y)]);
                        else {
                            double ay = 0.0;
                            for (int l = 0; l < L; ++l) ay += std::pow(g[prob->var(l, y)], q);
                            cy = std::pow(ay, 1.0 / q);
                        }
                        if (cy > mx) {
                            mx = cy;
                            argx = y;
                        }
                    }
                    if (x != argx) continue;
                    outer = 1.0;
                } else {
                    outer = std::pow(F, 1.0 - p) * s->weight[x] * std::pow(col, p - 1.0);
                }
                if (is_inf_exp(q)) {
                    out[prob->var(argl, x)] += outer;
                } else {
                    for (int l = 0; l < L; ++l) {
                        double gv = g[prob->var(l, x)];
                        if (gv > 0.0)
                            out[prob->var(l, x)] +=
                                outer * std::pow(col, 1.0 - q) * std::pow(gv, q - 1.0);
                    }
                }
            }
            return;
        }
        // N flavor
        std::vector<double> lev(L, 0.0);
        for (int l = 0; l < L; ++l) {
            if (is_inf_exp(p)) {
                for (int x = 0; x < n; ++x) lev[l] = std::max(lev[l], g[prob->var(l, x)]);
            } else {
                double a = 0.0;
                for (int x = 0; x < n; ++x) a += s->weight[x] * std::pow(g[prob->var(l, x)], p);
                lev[l] = std::pow(a, 1.0 / p);
            }
        }
        for (int l = 0; l < L; ++l) {
            if (lev[l] <= 0.0) continue;
            double outer;
            if (is_inf_exp(q)) {
                int arg = static_cast<int>(std::max_element(lev.begin(), lev.end()) - lev.begin());
                if (l != arg) continue;
                outer = 1.0;
            } else {
                outer = std::pow(F, 1.0 - q) * std::pow(lev[l], q - 1.0);
            }
            if (is_inf_exp(p)) {
                int arg = 0;
                for (int x = 1; x < n; ++x)
                    if (g[prob->var(l, x)] > g[prob->var(l, arg)]) arg = x;
                out[prob->var(l, arg)] += outer;
            } else {
                for (int x = 0; x < n; ++x) {
                    double gv = g[prob->var(l, x)];
                    if (gv > 0.0)
                        out[prob->var(l, x)] +=
                            outer * std::pow(lev[l], 1.0 - p) * s->weight[x] * std::pow(gv, p - 1.0);
                }
            }
        }
    }
};

// smallest uniform scale-up making every constraint hold, fixing zero-sum rows first
void make_feasible(const Problem& prob, std::vector<double>& g) {
    for (const auto& c : prob.cons)
        if (g[c.a] + g[c.b] <= 0.0) {
            g[c.a] = std::max(g[c.a], c.bound / 2.0);
            g[c.b] = std::max(g[c.b], c.bound / 2.0);
        }
    double nu = 1.0;
    for (const auto& c : prob.cons) nu = std::max(nu, c.bound / (g[c.a] + g[c.b]));
    if (nu > 1.0)
        for (double& v : g) v *= nu * (1.0 + 1e-15);
}

// monotone per-variable shrink toward the constraint envelope
void shrink_pass(const Problem& prob, std::vector<double>& g, int sweeps) {
    std::vector<std::vector<std::pair<int, double>>> touching(g.size());
    for (const auto& c : prob.cons) {
        touching[c.a].push_back({c.b, c.bound});
        touching[c.b].push_back({c.a, c.bound});
    }
    for (int s = 0; s < sweeps; ++s) {
        bool changed = false;
        for (size_t v = 0; v < g.size(); ++v) {
            double need = 0.0;
            for (auto [other, bound] : touching[v]) need = std::max(need, bound - g[other]);
            if (need < g[v]) {
                g[v] = need;
                changed = true;
            }
        }
        if (!changed) break;
    }
}

double penalty_solve(const Objective& obj, const Problem& prob, std::vector<double>& g,
                     const SolveOptions& opts, double& achieved_tol, bool& converged) {
    const size_t nv = g.size();
    std::vector<double> grad_f(nv), grad_pen(nv), y = g, g_prev = g, step_tmp(nv);

    auto penalty = [&](const std::vector<double>& z, double mu, std::vector<double>* gr) -> double {
        double val = obj.eval(z);
        if (gr) obj.grad(z, *gr);
        double pen = 0.0;
        for (const auto& c : prob.cons) {
            double viol = c.bound - (z[c.a] + z[c.b]);
            if (viol > 0.0) {
                pen += viol * viol;
                if (gr) {
                    (*gr)[c.a] -= 2.0 * mu * viol;
                    (*gr)[c.b] -= 2.0 * mu * viol;
                }
            }
        }
        return val + mu * pen;
    };

    converged = true;
    for (double mu : {1e2, 1e4, 1e6, 1e8}) {
        double L_est = 1.0 + 4.0 * mu;  // penalty curvature estimate
        double tk = 1.0;
        y = g;
        g_prev = g;
        double f_prev = penalty(g, mu, nullptr);
        int stage_cap = std::min(opts.iteration_cap / 4, 2000);
        bool stage_done = false;
        for (int it = 0; it < stage_cap; ++it) {
            double fy = penalty(y, mu, &grad_f);
            double step = 1.0 / L_est;
            // backtracking on the proximal step
            double fz;
            for (int bt = 0; bt < 60; ++bt) {
                for (size_t i = 0; i < nv; ++i)
                    step_tmp[i] = std::max(0.0, y[i] - step * grad_f[i]);
                fz = penalty(step_tmp, mu, nullptr);
                double quad = fy;
                for (size_t i = 0; i < nv; ++i) {
                    double d = step_tmp[i] - y[i];
                    quad += grad_f[i] * d + d * d / (2.0 * step);
                }
                if (fz <= quad + 1e-15 * std::fabs(quad)) break;
                step /= 2.0;
            }
            double t_next = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
            for (size_t i = 0; i < nv; ++i) {
                double gn = step_tmp[i];
                y[i] = gn + ((tk - 1.0) / t_next) * (gn - g[i]);
                if (y[i] < 0.0) y[i] = 0.0;
                g[i] = gn;
            }
            tk = t_next;
            if (std::fabs(f_prev - fz) <= opts.tolerance * std::max(1.0, std::fabs(fz)) &&
                it > 10) {
                stage_done = true;
                break;
            }
            f_prev = fz;
        }
        if (!stage_done) converged = false;
    }
    achieved_tol = opts.tolerance;
    make_feasible(prob, g);
    shrink_pass(prob, g, 50);
    return obj.eval(g);
}

Problem build_problem(const QuasiMetricSpace& s, const Mat& metric, const std::vector<double>& u,
                      double s_exp, bool single_gradient) {
    (void)s;
    Problem prob;
    prob.n_points = metric.n;
    prob.single_gradient = single_gradient;
    const int n = metric.n;
    // one constraint per unordered pair and level; asymmetric metrics may
    // put (x,y) and (y,x) at different levels
    std::vector<std::tuple<int, int, int, double>> raw;  // (level, lo, hi, bound)
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            double diff = std::fabs(u[x] - u[y]);
            if (diff == 0.0) continue;
            double d = metric.at(x, y);
            int k = dyadic_level(d);
            double bound = diff / std::pow(d, s_exp);
            raw.emplace_back(k, std::min(x, y), std::max(x, y), bound);
        }
    std::sort(raw.begin(), raw.end());
    std::vector<int> lvls;
    for (auto& [k, lo, hi, bd] : raw) lvls.push_back(k);
    std::sort(lvls.begin(), lvls.end());
    lvls.erase(std::unique(lvls.begin(), lvls.end()), lvls.end());
    prob.levels = lvls;
    prob.n_vars = single_gradient ? n : static_cast<int>(lvls.size()) * n;

    for (size_t i = 0; i < raw.size(); ++i) {
        auto [k, lo, hi, bd] = raw[i];
        // keep only the largest bound per (level, pair)
        if (i + 1 < raw.size()) {
            auto [k2, lo2, hi2, bd2] = raw[i + 1];
            if (k == k2 && lo == lo2 && hi == hi2) continue;
        }
        int li = single_gradient
                     ? 0
                     : static_cast<int>(std::lower_bound(lvls.begin(), lvls.end(), k) - lvls.begin());
        Constraint c;
        c.a = single_gradient ? lo : prob.var(li, lo);
        c.b = single_gradient ? hi : prob.var(li, hi);
        c.bound = bd;
        prob.cons.push_back(c);
    }
    if (single_gradient) {
        // a single vector must satisfy every pair; merge duplicate pairs
        std::vector<Constraint> merged;
        std::sort(prob.cons.begin(), prob.cons.end(), [](const Constraint& a, const Constraint& b) {
            return std::tie(a.a, a.b, a.bound) < std::tie(b.a, b.b, b.bound);
        });
        for (size_t i = 0; i < prob.cons.size(); ++i) {
            if (i + 1 < prob.cons.size() && prob.cons[i].a == prob.cons[i + 1].a &&
                prob.cons[i].b == prob.cons[i + 1].b)
                continue;
            merged.push_back(prob.cons[i]);
        }
        prob.cons.swap(merged);
    }
    return prob;
}

GradientSequence witness_from(const Problem& prob, const std::vector<double>& g) {
    GradientSequence w;
    if (prob.single_gradient) {
        for (int k : prob.levels) {
            auto& v = w.ensure(k, prob.n_points);
            for (int x = 0; x < prob.n_points; ++x) v[x] = g[x];
        }
        return w;
    }
    for (size_t l = 0; l < prob.levels.size(); ++l) {
        auto& v = w.ensure(prob.levels[l], prob.n_points);
        for (int x = 0; x < prob.n_points; ++x) v[x] = g[prob.var(static_cast<int>(l), x)];
    }
    return w;
}

// exact simplex on the piecewise-linear cases; returns false when the shape
// is not linear or the instance exceeds the size cap
bool try_lp(const QuasiMetricSpace& s, const Problem& prob, double p, double q, NormFlavor flavor,
            const SolveOptions& opts, std::vector<double>& g, double& value) {
    const bool p1 = (p == 1.0), pI = is_inf_exp(p), q1 = (q == 1.0), qI = is_inf_exp(q);
    if (!((p1 || pI) && (q1 || qI))) return false;
    // the dense tableau is quadratic in the row count; large instances take
    // the penalty path instead
    if (static_cast<int>(prob.cons.size()) > opts.lp_size_cap ||
        prob.n_vars > opts.lp_size_cap / 2)
        return false;
    const int n = prob.n_points;
    const int L = prob.single_gradient ? 1 : static_cast<int>(prob.levels.size());
    const int base = prob.n_vars;

    LinearProgram lp;
    auto add_row = [&](std::vector<std::pair<int, double>> row, double rhs) {
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(rhs);
    };
    for (const auto& c : prob.cons) add_row({{c.a, 1.0}, {c.b, 1.0}}, c.bound);

    if (prob.single_gradient || L == 1) {
        if (p1) {
            lp.nv = base;
            lp.c.assign(base, 0.0);
            for (int x = 0; x < n; ++x) lp.c[prob.single_gradient ? x : prob.var(0, x)] = s.weight[x];
        } else {  // p = inf: minimize T with T >= g_v
            lp.nv = base + 1;
            lp.c.assign(lp.nv, 0.0);
            lp.c[base] = 1.0;
            for (int v = 0; v < base; ++v) add_row({{base, 1.0}, {v, -1.0}}, 0.0);
        }
    } else if (flavor == NormFlavor::M) {
        if (p1 && q1) {
            lp.nv = base;
            lp.c.assign(base, 0.0);
            for (int l = 0; l < L; ++l)
                for (int x = 0; x < n; ++x) lp.c[prob.var(l, x)] = s.weight[x];
        } else if (p1 && qI) {  // sum_x w_x max_k: aux t_x
            lp.nv = base + n;
            lp.c.assign(lp.nv, 0.0);
            for (int x = 0; x < n; ++x) lp.c[base + x] = s.weight[x];
            for (int l = 0; l < L; ++l)
                for (int x = 0; x < n; ++x) add_row({{base + x, 1.0}, {prob.var(l, x), -1.0}}, 0.0);
        } else if (pI && q1) {  // max_x sum_k: aux T
            lp.nv = base + 1;
            lp.c.assign(lp.nv, 0.0);
            lp.c[base] = 1.0;
            for (int x = 0; x < n; ++x) {
                std::vector<std::pair<int, double>> row{{base, 1.0}};
                for (int l = 0; l < L; ++l) row.push_back({prob.var(l, x), -1.0});
                add_row(std::move(row), 0.0);
            }
        } else {  // (inf, inf): T >= every var
            lp.nv = base + 1;
            lp.c.assign(lp.nv, 0.0);
            lp.c[base] = 1.0;
            for (int v = 0; v < base; ++v) add_row({{base, 1.0}, {v, -1.0}}, 0.0);
        }
    } else {  // N flavor
        if (p1 && q1) {
            lp.nv = base;
            lp.c.assign(base, 0.0);
            for (int l = 0; l < L; ++l)
                for (int x = 0; x < n; ++x) lp.c[prob.var(l, x)] = s.weight[x];
        } else if (p1 && qI) {  // max_k of weighted level sums: aux T
            lp.nv = base + 1;
            lp.c.assign(lp.nv, 0.0);
            lp.c[base] = 1.0;
            for (int l = 0; l < L; ++l) {
                std::vector<std::pair<int, double>> row{{base, 1.0}};
                for (int x = 0; x < n; ++x) row.push_back({prob.var(l, x), -s.weight[x]});
                add_row(std::move(row), 0.0);
            }
        } else if (pI && q1) {  // sum_k max_x: aux t_k
            lp.nv = base + L;
            lp.c.assign(lp.nv, 0.0);
            for (int l = 0; l < L; ++l) lp.c[base + l] = 1.0;
            for (int l = 0; l < L; ++l)
                for (int x = 0; x < n; ++x) add_row({{base + l, 1.0}, {prob.var(l, x), -1.0}}, 0.0);
        } else {  // (inf, inf)
            lp.nv = base + 1;
            lp.c.assign(lp.nv, 0.0);
            lp.c[base] = 1.0;
            for (int v = 0; v < base; ++v) add_row({{base, 1.0}, {v, -1.0}}, 0.0);
        }
    }

    std::vector<double> z;
    double val;
    if (!simplex_solve(lp, z, val)) return false;
    g.assign(z.begin(), z.begin() + base);
    value = val;
    return true;
}

NormResult solve(const QuasiMetricSpace& s, const Mat& metric, const std::vector<double>& u,
                 double s_exp, double p, double q, NormFlavor flavor, const SolveOptions& opts) {
    NormResult res;
    bool constant = true;
    for (size_t i = 1; i < u.size(); ++i)
        if (u[i] != u[0]) constant = false;
    if (constant) return res;  // zero norm, empty witness

    // normalize for exact positive homogeneity
    double scale = 0.0;
    for (double v : u) scale = std::max(scale, std::fabs(v));
    std::vector<double> un(u.size());
    for (size_t i = 0; i < u.size(); ++i) un[i] = u[i] / scale;

    const bool nonconvex = std::min(p, q) < 1.0;
    const double ps = nonconvex ? std::max(p, 1.0) : p;
    const double qs = nonconvex ? std::max(q, 1.0) : q;
    const bool single = (flavor == NormFlavor::M) && is_inf_exp(qs);

    Problem prob = build_problem(s, metric, un, s_exp, single);
    if (prob.cons.empty()) return res;

    std::vector<double> g(prob.n_vars, 0.0);
    Objective obj{&s, &prob, ps, qs, flavor};

    double relaxed_value;
    bool solver_converged = true;
    bool lp_exact = try_lp(s, prob, ps, qs, flavor, opts, g, relaxed_value);
    if (!lp_exact) {
        // feasible half-split start
        for (const auto& c : prob.cons) {
            g[c.a] = std::max(g[c.a], c.bound / 2.0);
            g[c.b] = std::max(g[c.b], c.bound / 2.0);
        }
        double tol;
        relaxed_value = penalty_solve(obj, prob, g, opts, tol, solver_converged);
        res.solver_tolerance = tol;
    } else {
        res.solver_tolerance = 1e-12;
    }

    if (nonconvex) {
        res.status = SolveStatus::upper_bound;
        res.lower_bound = relaxed_value * scale;
        // monotone descent on the true objective from the relaxed point
        make_feasible(prob, g);
        shrink_pass(prob, g, 200);
        Objective true_obj{&s, &prob, p, q, flavor};
        // the true aggregation may prefer single-level witnesses even for q=inf
        res.value = true_obj.eval(g) * scale;
    } else {
        make_feasible(prob, g);
        shrink_pass(prob, g, 50);
        res.value = obj.eval(g) * scale;
        res.status = solver_converged ? SolveStatus::exact : SolveStatus::degraded;
    }

    for (double& v : g) v *= scale;
    res.witness = witness_from(prob, g);
    return res;
}

}  // namespace

NormResult minimal_norm_in(const QuasiMetricSpace& s, const Mat& metric,
                           const std::vector<double>& u, double s_exp, double p, double q,
                           NormFlavor flavor, const SolveOptions& opts) {
    if (!(s_exp > 0.0) || !(p > 0.0) || !(q > 0.0))
        throw std::invalid_argument("exponents must be positive");
    return solve(s, metric, u, s_exp, p, q, flavor, opts);
}

NormResult minimal_norm(const QuasiMetricSpace& s, const std::vector<double>& u, double s_exp,
                        double p, double q, NormFlavor flavor, const SolveOptions& opts) {
    return minimal_norm_in(s, s.dist, u, s_exp, p, q, flavor, opts);
}

}  // namespace qms
